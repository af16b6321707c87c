from __future__ import annotations

import json
from typing import Collection, Iterable, List, Sequence, Tuple

import numpy as np

from pyvalence.attribute_words import LEXICONS
from pyvalence.corpus import lowercase
from pyvalence.errors import DomainError, ParseError, ValidationError
from pyvalence.vecstore import EmbeddingSpace, Vocabulary, cosines

NULL_TRAIT = 'null'
SATURATED_TRAIT = 'saturated'
SATURATED_SIZE = 8


class PolarLexicon:
    '''A trait operationalized by two opposed word lists; positive is the favourable pole.'''

    __slots__ = ('trait_name', 'positive', 'negative')

    def __init__(self, trait_name: str, positive: Iterable[str], negative: Iterable[str]):
        positive, negative = tuple(positive), tuple(negative)

        for pole, words in (('positive', positive), ('negative', negative)):
            if not words:
                raise ValidationError(f'{trait_name}: {pole} pole is empty')
            if len(set(words)) != len(words):
                raise ValidationError(f'{trait_name}: {pole} pole contains repeated words')

        overlap = set(positive) & set(negative)
        if overlap:
            raise ValidationError(f'{trait_name}: words in both poles: {", ".join(sorted(overlap))}')

        self.trait_name = trait_name
        self.positive = positive
        self.negative = negative

    def __repr__(self):
        return f'PolarLexicon({self.trait_name!r}, positive={len(self.positive)}, negative={len(self.negative)})'

    def __eq__(self, other) -> bool:
        return (
            self.trait_name == other.trait_name and self.positive == other.positive and self.negative == other.negative
        )

    @property
    def sizes(self) -> Tuple[int, int]:
        return len(self.positive), len(self.negative)

    def words(self) -> Tuple[str, ...]:
        return self.positive + self.negative

    def swap(self) -> PolarLexicon:
        return PolarLexicon(self.trait_name, self.negative, self.positive)


def shipped_lexicon(name: str) -> PolarLexicon:
    try:
        positive, negative = LEXICONS[name]
    except KeyError:
        raise ValidationError(f'No shipped lexicon {name!r}; choose from {", ".join(LEXICONS)}') from None

    return PolarLexicon(name, positive, negative)


def load_lexicon(path) -> PolarLexicon:
    with open(path, encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f'invalid JSON ({e.msg})', path=path, lineno=e.lineno) from e

    if not isinstance(data, dict) or not isinstance(data.get('trait'), str):
        raise ParseError('expected an object with a string "trait"', path=path)
    for pole in ('positive', 'negative'):
        words = data.get(pole)
        if not isinstance(words, list) or not all(isinstance(word, str) for word in words):
            raise ParseError(f'"{pole}" must be a list of strings', path=path)

    return PolarLexicon(
        data['trait'],
        [lowercase(word) for word in data['positive']],
        [lowercase(word) for word in data['negative']],
    )


def save_lexicon(lex: PolarLexicon, path):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(
            {'trait': lex.trait_name, 'positive': list(lex.positive), 'negative': list(lex.negative)},
            f,
            ensure_ascii=False,
            indent=2,
        )


def prune_oov(lex: PolarLexicon, vocab: Collection[str]) -> PolarLexicon:
    positive = [word for word in lex.positive if word in vocab]
    negative = [word for word in lex.negative if word in vocab]

    for pole, words in (('positive', positive), ('negative', negative)):
        if not words:
            raise ValidationError(f'{lex.trait_name}: no word of the {pole} pole is in the vocabulary')

    return PolarLexicon(lex.trait_name, positive, negative)


def _subsample(words: Sequence[str], size: int, rng: np.random.Generator) -> List[str]:
    keep = np.sort(rng.choice(len(words), size=size, replace=False))
    return [words[i] for i in keep]


def balance(lex: PolarLexicon, seed=None) -> PolarLexicon:
    '''Subsamples the longer pole uniformly at random to the size of the shorter one, keeping word order.'''
    n_positive, n_negative = lex.sizes
    if n_positive == n_negative:
        return lex

    rng = np.random.default_rng(seed)
    size = min(n_positive, n_negative)
    if n_positive > size:
        return PolarLexicon(lex.trait_name, _subsample(lex.positive, size, rng), lex.negative)

    return PolarLexicon(lex.trait_name, lex.positive, _subsample(lex.negative, size, rng))


def subsample_poles(lex: PolarLexicon, size: int, rng: np.random.Generator) -> PolarLexicon:
    '''Draws size words from each pole without replacement; the lexicon is expected to be balanced.'''
    return PolarLexicon(lex.trait_name, _subsample(lex.positive, size, rng), _subsample(lex.negative, size, rng))


def sample_null(vocab: Vocabulary, size_per_pole: int, exclude: Collection[str] = (), seed=None) -> PolarLexicon:
    if size_per_pole < 1:
        raise DomainError(f'size_per_pole must be positive, got {size_per_pole}')

    exclude = set(exclude)
    pool = [word for word in vocab.words if word not in exclude]
    if len(pool) < 2 * size_per_pole:
        raise DomainError(f'Need {2 * size_per_pole} words outside the exclusion set, vocabulary has {len(pool)}')

    drawn = np.random.default_rng(seed).choice(len(pool), size=2 * size_per_pole, replace=False)

    return PolarLexicon(
        NULL_TRAIT,
        [pool[i] for i in drawn[:size_per_pole]],
        [pool[i] for i in drawn[size_per_pole:]],
    )


def build_saturated(
    space: EmbeddingSpace,
    targets: Sequence[str],
    candidates: Iterable[PolarLexicon],
    k: int = SATURATED_SIZE,
    extra_words: Iterable[str] = (),
) -> PolarLexicon:
    '''Ranks candidate words by cosine to the centroid of the target vectors.

    The k closest words form the negative pole, the k farthest (lowest first) the positive pole.
    '''
    if not targets:
        raise DomainError('At least one target is required')

    words: List[str] = []
    for lex in candidates:
        words.extend(lex.words())
    words.extend(extra_words)
    words = list(dict.fromkeys(words))

    if len(words) < 2 * k:
        raise DomainError(f'Need at least {2 * k} distinct candidate words, got {len(words)}')

    centroid = space.vectors(targets).mean(axis=0)
    sims = cosines(space.vectors(words), centroid)
    if np.isnan(sims).any():
        raise DomainError('Candidate words with zero-norm vectors cannot be ranked')

    ranked = np.argsort(-sims, kind='stable')

    return PolarLexicon(
        SATURATED_TRAIT,
        [words[i] for i in ranked[::-1][:k]],
        [words[i] for i in ranked[:k]],
    )
