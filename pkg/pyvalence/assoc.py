from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from pyvalence.corpus import DocumentSet
from pyvalence.errors import DegenerateInputError, DomainError, ValidationError
from pyvalence.lexicon import PolarLexicon, balance, prune_oov, subsample_poles
from pyvalence.psych import cronbach_alpha
from pyvalence.trainer import TrainConfig, build_vocab, fit_space, init_space, train
from pyvalence.vecstore import EmbeddingSpace, cosines

logger = logging.getLogger(__name__)

DEFAULT_REPLICATIONS = 10

MISSING = 'NA'


class TargetScore(NamedTuple):
    entity: str
    trait: str
    replication: int
    value: float


def _sample_stdev(values: np.ndarray) -> float:
    # Sorting makes the result independent of the order the values were gathered in
    return float(np.std(np.sort(values), ddof=1))


def target_score(space: EmbeddingSpace, lex: PolarLexicon, entity: str) -> float:
    '''Single-target association of entity with the positive versus the negative pole.

    Mean cosine difference between the poles divided by the sample standard deviation of all 2m cosines.
    '''
    m, n_negative = lex.sizes
    if m != n_negative:
        raise DomainError(f'{lex.trait_name}: poles must be balanced, got {m} and {n_negative} words')

    entity_vector = space.vector(entity)
    positive = cosines(space.vectors(lex.positive), entity_vector)
    negative = cosines(space.vectors(lex.negative), entity_vector)

    values = np.concatenate((positive, negative))
    if np.isnan(values).any():
        raise DomainError(f'{lex.trait_name}: attribute words with zero-norm vectors')
    if values.min() == values.max():
        raise DegenerateInputError(f'{entity}: all {len(values)} attribute cosines are identical')

    return float((positive.sum() - negative.sum()) / m / _sample_stdev(values))


def group_effect_size(
    space: EmbeddingSpace, lex: PolarLexicon, group_x: Sequence[str], group_y: Sequence[str]
) -> float:
    '''Cohen's d between two groups of entities, standardized by the stdev over their union.'''
    union = list(dict.fromkeys(list(group_x) + list(group_y)))
    if len(union) < 3:
        raise DomainError(f'Need at least 3 distinct entities across both groups, got {len(union)}')

    scores = {entity: target_score(space, lex, entity) for entity in union}
    sd = _sample_stdev(np.array(list(scores.values())))
    if sd == 0:
        raise DegenerateInputError('All entity scores are identical')

    mean_x = np.mean([scores[entity] for entity in group_x])
    mean_y = np.mean([scores[entity] for entity in group_y])

    return float((mean_x - mean_y) / sd)


class ScoreMatrix:
    '''Entities x replications grid of scores for one trait and method; nan marks a missing replication.'''

    __slots__ = ('entities', 'values', 'trait', 'method')

    def __init__(self, entities: Sequence[str], values, trait: str, method: str = ''):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != len(entities) or values.shape[1] < 1:
            raise ValidationError(f'Expected a {len(entities)}xk matrix with k >= 1, got shape {values.shape}')
        if np.isinf(values).any():
            raise ValidationError('Scores must be finite')

        self.entities = list(entities)
        self.values = values
        self.trait = trait
        self.method = method

    def __repr__(self):
        return (
            f'ScoreMatrix(trait={self.trait!r}, method={self.method!r}, entities={len(self.entities)}, '
            f'replications={self.replications})'
        )

    @property
    def replications(self) -> int:
        return self.values.shape[1]

    @property
    def label(self) -> Tuple[str, str]:
        return self.method, self.trait

    @property
    def missing_entities(self) -> List[str]:
        return [entity for entity, n in zip(self.entities, self.counts()) if n == 0]

    def counts(self) -> np.ndarray:
        return (~np.isnan(self.values)).sum(axis=1)

    def means(self) -> np.ndarray:
        '''Per-entity mean over the replications present; nan where none are.'''
        counts = self.counts()
        totals = np.where(np.isnan(self.values), 0.0, self.values).sum(axis=1)
        return np.where(counts > 0, totals / np.maximum(counts, 1), np.nan)

    def stdevs(self) -> np.ndarray:
        result = np.full(len(self.entities), np.nan)
        for i, row in enumerate(self.values):
            present = row[~np.isnan(row)]
            if len(present) >= 2:
                result[i] = np.std(present, ddof=1)
        return result

    def scores(self) -> Iterable[TargetScore]:
        for entity, row in zip(self.entities, self.values):
            for replication, value in enumerate(row):
                yield TargetScore(entity=entity, trait=self.trait, replication=replication, value=float(value))


def score_space(
    space: EmbeddingSpace, lexicons: Sequence[PolarLexicon], entities: Sequence[str], seed=None, skip_unusable=False
) -> np.ndarray:
    '''Scores entities (nan when out of vocabulary) under each lexicon, pruned and balanced against the space.

    With skip_unusable, a lexicon losing a whole pole to pruning leaves its row nan instead of raising.
    '''
    values = np.full((len(lexicons), len(entities)), np.nan)
    for j, lex in enumerate(lexicons):
        try:
            usable = balance(prune_oov(lex, space.vocab), seed=seed)
        except ValidationError as e:
            if not skip_unusable:
                raise
            logger.warning('Lexicon skipped: %s', e)
            continue

        for i, entity in enumerate(entities):
            if entity in space:
                values[j, i] = target_score(space, usable, entity)

    return values


def _score_replication(args) -> np.ndarray:
    document_set, pretrained, config, lexicons, entities, skip_unusable = args

    vocab = build_vocab(document_set, config.min_count)
    # Handles count only when the corpus itself keeps them; pretrained-only rows are not fine-tuned evidence
    present = [entity for entity in entities if entity in vocab]
    values = np.full((len(lexicons), len(entities)), np.nan)
    if not present:
        return values

    space = train(init_space(vocab, pretrained, config), document_set, config)
    index = {entity: i for i, entity in enumerate(entities)}
    values[:, [index[entity] for entity in present]] = score_space(
        space, lexicons, present, seed=config.seed, skip_unusable=skip_unusable
    )

    return values


def replicate_trait_scores(
    document_set: DocumentSet,
    pretrained: Optional[EmbeddingSpace],
    config: TrainConfig,
    lexicons: Sequence[PolarLexicon],
    entities: Sequence[str],
    k: int = DEFAULT_REPLICATIONS,
    method: str = '',
    jobs: int = 1,
    verbose=False,
    skip_unusable=False,
) -> Dict[str, ScoreMatrix]:
    '''Fits k spaces (seeds config.seed + replication) and scores every entity under every lexicon.'''
    if k < 1:
        raise DomainError(f'Need at least one replication, got {k}')
    traits = [lex.trait_name for lex in lexicons]
    if len(set(traits)) != len(traits):
        raise ValidationError(f'Lexicon traits must be unique, got {traits}')

    jobs_args = [
        (document_set, pretrained, config.replace(seed=config.seed + r), lexicons, entities, skip_unusable)
        for r in range(k)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(tqdm(executor.map(_score_replication, jobs_args), total=k, disable=not verbose))
    else:
        results = [_score_replication(args) for args in tqdm(jobs_args, disable=not verbose)]

    stacked = np.stack(results, axis=-1)
    matrices = {
        trait: ScoreMatrix(entities, stacked[j], trait=trait, method=method) for j, trait in enumerate(traits)
    }

    # Missing means unscored under every lexicon in every replication
    unscored = np.isnan(stacked).all(axis=(0, 2)) if traits else np.zeros(len(entities), dtype=bool)
    missing = [entity for entity, flag in zip(entities, unscored) if flag]
    if missing:
        logger.warning('%i entities missing from every replication: %s', len(missing), ', '.join(missing))

    return matrices


def replicate_scores(
    document_set: DocumentSet,
    pretrained: Optional[EmbeddingSpace],
    config: TrainConfig,
    lex: PolarLexicon,
    entities: Sequence[str],
    k: int = DEFAULT_REPLICATIONS,
    method: str = '',
    jobs: int = 1,
    verbose=False,
) -> ScoreMatrix:
    return replicate_trait_scores(
        document_set, pretrained, config, [lex], entities, k=k, method=method, jobs=jobs, verbose=verbose
    )[lex.trait_name]


def subset_alpha(
    space: EmbeddingSpace,
    lex: PolarLexicon,
    entities: Sequence[str],
    n_draws: int = 10,
    subset_fraction: float = 0.8,
    seed=None,
) -> float:
    '''Cronbach's alpha of entity scores across random sub-lexicons (draws are items, entities are cases).'''
    if n_draws < 2:
        raise DomainError(f'Need at least 2 draws, got {n_draws}')
    if not 0 < subset_fraction <= 1:
        raise DomainError(f'subset_fraction must be in (0, 1], got {subset_fraction}')

    lex = balance(lex, seed=seed)
    # Tolerance keeps products such as 0.29 * 100 from flooring one word short
    size = int(np.floor(subset_fraction * len(lex.positive) + 1e-9))
    if size < 1:
        raise DomainError(f'subset_fraction {subset_fraction} leaves no word of a {len(lex.positive)}-word pole')

    rng = np.random.default_rng(seed)
    scores = np.empty((len(entities), n_draws))
    for draw in range(n_draws):
        sub = subsample_poles(lex, size, rng)
        scores[:, draw] = [target_score(space, sub, entity) for entity in entities]

    return cronbach_alpha(scores)


def robustness_alpha(
    document_set: DocumentSet,
    pretrained: Optional[EmbeddingSpace],
    config: TrainConfig,
    lex: PolarLexicon,
    entities: Sequence[str],
    n_draws: int = 10,
    subset_fraction: float = 0.8,
    verbose=False,
) -> float:
    '''Fits one space and measures how robust its entity scores are to the choice of attribute words.'''
    space, vocab = fit_space(document_set, pretrained, config, verbose=verbose)
    present = [entity for entity in entities if entity in vocab]
    usable = balance(prune_oov(lex, space.vocab), seed=config.seed)

    return subset_alpha(space, usable, present, n_draws=n_draws, subset_fraction=subset_fraction, seed=config.seed)


def _format(value: float) -> str:
    return MISSING if np.isnan(value) else repr(float(value))


def write_scores_csv(matrices: Iterable[ScoreMatrix], path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['entity', 'trait', 'method', 'replication', 'value'])
        for matrix in matrices:
            for score in matrix.scores():
                writer.writerow([score.entity, score.trait, matrix.method, score.replication, _format(score.value)])


def write_means_csv(matrices: Iterable[ScoreMatrix], path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['entity', 'trait', 'method', 'mean', 'n_replications'])
        for matrix in matrices:
            for entity, mean, n in zip(matrix.entities, matrix.means(), matrix.counts()):
                writer.writerow([entity, matrix.trait, matrix.method, _format(mean), int(n)])
