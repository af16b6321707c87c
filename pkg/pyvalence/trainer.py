from __future__ import annotations

import dataclasses
import logging
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit
from tqdm import tqdm

from pyvalence.corpus import DocumentSet
from pyvalence.errors import DomainError, ValidationError
from pyvalence.vecstore import DEFAULT_DIMENSION, EmbeddingSpace, Vocabulary

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64

# Sub-streams of the seeded generator; training workers use TRAIN_STREAM + worker index
INIT_STREAM = 0
TRAIN_STREAM = 1


class Algorithm(Enum):
    CBOW = 'cbow'
    SGNS = 'sgns'


@dataclass(frozen=True)
class TrainConfig:
    algorithm: Algorithm = Algorithm.CBOW
    dimension: int = DEFAULT_DIMENSION
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr_start: float = 0.025
    lr_end: float = 1e-4
    min_count: int = 5
    subsample: float = 1e-3
    unigram_exponent: float = 0.75
    lock_factor: float = 0.0
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if not isinstance(self.algorithm, Algorithm):
            try:
                object.__setattr__(self, 'algorithm', Algorithm(str(self.algorithm).lower()))
            except ValueError:
                raise ValidationError(f'Unknown algorithm {self.algorithm!r}, expected cbow or sgns') from None

        for name in ('dimension', 'window', 'negatives', 'epochs', 'min_count', 'workers'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValidationError(f'{name} must be a positive integer, got {value!r}')

        if not 0 < self.lr_end <= self.lr_start:
            raise ValidationError(f'Need 0 < lr_end <= lr_start, got {self.lr_end} and {self.lr_start}')
        if self.subsample < 0:
            raise ValidationError(f'subsample must be >= 0, got {self.subsample}')
        if self.lock_factor not in (0.0, 1.0):
            raise ValidationError(f'lock_factor must be 0 or 1, got {self.lock_factor}')
        if not isinstance(self.seed, int) or not 0 <= self.seed < SEED_LIMIT:
            raise ValidationError(f'seed must be an integer in [0, 2^64), got {self.seed!r}')

    def replace(self, **changes) -> TrainConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data['algorithm'] = self.algorithm.value
        return data


class NegativeSamplingTable:
    '''Cumulative distribution over vocabulary ordinals, proportional to count ** exponent.

    Draw by picking a uniform number in [0, 1) and finding its insertion point in the table.
    '''

    __slots__ = ('ordinals', 'cumulative')

    def __init__(self, ordinals: Sequence[int], weights: Sequence[float]):
        weights = np.asarray(weights, dtype=np.float64)
        if len(weights) and (weights <= 0).any():
            raise ValidationError('Every word in a negative sampling table needs positive mass')

        self.ordinals = np.asarray(ordinals, dtype=np.int64)
        self.cumulative = np.cumsum(weights / weights.sum()) if len(weights) else np.zeros(0)
        if len(self.cumulative):
            self.cumulative[-1] = 1.0

    @classmethod
    def from_vocabulary(cls, vocab: Vocabulary, exponent: float = 0.75) -> NegativeSamplingTable:
        ordinals = [i for i, word in enumerate(vocab.words) if vocab.counts[word] > 0]
        weights = [vocab.counts[vocab.words[i]] ** exponent for i in ordinals]
        return cls(ordinals, weights)

    def __len__(self):
        return len(self.ordinals)

    def probabilities(self) -> np.ndarray:
        return np.diff(self.cumulative, prepend=0.0)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if not len(self.ordinals):
            raise DomainError('Cannot draw from an empty negative sampling table')

        slots = np.searchsorted(self.cumulative, rng.random(size), side='right')
        return self.ordinals[np.minimum(slots, len(self.ordinals) - 1)]


def draw_negative(table: NegativeSamplingTable, rng: np.random.Generator) -> int:
    return int(table.draw(rng, 1)[0])


def build_vocab(document_set: DocumentSet, min_count: int = 5) -> Vocabulary:
    if min_count < 1:
        raise ValidationError(f'min_count must be positive, got {min_count}')

    # Counter keeps first-occurrence order, which the stable sort below preserves among equal counts
    counts = Counter(token for document in document_set.documents for token in document.tokens)
    words = sorted((word for word, count in counts.items() if count >= min_count), key=lambda w: -counts[w])

    logger.info('Collected %i words, %i kept with min_count=%i', len(counts), len(words), min_count)

    return Vocabulary(words, counts)


def init_space(vocab: Vocabulary, pretrained: Optional[EmbeddingSpace], config: TrainConfig) -> EmbeddingSpace:
    if pretrained is not None and pretrained.dimension != config.dimension:
        raise ValidationError(
            f'Pretrained vectors have dimension {pretrained.dimension}, config expects {config.dimension}'
        )

    known = pretrained.vocab.words if pretrained is not None else []
    novel = [word for word in vocab.words if pretrained is None or word not in pretrained.vocab]
    working = Vocabulary(known + novel, vocab.counts)

    rng = np.random.default_rng([config.seed, INIT_STREAM])
    d = config.dimension
    input_vectors = np.empty((len(working), d), dtype=np.float64)
    if known:
        input_vectors[: len(known)] = pretrained.input_vectors
    input_vectors[len(known) :] = rng.uniform(-0.5 / d, 0.5 / d, size=(len(novel), d))

    lock_mask = np.zeros(len(working), dtype=bool)
    lock_mask[: len(known)] = config.lock_factor == 0

    logger.info('Initialized %i rows: %i pretrained, %i novel', len(working), len(known), len(novel))

    return EmbeddingSpace(vocab=working, input_vectors=input_vectors, lock_mask=lock_mask)


class Gradients(NamedTuple):
    center: np.ndarray
    contexts: List[np.ndarray]
    negatives: List[np.ndarray]


def loss_and_grad(
    center_vec, context_vecs: Sequence, negative_vecs: Sequence, algorithm: Algorithm
) -> Tuple[float, Gradients]:
    '''Negative-sampling logistic loss and its analytic gradients.

    SGNS: center_vec is the center word's input vector, context_vecs and negative_vecs are output vectors; every
    context contributes one positive term. CBOW: the mean of the context input vectors predicts center_vec, the
    center word's output vector.
    '''
    if not len(context_vecs):
        raise DomainError('At least one context vector is required')

    center = np.asarray(center_vec, dtype=np.float64)
    contexts = np.asarray(context_vecs, dtype=np.float64).reshape(len(context_vecs), -1)
    negatives = np.asarray(negative_vecs, dtype=np.float64).reshape(len(negative_vecs), center.shape[0])

    if algorithm is Algorithm.SGNS:
        positive_scores = contexts @ center
        negative_scores = negatives @ center
        positive_errors = expit(positive_scores) - 1.0
        negative_errors = expit(negative_scores)

        loss = np.logaddexp(0.0, -positive_scores).sum() + np.logaddexp(0.0, negative_scores).sum()
        grad_center = positive_errors @ contexts + negative_errors @ negatives
        grad_contexts = [e * center for e in positive_errors]
        grad_negatives = [e * center for e in negative_errors]
    else:
        hidden = contexts.mean(axis=0)
        positive_score = center @ hidden
        negative_scores = negatives @ hidden
        positive_error = expit(positive_score) - 1.0
        negative_errors = expit(negative_scores)

        loss = np.logaddexp(0.0, -positive_score) + np.logaddexp(0.0, negative_scores).sum()
        grad_hidden = positive_error * center + negative_errors @ negatives
        grad_center = positive_error * hidden
        grad_contexts = [grad_hidden / len(contexts) for _ in range(len(contexts))]
        grad_negatives = [e * hidden for e in negative_errors]

    return float(loss), Gradients(center=grad_center, contexts=grad_contexts, negatives=grad_negatives)


def keep_probabilities(vocab: Vocabulary, subsample: float) -> np.ndarray:
    '''Per-ordinal probability of keeping a word occurrence under frequent-word subsampling.'''
    counts = np.array([vocab.counts[word] for word in vocab.words], dtype=np.float64)
    keep = np.ones(len(counts))
    total = counts.sum()
    if subsample <= 0 or total == 0:
        return keep

    threshold = subsample * total
    present = counts > 0
    keep[present] = np.minimum(1.0, (np.sqrt(counts[present] / threshold) + 1) * (threshold / counts[present]))

    return keep


class Trainer:
    '''Negative-sampling SGD over an EmbeddingSpace, honoring per-row lock multipliers.

    Input-row updates are scaled by the row's lock multiplier: lock_factor for locked (pretrained) rows and 1 for the
    rest, so lock_factor=0 leaves pretrained rows untouched. Output rows are always trained.
    '''

    def __init__(self, space: EmbeddingSpace, config: TrainConfig, verbose=False):
        if space.dimension != config.dimension:
            raise ValidationError(f'Space has dimension {space.dimension}, config expects {config.dimension}')

        self.space = space
        self.config = config
        self.verbose = verbose
        self.table = NegativeSamplingTable.from_vocabulary(space.vocab, config.unigram_exponent)
        self.keep = keep_probabilities(space.vocab, config.subsample)
        self.lockf = np.where(space.lock_mask, config.lock_factor, 1.0)
        self.epoch_losses: List[float] = []
        self.warnings: List[str] = []

        self._words_done = 0
        self._total_words = 0
        self._progress_lock = threading.Lock()

    def _encode(self, document_set: DocumentSet) -> List[np.ndarray]:
        index, counts = self.space.vocab.index, self.space.vocab.counts
        sentences = []
        for tokens in document_set.sentences():
            ordinals = [index[token] for token in tokens if counts.get(token, 0) > 0]
            if ordinals:
                sentences.append(np.array(ordinals, dtype=np.int64))

        return sentences

    def _alpha(self) -> float:
        progress = min(1.0, self._words_done / self._total_words)
        return self.config.lr_start - (self.config.lr_start - self.config.lr_end) * progress

    def _negatives(self, rng: np.random.Generator, target: int) -> np.ndarray:
        drawn = self.table.draw(rng, self.config.negatives)
        if len(self.table) > 1:
            clash = drawn == target
            while clash.any():
                drawn[clash] = self.table.draw(rng, int(clash.sum()))
                clash = drawn == target

        return drawn

    def _update(self, hidden: np.ndarray, target: int, rng: np.random.Generator, alpha: float):
        '''Trains output rows of target (label 1) and drawn negatives (label 0) on hidden; returns (loss, error).'''
        syn1neg = self.space.output_vectors
        indices = np.concatenate(([target], self._negatives(rng, target)))
        l2 = syn1neg[indices]
        scores = l2 @ hidden

        labels = np.zeros(len(indices))
        labels[0] = 1.0
        gradient = (labels - expit(scores)) * alpha

        np.add.at(syn1neg, indices, np.outer(gradient, hidden))
        loss = np.logaddexp(0.0, -scores[0]) + np.logaddexp(0.0, scores[1:]).sum()

        return loss, gradient @ l2

    def _train_sentence(self, sentence: np.ndarray, rng: np.random.Generator, alpha: float) -> Tuple[float, int]:
        syn0 = self.space.input_vectors
        window = self.config.window

        kept = sentence[rng.random(len(sentence)) < self.keep[sentence]]
        reduced = rng.integers(1, window + 1, size=len(kept))

        loss, updates = 0.0, 0
        for pos, center in enumerate(kept):
            b = reduced[pos]
            context = np.concatenate((kept[max(0, pos - b) : pos], kept[pos + 1 : pos + b + 1]))
            if not len(context):
                continue

            if self.config.algorithm is Algorithm.SGNS:
                for word in context:
                    pair_loss, error = self._update(syn0[center], word, rng, alpha)
                    if self.lockf[center]:
                        syn0[center] += self.lockf[center] * error
                    loss += pair_loss
                    updates += 1
            else:
                # As in the reference toolkit, every context row receives the full hidden-layer error
                pair_loss, error = self._update(syn0[context].mean(axis=0), center, rng, alpha)
                trainable = context[self.lockf[context] != 0]
                np.add.at(syn0, trainable, self.lockf[trainable, None] * error)
                loss += pair_loss
                updates += 1

        return loss, updates

    def _train_shard(self, sentences: Sequence[np.ndarray], rng: np.random.Generator) -> Tuple[float, int]:
        loss, updates = 0.0, 0
        for sentence in sentences:
            sentence_loss, sentence_updates = self._train_sentence(sentence, rng, self._alpha())
            loss += sentence_loss
            updates += sentence_updates
            with self._progress_lock:
                self._words_done += len(sentence)

        return loss, updates

    def train(self, document_set: DocumentSet) -> EmbeddingSpace:
        sentences = self._encode(document_set)
        if not sentences or not len(self.table):
            message = 'No trainable tokens in corpus; training skipped'
            logger.warning(message)
            self.warnings.append(message)
            return self.space

        workers = self.config.workers
        self._words_done = 0
        self._total_words = self.config.epochs * sum(len(sentence) for sentence in sentences)
        rngs = [np.random.default_rng([self.config.seed, TRAIN_STREAM + w]) for w in range(workers)]
        shards = [sentences[w::workers] for w in range(workers)]

        logger.info(
            'Training %s on %i sentences (%i words/epoch), %i epochs, %i workers',
            self.config.algorithm.name,
            len(sentences),
            self._total_words // self.config.epochs,
            self.config.epochs,
            workers,
        )

        # Workers share the parameter matrices without locking; only the progress counter is synchronized
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for epoch in tqdm(range(self.config.epochs), disable=not self.verbose, desc='epochs'):
                results = list(executor.map(self._train_shard, shards, rngs))
                loss = sum(r[0] for r in results)
                updates = sum(r[1] for r in results)
                self.epoch_losses.append(loss / updates if updates else 0.0)
                logger.debug('Epoch %i: mean loss %.6f over %i updates', epoch + 1, self.epoch_losses[-1], updates)

        return self.space


def train(space: EmbeddingSpace, document_set: DocumentSet, config: TrainConfig, verbose=False) -> EmbeddingSpace:
    return Trainer(space, config, verbose=verbose).train(document_set)


def fit_space(
    document_set: DocumentSet, pretrained: Optional[EmbeddingSpace], config: TrainConfig, verbose=False
) -> Tuple[EmbeddingSpace, Vocabulary]:
    '''Builds the corpus vocabulary, initializes a working space from it and the pretrained vectors, and trains.'''
    vocab = build_vocab(document_set, config.min_count)
    space = init_space(vocab, pretrained, config)
    return train(space, document_set, config, verbose=verbose), vocab
