from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from pyvalence.errors import DomainError, OutOfVocabularyError, ParseError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_DIMENSION = 300

# Six significant digits, as written by the reference word2vec tools
VECTOR_FORMAT = '%.6g'


class Vocabulary:
    __slots__ = ('words', 'index', 'counts')

    def __init__(self, words: Iterable[str] = (), counts: Mapping[str, int] = None):
        self.words = list(words)
        self.index = {word: i for i, word in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValidationError('Vocabulary words must be unique')

        counts = counts or {}
        self.counts = {word: int(counts.get(word, 0)) for word in self.words}
        if any(count < 0 for count in self.counts.values()):
            raise ValidationError('Vocabulary counts must be nonnegative')

    def __repr__(self):
        return f'Vocabulary(words={len(self.words)})'

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def __iter__(self):
        return iter(self.words)

    def __eq__(self, other) -> bool:
        return self.words == other.words and self.counts == other.counts

    def ordinal(self, word: str) -> int:
        try:
            return self.index[word]
        except KeyError:
            raise OutOfVocabularyError(word) from None


class EmbeddingSpace:
    __slots__ = ('vocab', 'input_vectors', 'output_vectors', 'lock_mask')

    def __init__(
        self,
        vocab: Vocabulary,
        input_vectors: np.ndarray,
        output_vectors: np.ndarray = None,
        lock_mask: np.ndarray = None,
    ):
        input_vectors = np.asarray(input_vectors, dtype=np.float64)
        if input_vectors.ndim != 2 or input_vectors.shape[0] != len(vocab) or input_vectors.shape[1] < 1:
            raise ValidationError(f'Expected a {len(vocab)}xd matrix, got shape {input_vectors.shape}')
        if output_vectors is None:
            output_vectors = np.zeros_like(input_vectors)
        output_vectors = np.asarray(output_vectors, dtype=np.float64)
        if output_vectors.shape != input_vectors.shape:
            raise ValidationError('Input and output matrices must have the same shape')
        if not (np.isfinite(input_vectors).all() and np.isfinite(output_vectors).all()):
            raise ValidationError('Embedding matrices must be finite')
        if lock_mask is None:
            lock_mask = np.zeros(len(vocab), dtype=bool)

        self.vocab = vocab
        self.input_vectors = input_vectors
        self.output_vectors = output_vectors
        self.lock_mask = np.asarray(lock_mask, dtype=bool)

    def __repr__(self):
        locked = int(self.lock_mask.sum())
        return f'EmbeddingSpace(words={len(self.vocab)}, dimension={self.dimension}, locked={locked})'

    def __contains__(self, word):
        return word in self.vocab

    @property
    def dimension(self) -> int:
        return self.input_vectors.shape[1]

    def vector(self, word: str) -> np.ndarray:
        return self.input_vectors[self.vocab.ordinal(word)]

    def vectors(self, words: Sequence[str]) -> np.ndarray:
        return self.input_vectors[[self.vocab.ordinal(word) for word in words]]

    def copy(self) -> EmbeddingSpace:
        return EmbeddingSpace(
            vocab=Vocabulary(self.vocab.words, self.vocab.counts),
            input_vectors=self.input_vectors.copy(),
            output_vectors=self.output_vectors.copy(),
            lock_mask=self.lock_mask.copy(),
        )

    def save(self, path):
        '''Writes the input vectors in Word2Vec text format.'''
        with open(path, 'w', encoding='utf-8') as f:
            f.write(f'{len(self.vocab)} {self.dimension}\n')
            for word, row in zip(self.vocab.words, self.input_vectors):
                f.write(word + ' ' + ' '.join(VECTOR_FORMAT % x for x in row) + '\n')


def _is_header(fields: List[str]) -> bool:
    if len(fields) != 2:
        return False
    try:
        int(fields[0]), int(fields[1])
    except ValueError:
        return False
    return True


def load_vectors(path) -> EmbeddingSpace:
    '''Loads Word2Vec text (with a "V d" header) or GloVe text (no header) vectors.

    The format is detected from the first line. Loaded rows are locked, have no output vectors and zero counts.
    '''
    try:
        with open(path, encoding='utf-8') as f:
            lines = f.read().splitlines()
    except UnicodeDecodeError as e:
        raise ParseError('not UTF-8 text; binary vector formats are not supported', path=path) from e

    expected_rows = None
    start = 0
    if lines and _is_header(lines[0].split()):
        expected_rows, dimension = (int(x) for x in lines[0].split())
        if expected_rows < 0 or dimension < 1:
            raise ParseError(f'invalid header {lines[0]!r}', path=path, lineno=1)
        start = 1
    else:
        dimension = None

    words: List[str] = []
    rows: List[List[float]] = []
    seen: Dict[str, int] = {}
    for lineno, line in enumerate(lines[start:], start=start + 1):
        fields = line.rstrip().split(' ')
        if fields == ['']:
            continue

        word, values = fields[0], fields[1:]
        if dimension is None:
            dimension = len(values)
            if dimension < 1:
                raise ParseError(f'no vector components for {word!r}', path=path, lineno=lineno)
        if len(values) != dimension:
            raise ParseError(f'expected {dimension} components, got {len(values)}', path=path, lineno=lineno)

        try:
            row = [float(x) for x in values]
        except ValueError as e:
            raise ParseError(f'non-numeric component ({e})', path=path, lineno=lineno) from e
        if not all(np.isfinite(row)):
            raise ParseError('non-finite vector component', path=path, lineno=lineno)

        if word in seen:
            raise ValidationError(f'{path}: duplicate word {word!r} on lines {seen[word]} and {lineno}')
        seen[word] = lineno

        words.append(word)
        rows.append(row)

    if expected_rows is not None and expected_rows != len(words):
        raise ParseError(f'header declares {expected_rows} words, found {len(words)}', path=path, lineno=1)

    if dimension is None:
        raise ParseError('no vectors found', path=path)

    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dimension)
    logger.info('Loaded %i vectors of dimension %i from %s', len(words), matrix.shape[1], path)

    return EmbeddingSpace(
        vocab=Vocabulary(words),
        input_vectors=matrix,
        lock_mask=np.ones(len(words), dtype=bool),
    )


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DomainError(f'Dimension mismatch: {u.shape} vs {v.shape}')

    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0 or norm_v == 0:
        raise DomainError('Cosine is undefined for a zero-norm vector')

    # Normalize before the dot so that cosine(u, v) == cosine(v, u) bit for bit
    return float(np.clip(np.dot(u / norm_u, v / norm_v), -1.0, 1.0))


def cosines(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    '''Cosine of every row of matrix with query; zero-norm rows give nan.'''
    query = np.asarray(query, dtype=np.float64)
    norm_q = np.linalg.norm(query)
    if norm_q == 0:
        raise DomainError('Cosine is undefined for a zero-norm vector')

    norms = np.linalg.norm(matrix, axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        sims = (matrix @ (query / norm_q)) / norms
    sims[norms == 0] = np.nan

    return np.clip(sims, -1.0, 1.0)


def nearest(space: EmbeddingSpace, query, k: int, exclude: Iterable[str] = ()) -> List[Tuple[str, float]]:
    if k < 1:
        raise DomainError(f'k must be positive, got {k}')
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (space.dimension,):
        raise DomainError(f'Query has shape {query.shape}, expected ({space.dimension},)')

    sims = cosines(space.input_vectors, query)
    candidates = np.ones(len(space.vocab), dtype=bool)
    candidates[np.isnan(sims)] = False
    for word in exclude:
        if word in space.vocab.index:
            candidates[space.vocab.index[word]] = False

    ordinals = np.flatnonzero(candidates)
    # Stable sort on descending similarity keeps ascending ordinals among ties
    ranked = ordinals[np.argsort(-sims[ordinals], kind='stable')][:k]

    return [(space.vocab.words[i], float(sims[i])) for i in ranked]


def unit(vector: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise DomainError('Cannot normalize a zero-norm vector')
    return vector / norm


def analogy(space: EmbeddingSpace, a: str, b: str, c: str) -> str:
    '''Returns the word closest to b - a + c (3CosAdd over unit-normalized vectors), e.g. king - man + woman.'''
    target = unit(space.vector(b)) - unit(space.vector(a)) + unit(space.vector(c))
    result = nearest(space, target, k=1, exclude={a, b, c})
    if not result:
        raise DomainError('No candidate words left besides the query words')

    return result[0][0]
