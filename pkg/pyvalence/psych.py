from __future__ import annotations

import csv
import logging
from typing import Dict, List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.special import betainc, stdtrit

from pyvalence.errors import DegenerateInputError, DomainError, ValidationError

logger = logging.getLogger(__name__)

RELIABILITY = 'reliability'


def _as_vector(values, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise ValidationError(f'{name} must be one-dimensional')
    if not np.isfinite(values).all():
        raise ValidationError(f'{name} contains missing or non-finite values')
    return values


def t_two_sided_p(t: float, df: float) -> float:
    '''P(|T| >= |t|) for Student's t with df degrees of freedom, via the regularized incomplete beta function.'''
    if df <= 0:
        raise DomainError(f'Degrees of freedom must be positive, got {df}')
    if np.isinf(t):
        return 0.0
    return float(betainc(df / 2, 0.5, df / (df + t * t)))


def t_cdf(t: float, df: float) -> float:
    tail = t_two_sided_p(t, df) / 2
    return 1.0 - tail if t > 0 else tail


def critical_r(n: int, alpha: float = 0.05) -> float:
    '''Smallest |r| significant at two-sided level alpha for n cases.'''
    if n < 3:
        raise DomainError(f'Need at least 3 cases, got {n}')
    df = n - 2
    t = stdtrit(df, 1 - alpha / 2)
    return float(t / np.sqrt(df + t * t))


def cronbach_alpha(scores) -> float:
    '''Internal consistency of items (columns) over cases (rows), using sample variances throughout.'''
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2:
        raise ValidationError('Scores must be a cases x items matrix')
    n, k = scores.shape
    if k < 2 or n < 2:
        raise DomainError(f'Need at least 2 cases and 2 items, got {n} and {k}')
    if not np.isfinite(scores).all():
        raise ValidationError('Scores contain missing values; drop incomplete cases first')

    total_variance = scores.sum(axis=1).var(ddof=1)
    if total_variance == 0:
        raise DegenerateInputError('Total scores have zero variance')

    return float(k / (k - 1) * (1 - scores.var(axis=0, ddof=1).sum() / total_variance))


def pearson(x, y) -> Tuple[float, float]:
    x = _as_vector(x, 'x')
    y = _as_vector(y, 'y')
    n = len(x)
    if len(y) != n:
        raise ValidationError(f'Length mismatch: {n} vs {len(y)}')
    if n < 3:
        raise DomainError(f'Need at least 3 pairs, got {n}')

    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0 or syy == 0:
        raise DegenerateInputError('Pearson correlation is undefined for constant input')

    r = float(np.clip(dx @ dy / np.sqrt(sxx * syy), -1.0, 1.0))
    if abs(r) == 1.0:
        return r, 0.0

    t = r * np.sqrt((n - 2) / (1 - r * r))
    return r, t_two_sided_p(t, n - 2)


def _pooled_variance(x: np.ndarray, y: np.ndarray) -> float:
    return ((len(x) - 1) * x.var(ddof=1) + (len(y) - 1) * y.var(ddof=1)) / (len(x) + len(y) - 2)


def _check_groups(x, y) -> Tuple[np.ndarray, np.ndarray]:
    x = _as_vector(x, 'x')
    y = _as_vector(y, 'y')
    if len(x) < 2 or len(y) < 2:
        raise DomainError(f'Each group needs at least 2 values, got {len(x)} and {len(y)}')
    return x, y


def two_sample_t(x, y) -> Tuple[float, int, float]:
    '''Student's pooled-variance two-sample t test; returns (t, df, two-sided p).'''
    x, y = _check_groups(x, y)
    df = len(x) + len(y) - 2
    difference = x.mean() - y.mean()
    pooled = _pooled_variance(x, y)

    if pooled == 0:
        if difference == 0:
            return 0.0, df, 1.0
        raise DegenerateInputError('Groups have zero variance but different means')

    t = float(difference / np.sqrt(pooled * (1 / len(x) + 1 / len(y))))
    return t, df, t_two_sided_p(t, df)


def cohens_d_groups(x, y) -> float:
    x, y = _check_groups(x, y)
    pooled = _pooled_variance(x, y)
    if pooled == 0:
        raise DegenerateInputError('Pooled standard deviation is zero')

    return float((x.mean() - y.mean()) / np.sqrt(pooled))


class MtmmMatrix:
    '''Multi-trait multi-method matrix: reliabilities on the diagonal, Pearson correlations off it.'''

    __slots__ = ('labels', 'cells', 'n_cases', 'diagonal_kind')

    def __init__(self, labels: Sequence[Tuple[str, str]], cells, n_cases: int):
        cells = np.asarray(cells, dtype=np.float64)
        if cells.shape != (len(labels), len(labels)):
            raise ValidationError(f'Expected a {len(labels)}x{len(labels)} matrix, got {cells.shape}')
        if not np.allclose(cells, cells.T, rtol=0, atol=1e-12):
            raise ValidationError('MTMM cells must be symmetric')

        self.labels = [tuple(label) for label in labels]
        self.cells = cells
        self.n_cases = n_cases
        self.diagonal_kind = RELIABILITY

    def __repr__(self):
        return f'MtmmMatrix(labels={len(self.labels)}, n_cases={self.n_cases})'

    @property
    def names(self) -> List[str]:
        return [f'{method}/{trait}' if method else trait for method, trait in self.labels]

    def cell(self, a: Tuple[str, str], b: Tuple[str, str]) -> float:
        return float(self.cells[self.labels.index(tuple(a)), self.labels.index(tuple(b))])

    def to_csv(self, path, lower_triangle=False):
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow([''] + self.names)
            for i, name in enumerate(self.names):
                row = [repr(float(value)) for value in self.cells[i]]
                if lower_triangle:
                    row = row[: i + 1] + [''] * (len(row) - i - 1)
                writer.writerow([name] + row)
            writer.writerow(['# n_cases', self.n_cases])


def build_mtmm(score_matrices: Sequence) -> MtmmMatrix:
    '''Assembles an MTMM from ScoreMatrix objects sharing one entity list.

    Diagonal: Cronbach's alpha over replications (entities with every replication present). Off-diagonal: Pearson r
    between replication means, dropping entities missing from either matrix.
    '''
    if not score_matrices:
        raise ValidationError('Need at least one score matrix')

    entities = score_matrices[0].entities
    for matrix in score_matrices:
        if matrix.entities != entities:
            raise ValidationError(f'Score matrix {matrix.label} has a different entity list or order')
        if matrix.replications < 2:
            raise ValidationError(f'Score matrix {matrix.label} needs at least 2 replications')

    labels = [matrix.label for matrix in score_matrices]
    if len(set(labels)) != len(labels):
        raise ValidationError('Duplicate (method, trait) labels')

    means = [matrix.means() for matrix in score_matrices]
    size = len(score_matrices)
    cells = np.eye(size)

    for i, matrix in enumerate(score_matrices):
        complete = matrix.values[~np.isnan(matrix.values).any(axis=1)]
        cells[i, i] = cronbach_alpha(complete)

        for j in range(i):
            shared = ~np.isnan(means[i]) & ~np.isnan(means[j])
            if shared.sum() < 3:
                raise ValidationError(f'{labels[i]} and {labels[j]} share only {int(shared.sum())} entities')
            cells[i, j] = cells[j, i] = pearson(means[i][shared], means[j][shared])[0]

    n_cases = int(np.logical_and.reduce([~np.isnan(m) for m in means]).sum())
    logger.info('Built %ix%i MTMM over %i entities', size, size, n_cases)

    return MtmmMatrix(labels, cells, n_cases)


class GroupComparison(NamedTuple):
    trait: str
    t: float
    df: int
    p: float
    d: float
    n_x: int
    n_y: int


def compare_groups(
    score_matrices: Sequence, groups: Mapping[str, str]
) -> Tuple[Tuple[str, str], List[GroupComparison]]:
    '''Pooled t test and Cohen's d of replication-mean scores between the two groups named in groups.

    groups maps entity to group label; exactly two labels are allowed, compared in order of first appearance.
    '''
    group_names = list(dict.fromkeys(groups.values()))
    if len(group_names) != 2:
        raise ValidationError(f'Expected exactly two groups, got {group_names}')

    rows = []
    for matrix in score_matrices:
        by_group: Dict[str, List[float]] = {name: [] for name in group_names}
        for entity, mean in zip(matrix.entities, matrix.means()):
            if entity in groups and not np.isnan(mean):
                by_group[groups[entity]].append(mean)

        x, y = by_group[group_names[0]], by_group[group_names[1]]
        t, df, p = two_sample_t(x, y)
        rows.append(
            GroupComparison(trait=matrix.trait, t=t, df=df, p=p, d=cohens_d_groups(x, y), n_x=len(x), n_y=len(y))
        )

    return (group_names[0], group_names[1]), rows


def write_comparison_csv(rows: Sequence[GroupComparison], path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(GroupComparison._fields)
        for row in rows:
            writer.writerow([row.trait, repr(row.t), row.df, repr(row.p), repr(row.d), row.n_x, row.n_y])
