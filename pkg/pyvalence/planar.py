from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np
from matplotlib.figure import Figure
from scipy.spatial.distance import pdist, squareform
from tqdm import tqdm

from pyvalence.errors import DomainError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_PERPLEXITY = 30.0
DEFAULT_ITERATIONS = 1000
DEFAULT_LEARNING_RATE = 200.0
EARLY_EXAGGERATION = 12.0
EXAGGERATION_ITERATIONS = 250
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
INIT_SCALE = 1e-4
MIN_GAIN = 0.01
KL_SAMPLE_EVERY = 50

PERPLEXITY_TOLERANCE = 1e-5
MAX_SEARCH_STEPS = 200

MACHINE_EPSILON = np.finfo(np.float64).eps

DEFAULT_GROUP = 'other'
GROUP_MARKERS = ('o', 's', '^', 'D', 'v', 'P', 'X', '*')


class Projection2D(NamedTuple):
    labels: List[str]
    coordinates: np.ndarray
    kl_initial: float
    kl_final: float
    kl_history: List[Tuple[int, float]]


def _row_entropy(distances: np.ndarray, beta: float) -> Tuple[float, np.ndarray]:
    shifted = distances - distances.min()
    weights = np.exp(-shifted * beta)
    total = weights.sum()
    probabilities = weights / total
    return float(np.log(total) + beta * (shifted @ probabilities)), probabilities


def conditional_affinities(sq_distances, perplexity: float, tol: float = PERPLEXITY_TOLERANCE) -> np.ndarray:
    '''Row-stochastic Gaussian affinities p(j|i), each row's precision found by bisection on its entropy.

    Row i's entropy (in nats) is matched to log(perplexity) within tol; the diagonal is zero.
    '''
    sq_distances = np.asarray(sq_distances, dtype=np.float64)
    n = sq_distances.shape[0]
    if sq_distances.shape != (n, n):
        raise ValidationError(f'Expected a square distance matrix, got shape {sq_distances.shape}')
    if not 1 < perplexity <= n - 1:
        raise DomainError(f'Perplexity must be in (1, {n - 1}] for {n} points, got {perplexity}')

    target = np.log(perplexity)
    result = np.zeros((n, n))
    unconverged = 0

    for i in range(n):
        others = np.delete(sq_distances[i], i)
        beta, beta_min, beta_max = 1.0, -np.inf, np.inf

        for _ in range(MAX_SEARCH_STEPS):
            entropy, probabilities = _row_entropy(others, beta)
            difference = entropy - target
            if abs(difference) <= tol:
                break

            if difference > 0:
                beta_min = beta
                beta = beta * 2 if beta_max == np.inf else (beta + beta_max) / 2
            else:
                beta_max = beta
                beta = beta / 2 if beta_min == -np.inf else (beta + beta_min) / 2
        else:
            unconverged += 1

        result[i, np.arange(n) != i] = probabilities

    if unconverged:
        logger.warning('Perplexity search did not converge for %i of %i points', unconverged, n)

    return result


def _joint_probabilities(vectors: np.ndarray, perplexity: float) -> np.ndarray:
    conditional = conditional_affinities(squareform(pdist(vectors, 'sqeuclidean')), perplexity)
    joint = conditional + conditional.T
    joint /= joint.sum()
    joint = np.maximum(joint, MACHINE_EPSILON)
    np.fill_diagonal(joint, 0.0)
    return joint


def _kl_and_gradient(joint: np.ndarray, coordinates: np.ndarray) -> Tuple[float, np.ndarray]:
    '''KL(P || Q) for the Student-t kernel on coordinates, and its gradient with respect to them.'''
    kernel = 1.0 / (1.0 + squareform(pdist(coordinates, 'sqeuclidean')))
    np.fill_diagonal(kernel, 0.0)
    q = np.maximum(kernel / kernel.sum(), MACHINE_EPSILON)
    np.fill_diagonal(q, 0.0)

    off_diagonal = ~np.eye(len(joint), dtype=bool)
    kl = float((joint[off_diagonal] * np.log(joint[off_diagonal] / q[off_diagonal])).sum())

    weighted = (joint - q) * kernel
    gradient = 4.0 * (weighted.sum(axis=1)[:, None] * coordinates - weighted @ coordinates)

    return kl, gradient


def tsne(
    vectors,
    labels: Sequence[str] = None,
    perplexity: float = DEFAULT_PERPLEXITY,
    iterations: int = DEFAULT_ITERATIONS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    early_exaggeration: float = EARLY_EXAGGERATION,
    seed=None,
    verbose=False,
) -> Projection2D:
    '''Exact t-SNE to two dimensions, with early exaggeration, momentum and per-coordinate gains.'''
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise ValidationError(f'Expected an n x d matrix, got shape {vectors.shape}')
    if not np.isfinite(vectors).all():
        raise ValidationError('Input vectors must be finite')

    n, d = vectors.shape
    if d < 2:
        raise DomainError(f'Need at least 2 input dimensions, got {d}')
    if n < 3 * perplexity + 1:
        raise DomainError(
            f'Perplexity {perplexity} needs n >= 3 * perplexity + 1 = {3 * perplexity + 1:g} points, got {n}'
        )
    if iterations < 1:
        raise DomainError(f'iterations must be positive, got {iterations}')

    labels = [str(i) for i in range(n)] if labels is None else list(labels)
    if len(labels) != n:
        raise ValidationError(f'Got {len(labels)} labels for {n} vectors')

    joint = _joint_probabilities(vectors, perplexity)
    coordinates = np.random.default_rng(seed).normal(0.0, INIT_SCALE, size=(n, 2))
    update = np.zeros_like(coordinates)
    gains = np.ones_like(coordinates)

    kl_initial, _ = _kl_and_gradient(joint, coordinates)
    kl_history = [(0, kl_initial)]

    for iteration in tqdm(range(iterations), disable=not verbose, desc='t-SNE'):
        exaggerated = iteration < EXAGGERATION_ITERATIONS
        momentum = INITIAL_MOMENTUM if exaggerated else FINAL_MOMENTUM
        _, gradient = _kl_and_gradient(joint * early_exaggeration if exaggerated else joint, coordinates)

        same_sign = update * gradient > 0
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.clip(gains, MIN_GAIN, None, out=gains)

        update = momentum * update - learning_rate * gains * gradient
        coordinates = coordinates + update

        if (iteration + 1) % KL_SAMPLE_EVERY == 0:
            kl, _ = _kl_and_gradient(joint, coordinates)
            kl_history.append((iteration + 1, kl))
            logger.debug('t-SNE iteration %i: KL %.6f', iteration + 1, kl)

    kl_final, _ = _kl_and_gradient(joint, coordinates)
    if kl_history[-1][0] != iterations:
        kl_history.append((iterations, kl_final))

    logger.info('t-SNE on %i points: KL %.4f -> %.4f', n, kl_initial, kl_final)

    return Projection2D(
        labels=labels, coordinates=coordinates, kl_initial=kl_initial, kl_final=kl_final, kl_history=kl_history
    )


def silhouette_score(coordinates, labels: Sequence) -> float:
    '''Mean silhouette over all points, Euclidean distance; points alone in their cluster score 0.'''
    coordinates = np.asarray(coordinates, dtype=np.float64)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    if not 2 <= len(clusters) < len(labels):
        raise DomainError(f'Need between 2 and n - 1 clusters, got {len(clusters)} for {len(labels)} points')

    distances = squareform(pdist(coordinates))
    scores = np.zeros(len(labels))

    for i, label in enumerate(labels):
        own = labels == label
        if own.sum() == 1:
            continue

        a = distances[i, own].sum() / (own.sum() - 1)
        b = min(distances[i, labels == other].mean() for other in clusters if other != label)
        scores[i] = (b - a) / max(a, b) if max(a, b) > 0 else 0.0

    return float(scores.mean())


def export_projection(proj: Projection2D, groups: Mapping[str, str], path) -> Tuple[Path, Path]:
    '''Writes <path>.csv (word,x,y,group) and <path>.svg, a scatter with one marker style per group.'''
    path = Path(path)
    csv_path, svg_path = path.with_suffix('.csv'), path.with_suffix('.svg')
    point_groups = [groups.get(label, DEFAULT_GROUP) for label in proj.labels]

    with open(csv_path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['word', 'x', 'y', 'group'])
        for label, (x, y), group in zip(proj.labels, proj.coordinates, point_groups):
            writer.writerow([label, repr(float(x)), repr(float(y)), group])

    figure = Figure(figsize=(8, 8))
    ax = figure.subplots()
    for i, group in enumerate(dict.fromkeys(point_groups)):
        members = [j for j, g in enumerate(point_groups) if g == group]
        ax.plot(
            proj.coordinates[members, 0],
            proj.coordinates[members, 1],
            linestyle='none',
            marker=GROUP_MARKERS[i % len(GROUP_MARKERS)],
            label=group,
            gid=f'points-{group}',
        )
        for j in members:
            ax.annotate(proj.labels[j], proj.coordinates[j], fontsize=6, alpha=0.7)

    ax.set_xticks([])
    ax.set_yticks([])
    ax.legend(loc='best')
    figure.savefig(svg_path, format='svg')

    logger.info('Wrote projection of %i points to %s and %s', len(proj.labels), csv_path, svg_path)

    return csv_path, svg_path
