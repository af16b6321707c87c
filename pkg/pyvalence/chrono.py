from __future__ import annotations

import csv
import logging
from datetime import date, datetime, timedelta, timezone
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from dateutil.parser import isoparse
from matplotlib.figure import Figure
from tqdm import tqdm

from pyvalence.assoc import DEFAULT_REPLICATIONS, MISSING, replicate_trait_scores
from pyvalence.corpus import DEFAULT_WINDOW_LENGTH, DocumentSet, window_split
from pyvalence.errors import DomainError, ParseError
from pyvalence.lexicon import PolarLexicon
from pyvalence.trainer import TrainConfig
from pyvalence.vecstore import EmbeddingSpace

logger = logging.getLogger(__name__)

EVENT_FIELDS = ('date', 'entity', 'description')
SERIES_FIELDS = ('window_start', 'entity', 'trait', 'mean', 'stdev', 'n_replications', 'n_documents')
MARKER_FIELDS = ('window_start', 'entity', 'date', 'description', 'warning')


class EventRecord(NamedTuple):
    date: date
    entity: str
    description: str


class SeriesPoint(NamedTuple):
    window_start: datetime
    mean: float
    stdev: float
    n_replications: int
    n_documents: int

    @property
    def missing(self) -> bool:
        return self.n_replications == 0


class ScoreSeries:
    __slots__ = ('entity', 'trait', 'points', 'window_length')

    def __init__(
        self, entity: str, trait: str, points: Sequence[SeriesPoint], window_length: timedelta = DEFAULT_WINDOW_LENGTH
    ):
        self.entity = entity
        self.trait = trait
        self.points = sorted(points, key=lambda point: point.window_start)
        self.window_length = window_length

    def __repr__(self):
        return f'ScoreSeries(entity={self.entity!r}, trait={self.trait!r}, points={len(self.points)})'

    def __len__(self):
        return len(self.points)

    def means(self) -> np.ndarray:
        return np.array([point.mean for point in self.points], dtype=np.float64)

    def window_of(self, moment: datetime) -> Optional[int]:
        '''Index of the point whose [start, start + window_length) interval contains moment, if any.'''
        for i, point in enumerate(self.points):
            if point.window_start <= moment < point.window_start + self.window_length:
                return i
        return None


class EventMarker(NamedTuple):
    window_start: datetime
    event: EventRecord


class AnnotatedSeries(NamedTuple):
    series: ScoreSeries
    markers: List[EventMarker]
    # Events that fall outside the series span, in the order of their warnings
    unmarked: List[EventRecord]
    warnings: List[str]


def _missing_point(window_start: datetime, n_documents: int) -> SeriesPoint:
    return SeriesPoint(window_start=window_start, mean=np.nan, stdev=np.nan, n_replications=0, n_documents=n_documents)


def run_timeline(
    document_set: DocumentSet,
    pretrained: Optional[EmbeddingSpace],
    config: TrainConfig,
    lexicons: Sequence[PolarLexicon],
    entities: Sequence[str],
    window_length: timedelta = DEFAULT_WINDOW_LENGTH,
    replications: int = DEFAULT_REPLICATIONS,
    origin: datetime = None,
    jobs: int = 1,
    verbose=False,
) -> List[ScoreSeries]:
    '''Fits and scores each time window separately; one series per (entity, trait), one point per window.

    Every window starts again from the pretrained vectors, so its scores depend on its own documents only.
    '''
    if replications < 1:
        raise DomainError(f'Need at least one replication per window, got {replications}')

    windows = window_split(document_set, window_length, origin)
    traits = [lex.trait_name for lex in lexicons]
    points: Dict[Tuple[str, str], List[SeriesPoint]] = {(e, t): [] for e in entities for t in traits}

    logger.info('Scoring %i windows of %s with %i replications each', len(windows), window_length, replications)

    for window in tqdm(windows, disable=not verbose, desc='windows'):
        n_documents = len(window.documents)
        if not n_documents:
            for key in points:
                points[key].append(_missing_point(window.start, 0))
            continue

        matrices = replicate_trait_scores(
            DocumentSet(window.documents),
            pretrained,
            config,
            lexicons,
            entities,
            k=replications,
            jobs=jobs,
            skip_unusable=True,
        )

        for trait, matrix in matrices.items():
            for entity, mean, stdev, n in zip(entities, matrix.means(), matrix.stdevs(), matrix.counts()):
                points[entity, trait].append(
                    SeriesPoint(
                        window_start=window.start,
                        mean=float(mean),
                        stdev=float(stdev),
                        n_replications=int(n),
                        n_documents=n_documents,
                    )
                )

    return [ScoreSeries(entity, trait, points[entity, trait], window_length) for entity, trait in points]


def _as_moment(day: date) -> datetime:
    return datetime(day.year, day.month, day.day, tzinfo=timezone.utc)


def annotate(series: ScoreSeries, events: Sequence[EventRecord]) -> AnnotatedSeries:
    markers, unmarked, warnings = [], [], []

    for event in events:
        if event.entity != series.entity:
            continue

        index = series.window_of(_as_moment(event.date))
        if index is None:
            unmarked.append(event)
            warnings.append(f'{event.date.isoformat()} {event.entity}: outside the series span, not marked')
            continue

        markers.append(EventMarker(window_start=series.points[index].window_start, event=event))

    for warning in warnings:
        logger.warning(warning)

    return AnnotatedSeries(series=series, markers=markers, unmarked=unmarked, warnings=warnings)


def read_events(path) -> List[EventRecord]:
    events = []
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or any(field not in reader.fieldnames for field in EVENT_FIELDS):
            raise ParseError(f'expected columns {",".join(EVENT_FIELDS)}', path=path, lineno=1)

        for row in reader:
            try:
                day = isoparse(row['date']).date()
            except ValueError as e:
                raise ParseError(f'invalid date {row["date"]!r}', path=path, lineno=reader.line_num) from e
            events.append(EventRecord(date=day, entity=row['entity'], description=row['description']))

    return events


def _format(value: float) -> str:
    return MISSING if np.isnan(value) else repr(float(value))


def _format_start(window_start: datetime) -> str:
    if window_start.time() == datetime.min.time():
        return window_start.date().isoformat()
    return window_start.isoformat()


def write_series_csv(series_list: Sequence[ScoreSeries], path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(SERIES_FIELDS)
        for series in series_list:
            for point in series.points:
                writer.writerow(
                    [
                        _format_start(point.window_start),
                        series.entity,
                        series.trait,
                        _format(point.mean),
                        _format(point.stdev),
                        point.n_replications,
                        point.n_documents,
                    ]
                )


def write_events_csv(annotations: Sequence[AnnotatedSeries], path):
    '''Marked events with the start of their window, then events outside the span with their warning.'''
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(MARKER_FIELDS)
        for annotated in annotations:
            for marker in annotated.markers:
                event = marker.event
                writer.writerow(
                    [_format_start(marker.window_start), event.entity, event.date.isoformat(), event.description, '']
                )
            for event, warning in zip(annotated.unmarked, annotated.warnings):
                writer.writerow([MISSING, event.entity, event.date.isoformat(), event.description, warning])


def plot_series(series_list: Sequence[ScoreSeries], annotations: Sequence[AnnotatedSeries], path):
    '''Writes an SVG line plot, one line per series, with a vertical marker at each annotated window.'''
    figure = Figure(figsize=(10, 4))
    ax = figure.subplots()

    for series in series_list:
        starts = [point.window_start for point in series.points]
        ax.plot(starts, series.means(), marker='o', label=f'{series.entity} {series.trait}')

    marked = sorted({marker.window_start for annotated in annotations for marker in annotated.markers})
    for i, window_start in enumerate(marked):
        ax.axvline(window_start, color='red', linestyle='--', linewidth=1, gid=f'event-{i}')

    ax.axhline(0.0, color='grey', linewidth=0.5)
    ax.set_xlabel('window start')
    ax.set_ylabel('score')
    if series_list:
        ax.legend(loc='best', fontsize='small')
    figure.autofmt_xdate()
    figure.savefig(path, format='svg')
