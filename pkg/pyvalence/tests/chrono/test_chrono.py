import csv
from datetime import date, datetime, timedelta, timezone

import numpy as np
import pytest

from pyvalence.assoc import replicate_trait_scores
from pyvalence.chrono import (
    EventRecord,
    ScoreSeries,
    SeriesPoint,
    annotate,
    plot_series,
    read_events,
    run_timeline,
    write_events_csv,
    write_series_csv,
)
from pyvalence.corpus import DocumentSet
from pyvalence.errors import DomainError, ParseError
from pyvalence.tests.assoc.fixtures import LEX, NEGATIVE, PLANTED_CONFIG, POSITIVE, planted_space
from pyvalence.tests.trainer.fixtures import ORIGIN, documents

WEEK = timedelta(days=7)
ENTITIES = ['@amigo', '@rival']


def week_of_mentions(week, seed, amigo_pole=POSITIVE, n_sentences=60, length=8):
    '''One week of sentences; @amigo among amigo_pole words, @rival among the opposite pole.'''
    rival_pole = NEGATIVE if amigo_pole is POSITIVE else POSITIVE
    rng = np.random.default_rng([seed, week])
    sentences = []
    for i in range(n_sentences):
        entity, pole = ('@amigo', amigo_pole) if i % 2 else ('@rival', rival_pole)
        sentences.append([entity] + [str(word) for word in rng.choice(pole, size=length - 1)])

    return documents(sentences, start=ORIGIN + week * WEEK, step=timedelta(minutes=30), prefix=f'w{week}-')


def join(*document_sets):
    return DocumentSet(document for document_set in document_sets for document in document_set)


def series_of(starts, entity='@amigo'):
    points = [SeriesPoint(start, 0.1 * i, 0.01, 2, 5) for i, start in enumerate(starts)]
    return ScoreSeries(entity, 'valence', points, WEEK)


def timeline(document_set, replications=2, seed=PLANTED_CONFIG.seed):
    return run_timeline(
        document_set,
        planted_space(loadings={}),
        PLANTED_CONFIG.replace(seed=seed),
        [LEX],
        ENTITIES,
        window_length=WEEK,
        replications=replications,
        origin=ORIGIN,
    )


def test_run_timeline_single_window_matches_replicated_scores():
    document_set = week_of_mentions(0, seed=1)

    series = timeline(document_set)
    matrix = replicate_trait_scores(document_set, planted_space(loadings={}), PLANTED_CONFIG, [LEX], ENTITIES, k=2)

    assert [(s.entity, s.trait, len(s)) for s in series] == [('@amigo', 'valence', 1), ('@rival', 'valence', 1)]
    np.testing.assert_array_equal([s.points[0].mean for s in series], matrix['valence'].means())
    assert series[0].points[0].n_replications == 2
    assert series[0].points[0].n_documents == 60


def test_run_timeline_empty_middle_window():
    document_set = join(week_of_mentions(0, seed=1, n_sentences=20), week_of_mentions(2, seed=1, n_sentences=20))

    series = timeline(document_set, replications=1)

    points = series[0].points
    assert [point.window_start for point in points] == [ORIGIN, ORIGIN + WEEK, ORIGIN + 2 * WEEK]
    assert points[1].missing
    assert np.isnan(points[1].mean)
    assert points[1].n_documents == 0
    assert not points[0].missing and not points[2].missing


def test_run_timeline_windows_are_isolated():
    first = week_of_mentions(0, seed=1, n_sentences=30)

    series = timeline(join(first, week_of_mentions(1, seed=1, n_sentences=30)), replications=1)
    other = timeline(join(first, week_of_mentions(1, seed=2, amigo_pole=NEGATIVE, n_sentences=30)), replications=1)

    assert series[0].points[0] == other[0].points[0]
    assert series[1].points[0] == other[1].points[0]


def test_run_timeline_planted_dip():
    dips = 0
    for seed in range(10):
        document_set = join(
            week_of_mentions(0, seed),
            week_of_mentions(1, seed, amigo_pole=NEGATIVE),
            week_of_mentions(2, seed),
        )

        means = timeline(document_set, seed=seed)[0].means()

        dips += means[1] < min(means[0], means[2])

    assert dips >= 8


def test_run_timeline_invalid_replications():
    with pytest.raises(DomainError):
        timeline(week_of_mentions(0, seed=1), replications=0)


def test_run_timeline_empty_corpus():
    series = timeline(DocumentSet([]))

    assert [(s.entity, len(s)) for s in series] == [('@amigo', 0), ('@rival', 0)]


def test_annotate_without_events():
    annotated = annotate(series_of([ORIGIN, ORIGIN + WEEK]), [])

    assert annotated.markers == []
    assert annotated.warnings == []


def test_annotate_event_on_window_boundary():
    event = EventRecord(date=(ORIGIN + WEEK).date(), entity='@amigo', description='debate')

    annotated = annotate(series_of([ORIGIN, ORIGIN + WEEK, ORIGIN + 2 * WEEK]), [event])

    assert annotated.markers[0].window_start == ORIGIN + WEEK
    assert annotated.markers[0].event is event


def test_annotate_event_outside_span():
    events = [
        EventRecord(date=date(2021, 5, 31), entity='@amigo', description='before'),
        EventRecord(date=date(2021, 6, 3), entity='@rival', description='other entity'),
        EventRecord(date=date(2021, 6, 3), entity='@amigo', description='inside'),
    ]

    annotated = annotate(series_of([ORIGIN]), events)

    assert [marker.event.description for marker in annotated.markers] == ['inside']
    assert annotated.unmarked == [events[0]]
    assert len(annotated.warnings) == 1
    assert '2021-05-31' in annotated.warnings[0]


def test_read_events(tmp_path):
    path = tmp_path / 'events.csv'
    path.write_text('date,entity,description\n2021-06-08,@amigo,"debate, segundo turno"\n', encoding='utf-8')

    assert read_events(path) == [EventRecord(date(2021, 6, 8), '@amigo', 'debate, segundo turno')]


@pytest.mark.parametrize(
    'text, message',
    [
        ('day,entity,description\n2021-06-08,@amigo,x\n', 'expected columns'),
        ('date,entity,description\nontem,@amigo,x\n', 'invalid date'),
        ('', 'expected columns'),
    ],
)
def test_read_events_invalid(tmp_path, text, message):
    path = tmp_path / 'events.csv'
    path.write_text(text, encoding='utf-8')

    with pytest.raises(ParseError, match=message):
        read_events(path)


def test_write_series_csv(tmp_path):
    points = [
        SeriesPoint(ORIGIN, 0.5, 0.25, 2, 10),
        SeriesPoint(ORIGIN + WEEK, np.nan, np.nan, 0, 0),
        SeriesPoint(datetime(2021, 6, 15, 12, tzinfo=timezone.utc), -1.0, np.nan, 1, 3),
    ]
    path = tmp_path / 'series.csv'

    write_series_csv([ScoreSeries('@amigo', 'valence', points, WEEK)], path)

    with open(path, newline='') as f:
        rows = list(csv.reader(f))

    assert rows[0] == ['window_start', 'entity', 'trait', 'mean', 'stdev', 'n_replications', 'n_documents']
    assert rows[1] == ['2021-06-01', '@amigo', 'valence', '0.5', '0.25', '2', '10']
    assert rows[2] == ['2021-06-08', '@amigo', 'valence', 'NA', 'NA', '0', '0']
    assert rows[3][0] == '2021-06-15T12:00:00+00:00'


def test_plot_series(tmp_path):
    series = series_of([ORIGIN, ORIGIN + WEEK, ORIGIN + 2 * WEEK])
    event = EventRecord(date=(ORIGIN + WEEK).date(), entity='@amigo', description='debate')
    path = tmp_path / 'timeline.svg'

    plot_series([series], [annotate(series, [event])], path)

    svg = path.read_text(encoding='utf-8')
    assert svg.lstrip().startswith('<?xml')
    assert 'id="event-0"' in svg
    assert 'id="event-1"' not in svg


def test_write_events_csv(tmp_path):
    series = series_of([ORIGIN, ORIGIN + WEEK])
    events = [
        EventRecord(date=date(2021, 6, 9), entity='@amigo', description='debate'),
        EventRecord(date=date(2021, 7, 1), entity='@amigo', description='depois'),
    ]
    path = tmp_path / 'event_markers.csv'

    write_events_csv([annotate(series, events)], path)

    with open(path, newline='') as f:
        rows = list(csv.reader(f))

    assert rows[0] == ['window_start', 'entity', 'date', 'description', 'warning']
    assert rows[1] == ['2021-06-08', '@amigo', '2021-06-09', 'debate', '']
    assert rows[2][:4] == ['NA', '@amigo', '2021-07-01', 'depois']
    assert rows[2][4].startswith('2021-07-01 @amigo: outside the series span')
    assert len(rows) == 3
