from __future__ import annotations

import csv
import json
import logging
import re
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import click
import numpy as np
import scipy
from dateutil.parser import isoparse

from pyvalence import __version__
from pyvalence.assoc import replicate_trait_scores, write_means_csv, write_scores_csv
from pyvalence.attribute_words import ABUSIVE_WORDS
from pyvalence.chrono import annotate, plot_series, read_events, run_timeline, write_events_csv, write_series_csv
from pyvalence.config import METHODS, RunConfig, load_config
from pyvalence.corpus import DocumentSet, default_origin, ingest_jsonl, lowercase, summarize
from pyvalence.errors import ParseError, PyvalenceError, ValidationError
from pyvalence.lexicon import (
    SATURATED_SIZE,
    SATURATED_TRAIT,
    PolarLexicon,
    balance,
    build_saturated,
    load_lexicon,
    prune_oov,
    sample_null,
    shipped_lexicon,
)
from pyvalence.planar import DEFAULT_PERPLEXITY, export_projection, silhouette_score, tsne
from pyvalence.psych import build_mtmm, compare_groups, critical_r, write_comparison_csv
from pyvalence.trainer import build_vocab, fit_space
from pyvalence.vecstore import EmbeddingSpace, analogy, load_vectors

logger = logging.getLogger(__name__)

BASE_TRAITS = ('valence', 'trust', 'purity')

MANIFEST_NAME = 'manifest.json'

RE_UNSAFE = re.compile(r'[^0-9a-zA-Z_-]+')


class Session:
    __slots__ = ('config', 'verbose')

    def __init__(self, config: RunConfig, verbose: bool):
        self.config = config
        self.verbose = verbose

    @property
    def output_dir(self) -> Path:
        path = Path(self.config.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def write_manifest(
        self, command: str, seeds: Sequence[int] = (), outputs: Sequence[Path] = (), warnings: Sequence[str] = ()
    ):
        manifest = {
            'command': command,
            'config': self.config.to_dict(),
            'config_sha256': self.config.digest(),
            'seeds': list(seeds),
            'outputs': sorted(path.name for path in outputs),
            'warnings': list(warnings),
            'versions': {'pyvalence': __version__, 'numpy': np.__version__, 'scipy': scipy.__version__},
        }
        path = self.output_dir / MANIFEST_NAME
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + '\n', encoding='utf-8')


class PyvalenceGroup(click.Group):
    '''Reports library and I/O errors as one-line messages with exit status 1.'''

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (PyvalenceError, OSError) as e:
            raise click.ClickException(str(e)) from e


def slug(name: str) -> str:
    return RE_UNSAFE.sub('_', name).strip('_') or 'unnamed'


def read_entities(path) -> List[str]:
    '''One handle per line; blank lines are skipped and handles are case-folded like corpus tokens.'''
    with open(path, encoding='utf-8') as f:
        entities = [lowercase(line.strip()) for line in f if line.strip()]

    if len(set(entities)) != len(entities):
        raise ValidationError(f'{path}: repeated entities')
    if not entities:
        raise ValidationError(f'{path}: no entities')

    return entities


def read_groups(path) -> Dict[str, str]:
    '''CSV with columns entity,group.'''
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {'entity', 'group'} <= set(reader.fieldnames):
            raise ParseError('expected columns entity,group', path=path, lineno=1)
        return {lowercase(row['entity'].strip()): row['group'].strip() for row in reader}


def parse_origin(value: Optional[str], document_set: DocumentSet) -> datetime:
    if not value:
        return default_origin(document_set)

    try:
        origin = isoparse(value)
    except ValueError as e:
        raise ValidationError(f'Invalid origin {value!r}') from e

    # A bare date means midnight UTC
    if origin.tzinfo is None:
        origin = origin.replace(tzinfo=timezone.utc)

    return origin.astimezone(timezone.utc)


def _load_pretrained(path: Optional[str]) -> Optional[EmbeddingSpace]:
    return load_vectors(path) if path else None


def base_lexicons(config: RunConfig) -> List[PolarLexicon]:
    if config.lexicon_paths:
        return [load_lexicon(path) for path in config.lexicon_paths]
    return [shipped_lexicon(name) for name in BASE_TRAITS]


def trait_lexicons(
    config: RunConfig, document_set: DocumentSet, pretrained: Optional[EmbeddingSpace], entities: Sequence[str]
) -> List[PolarLexicon]:
    '''The base traits plus the saturated lexicon and a random null lexicon drawn from the corpus vocabulary.'''
    lexicons = base_lexicons(config)
    train_config = config.train_config()

    if config.saturated == 'derived':
        space, _ = fit_space(document_set, pretrained, train_config)
        targets = [entity for entity in entities if entity in space]
        candidates = [word for lex in lexicons for word in lex.words()] + ABUSIVE_WORDS
        saturated = build_saturated(
            space, targets, [], k=SATURATED_SIZE, extra_words=[word for word in candidates if word in space]
        )
    else:
        saturated = shipped_lexicon(SATURATED_TRAIT)

    vocab = build_vocab(document_set, train_config.min_count)
    # Scoring prunes against the fitted space, which also holds every pretrained word
    scorable = set(vocab.words) | (set(pretrained.vocab.words) if pretrained is not None else set())
    reference = next((lex for lex in lexicons if lex.trait_name == 'valence'), lexicons[0])
    size = min(balance(prune_oov(reference, scorable), seed=config.seed).sizes)
    excluded = {word for lex in lexicons + [saturated] for word in lex.words()} | set(entities)
    null = sample_null(vocab, size, exclude=excluded, seed=config.seed)

    return lexicons + [saturated, null]


@click.group(cls=PyvalenceGroup, context_settings={'help_option_names': ['-h', '--help']})
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), help='TOML run configuration.')
@click.option('--output-dir', type=click.Path(file_okay=False), help='Directory for every output file.')
@click.option('--seed', type=int, help='Base seed; replication r uses seed + r.')
@click.option('--jobs', type=int, help='Parallel replication processes.')
@click.option('--replications', type=int, help='Model fits per configuration (or per window).')
@click.option('--window-days', type=int, help='Time window length for timeline.')
@click.option('--origin', help='Start of the first time window (ISO date or timestamp).')
@click.option('--method', type=click.Choice(list(METHODS)), help='Pretrained vectors and fine-tuning configuration.')
@click.option('-v', '--verbose', is_flag=True, help='Debug logging and progress bars.')
@click.pass_context
def cli(ctx, config_path, verbose, **overrides):
    '''Fine-tunes word embeddings on a corpus and scores how entities are framed along polar word axes.'''
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING, format='%(levelname)s %(name)s: %(message)s'
    )
    ctx.obj = Session(load_config(config_path, overrides), verbose)


@cli.command()
@click.argument('corpus', required=False, type=click.Path(dir_okay=False))
@click.pass_obj
def ingest(session: Session, corpus):
    '''Validates a JSON Lines corpus and writes its summary.'''
    path = corpus or session.config.corpus_path
    if not path:
        raise ValidationError('Missing required setting(s): corpus_path')

    summary = summarize(ingest_jsonl(path))
    output = session.output_dir / 'summary.json'
    output.write_text(json.dumps(summary, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    session.write_manifest('ingest', outputs=[output])

    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@cli.command('train')
@click.pass_obj
def train_command(session: Session):
    '''Fine-tunes one space with the configured method and saves it in Word2Vec text format.'''
    config = session.config
    config.require('corpus_path')

    document_set = ingest_jsonl(config.corpus_path)
    space, vocab = fit_space(
        document_set, _load_pretrained(config.pretrained_path_for()), config.train_config(), verbose=session.verbose
    )

    output = session.output_dir / 'space.txt'
    space.save(output)
    session.write_manifest('train', seeds=[config.seed], outputs=[output])

    click.echo(f'{len(space.vocab)} vectors ({len(vocab)} from the corpus) written to {output}')


def _replication_seeds(config: RunConfig) -> List[int]:
    return [config.seed + r for r in range(config.replications)]


def _score_method(session: Session, document_set, lexicons, entities, method: str):
    config = session.config
    return replicate_trait_scores(
        document_set,
        _load_pretrained(config.pretrained_path_for(method)),
        config.train_config(method),
        lexicons,
        entities,
        k=config.replications,
        method=method,
        jobs=config.jobs,
        verbose=session.verbose,
    )


@cli.command()
@click.pass_obj
def score(session: Session):
    '''Replicated synchronic scores for every trait.'''
    config = session.config
    config.require('corpus_path', 'entities_path')

    document_set = ingest_jsonl(config.corpus_path)
    entities = read_entities(config.entities_path)
    lexicons = trait_lexicons(config, document_set, _load_pretrained(config.pretrained_path_for()), entities)

    matrices = list(_score_method(session, document_set, lexicons, entities, config.method).values())

    scores_path, means_path = session.output_dir / 'scores.csv', session.output_dir / 'means.csv'
    write_scores_csv(matrices, scores_path)
    write_means_csv(matrices, means_path)
    session.write_manifest('score', seeds=_replication_seeds(config), outputs=[scores_path, means_path])

    click.echo(f'Scored {len(entities)} entities on {len(lexicons)} traits, {config.replications} replications')


@cli.command()
@click.pass_obj
def mtmm(session: Session):
    '''Scores every trait under all four methods and writes the multi-trait multi-method matrix.'''
    config = session.config
    config.require('corpus_path', 'entities_path')

    document_set = ingest_jsonl(config.corpus_path)
    entities = read_entities(config.entities_path)
    lexicons = trait_lexicons(config, document_set, _load_pretrained(config.pretrained_path_for()), entities)

    outputs, matrices = [], []
    for method in METHODS:
        method_matrices = list(_score_method(session, document_set, lexicons, entities, method).values())
        path = session.output_dir / f'scores_{slug(method)}.csv'
        write_scores_csv(method_matrices, path)
        outputs.append(path)
        matrices.extend(method_matrices)

    result = build_mtmm(matrices)
    full_path, lower_path = session.output_dir / 'mtmm.csv', session.output_dir / 'mtmm_lower.csv'
    result.to_csv(full_path)
    result.to_csv(lower_path, lower_triangle=True)
    outputs.extend([full_path, lower_path])
    session.write_manifest('mtmm', seeds=_replication_seeds(config), outputs=outputs)

    size = len(result.labels)
    click.echo(f'{size}x{size} MTMM over {result.n_cases} entities written to {full_path}')
    if result.n_cases >= 3:
        click.echo(f'|r| >= {critical_r(result.n_cases):.4f} is significant at p < 0.05')


@cli.command()
@click.pass_obj
def compare(session: Session):
    '''Pooled t test and Cohen's d of trait scores between two entity groups.'''
    config = session.config
    config.require('corpus_path', 'groups_path')

    document_set = ingest_jsonl(config.corpus_path)
    groups = read_groups(config.groups_path)
    entities = list(groups)
    lexicons = trait_lexicons(config, document_set, _load_pretrained(config.pretrained_path_for()), entities)

    matrices = list(_score_method(session, document_set, lexicons, entities, config.method).values())
    (name_x, name_y), rows = compare_groups(matrices, groups)

    scores_path, report_path = session.output_dir / 'scores.csv', session.output_dir / 'comparison.csv'
    write_scores_csv(matrices, scores_path)
    write_comparison_csv(rows, report_path)
    session.write_manifest('compare', seeds=_replication_seeds(config), outputs=[scores_path, report_path])

    for row in rows:
        click.echo(f'{row.trait}: {name_x} vs {name_y} t({row.df})={row.t:.2f}, p={row.p:.3g}, d={row.d:.2f}')


@cli.command()
@click.option('--plot', is_flag=True, help='Also write one SVG line plot per entity.')
@click.pass_obj
def timeline(session: Session, plot):
    '''Per-window scores for every entity and base trait, optionally annotated with events.'''
    config = session.config
    config.require('corpus_path', 'entities_path')

    document_set = ingest_jsonl(config.corpus_path)
    entities = read_entities(config.entities_path)
    events = read_events(config.events_path) if config.events_path else []

    series_list = run_timeline(
        document_set,
        _load_pretrained(config.pretrained_path_for()),
        config.train_config(),
        base_lexicons(config),
        entities,
        window_length=config.window_length,
        replications=config.replications,
        origin=parse_origin(config.origin, document_set),
        jobs=config.jobs,
        verbose=session.verbose,
    )

    series_path = session.output_dir / 'series.csv'
    write_series_csv(series_list, series_path)
    outputs = [series_path]

    # Every trait of an entity shares its windows, so its first series carries the markers
    annotations = {}
    for series in series_list:
        if series.entity not in annotations:
            annotations[series.entity] = annotate(series, events)
    warnings = [warning for annotated in annotations.values() for warning in annotated.warnings]

    if config.events_path:
        markers_path = session.output_dir / 'event_markers.csv'
        write_events_csv(list(annotations.values()), markers_path)
        outputs.append(markers_path)

    if plot:
        for entity in entities:
            entity_series = [series for series in series_list if series.entity == entity]
            path = session.output_dir / f'timeline_{slug(entity)}.svg'
            plot_series(entity_series, [annotations[entity]] if entity in annotations else [], path)
            outputs.append(path)

    session.write_manifest('timeline', seeds=_replication_seeds(config), outputs=outputs, warnings=warnings)

    windows = len(series_list[0]) if series_list else 0
    click.echo(f'{len(series_list)} series over {windows} windows written to {series_path}')


@cli.command('tsne')
@click.option('--perplexity', type=float, default=DEFAULT_PERPLEXITY, show_default=True)
@click.option('--iterations', type=int, default=1000, show_default=True)
@click.pass_obj
def tsne_command(session: Session, perplexity, iterations):
    '''Projects entity handles and base-trait words of one fitted space to 2-D.'''
    config = session.config
    config.require('corpus_path', 'entities_path')

    document_set = ingest_jsonl(config.corpus_path)
    entities = read_entities(config.entities_path)
    space, vocab = fit_space(
        document_set, _load_pretrained(config.pretrained_path_for()), config.train_config(), verbose=session.verbose
    )

    groups = {entity: 'entity' for entity in entities if entity in vocab}
    for lex in base_lexicons(config):
        for word in lex.words():
            if word in space and word not in groups:
                groups[word] = lex.trait_name

    words = list(groups)
    projection = tsne(
        space.vectors(words),
        labels=words,
        perplexity=perplexity,
        iterations=iterations,
        seed=config.seed,
        verbose=session.verbose,
    )
    csv_path, svg_path = export_projection(projection, groups, session.output_dir / 'projection')
    session.write_manifest('tsne', seeds=[config.seed], outputs=[csv_path, svg_path])

    click.echo(f'Projected {len(words)} words, KL {projection.kl_initial:.3f} -> {projection.kl_final:.3f}')
    if 2 <= len(set(groups.values())) < len(words):
        click.echo(f'Silhouette by group: {silhouette_score(projection.coordinates, list(groups.values())):.3f}')


@cli.command('analogy')
@click.argument('a')
@click.argument('b')
@click.argument('c')
@click.option('--vectors', type=click.Path(dir_okay=False), help='Vectors to query (default: pretrained_path).')
@click.pass_obj
def analogy_command(session: Session, a, b, c, vectors):
    '''Answers "a is to b as c is to ?" over a vector file.'''
    path = vectors or session.config.pretrained_path
    if not path:
        raise ValidationError('Missing required setting(s): pretrained_path')

    answer = analogy(load_vectors(path), lowercase(a), lowercase(b), lowercase(c))
    session.write_manifest('analogy')

    click.echo(answer)


def run(argv: Sequence[str] = None) -> int:
    '''Runs the command line and returns its exit status instead of exiting.'''
    try:
        cli.main(args=argv, prog_name='pyvalence')
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 1
    return 0
