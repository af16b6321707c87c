from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Any, Dict, Mapping, NamedTuple, Optional, Tuple

import toml

from pyvalence.errors import ParseError, ValidationError
from pyvalence.trainer import SEED_LIMIT, Algorithm, TrainConfig


class Method(NamedTuple):
    pretrained_kind: str
    algorithm: Algorithm
    lock_factor: float


# Pretrained vectors, fine-tuning algorithm and lock factor of each model configuration compared in an MTMM
METHODS = {
    'locked-sgns/cbow': Method('sgns', Algorithm.CBOW, 0.0),
    'locked-sgns/sgns': Method('sgns', Algorithm.SGNS, 0.0),
    'unlocked-cbow/sgns': Method('cbow', Algorithm.SGNS, 1.0),
    'locked-glove/sgns': Method('glove', Algorithm.SGNS, 0.0),
}

DEFAULT_METHOD = 'locked-sgns/cbow'

PRETRAINED_KINDS = ('sgns', 'cbow', 'glove')

SATURATED_SOURCES = ('fixture', 'derived')


@dataclass(frozen=True)
class RunConfig:
    corpus_path: Optional[str] = None
    pretrained_path: Optional[str] = None
    lexicon_paths: Tuple[str, ...] = ()
    entities_path: Optional[str] = None
    groups_path: Optional[str] = None
    events_path: Optional[str] = None
    output_dir: str = 'output'
    window_days: int = 7
    origin: Optional[str] = None
    replications: int = 10
    seed: int = 1
    jobs: int = 1
    method: str = DEFAULT_METHOD
    saturated: str = 'fixture'
    pretrained: Dict[str, str] = field(default_factory=dict)
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        object.__setattr__(self, 'lexicon_paths', tuple(self.lexicon_paths))
        # TOML dates and datetimes load as objects; origin is kept as ISO text
        if isinstance(self.origin, date):
            object.__setattr__(self, 'origin', self.origin.isoformat())
        if self.origin is not None and not isinstance(self.origin, str):
            raise ValidationError(f'origin must be an ISO date or timestamp, got {self.origin!r}')

        for name in ('window_days', 'replications', 'jobs'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValidationError(f'{name} must be a positive integer, got {value!r}')
        if not isinstance(self.seed, int) or not 0 <= self.seed < SEED_LIMIT:
            raise ValidationError(f'seed must be an integer in [0, 2^64), got {self.seed!r}')
        if self.method not in METHODS:
            raise ValidationError(f'Unknown method {self.method!r}; choose from {", ".join(METHODS)}')
        if self.saturated not in SATURATED_SOURCES:
            raise ValidationError(f'saturated must be one of {", ".join(SATURATED_SOURCES)}, got {self.saturated!r}')

        unknown = set(self.pretrained) - set(PRETRAINED_KINDS)
        if unknown:
            raise ValidationError(f'Unknown pretrained kinds: {", ".join(sorted(unknown))}')

    @property
    def window_length(self) -> timedelta:
        return timedelta(days=self.window_days)

    def require(self, *names: str):
        missing = [name for name in names if not getattr(self, name)]
        if missing:
            raise ValidationError(f'Missing required setting(s): {", ".join(missing)}')

    def train_config(self, method: str = None) -> TrainConfig:
        '''Training settings for the named method (default: the configured one), seeded with the run seed.'''
        chosen = METHODS[method or self.method]
        return self.train.replace(seed=self.seed, algorithm=chosen.algorithm, lock_factor=chosen.lock_factor)

    def pretrained_path_for(self, method: str = None) -> Optional[str]:
        '''Pretrained vectors for the method's kind, falling back to pretrained_path.'''
        return self.pretrained.get(METHODS[method or self.method].pretrained_kind, self.pretrained_path)

    def to_dict(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != 'train'}
        data['lexicon_paths'] = list(self.lexicon_paths)
        data['pretrained'] = dict(sorted(self.pretrained.items()))
        data['train'] = self.train.to_dict()
        return data

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode('utf-8')).hexdigest()


def load_config(path=None, overrides: Mapping[str, Any] = None) -> RunConfig:
    '''Reads a TOML run configuration and applies overrides on top; None-valued overrides are ignored.'''
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            data = toml.load(path)
        except toml.TomlDecodeError as e:
            raise ParseError(f'invalid TOML ({e.msg})', path=path, lineno=e.lineno) from e

    data.update({key: value for key, value in (overrides or {}).items() if value is not None})

    names = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - names
    if unknown:
        raise ValidationError(f'Unknown configuration keys: {", ".join(sorted(unknown))}')

    train = data.pop('train', {})
    if not isinstance(train, TrainConfig):
        train_names = {f.name for f in dataclasses.fields(TrainConfig)}
        unknown = set(train) - train_names
        if unknown:
            raise ValidationError(f'Unknown [train] keys: {", ".join(sorted(unknown))}')
        train = TrainConfig(**train)

    return RunConfig(train=train, **data)
