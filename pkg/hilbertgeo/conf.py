"""
HilbertLab - Configuration access
Library defaults come from settings.HILBERTGEO; a run config file may
override them for the duration of a command.
"""

import hashlib
import json
import logging
from contextlib import contextmanager
from pathlib import Path

from django.conf import settings
from marshmallow import ValidationError

from .exceptions import ConfigError

logger = logging.getLogger(__name__)


DEFAULTS = {
    'SEED': 0,
    'WORKERS': 1,
    'DET_TOL': 1e-14,
    'EIGEN_GAP': 1e-8,
    'COLLINEAR_TOL': 1e-10,
    'HASH_QUANTUM': 1e-7,
    'DEDUP_TOL': 1e-8,
    'HULL_DEDUP_TOL': 1e-9,
    'CLASS_BUDGET': 10 ** 8,
    'ORBIT_BUDGET': 2_000_000,
    'N_RAYS': 256,
    'GRID': 48,
    'POLYGON_SIDES': 512,
    'WINDOW_FRACTION': 0.5,
    'MAX_WORD_LEN': 7,
    'ORBIT_RADIUS': 5,
    'MAX_ABS_S': 25.0,
    'SIDE': 'right',
    'LIMITSET_DEPTH': 5,
    'PINGPONG_DEPTH': 4,
    'CONVERGE_TOL': 1e-4,
}

# file key -> settings key
CONFIG_KEYS = {
    ('seed',): 'SEED',
    ('workers',): 'WORKERS',
    ('tolerances', 'det'): 'DET_TOL',
    ('tolerances', 'eigen_gap'): 'EIGEN_GAP',
    ('tolerances', 'collinear'): 'COLLINEAR_TOL',
    ('tolerances', 'hash_quantum'): 'HASH_QUANTUM',
    ('tolerances', 'dedup'): 'DEDUP_TOL',
    ('budgets', 'classes'): 'CLASS_BUDGET',
    ('budgets', 'orbit'): 'ORBIT_BUDGET',
    ('quadrature', 'n_rays'): 'N_RAYS',
    ('quadrature', 'grid'): 'GRID',
    ('quadrature', 'polygon_sides'): 'POLYGON_SIDES',
    ('entropy', 'window_fraction'): 'WINDOW_FRACTION',
    ('entropy', 'max_word_len'): 'MAX_WORD_LEN',
    ('entropy', 'orbit_radius'): 'ORBIT_RADIUS',
    ('bulge', 'max_abs_s'): 'MAX_ABS_S',
    ('bulge', 'side'): 'SIDE',
    ('limitset', 'depth'): 'LIMITSET_DEPTH',
    ('pingpong', 'depth'): 'PINGPONG_DEPTH',
    ('bounds', 'converge_tol'): 'CONVERGE_TOL',
}

_overrides = {}


def geo_setting(name):
    """Effective value of a HILBERTGEO setting"""
    if name in _overrides:
        return _overrides[name]
    configured = getattr(settings, 'HILBERTGEO', {})
    if name in configured:
        return configured[name]
    return DEFAULTS[name]


def snapshot():
    """All effective settings as a plain dict (safe to ship to worker processes)"""
    return {name: geo_setting(name) for name in DEFAULTS}


def install(values):
    """Pool initializer: pin worker settings to a snapshot"""
    _overrides.clear()
    _overrides.update(values)


@contextmanager
def override(values):
    """Temporarily replace settings with the given values"""
    previous = dict(_overrides)
    _overrides.update(values)
    try:
        yield
    finally:
        _overrides.clear()
        _overrides.update(previous)


class RunConfig:
    """A validated run configuration, flattened onto settings keys"""

    def __init__(self, values, representation=None, source=None):
        self.values = values
        self.representation = representation
        self.source = source

    def __getitem__(self, name):
        return self.values[name]

    def canonical_json(self):
        payload = {'settings': self.values, 'representation': self.representation}
        return json.dumps(payload, sort_keys=True, separators=(',', ':'))

    @property
    def digest(self):
        return hashlib.sha256(self.canonical_json().encode('utf-8')).hexdigest()

    @classmethod
    def from_settings(cls):
        return cls(snapshot())

    @classmethod
    def from_dict(cls, data, source=None):
        from .schemas import RunConfigSchema

        try:
            loaded = RunConfigSchema().load(data)
        except ValidationError as exc:
            raise ConfigError(
                f'Invalid config{_where(source)}: {_flatten_messages(exc.messages)}',
                fields=exc.messages,
            ) from exc

        values = snapshot()
        for path, key in CONFIG_KEYS.items():
            node = loaded
            for part in path:
                if not isinstance(node, dict) or part not in node:
                    node = None
                    break
                node = node[part]
            if node is not None:
                values[key] = node
        return cls(values, loaded.get('representation'), source)

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as exc:
            raise ConfigError(f'Cannot read config {path}: {exc.strerror or exc}') from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f'Malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}',
                line=exc.lineno,
                column=exc.colno,
            ) from exc
        logger.info('Loaded run config %s', path)
        return cls.from_dict(data, source=str(path))


def _where(source):
    return f' {source}' if source else ''


def _flatten_messages(messages, prefix=''):
    """Turn marshmallow's nested error dict into 'a.b: msg; c: msg'"""
    parts = []
    if isinstance(messages, dict):
        for key in sorted(messages, key=str):
            name = f'{prefix}.{key}' if prefix else str(key)
            parts.append(_flatten_messages(messages[key], name))
    elif isinstance(messages, list):
        if all(isinstance(m, str) for m in messages):
            parts.append(f'{prefix}: {" ".join(messages)}')
        else:
            parts.extend(_flatten_messages(m, prefix) for m in messages)
    else:
        parts.append(f'{prefix}: {messages}')
    return '; '.join(p for p in parts if p)
