"""
HilbertLab - Run outputs
CSV writing, content hashes and the run.json manifest written beside
every command's outputs.
"""

import hashlib
import json
import logging
import time
from contextlib import contextmanager
from pathlib import Path

import django
import numpy as np
import pandas as pd
import scipy

from .exceptions import IoFailure

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'run.json'
DJANGO_OPTIONS = {
    'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
    'force_color', 'skip_checks', 'stdout', 'stderr',
}


def canonical_json(payload):
    return json.dumps(payload, sort_keys=True, separators=(',', ':'))


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as fh:
        for block in iter(lambda: fh.read(1 << 16), b''):
            digest.update(block)
    return digest.hexdigest()


def write_csv(df, path):
    """RFC 4180 CSV with LF endings and round-trippable floats"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')
    except OSError as exc:
        raise IoFailure(f'Cannot write {path}: {exc.strerror or exc}') from exc
    logger.info('Wrote %d rows to %s', len(df), path)
    return path


def write_json(payload, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n', encoding='utf-8', newline='\n')
    except OSError as exc:
        raise IoFailure(f'Cannot write {path}: {exc.strerror or exc}') from exc
    return path


def package_versions():
    return {
        'django': django.get_version(),
        'numpy': np.__version__,
        'pandas': pd.__version__,
        'scipy': scipy.__version__,
    }


class RunManifest:
    """Command, arguments, config hash, versions, stage timings and output hashes"""

    def __init__(self, command, options, config):
        self.command = command
        self.arguments = {k: v for k, v in sorted(options.items()) if k not in DJANGO_OPTIONS}
        self.config = config
        self.timings = {}
        self.outputs = []

    @contextmanager
    def stage(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.timings[name] = round(self.timings.get(name, 0.0) + elapsed, 6)
            logger.info('Stage %s took %.3fs', name, elapsed)

    def add_output(self, path):
        path = Path(path)
        self.outputs.append({'path': path.name, 'sha256': sha256_file(path)})
        return path

    def to_json(self):
        return {
            'command': self.command,
            'arguments': json.loads(json.dumps(self.arguments, default=str)),
            'config_sha256': self.config.digest,
            'versions': package_versions(),
            'timings': self.timings,
            'outputs': self.outputs,
        }

    def write(self, directory):
        path = write_json(self.to_json(), Path(directory) / MANIFEST_NAME)
        logger.info('Manifest written to %s', path)
        return path
