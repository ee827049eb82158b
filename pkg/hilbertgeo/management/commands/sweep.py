"""
HilbertLab Sweep Command
Entropy estimates, trace growth and domain drift along a bulging ray

Usage:
    python manage.py sweep --rep pants:2,2,2 --split amalgam-demo --s 0:16:2
    python manage.py sweep --rep torus --split native --s 0:8:1 --side left
"""

import math

from hilbertgeo.entropy import sweep
from hilbertgeo.exceptions import ConfigError
from hilbertgeo.runlog import write_csv

from ._base import GeoCommand


def parse_grid(text):
    """'a:b:step' -> [a, a+step, ..., b]"""
    try:
        start, stop, step = (float(v) for v in text.split(':'))
    except ValueError as exc:
        raise ConfigError(f'--s expects a:b:step, got {text!r}') from exc
    if step <= 0 or stop < start:
        raise ConfigError(f'--s needs step > 0 and b >= a, got {text!r}')
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


class Command(GeoCommand):
    help = 'Writes sweep.csv with per-s entropy estimates for the bulged representation'

    def add_command_arguments(self, parser):
        parser.add_argument('--s', default='0:12:2', help='Bulging grid a:b:step (default: 0:12:2)')
        parser.add_argument('--t', type=float, default=0.0, help='Earthquake parameter (default: 0)')
        parser.add_argument('--side', choices=['right', 'left'], help='Side that moves (default: HILBERTGEO SIDE)')
        parser.add_argument('--max-len', type=int, help='Census word-length cap')
        parser.add_argument('--radius', type=int, help='Orbit ball radius')
        parser.add_argument('--depth', type=int, help='Limit set depth')

    def run(self, config, manifest, options):
        rep = self.representation(options, config)
        grid = parse_grid(options['s'])
        self.stdout.write(self.style.SUCCESS(f'🌊 Sweeping {len(grid)} values of s...'))

        with manifest.stage('sweep'):
            df = sweep(
                rep, grid, t=options['t'], side=options['side'],
                max_word_len=options['max_len'], radius=options['radius'], depth=options['depth'],
            )

        out_dir = self.out_dir(options)
        with manifest.stage('write'):
            manifest.add_output(write_csv(df, out_dir / 'sweep.csv'))

        for err in df.attrs.get('errors', []):
            self.stdout.write(self.style.WARNING(f"⚠️  s={err['s']:g} {err['stage']}: {err['error']}"))

        self.banner('📊 SWEEP SUMMARY')
        for row in df.itertuples(index=False):
            self.stdout.write(
                f'  s={row.s:<8g} h_census={row.h_census:<10.4f} h_orbit={row.h_orbit:<10.4f} '
                f'length_ab={row.length_ab:.4f}'
            )
        self.stdout.write('=' * 60)
        return out_dir
