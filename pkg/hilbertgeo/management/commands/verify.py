"""
HilbertLab Verify Command
Runs the quick-scale property suites of every module

Usage:
    python manage.py verify
    python manage.py verify --config config/default.json
"""

import pandas as pd
from django.core.management.base import CommandError

from hilbertgeo.runlog import write_csv
from hilbertgeo.suites import run_all

from ._base import GeoCommand


class Command(GeoCommand):
    help = 'Runs the property suites and prints a pass/fail table'

    def run(self, config, manifest, options):
        self.stdout.write(self.style.SUCCESS('🔎 Running verification suites...'))
        with manifest.stage('suites'):
            results = run_all(config)

        out_dir = self.out_dir(options)
        table = pd.DataFrame({
            'module': [r.module for r in results],
            'check': [r.name for r in results],
            'passed': [r.passed for r in results],
            'detail': [r.detail for r in results],
        })
        manifest.add_output(write_csv(table, out_dir / 'verify.csv'))

        self.banner('📋 VERIFICATION RESULTS')
        for r in results:
            label = f'{r.module} / {r.name}'
            status = self.style.SUCCESS('PASS') if r.passed else self.style.ERROR('FAIL')
            self.stdout.write(f'  {label:.<50} {status}  {r.detail}')
        self.stdout.write('=' * 60)

        failed = [r for r in results if not r.passed]
        if failed:
            manifest.write(out_dir)
            raise CommandError(f'{len(failed)} of {len(results)} checks failed', returncode=1)
        self.stdout.write(self.style.SUCCESS(f'✅ All {len(results)} checks passed'))
        return out_dir
