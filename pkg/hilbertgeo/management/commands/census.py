"""
HilbertLab Census Command
Hilbert lengths of closed geodesics up to a word-length cap

Usage:
    python manage.py census --rep pants:2,2,2 --max-len 6
    python manage.py census --rep genus2 --max-len 4 --dump-counts
"""

from hilbertgeo.conf import geo_setting
from hilbertgeo.entropy import census, dump_counts, fit_entropy
from hilbertgeo.exceptions import InsufficientData
from hilbertgeo.runlog import write_csv

from ._base import GeoCommand


class Command(GeoCommand):
    help = 'Writes census.csv (class, word_length, hilbert_length) for a representation'

    def add_command_arguments(self, parser):
        parser.add_argument('--max-len', type=int, help='Word-length cap (default: HILBERTGEO MAX_WORD_LEN)')
        parser.add_argument('--unoriented', action='store_true', help='Identify a class with its inverse')
        parser.add_argument('--dump-counts', action='store_true', help='Also write counts.csv (T,count)')

    def run(self, config, manifest, options):
        rep = self.representation(options, config)
        max_len = options['max_len'] or geo_setting('MAX_WORD_LEN')
        self.stdout.write(self.style.SUCCESS(f'📏 Census of {", ".join(rep.gens)} up to length {max_len}...'))

        with manifest.stage('census'):
            result = census(rep, max_len, oriented=not options['unoriented'], workers=geo_setting('WORKERS'))

        out_dir = self.out_dir(options)
        with manifest.stage('write'):
            manifest.add_output(write_csv(result.to_frame(), out_dir / 'census.csv'))
            if options['dump_counts']:
                manifest.add_output(dump_counts(result, out_dir / 'counts.csv'))

        rows = [('Entries', len(result)), ('Skipped', result.skipped), ('Kind', result.kind)]
        try:
            est = fit_entropy(result)
            rows += [('Entropy estimate', est.h), ('Standard error', est.stderr)]
        except InsufficientData as exc:
            self.stdout.write(self.style.WARNING(f'⚠️  No entropy fit: {exc}'))
        if result.skipped:
            self.stdout.write(self.style.WARNING(f'⚠️  {result.skipped} non-hyperbolic entries skipped'))

        self.banner('📊 CENSUS SUMMARY')
        self.summary(rows)
        return out_dir
