"""
HilbertLab - Shared command plumbing
Config loading, representation selection, error translation and the
run manifest for every hilbertgeo management command.
"""

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from hilbertgeo import conf
from hilbertgeo.conf import RunConfig
from hilbertgeo.exceptions import ConfigError, HilbertGeoError
from hilbertgeo.reps import from_spec, representation_from_dict
from hilbertgeo.runlog import RunManifest

logger = logging.getLogger('hilbertgeo')

SPLIT_CHOICES = ['none', 'amalgam-demo', 'hnn-demo', 'native']


class GeoCommand(BaseCommand):
    """Base class: subclasses implement add_command_arguments and run"""
    default_rep = 'pants:2,2,2'
    default_out = 'output'

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON run config (defaults: settings.HILBERTGEO)')
        parser.add_argument(
            '--rep',
            help='pants:l1,l2,l3 | torus | genus2 | schottky:l | file:path (default: %s)' % self.default_rep,
        )
        parser.add_argument('--split', choices=SPLIT_CHOICES, default='native',
                            help='Splitting annotation to use (default: native)')
        parser.add_argument('--out', default=self.default_out, help='Output directory')
        parser.add_argument('--workers', type=int, help='Worker processes (default: HILBERTGEO WORKERS)')
        parser.add_argument('--seed', type=int, help='Random seed (default: config seed)')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def load_config(self, options):
        config = RunConfig.from_file(options['config']) if options.get('config') else RunConfig.from_settings()
        values = dict(config.values)
        if options.get('workers') is not None:
            values['WORKERS'] = options['workers']
        if options.get('seed') is not None:
            values['SEED'] = options['seed']
        return RunConfig(values, config.representation, config.source)

    def representation(self, options, config):
        if options.get('rep'):
            return from_spec(options['rep'], options['split'])
        if config.representation:
            rep = representation_from_dict(config.representation)
            if options['split'] not in ('native', 'none'):
                raise ConfigError('--split demos need --rep')
            return rep if options['split'] == 'native' else rep.with_images(list(rep.images), splitting=None)
        return from_spec(self.default_rep, options['split'])

    def out_dir(self, options):
        path = Path(options['out'])
        path.mkdir(parents=True, exist_ok=True)
        return path

    def handle(self, *args, **options):
        try:
            config = self.load_config(options)
            with conf.override(config.values):
                manifest = RunManifest(self.command_name, options, config)
                out_dir = self.run(config, manifest, options)
                manifest.write(out_dir)
        except HilbertGeoError as exc:
            logger.error('%s failed: %s', self.command_name, exc)
            self.stdout.write(self.style.ERROR(f'❌ {type(exc).__name__}: {exc}'))
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=exc.exit_code) from exc

    def run(self, config, manifest, options):
        """Do the work, register outputs on the manifest, return the output directory"""
        raise NotImplementedError

    # ==================== OUTPUT ====================

    def banner(self, title):
        self.stdout.write('\n' + '=' * 60)
        self.stdout.write(self.style.SUCCESS(title))
        self.stdout.write('=' * 60)

    def summary(self, rows):
        for name, value in rows:
            if isinstance(value, int):
                self.stdout.write(f'  {name:.<35} {value:>10,}')
            elif isinstance(value, float):
                self.stdout.write(f'  {name:.<35} {value:>10.4f}')
            else:
                self.stdout.write(f'  {name:.<35} {value:>10}')
        self.stdout.write('=' * 60)
