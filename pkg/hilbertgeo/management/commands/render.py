"""
HilbertLab Render Command
SVG of the invariant domain hulls along a bulging ray

Usage:
    python manage.py render --rep pants:2,2,2 --split amalgam-demo --s 0 2 4 8 --out domains.svg
"""

from pathlib import Path

from hilbertgeo.bulge import bulge_frame, deform
from hilbertgeo.conf import geo_setting
from hilbertgeo.exceptions import NoSplitting
from hilbertgeo.limitset import choose_chart, domain_hull, limit_points, limit_triangle, render_svg

from ._base import GeoCommand


class Command(GeoCommand):
    help = 'Renders one hull per s plus the limit triangle of the splitting curve'
    default_out = 'output/domains.svg'

    def add_command_arguments(self, parser):
        parser.add_argument('--s', type=float, nargs='+', default=[0.0, 2.0, 4.0, 8.0],
                            help='Bulging parameters (default: 0 2 4 8)')
        parser.add_argument('--depth', type=int, help='Limit set depth (default: HILBERTGEO LIMITSET_DEPTH)')
        parser.add_argument('--side', choices=['right', 'left'], help='Side that moves')

    def run(self, config, manifest, options):
        rep = self.representation(options, config)
        if rep.splitting is None:
            raise NoSplitting('render needs a representation with a splitting')
        depth = options['depth'] or geo_setting('LIMITSET_DEPTH')
        self.stdout.write(self.style.SUCCESS(f'🎨 Rendering {len(options["s"])} domains at depth {depth}...'))

        with manifest.stage('limit_points'):
            deformed = [deform(rep, 0.0, s, side=options['side']) for s in options['s']]
            samples = [limit_points(d, depth) for d in deformed]
            chart = choose_chart([p for sample in samples for p in sample.points])

        with manifest.stage('hulls'):
            domains = [
                (f's = {s:g}', domain_hull(d, depth, chart=chart, sample=sample))
                for s, d, sample in zip(options['s'], deformed, samples)
            ]
            triangle = limit_triangle(bulge_frame(rep, rep.splitting.gamma), chart)

        path = Path(options['out'])
        path.parent.mkdir(parents=True, exist_ok=True)
        with manifest.stage('render'):
            render_svg(domains, [('limit triangle', triangle)], path)
            manifest.add_output(path)

        skipped = sum(s.skipped for s in samples)
        if skipped:
            self.stdout.write(self.style.WARNING(f'⚠️  {skipped} non-hyperbolic elements skipped'))
        self.banner('📊 RENDER SUMMARY')
        self.summary([(label, len(dom)) for label, dom in domains] + [('Output', path.name)])
        return path.parent
