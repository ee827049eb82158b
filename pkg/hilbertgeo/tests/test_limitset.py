import math

import numpy as np
import pytest

from hilbertgeo.bulge import bulge_frame
from hilbertgeo.exceptions import ChartMismatch, NoSeparatingLine, PointAtInfinity
from hilbertgeo.group import Representation, orbit_ball
from hilbertgeo.hilbert import ConvexDomain, hausdorff_distance
from hilbertgeo.limitset import (
    choose_chart,
    circumscribed_domain,
    conic_residual,
    domain_hull,
    from_chart,
    invariance_defect,
    limit_points,
    limit_triangle,
    render_svg,
    supporting_lines,
    to_chart,
)
from hilbertgeo.proj3 import ProjectiveMap, ProjPoint, klein_boost
from hilbertgeo.reps import fuchsian_pants

from .factories import ConvexDomainFactory, PantsParamsFactory

# chart sending e1, e2, e3 to (1, 0), (0, 1), (0, 0)
CORNER_CHART = ProjectiveMap(np.linalg.inv([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]]))


@pytest.fixture(scope='module')
def pants():
    return fuchsian_pants(PantsParamsFactory())


@pytest.fixture
def diagonal():
    return Representation(gens=['a'], images=[np.diag([math.e ** 2, 1.0, math.e ** -2])])


def test_fuchsian_limit_points_lie_on_the_conic(pants):
    sample = limit_points(pants, 3)
    assert sample.skipped == 0
    assert len(sample) > 20
    assert conic_residual(sample.points) < 1e-7


def test_limit_points_are_distinct(pants):
    vecs = limit_points(pants, 2).vectors()
    units = vecs / np.linalg.norm(vecs, axis=1)[:, None]
    gram = np.abs(units @ units.T) - np.eye(len(units))
    assert np.max(gram) < 1 - 1e-12


def test_conic_points_keep_the_identity_chart(pants):
    chart = choose_chart(limit_points(pants, 2).points)
    assert chart.max_abs_diff(ProjectiveMap.identity()) == 0.0


def test_chart_for_points_near_infinity():
    points = [ProjPoint.from_vector(v) for v in ([1.0, 0.0, 0.0], [0.0, 1.0, 0.01], [1.0, 1.0, 0.02], [-1.0, 2.0, 0.0])]
    chart = choose_chart(points)
    coords = to_chart(chart, np.array([p.coords for p in points]))
    assert np.all(np.isfinite(coords))
    back = from_chart(chart, coords)
    for p, v in zip(points, back):
        assert p.distance(ProjPoint.from_vector(v)) < 1e-10


def test_signed_vectors_without_half_space():
    with pytest.raises(NoSeparatingLine):
        choose_chart([np.array([1.0, 0.0, 0.0]), np.array([-1.0, 0.0, 0.0])], signed=True)


def test_point_at_infinity():
    with pytest.raises(PointAtInfinity):
        to_chart(ProjectiveMap.identity(), [1.0, 0.0, 0.0])


def test_fuchsian_hull_is_inscribed_in_the_disc(pants):
    hull = domain_hull(pants, 3)
    radii = np.linalg.norm(hull.vertices, axis=1)
    assert radii == pytest.approx(np.ones(len(radii)), abs=1e-6)


def test_hull_grows_with_depth(pants):
    shallow = domain_hull(pants, 2)
    deep = domain_hull(pants, 4)
    assert deep.area >= shallow.area - 1e-12
    assert len(deep) >= len(shallow)


def test_limit_triangle_on_coordinate_frame(diagonal):
    triangle = limit_triangle(bulge_frame(diagonal, (1,)), CORNER_CHART)
    assert sorted(map(tuple, np.round(triangle.vertices, 12))) == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]
    assert triangle.area > 0


def test_triangle_of_fixed_points_is_invariant(diagonal):
    triangle = limit_triangle(bulge_frame(diagonal, (1,)), CORNER_CHART)
    assert invariance_defect(diagonal, triangle) < 1e-9


def test_render_is_deterministic(tmp_path):
    domains = [('inner', ConvexDomainFactory(radius=1.0)), ('outer', ConvexDomainFactory(radius=1.5))]
    overlays = [('axis', [(-1.0, 0.0), (1.0, 0.0)])]
    first = render_svg(domains, overlays, tmp_path / 'a.svg')
    render_svg(domains, overlays, tmp_path / 'b.svg')
    assert (tmp_path / 'a.svg').read_bytes() == (tmp_path / 'b.svg').read_bytes()
    assert first.startswith('<?xml')
    assert first.count('<polygon') == 2
    assert first.count('<polyline') == 1
    assert '<title>outer</title>' in first


def test_render_empty_picture(tmp_path):
    svg = render_svg([], [], tmp_path / 'empty.svg')
    assert 'width="800.000000"' in svg
    assert '<g ' not in svg


def test_render_needs_one_chart(tmp_path):
    domains = [('a', ConvexDomainFactory()), ('b', ConvexDomainFactory(chart=klein_boost(0.2)))]
    with pytest.raises(ChartMismatch):
        render_svg(domains, [], tmp_path / 'x.svg')


def test_render_accepts_triangle_overlay(tmp_path):
    triangle = ConvexDomain(np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]))
    svg = render_svg([('hex', ConvexDomainFactory())], [('triangle', triangle)], tmp_path / 't.svg')
    assert svg.count('<polygon') == 2


def test_circumscribed_domain_surrounds_the_disc(pants):
    elements = [(m, inv) for w, m, inv in orbit_ball(pants, 3, with_inverse=True) if w]
    dom = circumscribed_domain(elements, ProjectiveMap.identity(), (0.0, 0.0), bound=10.0)
    assert np.min(np.linalg.norm(dom.vertices, axis=1)) >= 1.0 - 1e-9
    coords = to_chart(dom.chart, limit_points(pants, 3).vectors())
    assert all(np.min(dom.slack(p)) >= -1e-9 for p in coords)
    rng = np.random.default_rng(4)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=50)
    inner = 0.99 * np.column_stack([np.cos(theta), np.sin(theta)])
    assert all(dom.contains(p) for p in inner)


def test_supporting_lines_touch_the_conic(pants):
    m = pants.images[0]
    attract, repel = supporting_lines(m, inverse=pants.image(-1))
    for line in (attract, repel):
        # a line a x + b y + c z = 0 is tangent to x^2 + y^2 = z^2 when a^2 + b^2 = c^2
        assert line[0] ** 2 + line[1] ** 2 == pytest.approx(line[2] ** 2, rel=1e-9)


def test_hull_drift_shrinks_with_depth(pants):
    chart = ProjectiveMap.identity()
    h2, h4, h6 = (domain_hull(pants, depth, chart=chart) for depth in (2, 4, 6))
    assert hausdorff_distance(h2, h4) > hausdorff_distance(h4, h6) > 0.0
