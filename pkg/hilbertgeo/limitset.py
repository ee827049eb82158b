"""
HilbertLab - Limit sets and invariant domains
Fixed points of orbit elements, affine chart selection, hull
approximations of the invariant domain, and SVG rendering.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.template.loader import render_to_string
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection, QhullError

from .conf import geo_setting
from .exceptions import ChartMismatch, InvalidDomain, IoFailure, NoSeparatingLine, NotHyperbolic, PointAtInfinity
from .group import orbit_ball
from .hilbert import ConvexDomain, convex_domain_from_points, hausdorff_distance
from .proj3 import KLEIN_FORM, ProjectiveMap, ProjPoint, eigen_hyperbolic, quantized_keys

logger = logging.getLogger(__name__)

CHART_MARGIN = 0.1
PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#e377c2', '#17becf']


@dataclass
class LimitSample:
    points: list
    skipped: int

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def vectors(self):
        return np.array([p.coords for p in self.points]).reshape(-1, 3)


# ==================== LIMIT POINTS ====================

def limit_points(rep, depth, dedup_tol=None):
    """Attracting and repelling fixed points of every hyperbolic element of the depth ball"""
    if depth < 1:
        raise ValueError('depth must be at least 1')
    dedup_tol = geo_setting('DEDUP_TOL') if dedup_tol is None else dedup_tol

    seen = set()
    points = []
    skipped = 0
    for word, matrix, inverse in orbit_ball(rep, depth, with_inverse=True):
        if not word:
            continue
        try:
            spec = eigen_hyperbolic(matrix, inverse=inverse)
        except NotHyperbolic:
            skipped += 1
            continue
        for point in (spec.fixed_attract, spec.fixed_repel):
            keys = quantized_keys(point.coords, dedup_tol)
            if any(k in seen for k in keys):
                continue
            seen.add(keys[0])
            points.append(point)

    if skipped:
        logger.warning('limit_points: skipped %d non-hyperbolic elements at depth %d', skipped, depth)
    logger.info('limit_points depth %d: %d points', depth, len(points))
    return LimitSample(points=points, skipped=skipped)


def conic_residual(points, form=KLEIN_FORM):
    """max |p^T J p| / |p|^2 over the points"""
    vecs = np.array([p.coords if isinstance(p, ProjPoint) else p for p in points], dtype=float)
    if len(vecs) == 0:
        return 0.0
    vals = np.einsum('ij,jk,ik->i', vecs, form, vecs) / np.einsum('ij,ij->i', vecs, vecs)
    return float(np.max(np.abs(vals)))


# ==================== CHARTS ====================

def _lift_signs(units):
    """Choose signs putting the unit vectors in one hemisphere, if they fit"""
    _, _, vt = np.linalg.svd(units, full_matrices=False)
    centre = vt[0]
    signs = np.where(units @ centre >= 0, 1.0, -1.0)
    for _ in range(32):
        centre = (signs[:, None] * units).sum(axis=0)
        norm = np.linalg.norm(centre)
        if norm == 0.0:
            break
        centre /= norm
        new = np.where(units @ centre >= 0, 1.0, -1.0)
        if np.array_equal(new, signs):
            break
        signs = new
    return signs[:, None] * units


def _max_margin_functional(lifted):
    """Maximize delta subject to l . p >= delta for all p, |l_i| <= 1"""
    n = len(lifted)
    c = np.array([0.0, 0.0, 0.0, -1.0])
    a_ub = np.column_stack([-lifted, np.ones(n)])
    b_ub = np.zeros(n)
    bounds = [(-1.0, 1.0)] * 3 + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method='highs')
    if not res.success:
        raise NoSeparatingLine(f'Chart search failed: {res.message}')
    return res.x[:3], float(res.x[3])


def _chart_from_functional(ell):
    ell = ell / np.linalg.norm(ell)
    basis = []
    for k in np.argsort(np.abs(ell))[:2]:
        e = np.zeros(3)
        e[k] = 1.0
        for b in [ell] + basis:
            e = e - (e @ b) * b
        basis.append(e / np.linalg.norm(e))
    rows = np.vstack([basis[0], basis[1], ell])
    if np.linalg.det(rows) < 0:
        rows[1] = -rows[1]
    return ProjectiveMap(np.linalg.inv(rows))


def choose_chart(points, signed=False):
    """
    Projective map whose chart z = 1 holds every point at finite distance.
    ProjPoints are lifted to one hemisphere first; raw vectors with
    signed=True are taken as directions and must already fit in one.
    """
    vecs = np.array([p.coords if isinstance(p, ProjPoint) else p for p in points], dtype=float)
    if len(vecs) == 0:
        return ProjectiveMap.identity()
    units = vecs / np.linalg.norm(vecs, axis=1)[:, None]

    if not signed:
        z = np.abs(units[:, 2])
        if np.min(z) >= CHART_MARGIN:
            return ProjectiveMap.identity()
        units = _lift_signs(units)

    ell, delta = _max_margin_functional(units)
    if delta <= 1e-9:
        raise NoSeparatingLine('Points are not contained in an open half-space')
    logger.info('Chart chosen with margin %.4g', delta)
    return _chart_from_functional(ell)


def to_chart(chart, vectors):
    """Chart coordinates of homogeneous vectors"""
    vecs = np.atleast_2d(np.asarray(vectors, dtype=float))
    local = vecs @ np.linalg.inv(chart.entries).T
    z = local[:, 2]
    norms = np.linalg.norm(local, axis=1)
    if np.any(np.abs(z) <= 1e-12 * norms):
        raise PointAtInfinity('Point lies on the line at infinity of the chart')
    return local[:, :2] / z[:, None]


def from_chart(chart, coords):
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    homog = np.column_stack([coords, np.ones(len(coords))])
    return homog @ chart.entries.T


# ==================== HULLS ====================

def domain_hull(rep, depth, chart=None, sample=None):
    """Convex hull of the in-chart limit points"""
    sample = sample or limit_points(rep, depth)
    if len(sample) < 3:
        raise NoSeparatingLine('Too few limit points for a hull')
    chart = chart or choose_chart(sample.points)
    coords = to_chart(chart, sample.vectors())
    return convex_domain_from_points(coords, chart=chart, dedup_tol=geo_setting('HULL_DEDUP_TOL'))


def supporting_lines(matrix, inverse=None):
    """Lines through the neutral fixed point and the attracting, then the repelling, one"""
    spec = eigen_hyperbolic(matrix, inverse=inverse)
    v1, v2, v3 = spec.vectors.T
    return np.cross(v1, v2), np.cross(v3, v2)


def _box(inside, bound):
    u0, v0 = inside
    return [(1.0, 0.0, -(u0 + bound)), (-1.0, 0.0, u0 - bound),
            (0.0, 1.0, -(v0 + bound)), (0.0, -1.0, v0 - bound)]


def circumscribed_domain(elements, chart, inside, bound):
    """
    Polygon cut out by the supporting lines at the fixed points of
    (matrix, inverse) pairs, on the side of inside and within the box of
    half-width bound around it. It contains every orbit point of inside.
    """
    inside = np.asarray(inside, dtype=float)
    to_local = chart.entries.T
    rows = _box(inside, bound)
    skipped = 0
    for matrix, inverse in elements:
        try:
            lines = supporting_lines(matrix, inverse)
        except NotHyperbolic:
            skipped += 1
            continue
        for line in lines:
            row = to_local @ line
            norm = math.hypot(row[0], row[1])
            if norm <= 1e-12 * abs(row[2]):
                continue
            row = row / norm
            side = row[0] * inside[0] + row[1] * inside[1] + row[2]
            if abs(side) <= 1e-9:
                continue
            rows.append(-row if side > 0 else row)

    halfspaces = np.unique(np.round(np.array(rows, dtype=float), 12), axis=0)
    try:
        cut = HalfspaceIntersection(halfspaces, inside)
    except (QhullError, ValueError) as exc:
        raise InvalidDomain(f'Supporting lines do not bound a polygon: {exc}') from exc
    if skipped:
        logger.warning('circumscribed_domain: skipped %d non-hyperbolic elements', skipped)
    dom = convex_domain_from_points(cut.intersections, chart=chart, dedup_tol=geo_setting('HULL_DEDUP_TOL'))
    logger.info('circumscribed_domain: %d lines, %d vertices', len(halfspaces), len(dom))
    return dom


def limit_triangle(frame, chart):
    """In-chart triangle on the attracting, neutral and repelling fixed points"""
    coords = to_chart(chart, frame.basis.entries.T)
    area = 0.5 * np.cross(coords[1] - coords[0], coords[2] - coords[0])
    if area < 0:
        coords = coords[::-1]
    return ConvexDomain(coords, chart)


def invariance_defect(rep, dom):
    """Largest Hausdorff distance between the hull and its images under the generators"""
    homog = from_chart(dom.chart, dom.vertices)
    worst = 0.0
    for letter in range(1, rep.rank + 1):
        for g in (letter, -letter):
            image = homog @ rep.image(g).entries.T
            image_dom = convex_domain_from_points(to_chart(dom.chart, image), chart=dom.chart)
            worst = max(worst, hausdorff_distance(dom, image_dom))
    return worst


# ==================== RENDERING ====================

def _points_attr(coords, lo, scale, height):
    pts = []
    for x, y in coords:
        px = (x - lo[0]) * scale
        py = height - (y - lo[1]) * scale
        pts.append(f'{px:.6f},{py:.6f}')
    return ' '.join(pts)


def render_svg(domains, overlays, path, size=800, pad=20):
    """Layered SVG of labelled domains and overlays; identical inputs give identical bytes"""
    shapes = [(label, dom.vertices, dom.chart, True) for label, dom in domains]
    for label, item in overlays:
        if isinstance(item, ConvexDomain):
            shapes.append((label, item.vertices, item.chart, True))
        else:
            shapes.append((label, np.asarray(item, dtype=float), None, False))

    charts = [c for _, _, c, _ in shapes if c is not None]
    for c in charts[1:]:
        if not np.allclose(c.entries, charts[0].entries, rtol=0.0, atol=1e-12):
            raise ChartMismatch('All rendered domains must share one chart')

    layers = []
    width = height = size
    if shapes:
        stacked = np.vstack([v for _, v, _, _ in shapes])
        lo, hi = stacked.min(axis=0), stacked.max(axis=0)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
        scale = (size - 2 * pad) / span
        lo = lo - pad / scale
        height = (hi[1] - lo[1]) * scale + pad
        width = (hi[0] - lo[0]) * scale + pad
        for i, (label, verts, _, closed) in enumerate(shapes):
            layers.append({
                'label': label,
                'points': _points_attr(verts, lo, scale, height),
                'stroke': PALETTE[i % len(PALETTE)],
                'closed': closed,
            })

    svg = render_to_string('hilbertgeo/domains.svg', {
        'width': f'{width:.6f}',
        'height': f'{height:.6f}',
        'layers': layers,
    })
    try:
        Path(path).write_text(svg, encoding='utf-8', newline='\n')
    except OSError as exc:
        raise IoFailure(f'Cannot write {path}: {exc.strerror or exc}') from exc
    return svg
