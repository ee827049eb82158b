"""
HilbertLab - Hilbert geometry of convex polygons
Chord endpoints, the Hilbert distance, the Finsler norm, the induced
measure and in-chart Hausdorff comparison of domains.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .conf import geo_setting
from .exceptions import (
    ChartMismatch,
    CoincidentPoints,
    InvalidDomain,
    PointOutsideDomain,
    RegionNotContained,
    ZeroVector,
)
from .proj3 import ProjectiveMap

logger = logging.getLogger(__name__)

PRIMARY_EPS = 1e-12
FALLBACK_EPS = 1e-9


# ==================== DOMAINS ====================

@dataclass(frozen=True, eq=False)
class ConvexDomain:
    """
    Strictly convex polygon in an affine chart, vertices counterclockwise.
    chart maps chart coordinates (x, y, 1) to homogeneous coordinates.
    """
    vertices: np.ndarray
    chart: ProjectiveMap = field(default_factory=ProjectiveMap.identity)

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
            raise InvalidDomain('A domain needs at least three 2D vertices')
        if not np.all(np.isfinite(verts)):
            raise InvalidDomain('Non-finite vertex')
        edges = np.roll(verts, -1, axis=0) - verts
        if np.any(np.linalg.norm(edges, axis=1) <= PRIMARY_EPS):
            raise InvalidDomain('Repeated vertex')
        turns = _cross(edges, np.roll(edges, -1, axis=0))
        if np.any(turns <= PRIMARY_EPS):
            raise InvalidDomain('Polygon is not strictly convex and counterclockwise')
        verts.flags.writeable = False
        object.__setattr__(self, 'vertices', verts)

        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        offsets = np.einsum('ij,ij->i', normals, verts)
        normals.flags.writeable = False
        offsets.flags.writeable = False
        object.__setattr__(self, 'normals', normals)
        object.__setattr__(self, 'offsets', offsets)

    def __len__(self):
        return len(self.vertices)

    @property
    def area(self):
        return polygon_area(self.vertices)

    def slack(self, point):
        """Distance from point to each edge line, positive inside"""
        return self.offsets - self.normals @ np.asarray(point, dtype=float)

    def contains(self, point, eps=PRIMARY_EPS):
        return bool(np.all(self.slack(point) > eps))

    def transformed(self, matrix):
        """Projective image of the domain, expressed in the same chart"""
        homog = np.column_stack([self.vertices, np.ones(len(self.vertices))]) @ matrix.entries.T
        z = homog[:, 2]
        if np.any(np.abs(z) < 1e-12) or not (np.all(z > 0) or np.all(z < 0)):
            raise InvalidDomain('Image of the domain leaves the chart')
        pts = homog[:, :2] / z[:, None]
        if polygon_area(pts) < 0:
            pts = pts[::-1]
        return ConvexDomain(pts, self.chart)

    def boundary_samples(self, per_edge=8):
        """Points along the boundary, per_edge per edge, starting at each vertex"""
        verts = self.vertices
        nxt = np.roll(verts, -1, axis=0)
        ts = np.arange(per_edge) / per_edge
        return (verts[:, None, :] + ts[None, :, None] * (nxt - verts)[:, None, :]).reshape(-1, 2)

    def to_json(self):
        return {'chart': self.chart.to_json(), 'vertices': self.vertices.tolist()}

    @classmethod
    def from_json(cls, data):
        return cls(np.asarray(data['vertices'], dtype=float), ProjectiveMap.from_json(data['chart']))


@dataclass(frozen=True)
class TangentVector:
    base: tuple
    dir: tuple


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def polygon_area(vertices):
    """Signed shoelace area"""
    v = np.asarray(vertices, dtype=float)
    return 0.5 * float(np.sum(_cross(v, np.roll(v, -1, axis=0))))


def regular_polygon(n, radius=1.0, phase=0.0, chart=None):
    angles = phase + 2.0 * np.pi * np.arange(n) / n
    verts = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    return ConvexDomain(verts, chart or ProjectiveMap.identity())


def disc_polygon(n):
    """Regular n-gon straddling the unit circle (vertices outside, edge midpoints inside)"""
    return regular_polygon(n, radius=2.0 / (1.0 + math.cos(math.pi / n)))


def convex_domain_from_points(points, chart=None, dedup_tol=1e-9):
    """Convex hull of a point cloud, with near-duplicate and flat vertices removed"""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise InvalidDomain('Need at least three points for a hull')
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise InvalidDomain(f'Degenerate point set: {exc}') from exc

    verts = [pts[i] for i in hull.vertices]
    changed = True
    while changed and len(verts) >= 3:
        changed = False
        kept = []
        for i, v in enumerate(verts):
            prev = kept[-1] if kept else verts[i - 1]
            if np.linalg.norm(v - prev) <= dedup_tol:
                changed = True
                continue
            nxt = verts[(i + 1) % len(verts)]
            if _cross(v - prev, nxt - v) <= PRIMARY_EPS:
                changed = True
                continue
            kept.append(v)
        verts = kept
    if len(verts) < 3:
        raise InvalidDomain('Hull collapsed after pruning')
    return ConvexDomain(np.array(verts), chart or ProjectiveMap.identity())


# ==================== CHORDS ====================

def _ray_params(dom, base, direction, eps):
    """Parameters t- < 0 < t+ where base + t*direction meets the boundary"""
    slack = dom.slack(base)
    nd = dom.normals @ direction
    scale = float(np.linalg.norm(direction))
    exits = nd > eps * scale
    entries = nd < -eps * scale
    if not exits.any() or not entries.any():
        return None
    t_plus = float(np.min(slack[exits] / nd[exits]))
    t_minus = float(np.max(slack[entries] / nd[entries]))
    return t_minus, t_plus


def _require_inside(dom, *points):
    for p in points:
        if not dom.contains(p):
            raise PointOutsideDomain(f'Point {np.asarray(p).tolist()} is not inside the domain')


def _chord_params(dom, x, y):
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    for eps in (PRIMARY_EPS, FALLBACK_EPS):
        params = _ray_params(dom, x, d, eps)
        if params is not None and params[0] < 0.0 and params[1] > 1.0:
            return params
    raise PointOutsideDomain('Chord does not cross the boundary on both sides')


def chord_endpoints(dom, x, y):
    """Boundary points p, q with p, x, y, q in order on the line xy"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _require_inside(dom, x, y)
    if np.allclose(x, y, rtol=0.0, atol=PRIMARY_EPS):
        raise CoincidentPoints('Chord needs two distinct points')
    t_minus, t_plus = _chord_params(dom, x, y)
    d = y - x
    return x + t_minus * d, x + t_plus * d


def distance(dom, x, y):
    """Hilbert distance 1/2 log [p,x,y,q]"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _require_inside(dom, x, y)
    if np.array_equal(x, y):
        return 0.0
    t_minus, t_plus = _chord_params(dom, x, y)
    return 0.5 * (math.log1p(-t_minus) + math.log(t_plus)
                  - math.log(-t_minus) - math.log(t_plus - 1.0))


def distances_from(dom, x, ys, block=1024):
    """
    Hilbert distances from x to each row of ys, block rows at a time.
    Rows outside the domain come back as nan.
    """
    x = np.asarray(x, dtype=float)
    _require_inside(dom, x)
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    out = np.full(len(ys), np.nan)
    slack = dom.slack(x)
    for start in range(0, len(ys), block):
        out[start:start + block] = _block_distances(dom, x, slack, ys[start:start + block])
    return out


def _block_distances(dom, x, slack, ys):
    out = np.full(len(ys), np.nan)
    inside = np.all(dom.offsets[None, :] - ys @ dom.normals.T > PRIMARY_EPS, axis=1)
    d = ys - x
    lengths = np.linalg.norm(d, axis=1)
    same = inside & (lengths == 0.0)
    out[same] = 0.0
    live = inside & (lengths > 0.0)
    if not live.any():
        return out

    nd = d[live] @ dom.normals.T
    scale = lengths[live][:, None] * PRIMARY_EPS
    with np.errstate(divide='ignore', invalid='ignore'):
        t = slack[None, :] / nd
    t_plus = np.min(np.where(nd > scale, t, np.inf), axis=1)
    t_minus = np.max(np.where(nd < -scale, t, -np.inf), axis=1)
    out[live] = 0.5 * (np.log1p(-t_minus) + np.log(t_plus)
                       - np.log(-t_minus) - np.log(t_plus - 1.0))
    return out


# ==================== FINSLER NORM AND MEASURE ====================

def finsler_norm(dom, tv):
    """1/2 (1/|x - p-| + 1/|x - p+|) |v| along the line through x in direction v"""
    base = np.asarray(tv.base, dtype=float)
    direction = np.asarray(tv.dir, dtype=float)
    if not np.any(direction):
        raise ZeroVector('Finsler norm of the zero vector')
    _require_inside(dom, base)
    params = _ray_params(dom, base, direction, PRIMARY_EPS)
    if params is None:
        raise PointOutsideDomain('Ray does not meet the boundary')
    t_minus, t_plus = params
    return 0.5 * (1.0 / t_plus - 1.0 / t_minus)


def _unit_radii(dom, x, n_rays):
    angles = 2.0 * np.pi * np.arange(n_rays) / n_rays
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    slack = dom.slack(x)
    nd = dirs @ dom.normals.T
    with np.errstate(divide='ignore', invalid='ignore'):
        t = slack[None, :] / nd
    t_plus = np.min(np.where(nd > PRIMARY_EPS, t, np.inf), axis=1)
    t_minus = np.max(np.where(nd < -PRIMARY_EPS, t, -np.inf), axis=1)
    norms = 0.5 * (1.0 / t_plus - 1.0 / t_minus)
    return dirs, 1.0 / norms


def unit_ball_area(dom, x, n_rays=None):
    """Euclidean area of the Finsler unit ball at x, by polar quadrature"""
    n_rays = geo_setting('N_RAYS') if n_rays is None else n_rays
    if n_rays < 16:
        raise ValueError('n_rays must be at least 16')
    x = np.asarray(x, dtype=float)
    _require_inside(dom, x)
    _, radii = _unit_radii(dom, x, n_rays)
    return math.pi / n_rays * math.fsum(radii ** 2)


def unit_ball_boundary(dom, x, n_rays=None):
    """Sampled boundary of the Finsler unit ball at x, as displacement vectors"""
    n_rays = geo_setting('N_RAYS') if n_rays is None else n_rays
    x = np.asarray(x, dtype=float)
    _require_inside(dom, x)
    dirs, radii = _unit_radii(dom, x, n_rays)
    return dirs * radii[:, None]


def measure(dom, region, grid=None, n_rays=None):
    """
    Midpoint-rule integral of 1/unit_ball_area over region.
    region is a ConvexDomain or a raw vertex array; a region with empty
    interior has measure 0.
    """
    grid = geo_setting('GRID') if grid is None else grid
    n_rays = geo_setting('N_RAYS') if n_rays is None else n_rays
    if not isinstance(region, ConvexDomain):
        verts = np.asarray(region, dtype=float)
        if len(verts) < 3 or abs(polygon_area(verts)) <= 1e-14:
            return 0.0
        if polygon_area(verts) < 0:
            verts = verts[::-1]
        region = ConvexDomain(verts, dom.chart)
    for v in region.vertices:
        if not dom.contains(v):
            raise RegionNotContained(f'Region vertex {v.tolist()} lies outside the domain')

    lo = region.vertices.min(axis=0)
    hi = region.vertices.max(axis=0)
    step = (hi - lo) / grid
    cell_area = float(step[0] * step[1])
    xs = lo[0] + step[0] * (np.arange(grid) + 0.5)
    ys = lo[1] + step[1] * (np.arange(grid) + 0.5)
    centres = np.array([(cx, cy) for cy in ys for cx in xs])
    inside = np.all(region.offsets[None, :] - centres @ region.normals.T >= 0.0, axis=1)

    terms = []
    for c in centres[inside]:
        _, radii = _unit_radii(dom, c, n_rays)
        terms.append(cell_area / (math.pi / n_rays * math.fsum(radii ** 2)))
    return math.fsum(terms)


# ==================== COMPARISON ====================

def _point_segment_distances(points, a, b):
    """Distance from every point to every segment [a_k, b_k]; shape (points, segments)"""
    ab = b - a
    ap = points[:, None, :] - a[None, :, :]
    denom = np.einsum('ij,ij->i', ab, ab)
    t = np.clip(np.einsum('pij,ij->pi', ap, ab) / denom[None, :], 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    return np.linalg.norm(points[:, None, :] - closest, axis=2)


def _directed_hausdorff(src, dst, per_edge):
    samples = src.boundary_samples(per_edge)
    a = dst.vertices
    b = np.roll(a, -1, axis=0)
    return float(np.max(np.min(_point_segment_distances(samples, a, b), axis=1)))


def hausdorff_distance(a, b, per_edge=8):
    """Symmetric Hausdorff distance between the two boundaries, in chart coordinates"""
    if not np.allclose(a.chart.entries, b.chart.entries, rtol=0.0, atol=1e-12):
        raise ChartMismatch('Domains live in different affine charts')
    return max(_directed_hausdorff(a, b, per_edge), _directed_hausdorff(b, a, per_edge))


def klein_distance(x, y):
    """Hyperbolic distance in the Klein model of the unit disc"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    num = 1.0 - float(x @ y)
    den = math.sqrt((1.0 - float(x @ x)) * (1.0 - float(y @ y)))
    return math.acosh(max(1.0, num / den))
