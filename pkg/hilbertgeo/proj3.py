"""
HilbertLab - Projective linear algebra
Real 3x3 maps of determinant one, points of the projective plane,
hyperbolic spectra, cross-ratios and Hilbert lengths.
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .conf import geo_setting
from .exceptions import (
    CoincidentPoints,
    DegenerateMatrix,
    NotCollinear,
    NotHyperbolic,
    ZeroVector,
)

logger = logging.getLogger(__name__)

KLEIN_FORM = np.diag([1.0, 1.0, -1.0])


# ==================== VALUE TYPES ====================

def _frozen_array(values, shape):
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise DegenerateMatrix(f'Expected shape {shape}, got {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise DegenerateMatrix('Non-finite entries')
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ProjectiveMap:
    """
    A 3x3 real matrix acting on the projective plane.
    Maps built through normalize_det1 have determinant 1; products of
    such maps keep it without renormalization.
    """
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'entries', _frozen_array(self.entries, (3, 3)))

    def __matmul__(self, other):
        return ProjectiveMap(self.entries @ other.entries)

    def __repr__(self):
        return f'ProjectiveMap({self.entries.tolist()!r})'

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    def det(self):
        a = self.entries
        return float(np.dot(a[0], np.cross(a[1], a[2])))

    def trace(self):
        return float(np.trace(self.entries))

    def inverse(self):
        """Adjugate divided by the determinant"""
        r0, r1, r2 = self.entries
        adj = np.column_stack([np.cross(r1, r2), np.cross(r2, r0), np.cross(r0, r1)])
        d = float(np.dot(r0, np.cross(r1, r2)))
        if d == 0.0:
            raise DegenerateMatrix('Singular matrix has no inverse')
        return ProjectiveMap(adj / d)

    def apply(self, point):
        vec = point.coords if isinstance(point, ProjPoint) else np.asarray(point, dtype=float)
        return ProjPoint.from_vector(self.entries @ vec)

    def transpose(self):
        return ProjectiveMap(self.entries.T)

    def to_json(self):
        return [float(x) for x in self.entries.ravel()]

    @classmethod
    def from_json(cls, values):
        if len(values) != 9:
            raise DegenerateMatrix(f'Matrix needs 9 entries, got {len(values)}')
        return cls(np.asarray(values, dtype=float).reshape(3, 3))

    def max_abs_diff(self, other):
        return float(np.max(np.abs(self.entries - other.entries)))


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of the projective plane; the largest-magnitude coordinate is +1"""
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'coords', _frozen_array(self.coords, (3,)))

    @classmethod
    def from_vector(cls, vec):
        v = np.asarray(vec, dtype=float)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise ZeroVector('Point needs three finite coordinates')
        idx = int(np.argmax(np.abs(v)))
        if v[idx] == 0.0:
            raise ZeroVector('The zero vector is not a projective point')
        return cls(v / v[idx])

    def __repr__(self):
        return f'ProjPoint({self.coords.tolist()!r})'

    def distance(self, other):
        """Sine of the angle between the two lines through the origin"""
        a, b = self.coords, other.coords
        return float(np.linalg.norm(np.cross(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))

    def unit(self):
        return self.coords / np.linalg.norm(self.coords)


@dataclass(frozen=True, eq=False)
class HyperbolicSpectrum:
    lambda1: float
    lambda2: float
    lambda3: float
    fixed_attract: ProjPoint
    fixed_neutral: ProjPoint
    fixed_repel: ProjPoint
    vectors: np.ndarray  # unit eigenvectors as columns, in lambda order

    @property
    def eigenvalues(self):
        return (self.lambda1, self.lambda2, self.lambda3)

    @property
    def fixed_points(self):
        return (self.fixed_attract, self.fixed_neutral, self.fixed_repel)

    @property
    def hilbert_length(self):
        return 0.5 * (math.log(self.lambda1) - math.log(self.lambda3))


# ==================== NORMALIZATION ====================

def normalize_det1(matrix, det_tol=None):
    """Scale a matrix of positive determinant into SL(3,R)"""
    det_tol = geo_setting('DET_TOL') if det_tol is None else det_tol
    if isinstance(matrix, ProjectiveMap):
        matrix = matrix.entries
    a = np.asarray(matrix, dtype=float)
    if a.shape != (3, 3) or not np.all(np.isfinite(a)):
        raise DegenerateMatrix('Expected a finite 3x3 matrix')

    d = float(np.linalg.det(a))
    if abs(d) < det_tol:
        raise DegenerateMatrix(f'|det| = {abs(d):.3g} is below {det_tol:.1g}')
    if d < 0:
        # -M is the same projective map; callers negate explicitly
        raise DegenerateMatrix('Negative determinant; negate the matrix first')
    if abs(d - 1.0) <= 1e-12:
        return ProjectiveMap(a)
    return ProjectiveMap(a / np.cbrt(d))


# ==================== SPECTRA ====================

def _largest_cubic_root(c2, c1):
    """Largest root of x^3 - c2 x^2 + c1 x - 1 when all three roots are real"""
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = -2.0 * c2 ** 3 / 27.0 + c1 * c2 / 3.0 - 1.0
    if not p < 0.0:
        raise NotHyperbolic('Characteristic cubic has a repeated or complex root')
    r = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
    if abs(r) > 1.0 + 1e-9:
        raise NotHyperbolic('Characteristic cubic has complex roots')
    r = min(1.0, max(-1.0, r))
    return shift + 2.0 * math.sqrt(-p / 3.0) * math.cos(math.acos(r) / 3.0)


def _null_vector(a, lam):
    """Kernel direction of a - lam*I as the largest cross product of two rows"""
    b = a - lam * np.eye(3)
    candidates = [np.cross(b[0], b[1]), np.cross(b[0], b[2]), np.cross(b[1], b[2])]
    best = max(candidates, key=lambda v: float(np.dot(v, v)))
    norm = np.linalg.norm(best)
    if norm == 0.0 or not np.isfinite(norm):
        raise NotHyperbolic('Eigenspace is not one-dimensional')
    return best / norm


def _refine(a, lam, vec):
    """One inverse-iteration step with a slightly perturbed shift"""
    shift = lam * (1.0 + 1e-10)
    try:
        y = np.linalg.solve(a - shift * np.eye(3), vec)
    except np.linalg.LinAlgError:
        return vec
    norm = np.linalg.norm(y)
    if norm == 0.0 or not np.isfinite(norm):
        return vec
    y = y / norm
    return y if np.dot(y, vec) >= 0 else -y


def eigen_hyperbolic(matrix, inverse=None, gap=None):
    """
    Spectrum of a determinant-one map with three distinct positive eigenvalues.
    Pass the inverse when it is available as an exact product; it avoids
    cancellation in the second coefficient of the characteristic cubic.
    """
    gap = geo_setting('EIGEN_GAP') if gap is None else gap
    a = matrix.entries
    ainv = (inverse if inverse is not None else matrix.inverse()).entries

    c2 = float(np.trace(a))
    c1 = float(np.trace(ainv))
    lam1 = _largest_cubic_root(c2, c1)
    mu1 = _largest_cubic_root(c1, c2)
    if not (lam1 > 0 and mu1 > 0):
        raise NotHyperbolic('Eigenvalues are not all positive')
    lam3 = 1.0 / mu1
    lam2 = 1.0 / (lam1 * lam3)

    if not (lam1 > lam2 > lam3 > 0):
        raise NotHyperbolic(f'Eigenvalues not separated: {lam1:.6g}, {lam2:.6g}, {lam3:.6g}')
    if (lam1 - lam2) / lam1 < gap or (lam2 - lam3) / lam2 < gap:
        raise NotHyperbolic(f'Relative eigenvalue gap below {gap:g}')
    # two negative eigenvalues can mimic a positive spectrum in the root solve
    if abs(lam1 + lam2 + lam3 - c2) > 1e-6 * max(1.0, abs(c2)):
        raise NotHyperbolic('Spectrum inconsistent with the trace')
    if abs(1.0 / lam1 + 1.0 / lam2 + 1.0 / lam3 - c1) > 1e-6 * max(1.0, abs(c1)):
        raise NotHyperbolic('Spectrum inconsistent with the inverse trace')

    v1 = _refine(a, lam1, _null_vector(a, lam1))
    v3 = _refine(ainv, mu1, _null_vector(ainv, mu1))
    w1 = _null_vector(a.T, lam1)
    w3 = _null_vector(ainv.T, mu1)
    v2 = np.cross(w1, w3)
    norm = np.linalg.norm(v2)
    if norm == 0.0:
        raise NotHyperbolic('Neutral eigenvector is undetermined')
    v2 = _refine(a, lam2, v2 / norm)

    points = [ProjPoint.from_vector(v) for v in (v1, v2, v3)]
    for p, q in itertools.combinations(points, 2):
        if p.distance(q) < 1e-12:
            raise NotHyperbolic('Fixed points are not distinct')

    return HyperbolicSpectrum(
        lambda1=lam1,
        lambda2=lam2,
        lambda3=lam3,
        fixed_attract=points[0],
        fixed_neutral=points[1],
        fixed_repel=points[2],
        vectors=np.column_stack([v1, v2, v3]),
    )


def hilbert_length(matrix, inverse=None, gap=None):
    """Translation length 1/2 log(lambda1/lambda3)"""
    return eigen_hyperbolic(matrix, inverse=inverse, gap=gap).hilbert_length


# ==================== CROSS-RATIO ====================

def _as_vector(point):
    if isinstance(point, ProjPoint):
        return point.coords
    v = np.asarray(point, dtype=float)
    if v.shape == (2,):
        v = np.array([v[0], v[1], 1.0])
    return v


def cross_ratio(p, x, y, q, allow_equal=False, collinear_tol=None):
    """
    [p,y][q,x] / ([p,x][q,y]) for four points on a line, ordered p, x, y, q.
    Points may be ProjPoints, 3-vectors or affine 2-vectors.
    """
    collinear_tol = geo_setting('COLLINEAR_TOL') if collinear_tol is None else collinear_tol
    vp, vx, vy, vq = (_as_vector(v) for v in (p, x, y, q))
    units = [v / np.linalg.norm(v) for v in (vp, vx, vy, vq)]

    if allow_equal and np.linalg.norm(np.cross(units[1], units[2])) < 1e-12:
        return 1.0
    for a, b in itertools.combinations(units, 2):
        if np.linalg.norm(np.cross(a, b)) < 1e-12:
            raise CoincidentPoints('Cross-ratio needs four distinct points')

    line = np.cross(vp, vq)
    line_unit = line / np.linalg.norm(line)
    for v in (units[1], units[2]):
        if abs(np.dot(line_unit, v)) > collinear_tol:
            raise NotCollinear('Points do not lie on a common line')

    def bracket(a, b):
        return float(np.dot(line_unit, np.cross(a, b)))

    return (bracket(vp, vy) * bracket(vq, vx)) / (bracket(vp, vx) * bracket(vq, vy))


# ==================== ISOMETRIES OF THE KLEIN MODEL ====================

def form_residual(matrix, form=KLEIN_FORM):
    """max |M^T J M - J|"""
    a = matrix.entries if isinstance(matrix, ProjectiveMap) else np.asarray(matrix)
    return float(np.max(np.abs(a.T @ form @ a - form)))


def preserves_form(matrix, form=KLEIN_FORM, tol=1e-9):
    return form_residual(matrix, form) <= tol


def lorentz_product(u, v):
    return float(u @ KLEIN_FORM @ v)


def rotation(phi):
    """Rotation about the centre of the Klein disc"""
    c, s = math.cos(phi), math.sin(phi)
    return ProjectiveMap([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def klein_boost(distance, angle=0.0):
    """Hyperbolic translation by distance along the diameter at the given angle"""
    ch, sh = math.cosh(distance), math.sinh(distance)
    boost = ProjectiveMap([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]])
    if angle == 0.0:
        return boost
    return rotation(angle) @ boost @ rotation(-angle)


def half_turn(center):
    """Rotation by pi about a point of the hyperboloid (J-norm -1 after scaling)"""
    m = np.asarray(center, dtype=float)
    norm2 = lorentz_product(m, m)
    if norm2 >= 0:
        raise DegenerateMatrix('Half-turn centre must be inside the Klein disc')
    m = m / math.sqrt(-norm2)
    return ProjectiveMap(-np.eye(3) - 2.0 * np.outer(m, m) @ KLEIN_FORM)


# ==================== HASHING ====================

def quantized_keys(values, quantum, probe=0.05, max_ambiguous=4):
    """
    Rounded integer keys for a float vector. The first key is canonical; the
    rest cover entries lying within probe*quantum of a rounding boundary.
    """
    scaled = np.asarray(values, dtype=float).ravel() / quantum
    base = np.round(scaled)
    frac = scaled - np.floor(scaled)
    ambiguous = np.flatnonzero(np.abs(frac - 0.5) < probe)
    keys = [base.astype(np.int64).tobytes()]
    if 0 < len(ambiguous) <= max_ambiguous:
        alternates = [(base[i], np.floor(scaled[i]) if base[i] > scaled[i] else np.ceil(scaled[i]))
                      for i in ambiguous]
        for choice in itertools.product(*alternates):
            candidate = base.copy()
            candidate[ambiguous] = choice
            key = candidate.astype(np.int64).tobytes()
            if key not in keys:
                keys.append(key)
    return keys
