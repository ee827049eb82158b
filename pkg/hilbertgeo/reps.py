"""
HilbertLab - Base representations
Fuchsian pants and torus groups from 2x2 trace data, the genus-2 octagon
group, ping-pong certified Schottky pairs, and representation files.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from marshmallow import ValidationError

from .conf import geo_setting
from .exceptions import (
    ConfigError,
    DegenerateMatrix,
    IoFailure,
    NotHyperbolic,
    PingPongFailed,
    UnknownGenerator,
)
from .group import Representation, Splitting, commutator, evaluate, invert
from .proj3 import (
    KLEIN_FORM,
    ProjectiveMap,
    eigen_hyperbolic,
    half_turn,
    hilbert_length,
    klein_boost,
    lorentz_product,
    normalize_det1,
    preserves_form,
    rotation,
)

logger = logging.getLogger(__name__)

PINGPONG_SHRINK = 0.9

# (X, Y, Z) = (x^2, xy, y^2)  ->  (u, v, w) with u^2 + v^2 - w^2 = Y^2 - XZ
KLEIN_FRAME = np.array([
    [0.5, 0.0, -0.5],
    [0.0, 1.0, 0.0],
    [0.5, 0.0, 0.5],
])
KLEIN_FRAME_INV = np.array([
    [1.0, 0.0, 1.0],
    [0.0, 1.0, 0.0],
    [-1.0, 0.0, 1.0],
])


@dataclass(frozen=True)
class PantsParams:
    l1: float
    l2: float
    l3: float

    def __post_init__(self):
        if min(self.l1, self.l2, self.l3) <= 0:
            raise ValueError('Pants boundary lengths must be positive')


# ==================== 2x2 TO 3x3 ====================

def sym2(a):
    """Symmetric square of a 2x2 matrix, acting on (x^2, xy, y^2)"""
    (p, q), (r, s) = np.asarray(a, dtype=float)
    return np.array([
        [p * p, 2 * p * q, q * q],
        [p * r, p * s + q * r, q * s],
        [r * r, 2 * r * s, s * s],
    ])


def embed_sl2(a):
    """SL(2,R) into the isometries of the Klein disc"""
    return normalize_det1(KLEIN_FRAME @ sym2(a) @ KLEIN_FRAME_INV)


def sl2_log_eigenvalue(a):
    """log of the top eigenvalue modulus of a hyperbolic 2x2 matrix"""
    t = abs(float(np.trace(a)))
    if t <= 2.0:
        raise NotHyperbolic(f'|trace| {t:.6g} <= 2')
    return math.acosh(t / 2.0)


def sl2_translation_length(a):
    return 2.0 * sl2_log_eigenvalue(a)


def sl2_from_traces(x, y, z):
    """
    A = diag(mu, 1/mu), B with tr A = x, tr B = y, tr AB = z.
    Needs |x| > 2.
    """
    if x <= 2.0:
        raise NotHyperbolic(f'trace {x:.6g} of the first generator must exceed 2')
    mu = (x + math.sqrt(x * x - 4.0)) / 2.0
    a = np.diag([mu, 1.0 / mu])
    p = (z - y / mu) / (mu - 1.0 / mu)
    s = y - p
    off = p * s - 1.0
    if abs(off) < 1e-12:
        raise DegenerateMatrix('Trace triple gives a reducible pair')
    q = math.sqrt(abs(off))
    r = off / q
    return a, np.array([[p, q], [r, s]])


def _from_sl2(name_pairs, relators=(), splitting=None):
    gens = [n for n, _ in name_pairs]
    mats = [m for _, m in name_pairs]
    return Representation(
        gens=gens,
        images=[embed_sl2(m) for m in mats],
        relators=list(relators),
        splitting=splitting,
        sl2=mats,
    )


# ==================== FUCHSIAN SEEDS ====================

def fuchsian_pants(params):
    """Free group <a, b> whose boundary curves a, b, (ab)^-1 have lengths l1, l2, l3"""
    x = 2.0 * math.cosh(params.l1 / 2.0)
    y = 2.0 * math.cosh(params.l2 / 2.0)
    z = -2.0 * math.cosh(params.l3 / 2.0)
    a, b = sl2_from_traces(x, y, z)
    rep = _from_sl2([('a', a), ('b', b)])
    logger.info('Fuchsian pants (%.6g, %.6g, %.6g)', params.l1, params.l2, params.l3)
    return rep.validate()


def fuchsian_torus(x=3.0, y=3.0, z=3.0):
    """Once-punctured torus: tr[A, B] = x^2 + y^2 + z^2 - xyz - 2 = -2 for (3, 3, 3)"""
    a, b = sl2_from_traces(x, y, z)
    return _from_sl2([('a', a), ('b', b)]).validate()


def punctured_torus_hnn(base):
    """HNN annotation with gamma = a and stable letter b"""
    if base.rank != 2:
        raise UnknownGenerator(f'HNN seed needs two generators, got {base.rank}')
    try:
        eigen_hyperbolic(base.images[0])
    except NotHyperbolic as exc:
        raise NotHyperbolic(f'Generator {base.gens[0]} is not hyperbolic: {exc}', generator=base.gens[0]) from exc
    rep = Representation(
        gens=list(base.gens),
        images=list(base.images),
        relators=list(base.relators),
        splitting=Splitting(kind='hnn', gamma=(1,), left_gens=(1,), stable_letter=2),
        certificate=base.certificate,
        sl2=base.sl2,
    )
    return rep.validate()


def double_pants(params):
    """
    Four-holed sphere: the pants glued to its image under a half-turn about
    a point of the axis of ab. Free of rank 3 on a, b, c = h a h^-1, with the
    amalgam splitting along ab.
    """
    pants = fuchsian_pants(params)
    gamma = evaluate(pants, (1, 2))
    spec = eigen_hyperbolic(gamma, inverse=evaluate(pants, (-2, -1)))
    u_plus = spec.fixed_attract.coords / spec.fixed_attract.coords[2]
    u_minus = spec.fixed_repel.coords / spec.fixed_repel.coords[2]
    h = half_turn(u_plus + u_minus)
    c = normalize_det1((h @ pants.images[0] @ h.inverse()).entries)
    rep = Representation(
        gens=['a', 'b', 'c'],
        images=[pants.images[0], pants.images[1], c],
        splitting=Splitting(kind='amalgam', gamma=(1, 2), left_gens=(1, 2), right_gens=(3,)),
    )
    return rep.validate()


def genus2_octagon():
    """
    Closed genus-2 surface group from the regular octagon with angles pi/4.
    Side pairings are half-turns about edge midpoints composed with a
    quarter turn; the single relator is [a1, b1][a2, b2].
    """
    inradius = math.acosh(1.0 / math.tan(math.pi / 8.0))
    quarter = rotation(-math.pi / 2.0)

    def pairing(k):
        theta = k * math.pi / 4.0
        midpoint = np.array([
            math.sinh(inradius) * math.cos(theta),
            math.sinh(inradius) * math.sin(theta),
            math.cosh(inradius),
        ])
        return half_turn(midpoint) @ quarter

    big_a1, big_b1, big_a2, big_b2 = pairing(0), pairing(1), pairing(4), pairing(5)
    images = [big_b1.inverse(), big_a1, big_b2.inverse(), big_a2]
    relator = commutator((1,), (2,)) + commutator((3,), (4,))
    rep = Representation(
        gens=['a1', 'b1', 'a2', 'b2'],
        images=images,
        relators=[relator],
        splitting=Splitting(
            kind='amalgam', gamma=commutator((1,), (2,)), left_gens=(1, 2), right_gens=(3, 4)),
    )
    return rep.validate()


# ==================== SCHOTTKY PAIRS ====================

def _axis(matrix):
    spec = eigen_hyperbolic(matrix)
    u_plus = spec.fixed_attract.coords / spec.fixed_attract.coords[2]
    u_minus = spec.fixed_repel.coords / spec.fixed_repel.coords[2]
    return u_plus, u_minus, 0.5 * math.log(spec.lambda1 / spec.lambda3)


def _angle(vec):
    return math.atan2(vec[1] / vec[2], vec[0] / vec[2]) % (2.0 * math.pi)


def _arc_containing(end1, end2, target):
    """Counterclockwise arc (start, width) between two boundary angles containing target"""
    width = (end2 - end1) % (2.0 * math.pi)
    if (target - end1) % (2.0 * math.pi) < width:
        return end1, width
    return end2, 2.0 * math.pi - width


def _arcs_disjoint(a, b):
    two_pi = 2.0 * math.pi
    return (b[0] - a[0]) % two_pi > a[1] and (a[0] - b[0]) % two_pi > b[1]


def _perpendicular_arc(u_plus, u_minus, tau, side_point):
    """Boundary arc cut off by the geodesic perpendicular to the axis at parameter tau"""
    m = math.exp(tau) * u_plus + math.exp(-tau) * u_minus
    pole = KLEIN_FORM @ np.cross(u_plus, u_minus)
    c = math.sqrt(-lorentz_product(m, m) / lorentz_product(pole, pole))
    return _arc_containing(_angle(m + c * pole), _angle(m - c * pole), _angle(side_point))


def pingpong_arcs(matrix, shift):
    """Attracting and repelling arcs of a conic-preserving translation, base point shifted along the axis"""
    u_plus, u_minus, length = _axis(matrix)
    return (
        _perpendicular_arc(u_plus, u_minus, shift + length / 2.0, u_plus),
        _perpendicular_arc(u_plus, u_minus, shift - length / 2.0, u_minus),
    )


def _symmetric_basis():
    basis = []
    for i in range(3):
        for j in range(i, 3):
            e = np.zeros((3, 3))
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
    return basis


def common_conic(first, second, tol=1e-9):
    """Unique (up to scale) form J of signature (2, 1) with g^T J g = J for both maps, or None"""
    basis = _symmetric_basis()
    system = np.column_stack([
        np.concatenate([(g.entries.T @ e @ g.entries - e).ravel() for g in (first, second)])
        for e in basis
    ])
    _, sv, vt = np.linalg.svd(system)
    if sv[-1] > tol * sv[0] or sv[-2] <= math.sqrt(tol) * sv[0]:
        return None
    form = sum(c * e for c, e in zip(vt[-1], basis))
    w = np.linalg.eigvalsh(form)
    if np.sum(w > 0) == 1:
        form, w = -form, -w[::-1]
    if np.sum(w > 0) != 2 or np.min(np.abs(w)) <= tol * np.max(np.abs(w)):
        return None
    return form


def klein_frame(form):
    """C with C^T J C = KLEIN_FORM and det C > 0"""
    w, v = np.linalg.eigh(form)
    order = np.argsort(-w)
    frame = v[:, order] / np.sqrt(np.abs(w[order]))[None, :]
    if np.linalg.det(frame) < 0:
        frame[:, 0] = -frame[:, 0]
    return frame


def _certify_arcs(first, second, depth):
    lengths = [_axis(g)[2] for g in (first, second)]
    n = 2 ** depth + 1
    shifts = [np.linspace(-ell, ell, n) for ell in lengths]
    for s1 in shifts[0]:
        arcs1 = pingpong_arcs(first, s1)
        for s2 in shifts[1]:
            arcs = arcs1 + pingpong_arcs(second, s2)
            if all(_arcs_disjoint(arcs[i], arcs[j]) for i in range(4) for j in range(i + 1, 4)):
                return {
                    'kind': 'ping-pong',
                    'method': 'arcs',
                    'depth': depth,
                    'shifts': [float(s1), float(s2)],
                    'arcs': [[float(a), float(w)] for a, w in arcs],
                }
    raise PingPongFailed(f'No disjoint ping-pong arcs found at depth {depth}')


def _line_angle(u, v):
    cos = abs(float(u @ v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    return math.acos(min(1.0, cos))


def _cap_boundary(centre, radius, samples):
    centre = centre / np.linalg.norm(centre)
    _, _, vt = np.linalg.svd(centre[None, :])
    p, q = vt[1], vt[2]
    theta = 2.0 * np.pi * np.arange(samples) / samples
    ring = np.cos(theta)[:, None] * p + np.sin(theta)[:, None] * q
    return math.cos(radius) * centre + math.sin(radius) * ring


def _cap_letters(first, second):
    """(matrix, attracting direction) for a, a^-1, b, b^-1"""
    letters = []
    for g in (first, second):
        inverse = g.inverse()
        spec = eigen_hyperbolic(g, inverse=inverse)
        letters.append((g.entries, spec.vectors[:, 0]))
        letters.append((inverse.entries, spec.vectors[:, 2]))
    return letters


def _certify_caps(first, second, depth):
    """
    Caps of lines of one radius around the attracting fixed point of each
    letter x, such that x maps every cap but that of x^-1 well inside its own.
    Cap boundaries are sampled at 8 * 2^depth points.
    """
    letters = _cap_letters(first, second)
    gap = min(_line_angle(letters[i][1], letters[j][1]) for i in range(4) for j in range(i + 1, 4))
    if gap <= 1e-9:
        raise PingPongFailed('Attracting fixed points of the letters are not separated')
    n = 2 ** depth + 1
    samples = 8 * 2 ** depth
    for radius in 0.5 * gap * np.arange(1, n + 1) / (n + 1):
        rings = [_cap_boundary(centre, radius, samples) for _, centre in letters]
        ok = True
        for x, (matrix, centre) in enumerate(letters):
            for y, ring in enumerate(rings):
                if y == x ^ 1:
                    continue
                image = ring @ matrix.T
                cos = np.abs(image @ centre) / (np.linalg.norm(image, axis=1) * np.linalg.norm(centre))
                if np.min(cos) < math.cos(PINGPONG_SHRINK * radius):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return {
                'kind': 'ping-pong',
                'method': 'caps',
                'depth': depth,
                'radius': float(radius),
                'centres': [(c / np.linalg.norm(c)).tolist() for _, c in letters],
            }
    raise PingPongFailed(f'No ping-pong caps found at depth {depth}')


def certify_pingpong(first, second, depth=None):
    """
    Ping-pong certificate for a pair of hyperbolic maps. A pair with a common
    invariant conic is moved to the Klein frame and certified by disjoint
    boundary arcs, searching 2^depth + 1 base-point shifts per generator;
    any other pair is certified by nested caps of lines.
    """
    depth = geo_setting('PINGPONG_DEPTH') if depth is None else depth
    if preserves_form(first) and preserves_form(second):
        return _certify_arcs(first, second, depth)
    form = common_conic(first, second)
    if form is None:
        return _certify_caps(first, second, depth)
    frame = klein_frame(form)
    moved = [ProjectiveMap(np.linalg.solve(frame, g.entries @ frame)) for g in (first, second)]
    certificate = _certify_arcs(*moved, depth)
    certificate['frame'] = frame.tolist()
    return certificate


def schottky_pair(first, second, depth=None):
    """Free group on two hyperbolic maps, certified discrete by ping-pong"""
    for name, g in (('a', first), ('b', second)):
        try:
            eigen_hyperbolic(g)
        except NotHyperbolic as exc:
            raise NotHyperbolic(f'Generator {name} is not hyperbolic: {exc}', generator=name) from exc
    certificate = certify_pingpong(first, second, depth)
    logger.info('Ping-pong certified by %s at depth %d', certificate['method'], certificate['depth'])
    return Representation(
        gens=['a', 'b'],
        images=[first, second],
        splitting=Splitting(kind='hnn', gamma=(1,), left_gens=(1,), stable_letter=2),
        certificate=certificate,
    )


def schottky_crossing(length):
    """Translations of the given length along the two coordinate diameters"""
    return schottky_pair(klein_boost(length), klein_boost(length, angle=math.pi / 2.0))


# ==================== FILES AND SPECS ====================

def load_representation(path):
    from .schemas import RepresentationSchema

    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except OSError as exc:
        raise IoFailure(f'Cannot read representation {path}: {exc.strerror or exc}') from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f'Malformed representation {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}') from exc
    try:
        loaded = RepresentationSchema().load(data)
    except ValidationError as exc:
        raise ConfigError(f'Invalid representation {path}: {exc.messages}', fields=exc.messages) from exc
    return representation_from_dict(loaded)


def representation_from_dict(data):
    return Representation.from_json(data).validate()


def dump_representation(rep, path):
    try:
        Path(path).write_text(json.dumps(rep.to_json(), indent=2) + '\n', encoding='utf-8')
    except OSError as exc:
        raise IoFailure(f'Cannot write representation {path}: {exc.strerror or exc}') from exc


def from_spec(text, split='native'):
    """Build a representation from a --rep value and a --split mode"""
    kind, _, arg = text.partition(':')
    if kind == 'pants':
        try:
            l1, l2, l3 = (float(v) for v in arg.split(','))
        except ValueError as exc:
            raise UnknownGenerator(f'pants needs three lengths, got {arg!r}') from exc
        params = PantsParams(l1, l2, l3)
        rep = double_pants(params) if split == 'amalgam-demo' else fuchsian_pants(params)
    elif kind == 'torus':
        rep = punctured_torus_hnn(fuchsian_torus())
    elif kind == 'genus2':
        rep = genus2_octagon()
    elif kind == 'schottky':
        rep = schottky_crossing(float(arg or 3.0))
    elif kind == 'file':
        rep = load_representation(arg)
    else:
        raise UnknownGenerator(f'Unknown representation spec {text!r}')

    if split == 'hnn-demo':
        rep = punctured_torus_hnn(rep)
    elif split == 'none':
        rep = rep.with_images(list(rep.images), splitting=None, sl2=rep.sl2)
    elif split == 'amalgam-demo' and kind != 'pants' and (rep.splitting is None or rep.splitting.kind != 'amalgam'):
        raise UnknownGenerator(f'amalgam-demo is not available for {kind}')
    return rep


def boundary_lengths(rep):
    """Hilbert lengths of a, b and ab for a rank-2 seed"""
    return tuple(
        hilbert_length(evaluate(rep, w), inverse=evaluate(rep, invert(w)))
        for w in ((1,), (2,), (1, 2))
    )
