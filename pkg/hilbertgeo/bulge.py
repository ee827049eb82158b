"""
HilbertLab - Bulging and earthquake deformations
The eigenframe of the splitting curve, the one-parameter groups O_s and
tau_t, and the deformed representations they produce.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .conf import geo_setting
from .exceptions import ConfigError, DegenerateMatrix, NoSplitting, NotHyperbolic
from .group import evaluate, invert
from .proj3 import HyperbolicSpectrum, ProjectiveMap, eigen_hyperbolic, hilbert_length

logger = logging.getLogger(__name__)

FRAME_RESIDUAL = 1e-8


@dataclass(frozen=True, eq=False)
class BulgeFrame:
    """Columns of basis are the attracting, neutral and repelling eigenvectors"""
    basis: ProjectiveMap
    inverse: ProjectiveMap
    spectrum: HyperbolicSpectrum

    def to_frame(self, matrix):
        return self.inverse.entries @ matrix.entries @ self.basis.entries

    def from_frame(self, entries):
        return ProjectiveMap(self.basis.entries @ entries @ self.inverse.entries)


def bulge_frame(rep, gamma):
    """Eigenframe of rho(gamma), scaled to determinant 1"""
    gamma = tuple(gamma)
    matrix = evaluate(rep, gamma)
    spec = eigen_hyperbolic(matrix, inverse=evaluate(rep, invert(gamma)))

    basis = spec.vectors.copy()
    d = float(np.linalg.det(basis))
    if d < 0:
        basis[:, 1] = -basis[:, 1]
        d = -d
    basis = ProjectiveMap(basis / np.cbrt(d))
    frame = BulgeFrame(basis=basis, inverse=basis.inverse(), spectrum=spec)

    in_frame = frame.to_frame(matrix)
    off_diagonal = in_frame - np.diag(np.diag(in_frame))
    residual = float(np.max(np.abs(off_diagonal)))
    scale = max(1.0, float(np.max(np.abs(np.diag(in_frame)))))
    if residual > FRAME_RESIDUAL * scale:
        raise NotHyperbolic(f'Eigenframe residual {residual:.3g} for {rep.label(gamma)}')
    return frame


# ==================== ONE-PARAMETER GROUPS ====================

def _exponents(t, s):
    return np.array([t - s / 3.0, 2.0 * s / 3.0, -t - s / 3.0])


def _diag_map(frame, exponents):
    return frame.from_frame(np.diag(np.exp(exponents)))


def o_s(frame, s):
    """P diag(e^{-s/3}, e^{2s/3}, e^{-s/3}) P^-1"""
    return _diag_map(frame, _exponents(0.0, s))


def tau_t(frame, t):
    """P diag(e^t, 1, e^{-t}) P^-1"""
    return _diag_map(frame, _exponents(t, 0.0))


def in_frame_pattern(alpha, s, t=0.0):
    """Entries of D alpha D^-1 for D = tau_t O_s, alpha given in the eigenframe"""
    e = _exponents(t, s)
    return np.asarray(alpha, dtype=float) * np.exp(e[:, None] - e[None, :])


def limit_action(alpha, sign):
    """
    Projective limit of O_s alpha O_s^-1 as s -> +inf (sign > 0) or -inf.
    Only the middle row (s -> +inf) or middle column (s -> -inf) survives.
    """
    alpha = np.asarray(alpha, dtype=float)
    limit = np.zeros((3, 3))
    if sign > 0:
        limit[1, [0, 2]] = alpha[1, [0, 2]]
    else:
        limit[[0, 2], 1] = alpha[[0, 2], 1]
    peak = float(np.max(np.abs(limit)))
    if peak == 0.0:
        raise DegenerateMatrix('Conjugates stay bounded; no degenerate limit')
    return limit / peak


# ==================== DEFORMATIONS ====================

def _check_s(s, max_abs_s):
    max_abs_s = geo_setting('MAX_ABS_S') if max_abs_s is None else max_abs_s
    if abs(s) > max_abs_s:
        raise ConfigError(f'|s| = {abs(s):g} exceeds the cap {max_abs_s:g}')


def deform(rep, t, s, side=None, max_abs_s=None):
    """
    rho_{t,s}: conjugate the right side of an amalgam by tau_t O_s, or
    left-multiply the HNN stable letter by it. side='left' gives the
    conjugate view that moves the left side by the inverse instead.

    Images and their inverses are deformed in the eigenframe of gamma and
    the result keeps that frame, so products never leave it until the end.
    """
    side = geo_setting('SIDE') if side is None else side
    if side not in ('left', 'right'):
        raise ConfigError(f'side must be left or right, got {side!r}')
    if rep.splitting is None:
        raise NoSplitting('Representation has no splitting annotation')
    _check_s(s, max_abs_s)

    sp = rep.splitting
    if rep.frame is not None:
        frame = rep.frame
        local = list(rep.local_images)
        local_inv = list(rep.local_inverses)
    else:
        if t == 0 and s == 0:
            return rep.with_images(list(rep.images))
        frame = bulge_frame(rep, sp.gamma)
        local = [frame.to_frame(m) for m in rep.images]
        local_inv = [frame.to_frame(rep.image(-g)) for g in range(1, rep.rank + 1)]

    e = _exponents(t, s)
    sandwich = np.exp(e[:, None] - e[None, :])
    images = list(rep.images)

    if sp.kind == 'amalgam':
        moved = sp.right_gens if side == 'right' else sp.left_gens
        factor = sandwich if side == 'right' else 1.0 / sandwich
        for g in moved:
            local[g - 1] = local[g - 1] * factor
            local_inv[g - 1] = local_inv[g - 1] * factor
    else:
        idx = sp.stable_letter - 1
        moved = [sp.stable_letter]
        if side == 'right':
            local[idx] = np.exp(e)[:, None] * local[idx]
            local_inv[idx] = local_inv[idx] * np.exp(-e)[None, :]
        else:
            local[idx] = local[idx] * np.exp(e)[None, :]
            local_inv[idx] = np.exp(-e)[:, None] * local_inv[idx]
    for g in moved:
        images[g - 1] = frame.from_frame(local[g - 1])

    logger.debug('deform t=%g s=%g side=%s', t, s, side)
    return rep.with_images(images, frame=frame, local_images=local, local_inverses=local_inv)


# ==================== TRACE PROBE ====================

@dataclass(frozen=True)
class TraceRow:
    s: float
    trace: float
    hilbert_length: float


@dataclass(frozen=True)
class TraceProbe:
    rows: list
    rate: float
    rate_stderr: float


def _side_of(rep, word):
    letters = {abs(l) for l in word}
    sp = rep.splitting
    if sp.kind == 'amalgam':
        if letters <= set(sp.left_gens):
            return 'left'
        if letters <= set(sp.right_gens) | {abs(l) for l in sp.gamma}:
            return 'right'
        return 'mixed'
    return 'stable' if sp.stable_letter in letters else 'left'


def trace_probe(rep, alpha, beta, s_grid, t=0.0, side=None, max_abs_s=None):
    """Trace and Hilbert length of rho_s(alpha beta) over s, with the fitted growth rate of |trace|"""
    if rep.splitting is None:
        raise NoSplitting('Representation has no splitting annotation')
    alpha, beta = tuple(alpha), tuple(beta)
    if rep.splitting.kind == 'amalgam':
        if _side_of(rep, alpha) != 'left' or _side_of(rep, beta) != 'right':
            raise NoSplitting('alpha must lie on the left side and beta on the right side')
    elif _side_of(rep, alpha + beta) != 'stable':
        raise NoSplitting('The probed word must contain the stable letter')

    word = alpha + beta
    rows = []
    for s in sorted(s_grid):
        deformed = deform(rep, t, s, side=side, max_abs_s=max_abs_s)
        m = evaluate(deformed, word)
        length = hilbert_length(m, inverse=evaluate(deformed, invert(word)))
        rows.append(TraceRow(float(s), m.trace(), length))

    top = rows[len(rows) // 2:]
    rate, rate_stderr = math.nan, math.nan
    if len(top) >= 2:
        fit = stats.linregress([r.s for r in top], [math.log(abs(r.trace)) for r in top])
        rate, rate_stderr = float(fit.slope), float(fit.stderr)
    logger.info('trace_probe %s: rate %.4f', rep.label(word), rate)
    return TraceProbe(rows=rows, rate=rate, rate_stderr=rate_stderr)
