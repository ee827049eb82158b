"""
HilbertLab - Counting bounds
Exact big-integer upper bounds on the number of closed geodesics of
length <= T once every crossing of the splitting curve costs at least Cr,
and the entropy bound they imply.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .conf import geo_setting
from .exceptions import ConfigError, InfeasibleM, NotConverged

logger = logging.getLogger(__name__)

LOOPS_PER_CROSSING = 18
SEGMENTS_PER_EULER = 24  # oriented crossing segments: 12(2g-2) = 24g-24


@dataclass(frozen=True)
class BoundParams:
    g: int
    Cr: float
    L: float
    s_extra: float = 0.0

    def __post_init__(self):
        if int(self.g) != self.g or self.g < 2:
            raise ConfigError(f'Genus must be an integer >= 2, got {self.g}')
        object.__setattr__(self, 'g', int(self.g))
        if not self.Cr > 0:
            raise ConfigError(f'Cr must be positive, got {self.Cr}')
        if not self.L > 0:
            raise ConfigError(f'L must be positive, got {self.L}')
        if not self.s_extra >= 0:
            raise ConfigError(f's_extra must be non-negative, got {self.s_extra}')

    @property
    def per_crossing(self):
        """Exact length charged to each crossing"""
        return Fraction(self.Cr) + Fraction(self.s_extra)

    @property
    def base(self):
        return LOOPS_PER_CROSSING * SEGMENTS_PER_EULER * (self.g - 1)


def ordered_partitions(m, k):
    """Non-negative integer solutions of x_1 + ... + x_m = k"""
    if m < 1 or k < 0:
        raise ValueError('need m >= 1 and k >= 0')
    return math.comb(m + k - 1, k)


def _max_k(m, T, p):
    slack = Fraction(T) - m * p.per_crossing
    if slack < 0:
        raise InfeasibleM(f'{m} crossings need length {float(m * p.per_crossing):g} > T = {T:g}')
    return math.floor(slack / Fraction(p.L))


def f_bound(m, T, p):
    """sum_{k <= (T - m Cr)/L} C(m+k-1, k), summed in closed form to C(m+K, K)"""
    K = _max_k(m, T, p)
    return math.comb(m + K, K)


def f_bound_direct(m, T, p):
    K = _max_k(m, T, p)
    return sum(ordered_partitions(m, k) for k in range(K + 1))


def max_crossings(T, p):
    return math.floor(Fraction(T) / p.per_crossing)


def count_bound(T, p):
    """(432g - 432)^M sum_{m=1}^{M} f(m, T) with M = floor(T / Cr)"""
    M = max_crossings(T, p)
    if M < 1:
        raise InfeasibleM(f'T = {T:g} admits no crossing of length {float(p.per_crossing):g}')
    return p.base ** M * sum(f_bound(m, T, p) for m in range(1, M + 1))


def count_bound_direct(T, p):
    M = max_crossings(T, p)
    if M < 1:
        raise InfeasibleM(f'T = {T:g} admits no crossing of length {float(p.per_crossing):g}')
    total = 0
    for m in range(1, M + 1):
        total += f_bound_direct(m, T, p)
    power = 1
    for _ in range(M):
        power *= p.base
    return power * total


def log_big(n):
    """Natural log of a positive integer of any size"""
    if n <= 0:
        raise ValueError('log_big needs a positive integer')
    shift = max(0, n.bit_length() - 53)
    return math.log(n >> shift) + shift * math.log(2.0)


def stirling_log_binomial(M, q):
    """(M+q) log(M+q) - M log M - q log q, the leading term of log C(M+q, q)"""
    def xlogx(x):
        return x * math.log(x) if x > 0 else 0.0
    return xlogx(M + q) - xlogx(M) - xlogx(q)


def crossing_term(p):
    """Contribution of the loop count alone: log(432g - 432) / Cr"""
    return math.log(p.base) / p.Cr


# ==================== ENTROPY BOUND ====================

def _extrapolate(ts, values):
    """Solve v = v_inf + c1 log(T)/T + c2/T through three points"""
    a = np.array([[1.0, math.log(t) / t, 1.0 / t] for t in ts])
    return float(np.linalg.solve(a, np.asarray(values, dtype=float))[0])


def bound_curve(p, T_grid):
    """(T, count_bound, log(count_bound)/T) per grid point"""
    rows = []
    for T in T_grid:
        bound = count_bound(T, p)
        rows.append((float(T), bound, log_big(bound) / float(T)))
    return rows


def entropy_bound(p, T_grid, tol=None, rows=None):
    """Extrapolated limit of log(count_bound(T))/T"""
    tol = geo_setting('CONVERGE_TOL') if tol is None else tol
    T_grid = [float(T) for T in T_grid]
    if len(T_grid) < 3 or any(b <= a for a, b in zip(T_grid, T_grid[1:])):
        raise ConfigError('T_grid needs at least three increasing values')
    rows = rows or bound_curve(p, T_grid)
    values = [r[2] for r in rows]

    step = abs(values[-1] - values[-2])
    if step >= tol:
        raise NotConverged(f'log bound / T still moves by {step:.3g} at T = {T_grid[-1]:g}', step=step)
    limit = _extrapolate(T_grid[-3:], values[-3:])
    logger.info('entropy_bound g=%d Cr=%g L=%g: %.6g (last step %.3g)', p.g, p.Cr, p.L, limit, step)
    return limit


@dataclass(frozen=True)
class BoundReport:
    params: BoundParams
    rows: list
    entropy_bound: float
    M_s: int
    q_s: int
    crossing_term: float

    def to_json(self):
        return {
            'params': {'g': self.params.g, 'Cr': self.params.Cr, 'L': self.params.L, 's_extra': self.params.s_extra},
            'entropy_bound': self.entropy_bound,
            'M_s': self.M_s,
            'q_s': self.q_s,
            'crossing_term': self.crossing_term,
            'log_bound_over_T': [r[2] for r in self.rows],
            'T': [r[0] for r in self.rows],
        }


def dominant_term(T, p):
    """Crossing count m maximizing f(m, T), and its pants-curve count k"""
    best_m, best_f = 1, -1
    for m in range(1, max_crossings(T, p) + 1):
        f = f_bound(m, T, p)
        if f > best_f:
            best_m, best_f = m, f
    return best_m, _max_k(best_m, T, p)


def bound_report(p, T_grid, tol=None):
    rows = bound_curve(p, T_grid)
    limit = entropy_bound(p, T_grid, tol=tol, rows=rows)
    M_s, q_s = dominant_term(T_grid[-1], p)
    return BoundReport(p, rows, limit, M_s, q_s, crossing_term(p))


def census_dominated(census, p):
    """(T, N(T), count_bound(T)) at every census length where the bound fails"""
    from .entropy import counting_function

    violations = []
    for T in np.unique(census.lengths):
        if Fraction(float(T)) < p.per_crossing:
            continue
        n = counting_function(census, T)
        bound = count_bound(float(T), p)
        if n > bound:
            violations.append((float(T), n, bound))
    if violations:
        logger.warning('census_dominated: %d lengths exceed the bound', len(violations))
    return violations
