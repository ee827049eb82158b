"""
HilbertLab - Entropy estimation
Closed-geodesic census by Hilbert length, the counting function N(T),
growth-rate fitting, orbital counting and the bulging sweep.
"""

import bisect
import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np
import pandas as pd
from scipy import stats

from . import conf
from .bulge import deform
from .conf import geo_setting
from .exceptions import ConfigError, HilbertGeoError, InsufficientData, NoSplitting, NotHyperbolic
from .group import enumerate_classes, evaluate, invert, orbit_ball, word_key
from .hilbert import distances_from, hausdorff_distance
from .limitset import choose_chart, circumscribed_domain, domain_hull, from_chart, limit_points, to_chart
from .proj3 import eigen_hyperbolic, hilbert_length, quantized_keys

logger = logging.getLogger(__name__)

TAIL_EXCLUDED = 0.1
MIN_FIT_POINTS = 10
SWEEP_COLUMNS = [
    's', 't', 'h_census', 'h_census_stderr', 'h_orbit', 'h_orbit_stderr',
    'trace_ab', 'length_ab', 'hausdorff_drift',
]


# ==================== CENSUS ====================

@dataclass(frozen=True)
class CensusEntry:
    label: str
    word: tuple
    hilbert_length: float

    @property
    def word_length(self):
        return len(self.word)


@dataclass
class Census:
    """Hilbert lengths of conjugacy classes (free groups) or group elements, ascending"""
    entries: list
    max_word_len: int
    oriented: bool = True
    kind: str = 'classes'
    skipped: int = 0
    lengths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.entries = sorted(self.entries, key=lambda e: (e.hilbert_length, word_key(e.word)))
        self.lengths = np.array([e.hilbert_length for e in self.entries], dtype=float)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def from_lengths(cls, lengths, max_word_len=0):
        entries = [CensusEntry(f'#{i}', (), float(v)) for i, v in enumerate(lengths)]
        return cls(entries, max_word_len, kind='lengths')

    def restrict(self, letters):
        """Sub-census of the entries whose words only use the given generators"""
        allowed = set(letters)
        kept = [e for e in self.entries if {abs(l) for l in e.word} <= allowed]
        return Census(kept, self.max_word_len, self.oriented, self.kind)

    def to_frame(self):
        return pd.DataFrame({
            'class': [e.label for e in self.entries],
            'word_length': [e.word_length for e in self.entries],
            'hilbert_length': self.lengths,
        })


def _lengths_chunk(task):
    rep, words = task
    out = []
    for word in words:
        try:
            out.append(hilbert_length(evaluate(rep, word), inverse=evaluate(rep, invert(word))))
        except NotHyperbolic:
            out.append(None)
    return out


def _class_lengths(rep, words, workers):
    if workers > 1 and len(words) > 1000:
        size = math.ceil(len(words) / workers)
        tasks = [(rep, words[i:i + size]) for i in range(0, len(words), size)]
        with Pool(processes=workers, initializer=conf.install, initargs=(conf.snapshot(),)) as pool:
            chunks = pool.map(_lengths_chunk, tasks)
        return [v for chunk in chunks for v in chunk]
    return _lengths_chunk((rep, words))


def census(rep, max_word_len=None, oriented=True, workers=None, budget=None):
    """
    Free groups: one Hilbert length per conjugacy class of word length
    <= max_word_len. Groups with relators: one length per distinct element
    of the word ball, a critical-exponent proxy.
    """
    max_word_len = int(geo_setting('MAX_WORD_LEN') if max_word_len is None else max_word_len)
    workers = int(geo_setting('WORKERS') if workers is None else workers)

    if not rep.relators:
        classes = enumerate_classes(rep.rank, max_word_len, unoriented=not oriented,
                                    budget=budget, workers=workers)
        words = [c.rep for c in classes]
        lengths = _class_lengths(rep, words, workers)
        kind = 'classes'
    else:
        words, lengths = _element_lengths(rep, max_word_len, oriented, budget)
        kind = 'elements'

    entries = []
    skipped = 0
    for word, length in zip(words, lengths):
        if length is None:
            skipped += 1
            continue
        entries.append(CensusEntry(rep.label(word), word, length))
    if skipped:
        logger.warning('census: skipped %d non-hyperbolic %s', skipped, kind)
    logger.info('census (%s, max_len %d, oriented=%s): %d entries', kind, max_word_len, oriented, len(entries))
    return Census(entries, max_word_len, oriented, kind, skipped)


def _element_lengths(rep, radius, oriented, budget):
    words, lengths = [], []
    inverse_keys = set()
    quantum = geo_setting('HASH_QUANTUM')
    for word, matrix, inverse in orbit_ball(rep, radius, budget=budget, with_inverse=True):
        if not word:
            continue
        if not oriented:
            keys = quantized_keys(matrix.entries / np.max(np.abs(matrix.entries)), quantum)
            if any(k in inverse_keys for k in keys):
                continue
            inverse_keys.update(quantized_keys(inverse.entries / np.max(np.abs(inverse.entries)), quantum))
        words.append(word)
        try:
            lengths.append(eigen_hyperbolic(matrix, inverse=inverse).hilbert_length)
        except NotHyperbolic:
            lengths.append(None)
    return words, lengths


def counting_function(c, T):
    """N(T) = #{entries with length <= T}"""
    if T <= 0:
        return 0
    return bisect.bisect_right(c.lengths, T * (1.0 + 1e-12) + 1e-12)


def counts_table(c):
    """Distinct lengths with N(T) at each"""
    values, idx = np.unique(c.lengths, return_index=True)
    counts = np.append(idx[1:], len(c.lengths))
    return pd.DataFrame({'T': values, 'count': counts})


def dump_counts(c, path):
    from .runlog import write_csv

    return write_csv(counts_table(c), path)


# ==================== FITTING ====================

@dataclass(frozen=True)
class EntropyEstimate:
    h: float
    stderr: float
    fit_window: tuple
    r_squared: float
    n_points: int
    skipped: int = 0

    def to_json(self):
        return {
            'h': self.h,
            'stderr': self.stderr,
            'fit_window': list(self.fit_window),
            'r_squared': self.r_squared,
            'n_points': self.n_points,
            'skipped': self.skipped,
        }


def _window_fraction(window_fraction):
    window_fraction = geo_setting('WINDOW_FRACTION') if window_fraction is None else window_fraction
    if not TAIL_EXCLUDED < window_fraction < 1.0:
        raise ConfigError(f'window_fraction must lie in ({TAIL_EXCLUDED}, 1): the top {TAIL_EXCLUDED:g} '
                          f'of the range is never fitted, got {window_fraction}')
    return window_fraction


def _fit_growth(values, window_fraction, lo=None, cap=None, skipped=0):
    """Slope of log N(T) against T over the top window of the observed range"""
    window_fraction = _window_fraction(window_fraction)
    values = np.sort(np.asarray(values, dtype=float))
    if len(values) == 0:
        raise InsufficientData('No lengths to fit')

    lo = float(values[0]) if lo is None else lo
    hi = float(values[-1]) if cap is None else min(float(values[-1]), cap)
    span = hi - lo
    t_min = hi - window_fraction * span
    t_max = hi - TAIL_EXCLUDED * span

    distinct, idx = np.unique(values, return_index=True)
    counts = np.append(idx[1:], len(values))
    mask = (distinct >= t_min) & (distinct <= t_max)
    if mask.sum() < MIN_FIT_POINTS:
        raise InsufficientData(
            f'{int(mask.sum())} distinct lengths in [{t_min:.4g}, {t_max:.4g}], need {MIN_FIT_POINTS}')

    fit = stats.linregress(distinct[mask], np.log(counts[mask]))
    return EntropyEstimate(
        h=max(0.0, float(fit.slope)),
        stderr=float(fit.stderr),
        fit_window=(float(t_min), float(t_max)),
        r_squared=float(min(1.0, max(0.0, fit.rvalue ** 2))),
        n_points=int(mask.sum()),
        skipped=skipped,
    )


def fit_entropy(c, window_fraction=None):
    """Exponential growth rate of N(T) from a census"""
    est = _fit_growth(c.lengths, window_fraction, skipped=c.skipped)
    logger.info('fit_entropy: h=%.4f +/- %.4f over %s (%d points)', est.h, est.stderr, est.fit_window, est.n_points)
    return est


def _orbit_distances(dom, basepoint, coords, finite):
    dists = np.full(len(coords), np.nan)
    dists[finite] = distances_from(dom, basepoint, coords[finite])
    return dists


def orbit_exponent(rep, dom, basepoint, radius=None, window_fraction=None, budget=None):
    """
    Growth rate of #{g : d(o, g o) <= R} using the Hilbert distance of dom.

    When orbit points fall outside dom, the count moves to the polygon
    circumscribed by the supporting lines at the fixed points of the ball,
    which contains the whole orbit. The fit window is capped at the smallest
    displacement on the outermost word sphere, past which the ball undercounts.
    """
    radius = int(geo_setting('ORBIT_RADIUS') if radius is None else radius)
    basepoint = np.asarray(basepoint, dtype=float)
    elements = orbit_ball(rep, radius, budget=budget, with_inverse=True)

    origin = from_chart(dom.chart, basepoint)[0]
    images = np.array([m.entries @ origin for _, m, _ in elements])
    local = images @ np.linalg.inv(dom.chart.entries).T
    z = local[:, 2]
    finite = np.abs(z) > 1e-12 * np.linalg.norm(local, axis=1)
    coords = np.full((len(local), 2), np.nan)
    coords[finite] = local[finite, :2] / z[finite, None]

    dists = _orbit_distances(dom, basepoint, coords, finite)
    outside = int((finite & ~np.isfinite(dists)).sum())
    if outside:
        extent = max(1.0, float(np.max(np.abs(coords[finite] - basepoint))))
        counting = circumscribed_domain(
            [(m, inv) for w, m, inv in elements if w], dom.chart, basepoint, bound=10.0 * extent)
        logger.info('orbit_exponent: %d orbit points outside the domain, counting in a %d-gon around the orbit',
                    outside, len(counting))
        dists = _orbit_distances(counting, basepoint, coords, finite)

    valid = np.isfinite(dists)
    skipped = int((~valid).sum())
    if skipped:
        logger.warning('orbit_exponent: %d of %d orbit points could not be placed', skipped, len(dists))

    sphere = np.array([len(w) == radius for w, _, _ in elements])
    cap = float(np.min(dists[sphere & valid])) if (sphere & valid).any() else None
    if (sphere & ~valid).any():
        logger.warning('orbit_exponent: %d points of the radius-%d sphere left out of the cap',
                       int((sphere & ~valid).sum()), radius)
    try:
        est = _fit_growth(dists[valid], window_fraction, lo=0.0, cap=cap, skipped=skipped)
    except InsufficientData as exc:
        raise InsufficientData(
            f'{exc}; the radius-{radius} word sphere caps the fit window at {cap}', radius=radius, cap=cap) from exc
    logger.info('orbit_exponent radius %d: h=%.4f +/- %.4f (cap %s)', radius, est.h, est.stderr, cap)
    return est


# ==================== SWEEP ====================

def default_probe(rep):
    """A left word and a right (or stable) word for the splitting"""
    sp = rep.splitting
    if sp is None:
        raise NoSplitting('Representation has no splitting annotation')
    if sp.kind == 'amalgam':
        return (sp.left_gens[0],), (sp.right_gens[0],)
    return (sp.left_gens[0],), (sp.stable_letter,)


def basepoint_for(rep, chart):
    """Chart midpoint of the fixed points of the splitting curve"""
    gamma = rep.splitting.gamma
    spec = eigen_hyperbolic(evaluate(rep, gamma), inverse=evaluate(rep, invert(gamma)))
    ends = to_chart(chart, np.array([spec.fixed_attract.coords, spec.fixed_repel.coords]))
    return ends.mean(axis=0)


def sweep(rep, s_grid, t=0.0, side=None, max_word_len=None, radius=None, depth=None,
          alpha=None, beta=None, workers=None, window_fraction=None):
    """
    Per-s entropy estimates for rho_{t,s}. Failures of one estimator at
    one s leave NaN in that cell and are collected in df.attrs['errors'].
    """
    if rep.splitting is None:
        raise NoSplitting('Representation has no splitting annotation')
    depth = int(geo_setting('LIMITSET_DEPTH') if depth is None else depth)
    window_fraction = _window_fraction(window_fraction)
    if alpha is None or beta is None:
        alpha, beta = default_probe(rep)
    word = tuple(alpha) + tuple(beta)

    s_values = [float(s) for s in s_grid]
    deformed = [deform(rep, t, s, side=side) for s in s_values]
    samples = [limit_points(d, depth) for d in deformed]
    chart = choose_chart([p for sample in samples for p in sample.points])

    rows = []
    errors = []
    previous = None
    for s, rep_s, sample in zip(s_values, deformed, samples):
        row = dict.fromkeys(SWEEP_COLUMNS, math.nan)
        row['s'], row['t'] = s, float(t)

        m = evaluate(rep_s, word)
        row['trace_ab'] = m.trace()
        try:
            row['length_ab'] = hilbert_length(m, inverse=evaluate(rep_s, invert(word)))
        except NotHyperbolic as exc:
            errors.append({'s': s, 'stage': 'length_ab', 'error': str(exc)})

        try:
            est = fit_entropy(census(rep_s, max_word_len, workers=workers), window_fraction)
            row['h_census'], row['h_census_stderr'] = est.h, est.stderr
        except HilbertGeoError as exc:
            errors.append({'s': s, 'stage': 'census', 'error': str(exc)})

        hull = None
        try:
            hull = domain_hull(rep_s, depth, chart=chart, sample=sample)
            est = orbit_exponent(rep_s, hull, basepoint_for(rep_s, chart), radius, window_fraction)
            row['h_orbit'], row['h_orbit_stderr'] = est.h, est.stderr
        except HilbertGeoError as exc:
            errors.append({'s': s, 'stage': 'orbit', 'error': str(exc)})

        if hull is not None:
            row['hausdorff_drift'] = 0.0 if previous is None else hausdorff_distance(hull, previous)
            previous = hull
        rows.append(row)

    for err in errors:
        logger.warning('sweep s=%g %s failed: %s', err['s'], err['stage'], err['error'])
    df = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    df.attrs['errors'] = errors
    return df
