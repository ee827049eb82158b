"""
HilbertLab - Verification suites
Quick-scale property checks for every library module, run by the
verify command.
"""

import itertools
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from . import bounds, bulge, entropy, group, hilbert, limitset, proj3, reps
from .conf import geo_setting
from .exceptions import HilbertGeoError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    module: str
    name: str
    passed: bool
    detail: str
    seconds: float


def _random_sl3_hyperbolic(rng):
    while True:
        basis = rng.normal(size=(3, 3))
        if abs(np.linalg.det(basis)) > 0.1:
            break
    logs = np.sort(rng.uniform(-2.0, 2.0, size=3))[::-1]
    logs -= logs.mean()
    if logs[0] - logs[1] < 0.1 or logs[1] - logs[2] < 0.1:
        logs = np.array([1.0, 0.0, -1.0])
    m = basis @ np.diag(np.exp(logs)) @ np.linalg.inv(basis)
    return proj3.ProjectiveMap(m), logs


# ==================== CHECKS ====================

def check_eigen(rng):
    worst = 0.0
    for _ in range(50):
        m, logs = _random_sl3_hyperbolic(rng)
        spec = proj3.eigen_hyperbolic(m)
        got = np.log(spec.eigenvalues)
        worst = max(worst, float(np.max(np.abs(got - logs))))
    return worst < 1e-8, f'max log-eigenvalue error {worst:.2e}'


def check_cross_ratio_invariance(rng):
    worst = 0.0
    for _ in range(50):
        a, b = rng.normal(size=3), rng.normal(size=3)
        ts = np.sort(rng.uniform(0.1, 3.0, size=4))
        pts = [a + t * b for t in ts]
        m, _ = _random_sl3_hyperbolic(rng)
        before = proj3.cross_ratio(*pts)
        after = proj3.cross_ratio(*[m.entries @ p for p in pts])
        worst = max(worst, abs(after - before) / abs(before))
    return worst < 1e-8, f'max relative change {worst:.2e}'


def check_klein_agreement(rng):
    dom = hilbert.disc_polygon(geo_setting('POLYGON_SIDES'))
    worst = 0.0
    for _ in range(100):
        x, y = (_disc_point(rng, 0.9) for _ in range(2))
        worst = max(worst, abs(hilbert.distance(dom, x, y) - hilbert.klein_distance(x, y)))
    return worst < 1e-4, f'max |d_H - d_Klein| {worst:.2e}'


def _disc_point(rng, radius):
    r = radius * math.sqrt(rng.uniform())
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return np.array([r * math.cos(theta), r * math.sin(theta)])


def check_nested_monotonicity(rng):
    outer = hilbert.regular_polygon(7, radius=1.5, phase=0.3)
    inner = hilbert.regular_polygon(5, radius=1.0)
    violations = 0
    for _ in range(50):
        x, y = (_disc_point(rng, 0.7) for _ in range(2))
        if hilbert.distance(inner, x, y) < hilbert.distance(outer, x, y) - 1e-12:
            violations += 1
    return violations == 0, f'{violations} violations'


def check_class_enumeration(rng):
    n, max_len = 2, 4
    alphabet = [1, -1, 2, -2]
    brute = set()
    for length in range(1, max_len + 1):
        for word in itertools.product(alphabet, repeat=length):
            if group.reduce(word) == word and group.cyclic_reduce(word) == word:
                brute.add(group.canonical_class(word).rep)
    enumerated = [c.rep for c in group.enumerate_classes(n, max_len)]
    ok = set(enumerated) == brute and len(enumerated) == len(brute)
    return ok, f'{len(enumerated)} classes, brute force {len(brute)}'


def check_fuchsian_embedding(rng):
    rep = reps.fuchsian_pants(reps.PantsParams(2.0, 2.0, 2.0))
    worst = 0.0
    for image, mat in zip(rep.images, rep.sl2):
        worst = max(worst, abs(proj3.hilbert_length(image) - reps.sl2_translation_length(mat)))
    worst = max(worst, max(proj3.form_residual(m) for m in rep.images))
    return worst < 1e-9, f'max deviation {worst:.2e}'


def check_bulge_commutation(rng):
    worst = 0.0
    rep = reps.double_pants(reps.PantsParams(2.0, 2.0, 2.0))
    frame = bulge.bulge_frame(rep, rep.splitting.gamma)
    for _ in range(100):
        t, s = rng.uniform(-3.0, 3.0, size=2)
        lhs = bulge.tau_t(frame, t) @ bulge.o_s(frame, s)
        rhs = bulge.o_s(frame, s) @ bulge.tau_t(frame, t)
        worst = max(worst, lhs.max_abs_diff(rhs) / float(np.max(np.abs(lhs.entries))))
    return worst < 1e-10, f'max relative commutator {worst:.2e}'


def check_pure_side_invariance(rng):
    rep = reps.double_pants(reps.PantsParams(2.0, 2.0, 2.0))
    deformed = bulge.deform(rep, 0.0, 5.0)
    worst = 0.0
    for c in group.enumerate_classes(2, 4):
        before = proj3.hilbert_length(group.evaluate(rep, c.rep))
        after = proj3.hilbert_length(group.evaluate(deformed, c.rep))
        worst = max(worst, abs(after - before))
    return worst < 1e-9, f'max length change {worst:.2e}'


def check_conic_limit_set(rng):
    rep = reps.fuchsian_pants(reps.PantsParams(2.0, 2.0, 2.0))
    residual = limitset.conic_residual(limitset.limit_points(rep, 4))
    return residual < 1e-7, f'conic residual {residual:.2e}'


def check_planted_slope(rng):
    counts = np.arange(1, 4001)
    census = entropy.Census.from_lengths(np.log(counts) / 0.7)
    est = entropy.fit_entropy(census, 0.5)
    return abs(est.h - 0.7) < 0.01, f'h = {est.h:.4f}'


def check_counting_function(rng):
    rank_one = group.Representation(gens=['a'], images=[np.diag([math.e ** 2, 1.0, math.e ** -2])])
    census = entropy.census(rank_one, 3, workers=1)
    n = entropy.counting_function(census, 4.0)
    return n == 4 and len(census) == 6, f'N(4) = {n}, {len(census)} classes'


def check_partition_sums(rng):
    bad = 0
    for m in range(1, 7):
        for k in range(13):
            p = bounds.BoundParams(g=2, Cr=1.0, L=1.0)
            if bounds.f_bound(m, m + k, p) != bounds.f_bound_direct(m, m + k, p):
                bad += 1
    return bad == 0, f'{bad} mismatches'


def check_stirling(rng):
    exact = bounds.log_big(math.comb(2000, 1000))
    approx = bounds.stirling_log_binomial(1000, 1000)
    rel = abs(exact - approx) / exact
    return rel < 0.01, f'relative gap {rel:.2e}'


SUITES = [
    ('proj3', 'eigenvalues of random hyperbolic maps', check_eigen),
    ('proj3', 'cross-ratio projective invariance', check_cross_ratio_invariance),
    ('hilbert', 'Klein model agreement', check_klein_agreement),
    ('hilbert', 'nested domain monotonicity', check_nested_monotonicity),
    ('group', 'class enumeration vs brute force', check_class_enumeration),
    ('reps', 'Fuchsian embedding lengths', check_fuchsian_embedding),
    ('bulge', 'tau_t and O_s commute', check_bulge_commutation),
    ('bulge', 'pure-side length invariance', check_pure_side_invariance),
    ('limitset', 'Fuchsian limit set on the conic', check_conic_limit_set),
    ('entropy', 'planted growth rate', check_planted_slope),
    ('entropy', 'counting function', check_counting_function),
    ('bounds', 'closed-form partition sums', check_partition_sums),
    ('bounds', 'Stirling cross-check', check_stirling),
]


def run_all(config):
    """Run every check under the given config; a config representation is validated first"""
    if config.representation:
        reps.representation_from_dict(config.representation)

    results = []
    for module, name, check in SUITES:
        rng = np.random.default_rng(config['SEED'])
        start = time.perf_counter()
        try:
            passed, detail = check(rng)
        except HilbertGeoError as exc:
            passed, detail = False, f'{type(exc).__name__}: {exc}'
        elapsed = time.perf_counter() - start
        if not passed:
            logger.warning('Check failed: %s / %s (%s)', module, name, detail)
        results.append(CheckResult(module, name, bool(passed), detail, elapsed))
    logger.info('verify: %d/%d checks passed', sum(r.passed for r in results), len(results))
    return results
