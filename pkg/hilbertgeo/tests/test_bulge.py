import math

import numpy as np
import pytest
from scipy import stats

from hilbertgeo.bulge import (
    bulge_frame,
    deform,
    in_frame_pattern,
    limit_action,
    o_s,
    tau_t,
    trace_probe,
)
from hilbertgeo.entropy import census
from hilbertgeo.exceptions import ConfigError, DegenerateMatrix, NoSplitting
from hilbertgeo.group import Representation, evaluate, invert
from hilbertgeo.proj3 import ProjectiveMap, form_residual, hilbert_length
from hilbertgeo.reps import double_pants, fuchsian_pants, fuchsian_torus, genus2_octagon, punctured_torus_hnn

from .factories import PantsParamsFactory


@pytest.fixture(scope='module')
def amalgam():
    return double_pants(PantsParamsFactory())


@pytest.fixture(scope='module')
def hnn():
    return punctured_torus_hnn(fuchsian_torus())


def length_of(rep, word):
    return hilbert_length(evaluate(rep, word), inverse=evaluate(rep, invert(word)))


def test_frame_diagonalizes_gamma(amalgam):
    frame = bulge_frame(amalgam, (1, 2))
    in_frame = frame.to_frame(evaluate(amalgam, (1, 2)))
    diagonal = np.diag(in_frame)
    assert np.max(np.abs(in_frame - np.diag(diagonal))) < 1e-8
    assert diagonal[0] > diagonal[1] > diagonal[2] > 0
    assert frame.basis.det() == pytest.approx(1.0, abs=1e-12)


def test_frame_of_diagonal_gamma_is_coordinate_frame():
    rep = Representation(gens=['a'], images=[np.diag([math.e ** 2, 1.0, math.e ** -2])])
    basis = np.abs(bulge_frame(rep, (1,)).basis.entries)
    assert basis == pytest.approx(np.eye(3), abs=1e-12)


def test_one_parameter_groups(amalgam):
    frame = bulge_frame(amalgam, (1, 2))
    gamma = evaluate(amalgam, (1, 2))
    assert (o_s(frame, 1.5) @ o_s(frame, -1.5)).max_abs_diff(ProjectiveMap.identity()) < 1e-10
    assert (o_s(frame, 0.7) @ tau_t(frame, 0.4)).max_abs_diff(tau_t(frame, 0.4) @ o_s(frame, 0.7)) < 1e-10
    assert (o_s(frame, 2.0) @ gamma).max_abs_diff(gamma @ o_s(frame, 2.0)) < 1e-8
    assert o_s(frame, 3.0).det() == pytest.approx(1.0, abs=1e-9)


def test_in_frame_pattern_scaling():
    pattern = in_frame_pattern(np.ones((3, 3)), 3.0)
    assert pattern[1, 0] == pytest.approx(math.exp(3.0))
    assert pattern[0, 1] == pytest.approx(math.exp(-3.0))
    assert pattern[0, 2] == pytest.approx(1.0)
    assert np.diag(pattern) == pytest.approx([1.0, 1.0, 1.0])


def test_limit_action_keeps_middle_row_or_column():
    alpha = np.arange(1.0, 10.0).reshape(3, 3)
    plus = limit_action(alpha, 1)
    assert plus[1, 0] == pytest.approx(4.0 / 6.0)
    assert plus[1, 2] == pytest.approx(1.0)
    assert np.count_nonzero(plus) == 2
    minus = limit_action(alpha, -1)
    assert minus[0, 1] == pytest.approx(2.0 / 8.0)
    assert minus[2, 1] == pytest.approx(1.0)
    with pytest.raises(DegenerateMatrix):
        limit_action(np.diag([1.0, 2.0, 3.0]), 1)


def test_zero_deformation_is_exact(amalgam):
    same = deform(amalgam, 0.0, 0.0)
    for before, after in zip(amalgam.images, same.images):
        assert after.max_abs_diff(before) == 0.0


def test_amalgam_sides_keep_their_lengths(amalgam):
    deformed = deform(amalgam, 0.5, 4.0)
    assert evaluate(deformed, (1, 2)).max_abs_diff(evaluate(amalgam, (1, 2))) < 1e-10
    for word in [(1,), (2,), (1, -2), (3,), (1, 2, 3), (3, 3, 1, 2)]:
        assert length_of(deformed, word) == pytest.approx(length_of(amalgam, word), abs=1e-9)
    assert length_of(deformed, (1, 3)) > length_of(amalgam, (1, 3)) + 0.5


def test_deformation_group_law(amalgam):
    twice = deform(deform(amalgam, 0.3, 1.0), 0.2, 2.0)
    once = deform(amalgam, 0.5, 3.0)
    for a, b in zip(twice.images, once.images):
        assert a.max_abs_diff(b) < 1e-8 * max(1.0, np.max(np.abs(b.entries)))


def test_earthquake_keeps_the_conic(amalgam):
    quake = deform(amalgam, 0.7, 0.0)
    assert all(form_residual(m) < 1e-9 for m in quake.images)
    bulged = deform(amalgam, 0.0, 2.0)
    assert form_residual(bulged.images[2]) > 1e-3


def test_left_side_is_a_conjugate_view(amalgam):
    right = deform(amalgam, 0.0, 3.0, side='right')
    left = deform(amalgam, 0.0, 3.0, side='left')
    for word in [(1, 3), (2, -3, 1), (1, 2, 3, 3)]:
        assert length_of(left, word) == pytest.approx(length_of(right, word), rel=1e-8)


def test_hnn_moves_only_the_stable_letter(hnn):
    deformed = deform(hnn, 0.0, 2.0)
    assert deformed.images[0].max_abs_diff(hnn.images[0]) == 0.0
    assert deformed.images[1].max_abs_diff(hnn.images[1]) > 1e-3
    assert length_of(deformed, (1,)) == pytest.approx(length_of(hnn, (1,)), abs=1e-10)


def test_deform_argument_checks(amalgam):
    with pytest.raises(ConfigError):
        deform(amalgam, 0.0, 30.0)
    with pytest.raises(ConfigError):
        deform(amalgam, 0.0, 1.0, side='up')
    with pytest.raises(NoSplitting):
        deform(fuchsian_pants(PantsParamsFactory()), 0.0, 1.0)


def test_max_abs_s_follows_settings(amalgam, settings):
    settings.HILBERTGEO = {**settings.HILBERTGEO, 'MAX_ABS_S': 2.0}
    with pytest.raises(ConfigError):
        deform(amalgam, 0.0, 3.0)


def test_trace_grows_like_exp_s(amalgam):
    grid = [float(s) for s in range(6, 15)]
    growth = trace_probe(amalgam, (1,), (3,), grid)
    assert [row.s for row in growth.rows] == grid
    assert growth.rate == pytest.approx(1.0, abs=0.02)
    assert growth.rows[-1].hilbert_length > growth.rows[0].hilbert_length


def test_trace_probe_sides(amalgam):
    with pytest.raises(NoSplitting):
        trace_probe(amalgam, (3,), (1,), [0.0, 1.0])


def test_hnn_trace_grows_like_two_thirds_s(hnn):
    growth = trace_probe(hnn, (1,), (2,), [float(s) for s in range(6, 15)])
    assert growth.rate == pytest.approx(2.0 / 3.0, abs=0.02)


def test_cylinder_length_grows_linearly(amalgam):
    growth = trace_probe(amalgam, (1,), (3,), [float(s) for s in range(8, 17)])
    fit = stats.linregress([r.s for r in growth.rows], [r.hilbert_length for r in growth.rows])
    assert fit.rvalue ** 2 > 0.99
    assert fit.slope == pytest.approx(1.0, abs=0.05)


def test_lengths_stay_accurate_at_large_s(amalgam):
    lengths = {s: length_of(deform(amalgam, 0.0, s), (1, 3)) for s in (10.0, 16.0, 20.0)}
    assert all(math.isfinite(v) for v in lengths.values())
    assert (lengths[16.0] - lengths[10.0]) / 6.0 == pytest.approx(1.0, abs=0.02)
    assert (lengths[20.0] - lengths[16.0]) / 4.0 == pytest.approx(1.0, abs=0.02)


def test_deformed_inverses_are_exact(amalgam):
    deformed = deform(amalgam, 0.0, 14.0)
    for g in range(1, deformed.rank + 1):
        product = evaluate(deformed, (g, -g))
        assert product.max_abs_diff(ProjectiveMap.identity()) < 1e-6


def test_relator_defect_grows_at_most_like_exp_s():
    rep = genus2_octagon()
    base = max(rep.relator_residual(r) for r in rep.relators)
    for s in (10.0, 16.0, 20.0):
        deformed = deform(rep, 0.0, s)
        residual = max(deformed.relator_residual(r) for r in deformed.relators)
        assert residual <= 1e3 * math.exp(s) * max(base, 1e-12)
    assert max(deform(rep, 0.0, 10.0).relator_residual(r) for r in rep.relators) < 1e-6


def test_census_after_large_bulge_keeps_its_classes(amalgam):
    found = census(deform(amalgam, 0.0, 12.0), 4)
    assert found.skipped <= 0.01 * (len(found) + found.skipped)
