import math

import numpy as np
import pandas as pd
import pytest

from hilbertgeo.entropy import (
    SWEEP_COLUMNS,
    Census,
    census,
    counting_function,
    counts_table,
    default_probe,
    dump_counts,
    fit_entropy,
    orbit_exponent,
    sweep,
)
from hilbertgeo.exceptions import BudgetExceeded, ConfigError, InsufficientData, NoSplitting
from hilbertgeo.group import Representation
from hilbertgeo.hilbert import disc_polygon
from hilbertgeo.reps import double_pants, fuchsian_pants, fuchsian_torus, genus2_octagon, punctured_torus_hnn

from .factories import PantsParamsFactory


@pytest.fixture
def rank_one():
    return Representation(gens=['a'], images=[np.diag([math.e ** 2, 1.0, math.e ** -2])])


@pytest.fixture(scope='module')
def amalgam():
    return double_pants(PantsParamsFactory())


def test_rank_one_census(rank_one):
    c = census(rank_one, 3)
    assert c.lengths == pytest.approx([2.0, 2.0, 4.0, 4.0, 6.0, 6.0], abs=1e-9)
    assert [e.label for e in c.entries[:2]] == ['a', 'a⁻¹']
    assert counting_function(c, 4.0) == 4
    assert len(census(rank_one, 3, oriented=False)) == 3


def test_counting_function_edges():
    c = Census.from_lengths([1.0, 2.0, 2.0, 3.0])
    assert c.kind == 'lengths'
    assert counting_function(c, 0.0) == 0
    assert counting_function(c, 0.5) == 0
    assert counting_function(c, 2.0) == 3
    assert counting_function(c, 10.0) == 4


def test_counts_table_and_dump(tmp_path):
    c = Census.from_lengths([1.0, 2.0, 2.0, 3.0])
    table = counts_table(c)
    assert table['T'].tolist() == [1.0, 2.0, 3.0]
    assert table['count'].tolist() == [1, 3, 4]
    path = dump_counts(c, tmp_path / 'counts.csv')
    assert path.read_text().splitlines()[0] == 'T,count'


def test_census_frame_columns(rank_one):
    frame = census(rank_one, 2).to_frame()
    assert list(frame.columns) == ['class', 'word_length', 'hilbert_length']
    assert frame['word_length'].tolist() == [1, 1, 2, 2]


def test_census_is_sorted_and_restrictable(amalgam):
    c = census(amalgam, 3)
    assert np.all(np.diff(c.lengths) >= 0)
    left = c.restrict([1, 2])
    assert 0 < len(left) < len(c)
    assert all({abs(l) for l in e.word} <= {1, 2} for e in left.entries)


def test_census_budget(amalgam):
    with pytest.raises(BudgetExceeded):
        census(amalgam, 5, budget=10)


def test_planted_slope_is_recovered():
    c = Census.from_lengths([math.log(k) / 0.7 for k in range(1, 4001)])
    est = fit_entropy(c)
    assert est.h == pytest.approx(0.7, abs=0.01)
    assert est.r_squared > 0.99
    assert est.n_points >= 10
    low, high = est.fit_window
    assert low < high


def test_fit_needs_enough_lengths():
    with pytest.raises(InsufficientData):
        fit_entropy(Census.from_lengths([1.0, 2.0, 3.0]))


def test_fit_window_fraction_range():
    c = Census.from_lengths([math.log(k) for k in range(1, 500)])
    with pytest.raises(ConfigError):
        fit_entropy(c, window_fraction=0.05)
    with pytest.raises(ConfigError):
        fit_entropy(c, window_fraction=1.0)
    assert fit_entropy(c, window_fraction=0.3).n_points >= 10


def test_estimate_serializes():
    est = fit_entropy(Census.from_lengths([math.log(k) for k in range(1, 500)]))
    data = est.to_json()
    assert set(data) == {'h', 'stderr', 'fit_window', 'r_squared', 'n_points', 'skipped'}
    assert data['h'] == pytest.approx(1.0, abs=0.05)


def test_group_with_relators_counts_elements():
    c = census(genus2_octagon(), 2)
    assert c.kind == 'elements'
    assert c.skipped == 0
    assert len(c) == 8 + 8 * 7


def test_orbit_exponent_on_fuchsian_pants():
    rep = fuchsian_pants(PantsParamsFactory(l1=1.0, l2=1.0, l3=1.0))
    est = orbit_exponent(rep, disc_polygon(256), (0.0, 0.0), radius=8)
    assert 0.0 < est.h < 1.5
    assert est.r_squared > 0.9


def test_orbit_exponent_counts_points_beyond_a_coarse_polygon():
    rep = fuchsian_pants(PantsParamsFactory())
    coarse = orbit_exponent(rep, disc_polygon(16), (0.0, 0.0), radius=6)
    fine = orbit_exponent(rep, disc_polygon(512), (0.0, 0.0), radius=6)
    assert math.isfinite(coarse.h) and math.isfinite(fine.h)
    assert coarse.h == pytest.approx(fine.h, abs=1e-6)


def test_orbit_fit_failure_names_the_sphere_cap(rank_one):
    with pytest.raises(InsufficientData, match='word sphere caps the fit window'):
        orbit_exponent(rank_one, disc_polygon(64), (0.0, 0.0), radius=3)


@pytest.mark.slow
def test_orbit_exponent_on_closed_surface():
    rep = genus2_octagon()
    est = orbit_exponent(rep, disc_polygon(128), (0.0, 0.0), radius=5)
    assert 0.7 < est.h < 1.5


def test_default_probe(amalgam):
    assert default_probe(amalgam) == ((1,), (3,))
    assert default_probe(punctured_torus_hnn(fuchsian_torus())) == ((1,), (2,))


def test_sweep_columns_and_drift(amalgam):
    df = sweep(amalgam, [0.0, 2.0], max_word_len=3, radius=3, depth=3)
    assert isinstance(df, pd.DataFrame)
    assert list(df.columns) == SWEEP_COLUMNS
    assert df['s'].tolist() == [0.0, 2.0]
    assert df['hausdorff_drift'].iloc[0] == 0.0
    assert np.isfinite(df['trace_ab']).all()
    assert isinstance(df.attrs['errors'], list)


def test_sweep_needs_a_splitting():
    with pytest.raises(NoSplitting):
        sweep(fuchsian_pants(PantsParamsFactory()), [0.0])


def test_sweep_orbit_estimates_survive_bulging(amalgam):
    df = sweep(amalgam, [0.0, 6.0], max_word_len=4, radius=5, depth=4)
    assert np.isfinite(df['h_orbit']).all(), df.attrs['errors']
    assert np.isfinite(df['length_ab']).all()


def test_sweep_rejects_a_bad_window(amalgam):
    with pytest.raises(ConfigError):
        sweep(amalgam, [0.0], max_word_len=3, radius=3, depth=3, window_fraction=0.05)


@pytest.mark.slow
def test_bulging_lowers_the_census_entropy(amalgam):
    df = sweep(amalgam, [0.0, 12.0], max_word_len=6, radius=5, depth=4)
    h0, h12 = df['h_census'].tolist()
    assert h12 < h0


@pytest.mark.slow
def test_census_and_orbit_estimates_agree():
    rep = fuchsian_pants(PantsParamsFactory(l1=1.0, l2=1.0, l3=1.0))
    by_census = fit_entropy(census(rep, 8))
    by_orbit = orbit_exponent(rep, disc_polygon(512), (0.0, 0.0), radius=8)
    band = 0.05 + 3.0 * (by_census.stderr + by_orbit.stderr)
    assert abs(by_census.h - by_orbit.h) <= band
