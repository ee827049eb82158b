import numpy as np
import pytest

from hilbertgeo import suites
from hilbertgeo.conf import RunConfig
from hilbertgeo.exceptions import NotHyperbolic


@pytest.mark.parametrize('check', [
    suites.check_eigen,
    suites.check_cross_ratio_invariance,
    suites.check_nested_monotonicity,
    suites.check_class_enumeration,
    suites.check_fuchsian_embedding,
    suites.check_bulge_commutation,
    suites.check_planted_slope,
    suites.check_counting_function,
    suites.check_partition_sums,
    suites.check_stirling,
])
def test_quick_checks_pass(check):
    passed, detail = check(np.random.default_rng(0))
    assert passed, detail


def test_every_module_has_a_suite():
    modules = {module for module, _, _ in suites.SUITES}
    assert modules == {'proj3', 'hilbert', 'group', 'reps', 'bulge', 'limitset', 'entropy', 'bounds'}


def test_config_representation_is_validated_first():
    rotation = [0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]
    config = RunConfig.from_dict({'representation': {'gens': ['r'], 'images': [rotation]}})
    with pytest.raises(NotHyperbolic):
        suites.run_all(config)
