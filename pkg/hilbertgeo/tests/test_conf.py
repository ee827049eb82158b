import json

import pytest

from hilbertgeo import conf
from hilbertgeo.conf import RunConfig, geo_setting
from hilbertgeo.exceptions import ConfigError
from hilbertgeo.reps import fuchsian_pants

from .factories import PantsParamsFactory


def test_settings_supply_defaults(settings):
    settings.HILBERTGEO = {'MAX_WORD_LEN': 4}
    assert geo_setting('MAX_WORD_LEN') == 4
    assert geo_setting('N_RAYS') == conf.DEFAULTS['N_RAYS']


def test_override_is_scoped():
    before = geo_setting('SEED')
    with conf.override({'SEED': before + 17}):
        assert geo_setting('SEED') == before + 17
    assert geo_setting('SEED') == before


def test_snapshot_covers_every_key():
    assert set(conf.snapshot()) == set(conf.DEFAULTS)


def test_config_maps_onto_settings_keys():
    config = RunConfig.from_dict({'seed': 3, 'entropy': {'window_fraction': 0.4}, 'bulge': {'side': 'left'}})
    assert config['SEED'] == 3
    assert config['WINDOW_FRACTION'] == 0.4
    assert config['SIDE'] == 'left'
    assert config['N_RAYS'] == geo_setting('N_RAYS')


def test_digest_is_stable():
    a = RunConfig.from_dict({'seed': 3, 'workers': 2})
    b = RunConfig.from_dict({'workers': 2, 'seed': 3})
    assert a.digest == b.digest
    assert a.digest != RunConfig.from_dict({'seed': 4}).digest


@pytest.mark.parametrize('data, field', [
    ({'colour': 'blue'}, 'colour'),
    ({'entropy': {'window_fraction': 1.5}}, 'entropy.window_fraction'),
    ({'quadrature': {'n_rays': 8}}, 'quadrature.n_rays'),
    ({'bulge': {'side': 'up'}}, 'bulge.side'),
    ({'workers': 0}, 'workers'),
])
def test_invalid_config_names_the_field(data, field):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_dict(data)
    assert field in str(info.value)
    assert info.value.exit_code == 2


def test_default_config_file_is_valid(settings):
    config = RunConfig.from_file(settings.BASE_DIR / 'config' / 'default.json')
    assert config.values == conf.snapshot()
    assert config.representation is None


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / 'missing.json')
    broken = tmp_path / 'broken.json'
    broken.write_text('{\n  "seed": 1,\n  oops\n}')
    with pytest.raises(ConfigError) as info:
        RunConfig.from_file(broken)
    assert info.value.context['line'] == 3


def test_config_embeds_a_representation(tmp_path):
    rep = fuchsian_pants(PantsParamsFactory())
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'seed': 1, 'representation': rep.to_json()}))
    config = RunConfig.from_file(path)
    assert config.representation['gens'] == ['a', 'b']


def test_config_rejects_nested_matrices():
    data = {'representation': {'gens': ['a'], 'images': [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]]}}
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data)


def test_amalgam_needs_right_generators():
    rep = fuchsian_pants(PantsParamsFactory()).to_json()
    rep['splitting'] = {'kind': 'amalgam', 'gamma': [1, 2], 'left_gens': [1]}
    with pytest.raises(ConfigError, match='right_gens'):
        RunConfig.from_dict({'representation': rep})
