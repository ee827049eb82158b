import json
import math

import numpy as np
import pytest

from hilbertgeo.exceptions import (
    ConfigError,
    IoFailure,
    NotHyperbolic,
    PingPongFailed,
    UnknownGenerator,
)
from hilbertgeo.entropy import census
from hilbertgeo.group import evaluate, invert
from hilbertgeo.proj3 import ProjectiveMap, form_residual, hilbert_length, klein_boost, normalize_det1, preserves_form
from hilbertgeo.reps import (
    boundary_lengths,
    common_conic,
    double_pants,
    dump_representation,
    embed_sl2,
    from_spec,
    fuchsian_pants,
    fuchsian_torus,
    genus2_octagon,
    load_representation,
    schottky_crossing,
    schottky_pair,
    sl2_from_traces,
    sl2_translation_length,
    sym2,
)

from .factories import PantsParamsFactory


def test_sym2_is_multiplicative():
    a = np.array([[2.0, 1.0], [1.0, 1.0]])
    b = np.array([[1.0, -0.5], [0.5, 0.75]])
    assert sym2(a @ b) == pytest.approx(sym2(a) @ sym2(b))


def test_embedding_preserves_the_conic():
    a = np.array([[2.0, 1.0], [1.0, 1.0]])
    m = embed_sl2(a)
    assert form_residual(m) < 1e-12
    assert hilbert_length(m) == pytest.approx(sl2_translation_length(a), abs=1e-12)


def test_sl2_from_traces():
    a, b = sl2_from_traces(3.0, 2.5, -4.0)
    assert np.trace(a) == pytest.approx(3.0)
    assert np.trace(b) == pytest.approx(2.5)
    assert np.trace(a @ b) == pytest.approx(-4.0)
    assert np.linalg.det(b) == pytest.approx(1.0)
    with pytest.raises(NotHyperbolic):
        sl2_from_traces(1.5, 3.0, 3.0)


@pytest.mark.parametrize('lengths', [(2.0, 2.0, 2.0), (1.0, 1.5, 2.5)])
def test_pants_boundary_lengths(lengths):
    rep = fuchsian_pants(PantsParamsFactory(l1=lengths[0], l2=lengths[1], l3=lengths[2]))
    assert boundary_lengths(rep) == pytest.approx(lengths, abs=1e-9)
    assert all(form_residual(m) < 1e-9 for m in rep.images)


def test_pants_params_must_be_positive():
    with pytest.raises(ValueError):
        PantsParamsFactory(l2=0.0)


def test_torus_commutator_is_parabolic():
    rep = fuchsian_torus()
    a, b = rep.sl2
    assert np.trace(a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)) == pytest.approx(-2.0)


def test_double_pants_splitting():
    rep = double_pants(PantsParamsFactory())
    assert rep.gens == ['a', 'b', 'c']
    assert rep.splitting.kind == 'amalgam'
    assert rep.splitting.gamma == (1, 2)
    assert hilbert_length(rep.images[2]) == pytest.approx(2.0, abs=1e-9)
    assert form_residual(rep.images[2]) < 1e-9


def test_genus2_relator_and_conic():
    rep = genus2_octagon()
    assert rep.rank == 4
    assert rep.relator_residual(rep.relators[0]) < 1e-8
    assert all(form_residual(m) < 1e-9 for m in rep.images)
    word = rep.splitting.gamma
    assert hilbert_length(evaluate(rep, word), inverse=evaluate(rep, invert(word))) > 0


def test_schottky_pair_is_certified():
    rep = schottky_crossing(3.0)
    assert rep.certificate['kind'] == 'ping-pong'
    assert len(rep.certificate['arcs']) == 4
    assert rep.relators == []


def test_short_translations_fail_pingpong():
    with pytest.raises(PingPongFailed):
        schottky_crossing(0.2)


def test_conjugated_fuchsian_pair_is_certified():
    p = normalize_det1(np.array([[1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.0, 0.2, 1.5]]))
    a, b = klein_boost(3.0), klein_boost(3.0, angle=math.pi / 2.0)
    first, second = (p @ g @ p.inverse() for g in (a, b))
    assert not preserves_form(first)
    rep = schottky_pair(first, second)
    assert rep.certificate['method'] == 'arcs'
    assert len(rep.certificate['arcs']) == 4


def test_pair_without_invariant_conic_is_certified_by_caps():
    frame = np.column_stack([
        np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0),
        np.array([-1.0, 0.0, 1.0]) / math.sqrt(2.0),
        np.array([1.0, -1.0, 1.0]) / math.sqrt(3.0),
    ])
    spectrum = np.diag(np.exp([6.0, 0.5, -6.5]))
    first = ProjectiveMap(spectrum)
    second = ProjectiveMap(frame @ spectrum @ np.linalg.inv(frame))
    assert common_conic(first, second) is None
    rep = schottky_pair(first, second)
    assert rep.certificate['method'] == 'caps'
    assert 0.0 < rep.certificate['radius'] < 0.5


def test_pair_sharing_fixed_points_fails_pingpong():
    with pytest.raises(PingPongFailed):
        schottky_pair(klein_boost(3.0), klein_boost(2.0))
    with pytest.raises(PingPongFailed):
        schottky_pair(ProjectiveMap(np.diag(np.exp([3.0, 0.0, -3.0]))),
                      ProjectiveMap(np.diag(np.exp([2.0, 0.5, -2.5]))))


def test_certified_pair_is_quasi_isometric():
    found = census(schottky_crossing(3.0), 5)
    assert found.skipped == 0
    assert min(e.hilbert_length / e.word_length for e in found.entries) > 0.5


def test_genus2_generators_share_one_length():
    rep = genus2_octagon()
    lengths = [hilbert_length(m) for m in rep.images]
    assert max(lengths) - min(lengths) < 1e-9


def test_from_spec_variants():
    torus = from_spec('torus')
    assert torus.splitting.kind == 'hnn'
    assert torus.splitting.stable_letter == 2
    assert from_spec('torus', split='none').splitting is None
    assert from_spec('pants:2,2,2', split='amalgam-demo').rank == 3
    assert from_spec('pants:2,2,2', split='hnn-demo').splitting.kind == 'hnn'


@pytest.mark.parametrize('text', ['pants:1,2', 'cube'])
def test_from_spec_rejects_unknown(text):
    with pytest.raises(UnknownGenerator):
        from_spec(text)


def test_representation_file(tmp_path):
    path = tmp_path / 'pants.json'
    rep = fuchsian_pants(PantsParamsFactory(l1=1.0, l2=1.5, l3=2.5))
    dump_representation(rep, path)
    data = json.loads(path.read_text())
    assert all(len(m) == 9 for m in data['images'])
    loaded = from_spec(f'file:{path}')
    assert boundary_lengths(loaded) == pytest.approx((1.0, 1.5, 2.5), abs=1e-9)


def test_representation_file_errors(tmp_path):
    with pytest.raises(IoFailure):
        load_representation(tmp_path / 'missing.json')

    broken = tmp_path / 'broken.json'
    broken.write_text('{"gens": [')
    with pytest.raises(ConfigError):
        load_representation(broken)

    short = tmp_path / 'short.json'
    short.write_text(json.dumps({'gens': ['a'], 'images': [[1.0] * 8]}))
    with pytest.raises(ConfigError):
        load_representation(short)


def test_file_generators_must_be_hyperbolic(tmp_path):
    path = tmp_path / 'rotation.json'
    c, s = math.cos(0.5), math.sin(0.5)
    path.write_text(json.dumps({'gens': ['r'], 'images': [[c, -s, 0, s, c, 0, 0, 0, 1]]}))
    with pytest.raises(NotHyperbolic, match='Generator r'):
        load_representation(path)
