import itertools
import math

import numpy as np
import pytest

from hilbertgeo.exceptions import BudgetExceeded, EmptyWord, NotHyperbolic, UnknownGenerator
from hilbertgeo.group import (
    ConjClass,
    Representation,
    canonical_class,
    commutator,
    cyclic_reduce,
    cyclically_reduced_count,
    enumerate_classes,
    evaluate,
    format_word,
    invert,
    orbit_ball,
    parse_word,
    reduce,
    word_key,
)
from hilbertgeo.proj3 import ProjectiveMap, rotation


@pytest.fixture
def rank_one():
    return Representation(gens=['a'], images=[np.diag([math.e ** 2, 1.0, math.e ** -2])])


def all_words(n_gens, max_len):
    letters = [g for i in range(1, n_gens + 1) for g in (i, -i)]
    for length in range(1, max_len + 1):
        yield from itertools.product(letters, repeat=length)


def test_free_and_cyclic_reduction():
    assert reduce((1, -1, 2)) == (2,)
    assert reduce((1, 2, -2, -1)) == ()
    assert cyclic_reduce((1, 2, -1)) == (2,)
    assert invert((1, -2)) == (2, -1)
    assert commutator((1,), (2,)) == (1, 2, -1, -2)


def test_canonical_class_is_least_rotation():
    assert canonical_class((2, 1)) == ConjClass((1, 2))
    assert canonical_class((-1, 2, 2, 1)) == canonical_class((2, 2))


def test_orientation_of_classes():
    assert canonical_class((-1,)) == ConjClass((-1,))
    assert canonical_class((-1,), unoriented=True) == ConjClass((1,))


def test_trivial_word_has_no_class():
    with pytest.raises(EmptyWord):
        canonical_class((1, 2, -2, -1))


@pytest.mark.parametrize('unoriented', [False, True])
def test_enumeration_matches_brute_force(unoriented):
    expected = set()
    for word in all_words(2, 4):
        if cyclic_reduce(word):
            expected.add(canonical_class(word, unoriented))
    got = enumerate_classes(2, 4, unoriented=unoriented)
    assert set(got) == expected
    assert len(got) == len(expected)
    assert [word_key(c.rep) for c in got] == sorted(word_key(c.rep) for c in got)


def test_rank_one_class_counts():
    assert len(enumerate_classes(1, 3)) == 6
    assert len(enumerate_classes(1, 3, unoriented=True)) == 3


def test_cyclically_reduced_count_matches_brute_force():
    for length in range(1, 5):
        brute = sum(1 for w in all_words(2, length)
                    if len(w) == length and reduce(w) == w and w[0] != -w[-1])
        assert cyclically_reduced_count(2, length) == brute


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded) as info:
        enumerate_classes(2, 4, budget=5)
    assert info.value.exit_code == 3


def test_word_formatting():
    assert format_word((1, -2)) == 'ab⁻¹'
    assert format_word((1, -2), ['a1', 'b1']) == 'a1·b1⁻¹'
    assert parse_word('ab^-1a') == (1, -2, 1)
    assert parse_word('a1·b1⁻¹', ['a1', 'b1']) == (1, -2)
    with pytest.raises(UnknownGenerator):
        parse_word('x')


def test_evaluate_products(rank_one):
    assert evaluate(rank_one, ()).max_abs_diff(ProjectiveMap.identity()) == 0.0
    assert evaluate(rank_one, (1, -1)).max_abs_diff(ProjectiveMap.identity()) < 1e-12
    cube = evaluate(rank_one, (1, 1, 1))
    assert np.diag(cube.entries) == pytest.approx([math.e ** 6, 1.0, math.e ** -6])


def test_orbit_ball_of_cyclic_group(rank_one):
    ball = orbit_ball(rank_one, 3)
    assert ball[0][0] == ()
    assert sorted(len(w) for w, _ in ball) == [0, 1, 1, 2, 2, 3, 3]


def test_orbit_ball_deduplicates_relations():
    # a and b = a^-1 generate the same cyclic group
    m = np.diag([math.e, 1.0, math.e ** -1])
    rep = Representation(gens=['a', 'b'], images=[m, np.linalg.inv(m)])
    words = [w for w, _ in orbit_ball(rep, 3)]
    assert len(words) == 7


def test_representation_needs_one_image_per_generator():
    with pytest.raises(UnknownGenerator):
        Representation(gens=['a', 'b'], images=[np.eye(3)])


def test_validate_rejects_elliptic_generator():
    rep = Representation(gens=['a'], images=[rotation(0.5)])
    with pytest.raises(NotHyperbolic):
        rep.validate()


def test_image_of_undeclared_letter(rank_one):
    with pytest.raises(UnknownGenerator):
        rank_one.image(2)
