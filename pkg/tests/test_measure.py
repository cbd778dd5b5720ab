import math

import numpy as np
import pytest
from scipy.stats import wasserstein_distance

from rifsquant import (DiscreteMeasure, NotAnFma, Unsupported, approximant, approximant_on_antichain,
                       build_gamma, cauchy_bound, example_spec, explicit_word, refine_consistency,
                       sample_word, w1_distance_1d)
from rifsquant.measure import depth_for_resolution, merge_atoms
from rifsquant.symbolic import antichain_from_members


def random_fma(spec, word, rng, splits):
    members = [()]
    for _ in range(splits):
        k = int(rng.integers(len(members)))
        s = members.pop(k)
        card = len(spec.components[word[len(s)]])
        members.extend(s + (j,) for j in range(card))
    return members


def test_depth_one_atoms(ex1):
    mu = approximant(ex1, explicit_word([0, 0]), 1, anchor=0.0)
    np.testing.assert_allclose(mu.x, [0.2, 0.6])
    np.testing.assert_allclose(mu.weights, [0.4, 0.6])


def test_equal_weight_depth_eight(ex2):
    mu = approximant(ex2, sample_word(ex2, 0, 8), 8)
    assert len(mu) == 256
    np.testing.assert_allclose(mu.weights, 2.0**-8, rtol=1e-12)
    gaps = np.diff(np.sort(mu.x))
    assert gaps.min() >= (2 / 15) * 5.0**-7 * (1 - 1e-9)


def test_mass_is_one(ex3):
    mu = approximant(ex3, sample_word(ex3, 1, 12), 12)
    assert math.fsum(mu.weights) == pytest.approx(1.0, abs=1e-12)
    assert mu.mass_in_box([0.0], [1.0]) == pytest.approx(1.0)


def test_merge_atoms_sums_coincident_weights():
    pts, wts, _ = merge_atoms(np.array([[0.5], [0.1], [0.5 + 1e-14]]), [0.2, 0.3, 0.5])
    np.testing.assert_allclose(pts[:, 0], [0.1, 0.5])
    np.testing.assert_allclose(wts, [0.3, 0.7])


def test_antichain_measure_matches_level_measure(ex1):
    word = sample_word(ex1, 3, 20)
    lev = approximant(ex1, word, 4)
    members = [tuple(s) for s in np.ndindex(2, 2, 2, 2)]
    mu = approximant_on_antichain(ex1, word, antichain_from_members(ex1, word, members))
    np.testing.assert_allclose(mu.x, lev.x)
    np.testing.assert_allclose(mu.weights, lev.weights)


def test_non_fma_rejected(ex1):
    word = sample_word(ex1, 3, 20)
    with pytest.raises(NotAnFma):
        approximant_on_antichain(ex1, word, antichain_from_members(ex1, word, [(0,), (1, 0)]))


def test_refinement_of_gamma(ex1):
    word = sample_word(ex1, 0, 40)
    gamma, stats = build_gamma(ex1, word, 7, 1.0)
    assert refine_consistency(ex1, word, gamma, stats.l2 + 2) <= 1e-12


def test_refinement_of_random_antichains():
    rng = np.random.default_rng(0)
    for case in range(12):
        spec = example_spec(1 + case % 3)
        word = sample_word(spec, case, 40)
        gamma = antichain_from_members(spec, word, random_fma(spec, word, rng, int(rng.integers(1, 12))))
        L = int(gamma.depths.max()) + int(rng.integers(0, 3))
        assert refine_consistency(spec, word, gamma, L) <= 1e-12


def test_w1_against_scipy():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = DiscreteMeasure(rng.random(7), rng.random(7) + 0.1)
        b = DiscreteMeasure(rng.random(11), rng.random(11) + 0.1)
        ref = wasserstein_distance(a.x, b.x, a.weights, b.weights)
        assert w1_distance_1d(a, b) == pytest.approx(ref, rel=1e-12, abs=1e-15)


def test_w1_two_dimensions_unsupported():
    mu = DiscreteMeasure(np.zeros((2, 2)) + [[0, 0], [1, 1]], [0.5, 0.5])
    with pytest.raises(Unsupported):
        w1_distance_1d(mu, mu)


def test_cauchy_constant_at_zero(ex1):
    assert cauchy_bound(ex1, anchor=0.0).a_nu == pytest.approx(3 / 5)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_cauchy_rate(k):
    spec = example_spec(k)
    word = sample_word(spec, k, 20)
    bound = cauchy_bound(spec, anchor=0.0)
    prev = approximant(spec, word, 0, anchor=0.0)
    for n in range(0, 10):
        nxt = approximant(spec, word, n + 1, anchor=0.0)
        assert w1_distance_1d(prev, nxt) <= bound(n) * (1 + 1e-9)
        prev = nxt


def test_csv_roundtrip(ex1, tmp_path):
    mu = approximant(ex1, sample_word(ex1, 0, 5), 3)
    path = tmp_path / "mu.csv"
    mu.to_csv(path)
    back = DiscreteMeasure.from_csv(path)
    np.testing.assert_array_equal(back.points, mu.points)
    np.testing.assert_array_equal(back.weights, mu.weights)
    assert back.sigmas == mu.sigmas


def test_scaling(ex1):
    mu = approximant(ex1, sample_word(ex1, 0, 5), 3)
    np.testing.assert_allclose(mu.scaled(2.0).x, 2 * mu.x)


def test_depth_for_resolution(ex1, ex3):
    assert depth_for_resolution(ex1, 1e-4) == math.ceil(4 / math.log10(5))
    assert 0.3 ** depth_for_resolution(ex3, 1e-3) <= 1e-3
