import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rifsquant import (BudgetExceeded, InvalidSymbol, build_gamma, enumerate_level, example_spec,
                       explicit_word, gamma_counts, sample_word, shift, validate_fma)
from rifsquant.core import TOL
from rifsquant.symbolic import Word, antichain_from_members, bracket_index, gamma_events


def brute_gamma(spec, word, n, r):
    """Recursive enumeration straight from the definition (weights as Python floats)."""
    thr = spec.p_min * spec.c_min**r / n
    out = []

    def walk(sigma, weight):
        letter = word[len(sigma)]
        comp = spec.components[letter]
        for j, m in enumerate(comp.maps):
            w = weight * comp.probs[j] * m.ratio**r
            if math.log(w) >= math.log(thr) - TOL:
                walk(sigma + (j,), w)
            else:
                out.append(sigma + (j,))

    walk((), 1.0)
    return sorted(out)


def test_level_three_has_eight_members(ex1):
    lev = enumerate_level(ex1, sample_word(ex1, 3, 10), 3)
    assert len(lev) == 8
    assert set(lev.members) == set(itertools.product(range(2), repeat=3))


def test_level_weights_sum_to_one(ex1):
    lev = enumerate_level(ex1, sample_word(ex1, 1, 10), 6)
    assert math.fsum(np.exp(lev.log_p)) == pytest.approx(1.0, abs=1e-13)


def test_level_budget(ex1):
    with pytest.raises(BudgetExceeded):
        enumerate_level(ex1, sample_word(ex1, 0, 20), 12, budget=1000)


@pytest.mark.parametrize("n,depth,phi", [(10, 3, 8), (5, 2, 4)])
def test_equal_weight_gamma(ex2, n, depth, phi):
    gamma, stats = build_gamma(ex2, sample_word(ex2, 0, 50), n, 1.0)
    assert stats.phi == phi and stats.l1 == stats.l2 == depth
    assert set(gamma.depths) == {depth}


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_gamma_matches_recursive_oracle(k, r):
    spec = example_spec(k)
    for seed in range(5):
        word = sample_word(spec, seed, 200)
        for n in (1, 2, 7, 40, 333):
            gamma, _ = build_gamma(spec, word, n, r)
            assert list(gamma.members) == brute_gamma(spec, word, n, r)


def test_gamma_counts_agree_with_direct_builds(ex1, ex3):
    for spec in (ex1, ex3):
        word = sample_word(spec, 11, 300)
        c = gamma_counts(spec, word, 1.0, 300)
        for n in range(1, 301, 7):
            _, st_ = build_gamma(spec, word, n, 1.0)
            assert (c["phi"][n - 1], c["l1"][n - 1], c["l2"][n - 1]) == (st_.phi, st_.l1, st_.l2)


def test_gamma_events_cover_every_change(ex1):
    word = sample_word(ex1, 2, 300)
    events = gamma_events(ex1, word, 1.0, 500)
    starts = [n for n, _, _ in events]
    for (n, depths, lw), nxt in zip(events, starts[1:] + [501]):
        for m in {n, (n + nxt - 1) // 2, nxt - 1}:
            gamma, _ = build_gamma(ex1, word, m, 1.0)
            assert len(gamma) == lw.size
            np.testing.assert_allclose(np.sort(gamma.log_weights(1.0)), np.sort(lw), atol=1e-12)


def test_gamma_is_always_an_fma(ex1, ex2, ex3):
    for spec in (ex1, ex2, ex3):
        for seed in range(10):
            word = sample_word(spec, seed, 200)
            for n in (1, 3, 50, 1000):
                gamma, _ = build_gamma(spec, word, n, 1.0)
                assert validate_fma(spec, word, gamma)


def test_validate_fma_rejects(ex1):
    w = explicit_word([0, 1, 0, 1])
    assert validate_fma(ex1, w, [(0,), (1, 0), (1, 1)])
    assert not validate_fma(ex1, w, [(0,), (1, 0)])            # not maximal
    assert not validate_fma(ex1, w, [(0,), (0, 1), (1,)])      # comparable pair
    assert not validate_fma(ex1, w, [(0,), (1,), (1,)])        # repeated member
    assert not validate_fma(ex1, w, [(0,), (2,)])              # bad symbol
    assert not validate_fma(ex1, w, [])


def test_antichain_size_growth(ex1, ex2, ex3):
    for spec in (ex1, ex2, ex3):
        pc = spec.p_min * spec.c_min
        n0 = 1.0 / (1.0 / pc - 1.0)
        c = gamma_counts(spec, sample_word(spec, 5, 400), 1.0, 2000)
        phi, n = c["phi"], c["n"]
        sel = n[:-1] > n0
        assert np.all(phi[:-1][sel] <= phi[1:][sel])
        assert np.all(phi[1:][sel] <= spec.max_card * phi[:-1][sel])


def test_bracket_index():
    phi = np.array([2, 2, 4, 8])
    assert bracket_index(phi, 1) is None
    assert bracket_index(phi, 5) == 3
    assert bracket_index(phi, 8) is None


def test_sampled_prefixes_are_stable(ex1):
    a = sample_word(ex1, 9, 10).prefix(10)
    b = sample_word(ex1, 9, 10_000).prefix(9000)
    np.testing.assert_array_equal(a, b[:10])
    assert set(np.unique(b)) <= {0, 1}


def test_sampled_letter_frequencies(ex1):
    counts = sample_word(ex1, 0, 20_000).counts(20_000, 2)
    assert abs(counts[0] / 20_000 - 0.5) < 0.02


@given(st.lists(st.integers(0, 1), min_size=1, max_size=12), st.integers(0, 30), st.integers(0, 5))
def test_shift_semantics(letters, k, j):
    per = Word(letters, kind="periodic")
    moved = shift(per, k)
    assert moved[j] == letters[(k + j) % len(letters)]
    assert shift(per, 0).prefix(5).tolist() == per.prefix(5).tolist()


def test_shift_composes(ex1):
    w = sample_word(ex1, 4, 100)
    np.testing.assert_array_equal(shift(shift(w, 3), 4).prefix(20), w.prefix(27)[7:])


def test_explicit_word_bounds():
    w = explicit_word([0, 1, 1])
    with pytest.raises(InvalidSymbol):
        w.prefix(4)
    with pytest.raises(InvalidSymbol):
        shift(w, 5)


def test_periodic_word(ex1):
    w = explicit_word([1, 0, 0])
    p = w.periodic(3)
    assert p.prefix(7).tolist() == [1, 0, 0, 1, 0, 0, 1]


def test_antichain_csv(ex1):
    gamma = antichain_from_members(ex1, explicit_word([0, 0]), [(0,), (1, 0), (1, 1)])
    rows = gamma.to_csv().splitlines()
    assert rows[0] == "sigma;depth;log_p;log_c;box_lo;box_hi"
    assert rows[2].startswith("1.0;2;")
