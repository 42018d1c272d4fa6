from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_graph
from ldpc_vfap.construction import fixture_complete_bipartite, fixture_tree_code
from ldpc_vfap.cycles import (
    LengthCapExceeded,
    TooLarge,
    brute_force_cycle_oracle,
    census,
    count_cycles_of_length,
    enumerate_tables,
    lollipop_recursion,
    walk_tables,
)


@pytest.mark.parametrize(
    "a, b, two_k, total, per_check",
    [
        (2, 2, 4, 1, [1, 1]),
        (2, 3, 4, 3, [3, 3]),
        (3, 3, 4, 9, [6, 6, 6]),
        (3, 3, 6, 6, [6, 6, 6]),
    ],
)
def test_complete_bipartite_counts(a, b, two_k, total, per_check):
    h = fixture_complete_bipartite(a, b)
    assert brute_force_cycle_oracle(h, two_k) == (total, per_check)
    assert count_cycles_of_length(h, two_k) == (total, per_check)


def test_k23_census():
    c = census(fixture_complete_bipartite(2, 3))
    assert (c.girth, c.total, c.mu_g) == (4, 3, 3)


def test_tree_has_no_cycles():
    h = fixture_tree_code()
    for two_k in (4, 6, 8, 10):
        assert brute_force_cycle_oracle(h, two_k) == (0, [0, 0, 0])
        assert count_cycles_of_length(h, two_k) == (0, [0, 0, 0])
    assert census(h, 16).acyclic


def test_base_case_tables():
    h = fixture_complete_bipartite(2, 3)
    for side, fwd in (("c", h.to_dense()), ("s", h.to_dense().T)):
        t = lollipop_recursion(h, 4, side)
        assert np.array_equal(t.paths[1], fwd)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_recursion_identity_on_enumerated_tables(seed):
    h = random_graph(np.random.default_rng(seed), max_nodes=14)
    for side in ("c", "s"):
        t = enumerate_tables(h, 7, side)
        fwd = t.e if side == "c" else t.e.T
        for ell in range(1, 7):
            step = fwd.T if ell % 2 else fwd
            lolli = sum(t.lollipops.get((tl, ell + 1 - tl), 0) for tl in range(ell + 1))
            assert np.array_equal(t.paths[ell + 1], t.paths[ell] @ step - lolli)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_matrix_recursion_agrees_with_enumeration_below_girth(seed):
    h = random_graph(np.random.default_rng(seed), max_nodes=16, density=0.25)
    for side in ("c", "s"):
        fast = lollipop_recursion(h, 10, side)
        slow = enumerate_tables(h, fast.exact_through, side)
        for ell in range(fast.exact_through + 1):
            assert np.array_equal(fast.paths[ell], slow.paths[ell])


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_matches_oracle_and_trace_symmetry(seed):
    h = random_graph(np.random.default_rng(seed))
    for two_k in (4, 6, 8):
        total, per_check = count_cycles_of_length(h, two_k)
        assert (total, per_check) == brute_force_cycle_oracle(h, two_k)
        assert sum(per_check) == two_k // 2 * total
        tc = np.trace(walk_tables(h, two_k, "c").tailless(two_k))
        ts = np.trace(walk_tables(h, two_k, "s").tailless(two_k))
        assert tc == ts == two_k * total


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    h = random_graph(rng)
    rp, cp = rng.permutation(h.m), rng.permutation(h.n)
    p = h.permuted(rp, cp)
    for two_k in (4, 6, 8):
        total, per_check = count_cycles_of_length(h, two_k)
        ptotal, pper = count_cycles_of_length(p, two_k)
        assert ptotal == total
        assert pper == [per_check[i] for i in rp]


def test_census_fields_consistent(code500):
    c = census(code500)
    assert sum(c.per_check) == c.girth // 2 * c.total
    assert c.mu_g == Fraction(sum(c.per_check), code500.m)
    # a PEG code of this size has hundreds to a few thousand shortest cycles
    assert 100 <= c.total <= 10_000


def test_length_validation():
    h = fixture_complete_bipartite(2, 2)
    with pytest.raises(LengthCapExceeded):
        count_cycles_of_length(h, 18)
    with pytest.raises(ValueError):
        count_cycles_of_length(h, 5)
    with pytest.raises(ValueError):
        census(h, 3)


def test_oracle_size_limit():
    with pytest.raises(TooLarge):
        brute_force_cycle_oracle(fixture_complete_bipartite(12, 13), 4)
