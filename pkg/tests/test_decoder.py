import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ldpc_vfap.code_model import syndrome
from ldpc_vfap.construction import fixture_tree_code
from ldpc_vfap.cycles import CycleCensus, census
from ldpc_vfap.decoder import (
    ATANH_EPS,
    CensusMismatch,
    DecoderConfig,
    NonPositiveVariance,
    ReweightVector,
    Variant,
    assign_faps,
    check_update,
    compute_beliefs,
    decode,
    decode_batch,
    default_rho,
    hard_decision,
    init_llr,
    variable_update_bp,
    variable_update_reweighted,
)
from ldpc_vfap.harness import modulate

CEILING = 2 * math.atanh(1 - ATANH_EPS)


def exact_parity_llr(incoming):
    """LLR log P(1)/P(0) of the XOR of independent bits with the given LLRs, by enumeration."""
    p1 = [1 / (1 + math.exp(-v)) for v in incoming]
    prob = [0.0, 0.0]
    for bits in itertools.product((0, 1), repeat=len(p1)):
        w = math.prod(p if b else 1 - p for p, b in zip(p1, bits))
        prob[sum(bits) % 2] += w
    return math.log(prob[1] / prob[0])


def test_init_llr():
    assert init_llr(1.0, 0.5) == 4.0
    assert init_llr(0.0, 0.7) == 0.0
    assert init_llr(100.0, 1.0, clamp=50) == 50.0
    with pytest.raises(NonPositiveVariance):
        init_llr(1.0, 0.0)


@pytest.mark.parametrize("incoming", [(2.0, -1.0), (0.3, 1.7, -2.2), (1.0, 1.0, 1.0, 1.0, 1.0), (-0.4,)])
def test_check_update_matches_enumeration(incoming):
    assert check_update(incoming) == pytest.approx(exact_parity_llr(incoming), abs=1e-12)


def test_check_update_zero_and_saturation():
    assert check_update([1.5, 0.0, -2.0]) == 0.0
    # five strongly-1 neighbours of a degree-6 check: target is 1
    assert check_update([50.0] * 5) == pytest.approx(CEILING)
    # two strongly-1 neighbours of a degree-3 check: target is 0
    assert check_update([50.0] * 2) == pytest.approx(-CEILING)


def test_variable_updates():
    assert variable_update_bp(0.7, []) == 0.7
    assert variable_update_bp(1.0, [2.0, -0.5]) == 2.5
    assert variable_update_reweighted(0.0, [(2.0, 0.5)], (4.0, 0.5)) == -1.0
    assert variable_update_reweighted(1.0, [(2.0, 1.0), (-0.5, 1.0)], (3.0, 1.0)) == variable_update_bp(1.0, [2.0, -0.5])
    assert variable_update_bp(10.0, [45.0]) == 50.0


def test_hard_decision():
    assert hard_decision([0.1, -0.1]).tolist() == [1, 0]
    assert hard_decision([0.0]).tolist() == [0]
    assert hard_decision([50.0, 50.0]).tolist() == [1, 1]


def test_compute_beliefs():
    h = fixture_tree_code()
    llr = np.arange(7, dtype=float) - 3
    assert np.array_equal(compute_beliefs(h, llr, np.zeros(h.num_edges)), llr)
    lam = np.linspace(-1, 1, h.num_edges)
    # edges row-major: (0,0) (0,1) (0,2) (1,2) (1,3) (1,4) (2,4) (2,5) (2,6)
    by_hand = llr + np.array([lam[0], lam[1], lam[2] + lam[3], lam[4], lam[5] + lam[6], lam[7], lam[8]])
    assert np.allclose(compute_beliefs(h, llr, lam), by_hand)
    assert np.array_equal(compute_beliefs(h, llr, lam, ReweightVector.uniform(3)), compute_beliefs(h, llr, lam))
    rho = ReweightVector((1.0, 0.5, 0.25))
    w = np.array([1, 1, 1, 0.5, 0.5, 0.5, 0.25, 0.25, 0.25])
    by_hand = llr + np.array([w[0] * lam[0], w[1] * lam[1], w[2] * lam[2] + w[3] * lam[3], w[4] * lam[4],
                              w[5] * lam[5] + w[6] * lam[6], w[7] * lam[7], w[8] * lam[8]])
    assert np.allclose(compute_beliefs(h, llr, lam, rho), by_hand)


def test_assign_faps_rule():
    from ldpc_vfap.code_model import from_dense

    h = from_dense(np.eye(4, dtype=int))
    c = CycleCensus(4, 6, (0, 5, 5, 2))
    assert c.mu_g == 3
    assert assign_faps(h, c, 0.5).rho == (1.0, 0.5, 0.5, 1.0)
    assert assign_faps(h, CycleCensus(4, 4, (2, 2, 2, 2)), 0.5).rho == (0.5,) * 4
    assert assign_faps(h, CycleCensus(None, 0, ()), 0.5).rho == (1.0,) * 4
    with pytest.raises(CensusMismatch):
        assign_faps(h, CycleCensus(4, 1, (1, 1)), 0.5)
    with pytest.raises(ValueError):
        assign_faps(h, c, 1.5)


def test_default_rho_regular(code96):
    assert default_rho(code96) == pytest.approx(2 / 3)


def test_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig(max_iterations=0)
    with pytest.raises(ValueError):
        DecoderConfig(llr_clamp=0)
    with pytest.raises(ValueError):
        DecoderConfig(rho_uniform=0.0)
    with pytest.raises(ValueError):
        ReweightVector((1.0, 1.2))
    assert Variant.parse("vfap") is Variant.VFAP_BP


def test_noiseless_codeword_one_iteration(code96):
    x = np.zeros(code96.n, dtype=np.uint8)
    for v in Variant:
        r = decode(code96, modulate(x), 0.1, DecoderConfig(v, 20))
        assert r.converged and r.iterations_used == 1
        assert np.array_equal(r.codeword, x)


def test_tree_beliefs_are_exact_posteriors():
    h = fixture_tree_code()
    words = np.array([w for w in itertools.product((0, 1), repeat=7) if not syndrome(h, np.array(w)).any()])
    rng = np.random.default_rng(3)
    for _ in range(20):
        y = modulate(rng.integers(0, 2, 7)) + rng.normal(size=7)
        llr = init_llr(y, 1.0)
        score = words @ llr
        exact = [np.logaddexp.reduce(score[words[:, j] == 1]) - np.logaddexp.reduce(score[words[:, j] == 0]) for j in range(7)]
        r = decode(h, y, 1.0, DecoderConfig(Variant.STANDARD_BP, 10, early_stop=False))
        assert np.max(np.abs(r.final_beliefs - exact)) < 1e-9


def reference_decode(h, y, sigma2, rho, iterations):
    """Loop-by-loop decoder built only from the scalar update rules."""
    llr = init_llr(y, sigma2)
    lam = {(i, j): 0.0 for i in range(h.m) for j in h.rows[i]}
    psi = {}
    out = []
    for _ in range(iterations):
        for j in range(h.n):
            for i in h.cols[j]:
                others = [(lam[k, j], rho[k]) for k in h.cols[j] if k != i]
                psi[i, j] = variable_update_reweighted(llr[j], others, (lam[i, j], rho[i]))
        for i in range(h.m):
            for j in h.rows[i]:
                lam[i, j] = check_update([psi[i, k] for k in h.rows[i] if k != j])
        order = [(i, j) for i in range(h.m) for j in h.rows[i]]
        out.append((np.array([psi[e] for e in order]), np.array([lam[e] for e in order])))
    return out


@pytest.mark.parametrize("rho_u", [0.5, 2 / 3, 0.9])
def test_urw_matches_reference_implementation(rho_u):
    from ldpc_vfap.construction import ConstructionSpec, peg_construct

    h = peg_construct(ConstructionSpec.regular(24, 12, 3, seed=3))
    rng = np.random.default_rng(int(rho_u * 100))
    y = modulate(np.zeros(24)) + 0.9 * rng.normal(size=24)
    rho = ReweightVector.uniform(h.m, rho_u)
    trace = []
    decode(h, y, 0.8, DecoderConfig(Variant.URW_BP, 6, rho_uniform=rho_u, early_stop=False), rho, trace=trace)
    for (_, psi, lam), (rpsi, rlam) in zip(trace, reference_decode(h, y, 0.8, rho.rho, 6)):
        assert np.allclose(psi[0], rpsi, rtol=1e-10, atol=1e-10)
        assert np.allclose(lam[0], rlam, rtol=1e-10, atol=1e-10)


def test_vfap_unit_weights_equals_standard_bp(code96):
    rng = np.random.default_rng(8)
    y = modulate(np.zeros((50, code96.n))) + 0.85 * rng.normal(size=(50, code96.n))
    t_bp, t_vf = [], []
    a = decode_batch(code96, y, 0.7, DecoderConfig(Variant.STANDARD_BP, 30), trace=t_bp)
    b = decode_batch(code96, y, 0.7, DecoderConfig(Variant.VFAP_BP, 30), ReweightVector.uniform(code96.m), trace=t_vf)
    assert len(t_bp) == len(t_vf)
    for x, z in zip(t_bp, t_vf):
        for u, v in zip(x, z):
            assert np.array_equal(u, v)
    for f in ("codewords", "converged", "iterations", "beliefs"):
        assert np.array_equal(getattr(a, f), getattr(b, f))


def test_vfap_default_uses_census(code96):
    cfg = DecoderConfig(Variant.VFAP_BP, 5)
    from ldpc_vfap.decoder import reweight_for

    rho = reweight_for(code96, cfg)
    c = census(code96)
    assert rho == assign_faps(code96, c, 2 / 3)
    assert set(rho.rho) == {1.0, 2 / 3}


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    scale=st.sampled_from([1e-3, 0.5, 1.0, 5.0, 1e3, 1e9]),
    variant=st.sampled_from(list(Variant)),
)
def test_clamp_safety_and_soundness(code96, seed, scale, variant):
    rng = np.random.default_rng(seed)
    y = scale * rng.normal(size=code96.n)
    trace = []
    r = decode(code96, y, 0.5, DecoderConfig(variant, 15), trace=trace)
    for _, psi, lam in trace:
        assert np.isfinite(psi).all() and np.isfinite(lam).all()
        assert np.abs(psi).max() <= 50 and np.abs(lam).max() <= 50
    assert np.isfinite(r.final_beliefs).all()
    if r.converged:
        assert not syndrome(code96, r.codeword).any()


def test_rejects_bad_inputs(code96):
    with pytest.raises(ValueError):
        decode(code96, np.zeros(5), 1.0, DecoderConfig())
    with pytest.raises(ValueError):
        decode(code96, np.full(code96.n, np.nan), 1.0, DecoderConfig())
    with pytest.raises(NonPositiveVariance):
        decode(code96, np.zeros(code96.n), -1.0, DecoderConfig())
