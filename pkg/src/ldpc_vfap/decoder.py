"""Log-domain message passing: standard BP, uniformly reweighted BP and VFAP-BP.

Sign convention: bit 1 is sent as +1 and an LLR is log p(.|x=1) / p(.|x=0),
so a positive belief decides 1.

The check rule is the usual tanh product times (-1)**degree, the form the
product takes under this orientation; for even-degree checks the factor is 1.

All three decoders share a flooding schedule over edge arrays in row-major
(check, variable) order. Each iteration updates every variable-to-check
message, then every check-to-variable message, then the beliefs, the hard
decision and the syndrome. Check-to-variable messages start at zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ldpc_vfap.code_model import ParityCheckMatrix, empirical_connectivity
from ldpc_vfap.cycles import DEFAULT_CAP, CycleCensus, census as run_census

DEFAULT_CLAMP = 50.0
ATANH_EPS = 1e-12


class Variant(str, enum.Enum):
    STANDARD_BP = "standard_bp"
    URW_BP = "urw_bp"
    VFAP_BP = "vfap_bp"

    @classmethod
    def parse(cls, name: str) -> "Variant":
        aliases = {"bp": cls.STANDARD_BP, "urw": cls.URW_BP, "vfap": cls.VFAP_BP}
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


class NonPositiveVariance(ValueError):
    pass


class CensusMismatch(ValueError):
    pass


def _check_rho(value: float, what: str) -> None:
    if not 0.0 < value <= 1.0:
        raise ValueError(f"{what} must lie in (0, 1], got {value!r}")


@dataclass(frozen=True)
class DecoderConfig:
    variant: Variant = Variant.STANDARD_BP
    max_iterations: int = 60
    llr_clamp: float = DEFAULT_CLAMP
    rho_uniform: float | None = None
    rho_v_override: float | None = None
    # when False all max_iterations are run even after the syndrome clears
    early_stop: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.llr_clamp > 0:
            raise ValueError("llr_clamp must be positive")
        if self.rho_uniform is not None:
            _check_rho(self.rho_uniform, "rho_uniform")
        if self.rho_v_override is not None:
            _check_rho(self.rho_v_override, "rho_v_override")


@dataclass(frozen=True)
class ReweightVector:
    rho: tuple[float, ...]

    def __post_init__(self):
        for i, r in enumerate(self.rho):
            _check_rho(r, f"rho[{i}]")

    @classmethod
    def uniform(cls, m: int, value: float = 1.0) -> "ReweightVector":
        return cls((float(value),) * m)

    @property
    def is_unit(self) -> bool:
        return all(r == 1.0 for r in self.rho)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.rho, dtype=np.float64)


@dataclass
class DecoderState:
    channel_llr: np.ndarray
    msg_v2c: np.ndarray
    msg_c2v: np.ndarray
    beliefs: np.ndarray
    iteration: int = 0


@dataclass(frozen=True)
class DecodeResult:
    codeword: np.ndarray
    converged: bool
    iterations_used: int
    final_beliefs: np.ndarray


# ---------------------------------------------------------------------------
# Single-node update rules. The batched engine below implements the same
# formulas over whole edge arrays; these scalar forms are the reference.


def init_llr(y, sigma2: float, clamp: float = DEFAULT_CLAMP):
    if not sigma2 > 0:
        raise NonPositiveVariance(f"noise variance must be positive, got {sigma2!r}")
    # tiny variances may overflow to +-inf before clipping; the clip makes that exact
    with np.errstate(over="ignore"):
        return np.clip(2.0 * np.asarray(y, dtype=np.float64) / sigma2, -clamp, clamp)


def check_update(incoming: Sequence[float], clamp: float = DEFAULT_CLAMP) -> float:
    """Tanh rule for the message to the one neighbor not in ``incoming``.

    With LLRs oriented as log p(1)/p(0) the rule carries a factor
    (-1)**degree; it is +1 for even-degree checks.
    """
    prod = -1.0 if len(incoming) % 2 == 0 else 1.0
    for psi in incoming:
        prod *= math.tanh(psi / 2.0)
    prod = min(max(prod, -1.0 + ATANH_EPS), 1.0 - ATANH_EPS)
    return min(max(2.0 * math.atanh(prod), -clamp), clamp)


def variable_update_bp(l_j: float, incoming: Sequence[float], clamp: float = DEFAULT_CLAMP) -> float:
    return min(max(l_j + sum(incoming), -clamp), clamp)


def variable_update_reweighted(
    l_j: float,
    incoming: Sequence[tuple[float, float]],
    excluded: tuple[float, float],
    clamp: float = DEFAULT_CLAMP,
) -> float:
    """``incoming`` holds (message, rho) for the other checks; ``excluded`` is the target's pair."""
    lam_i, rho_i = excluded
    psi = l_j + sum(rho * lam for lam, rho in incoming) - (1.0 - rho_i) * lam_i
    return min(max(psi, -clamp), clamp)


def hard_decision(b) -> np.ndarray:
    return (np.asarray(b) > 0).astype(np.uint8)


def assign_faps(h: ParityCheckMatrix, c: CycleCensus, rho_v: float) -> ReweightVector:
    """Unit weight for checks on fewer girth cycles than average, ``rho_v`` otherwise."""
    _check_rho(rho_v, "rho_v")
    if c.acyclic:
        return ReweightVector.uniform(h.m)
    if c.m != h.m:
        raise CensusMismatch(f"census has {c.m} checks, matrix has {h.m}")
    total = sum(c.per_check)
    # s_i < total / M, compared in integers
    return ReweightVector(tuple(1.0 if s * h.m < total else float(rho_v) for s in c.per_check))


def default_rho(h: ParityCheckMatrix) -> float:
    """2 / mean variable degree of the realized graph, capped at 1."""
    return min(1.0, 2.0 / empirical_connectivity(h))


def reweight_for(
    h: ParityCheckMatrix,
    cfg: DecoderConfig,
    c: CycleCensus | None = None,
    cap: int = DEFAULT_CAP,
) -> ReweightVector:
    if cfg.variant is Variant.STANDARD_BP:
        return ReweightVector.uniform(h.m)
    if cfg.variant is Variant.URW_BP:
        rho_u = cfg.rho_uniform if cfg.rho_uniform is not None else default_rho(h)
        return ReweightVector.uniform(h.m, rho_u)
    rho_v = cfg.rho_v_override if cfg.rho_v_override is not None else default_rho(h)
    if c is None:
        c = run_census(h, cap)
    return assign_faps(h, c, rho_v)


# ---------------------------------------------------------------------------
# Batched flooding engine


class _Graph:
    def __init__(self, h: ParityCheckMatrix):
        self.m, self.n = h.m, h.n
        self.chk, self.var = h.edges
        row_start = np.concatenate([[0], np.cumsum(h.row_degrees)[:-1]])
        self.row_start = row_start
        self.check_groups = []
        for d in np.unique(h.row_degrees):
            checks = np.flatnonzero(h.row_degrees == d)
            self.check_groups.append(row_start[checks][:, None] + np.arange(d)[None, :])
        self.var_perm = np.argsort(self.var, kind="stable")
        self.var_start = np.concatenate([[0], np.cumsum(h.col_degrees)[:-1]])

    def sum_at_vars(self, x: np.ndarray) -> np.ndarray:
        return np.add.reduceat(x[:, self.var_perm], self.var_start, axis=1)

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        return np.add.reduceat(bits[:, self.var].astype(np.int64), self.row_start, axis=1) & 1


@lru_cache(maxsize=16)
def _graph(h: ParityCheckMatrix) -> _Graph:
    return _Graph(h)


def _check_pass(g: _Graph, psi: np.ndarray, clamp: float) -> np.ndarray:
    t = np.tanh(psi / 2.0)
    lam = np.empty_like(psi)
    for idx in g.check_groups:
        tt = t[:, idx]
        ones = np.ones(tt.shape[:2] + (1,))
        left = np.cumprod(np.concatenate([ones, tt[..., :-1]], axis=2), axis=2)
        right = np.cumprod(np.concatenate([ones, tt[..., :0:-1]], axis=2), axis=2)[..., ::-1]
        sign = 1.0 if idx.shape[1] % 2 == 0 else -1.0
        prod = np.clip(sign * (left * right), -1.0 + ATANH_EPS, 1.0 - ATANH_EPS)
        lam[:, idx] = np.clip(2.0 * np.arctanh(prod), -clamp, clamp)
    return lam


def _variable_pass_bp(g: _Graph, llr: np.ndarray, lam: np.ndarray, clamp: float) -> np.ndarray:
    total = llr + g.sum_at_vars(lam)
    return np.clip(total[:, g.var] - lam, -clamp, clamp)


def _variable_pass_reweighted(g: _Graph, llr: np.ndarray, lam: np.ndarray, rho_e: np.ndarray, clamp: float) -> np.ndarray:
    weighted = lam * rho_e
    total = llr + g.sum_at_vars(weighted)
    return np.clip(total[:, g.var] - weighted - (1.0 - rho_e) * lam, -clamp, clamp)


def _beliefs(g: _Graph, llr: np.ndarray, lam: np.ndarray, rho_e: np.ndarray | None, clamp: float) -> np.ndarray:
    contrib = lam if rho_e is None else lam * rho_e
    return np.clip(llr + g.sum_at_vars(contrib), -clamp, clamp)


def compute_beliefs(h: ParityCheckMatrix, llr, msg_c2v, rho: ReweightVector | None = None, clamp: float = DEFAULT_CLAMP) -> np.ndarray:
    """Per-variable beliefs from channel LLRs and row-major check-to-variable messages."""
    g = _graph(h)
    rho_e = None if rho is None else rho.as_array()[g.chk]
    out = _beliefs(g, np.atleast_2d(llr), np.atleast_2d(msg_c2v), rho_e, clamp)
    return out[0] if np.ndim(llr) == 1 else out


@dataclass
class BatchResult:
    codewords: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    beliefs: np.ndarray


def decode_batch(
    h: ParityCheckMatrix,
    y: np.ndarray,
    sigma2: float,
    cfg: DecoderConfig,
    rho: ReweightVector | None = None,
    trace: list | None = None,
) -> BatchResult:
    """Decode each row of ``y`` independently.

    Frames leave the active set as soon as their syndrome clears (when
    ``cfg.early_stop``). If ``trace`` is a list, one tuple
    ``(active_rows, msg_v2c, msg_c2v)`` is appended per iteration.
    """
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if y.shape[1] != h.n:
        raise ValueError(f"received vectors must have length {h.n}, got {y.shape[1]}")
    if not np.isfinite(y).all():
        raise ValueError("received values must be finite")
    g = _graph(h)
    clamp = cfg.llr_clamp
    rho_e = None
    if cfg.variant is not Variant.STANDARD_BP:
        if rho is None:
            rho = reweight_for(h, cfg)
        if len(rho.rho) != h.m:
            raise ValueError(f"reweight vector has length {len(rho.rho)}, expected {h.m}")
        rho_e = rho.as_array()[g.chk]

    frames = y.shape[0]
    llr_all = init_llr(y, sigma2, clamp)
    codewords = np.zeros((frames, h.n), dtype=np.uint8)
    beliefs = llr_all.copy()
    iterations = np.full(frames, cfg.max_iterations, dtype=np.int64)
    converged = np.zeros(frames, dtype=bool)

    active = np.arange(frames)
    llr = llr_all
    lam = np.zeros((frames, len(g.chk)))
    for it in range(1, cfg.max_iterations + 1):
        if rho_e is None:
            psi = _variable_pass_bp(g, llr, lam, clamp)
        else:
            psi = _variable_pass_reweighted(g, llr, lam, rho_e, clamp)
        lam = _check_pass(g, psi, clamp)
        b = _beliefs(g, llr, lam, rho_e, clamp)
        bits = hard_decision(b)
        ok = ~g.syndrome(bits).any(axis=1)
        if trace is not None:
            trace.append((active.copy(), psi.copy(), lam.copy()))
        codewords[active] = bits
        beliefs[active] = b
        converged[active] = ok
        if cfg.early_stop and ok.any():
            iterations[active[ok]] = it
            keep = ~ok
            active, llr, lam = active[keep], llr[keep], lam[keep]
            if len(active) == 0:
                break
    return BatchResult(codewords, converged, iterations, beliefs)


def decode(
    h: ParityCheckMatrix,
    y,
    sigma2: float,
    cfg: DecoderConfig,
    rho: ReweightVector | None = None,
    trace: list | None = None,
) -> DecodeResult:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("decode takes one received vector; use decode_batch for several")
    r = decode_batch(h, y[None, :], sigma2, cfg, rho, trace)
    return DecodeResult(r.codewords[0], bool(r.converged[0]), int(r.iterations[0]), r.beliefs[0])
