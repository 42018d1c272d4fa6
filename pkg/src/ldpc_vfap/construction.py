"""Parity-check matrix generators: progressive edge growth and test fixtures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ldpc_vfap.code_model import DegreeProfile, ParityCheckMatrix, from_dense


class InfeasibleSpec(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionSpec:
    n: int
    m: int
    var_degrees: tuple[int, ...]
    seed: int = 0

    def __post_init__(self):
        if not self.n > self.m >= 1:
            raise InfeasibleSpec(f"need n > m >= 1, got n={self.n}, m={self.m}")
        if len(self.var_degrees) != self.n:
            raise InfeasibleSpec("var_degrees must have length n")
        if min(self.var_degrees) < 1:
            raise InfeasibleSpec("all variable degrees must be >= 1")
        if sum(self.var_degrees) < self.m:
            raise InfeasibleSpec("too few edges to reach every check node")

    @classmethod
    def regular(cls, n: int, m: int, dv: int, seed: int = 0) -> "ConstructionSpec":
        return cls(n, m, (dv,) * n, seed)

    @classmethod
    def from_profile(cls, n: int, profile: DegreeProfile, seed: int = 0) -> "ConstructionSpec":
        m = round(n * (1.0 - profile.design_rate))
        return cls(n, m, node_degrees_from_lambda(n, profile.lambda_coeffs), seed)


def node_degrees_from_lambda(n: int, lambda_coeffs) -> tuple[int, ...]:
    """Realize an edge-perspective lambda(x) as ``n`` integer node degrees.

    Node fractions are lambda_d / d normalized; counts are rounded with the
    largest-remainder method. Degrees are returned in ascending order.
    """
    degs = np.arange(1, len(lambda_coeffs) + 1)
    lam = np.asarray(lambda_coeffs, dtype=float)
    node_frac = lam / degs
    node_frac /= node_frac.sum()
    exact = node_frac * n
    counts = np.floor(exact).astype(int)
    short = n - counts.sum()
    # stable sort: ties go to the lower degree
    order = np.argsort(-(exact - counts), kind="stable")
    counts[order[:short]] += 1
    return tuple(int(d) for d, c in zip(degs, counts) for _ in range(c))


def peg_construct(spec: ConstructionSpec) -> ParityCheckMatrix:
    """Progressive edge growth.

    Variables are processed in order of ascending target degree (ties by
    index). Each new edge goes to a check outside the deepest BFS level
    reachable from the variable, or, once the whole check set is reachable,
    to one first reached at the last level. Among candidates the check with
    the smallest current degree wins; remaining ties are broken by a
    seed-derived random ranking of the checks.
    """
    n, m = spec.n, spec.m
    if max(spec.var_degrees) > m:
        raise InfeasibleSpec(f"variable degree {max(spec.var_degrees)} exceeds m={m}")
    rng = np.random.default_rng(spec.seed)
    rank = np.empty(m, dtype=np.int64)
    rank[rng.permutation(m)] = np.arange(m)

    chk_adj: list[list[int]] = [[] for _ in range(m)]
    var_adj: list[list[int]] = [[] for _ in range(n)]
    chk_deg = np.zeros(m, dtype=np.int64)

    def pick(candidates: np.ndarray) -> int:
        degs = chk_deg[candidates]
        best = candidates[degs == degs.min()]
        return int(best[np.argmin(rank[best])])

    order = sorted(range(n), key=lambda j: (spec.var_degrees[j], j))
    for j in order:
        for k in range(spec.var_degrees[j]):
            if k == 0:
                c = pick(np.arange(m))
            else:
                c = pick(_peg_candidates(j, chk_adj, var_adj, m))
            chk_adj[c].append(j)
            var_adj[j].append(c)
            chk_deg[c] += 1

    if (chk_deg == 0).any():
        raise InfeasibleSpec(f"check {int(np.argmax(chk_deg == 0))} received no edges")
    return ParityCheckMatrix.from_rows(m, n, chk_adj)


def _peg_candidates(j: int, chk_adj, var_adj, m: int) -> np.ndarray:
    reached = np.zeros(m, dtype=bool)
    frontier_chk = list(var_adj[j])
    reached[frontier_chk] = True
    seen_var = {j}
    while True:
        prev = reached.copy()
        nxt: list[int] = []
        for c in frontier_chk:
            for v in chk_adj[c]:
                if v in seen_var:
                    continue
                seen_var.add(v)
                for c2 in var_adj[v]:
                    if not reached[c2]:
                        reached[c2] = True
                        nxt.append(c2)
        if reached.all():
            # everything reachable: take checks first reached at this level
            return np.flatnonzero(~prev)
        if not nxt:
            return np.flatnonzero(~reached)
        frontier_chk = nxt


def fixture_tree_code() -> ParityCheckMatrix:
    """Three checks chained through shared variables 2 and 4; cycle-free."""
    return ParityCheckMatrix.from_rows(3, 7, [(0, 1, 2), (2, 3, 4), (4, 5, 6)])


def fixture_complete_bipartite(a: int, b: int) -> ParityCheckMatrix:
    if a < 2 or b < 2:
        raise ValueError("both sides need at least two nodes")
    return from_dense(np.ones((a, b), dtype=np.uint8))


IRREGULAR_LAMBDA = {6: 0.21, 4: 0.25, 3: 0.25, 2: 0.29}
IRREGULAR_NU = {6: 1.0}


def irregular_profile() -> DegreeProfile:
    return DegreeProfile.from_degrees(IRREGULAR_LAMBDA, IRREGULAR_NU, 0.5)


def regular_profile(dv: int, dc: int) -> DegreeProfile:
    return DegreeProfile.from_degrees({dv: 1.0}, {dc: 1.0}, 1.0 - dv / dc)
