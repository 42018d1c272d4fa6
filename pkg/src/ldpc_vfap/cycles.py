"""Short-cycle census of Tanner graphs via path and lollipop-walk counts.

Notation: ``P[l]`` is the matrix of path counts of length ``l`` starting on
one side of the bipartite graph (checks for the ``c`` tables, variables for
the ``s`` tables). ``L[(t, c)]`` counts (t, c)-lollipop walks: a path of
length ``t`` from the start vertex to ``v`` followed by a closed excursion of
length ``c`` at ``v`` that is disjoint from the tail (``c == 2`` is an
immediate backtrack, ``c >= 4`` a simple cycle). Every walk formed by a path
of length ``l`` plus one edge is either a path of length ``l + 1`` or exactly
one such lollipop, so

    P[l + 1] = P[l] @ B - sum_t L[(t, l + 1 - t)]

with ``B`` the biadjacency matrix or its transpose, alternating with ``l``.
The tailless lollipop ``L[(0, 2k)] = (P[2k - 1] @ B) * I`` counts each
2k-cycle through a vertex once per direction.

Below the girth the only lollipops are backtracks and tailless cycles, both
with closed forms, so the pure matrix recursion is exact for every length up
to and including the girth. Lengths past the girth need tailed cycle
lollipops, which have no closed form; for those the tables are filled by
extending every path one edge at a time and classifying each non-path
extension, which satisfies the same recursion identity by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ldpc_vfap.code_model import ParityCheckMatrix

DEFAULT_CAP = 16
_OVERFLOW_LIMIT = 2**62


class LengthCapExceeded(ValueError):
    pass


class IntegerOverflow(ArithmeticError):
    pass


class TooLarge(ValueError):
    pass


@dataclass
class WalkTables:
    """Path and lollipop count tables from one side of the graph.

    ``side`` is ``"c"`` (rows of the tables are check nodes) or ``"s"``
    (rows are variable nodes). ``e`` is always the check-by-variable edge
    matrix.
    """

    e: np.ndarray
    side: str
    paths: dict[int, np.ndarray] = field(default_factory=dict)
    lollipops: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    exact_through: int = 0

    def tailless(self, two_k: int) -> np.ndarray:
        return self.lollipops.get((0, two_k), np.zeros((self._n_start,) * 2, dtype=np.int64))

    @property
    def _n_start(self) -> int:
        return self.e.shape[0] if self.side == "c" else self.e.shape[1]


@dataclass(frozen=True)
class CycleCensus:
    """Girth-length cycle statistics; ``girth is None`` means none found up to ``cap``."""

    girth: int | None
    total: int
    per_check: tuple[int, ...]
    cap: int = DEFAULT_CAP

    @property
    def acyclic(self) -> bool:
        return self.girth is None

    @property
    def m(self) -> int:
        return len(self.per_check)

    @property
    def mu_g(self) -> Fraction:
        if not self.per_check:
            return Fraction(0)
        return Fraction(sum(self.per_check), len(self.per_check))


def _edge_matrix(h: ParityCheckMatrix) -> np.ndarray:
    return h.to_dense().astype(np.int64)


def _checked_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size and b.size:
        bound = int(a.max()) * int(b.sum(axis=0).max())
        if bound >= _OVERFLOW_LIMIT:
            raise IntegerOverflow("path counts exceed 64-bit range; graph too dense for an exact census")
    return a @ b


def lollipop_recursion(h: ParityCheckMatrix, max_len: int, side: str = "c") -> WalkTables:
    """Matrix recursion with closed-form backtrack and tailless-cycle lollipops.

    Runs up to path length ``max_len`` but stops early once it has passed the
    girth, since later tables would need tailed cycle lollipops.
    ``exact_through`` records the longest length whose tables are exact.
    """
    e = _edge_matrix(h)
    fwd = e if side == "c" else e.T
    start_deg = fwd.sum(axis=1)
    other_deg = fwd.sum(axis=0)
    t = WalkTables(e=e, side=side)
    t.paths[0] = np.eye(fwd.shape[0], dtype=np.int64)
    t.paths[1] = fwd.copy()
    t.exact_through = 1
    for ell in range(1, max_len):
        step = fwd.T if ell % 2 else fwd
        walks = _checked_matmul(t.paths[ell], step)
        nxt = ell + 1
        correction = np.zeros_like(walks)
        if ell - 1 >= 1:
            end_deg = start_deg if (ell - 1) % 2 == 0 else other_deg
            back = t.paths[ell - 1] * (end_deg - 1)[None, :]
            t.lollipops[(ell - 1, 2)] = back
            correction += back
        if nxt % 2 == 0:
            closed = np.diag(np.diag(walks))
            t.lollipops[(0, nxt)] = closed
            correction += closed
        t.paths[nxt] = walks - correction
        t.exact_through = nxt
        if nxt >= 4 and nxt % 2 == 0 and closed.any():
            # girth reached: P[g] is still exact, P[g + 1] would not be
            break
    return t


def _unified_adjacency(h: ParityCheckMatrix, side: str):
    """CSR adjacency over all m + n vertices, start side numbered first."""
    if side == "c":
        first, second = h.rows, h.cols
    else:
        first, second = h.cols, h.rows
    n_first = len(first)
    lists = [[n_first + v for v in nb] for nb in first] + [list(nb) for nb in second]
    indptr = np.zeros(len(lists) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(x) for x in lists])
    indices = np.fromiter((v for nb in lists for v in nb), dtype=np.int64, count=int(indptr[-1]))
    return n_first, indptr, indices


def enumerate_tables(h: ParityCheckMatrix, max_len: int, side: str = "c", chunk: int = 32) -> WalkTables:
    """Exact path and lollipop tables up to ``max_len`` by explicit path extension."""
    e = _edge_matrix(h)
    n_first, indptr, indices = _unified_adjacency(h, side)
    n_second = len(indptr) - 1 - n_first
    deg = np.diff(indptr)
    t = WalkTables(e=e, side=side, exact_through=max_len)

    def shape_for(length: int) -> tuple[int, int]:
        return (n_first, n_first if length % 2 == 0 else n_second)

    for length in range(max_len + 1):
        t.paths[length] = np.zeros(shape_for(length), dtype=np.int64)
    t.paths[0][np.arange(n_first), np.arange(n_first)] = 1

    for lo in range(0, n_first, chunk):
        paths = np.arange(lo, min(lo + chunk, n_first), dtype=np.int64)[:, None]
        for ell in range(max_len):
            if len(paths) == 0:
                break
            last = paths[:, -1]
            counts = deg[last]
            rep = np.repeat(np.arange(len(paths)), counts)
            base = np.repeat(indptr[last] - (np.cumsum(counts) - counts), counts)
            nbr = indices[base + np.arange(int(counts.sum()))]
            match = paths[rep] == nbr[:, None]
            hit = match.any(axis=1)
            nxt = ell + 1
            offset = 0 if nxt % 2 == 0 else n_first
            if hit.any():
                tail = match[hit].argmax(axis=1)
                starts = paths[rep[hit], 0]
                ends = nbr[hit] - offset
                for tl in np.unique(tail):
                    sel = tail == tl
                    key = (int(tl), nxt - int(tl))
                    table = t.lollipops.setdefault(key, np.zeros(shape_for(nxt), dtype=np.int64))
                    np.add.at(table, (starts[sel], ends[sel]), 1)
            paths = np.concatenate([paths[rep[~hit]], nbr[~hit, None]], axis=1)
            np.add.at(t.paths[nxt], (paths[:, 0], paths[:, -1] - offset), 1)
    return t


def _check_length(two_k: int, cap: int) -> None:
    if two_k < 4 or two_k % 2:
        raise ValueError(f"cycle length must be even and >= 4, got {two_k}")
    if two_k > cap:
        raise LengthCapExceeded(f"cycle length {two_k} exceeds search cap {cap}")


def walk_tables(h: ParityCheckMatrix, two_k: int, side: str = "c") -> WalkTables:
    """Tables exact through length ``two_k - 1``, enough for ``L[(0, two_k)]``."""
    t = lollipop_recursion(h, two_k, side)
    if t.exact_through >= two_k - 1 and (0, two_k) in t.lollipops:
        return t
    return enumerate_tables(h, two_k, side)


def count_cycles_of_length(h: ParityCheckMatrix, two_k: int, cap: int = DEFAULT_CAP) -> tuple[int, list[int]]:
    """Number of ``two_k``-cycles and the number through each check node."""
    _check_length(two_k, cap)
    t = walk_tables(h, two_k, "c")
    diag = np.diag(t.tailless(two_k))
    total, rem = divmod(int(diag.sum()), two_k)
    if rem:
        raise ArithmeticError("trace of the tailless lollipop table is not divisible by the cycle length")
    return total, [int(d) // 2 for d in diag]


def census(h: ParityCheckMatrix, cap: int = DEFAULT_CAP) -> CycleCensus:
    """Girth, girth-cycle count and per-check participation, searching up to ``cap``."""
    if cap < 4 or cap % 2:
        raise ValueError(f"cap must be even and >= 4, got {cap}")
    t = lollipop_recursion(h, cap, "c")
    for two_k in range(4, cap + 1, 2):
        if (0, two_k) not in t.lollipops:
            break
        diag = np.diag(t.lollipops[(0, two_k)])
        if diag.any():
            return CycleCensus(two_k, int(diag.sum()) // two_k, tuple(int(d) // 2 for d in diag), cap)
    return CycleCensus(None, 0, (), cap)


def brute_force_cycle_oracle(h: ParityCheckMatrix, two_k: int) -> tuple[int, list[int]]:
    """Enumerate simple cycles by DFS; each cycle is rooted at its smallest vertex."""
    if h.m + h.n > 24:
        raise TooLarge("brute-force enumeration is limited to m + n <= 24")
    m = h.m
    adj = [[m + j for j in r] for r in h.rows] + [list(c) for c in h.cols]
    total = 0
    per_check = [0] * m

    def dfs(path: list[int], on_path: set[int]) -> None:
        nonlocal total
        root, last = path[0], path[-1]
        if len(path) == two_k:
            # second vertex < last vertex keeps one of the two directions
            if root in adj[last] and path[1] < path[-1]:
                total += 1
                for v in path:
                    if v < m:
                        per_check[v] += 1
            return
        for w in adj[last]:
            if w > root and w not in on_path:
                path.append(w)
                on_path.add(w)
                dfs(path, on_path)
                on_path.discard(w)
                path.pop()

    for root in range(m + h.n):
        dfs([root], {root})
    return total, per_check
