"""Sparse parity-check matrices, degree profiles and the alist format."""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np


class EmptyRowOrColumn(ValueError):
    """A check node or variable node has no edges."""

    def __init__(self, kind: str, index: int):
        super().__init__(f"{kind} {index} is empty")
        self.kind = kind
        self.index = index


class ParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class LengthMismatch(ValueError):
    pass


class DegenerateProfile(ValueError):
    pass


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Binary M x N parity-check matrix stored as sorted adjacency lists.

    ``rows[i]`` holds the variable indices attached to check ``i`` and
    ``cols[j]`` the check indices attached to variable ``j``. Instances are
    immutable; the numpy views below are computed lazily and cached.
    """

    m: int
    n: int
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.m or len(self.cols) != self.n:
            raise ValueError("adjacency list lengths disagree with (m, n)")
        for kind, lists, bound in (("row", self.rows, self.n), ("col", self.cols, self.m)):
            for idx, nbrs in enumerate(lists):
                if not nbrs:
                    raise EmptyRowOrColumn(kind, idx)
                if any(b <= a for a, b in zip(nbrs, nbrs[1:])):
                    raise ValueError(f"{kind} {idx} is not strictly increasing")
                if nbrs[0] < 0 or nbrs[-1] >= bound:
                    raise ValueError(f"{kind} {idx} has an out-of-range index")
        transposed: list[list[int]] = [[] for _ in range(self.n)]
        for i, nbrs in enumerate(self.rows):
            for j in nbrs:
                transposed[j].append(i)
        if tuple(map(tuple, transposed)) != self.cols:
            raise ValueError("rows and cols are inconsistent")

    @classmethod
    def from_rows(cls, m: int, n: int, rows: Iterable[Iterable[int]]) -> "ParityCheckMatrix":
        rows_t = tuple(tuple(sorted(set(r))) for r in rows)
        cols: list[list[int]] = [[] for _ in range(n)]
        for i, nbrs in enumerate(rows_t):
            for j in nbrs:
                if not 0 <= j < n:
                    raise ValueError(f"row {i} has an out-of-range index {j}")
                cols[j].append(i)
        return cls(m, n, rows_t, tuple(map(tuple, cols)))

    @property
    def num_edges(self) -> int:
        return sum(len(r) for r in self.rows)

    @cached_property
    def row_degrees(self) -> np.ndarray:
        return np.array([len(r) for r in self.rows], dtype=np.int64)

    @cached_property
    def col_degrees(self) -> np.ndarray:
        return np.array([len(c) for c in self.cols], dtype=np.int64)

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints ``(check, variable)`` in row-major order."""
        chk = np.repeat(np.arange(self.m), self.row_degrees)
        var = np.fromiter((j for r in self.rows for j in r), dtype=np.int64, count=self.num_edges)
        return chk, var

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        chk, var = self.edges
        h[chk, var] = 1
        return h

    def permuted(self, row_perm: Sequence[int] | None = None, col_perm: Sequence[int] | None = None) -> "ParityCheckMatrix":
        """Matrix with rows/columns reordered: new row ``k`` is old row ``row_perm[k]``."""
        dense = self.to_dense()
        if row_perm is not None:
            dense = dense[np.asarray(row_perm)]
        if col_perm is not None:
            dense = dense[:, np.asarray(col_perm)]
        return from_dense(dense)


@dataclass(frozen=True)
class DegreeProfile:
    """Edge-perspective degree distributions.

    ``lambda_coeffs[k]`` is the coefficient of x**k in lambda(x), i.e. the
    fraction of edges attached to variable nodes of degree k + 1. Same layout
    for ``nu_coeffs`` on the check side.
    """

    lambda_coeffs: tuple[float, ...]
    nu_coeffs: tuple[float, ...]
    design_rate: float = 0.5

    def __post_init__(self):
        for name, coeffs in (("lambda", self.lambda_coeffs), ("nu", self.nu_coeffs)):
            if not coeffs or any(c < 0 for c in coeffs):
                raise DegenerateProfile(f"{name} coefficients must be non-negative")
            if abs(sum(coeffs) - 1.0) > 1e-9:
                raise DegenerateProfile(f"{name} coefficients sum to {sum(coeffs)!r}, not 1")
        if not 0.0 <= self.design_rate < 1.0:
            raise DegenerateProfile("design_rate must lie in [0, 1)")

    @classmethod
    def from_degrees(cls, var: dict[int, float], chk: dict[int, float], design_rate: float = 0.5) -> "DegreeProfile":
        """Build from ``{degree: edge fraction}`` maps."""

        def coeffs(d: dict[int, float]) -> tuple[float, ...]:
            out = [0.0] * max(d)
            for deg, frac in d.items():
                out[deg - 1] = frac
            return tuple(out)

        return cls(coeffs(var), coeffs(chk), design_rate)


def from_dense(bits) -> ParityCheckMatrix:
    h = np.asarray(bits)
    if h.ndim != 2 or h.size == 0:
        raise ValueError("expected a non-empty 2-D grid")
    if not np.isin(h, (0, 1)).all():
        raise ValueError("entries must be 0 or 1")
    m, n = h.shape
    for i in range(m):
        if not h[i].any():
            raise EmptyRowOrColumn("row", i)
    for j in range(n):
        if not h[:, j].any():
            raise EmptyRowOrColumn("col", j)
    rows = tuple(tuple(int(j) for j in np.flatnonzero(h[i])) for i in range(m))
    cols = tuple(tuple(int(i) for i in np.flatnonzero(h[:, j])) for j in range(n))
    return ParityCheckMatrix(m, n, rows, cols)


def _int_tokens(line: str, lineno: int) -> list[int]:
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise ParseError(lineno, f"non-integer token in {line.strip()!r}") from None


def read_alist(text: str | TextIO) -> ParityCheckMatrix:
    """Parse an alist description.

    Zero entries in the index lists are treated as padding and dropped.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = [(k + 1, ln) for k, ln in enumerate(text.splitlines()) if ln.strip()]
    if len(lines) < 4:
        raise ParseError(len(lines) + 1, "truncated header")

    def take(pos: int, expected: int | None = None) -> list[int]:
        if pos >= len(lines):
            raise ParseError(lines[-1][0] + 1, "unexpected end of input")
        lineno, ln = lines[pos]
        vals = _int_tokens(ln, lineno)
        if expected is not None and len(vals) != expected:
            raise ParseError(lineno, f"expected {expected} values, found {len(vals)}")
        return vals

    n, m = take(0, 2)
    if n < 1 or m < 1:
        raise ParseError(lines[0][0], "dimensions must be positive")
    max_col, max_row = take(1, 2)
    col_deg = take(2, n)
    row_deg = take(3, m)
    if max(col_deg) != max_col or max(row_deg) != max_row:
        raise ParseError(lines[1][0], "declared maximum degree does not match degree list")
    if sum(col_deg) != sum(row_deg):
        raise ParseError(lines[3][0], "column and row degree totals differ")

    def read_lists(start: int, count: int, degrees: list[int], bound: int, kind: str) -> list[list[int]]:
        out = []
        for k in range(count):
            lineno = lines[start + k][0] if start + k < len(lines) else lines[-1][0] + 1
            idx = [v for v in take(start + k) if v != 0]
            if len(idx) != degrees[k]:
                raise ParseError(lineno, f"{kind} {k}: declared degree {degrees[k]}, listed {len(idx)}")
            if any(not 1 <= v <= bound for v in idx):
                raise ParseError(lineno, f"{kind} {k}: index out of range 1..{bound}")
            if len(set(idx)) != len(idx):
                raise ParseError(lineno, f"{kind} {k}: duplicate index")
            out.append(sorted(v - 1 for v in idx))
        return out

    cols = read_lists(4, n, col_deg, m, "column")
    rows = read_lists(4 + n, m, row_deg, n, "row")
    if 4 + n + m < len(lines):
        raise ParseError(lines[4 + n + m][0], "trailing content")

    transposed: list[list[int]] = [[] for _ in range(n)]
    for i, r in enumerate(rows):
        for j in r:
            transposed[j].append(i)
    for j in range(n):
        if transposed[j] != cols[j]:
            raise ParseError(lines[4 + j][0], f"column {j} disagrees with the row lists")
    try:
        return ParityCheckMatrix(m, n, tuple(map(tuple, rows)), tuple(map(tuple, cols)))
    except EmptyRowOrColumn as exc:
        raise ParseError(lines[2][0], str(exc)) from None


def write_alist(h: ParityCheckMatrix, sink: TextIO | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"{h.n} {h.m}\n")
    buf.write(f"{int(h.col_degrees.max())} {int(h.row_degrees.max())}\n")
    buf.write(" ".join(str(len(c)) for c in h.cols) + "\n")
    buf.write(" ".join(str(len(r)) for r in h.rows) + "\n")
    for c in h.cols:
        buf.write(" ".join(str(i + 1) for i in c) + "\n")
    for r in h.rows:
        buf.write(" ".join(str(j + 1) for j in r) + "\n")
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def syndrome(h: ParityCheckMatrix, x_hat) -> np.ndarray:
    x = np.asarray(x_hat)
    if x.ndim != 1 or x.shape[0] != h.n:
        raise LengthMismatch(f"expected a length-{h.n} vector, got shape {x.shape}")
    chk, var = h.edges
    return (np.bincount(chk, weights=x[var].astype(np.int64) & 1, minlength=h.m).astype(np.int64) & 1).astype(np.uint8)


def average_connectivity(p: DegreeProfile) -> float:
    """Mean variable degree implied by lambda(x): 1 / integral_0^1 lambda(x) dx."""
    integral = sum(c / (k + 1) for k, c in enumerate(p.lambda_coeffs))
    if integral <= 0.0:
        raise DegenerateProfile("integral of lambda(x) is zero")
    return 1.0 / integral


def empirical_connectivity(h: ParityCheckMatrix) -> float:
    return h.num_edges / h.n
