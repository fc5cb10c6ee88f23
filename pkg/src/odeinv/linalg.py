"""Sparse exact linear algebra over the rationals.

Rows are stored as ``{column: Fraction}``. Rank and echelon forms use
fraction-free integer elimination: every row is scaled to a primitive integer
vector and eliminated with cross-multiplication, so intermediate growth is
bounded by the row content gcd instead of by nested denominators.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Row = dict[int, Fraction]


def _primitive(row: dict[int, Fraction | int]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row with positive leading entry."""
    lcm = 1
    for v in row.values():
        if isinstance(v, Fraction):
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    out = {c: int(v * lcm) for c, v in row.items() if v}
    g = 0
    for v in out.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    if g > 1:
        out = {c: v // g for c, v in out.items()}
    if out and out[min(out)] < 0:
        out = {c: -v for c, v in out.items()}
    return out


def _eliminate(row: dict[int, int], piv: dict[int, int], col: int) -> dict[int, int]:
    a = piv[col]
    b = row[col]
    g = math.gcd(a, b)
    sa, sb = a // g, b // g
    out = {c: sa * v for c, v in row.items()}
    for c, v in piv.items():
        nv = out.get(c, 0) - sb * v
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    return _primitive(out)


def echelon(rows: Iterable[dict[int, Fraction | int]]) -> dict[int, dict[int, int]]:
    """Row echelon form keyed by pivot column (integer, primitive rows)."""
    pivots: dict[int, dict[int, int]] = {}
    for r in rows:
        row = _primitive(r)
        while row:
            col = min(row)
            piv = pivots.get(col)
            if piv is None:
                pivots[col] = row
                break
            row = _eliminate(row, piv, col)
    return pivots


def rref(rows: Iterable[dict[int, Fraction | int]]) -> dict[int, Row]:
    """Reduced row echelon form: pivot column -> row with pivot entry 1."""
    pivots = echelon(rows)
    reduced: dict[int, Row] = {}
    for col in sorted(pivots, reverse=True):
        row = pivots[col]
        lead = row[col]
        frow = {c: Fraction(v, lead) for c, v in row.items()}
        for c in [c for c in frow if c != col and c in reduced]:
            coef = frow.pop(c)
            for c2, v2 in reduced[c].items():
                if c2 == c:
                    continue
                nv = frow.get(c2, 0) - coef * v2
                if nv:
                    frow[c2] = nv
                else:
                    frow.pop(c2, None)
        reduced[col] = frow
    return reduced


class QMatrix:
    """Sparse rational matrix with exact rank, kernel and image computations."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Row] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: list[Row] = list(rows) if rows is not None else [{} for _ in range(nrows)]
        assert len(self.rows) == nrows

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> QMatrix:
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> QMatrix:
        ncols = len(data[0]) if data else 0
        rows = [{j: Fraction(v) for j, v in enumerate(r) if v} for r in data]
        return cls(len(data), ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[dict[int, Fraction]]) -> QMatrix:
        m = cls(nrows, len(columns))
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    m.rows[i][j] = Fraction(v)
        return m

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        return self.rows[i].get(j, Fraction(0))

    def __setitem__(self, key: tuple[int, int], value) -> None:
        i, j = key
        if value:
            self.rows[i][j] = Fraction(value)
        else:
            self.rows[i].pop(j, None)

    def add_to(self, i: int, j: int, value) -> None:
        nv = self.rows[i].get(j, 0) + value
        if nv:
            self.rows[i][j] = Fraction(nv)
        else:
            self.rows[i].pop(j, None)

    def to_dense(self) -> list[list[Fraction]]:
        return [[r.get(j, Fraction(0)) for j in range(self.ncols)] for r in self.rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and all(
            {c: v for c, v in a.items() if v} == {c: v for c, v in b.items() if v}
            for a, b in zip(self.rows, other.rows)
        )

    def is_zero(self) -> bool:
        return not any(any(r.values()) for r in self.rows)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def transpose(self) -> QMatrix:
        t = QMatrix(self.ncols, self.nrows)
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                t.rows[j][i] = v
        return t

    T = property(transpose)

    def __matmul__(self, other: QMatrix) -> QMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = QMatrix(self.nrows, other.ncols)
        orow = other.rows
        for i, r in enumerate(self.rows):
            acc: Row = {}
            for k, v in r.items():
                for j, w in orow[k].items():
                    acc[j] = acc.get(j, 0) + v * w
            out.rows[i] = {j: x for j, x in acc.items() if x}
        return out

    def __add__(self, other: QMatrix) -> QMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = QMatrix(self.nrows, self.ncols, [dict(r) for r in self.rows])
        for i, r in enumerate(other.rows):
            for j, v in r.items():
                out.add_to(i, j, v)
        return out

    def __neg__(self) -> QMatrix:
        return QMatrix(self.nrows, self.ncols, [{j: -v for j, v in r.items()} for r in self.rows])

    def __sub__(self, other: QMatrix) -> QMatrix:
        return self + (-other)

    def scale_rows(self, factors: Sequence[Fraction]) -> QMatrix:
        return QMatrix(
            self.nrows,
            self.ncols,
            [{j: v * f for j, v in r.items()} for r, f in zip(self.rows, factors)],
        )

    def scale_cols(self, factors: Sequence[Fraction]) -> QMatrix:
        return QMatrix(
            self.nrows, self.ncols, [{j: v * factors[j] for j, v in r.items()} for r in self.rows]
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> QMatrix:
        cmap = {c: k for k, c in enumerate(cols)}
        out = []
        for i in rows:
            out.append({cmap[j]: v for j, v in self.rows[i].items() if j in cmap})
        return QMatrix(len(rows), len(cols), out)

    def hstack(self, other: QMatrix) -> QMatrix:
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        off = self.ncols
        rows = [dict(a) for a in self.rows]
        for r, b in zip(rows, other.rows):
            for j, v in b.items():
                r[j + off] = v
        return QMatrix(self.nrows, self.ncols + other.ncols, rows)

    def vstack(self, other: QMatrix) -> QMatrix:
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return QMatrix(
            self.nrows + other.nrows,
            self.ncols,
            [dict(r) for r in self.rows] + [dict(r) for r in other.rows],
        )

    def apply(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        out = {}
        for i, r in enumerate(self.rows):
            s = sum((v * vec[j] for j, v in r.items() if j in vec), Fraction(0))
            if s:
                out[i] = s
        return out

    def rank(self) -> int:
        # eliminate along the shorter side
        if self.nrows <= self.ncols:
            return len(echelon(self.rows))
        return len(echelon(self.transpose().rows))

    def nullspace(self) -> list[dict[int, Fraction]]:
        """Basis of the right kernel as sparse column vectors."""
        red = rref(self.rows)
        free = [j for j in range(self.ncols) if j not in red]
        basis = []
        for f in free:
            vec = {f: Fraction(1)}
            for p, row in red.items():
                v = row.get(f)
                if v:
                    vec[p] = -v
            basis.append(vec)
        return basis

    def nullity(self) -> int:
        return self.ncols - self.rank()

    def column_space_basis(self) -> list[dict[int, Fraction]]:
        """Independent columns spanning the image."""
        t = self.transpose()
        return [
            {i: Fraction(v) for i, v in row.items()} for row in echelon(t.rows).values()
        ]

    def __repr__(self) -> str:
        return f"QMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def span_rank(vectors: Iterable[dict[int, Fraction]]) -> int:
    return len(echelon(vectors))


def in_span(vec: dict[int, Fraction], vectors: Sequence[dict[int, Fraction]]) -> bool:
    return span_rank(list(vectors) + [vec]) == span_rank(vectors)
