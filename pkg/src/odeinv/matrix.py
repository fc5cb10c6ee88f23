"""Small square matrices of :class:`~odeinv.expr.Expr` entries."""

from __future__ import annotations

from typing import Callable, Sequence

from .expr import ONE, ZERO, Expr


class MatrixExpr:
    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(Expr.coerce(v) for v in r) for r in rows)
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square")

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def zero(cls, n: int) -> MatrixExpr:
        return cls([[ZERO] * n for _ in range(n)])

    @classmethod
    def identity(cls, n: int, scale=1) -> MatrixExpr:
        s = Expr.coerce(scale)
        return cls([[s if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def build(cls, n: int, fn: Callable[[int, int], Expr]) -> MatrixExpr:
        return cls([[fn(i, j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> Expr:
        i, j = ij
        return self.rows[i][j]

    def map(self, fn: Callable[[Expr], Expr]) -> MatrixExpr:
        return MatrixExpr([[fn(v) for v in r] for r in self.rows])

    def __add__(self, other: MatrixExpr) -> MatrixExpr:
        return MatrixExpr([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: MatrixExpr) -> MatrixExpr:
        return MatrixExpr([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> MatrixExpr:
        return self.map(lambda v: -v)

    def __mul__(self, c) -> MatrixExpr:
        c = Expr.coerce(c)
        return self.map(lambda v: v * c)

    __rmul__ = __mul__

    def __matmul__(self, other: MatrixExpr) -> MatrixExpr:
        n = self.n
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = ZERO
                for a, b in zip(r, c):
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixExpr(out) if n else self

    def commutator(self, other: MatrixExpr) -> MatrixExpr:
        return self @ other - other @ self

    def trace(self) -> Expr:
        acc = ZERO
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def transpose(self) -> MatrixExpr:
        return MatrixExpr(list(zip(*self.rows)))

    def is_zero(self) -> bool:
        return all(v.is_zero() for r in self.rows for v in r)

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixExpr) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def minor(self, i: int, j: int) -> MatrixExpr:
        return MatrixExpr(
            [[v for c, v in enumerate(r) if c != j] for k, r in enumerate(self.rows) if k != i]
        )

    def det(self) -> Expr:
        n = self.n
        if n == 0:
            return ONE
        if n == 1:
            return self.rows[0][0]
        if n == 2:
            (a, b), (c, d) = self.rows
            return a * d - b * c
        acc = ZERO
        for j, v in enumerate(self.rows[0]):
            if v.is_zero():
                continue
            term = v * self.minor(0, j).det()
            acc = acc + term if j % 2 == 0 else acc - term
        return acc

    def adjugate(self) -> MatrixExpr:
        n = self.n
        if n == 1:
            return MatrixExpr([[ONE]])
        return MatrixExpr(
            [
                [self.minor(j, i).det() * (1 if (i + j) % 2 == 0 else -1) for j in range(n)]
                for i in range(n)
            ]
        )

    def apply(self, vec: Sequence[Expr]) -> list[Expr]:
        out = []
        for r in self.rows:
            acc = ZERO
            for a, b in zip(r, vec):
                acc = acc + a * b
            out.append(acc)
        return out

    def variables(self) -> set:
        out = set()
        for r in self.rows:
            for v in r:
                out |= v.variables()
        return out

    def to_strings(self) -> list[list[str]]:
        return [[str(v) for v in r] for r in self.rows]

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.rows) + "]"

    __repr__ = __str__


def tfp(mat: MatrixExpr) -> MatrixExpr:
    """Trace-free part of an endomorphism."""
    t = mat.trace()
    if t.is_zero():
        return mat
    return mat - MatrixExpr.identity(mat.n, t / mat.n)
