"""Wilczynski invariants of linear systems in Laguerre-Forsyth form.

The operator ``D^{k+1} + P_k D^k + ... + P_0`` is in Laguerre-Forsyth form
when ``P_k = 0`` and ``tr P_{k-1} = 0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .expr import Expr, X, parse
from .jets import ShapeError
from .matrix import MatrixExpr

Derivation = Callable[[Expr], Expr]


def d_dx(e: Expr) -> Expr:
    return e.diff(X)


class NotLaguerreForsyth(ValueError):
    pass


@dataclass(frozen=True)
class LinDiffOp:
    m: int
    top_order: int
    coeffs: tuple[MatrixExpr, ...]
    deriv: Derivation = d_dx

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.coeffs) != self.top_order:
            raise ShapeError(f"expected {self.top_order} coefficient matrices P_0..P_k")
        if any(P.n != self.m for P in self.coeffs):
            raise ShapeError(f"coefficient matrices must be {self.m}x{self.m}")

    @property
    def k(self) -> int:
        return self.top_order - 1

    def __add__(self, other: LinDiffOp) -> LinDiffOp:
        return LinDiffOp(
            self.m, self.top_order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.deriv
        )

    @classmethod
    def from_json(cls, data: Mapping) -> LinDiffOp:
        try:
            m, order = int(data["m"]), int(data["order"])
            ctx = (m, order - 1)
            coeffs = tuple(
                MatrixExpr([[parse(s, ctx) for s in row] for row in mat]) for mat in data["coeffs"]
            )
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed operator document: {exc}") from None
        return cls(m, order, coeffs)

    @classmethod
    def load(cls, path: str | Path) -> LinDiffOp:
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "order": self.top_order,
            "coeffs": [P.to_strings() for P in self.coeffs],
        }


def lf_check(op: LinDiffOp) -> tuple[bool, bool]:
    """``(semi_canonical, laguerre_forsyth)`` for the operator."""
    k = op.k
    semi = op.coeffs[k].is_zero()
    lf = semi and op.coeffs[k - 1].trace().is_zero() if k >= 1 else semi
    return semi, lf


def theta_coefficient(k: int, r: int, j: int) -> Fraction:
    """Signed rational coefficient of ``P_{k-r+j}^{(j-1)}`` in the degree-``r`` invariant."""
    sign = 1 if (j + 1) % 2 == 0 else -1
    return Fraction(
        sign * factorial(2 * r - j - 1) * factorial(k - r + j),
        factorial(r - j) * factorial(j - 1),
    )


def theta_from(
    coeffs: Sequence[MatrixExpr], k: int, r: int, derivative: Callable[[MatrixExpr, int, int], MatrixExpr]
) -> MatrixExpr:
    """Evaluate the invariant with a caller-supplied derivative.

    ``derivative(M, s, n)`` must return the ``n``-th derivative of the
    coefficient ``M = P_s``.
    """
    if not 2 <= r <= k + 1:
        raise ValueError(f"degree r must lie in 2..{k + 1}, got {r}")
    m = coeffs[0].n
    acc = MatrixExpr.zero(m)
    for j in range(1, r):
        s = k - r + j
        term = derivative(coeffs[s], s, j - 1)
        acc = acc + term * theta_coefficient(k, r, j)
    return acc


def theta(op: LinDiffOp, r: int) -> MatrixExpr:
    if not lf_check(op)[1]:
        raise NotLaguerreForsyth("operator is not in Laguerre-Forsyth form")

    def nth(M: MatrixExpr, _s: int, n: int) -> MatrixExpr:
        for _ in range(n):
            M = M.map(op.deriv)
        return M

    return theta_from(op.coeffs, op.k, r, nth)
