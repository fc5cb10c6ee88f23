"""Classical invariant formulas per (m, order) and the trivializability verdict."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .expr import ZERO, Expr, jet
from .jets import OdeSystem, ShapeError, TotalDerivative
from .matrix import MatrixExpr
from . import genwilczynski

TRIVIALIZABLE = "Trivializable"
NOT_TRIVIALIZABLE = "NotTrivializable"
UNDECIDED = "Undecided"


@dataclass
class InvariantTensor:
    """A tensor with one upper index (or none) and ``lower`` lower indices.

    ``components`` maps 1-based index tuples ``(i, j1, ..., jp)`` (or ``()``
    for scalars) to expressions. ``partial`` marks invariants known only
    modulo others; they never count as witnesses of non-trivializability.
    """

    name: str
    indices: str
    components: dict[tuple[int, ...], Expr]
    degree: int | None = None
    partial: bool = False

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.components.values())

    def nonzero(self) -> list[tuple[tuple[int, ...], Expr]]:
        return [(idx, e) for idx, e in sorted(self.components.items()) if not e.is_zero()]

    def __getitem__(self, idx) -> Expr:
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self.components.get(idx, ZERO)

    @staticmethod
    def format_index(idx: tuple[int, ...], indices: str) -> str:
        if not idx:
            return ""
        if ";" in indices:
            return f"{idx[0]};" + "".join(map(str, idx[1:]))
        return "".join(map(str, idx))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "indices": self.indices,
            "degree": self.degree,
            "partial": self.partial,
            "components": {
                self.format_index(idx, self.indices): str(e) for idx, e in sorted(self.components.items())
            },
            "is_zero": self.is_zero(),
        }

    @classmethod
    def scalar(cls, name: str, e: Expr, degree=None, partial=False) -> InvariantTensor:
        return cls(name, "", {(): e}, degree, partial)

    @classmethod
    def from_matrix(cls, name: str, M: MatrixExpr, degree=None) -> InvariantTensor:
        comps = {(i + 1, j + 1): M[i, j] for i in range(M.n) for j in range(M.n)}
        return cls(name, "i;j", comps, degree)


@dataclass
class Verdict:
    status: str
    equivalence_kind: str = "point"
    witnesses: list[tuple[str, str, str]] = field(default_factory=list)
    blocked_by: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status == NOT_TRIVIALIZABLE and not self.witnesses:
            raise ValueError("a negative verdict needs a witness")

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "equivalence_kind": self.equivalence_kind,
            "witnesses": [{"invariant": n, "index": i, "value": v} for n, i, v in self.witnesses],
            "blocked_by": list(self.blocked_by),
        }


# -- trace-free parts ---------------------------------------------------------


def tfp(t: InvariantTensor, m: int) -> InvariantTensor:
    """Trace-free part of a tensor with one upper and p symmetric lower indices.

    The correction is ``c * sum_a delta^i_{j_a} tau_{J - j_a}`` with ``tau``
    the contraction of the upper index with a lower one; ``c`` is found by
    solving the contraction condition rather than by a closed formula.
    """
    if not t.components:
        return t
    p = len(next(iter(t.components))) - 1
    if p < 1:
        raise ShapeError("tfp needs at least one lower index to contract with")
    rng = range(1, m + 1)
    lower = list(itertools.product(rng, repeat=p - 1))
    tau = {J: _sum(t[(i, i) + J] for i in rng) for J in lower}
    if all(v.is_zero() for v in tau.values()):
        return t

    def correction(i, J):
        acc = ZERO
        for a, ja in enumerate(J):
            if ja == i:
                acc = acc + tau[J[:a] + J[a + 1 :]]
        return acc

    full = list(itertools.product(rng, repeat=p + 1))
    E = {idx: correction(idx[0], idx[1:]) for idx in full}
    contr_E = {J: _sum(E[(i, i) + J] for i in rng) for J in lower}
    # contraction(T) - c * contraction(E) = 0 determines c
    c = None
    for J in lower:
        if not contr_E[J].is_zero():
            c = tau[J] / contr_E[J]
            break
    assert c is not None and c.is_constant(), "trace correction is not a constant multiple"
    out = {idx: t[idx] - E[idx] * c for idx in full}
    res = InvariantTensor(t.name, t.indices, out, t.degree, t.partial)
    for J in lower:
        if not _sum(res[(i, i) + J] for i in rng).is_zero():
            raise ArithmeticError("trace removal failed")
    return res


def tfp_matrix(M: MatrixExpr) -> MatrixExpr:
    from .matrix import tfp as _tfp

    return _tfp(M)


def _sum(items: Iterable[Expr]) -> Expr:
    acc = ZERO
    for e in items:
        acc = acc + e
    return acc


# -- helpers for the classical subscript notation -----------------------------


class _Scalar:
    """``f_{...}`` for a single equation: digits are partials in ``y^{(r)}``, ``x`` is a total derivative."""

    def __init__(self, sys: OdeSystem):
        self.f = sys.rhs[0]
        self.D = TotalDerivative(sys)
        self._cache: dict[str, Expr] = {"": self.f}

    def __call__(self, subs: str) -> Expr:
        if subs in self._cache:
            return self._cache[subs]
        head, last = subs[:-1], subs[-1]
        base = self(head)
        out = self.D(base) if last == "x" else base.diff(jet(1, int(last)))
        self._cache[subs] = out
        return out


def _jac(sys: OdeSystem, r: int) -> MatrixExpr:
    return MatrixExpr(
        [[sys.rhs[i].diff(jet(j, r)) for j in range(1, sys.m + 1)] for i in range(sys.m)]
    )


def _require(sys: OdeSystem, m=None, order=None, min_m=None, min_order=None):
    if m is not None and sys.m != m:
        raise ShapeError(f"requires m={m}, got m={sys.m}")
    if min_m is not None and sys.m < min_m:
        raise ShapeError(f"requires m>={min_m}, got m={sys.m}")
    if order is not None and sys.order != order:
        raise ShapeError(f"requires order {order}, got {sys.order}")
    if min_order is not None and sys.order < min_order:
        raise ShapeError(f"requires order >= {min_order}, got {sys.order}")


def _second_partials(sys: OdeSystem, r: int) -> InvariantTensor:
    m = sys.m
    comps = {}
    for i in range(1, m + 1):
        fi = sys.rhs[i - 1]
        for j in range(1, m + 1):
            dj = fi.diff(jet(j, r))
            for l in range(1, m + 1):
                comps[(i, j, l)] = dj.diff(jet(l, r))
    return InvariantTensor("I_2", "i;jl", comps, 2)


# -- per-order formulas -------------------------------------------------------


def tresse(sys: OdeSystem) -> tuple[Expr, Expr]:
    _require(sys, m=1, order=2)
    f = _Scalar(sys)
    half, sixth, two3 = Fraction(1, 2), Fraction(1, 6), Fraction(2, 3)
    I1 = f("1111")
    I2 = (
        f("11xx") * sixth
        - f("1") * f("11x") * sixth
        - f("01x") * two3
        + f("1") * f("01") * two3
        + f("00")
        - f("0") * f("11") * half
    )
    return I1, I2


def wunschmann(sys: OdeSystem) -> Expr:
    _require(sys, m=1, order=3)
    f = _Scalar(sys)
    return (
        -f("0")
        - f("1") * f("2") * Fraction(1, 3)
        - f("2") ** 3 * Fraction(2, 27)
        + f("1x") * Fraction(1, 2)
        + f("2") * f("2x") * Fraction(1, 3)
        - f("2xx") * Fraction(1, 6)
    )


def chern_wunschmann(sys: OdeSystem) -> tuple[Expr, Expr]:
    _require(sys, m=1, order=3)
    return _Scalar(sys)("2222"), wunschmann(sys)


# Coefficients (a, b, c) of f_22 * (a f_2x + b f_2^2 + c f_1) in Cartan's C.
# The printed version does not vanish on point transforms of the trivial
# equation; the corrected one is the unique choice that does (see tests).
CARTAN_BRACKET_PRINTED = (Fraction(2, 3), Fraction(-4, 9), Fraction(-2))
CARTAN_BRACKET = (Fraction(1, 3), Fraction(-1, 9), Fraction(-1))


def cartan_point3(sys: OdeSystem, bracket=CARTAN_BRACKET) -> tuple[Expr, Expr, Expr, Expr]:
    """``(W, f_222, f_22^2 + 6 f_122 + 2 f_2 f_222, C)``; ``C`` uses ``W_2 = dW/dy''``."""
    _require(sys, m=1, order=3)
    f = _Scalar(sys)
    W = wunschmann(sys)
    second = f("22") ** 2 + f("122") * 6 + f("2") * f("222") * 2
    a, b, c = bracket
    C = (
        f("11")
        + W.diff(jet(1, 2)) * 2
        - f("02") * 2
        + f("2") * f("12") * Fraction(2, 3)
        + f("22") * (f("2x") * a + f("2") ** 2 * b + f("1") * c)
    )
    return W, f("222"), second, C


def fels_w2(sys: OdeSystem) -> MatrixExpr:
    _require(sys, order=2)
    D = TotalDerivative(sys)
    A0, A1 = _jac(sys, 0), _jac(sys, 1)
    return tfp_matrix(A0 - A1.map(D) * Fraction(1, 2) + (A1 @ A1) * Fraction(1, 4))


def fels(sys: OdeSystem) -> tuple[InvariantTensor, InvariantTensor]:
    _require(sys, order=2)
    m = sys.m
    W2 = InvariantTensor.from_matrix("W_2", fels_w2(sys), 2)
    comps = {}
    for i in range(1, m + 1):
        for j, k, l in itertools.product(range(1, m + 1), repeat=3):
            comps[(i, j, k, l)] = sys.rhs[i - 1].diff(jet(j, 1)).diff(jet(k, 1)).diff(jet(l, 1))
    I3 = tfp(InvariantTensor("I_3", "i;jkl", comps, 3), m)
    return W2, I3


@dataclass
class ThirdOrderSet:
    W2: MatrixExpr
    W3: MatrixExpr
    I2: InvariantTensor
    I4: dict[tuple[int, int], Expr]
    H_minus1: list[Expr]
    H_x: Expr


def third_order_system(sys: OdeSystem) -> ThirdOrderSet:
    _require(sys, order=3)
    m = sys.m
    D = TotalDerivative(sys)
    fy, fp, fq = _jac(sys, 0), _jac(sys, 1), _jac(sys, 2)
    Dfq = fq.map(D)
    base2 = fp - Dfq + (fq @ fq) * Fraction(1, 3)
    W2 = tfp_matrix(base2)
    H_x = base2.trace() * Fraction(-1, 4 * m)
    DH_x = D(H_x)
    W3 = (
        fy
        + (fq @ fp) * Fraction(1, 3)
        - fp.map(D)
        + Dfq.map(D) * Fraction(2, 3)
        + (fq @ fq @ fq) * Fraction(2, 27)
        - (fq @ Dfq) * Fraction(4, 9)
        - (Dfq @ fq) * Fraction(2, 9)
        - MatrixExpr.identity(m, DH_x * 2)
    )
    q = [jet(j, 2) for j in range(1, m + 1)]
    p = [jet(j, 1) for j in range(1, m + 1)]
    second = _second_partials(sys, 2)
    I2 = tfp(second, m)
    H = [
        _sum(second[(i, i, j)] for i in range(1, m + 1)) * Fraction(1, 6 * (m + 1))
        for j in range(1, m + 1)
    ]
    DH = [D(h) for h in H]
    I4 = {}
    for j in range(m):
        for k in range(m):
            val = (
                -H[k].diff(p[j])
                + H_x.diff(q[j]).diff(q[k])
                - DH[j].diff(q[k])
                - _sum(H[l] * fq[l, j] for l in range(m)).diff(q[k])
                + H[j] * H[k] * 2
            )
            I4[(j + 1, k + 1)] = val
    return ThirdOrderSet(W2, W3, I2, I4, H, H_x)


def scalar_leading(sys: OdeSystem) -> list[InvariantTensor]:
    """Displayed leading invariants for a scalar equation of order >= 4.

    Entries defined only modulo other invariants carry ``partial=True``.
    """
    _require(sys, m=1, min_order=4)
    f = _Scalar(sys)
    k = sys.k
    out = []
    if sys.order == 4:
        out.append(InvariantTensor.scalar("I_3", f("333"), 3))
        J4 = (
            f("233")
            + f("33") ** 2 * Fraction(1, 6)
            + f("3") * f("333") * Fraction(9, 8)
            + f("333x") * Fraction(3, 4)
        )
        out.append(InvariantTensor.scalar("J_4", J4, 4))
        return out
    kk = str(k)
    out.append(InvariantTensor.scalar("I_2", f(kk + kk), 2))
    if sys.order == 5:
        J6 = f("234") - f("333") * Fraction(2, 3) - f("34") ** 2 * Fraction(1, 2)
        out.append(InvariantTensor.scalar("J_6", J6, 6, partial=True))
    else:
        out.append(
            InvariantTensor.scalar("J_3", f(kk + str(k - 1)), 3, partial=True)
        )
        if sys.order >= 7:
            out.append(
                InvariantTensor.scalar(
                    "J_4", f(str(k - 1) * 2), 4, partial=True
                )
            )
    return out


def i2_higher(sys: OdeSystem) -> InvariantTensor:
    """Second partials of ``f^i`` in the top jet variables, without trace removal."""
    _require(sys, min_m=2, min_order=4)
    return _second_partials(sys, sys.k)


# -- aggregation ---------------------------------------------------------------


def _wilczynski_tensors(sys: OdeSystem, convention=None) -> list[InvariantTensor]:
    ws = genwilczynski.wilczynski_all(sys, convention)
    return [InvariantTensor.from_matrix(f"W_{r}", W, r) for r, W in sorted(ws.items())]


def all_invariants(sys: OdeSystem, convention=None) -> dict[str, list[InvariantTensor]]:
    """Invariant sets grouped by the equivalence they decide (``point``/``contact``)."""
    m, order = sys.m, sys.order
    if m == 1 and order == 2:
        I1, I2 = tresse(sys)
        return {
            "point": [InvariantTensor.scalar("I_1", I1), InvariantTensor.scalar("I_2", I2)]
        }
    if m == 1 and order == 3:
        W, f222, second, C = cartan_point3(sys)
        I1 = _Scalar(sys)("2222")
        return {
            "contact": [InvariantTensor.scalar("I_1", I1), InvariantTensor.scalar("W", W, 3)],
            "point": [
                InvariantTensor.scalar("W", W, 3),
                InvariantTensor.scalar("f_222", f222),
                InvariantTensor.scalar("f_22^2+6f_122+2f_2f_222", second),
                InvariantTensor.scalar("C", C),
            ],
        }
    if m == 1:
        return {"contact": _wilczynski_tensors(sys, convention) + scalar_leading(sys)}
    if order == 2:
        return {"point": list(fels(sys))}
    if order == 3:
        ms = third_order_system(sys)
        return {
            "point": [
                InvariantTensor.from_matrix("W_2", ms.W2, 2),
                InvariantTensor.from_matrix("W_3", ms.W3, 3),
                InvariantTensor("I_2", ms.I2.indices, ms.I2.components, 2),
                InvariantTensor("I_4", "jk", ms.I4, 4),
            ]
        }
    return {"point": _wilczynski_tensors(sys, convention) + [i2_higher(sys)]}


def _verdict(invs: list[InvariantTensor], kind: str) -> Verdict:
    witnesses, blocked = [], []
    for t in invs:
        nz = t.nonzero()
        if not nz:
            continue
        if t.partial:
            blocked.append(t.name)
            continue
        idx, e = nz[0]
        witnesses.append((t.name, InvariantTensor.format_index(idx, t.indices), str(e)))
    if witnesses:
        return Verdict(NOT_TRIVIALIZABLE, kind, witnesses)
    if blocked:
        return Verdict(UNDECIDED, kind, blocked_by=blocked)
    return Verdict(TRIVIALIZABLE, kind)


def all_verdicts(sys: OdeSystem, convention=None, invariants=None) -> dict[str, Verdict]:
    groups = invariants or all_invariants(sys, convention)
    return {kind: _verdict(invs, kind) for kind, invs in groups.items()}


def trivializable(sys: OdeSystem, convention=None) -> Verdict:
    """Deciding verdict: point equivalence when available, contact otherwise."""
    vs = all_verdicts(sys, convention)
    return vs.get("point") or vs["contact"]


def report(sys: OdeSystem, convention=None) -> dict:
    groups = all_invariants(sys, convention)
    verdicts = all_verdicts(sys, convention, groups)
    seen, flat = set(), []
    for invs in groups.values():
        for t in invs:
            if t.name not in seen:
                seen.add(t.name)
                flat.append(t.to_json())
    deciding = verdicts.get("point") or verdicts["contact"]
    out = {"system": sys.to_json(), "invariants": flat, "verdict": deciding.to_json()}
    if len(verdicts) > 1:
        out["verdicts"] = {k: v.to_json() for k, v in verdicts.items()}
    return out
