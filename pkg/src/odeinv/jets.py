"""ODE systems on jet space and the action of point transformations.

A system of ``m`` equations of order ``k+1`` is stored in solved form
``y^i_{k+1} = f^i(x, y^j_r)``, ``r <= k``. Point maps act through their
prolongation; :func:`pullback` produces the transformed system in solved form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .expr import ONE, ZERO, Expr, VarId, X, jet, parse
from .matrix import MatrixExpr


class ShapeError(ValueError):
    """Inputs of the wrong size or order."""


class SingularMapError(ValueError):
    """A point map degenerates on the data it is applied to."""


@dataclass(frozen=True)
class OdeSystem:
    m: int
    order: int
    rhs: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(Expr.coerce(e) for e in self.rhs))
        if self.m < 1 or self.order < 2:
            raise ShapeError(f"need m >= 1 and order >= 2, got m={self.m}, order={self.order}")
        if len(self.rhs) != self.m:
            raise ShapeError(f"expected {self.m} right-hand sides, got {len(self.rhs)}")
        for e in self.rhs:
            for v in e.variables():
                if v.kind == "jet" and (v.i > self.m or v.r > self.k):
                    raise ShapeError(f"right-hand side uses {v} outside J^{self.k}")

    @property
    def k(self) -> int:
        return self.order - 1

    @classmethod
    def trivial(cls, m: int, order: int) -> OdeSystem:
        return cls(m, order, (ZERO,) * m)

    @classmethod
    def from_strings(cls, m: int, order: int, rhs: Sequence[str]) -> OdeSystem:
        return cls(m, order, tuple(parse(s, (m, order - 1)) for s in rhs))

    def jet_vars(self) -> list[VarId]:
        return [jet(i, r) for i in range(1, self.m + 1) for r in range(self.k + 1)]

    def to_json(self) -> dict:
        return {"m": self.m, "order": self.order, "rhs": [str(e) for e in self.rhs]}

    @classmethod
    def from_json(cls, data: Mapping) -> OdeSystem:
        try:
            m, order, rhs = int(data["m"]), int(data["order"]), list(data["rhs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed system document: {exc}") from None
        return cls.from_strings(m, order, rhs)

    @classmethod
    def load(cls, path: str | Path) -> OdeSystem:
        return cls.from_json(json.loads(Path(path).read_text()))


class TotalDerivative:
    """The total derivative along a system, optionally extended to auxiliary symbols.

    ``aux_rules`` maps an auxiliary symbol to the image of that symbol, so the
    derivation can carry formal quantities such as a reparametrization
    parameter together with its defining differential relation.
    """

    def __init__(self, sys: OdeSystem, aux_rules: Mapping[VarId, Expr] | None = None):
        self.sys = sys
        images: dict[VarId, Expr] = {X: ONE}
        k = sys.k
        for i in range(1, sys.m + 1):
            for r in range(k):
                images[jet(i, r)] = Expr.var(jet(i, r + 1))
            if not sys.rhs[i - 1].is_zero():
                images[jet(i, k)] = sys.rhs[i - 1]
        for v, e in (aux_rules or {}).items():
            if not e.is_zero():
                images[v] = e
        self.images = images
        self.aux_rules = dict(aux_rules or {})

    def with_rules(self, aux_rules: Mapping[VarId, Expr]) -> TotalDerivative:
        return TotalDerivative(self.sys, {**self.aux_rules, **aux_rules})

    def __call__(self, e: Expr) -> Expr:
        k = self.sys.k
        acc = ZERO
        for v in e.variables():
            if v.kind == "jet" and v.r > k:
                raise ShapeError(f"total derivative of an expression containing {v}")
            img = self.images.get(v)
            if img is None:
                continue
            acc = acc + e.diff(v) * img
        return acc

    def matrix(self, mat: MatrixExpr) -> MatrixExpr:
        return mat.map(self)

    def power(self, e: Expr, n: int) -> Expr:
        for _ in range(n):
            e = self(e)
        return e


@dataclass(frozen=True)
class PointMap:
    """Point transformation ``(x, y) -> (target_x, target_y)`` of R^{m+1}."""

    m: int
    x: Expr
    y: tuple[Expr, ...]
    jacobian_det: Expr = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "x", Expr.coerce(self.x))
        object.__setattr__(self, "y", tuple(Expr.coerce(e) for e in self.y))
        if len(self.y) != self.m:
            raise ShapeError(f"expected {self.m} target components, got {len(self.y)}")
        allowed = {X} | {jet(i, 0) for i in range(1, self.m + 1)}
        for e in (self.x, *self.y):
            bad = {v for v in e.variables() if v.kind != "aux"} - allowed
            if bad:
                raise ShapeError(f"point map uses {sorted(map(str, bad))}")
        coords = [X] + [jet(i, 0) for i in range(1, self.m + 1)]
        jac = MatrixExpr([[comp.diff(c) for c in coords] for comp in (self.x, *self.y)])
        det = jac.det()
        if det.is_zero():
            raise SingularMapError("Jacobian determinant is identically zero")
        object.__setattr__(self, "jacobian_det", det)

    @classmethod
    def identity(cls, m: int) -> PointMap:
        return cls(m, Expr.var(X), tuple(Expr.var(jet(i, 0)) for i in range(1, m + 1)))

    @classmethod
    def from_strings(cls, m: int, x: str, y: Sequence[str]) -> PointMap:
        ctx = (m, 0)
        return cls(m, parse(x, ctx), tuple(parse(s, ctx) for s in y))

    def substitution(self) -> dict[VarId, Expr]:
        sub = {X: self.x}
        for i, e in enumerate(self.y, start=1):
            sub[jet(i, 0)] = e
        return sub

    def compose(self, inner: PointMap) -> PointMap:
        """``self o inner``: apply ``inner`` first."""
        sub = inner.substitution()
        return PointMap(self.m, self.x.subs(sub), tuple(e.subs(sub) for e in self.y))

    def to_json(self) -> dict:
        return {"m": self.m, "x": str(self.x), "y": [str(e) for e in self.y]}

    @classmethod
    def from_json(cls, data: Mapping) -> PointMap:
        try:
            return cls.from_strings(int(data["m"]), data["x"], list(data["y"]))
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed point-map document: {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> PointMap:
        return cls.from_json(json.loads(Path(path).read_text()))


def total_derivative(e: Expr, sys: OdeSystem) -> Expr:
    return TotalDerivative(sys)(e)


def prolong(pmap: PointMap, sys: OdeSystem | None, up_to: int) -> list[list[Expr]]:
    """Prolonged target coordinates: ``result[s][i-1]`` is the image of ``y^i_s``.

    With ``sys=None`` all jet coordinates are free, so any order is allowed.
    Otherwise orders up to ``sys.k`` are free and order ``k+1`` substitutes the
    right-hand side of ``sys`` through its total derivative.
    """
    if sys is None:
        sys = OdeSystem.trivial(pmap.m, max(2, up_to + 1))
    elif up_to > sys.order:
        raise ShapeError(f"cannot prolong beyond order {sys.order}")
    D = TotalDerivative(sys)
    dx = D(pmap.x)
    if dx.is_zero():
        raise SingularMapError("total derivative of the new independent variable vanishes")
    inv = ONE / dx
    levels = [list(pmap.y)]
    for _ in range(up_to):
        levels.append([D(e) * inv for e in levels[-1]])
    return levels


def pullback(pmap: PointMap, target: OdeSystem) -> OdeSystem:
    """System in source coordinates whose solutions ``pmap`` sends to solutions of ``target``."""
    if pmap.m != target.m:
        raise ShapeError("map and system have different m")
    m, k = target.m, target.k
    base = OdeSystem.trivial(m, target.order)
    levels = prolong(pmap, None, k)
    D0 = TotalDerivative(base)
    dx = D0(pmap.x)
    top = levels[k]
    M = MatrixExpr([[top[i].diff(jet(j, k)) for j in range(1, m + 1)] for i in range(m)])
    det = M.det()
    if det.is_zero():
        raise SingularMapError("top-order Jacobian of the prolonged map is singular")
    sub = {X: pmap.x}
    for s in range(k + 1):
        for i in range(1, m + 1):
            sub[jet(i, s)] = levels[s][i - 1]
    target_rhs = [f.subs(sub) if not f.is_zero() else ZERO for f in target.rhs]
    b = [fb * dx - D0(y) for fb, y in zip(target_rhs, top)]
    inv_det = ONE / det
    rhs = [v * inv_det for v in M.adjugate().apply(b)]
    return OdeSystem(m, target.order, tuple(rhs))
