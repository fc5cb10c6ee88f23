"""Generalized Wilczynski invariants of non-linear ODE systems.

The pipeline evaluates the linear invariants on the linearization
``L = D^{k+1} - sum A_r D^r``, ``A_r = (df^i/dy^j_r)``, after two formal
normalizations:

1. Gauge: ``y = S z`` with ``S' = Phi S``, ``Phi = A_k/(k+1)``, kills the
   ``D^k`` coefficient. ``S`` is never materialized; the new coefficients are
   kept in the original frame and every later derivative is the twisted
   derivation ``nabla M = D M + [M, Phi]`` (or the mirrored ``[Phi, M]``).
2. Reparametrization ``x -> lambda(x)`` with the scalar rescaling
   ``y -> lambda'^{-k/2} y``. Powers of ``lambda'`` are tracked as weights and
   ``rho = lambda''/lambda'`` is an auxiliary symbol whose derivative is fixed
   by requiring ``tr P_{k-1} = 0``. The invariants must come out free of
   ``rho``; anything else is a convention error and raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import comb
from typing import Callable

from .expr import ONE, ZERO, Expr, VarId, aux
from .jets import OdeSystem, ShapeError, TotalDerivative
from .linwilczynski import LinDiffOp, theta_from
from .matrix import MatrixExpr

RHO = aux("rho")
_RHO1 = aux("rho_1")
_SIGMA = aux("sigma")


class ConventionError(RuntimeError):
    """The reduction produced a result that a correct convention cannot produce."""


@dataclass(frozen=True)
class Convention:
    """Gauge conventions and display rescaling constants.

    ``side`` selects ``nabla M = DM + [M, Phi]`` ("right") or
    ``DM + [Phi, M]`` ("left"); ``phi_sign`` multiplies ``A_k/(k+1)``.
    ``constants[name]`` is the rational ``c`` with ``raw = c * display`` for
    the classical formula ``name``.
    """

    side: str = "right"
    phi_sign: int = 1
    constants: dict[str, Fraction] = field(default_factory=dict)
    version: int = 1
    provenance: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.side not in ("right", "left") or self.phi_sign not in (1, -1):
            raise ValueError(f"invalid convention {self.side!r}/{self.phi_sign}")

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "side": self.side,
            "phi_sign": self.phi_sign,
            "constants": {k: str(v) for k, v in sorted(self.constants.items())},
            "provenance": dict(sorted(self.provenance.items())),
        }

    @classmethod
    def from_json(cls, data: dict) -> Convention:
        return cls(
            side=data["side"],
            phi_sign=int(data["phi_sign"]),
            constants={k: Fraction(v) for k, v in data.get("constants", {}).items()},
            version=int(data.get("version", 1)),
            provenance=dict(data.get("provenance", {})),
        )

    @classmethod
    def load(cls, path) -> Convention:
        from pathlib import Path

        return cls.from_json(json.loads(Path(path).read_text()))


@lru_cache(maxsize=1)
def default_convention() -> Convention:
    text = resources.files("odeinv").joinpath("convention.json").read_text()
    return Convention.from_json(json.loads(text))


# Display key of the classical formula matched by W_r at each (order, r).
DISPLAYS = {
    (2, 2): "fels_W2",
    (3, 2): "order3_W2",
    (3, 3): "order3_W3",
}
SCALAR_DISPLAYS = {(3, 3): "wunschmann_W"}


def linearize(sys: OdeSystem) -> LinDiffOp:
    """Linearized operator with ``P_r = -A_r``, differentiated by the total derivative."""
    from .expr import jet

    m, k = sys.m, sys.k
    coeffs = []
    for r in range(k + 1):
        coeffs.append(
            MatrixExpr(
                [[-sys.rhs[i].diff(jet(j, r)) for j in range(1, m + 1)] for i in range(m)]
            )
        )
    return LinDiffOp(m, k + 1, tuple(coeffs), TotalDerivative(sys))


class TwistedDerivative:
    """``nabla`` on matrices and the plain derivation on scalars."""

    def __init__(self, D: TotalDerivative, phi: MatrixExpr, side: str):
        self.D = D
        self.phi = phi
        self.side = side
        self._phi_zero = phi.is_zero()

    def scalar(self, e: Expr) -> Expr:
        return self.D(e)

    def __call__(self, M: MatrixExpr) -> MatrixExpr:
        out = M.map(self.D)
        if self._phi_zero:
            return out
        if self.side == "right":
            return out + M.commutator(self.phi)
        return out + self.phi.commutator(M)

    def with_rules(self, rules: dict[VarId, Expr]) -> TwistedDerivative:
        return TwistedDerivative(self.D.with_rules(rules), self.phi, self.side)


@dataclass
class ReductionState:
    base: LinDiffOp
    phi: MatrixExpr
    coeffs: list[MatrixExpr]  # Q_0..Q_k, frame-free
    nabla: TwistedDerivative
    rho_relation: Expr | None = None  # image of D(rho)
    weights: list[int] | None = None  # weight of each coefficient (power of lambda'^{-1})
    notes: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.base.k

    def to_json(self) -> dict:
        return {
            "m": self.base.m,
            "order": self.base.top_order,
            "phi": self.phi.to_strings(),
            "coeffs": [Q.to_strings() for Q in self.coeffs],
            "rho_relation": None if self.rho_relation is None else str(self.rho_relation),
            "weights": self.weights,
            "notes": {k: str(v) for k, v in self.notes.items()},
        }


def gauge_reduce(L: LinDiffOp, convention: Convention | None = None) -> ReductionState:
    """Conjugate away the ``D^k`` coefficient.

    With ``S^{(j)} = R_j S`` the new coefficients are
    ``Q_t = sum_{s>=t} C(s,t) P_s R_{s-t}`` (``P_{k+1} = 1``), where
    ``R_{j+1} = D R_j + R_j Phi`` ("right") or ``D R_j + Phi R_j`` ("left").
    """
    conv = convention or default_convention()
    m, k = L.m, L.k
    D = L.deriv
    if not isinstance(D, TotalDerivative):
        raise TypeError("gauge reduction needs a TotalDerivative-based operator")
    phi = L.coeffs[k] * Fraction(-conv.phi_sign, k + 1)
    ident = MatrixExpr.identity(m)
    P = list(L.coeffs) + [ident]
    R = [ident]
    for _ in range(k + 1):
        nxt = R[-1].map(D)
        nxt = nxt + (R[-1] @ phi if conv.side == "right" else phi @ R[-1])
        R.append(nxt)
    Q = []
    for t in range(k + 1):
        acc = MatrixExpr.zero(m)
        for s in range(t, k + 2):
            c = comb(s, t)
            prod = P[s] @ R[s - t] if conv.side == "right" else R[s - t] @ P[s]
            acc = acc + prod * c
        Q.append(acc)
    if not Q[k].is_zero():
        raise ConventionError("gauge reduction left a nonzero D^k coefficient")
    return ReductionState(L, phi, Q, TwistedDerivative(D, phi, conv.side))


def _scalar_tables(k: int, deriv: Callable[[Expr], Expr], sigma: Expr):
    """Coefficient tables of the reparametrization.

    ``b[a][i]``: ``(z o lambda)^{(a)} = sum_i lambda'^i b[a][i] z^{(i)}``;
    ``M[j]``: ``mu^{(j)} = mu M[j]`` where ``mu'/mu = sigma``.
    """
    rho = Expr.var(RHO)
    b = [[ONE]]
    for a in range(k + 1):
        prev = b[-1]
        row = []
        for i in range(a + 2):
            v = ZERO
            if i <= a:
                v = rho * i * prev[i] + deriv(prev[i]) if i else deriv(prev[0])
            if i >= 1:
                v = v + prev[i - 1]
            row.append(v)
        b.append(row)
    M = [ONE]
    for _ in range(k + 1):
        M.append(sigma * M[-1] + deriv(M[-1]))
    return b, M


def _reparam_coeff(
    i: int, k: int, Q: list[MatrixExpr], b, M, m: int
) -> MatrixExpr:
    """Coefficient of ``z^{(i)}`` after reparametrization, divided by the leading one."""
    acc = MatrixExpr.zero(m)
    ident = MatrixExpr.identity(m)
    for s in range(i, k + 2):
        Ps = ident if s == k + 1 else Q[s]
        if s <= k and Ps.is_zero():
            continue
        scal = ZERO
        for a in range(i, s + 1):
            scal = scal + M[s - a] * b[a][i] * comb(s, a)
        if not scal.is_zero():
            acc = acc + Ps * scal
    return acc


def trace_normalize(state: ReductionState) -> ReductionState:
    """Formally reparametrize so that ``tr Q_{k-1}`` vanishes.

    The rescaling exponent and the Riccati-type relation for ``D rho`` are
    solved for here rather than hardcoded.
    """
    k, m = state.k, state.base.m
    D = state.nabla.D

    # 1. rescaling mu'/mu = sigma fixed by the vanishing of the z^{(k)} coefficient
    probe = D.with_rules({RHO: Expr.var(_RHO1), _SIGMA: ZERO})
    b, M = _scalar_tables(k, probe, Expr.var(_SIGMA))
    ck = _reparam_coeff(k, k, state.coeffs, b, M, m)
    lead = ck.trace() / m
    s_coef = lead.diff(_SIGMA)
    sigma = -(lead - s_coef * Expr.var(_SIGMA)) / s_coef
    if sigma.variables() - {RHO}:
        raise ConventionError(f"unexpected rescaling exponent {sigma}")

    # 2. D(rho) from tr of the z^{(k-1)} coefficient
    probe = D.with_rules({RHO: Expr.var(_RHO1)})
    b, M = _scalar_tables(k, probe, sigma)
    ck1 = _reparam_coeff(k - 1, k, state.coeffs, b, M, m)
    tr = ck1.trace()
    r1_coef = tr.diff(_RHO1)
    if r1_coef.is_zero() or not r1_coef.is_constant():
        raise ConventionError("trace condition is not a Riccati equation in rho")
    relation = -(tr - r1_coef * Expr.var(_RHO1)) / r1_coef
    if _RHO1 in relation.variables():
        raise ConventionError("trace condition is not linear in D(rho)")

    # 3. all coefficients under the closed derivation
    nabla = state.nabla.with_rules({RHO: relation})
    b, M = _scalar_tables(k, nabla.D, sigma)
    coeffs = [_reparam_coeff(i, k, state.coeffs, b, M, m) for i in range(k + 1)]
    if not coeffs[k].is_zero():
        raise ConventionError("reparametrization reintroduced a D^k coefficient")
    if not coeffs[k - 1].trace().is_zero():
        raise ConventionError("trace normalization failed")
    return ReductionState(
        state.base,
        state.phi,
        coeffs,
        nabla,
        rho_relation=relation,
        weights=[k + 1 - i for i in range(k + 1)],
        notes={"sigma": sigma, "rho_relation": relation},
    )


def _weighted_derivative(nabla: TwistedDerivative):
    rho = Expr.var(RHO)

    def nth(M: MatrixExpr, s: int, n: int, weights: list[int]) -> MatrixExpr:
        w = weights[s]
        for _ in range(n):
            M = nabla(M) - M * (rho * w)
            w += 1
        return M

    return nth


def reduce_system(sys: OdeSystem, convention: Convention | None = None) -> ReductionState:
    return trace_normalize(gauge_reduce(linearize(sys), convention))


def raw_invariants(state: ReductionState, r_values=None) -> dict[int, MatrixExpr]:
    k = state.k
    nth = _weighted_derivative(state.nabla)
    out = {}
    for r in r_values or range(2, k + 2):
        W = theta_from(state.coeffs, k, r, lambda M, s, n: nth(M, s, n, state.weights))
        leftover = {v for v in W.variables() if v.kind == "aux"} & {RHO, _RHO1, _SIGMA}
        if leftover:
            raise ConventionError(
                f"W_{r} still depends on {sorted(map(str, leftover))}; reduction conventions are inconsistent"
            )
        out[r] = W
    return out


def wilczynski(sys: OdeSystem, r: int, convention: Convention | None = None) -> MatrixExpr:
    """Raw generalized Wilczynski invariant of degree ``r``."""
    if not 2 <= r <= sys.order:
        raise ShapeError(f"degree r must lie in 2..{sys.order}")
    return raw_invariants(reduce_system(sys, convention), [r])[r]


def wilczynski_all(sys: OdeSystem, convention: Convention | None = None) -> dict[int, MatrixExpr]:
    return raw_invariants(reduce_system(sys, convention))


def display_key(m: int, order: int, r: int) -> str | None:
    if m == 1 and (order, r) in SCALAR_DISPLAYS:
        return SCALAR_DISPLAYS[(order, r)]
    return DISPLAYS.get((order, r))


def rescaled(raw: MatrixExpr, m: int, order: int, r: int, convention: Convention | None = None):
    """Raw invariant divided by the recorded constant for the classical display, if any."""
    conv = convention or default_convention()
    key = display_key(m, order, r)
    if key is None or key not in conv.constants:
        return None
    return raw * (1 / conv.constants[key])


# -- convention selection ------------------------------------------------------

# Small fixed systems on which the classical displays are compared with raw output.
ORACLE_SYSTEMS = {
    "fels_W2": [
        (2, 2, ["y2_0", "0"]),
        (2, 2, ["y1_1*y2_1 + x*y2_0", "y1_0^2 - y2_1^2"]),
        (2, 2, ["x*y1_1^2 + y2_0*y2_1", "y1_1 + y1_0*y2_0"]),
    ],
    "order3_W2": [
        (2, 3, ["y1_2*y2_2 + y2_1", "x*y1_1"]),
        (2, 3, ["y2_2^2 + y1_0*y2_1", "y1_2*y2_0 + x"]),
    ],
    "order3_W3": [
        (2, 3, ["y2_0", "0"]),
        (2, 3, ["y1_2*y2_2 + y2_1", "x*y1_1"]),
        (2, 3, ["y2_2^2 + y1_0*y2_1", "y1_2*y2_0 + x"]),
    ],
    "wunschmann_W": [
        (1, 3, ["y1_0"]),
        (1, 3, ["y1_2^2 + x*y1_1"]),
        (1, 3, ["y1_2^3 + y1_0*y1_1*y1_2"]),
    ],
}

CANDIDATES = [("right", 1), ("right", -1), ("left", 1), ("left", -1)]


def constant_ratio(raw: MatrixExpr, display: MatrixExpr):
    """The rational ``c`` with ``raw = c * display``, or ``None`` if there is none.

    Returns ``0`` only when both sides vanish identically.
    """
    c = None
    for i in range(raw.n):
        for j in range(raw.n):
            a, b = raw[i, j], display[i, j]
            if b.is_zero():
                if not a.is_zero():
                    return None
                continue
            q = a / b
            if not q.is_constant():
                return None
            if c is None:
                c = q.constant_value()
            elif c != q.constant_value():
                return None
    return Fraction(0) if c is None else c


def display_values(key: str, sys: OdeSystem, nabla: TwistedDerivative | None = None) -> MatrixExpr:
    """The classical display ``key`` on ``sys``, aligned to raw output where needed.

    For ``order3_W3`` the printed formula differs from the degree-3 invariant
    by a derivative of the degree-2 one; the aligned value adds
    ``nabla(W_2) / 2`` (pass ``nabla`` to get it, otherwise the printed value).
    """
    from . import invariants as inv

    if key == "fels_W2":
        return inv.fels_w2(sys)
    if key == "wunschmann_W":
        return MatrixExpr([[inv.wunschmann(sys)]])
    ts = inv.third_order_system(sys)
    if key == "order3_W2":
        return ts.W2
    if key == "order3_W3":
        if nabla is None:
            return ts.W3
        return ts.W3 + nabla(ts.W2) * Fraction(1, 2)
    raise KeyError(key)


def _raw_degree(key: str) -> int:
    return 2 if key in ("fels_W2", "order3_W2") else 3


def oracle_constants(convention: Convention, aligned: bool = True) -> dict[str, Fraction | None]:
    """Per display, the single constant relating raw output to it on all oracle systems."""
    out: dict[str, Fraction | None] = {}
    for key, systems in ORACLE_SYSTEMS.items():
        consts = set()
        for m, order, rhs in systems:
            sys = OdeSystem.from_strings(m, order, rhs)
            try:
                state = reduce_system(sys, convention)
                raw = raw_invariants(state, [_raw_degree(key)])[_raw_degree(key)]
            except ConventionError:
                consts.add(None)
                break
            nabla = state.nabla if aligned else None
            consts.add(constant_ratio(raw, display_values(key, sys, nabla)))
        consts.discard(Fraction(0))
        out[key] = consts.pop() if len(consts) == 1 and None not in consts else None
    return out


def select_convention() -> Convention:
    """Try every candidate gauge convention and keep the one all oracles accept."""
    winners = []
    for side, sign in CANDIDATES:
        conv = Convention(side, sign)
        consts = oracle_constants(conv)
        if all(c for c in consts.values()):
            winners.append(Convention(side, sign, consts))
    if len(winners) != 1:
        raise ConventionError(f"expected exactly one admissible convention, got {len(winners)}")
    return winners[0]


def validate_convention(convention: Convention | None = None) -> None:
    """Recompute the oracle constants and compare with the frozen table."""
    conv = convention or default_convention()
    found = oracle_constants(conv)
    for key, c in found.items():
        if c is None or conv.constants.get(key) != c:
            raise ConventionError(
                f"convention table disagrees with oracle {key}: stored "
                f"{conv.constants.get(key)}, recomputed {c}"
            )
