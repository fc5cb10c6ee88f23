"""Graded Lie algebra cohomology of ``g_- `` with values in ``g``, by exact linear algebra.

Cochains ``Hom(wedge^q D, T)`` use the basis ``(S, t)``: ``S`` a sorted
``q``-tuple of basis indices of ``D`` and ``t`` a basis index of ``T``; the
basis cochain sends ``b_S`` to ``b_t`` and every other sorted tuple to zero.
Its degree is ``deg t - sum(deg s for s in S)``. All maps are sparse rational
matrices and every dimension is an exact rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .liealg import GradedLieAlgebra, build_g
from .linalg import QMatrix, span_rank

Vec = dict[int, Fraction]


class CohomologyMismatch(AssertionError):
    """Two independent computations of the same dimension disagree."""


def _sort_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
    """Sign of the permutation sorting ``seq`` (``None`` if an entry repeats)."""
    s = list(seq)
    if len(set(s)) != len(s):
        return None
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(s)):
        j = i
        while j > 0 and s[j - 1] > s[j]:
            s[j - 1], s[j] = s[j], s[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(s)


class HomSpace:
    """``Hom(wedge^q D, T)`` with its graded basis."""

    def __init__(self, g: GradedLieAlgebra, domain: Iterable[int], target: Iterable[int], q: int, label: str = ""):
        self.g = g
        self.domain = sorted(domain)
        self.target = sorted(target)
        self.q = q
        self.label = label or f"Hom(L^{q}, .)"
        self.basis = [(S, t) for S in combinations(self.domain, q) for t in self.target]
        self.index = {b: n for n, b in enumerate(self.basis)}
        deg = g.degrees
        self.degrees = [deg[t] - sum(deg[s] for s in S) for S, t in self.basis]
        self._by_degree: dict[int, list[int]] = {}
        for n, d in enumerate(self.degrees):
            self._by_degree.setdefault(d, []).append(n)

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def by_degree(self, r: int) -> list[int]:
        return self._by_degree.get(r, [])

    def degree_range(self) -> list[int]:
        return sorted(self._by_degree)

    def gram(self) -> list[Fraction]:
        """Diagonal of the induced inner product: dual Gram on inputs, Gram on the value."""
        G = self.g.gram
        out = []
        for S, t in self.basis:
            w = G[t]
            for s in S:
                w /= G[s]
            out.append(w)
        return out

    def name(self, n: int) -> str:
        S, t = self.basis[n]
        names = self.g.names
        return "^".join(names[s] + "*" for s in S) + ("(x)" if S else "") + names[t]


@dataclass
class LinearMapQ:
    """Exact rational matrix between two graded spaces; ``shift`` is the degree change."""

    src: HomSpace
    dst: HomSpace
    mat: QMatrix
    shift: int = 0
    label: str = ""

    def block(self, r: int) -> QMatrix:
        """Restriction to degree ``r`` of the source."""
        return self.mat.submatrix(self.dst.by_degree(r + self.shift), self.src.by_degree(r))

    def __matmul__(self, other: LinearMapQ) -> LinearMapQ:
        if other.dst is not self.src and other.dst.basis != self.src.basis:
            raise ValueError(f"cannot compose {self.label} after {other.label}")
        return LinearMapQ(other.src, self.dst, self.mat @ other.mat, self.shift + other.shift,
                          f"{self.label}.{other.label}")

    def apply(self, vec: Vec) -> Vec:
        return self.mat.apply(vec)

    def is_zero(self) -> bool:
        return self.mat.is_zero()


def _build(src: HomSpace, dst: HomSpace, column: Callable[[tuple, int], dict], shift=0, label="") -> LinearMapQ:
    cols = []
    for n, (S, t) in enumerate(src.basis):
        col: dict[int, Fraction] = {}
        for key, c in column(S, t).items():
            pos = dst.index.get(key)
            if pos is None:
                if c:
                    raise ValueError(f"{label}: value {key} outside the target space")
                continue
            col[pos] = col.get(pos, 0) + c
        cols.append({i: Fraction(v) for i, v in col.items() if v})
    return LinearMapQ(src, dst, QMatrix.from_columns(dst.dim, cols), shift, label)


def _acc(d: dict, key, c):
    if c:
        d[key] = d.get(key, 0) + c


# -- differentials --------------------------------------------------------------


def ce_differential(g: GradedLieAlgebra, domain: Sequence[int], target: Sequence[int], q: int,
                    src: HomSpace | None = None, dst: HomSpace | None = None) -> LinearMapQ:
    """Chevalley-Eilenberg differential of the subalgebra ``domain`` acting on ``target`` by ``ad``."""
    src = src or HomSpace(g, domain, target, q)
    dst = dst or HomSpace(g, domain, target, q + 1)
    dom = src.domain
    dset = set(dom)
    producing: dict[int, list[tuple[int, int, Fraction]]] = {}
    for i, a in enumerate(dom):
        for b in dom[i + 1 :]:
            for u, c in g.bracket_basis(a, b).items():
                if u not in dset:
                    raise ValueError("domain is not a subalgebra")
                producing.setdefault(u, []).append((a, b, c))

    def column(S, t):
        out: dict = {}
        Sset = set(S)
        for a in dom:
            if a in Sset:
                continue
            T = tuple(sorted(S + (a,)))
            i = T.index(a)
            for u, c in g.bracket_basis(a, t).items():
                _acc(out, (T, u), (-1) ** i * c)
        for p, u in enumerate(S):
            R = S[:p] + S[p + 1 :]
            Rset = set(R)
            for a, b, c in producing.get(u, ()):
                if a in Rset or b in Rset:
                    continue
                T = tuple(sorted(R + (a, b)))
                i, j = T.index(a), T.index(b)
                _acc(out, (T, t), (-1) ** (i + j + p) * c)
        return out

    return _build(src, dst, column, 0, f"d{q}")


def codifferential(d: LinearMapQ) -> LinearMapQ:
    """Adjoint of ``d`` for the induced inner products: ``N_q^{-1} d^T N_{q+1}``."""
    n_src = d.src.gram()
    n_dst = d.dst.gram()
    mat = d.mat.transpose().scale_cols(n_dst).scale_rows([1 / v for v in n_src])
    return LinearMapQ(d.dst, d.src, mat, -d.shift, f"{d.label}*")


def spencer(g: GradedLieAlgebra, q: int, values: Sequence[int] | None = None) -> LinearMapQ:
    """``Sop^q(phi)(v_1..v_{q+1}) = sum_i (-1)^i phi(..^v_i..) v_i`` on ``Hom(wedge^q V, a)``."""
    V = g.V
    src = HomSpace(g, V, g.a if values is None else values, q, f"Hom(L{q}V,a)")
    dst = HomSpace(g, V, V, q + 1, f"Hom(L{q + 1}V,V)")

    def column(S, t):
        out: dict = {}
        for v in V:
            if v in S:
                continue
            T = tuple(sorted(S + (v,)))
            i = T.index(v) + 1
            for u, c in g.bracket_basis(t, v).items():
                _acc(out, (T, u), (-1) ** i * c)
        return out

    return _build(src, dst, column, 0, f"Sop{q}")


def action(g: GradedLieAlgebra, z: int, space: HomSpace, on_target: bool = True,
           dst: HomSpace | None = None) -> LinearMapQ:
    """``(z.phi)(s..) = z.phi(s..) - sum_i phi(.., z.s_i, ..)``."""
    dst = dst or space
    images: dict[int, list[tuple[int, Fraction]]] = {}
    for s in space.domain:
        for u, c in g.bracket_basis(z, s).items():
            images.setdefault(u, []).append((s, c))

    def column(S, t):
        out: dict = {}
        if on_target:
            for u, c in g.bracket_basis(z, t).items():
                _acc(out, (S, u), c)
        for p, u in enumerate(S):
            for s, c in images.get(u, ()):
                seq = S[:p] + (s,) + S[p + 1 :]
                res = _sort_sign(seq)
                if res is None:
                    continue
                sign, T = res
                _acc(out, (T, t), -c * sign)
        return out

    return _build(space, dst, column, g.degrees[z], f"act({g.names[z]})")


def alpha_map(g: GradedLieAlgebra) -> LinearMapQ:
    """``c -> c|_{wedge^2 F} mod F``."""
    src = HomSpace(g, g.V, g.V, 2, "Hom(L2V,V)")
    dst = HomSpace(g, g.F, g.W, 2, "Hom(L2F,W)")
    Fset, Wset = set(g.F), set(g.W)
    return _build(src, dst, lambda S, t: {(S, t): 1} if set(S) <= Fset and t in Wset else {}, 0, "alpha")


def alpha_bar(g: GradedLieAlgebra) -> LinearMapQ:
    """``Hom(V, sl2) -> Hom(F, R x)``: restrict to ``F`` and keep the ``x`` coefficient."""
    src = HomSpace(g, g.V, g.sl2, 1, "Hom(V,sl2)")
    dst = HomSpace(g, g.F, [g.index("x")], 1, "Hom(F,Rx)")
    Fset, x = set(g.F), g.index("x")
    return _build(src, dst, lambda S, t: {(S, t): 1} if S[0] in Fset and t == x else {}, 0, "alpha_bar")


def delta_map(g: GradedLieAlgebra, p: int) -> LinearMapQ:
    """``(delta w)(A_1..A_{p+1}) = sum_i (-1)^i w(..^A_i..).A_i mod F``."""
    x = g.index("x")
    src = HomSpace(g, g.F, [x], p, f"Hom(L{p}F,Rx)")
    dst = HomSpace(g, g.F, g.W, p + 1, f"Hom(L{p + 1}F,W)")
    Wset = set(g.W)

    def column(S, t):
        out: dict = {}
        for A in g.F:
            if A in S:
                continue
            T = tuple(sorted(S + (A,)))
            i = T.index(A) + 1
            for u, c in g.bracket_basis(x, A).items():
                if u in Wset:
                    _acc(out, (T, u), (-1) ** i * c)
        return out

    return _build(src, dst, column, 0, f"delta{p}")


def projection_W(g: GradedLieAlgebra, q: int = 2) -> LinearMapQ:
    src = HomSpace(g, g.V, g.V, q, f"Hom(L{q}V,V)")
    dst = HomSpace(g, g.V, g.W, q, f"Hom(L{q}V,W)")
    Wset = set(g.W)
    return _build(src, dst, lambda S, t: {(S, t): 1} if t in Wset else {}, 0, "pi_W")


# -- helpers on blocks ----------------------------------------------------------


def _lift(vec: Vec, positions: Sequence[int]) -> Vec:
    return {positions[i]: c for i, c in vec.items()}


def _kernel(lm: LinearMapQ, r: int) -> list[Vec]:
    """Kernel of the degree-``r`` block, as vectors in global source coordinates."""
    pos = lm.src.by_degree(r)
    if not pos:
        return []
    return [_lift(v, pos) for v in lm.block(r).nullspace()]


def _image(lm: LinearMapQ, r: int) -> list[Vec]:
    """Spanning columns of the degree-``r`` block, in global target coordinates."""
    cols = lm.src.by_degree(r)
    t = lm.mat.transpose()
    return [dict(t.rows[c]) for c in cols if t.rows[c]]


def _rank(lm: LinearMapQ, r: int) -> int:
    if not lm.src.by_degree(r) or not lm.dst.by_degree(r + lm.shift):
        return 0
    return lm.block(r).rank()


# -- the complex of g_- with values in g -----------------------------------------


class Complex:
    """``C^q(D, g)`` for a subalgebra ``D`` with differentials up to ``C^{qmax+1}``."""

    def __init__(self, g: GradedLieAlgebra, domain: Sequence[int], qmax: int = 2, label: str = ""):
        self.g = g
        self.label = label
        target = list(range(g.dim))
        self.spaces = [HomSpace(g, domain, target, q) for q in range(qmax + 2)]
        self.d = [
            ce_differential(g, domain, target, q, self.spaces[q], self.spaces[q + 1])
            for q in range(qmax + 1)
        ]

    @cached_property
    def dstar(self) -> list[LinearMapQ]:
        return [codifferential(d) for d in self.d]

    def degrees(self, q: int) -> list[int]:
        return self.spaces[q].degree_range()

    def cocycles(self, q: int, r: int) -> list[Vec]:
        return _kernel(self.d[q], r)

    def coboundaries(self, q: int, r: int) -> list[Vec]:
        return _image(self.d[q - 1], r) if q > 0 else []

    def dim_by_rank(self, q: int, r: int) -> int:
        n = len(self.spaces[q].by_degree(r))
        z = n - _rank(self.d[q], r)
        b = _rank(self.d[q - 1], r) if q > 0 else 0
        return z - b

    def laplacian(self, q: int, r: int) -> QMatrix:
        pos = self.spaces[q].by_degree(r)
        n = len(pos)
        L = QMatrix(n, n)
        if q > 0:
            d, ds = self.d[q - 1].block(r), self.dstar[q - 1].block(r)
            L = L + d @ ds
        d, ds = self.d[q].block(r), self.dstar[q].block(r)
        return L + ds @ d

    def harmonic_basis(self, q: int, r: int) -> list[Vec]:
        pos = self.spaces[q].by_degree(r)
        if not pos:
            return []
        return [_lift(v, pos) for v in self.laplacian(q, r).nullspace()]

    def dims(self, q: int, check: bool = True) -> dict[int, int]:
        out = {}
        for r in self.degrees(q):
            a = self.dim_by_rank(q, r)
            if check:
                pos = self.spaces[q].by_degree(r)
                b = len(pos) - self.laplacian(q, r).rank() if pos else 0
                if a != b:
                    raise CohomologyMismatch(f"H^{q}_{r}: rank-nullity {a} vs harmonic {b}")
            if a:
                out[r] = a
        return out


def g_minus_complex(g: GradedLieAlgebra, qmax: int = 2) -> Complex:
    return Complex(g, g.negative, qmax, "g_-")


def v_complex(g: GradedLieAlgebra, qmax: int = 2) -> Complex:
    return Complex(g, g.V, qmax, "V")


# -- spectral-sequence pieces -----------------------------------------------------


def e02_dims(g: GradedLieAlgebra, vc: Complex | None = None) -> dict[int, int]:
    """``Inv_x H^2(V, g)`` per degree."""
    vc = vc or v_complex(g)
    X = action(g, g.index("x"), vc.spaces[2])
    out = {}
    for r in vc.degrees(2):
        Z = vc.cocycles(2, r)
        if not Z:
            continue
        xZ = [X.apply(z) for z in Z]
        B_r = span_rank(vc.coboundaries(2, r))
        B_prev = vc.coboundaries(2, r - 1)
        rb_prev = span_rank(B_prev)
        dim = len(Z) - span_rank(B_prev + xZ) + rb_prev - B_r
        if dim:
            out[r] = dim
    return out


def e11_dims(g: GradedLieAlgebra, vc: Complex | None = None) -> dict[int, int]:
    """``H^1(R x, H^1(V, g))`` per total degree ``r`` (the V-cochain has degree ``r - 1``)."""
    vc = vc or v_complex(g)
    X = action(g, g.index("x"), vc.spaces[1])
    out = {}
    for s in vc.degrees(1):
        Z = vc.cocycles(1, s)
        if not Z:
            continue
        xZ_next = [X.apply(z) for z in vc.cocycles(1, s + 1)]
        dim = len(Z) - span_rank(vc.coboundaries(1, s) + xZ_next)
        if dim:
            out[s + 1] = dim
    return out


def serre_hochschild_check(k: int, m: int, g: GradedLieAlgebra | None = None) -> dict:
    """Compare ``dim H^2_r(g_-, g)`` with ``dim E02_r + dim E11_r`` in every degree."""
    g = g or build_g(k, m)
    vc = v_complex(g)
    direct = g_minus_complex(g).dims(2)
    e02, e11 = e02_dims(g, vc), e11_dims(g, vc)
    degrees = sorted(set(direct) | set(e02) | set(e11))
    for r in degrees:
        if direct.get(r, 0) != e02.get(r, 0) + e11.get(r, 0):
            raise CohomologyMismatch(
                f"(k,m)=({k},{m}) degree {r}: H^2 {direct.get(r, 0)} != "
                f"E02 {e02.get(r, 0)} + E11 {e11.get(r, 0)}"
            )
    return {"H2": direct, "E02": e02, "E11": e11}


# -- Spencer, invariants and the effective part ---------------------------------


def spencer_kernel_dims(g: GradedLieAlgebra, q: int) -> dict[int, int]:
    S = spencer(g, q)
    out = {}
    for r in S.src.degree_range():
        n = len(S.src.by_degree(r)) - _rank(S, r)
        if n:
            out[r] = n
    return out


def x_invariants_V(g: GradedLieAlgebra) -> list[Vec]:
    """Kernel of ``ad x`` on ``V`` (coordinates are basis indices of g)."""
    V = g.V
    A = g.ad(g.index("x"), rows=V, cols=V)
    return [{V[i]: c for i, c in v.items()} for v in A.nullspace()]


def _in_a(g: GradedLieAlgebra):
    """Matrices of the reductive part acting on V, flattened to ``Vec`` over (row, col)."""
    V = g.V
    n = len(V)
    out = []
    for z in g.a:
        M = g.ad(z, rows=V, cols=V)
        out.append({i * n + j: c for i, row in enumerate(M.rows) for j, c in row.items()})
    return out


def y_invariants_glV_mod_a(g: GradedLieAlgebra) -> dict[int, int]:
    """Dimensions of the ``y``-invariants of ``gl(V)/a`` per cochain degree ``deg(phi) + 1``."""
    V = g.V
    n = len(V)
    Y = g.ad(g.index("y"), rows=V, cols=V)
    a_vecs = _in_a(g)
    a_rank = span_rank(a_vecs)
    deg = [g.degrees[v] for v in V]
    by_deg: dict[int, list[tuple[int, int]]] = {}
    for i in range(n):
        for j in range(n):
            by_deg.setdefault(deg[i] - deg[j], []).append((i, j))
    a_by_deg: dict[int, list[Vec]] = {}
    for z, vec in zip(g.a, a_vecs):
        a_by_deg.setdefault(g.degrees[z], []).append(vec)
    out = {}
    for d, entries in sorted(by_deg.items()):
        # phi with [y, phi] in a: solve [y, phi] - sum c_z a_z = 0
        a_next = a_by_deg.get(d + 1, [])
        cols = []
        for i, j in entries:
            col: Vec = {}
            # [Y, E_ij] = Y E_ij - E_ij Y
            for r, c in Y.transpose().rows[i].items():
                _acc(col, r * n + j, c)
            for c_, val in Y.rows[j].items():
                _acc(col, i * n + c_, -val)
            cols.append(col)
        for vec in a_next:
            cols.append({p: -c for p, c in vec.items()})
        rows_idx = sorted({p for c in cols for p in c})
        rmap = {p: t for t, p in enumerate(rows_idx)}
        M = QMatrix.from_columns(len(rows_idx), [{rmap[p]: c for p, c in col.items()} for col in cols])
        sols = M.nullspace()
        phis = [{entries[i][0] * n + entries[i][1]: c for i, c in s.items() if i < len(entries)} for s in sols]
        phis = [p for p in phis if p]
        a_here = a_by_deg.get(d, [])
        dim = span_rank(phis + a_here) - span_rank(a_here)
        if dim:
            out[d + 1] = dim
    assert a_rank == len(g.a)
    return out


def pi_w_lemma(g: GradedLieAlgebra) -> dict:
    """``pi_W`` on ``Inv_x Hom(wedge^2 V, V)``: injectivity and image ``ker x^{k+1}`` (input action)."""
    x = g.index("x")
    src = HomSpace(g, g.V, g.V, 2)
    X = action(g, x, src)
    inv = []
    for r in src.degree_range():
        inv += _kernel(X, r)
    P = projection_W(g)
    images = [P.apply(v) for v in inv]
    injective = span_rank(images) == len(inv)
    Xin = action(g, x, P.dst, on_target=False)
    power = Xin
    for _ in range(g.k):
        power = Xin @ power
    ker = []
    for r in P.dst.degree_range():
        ker += _kernel(power, r)
    same = span_rank(images) == span_rank(ker) == span_rank(images + ker)
    return {"inv_x_dim": len(inv), "injective": injective, "image_is_ker_xk1": same, "ker_dim": len(ker)}


@dataclass
class EffectivePart:
    dims: dict[int, int]
    bases: dict[int, list[Vec]]  # representatives c (global coordinates of Hom(L2V, V))
    space: HomSpace


def effective_E02(k: int, m: int, g: GradedLieAlgebra | None = None, degrees=None) -> EffectivePart:
    """``{[c] in Inv_x(Hom_+(wedge^2 V, V)/im Sop^1) : alpha(c) in im delta}`` per degree.

    Solves ``x.c = Sop^1(psi)`` and ``alpha(c) = delta(w)`` jointly; the
    dimension is the projection of the solution space to ``c`` modulo
    ``im Sop^1``.
    """
    g = g or build_g(k, m)
    S1 = spencer(g, 1)
    C = S1.dst
    X = action(g, g.index("x"), C)
    A = alpha_map(g)
    Dl = delta_map(g, 1)
    dims, bases = {}, {}
    for r in degrees or [d for d in C.degree_range() if d > 0]:
        cpos = C.by_degree(r)
        xpos = C.by_degree(r - 1)
        ppos = S1.src.by_degree(r - 1)
        wpos = Dl.src.by_degree(r)
        apos = A.dst.by_degree(r)
        nc, npsi, nw = len(cpos), len(ppos), len(wpos)
        top = X.mat.submatrix(xpos, cpos).hstack((-S1.mat).submatrix(xpos, ppos)).hstack(QMatrix(len(xpos), nw))
        bot = A.mat.submatrix(apos, cpos).hstack(QMatrix(len(apos), npsi)).hstack((-Dl.mat).submatrix(apos, wpos))
        M = top.vstack(bot)
        sols = M.nullspace()
        cs = [{i: v for i, v in s.items() if i < nc} for s in sols]
        cs = [c for c in cs if c]
        valid_rank = span_rank(cs)
        im_vecs = _image(S1, r)
        local = {p: n for n, p in enumerate(cpos)}
        im_local = [{local[i]: v for i, v in vec.items()} for vec in im_vecs]
        dim = span_rank(cs + im_local) - span_rank(im_local)
        assert span_rank(cs + im_local) == valid_rank, "im Sop^1 must satisfy the conditions"
        if dim:
            dims[r] = dim
            # representatives complementary to im Sop^1
            reps, base = [], list(im_local)
            for c in cs:
                if span_rank(base + [c]) > span_rank(base):
                    base.append(c)
                    reps.append(_lift(c, cpos))
            bases[r] = reps
    return EffectivePart(dims, bases, C)


def effective_is_glm_submodule(g: GradedLieAlgebra, eff: EffectivePart) -> bool:
    """The valid representatives plus ``im Sop^1`` are stable under every ``e^i_j``."""
    S1 = spencer(g, 1)
    for r, reps in eff.bases.items():
        span = reps + _image(S1, r)
        base_rank = span_rank(span)
        for z in g.glm:
            Z = action(g, z, eff.space)
            for c in reps:
                if span_rank(span + [Z.apply(c)]) != base_rank:
                    return False
    return True


def diagram_commutes(g: GradedLieAlgebra) -> bool:
    """``alpha o Sop^1 = delta o alpha_bar`` on ``Hom(V, sl2)``."""
    left = alpha_map(g).mat @ spencer(g, 1, g.sl2).mat
    right = delta_map(g, 1).mat @ alpha_bar(g).mat
    return left == right


def h0_V(g: GradedLieAlgebra) -> int:
    """``dim H^0(V, g)``: elements of g commuting with V."""
    vc = v_complex(g, 0)
    return sum(vc.dim_by_rank(0, r) for r in vc.degrees(0))


# -- report ---------------------------------------------------------------------


def report(k: int, m: int) -> dict:
    g = build_g(k, m)
    gm = g_minus_complex(g)
    vc = v_complex(g)
    rows = []

    def add(q, dims, source):
        for r, d in sorted(dims.items()):
            rows.append({"q": q, "degree": r, "dim": d, "source": source})

    for q in (0, 1, 2):
        add(q, gm.dims(q), "direct")
    e02, e11 = e02_dims(g, vc), e11_dims(g, vc)
    add(2, e02, "E02")
    add(2, e11, "E11")
    eff = effective_E02(k, m, g) if k >= 3 and m >= 2 else None
    if eff is not None:
        add(2, eff.dims, "effective")
    return {
        "k": k,
        "m": m,
        "dim_g": g.dim,
        "table": rows,
        "spencer_kernel": {
            "1": sum(spencer_kernel_dims(g, 1).values()),
            "2": spencer_kernel_dims(g, 2),
        },
        "y_invariants_glV_mod_a": y_invariants_glV_mod_a(g),
    }
