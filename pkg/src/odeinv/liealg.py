"""The graded symmetry algebra ``g = (sl2 x gl(m)) + V_k (x) R^m`` of the trivial system."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .linalg import QMatrix

Element = dict[int, Fraction]

# sl2 basis as 2x2 matrices; brackets are their matrix commutators
SL2 = {
    "x": ((0, 0), (1, 0)),
    "h": ((-1, 0), (0, 1)),
    "y": ((0, 1), (0, 0)),
}


def _mat_mul(a, b):
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(2)) for j in range(2)) for i in range(2)
    )


def _sl2_bracket(a: str, b: str) -> dict[str, Fraction]:
    A, B = SL2[a], SL2[b]
    ab, ba = _mat_mul(A, B), _mat_mul(B, A)
    C = [[ab[i][j] - ba[i][j] for j in range(2)] for i in range(2)]
    # decompose C = cx*x + ch*h + cy*y
    out = {"x": Fraction(C[1][0]), "h": Fraction(C[1][1]), "y": Fraction(C[0][1])}
    assert C[0][0] == -C[1][1]
    return {k: v for k, v in out.items() if v}


@dataclass
class GradedLieAlgebra:
    k: int
    m: int
    names: list[str] = field(default_factory=list)
    degrees: list[int] = field(default_factory=list)
    gram: list[Fraction] = field(default_factory=list)
    table: dict[tuple[int, int], Element] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def __post_init__(self):
        self._index = {n: i for i, n in enumerate(self.names)}

    # named subsets ---------------------------------------------------------

    def e(self, i: int, j: int) -> int:
        return self.index(f"e{i}_{j}")

    def v(self, a: int, i: int) -> int:
        return self.index(f"v{a}_{i}")

    @property
    def sl2(self) -> list[int]:
        return [0, 1, 2]

    @property
    def glm(self) -> list[int]:
        return [self.e(i, j) for i in range(1, self.m + 1) for j in range(1, self.m + 1)]

    @property
    def V(self) -> list[int]:
        return [self.v(a, i) for a in range(self.k + 1) for i in range(1, self.m + 1)]

    @property
    def F(self) -> list[int]:
        """``<v^1..v^k> (x) W``."""
        return [self.v(a, i) for a in range(1, self.k + 1) for i in range(1, self.m + 1)]

    @property
    def W(self) -> list[int]:
        """``v^0 (x) W``, the lowest-degree piece."""
        return [self.v(0, i) for i in range(1, self.m + 1)]

    @property
    def a(self) -> list[int]:
        """The reductive part ``sl2 x gl(m)``."""
        return self.sl2 + self.glm

    @property
    def negative(self) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d < 0]

    def of_degree(self, d: int) -> list[int]:
        return [i for i, dd in enumerate(self.degrees) if dd == d]

    # brackets -----------------------------------------------------------------

    def bracket_basis(self, i: int, j: int) -> Element:
        if i == j:
            return {}
        if i < j:
            return self.table.get((i, j), {})
        return {t: -c for t, c in self.table.get((j, i), {}).items()}

    def bracket(self, a: Element, b: Element) -> Element:
        out: Element = {}
        for i, ca in a.items():
            for j, cb in b.items():
                for t, c in self.bracket_basis(i, j).items():
                    out[t] = out.get(t, 0) + ca * cb * c
        return {t: c for t, c in out.items() if c}

    def ad(self, i: int, rows: list[int] | None = None, cols: list[int] | None = None) -> QMatrix:
        """Matrix of ``ad(b_i)`` restricted to ``cols`` -> ``rows`` (default: all of g)."""
        rows = list(range(self.dim)) if rows is None else rows
        cols = list(range(self.dim)) if cols is None else cols
        rpos = {r: n for n, r in enumerate(rows)}
        M = QMatrix(len(rows), len(cols))
        for n, j in enumerate(cols):
            for t, c in self.bracket_basis(i, j).items():
                if t not in rpos:
                    raise ValueError(f"[{self.names[i]}, {self.names[j]}] leaves the target subspace")
                M[rpos[t], n] = c
        return M

    def transpose_of(self, i: int) -> int:
        """Index of the matrix transpose of a reductive basis element."""
        name = self.names[i]
        if name in ("x", "y"):
            return self.index("y" if name == "x" else "x")
        if name == "h":
            return i
        a, b = name[1:].split("_")
        return self.index(f"e{b}_{a}")

    # checks ---------------------------------------------------------------

    def jacobi_violations(self) -> list[tuple[int, int, int]]:
        bad = []
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                for l in range(j + 1, n):
                    a = self.bracket({i: Fraction(1)}, self.bracket_basis(j, l))
                    b = self.bracket({j: Fraction(1)}, self.bracket_basis(l, i))
                    c = self.bracket({l: Fraction(1)}, self.bracket_basis(i, j))
                    tot = dict(a)
                    for part in (b, c):
                        for t, v in part.items():
                            tot[t] = tot.get(t, 0) + v
                    if any(tot.values()):
                        bad.append((i, j, l))
        return bad

    def grading_violations(self) -> list[tuple[int, int]]:
        bad = []
        for (i, j), res in self.table.items():
            d = self.degrees[i] + self.degrees[j]
            if any(self.degrees[t] != d for t in res):
                bad.append((i, j))
        return bad

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "basis": [
                {"name": n, "degree": d, "gram": str(g)}
                for n, d, g in zip(self.names, self.degrees, self.gram)
            ],
            "brackets": {
                f"[{self.names[i]},{self.names[j]}]": {self.names[t]: str(c) for t, c in sorted(res.items())}
                for (i, j), res in sorted(self.table.items())
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=False)


def build_g(k: int, m: int) -> GradedLieAlgebra:
    if k < 1 or m < 1:
        raise ValueError("need k >= 1 and m >= 1")
    names = ["x", "h", "y"]
    degrees = [-1, 0, 1]
    gram = [Fraction(1), Fraction(2), Fraction(1)]
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            names.append(f"e{i}_{j}")
            degrees.append(0)
            gram.append(Fraction(1))
    for a in range(k + 1):
        for i in range(1, m + 1):
            names.append(f"v{a}_{i}")
            degrees.append(a - k - 1)
            gram.append(Fraction(factorial(k - a), factorial(a)))
    g = GradedLieAlgebra(k, m, names, degrees, gram)
    idx = g.index
    table: dict[tuple[int, int], Element] = {}

    def put(a: int, b: int, res: dict[int, Fraction]):
        res = {t: Fraction(c) for t, c in res.items() if c}
        if not res:
            return
        if a < b:
            table[(a, b)] = res
        else:
            table[(b, a)] = {t: -c for t, c in res.items()}

    for a, b in (("x", "h"), ("x", "y"), ("h", "y")):
        put(idx(a), idx(b), {idx(n): c for n, c in _sl2_bracket(a, b).items()})
    # gl(m): e^i_j maps e_i to e_j
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            for p in range(1, m + 1):
                for q in range(1, m + 1):
                    if (i, j) >= (p, q):
                        continue
                    res: dict[int, Fraction] = {}
                    if i == q:
                        res[idx(f"e{p}_{j}")] = res.get(idx(f"e{p}_{j}"), 0) + 1
                    if j == p:
                        res[idx(f"e{i}_{q}")] = res.get(idx(f"e{i}_{q}"), 0) - 1
                    put(idx(f"e{i}_{j}"), idx(f"e{p}_{q}"), res)
    # sl2 and gl(m) acting on V (x) R^m
    for a in range(k + 1):
        for w in range(1, m + 1):
            va = idx(f"v{a}_{w}")
            if a > 0:
                put(idx("x"), va, {idx(f"v{a - 1}_{w}"): 1})
            if a < k:
                put(idx("y"), va, {idx(f"v{a + 1}_{w}"): (k - a) * (a + 1)})
            put(idx("h"), va, {va: k - 2 * a})
            for i in range(1, m + 1):
                if i != w:
                    continue
                for j in range(1, m + 1):
                    put(idx(f"e{i}_{j}"), va, {idx(f"v{a}_{j}"): 1})
    g.table = table
    return g
