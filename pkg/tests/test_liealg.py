import itertools
import json
from fractions import Fraction

import pytest
import sympy

from odeinv.liealg import build_g

GRID = [(k, m) for k in range(1, 6) for m in range(1, 4)]


def one(g, name):
    return {g.index(name): Fraction(1)}


def named(g, el):
    return {g.names[t]: c for t, c in el.items()}


@pytest.mark.parametrize("k,m", GRID)
def test_dimension_and_grading(k, m):
    g = build_g(k, m)
    assert g.dim == 3 + m * m + (k + 1) * m
    assert not g.grading_violations()
    assert g.degrees[g.index("x")] == -1 and g.degrees[g.index("y")] == 1
    for r in range(1, k + 2):
        assert all(g.degrees[g.v(k + 1 - r, i)] == -r for i in range(1, m + 1))


@pytest.mark.parametrize("k,m", [(1, 1), (2, 2), (3, 2), (4, 2), (5, 3)])
def test_jacobi(k, m):
    assert build_g(k, m).jacobi_violations() == []


def test_examples():
    g = build_g(3, 2)
    assert g.dim == 15
    assert named(g, g.bracket(one(g, "x"), one(g, "y"))) == {"h": 1}
    # brackets are 2x2 matrix commutators of the displayed x, h, y, which give +2x here
    assert named(g, g.bracket(one(g, "h"), one(g, "x"))) == {"x": 2}
    assert named(g, g.bracket(one(g, "h"), one(g, "y"))) == {"y": -2}
    assert named(g, g.bracket(one(g, "h"), one(g, "v0_1"))) == {"v0_1": 3}
    assert named(g, g.bracket(one(g, "e1_2"), one(g, "e2_1"))) == {"e1_1": -1, "e2_2": 1}
    for a, b in itertools.product(range(4), repeat=2):
        assert g.bracket(one(g, f"v{a}_1"), one(g, f"v{b}_2")) == {}


def test_bracket_is_antisymmetric_and_bilinear():
    g = build_g(2, 2)
    u = {0: Fraction(2), 5: Fraction(-1), 9: Fraction(1, 3)}
    w = {2: Fraction(1), 4: Fraction(3), 10: Fraction(-2)}
    uw, wu = g.bracket(u, w), g.bracket(w, u)
    assert uw == {t: -c for t, c in wu.items()}
    doubled = g.bracket({t: 2 * c for t, c in u.items()}, w)
    assert doubled == {t: 2 * c for t, c in uw.items()}


def test_sl2_from_matrices():
    M = {"x": sympy.Matrix([[0, 0], [1, 0]]), "h": sympy.Matrix([[-1, 0], [0, 1]]), "y": sympy.Matrix([[0, 1], [0, 0]])}
    g = build_g(1, 1)
    for a, b in itertools.combinations("xhy", 2):
        C = M[a] * M[b] - M[b] * M[a]
        got = named(g, g.bracket(one(g, a), one(g, b)))
        rebuilt = sum((c * M[n] for n, c in got.items()), sympy.zeros(2, 2))
        assert rebuilt == C


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_sl2_action_from_monomial_model(k):
    # v^a = f2^(k-a) f1^a / a!, with sl2 acting by the linear vector fields of its matrices
    f1, f2 = sympy.symbols("f1 f2")
    fields = {
        "x": lambda p: f2 * sympy.diff(p, f1),
        "y": lambda p: f1 * sympy.diff(p, f2),
        "h": lambda p: -f1 * sympy.diff(p, f1) + f2 * sympy.diff(p, f2),
    }
    model = [f2 ** (k - a) * f1**a / sympy.factorial(a) for a in range(k + 1)]
    g = build_g(k, 1)
    for name, field_ in fields.items():
        for a in range(k + 1):
            got = g.bracket(one(g, name), one(g, f"v{a}_1"))
            rebuilt = sum((c * model[int(g.names[t][1:].split("_")[0])] for t, c in got.items()), sympy.Integer(0))
            assert sympy.expand(rebuilt - field_(model[a])) == 0
    # x^{k+1} kills V
    el = one(g, f"v{k}_1")
    for _ in range(k + 1):
        el = g.bracket(one(g, "x"), el)
    assert el == {}


@pytest.mark.parametrize("k,m", [(1, 1), (3, 2), (4, 3)])
def test_metric_compatibility(k, m):
    g = build_g(k, m)

    def inner(u, w):
        return sum(c * w.get(t, 0) * g.gram[t] for t, c in u.items())

    for s in g.a:
        st = g.transpose_of(s)
        for p in g.V:
            for q in g.V:
                lhs = inner(g.bracket({s: Fraction(1)}, {p: Fraction(1)}), {q: Fraction(1)})
                rhs = inner({p: Fraction(1)}, g.bracket({st: Fraction(1)}, {q: Fraction(1)}))
                assert lhs == rhs, (g.names[s], g.names[p], g.names[q])


def test_gram_values():
    g = build_g(3, 2)
    assert g.gram[g.index("h")] == 2 and g.gram[g.index("x")] == 1
    assert g.gram[g.v(0, 1)] == 6 and g.gram[g.v(1, 2)] == 2
    assert g.gram[g.v(2, 1)] == Fraction(1, 2) and g.gram[g.v(3, 1)] == Fraction(1, 6)


def test_subspaces():
    g = build_g(3, 2)
    assert len(g.a) == 3 + 4 and len(g.V) == 8
    assert [g.names[i] for i in g.W] == ["v0_1", "v0_2"]
    assert len(g.F) == 6 and set(g.F) | set(g.W) == set(g.V)
    assert g.negative == sorted([g.index("x")] + g.V)


def test_json_dump():
    g = build_g(2, 1)
    data = json.loads(g.dumps())
    assert [b["name"] for b in data["basis"]][:3] == ["x", "h", "y"]
    assert data["brackets"]["[x,y]"] == {"h": "1"}


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_g(0, 2)
