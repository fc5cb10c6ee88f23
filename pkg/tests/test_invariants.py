import itertools
import random
from fractions import Fraction

import pytest

from odeinv import invariants as inv
from odeinv.expr import ZERO, Expr, parse
from odeinv.jets import OdeSystem, PointMap, ShapeError, pullback
from odeinv.matrix import MatrixExpr

SWAP = PointMap.from_strings(1, "y1_0", ["x"])
CONICS = "5*y1_3*y1_4/y1_2 - 40*y1_3^3/(9*y1_2^2)"


def S(order, *rhs):
    return OdeSystem.from_strings(len(rhs), order, list(rhs))


# -- trace-free parts -------------------------------------------------------------


def test_tfp_matrix_examples():
    assert inv.tfp_matrix(MatrixExpr.identity(3)).is_zero()
    N = MatrixExpr([[0, 1], [0, 0]])
    assert inv.tfp_matrix(N) == N
    assert inv.tfp_matrix(MatrixExpr([[2, 0], [0, 0]])) == MatrixExpr([[1, 0], [0, -1]])


def _random_symmetric(rng, m, p):
    comps = {}
    for i in range(1, m + 1):
        for J in itertools.combinations_with_replacement(range(1, m + 1), p):
            v = Expr.const(rng.randint(-5, 5)) + Expr.const(rng.randint(-2, 2)) * parse("x")
            for perm in set(itertools.permutations(J)):
                comps[(i,) + perm] = v
    return inv.InvariantTensor("T", "i;" + "j" * p, comps)


@pytest.mark.parametrize("m,p", [(2, 1), (2, 2), (3, 2), (2, 3), (3, 3)])
def test_tfp_matches_closed_form_and_is_idempotent(m, p):
    rng = random.Random(10 * m + p)
    t = _random_symmetric(rng, m, p)
    out = inv.tfp(t, m)
    # closed form for symmetric lower indices: subtract sum_a delta^i_{j_a} tau_{J - j_a} / (m + p - 1)
    tau = {J: sum((t[(i, i) + J] for i in range(1, m + 1)), ZERO)
           for J in itertools.product(range(1, m + 1), repeat=p - 1)}
    for idx in itertools.product(range(1, m + 1), repeat=p + 1):
        i, J = idx[0], idx[1:]
        corr = sum((tau[J[:a] + J[a + 1:]] for a in range(p) if J[a] == i), ZERO)
        assert out[idx] == t[idx] - corr * Fraction(1, m + p - 1)
    again = inv.tfp(out, m)
    assert all(again[idx] == out[idx] for idx in out.components)


def test_fels_i3_component():
    _, I3 = inv.fels(S(2, "y1_1^3", "0"))
    # 6 minus three trace corrections of 6/(m+2)
    assert I3[(1, 1, 1, 1)] == Expr.const(Fraction(3, 2))
    # contraction over the first lower slot must cancel: 3/2 + (-3/2) = 0
    assert I3[(2, 2, 1, 1)] == Expr.const(Fraction(-3, 2))


# -- scalar examples ---------------------------------------------------------------


def test_tresse():
    assert inv.tresse(OdeSystem.trivial(1, 2)) == (ZERO, ZERO)
    assert inv.tresse(S(2, "y1_1^4"))[0] == Expr.const(24)
    assert inv.tresse(S(2, "y1_0")) == (ZERO, ZERO)
    with pytest.raises(ShapeError):
        inv.tresse(OdeSystem.trivial(2, 2))


def test_tresse_vanishes_on_point_transforms():
    for pm in (SWAP, PointMap.from_strings(1, "x + y1_0^2", ["y1_0 + x*y1_0"])):
        I1, I2 = inv.tresse(pullback(pm, OdeSystem.trivial(1, 2)))
        assert I1.is_zero() and I2.is_zero()


def test_chern_wunschmann():
    assert inv.chern_wunschmann(OdeSystem.trivial(1, 3)) == (ZERO, ZERO)
    assert inv.chern_wunschmann(S(3, "y1_0"))[1] == Expr.const(-1)
    assert inv.chern_wunschmann(S(3, "y1_2^4"))[0] == Expr.const(24)


def test_cartan_examples():
    assert all(e.is_zero() for e in inv.cartan_point3(OdeSystem.trivial(1, 3)))
    W, *_ = inv.cartan_point3(S(3, "y1_0"))
    assert W == Expr.const(-1)
    _, f222, second, _ = inv.cartan_point3(S(3, "y1_2^2"))
    assert f222.is_zero() and second == Expr.const(4)


def test_cartan_bracket_fit():
    # the swap pullback of y''' = 0 is point-trivial, so all four conditions must vanish on it
    swapped = pullback(SWAP, OdeSystem.trivial(1, 3))
    printed = inv.cartan_point3(swapped, inv.CARTAN_BRACKET_PRINTED)
    fitted = inv.cartan_point3(swapped)
    assert not printed[3].is_zero()
    assert all(e.is_zero() for e in fitted)
    other = pullback(PointMap.from_strings(1, "x + y1_0", ["x*y1_0"]), OdeSystem.trivial(1, 3))
    assert all(e.is_zero() for e in inv.cartan_point3(other))


def test_scalar_leading():
    I3, J4 = inv.scalar_leading(S(4, "y1_3^3"))
    assert I3[()] == Expr.const(6) and not J4.partial
    I2, J6 = inv.scalar_leading(S(5, "y1_0"))
    assert I2[()].is_zero() and J6.partial
    names = [t.name for t in inv.scalar_leading(OdeSystem.trivial(1, 7))]
    assert names == ["I_2", "J_3", "J_4"]


# -- systems -----------------------------------------------------------------------


def test_fels_examples():
    W2, I3 = inv.fels(OdeSystem.trivial(2, 2))
    assert W2.is_zero() and I3.is_zero()
    assert inv.fels_w2(S(2, "y2_0", "0")) == MatrixExpr([[0, 1], [0, 0]])


def test_third_order_examples():
    ts = inv.third_order_system(OdeSystem.trivial(2, 3))
    assert ts.W2.is_zero() and ts.W3.is_zero() and ts.I2.is_zero()
    assert all(e.is_zero() for e in ts.I4.values()) and all(h.is_zero() for h in ts.H_minus1)
    ts = inv.third_order_system(S(3, "y2_2^2", "0"))
    assert ts.I2[(1, 2, 2)] == Expr.const(2)
    assert all(h.is_zero() for h in ts.H_minus1)
    ts = inv.third_order_system(S(3, "2*y1_2 - y2_1 + 3*y1_0", "y2_2 + 5*y1_1"))
    assert ts.I2.is_zero() and all(e.is_zero() for e in ts.I4.values())


def test_third_order_vanishes_on_point_transforms():
    pm = PointMap.from_strings(2, "x + y1_0", ["y1_0 + x^2", "y2_0*y1_0 + y2_0"])
    ts = inv.third_order_system(pullback(pm, OdeSystem.trivial(2, 3)))
    assert ts.W2.is_zero() and ts.W3.is_zero() and ts.I2.is_zero()
    assert all(e.is_zero() for e in ts.I4.values())


def test_i2_higher():
    assert inv.i2_higher(OdeSystem.trivial(2, 4)).is_zero()
    t = inv.i2_higher(S(4, "y1_3*y2_3", "0"))
    assert t[(1, 1, 2)] == Expr.const(1) and t[(1, 2, 1)] == Expr.const(1)
    assert len(t.nonzero()) == 2
    assert inv.i2_higher(S(5, "y2_4^2", "0"))[(1, 2, 2)] == Expr.const(2)
    with pytest.raises(ShapeError):
        inv.i2_higher(OdeSystem.trivial(2, 3))


def test_i2_symmetry():
    t = inv.i2_higher(S(4, "y1_3^2*y2_3 + x*y2_3^3", "y1_3*y2_3*y1_0"))
    for i, j, l in itertools.product((1, 2), repeat=3):
        assert t[(i, j, l)] == t[(i, l, j)]


# -- verdicts ------------------------------------------------------------------------


def test_every_operation_vanishes_on_trivial():
    for m, order in [(1, 2), (1, 3), (1, 4), (1, 5), (2, 2), (2, 3), (2, 4)]:
        groups = inv.all_invariants(OdeSystem.trivial(m, order))
        assert all(t.is_zero() for ts in groups.values() for t in ts)
        assert all(v.status == inv.TRIVIALIZABLE for v in inv.all_verdicts(OdeSystem.trivial(m, order)).values())


def test_verdict_examples():
    pm = PointMap.from_strings(2, "x", ["y1_0 + x^2", "y2_0"])
    v = inv.trivializable(pullback(pm, OdeSystem.trivial(2, 4)))
    assert v.status == inv.TRIVIALIZABLE and v.equivalence_kind == "point"
    v = inv.trivializable(S(4, "y2_3^2", "0"))
    assert v.status == inv.NOT_TRIVIALIZABLE
    assert ("I_2", "1;22", "2") in v.witnesses
    vs = inv.all_verdicts(S(3, "y1_0"))
    assert vs["contact"].status == vs["point"].status == inv.NOT_TRIVIALIZABLE
    assert vs["contact"].witnesses[0][0] == "W"


def test_scalar_higher_order_is_contact():
    sys = pullback(PointMap.from_strings(1, "x + y1_0", ["y1_0"]), OdeSystem.trivial(1, 4))
    vs = inv.all_verdicts(sys)
    assert list(vs) == ["contact"] and vs["contact"].status == inv.TRIVIALIZABLE


def test_partial_invariants_only_block():
    v = inv.trivializable(S(5, CONICS))
    assert v.status == inv.UNDECIDED
    assert v.blocked_by == ["J_6"] and not v.witnesses
    # a fully specified invariant still wins over a blocked one
    v = inv.trivializable(S(5, "y1_4^2 + y1_2*y1_3*y1_4"))
    assert v.status == inv.NOT_TRIVIALIZABLE


def test_negative_verdict_needs_witness():
    with pytest.raises(ValueError):
        inv.Verdict(inv.NOT_TRIVIALIZABLE)


def test_report_shape():
    rep = inv.report(S(3, "y1_0"))
    assert rep["verdict"]["status"] == inv.NOT_TRIVIALIZABLE
    assert set(rep["verdicts"]) == {"contact", "point"}
    names = [t["name"] for t in rep["invariants"]]
    assert len(names) == len(set(names)) and "W" in names
