import random
from fractions import Fraction

import pytest

from odeinv import genwilczynski as gw
from odeinv.expr import Expr, jet, parse
from odeinv.jets import OdeSystem, PointMap, TotalDerivative, pullback
from odeinv.linwilczynski import LinDiffOp, theta
from odeinv.matrix import MatrixExpr
from odeinv.selftest import random_rhs


def _aux_free(M: MatrixExpr) -> bool:
    return not any(v.kind == "aux" for v in M.variables())


def test_linearize_examples():
    L = gw.linearize(OdeSystem.trivial(2, 3))
    assert all(P.is_zero() for P in L.coeffs)
    L = gw.linearize(OdeSystem.from_strings(2, 2, ["y2_0", "0"]))
    # stored as P_r = -A_r
    assert L.coeffs[0] == MatrixExpr([[0, -1], [0, 0]])
    assert L.coeffs[1].is_zero()
    L = gw.linearize(OdeSystem.from_strings(1, 3, ["y1_0"]))
    assert L.coeffs[0] == MatrixExpr([[-1]])
    assert L.coeffs[1].is_zero() and L.coeffs[2].is_zero()


def test_gauge_scalar_first_order():
    sys = OdeSystem.from_strings(1, 2, ["x*y1_1^2 + y1_0*y1_1 + x"])
    D = TotalDerivative(sys)
    f = sys.rhs[0]
    A0, A1 = f.diff(jet(1, 0)), f.diff(jet(1, 1))
    expected = D(A1) / 2 - A1 * A1 / 4 - A0
    st = gw.gauge_reduce(gw.linearize(sys))
    assert st.coeffs[1].is_zero()
    assert st.coeffs[0][0, 0] == expected


def test_gauge_second_order():
    sys = OdeSystem.from_strings(2, 3, ["y1_2*y2_2 + y2_1", "x*y1_2^2 + y1_0"])
    D = TotalDerivative(sys)
    A = [MatrixExpr([[sys.rhs[i].diff(jet(j, r)) for j in (1, 2)] for i in range(2)]) for r in range(3)]
    st = gw.gauge_reduce(gw.linearize(sys))
    assert st.coeffs[2].is_zero()
    # nabla A_2 = D A_2 because A_2 commutes with Phi = A_2 / 3
    expected = A[2].map(D) - (A[2] @ A[2]) * Fraction(1, 3) - A[1]
    assert st.coeffs[1] == expected
    assert st.nabla(A[2]) == A[2].map(D)


def test_gauge_of_trivial_operator():
    st = gw.gauge_reduce(gw.linearize(OdeSystem.trivial(2, 4)))
    assert all(Q.is_zero() for Q in st.coeffs)


def test_trace_normalize_scalar_kills_first_coefficient():
    sys = OdeSystem.from_strings(1, 2, ["x*y1_1^2 + y1_0"])
    st = gw.trace_normalize(gw.gauge_reduce(gw.linearize(sys)))
    assert st.coeffs[0].is_zero() and st.coeffs[1].is_zero()


def test_trace_normalize_is_identity_on_lf_constant_coefficients():
    sys = OdeSystem.from_strings(2, 3, ["2*y1_1 + 3*y2_1 + y1_0", "y1_1 - 2*y2_1 + 5*y2_0"])
    st = gw.gauge_reduce(gw.linearize(sys))
    out = gw.trace_normalize(st)
    # the coefficients still carry the formal parameter; rho = 0 is the identity reparametrization
    at_identity = [Q.map(lambda e: e.subs({gw.RHO: Expr.const(0)})) for Q in out.coeffs]
    assert at_identity == st.coeffs
    assert out.rho_relation.subs({gw.RHO: Expr.const(0)}).is_zero()


def test_trace_normalize_output_is_trace_free():
    rng = random.Random(4)
    for order in (2, 3, 4):
        sys = OdeSystem.from_strings(2, order, random_rhs(rng, 2, order, terms=3, degree=2))
        st = gw.reduce_system(sys)
        assert st.coeffs[order - 1].is_zero()
        assert st.coeffs[order - 2].trace().is_zero()


def test_w_examples():
    sys = OdeSystem.from_strings(2, 2, ["y2_0", "0"])
    W2 = gw.wilczynski(sys, 2)
    assert gw.rescaled(W2, 2, 2, 2) == MatrixExpr([[0, 1], [0, 0]])
    sys = OdeSystem.from_strings(1, 3, ["y1_0"])
    assert gw.rescaled(gw.wilczynski(sys, 3), 1, 3, 3) == MatrixExpr([[-1]])
    for order in (2, 3, 4, 5):
        assert all(W.is_zero() for W in gw.wilczynski_all(OdeSystem.trivial(2, order)).values())


def test_w_degree_range():
    from odeinv.jets import ShapeError

    with pytest.raises(ShapeError):
        gw.wilczynski(OdeSystem.trivial(1, 3), 4)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_consistency_with_linear_invariants(k):
    # linear system already in LF form: y^(k+1) = A_0(x) y + ... + A_{k-1}(x) y^(k-1), tr A_{k-1} = 0
    rng = random.Random(k)
    m = 2

    def poly():
        return " + ".join(f"{rng.randint(-3, 3)}*x^{e}" for e in range(3))

    A = [[[poly() for _ in range(m)] for _ in range(m)] for _ in range(k)]
    A[k - 1][1][1] = f"-({A[k - 1][0][0]})"
    rhs = []
    for i in range(m):
        terms = [f"({A[r][i][j]})*y{j + 1}_{r}" for r in range(k) for j in range(m)]
        rhs.append(" + ".join(terms))
    sys = OdeSystem.from_strings(m, k + 1, rhs)
    coeffs = [MatrixExpr([[-parse(A[r][i][j]) for j in range(m)] for i in range(m)]) for r in range(k)]
    op = LinDiffOp(m, k + 1, tuple(coeffs) + (MatrixExpr.zero(m),))
    W = gw.wilczynski_all(sys)
    for r in range(2, k + 2):
        assert W[r] == theta(op, r)


def test_random_systems_trace_free_and_aux_free():
    rng = random.Random(9)
    for order in (2, 3, 4):
        for _ in range(3):
            sys = OdeSystem.from_strings(2, order, random_rhs(rng, 2, order, terms=3, degree=2))
            W = gw.wilczynski_all(sys)
            assert W[2].trace().is_zero()
            assert all(_aux_free(M) for M in W.values())


@pytest.mark.parametrize("order,x", [(2, "x + y1_0*y2_0"), (3, "x + y1_0*y2_0"), (4, "x + y1_0")])
def test_vanish_on_pullback_of_trivial(order, x):
    pm = PointMap.from_strings(2, x, ["y1_0 + x^2", "y2_0 + x*y1_0"])
    sys = pullback(pm, OdeSystem.trivial(2, order))
    assert all(W.is_zero() for W in gw.wilczynski_all(sys).values())


def test_frozen_convention_is_the_selected_one():
    frozen = gw.default_convention()
    picked = gw.select_convention()
    assert (picked.side, picked.phi_sign) == (frozen.side, frozen.phi_sign)
    assert picked.constants == frozen.constants
    gw.validate_convention(frozen)


def test_tampered_convention_is_rejected():
    frozen = gw.default_convention()
    bad = gw.Convention(frozen.side, frozen.phi_sign, {**frozen.constants, "fels_W2": Fraction(3)})
    with pytest.raises(gw.ConventionError):
        gw.validate_convention(bad)
    with pytest.raises(ValueError):
        gw.Convention("up", 1)


def test_printed_third_order_w3_is_not_proportional():
    # only the aligned display (with half the derivative of W_2 added) is a multiple of raw W_3
    sys = OdeSystem.from_strings(2, 3, ["y1_2*y2_2 + y2_1", "x*y1_1"])
    st = gw.reduce_system(sys)
    raw = gw.raw_invariants(st, [3])[3]
    assert gw.constant_ratio(raw, gw.display_values("order3_W3", sys)) is None
    assert gw.constant_ratio(raw, gw.display_values("order3_W3", sys, st.nabla)) == -12


def test_constant_ratio():
    a = MatrixExpr([[parse("2*x"), 0], [0, parse("4")]])
    b = MatrixExpr([[parse("x"), 0], [0, parse("2")]])
    assert gw.constant_ratio(a, b) == 2
    assert gw.constant_ratio(a, MatrixExpr.identity(2)) is None
    assert gw.constant_ratio(MatrixExpr.zero(2), MatrixExpr.zero(2)) == 0


def test_state_json():
    st = gw.reduce_system(OdeSystem.from_strings(2, 3, ["y1_2*y2_1", "y2_0"]))
    data = st.to_json()
    assert data["order"] == 3 and len(data["coeffs"]) == 3 and data["weights"] == [3, 2, 1]
