from fractions import Fraction

import pytest

from formdeform.applications import omega_triangle_operator
from formdeform.deformation import (
    ActionCoefficients,
    Bounds,
    CoefficientDomainError,
    TRIVIAL,
    TruncatedAlgebra,
    TruncationError,
    act,
    classify,
    dd_coefficients,
    dt_coefficients,
    min_truncation,
    search_closed_form_family,
    teo1_coefficients,
    verify_associativity,
    verify_linearity,
)
from formdeform.exterior import HomogeneousForm as F, contract_radial, ext_d, wedge
from formdeform.operators import d_op, from_id_family
from formdeform.scalar_poly import HomogeneousPolynomial as P

n3 = 3
x, y, z = (F.x(n3, i) for i in range(3))
dx, dy, dz = (F.dx(n3, i) for i in range(3))
OMEGA = wedge(x, dy) - wedge(y, dx)


def test_act_degree_zero_is_identity():
    for A in (dd_coefficients(3), dt_coefficients(2, 3)):
        tau = wedge(x, wedge(y, dz))
        assert act(F.constant(3), tau, A) == tau


def test_act_dd_example():
    got = act(z, dx, dd_coefficients(3))
    assert got == (wedge(z, dx) + wedge(x, dz)).scale(Fraction(1, 2))


def test_act_radially_closed_drops_beta():
    tau = OMEGA
    assert contract_radial(tau).is_zero()
    A = dt_coefficients(2, 3)
    alpha, _ = A(1, 3, 1)
    assert act(z, wedge(z, tau), A) == wedge(z, wedge(z, tau)).scale(alpha)


def test_act_accepts_polynomial_and_rejects_forms():
    A = dd_coefficients(3)
    assert act(P.monomial((0, 0, 1)), dx, A) == act(z, dx, A)
    with pytest.raises(ValueError):
        act(dz, dx, A)


def test_act_truncation():
    with pytest.raises(TruncationError):
        act(z, F.constant(3), dd_coefficients(3))
    assert act(z, F.constant(3), TRIVIAL) == z


def test_closed_form_coefficients():
    A = teo1_coefficients(1, 0, 0)
    for b in range(1, 5):
        for c in range(0, 4):
            alpha, beta = A(0, b, c)
            assert alpha == (Fraction(b, b + c) if c else 1)
            if c:
                assert beta == Fraction(1, b + c)
    T = teo1_coefficients(2, 2, Fraction(1, 2))
    for r in range(4):
        k = Fraction(r + 1, 2)
        for b in range(4, 8):
            for c in range(1, 3):
                assert T(r, b, c) == ((b - 2 * k) / (b + c - 2 * k), 1 / (b + c - 2 * k))
    # beta = alpha / (b - shift) wherever defined
    for r in range(3):
        for c in range(1, 3):
            alpha, beta = T(r, 6, c)
            assert beta == alpha / (6 - T.shift(r))


def test_dt_coefficients_at_threshold_example():
    # r = 1, b = kappa(1) a + 1, c = 1
    assert dt_coefficients(2)(1, 3, 1) == (Fraction(1, 2), Fraction(1, 2))


def test_describe_formulas():
    assert dd_coefficients().describe()["alpha"] == "b/(b + c)"
    assert dd_coefficients().describe()["beta"] == "1/(b + c)"
    desc = dt_coefficients(2).describe()
    assert desc["alpha"] == "(b - r - 1)/(b + c - r - 1)"
    assert desc["shift"] == "r + 1"


def test_min_truncation_examples():
    assert min_truncation(dd_coefficients(), 3) == (1, 1, 1, 1)
    assert min_truncation(dt_coefficients(2), 3) == (2, 3, 4, 5)
    assert min_truncation(dt_coefficients(2), 3, generation=True) == (4, 4, 5, 6)
    assert min_truncation(dd_coefficients(), 3, generation=True) == (4, 4, 4, 4)
    assert min_truncation(dt_coefficients(0), 3) == (1, 1, 1, 1)


def test_thresholds_keep_denominators_nonzero():
    for a in range(0, 4):
        A = dt_coefficients(a, 3)
        for r in range(4):
            for b in range(A.threshold(r), A.threshold(r) + 4):
                for c in range(4):
                    A(r, b, c)


def test_coefficient_domain_error():
    A = dt_coefficients(2)
    with pytest.raises(CoefficientDomainError):
        A(1, 1, 1)
    with pytest.raises(ValueError):
        teo1_coefficients(0, 1, 0)


def test_truncated_algebra_membership():
    alg = TruncatedAlgebra(3, (2, 3, 4, 5))
    assert wedge(x, dy) not in alg
    assert wedge(x, wedge(x, dy)) in alg
    assert F.x(2, 0) not in alg


def test_verify_linearity_d_passes():
    res = verify_linearity(d_op(3), dd_coefficients(3), Bounds(3, 5, 2))
    assert res and res.checked > 0


def test_verify_linearity_trivial_action_fails():
    res = verify_linearity(d_op(3), TRIVIAL, Bounds(3, 3, 1))
    assert not res
    cx = res.counterexample
    assert not cx.residual.is_zero()
    assert ext_d(wedge(cx.f, cx.tau)) == cx.lhs


def test_verify_linearity_omega_triangle():
    D = omega_triangle_operator(OMEGA)
    assert verify_linearity(D, dt_coefficients(2, 3), Bounds(3, 6, 2))


def test_associativity():
    assert verify_associativity(dd_coefficients(3), 3, Bounds(3, 4, 2))
    assert verify_associativity(dt_coefficients(2, 3), 3, Bounds(3, 6, 2))
    A = dd_coefficients(3)
    broken = ActionCoefficients("custom", func=lambda r, b, c: (A(r, b, c)[0], 2 * A(r, b, c)[1]),
                                thresholds=A.thresholds)
    res = verify_associativity(broken, 3, Bounds(3, 3, 1))
    assert not res
    assert not res.counterexample.residual.is_zero()


def test_classify_d():
    D = from_id_family(F.constant(3), F.zero(3, 1, 0), F.zero(3, 1, 0))
    assert D == d_op(3)
    rep = classify(D)
    assert rep.linearizable and rep.t == 0
    assert rep.coefficients.describe()["alpha"] == "b/(b + c)"


def test_classify_omega_triangle():
    rep = classify(omega_triangle_operator(OMEGA))
    assert rep.linearizable
    assert rep.t == Fraction(1, 2) and rep.t1 == Fraction(1, 2)
    for part in (rep.w1, rep.w2, rep.mu):
        assert contract_radial(part).is_zero()
    want = dt_coefficients(2).describe()
    want.pop("label")
    assert rep.coefficients.describe() == want


def test_classify_rejects_independent_exact_part():
    eta = ext_d(wedge(z, dx))
    D = from_id_family(OMEGA, ext_d(OMEGA).scale(Fraction(1, 2)) + eta, F.zero(3, 2, 2))
    rep = classify(D)
    assert not rep.linearizable
    assert not rep.w2_residual.is_zero()
    assert rep.counterexample is not None and not rep.counterexample.residual.is_zero()


def test_classify_rejects_exact_w1_and_wrong_t1():
    D = from_id_family(ext_d(wedge(x, y)), F.zero(3, 2, 2), F.zero(3, 2, 2))
    rep = classify(D)
    assert not rep.linearizable and not rep.w1_exact.is_zero()
    assert rep.counterexample is not None
    D = from_id_family(OMEGA, ext_d(OMEGA), F.zero(3, 2, 2))
    rep = classify(D)
    assert not rep.linearizable and rep.t1 == 1
    assert rep.counterexample is not None


def test_classify_trivial_when_w1_zero():
    D = from_id_family(F.zero(3, 0, 2), wedge(x, dy) - wedge(y, dx), F.zero(3, 1, 2), q=1, a=2)
    rep = classify(D)
    assert rep.linearizable and rep.coefficients is TRIVIAL
    assert verify_linearity(D, TRIVIAL, Bounds(3, 3, 2))


def test_classify_needs_family():
    with pytest.raises(TypeError):
        classify(d_op(3))


def test_search_family_finds_right_t():
    D = omega_triangle_operator(OMEGA)
    results = dict(search_closed_form_family(D, [0, Fraction(1, 2), 1], lambda A: Bounds(3, 6, 1)))
    assert results[Fraction(1, 2)]
    assert not results[Fraction(0)] and not results[Fraction(1)]


@pytest.mark.parametrize("q,a,t", [(1, 0, 0), (2, 2, Fraction(1, 2)), (1, 3, Fraction(-1, 3)), (3, 2, 2)])
def test_coefficient_system_identities(q, a, t):
    A = teo1_coefficients(q, a, t)
    A = A.with_thresholds(min_truncation(A, 4))
    for r in range(3):
        for b in range(A.threshold(r), A.threshold(r) + 3):
            if b + a < A.threshold(r + q):
                continue
            for c in range(1, 3):
                alpha, beta = A(r, b, c)
                assert alpha == A(r + q, b + a, c)[0]
                assert beta == alpha / (b - A.shift(r))
                for e in range(1, 3):
                    assert alpha * A(r, b + c, e)[0] == A(r, b, c + e)[0]
