"""Deformed S-actions ``f . tau = alpha f tau + beta df ^ i_R tau`` and the linearizability classifier."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import floor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .exterior import (
    HomogeneousForm,
    contract_radial,
    ext_d,
    form_basis,
    radial_exact_split,
    wedge,
)
from .operators import DiffOperator, IdFamily, from_id_family
from .scalar_poly import HomogeneousPolynomial, fmt_scalar, monomials

Coeffs = Tuple[Fraction, Fraction]


class TruncationError(ValueError):
    """The form lies below the truncation threshold of the action."""


class CoefficientDomainError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class ActionCoefficients:
    """The pair ``(alpha, beta)`` as a function of ``(r, b, c)`` plus truncation thresholds.

    ``kind`` is ``"teo1"`` (closed form in ``q, a, t``), ``"trivial"`` (usual
    multiplication) or ``"custom"`` (arbitrary callable, used to build
    deliberately broken actions in tests).
    """

    kind: str
    q: Optional[int] = None
    a: Optional[int] = None
    t: Optional[Fraction] = None
    func: Optional[Callable[[int, int, int], Coeffs]] = field(default=None, compare=False)
    thresholds: Optional[Tuple[int, ...]] = None
    label: str = ""

    @property
    def trivial(self) -> bool:
        return self.kind == "trivial"

    def shift(self, r: int) -> Fraction:
        """``a (r/q + (-1)^q t)``, the weight at which the closed form degenerates."""
        if self.kind != "teo1":
            raise ValueError("shift is only defined for closed-form coefficients")
        sign = -1 if self.q % 2 else 1
        return self.a * (Fraction(r, self.q) + sign * self.t)

    def __call__(self, r: int, b: int, c: int) -> Coeffs:
        if self.kind == "trivial" or (b == 0 and c == 0):
            return Fraction(1), Fraction(0)
        if self.kind == "custom":
            alpha, beta = self.func(r, b, c)
            return Fraction(alpha), Fraction(beta)
        s = self.shift(r)
        if c == 0:
            return Fraction(1), (1 / (b - s) if b != s else Fraction(0))
        den = b + c - s
        if den == 0:
            raise CoefficientDomainError(f"b + c - a(r/q + (-1)^q t) vanishes at r={r}, b={b}, c={c}")
        return (b - s) / den, 1 / den

    def default_threshold(self, r: int) -> int:
        if self.kind == "teo1":
            return max(0, floor(self.shift(r)) + 1)
        return 0

    def threshold(self, r: int) -> int:
        if self.thresholds is not None and 0 <= r < len(self.thresholds):
            return self.thresholds[r]
        return self.default_threshold(r)

    def with_thresholds(self, thresholds: Sequence[int]) -> "ActionCoefficients":
        return replace(self, thresholds=tuple(thresholds))

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.label:
            out["label"] = self.label
        if self.kind == "teo1":
            slope = Fraction(self.a, self.q)
            offset = self.shift(0)
            num = _linear(("b", 1), ("r", -slope), ("", -offset))
            den = _linear(("b", 1), ("c", 1), ("r", -slope), ("", -offset))
            out.update(q=self.q, a=self.a, t=fmt_scalar(self.t),
                       alpha=f"{_wrap(num)}/({den})", beta=f"1/({den})",
                       shift=_linear(("r", slope), ("", offset)) or "0")
        elif self.kind == "trivial":
            out.update(alpha="1", beta="0")
        return out


def _linear(*terms: Tuple[str, Fraction]) -> str:
    text = ""
    for sym, coef in terms:
        coef = Fraction(coef)
        if not coef:
            continue
        mag = abs(coef)
        body = sym if (mag == 1 and sym) else (f"{fmt_scalar(mag)}*{sym}" if sym else fmt_scalar(mag))
        if not text:
            text = ("-" if coef < 0 else "") + body
        else:
            text += (" - " if coef < 0 else " + ") + body
    return text


def _wrap(expr: str) -> str:
    return expr if (" " not in expr) else f"({expr})"


def teo1_coefficients(q: int, a: int, t) -> ActionCoefficients:
    if q < 1:
        raise ValueError("closed-form coefficients need q >= 1")
    return ActionCoefficients("teo1", q=q, a=a, t=Fraction(t))


TRIVIAL = ActionCoefficients("trivial")


def min_truncation(A: ActionCoefficients, n: int, generation: bool = False) -> Tuple[int, ...]:
    """Thresholds ``n_0 .. n_n``.

    The base value is the least weight keeping every denominator positive.  With
    ``generation`` set, thresholds are raised above ``n`` and past the weights where
    ``alpha(r, b, 1)^2 = beta(r, b, 1)^2``, so generator reduction applies.
    """
    out = []
    for r in range(n + 1):
        nr = A.default_threshold(r)
        if generation:
            nr = max(nr, n + 1)
            if A.kind == "teo1":
                # alpha^2 - beta^2 = ((b - s)^2 - 1)/(b + 1 - s)^2 vanishes only at b = s +- 1
                nr = max(nr, floor(A.shift(r) + 1) + 1)
        out.append(nr)
    return tuple(out)


def dd_coefficients(n: int | None = None, generation: bool = False) -> ActionCoefficients:
    A = replace(teo1_coefficients(1, 0, 0), label="dd")
    return A.with_thresholds(min_truncation(A, n, generation)) if n is not None else A


def dt_coefficients(a: int, n: int | None = None, generation: bool = False) -> ActionCoefficients:
    A = replace(teo1_coefficients(2, a, Fraction(1, 2)), label="dt")
    return A.with_thresholds(min_truncation(A, n, generation)) if n is not None else A


class TruncatedAlgebra:
    """``sum over r, b >= n_r`` of ``Omega^r(b)``."""

    def __init__(self, n: int, thresholds: Sequence[int]):
        self.n = n
        self.thresholds = tuple(thresholds)

    def __contains__(self, tau: HomogeneousForm) -> bool:
        return tau.n == self.n and 0 <= tau.r < len(self.thresholds) and tau.b >= self.thresholds[tau.r]


def _as_form(f) -> HomogeneousForm:
    if isinstance(f, HomogeneousPolynomial):
        return HomogeneousForm.from_poly(f)
    if f.r != 0:
        raise ValueError("the acting element must be a function")
    return f


def act(f, tau: HomogeneousForm, A: ActionCoefficients, strict: bool = True) -> HomogeneousForm:
    """``alpha(r,b,c) f tau + beta(r,b,c) df ^ i_R tau``."""
    f = _as_form(f)
    r, b, c = tau.r, tau.b, f.b
    if strict and not A.trivial and b < A.threshold(r):
        raise TruncationError(f"Omega^{r}({b}) lies below the threshold n_{r} = {A.threshold(r)}")
    alpha, beta = A(r, b, c)
    out = wedge(f, tau).scale(alpha)
    if beta and r and c:
        out = out + wedge(ext_d(f), contract_radial(tau)).scale(beta)
    return out


# --------------------------------------------------------------------------
# verifiers


@dataclass
class Bounds:
    r_max: int
    b_max: int
    c_max: int


@dataclass
class LinearityFailure:
    f: HomogeneousForm
    tau: HomogeneousForm
    lhs: HomogeneousForm
    rhs: HomogeneousForm

    @property
    def residual(self) -> HomogeneousForm:
        return self.lhs - self.rhs


@dataclass
class CheckResult:
    passed: bool
    checked: int
    counterexample: Optional[object] = None

    def __bool__(self) -> bool:
        return self.passed


def _monomial_forms(n: int, c: int) -> List[HomogeneousForm]:
    return [HomogeneousForm._raw(n, 0, c, {(g, ()): Fraction(1)}) for g in monomials(n, c)]


def verify_linearity(D, A: ActionCoefficients, bounds: Bounds) -> CheckResult:
    """Exhaustive ``D(f . tau) == f . D(tau)`` over monomials ``f`` and basis ``tau``.

    Search order is lexicographic in ``(c, b, r, basis index, f index)``.
    """
    n = D.n
    cache = {}
    checked = 0
    for c in range(bounds.c_max + 1):
        fs = _monomial_forms(n, c)
        for b in range(bounds.b_max + 1):
            for r in range(min(bounds.r_max, n) + 1):
                if not A.trivial and (b < A.threshold(r) or b + D.a < A.threshold(r + D.q)):
                    continue
                for tau in form_basis(n, r, b):
                    key = next(iter(tau.terms))
                    if key not in cache:
                        cache[key] = D(tau)
                    dtau = cache[key]
                    for f in fs:
                        lhs = D(act(f, tau, A))
                        rhs = act(f, dtau, A)
                        checked += 1
                        if lhs != rhs:
                            return CheckResult(False, checked, LinearityFailure(f, tau, lhs, rhs))
    return CheckResult(True, checked)


@dataclass
class AssociativityFailure:
    g: HomogeneousForm
    f: HomogeneousForm
    tau: HomogeneousForm
    lhs: HomogeneousForm
    rhs: HomogeneousForm

    @property
    def residual(self) -> HomogeneousForm:
        return self.lhs - self.rhs


def verify_associativity(A: ActionCoefficients, n: int, bounds: Bounds) -> CheckResult:
    """Exhaustive ``g . (f . tau) == (g f) . tau`` for monomials of degree ``1..c_max``.

    Degree-0 factors are skipped: ``alpha(-, -, 0) = 1`` makes them pass.
    """
    checked = 0
    for c in range(1, bounds.c_max + 1):
        fs = _monomial_forms(n, c)
        for b in range(bounds.b_max + 1):
            for r in range(min(bounds.r_max, n) + 1):
                if not A.trivial and b < A.threshold(r):
                    continue
                for tau in form_basis(n, r, b):
                    for f in fs:
                        ft = act(f, tau, A)
                        for e in range(1, bounds.c_max + 1):
                            for g in _monomial_forms(n, e):
                                lhs = act(g, ft, A)
                                rhs = act(wedge(g, f), tau, A)
                                checked += 1
                                if lhs != rhs:
                                    return CheckResult(False, checked, AssociativityFailure(g, f, tau, lhs, rhs))
    return CheckResult(True, checked)


# --------------------------------------------------------------------------
# classification of operators built from Id


def _split(w: HomogeneousForm) -> Tuple[HomogeneousForm, HomogeneousForm]:
    """(exact, radial); weight-0 forms are constants and count as radial."""
    if w.b == 0:
        return HomogeneousForm.zero(w.n, w.r, w.b), w
    return radial_exact_split(w)


def coordinate_along(v: HomogeneousForm, direction: HomogeneousForm) -> Tuple[Fraction, HomogeneousForm]:
    """Write ``v = t * direction + residual`` with residual vanishing at the pivot term of ``direction``."""
    key, val = next(iter(direction.items()))
    t = v.terms.get(key, Fraction(0)) / val
    return t, v - direction.scale(t)


@dataclass
class LinearizationReport:
    linearizable: bool
    q: int
    a: int
    w1: HomogeneousForm
    w2: HomogeneousForm
    mu: HomogeneousForm
    t: Optional[Fraction]
    t1: Optional[Fraction]
    coefficients: Optional[ActionCoefficients]
    w1_exact: HomogeneousForm
    w2_residual: HomogeneousForm
    mu_residual: HomogeneousForm
    reasons: List[str] = field(default_factory=list)
    counterexample: Optional[LinearityFailure] = None


def _family(D) -> IdFamily:
    if isinstance(D, IdFamily):
        return D
    if isinstance(D, DiffOperator) and D.family is not None:
        return D.family
    raise TypeError("classify needs an operator given by (w1, w2, mu) in the Id family")


def classify(D, bounds: Bounds | None = None, search: bool = True) -> LinearizationReport:
    """Decide membership in the linearizable family and produce coefficients or a counterexample."""
    fam = _family(D)
    q, a = fam.q, fam.a
    if q < 1:
        raise ValueError("linearizability is only defined for q >= 1")
    w1d, w1r = _split(fam.w1)
    e2, w2r = _split(fam.w2)
    em, mur = _split(fam.mu)
    reasons: List[str] = []

    if fam.w1.is_zero():
        return LinearizationReport(True, q, a, fam.w1, fam.w2, fam.mu, Fraction(0), None, TRIVIAL,
                                   w1d, e2, em, ["w1 = 0: the usual multiplication is S-linear"])

    target_t1 = Fraction(-1 if q % 2 else 1, q)
    dw1r = ext_d(w1r)
    if dw1r.is_zero():
        # w1 is a constant: the t-slot multiplies d(w1) = 0 and is fixed to 0
        t1, w2res = None, e2
        t2, mures = Fraction(0), em
    else:
        t1, w2res = coordinate_along(e2, dw1r)
        t2, mures = coordinate_along(em, dw1r)

    if not w1d.is_zero():
        reasons.append("w1 has a nonzero exact part")
    if not w2res.is_zero():
        reasons.append("w2 has an exact part independent of d(w1)")
    if not mures.is_zero():
        reasons.append("mu has an exact part independent of d(w1)")
    if t1 is not None and t1 != target_t1:
        reasons.append(f"coordinate of w2 along d(w1) is {fmt_scalar(t1)}, expected {fmt_scalar(target_t1)}")

    ok = not reasons
    coeffs = teo1_coefficients(q, a, t2) if ok else None
    report = LinearizationReport(ok, q, a, w1r, w2r, mur, t2, t1, coeffs, w1d, w2res, mures, reasons)
    if ok:
        for part in (w1r, w2r, mur):
            if not contract_radial(part).is_zero():
                raise AssertionError("normal form parts must be killed by i_R")
    elif search:
        op = D if isinstance(D, DiffOperator) else from_id_family(fam.w1, fam.w2, fam.mu, q, a)
        A = teo1_coefficients(q, a, t2)
        A = A.with_thresholds(min_truncation(A, op.n))
        report.counterexample = verify_linearity(op, A, bounds or default_bounds(A, op.n)).counterexample
    return report


def default_bounds(A: ActionCoefficients, n: int, extra: int = 2, c_max: int = 1) -> Bounds:
    top = max(A.threshold(r) for r in range(n + 1))
    return Bounds(r_max=n, b_max=top + extra, c_max=c_max)


def search_closed_form_family(D: DiffOperator, ts: Iterable, bounds_for: Callable[[ActionCoefficients], Bounds]):
    """Run ``verify_linearity`` for every closed-form ``t`` in ``ts``; returns ``[(t, result)]``."""
    out = []
    for t in ts:
        A = teo1_coefficients(D.q, D.a, t)
        A = A.with_thresholds(min_truncation(A, D.n))
        out.append((Fraction(t), verify_linearity(D, A, bounds_for(A))))
    return out
