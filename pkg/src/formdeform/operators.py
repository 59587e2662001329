"""Order-1 differential operators on forms and their ``(K, L, mu)`` decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

from .exterior import (
    HomogeneousForm,
    StructuralError,
    ext_d,
    form_basis,
    wedge,
)
from .vvforms import VectorValuedForm, contract_vv, identity_vv, lie_vv, render_vv, wedge_vv

Evaluator = Callable[[HomogeneousForm], HomogeneousForm]


class BoundsError(ValueError):
    """A black box was asked to evaluate outside its declared range."""


class NotOrderOneError(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


def _fit(form: HomogeneousForm, n: int, r: int, b: int, what: str) -> HomogeneousForm:
    # zero inputs are accepted whatever bidegree they were built with
    if form.is_zero():
        return HomogeneousForm.zero(n, r, b)
    if (form.n, form.r, form.b) != (n, r, b):
        raise StructuralError(f"{what} must lie in Omega^{r}({b}) with n={n}, got Omega^{form.r}({form.b})")
    return form


def _fit_vv(L: VectorValuedForm, n: int, degree: int, weight: int, what: str) -> VectorValuedForm:
    if L.is_zero():
        return VectorValuedForm.zero(n, degree, weight)
    if (L.n, L.degree, L.weight) != (n, degree, weight):
        raise StructuralError(f"{what} must have form degree {degree} and weight {weight}")
    return L


@dataclass(frozen=True)
class IdFamily:
    """The data ``w1 ^ L_Id + w2 ^ i_Id + lambda_mu`` of an operator built from ``Id``."""

    q: int
    a: int
    w1: HomogeneousForm
    w2: HomogeneousForm
    mu: HomogeneousForm


class DiffOperator:
    """``D = L_K + i_L + lambda_mu`` of bidegree ``(q, a)``."""

    def __init__(self, n: int, q: int, a: int, K: VectorValuedForm | None = None,
                 L: VectorValuedForm | None = None, mu: HomogeneousForm | None = None,
                 family: IdFamily | None = None):
        self.n, self.q, self.a = n, q, a
        self.K = _fit_vv(K or VectorValuedForm.zero(n, q, a), n, q, a, "K")
        self.L = _fit_vv(L or VectorValuedForm.zero(n, q + 1, a), n, q + 1, a, "L")
        self.mu = _fit(mu or HomogeneousForm.zero(n, q, a), n, q, a, "mu")
        self.family = family

    def __call__(self, tau: HomogeneousForm) -> HomogeneousForm:
        return apply(self, tau)

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        if (self.n, self.q, self.a) != (other.n, other.q, other.a):
            raise StructuralError("operators of different bidegree")
        return DiffOperator(self.n, self.q, self.a, self.K + other.K, self.L + other.L, self.mu + other.mu)

    def triple(self) -> Tuple[VectorValuedForm, VectorValuedForm, HomogeneousForm]:
        return self.K, self.L, self.mu

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self.n, self.q, self.a) == (other.n, other.q, other.a) and self.triple() == other.triple()

    def __hash__(self) -> int:
        return hash((self.n, self.q, self.a, self.triple()))

    def __repr__(self) -> str:
        return (f"DiffOperator(q={self.q}, a={self.a}, K={render_vv(self.K)!r}, "
                f"L={render_vv(self.L)!r}, mu={str(self.mu)!r})")


def apply(D: DiffOperator, tau: HomogeneousForm) -> HomogeneousForm:
    if tau.n != D.n:
        raise StructuralError(f"operator on n={D.n} applied to a form with n={tau.n}")
    out = wedge(D.mu, tau)
    if not D.K.is_zero():
        out = out + lie_vv(D.K, tau)
    if not D.L.is_zero():
        out = out + contract_vv(D.L, tau)
    return out


class BlackBoxOperator:
    """A linear map known only through evaluation on ``Omega^r(b)``, ``r <= r_max``, ``b <= b_max``."""

    def __init__(self, n: int, q: int, a: int, evaluator: Evaluator, r_max: int, b_max: int,
                 serial: bool = False):
        self.n, self.q, self.a = n, q, a
        self.r_max, self.b_max = r_max, b_max
        self.serial = serial
        self._evaluator = evaluator

    @classmethod
    def of(cls, D, r_max: int, b_max: int) -> "BlackBoxOperator":
        return cls(D.n, D.q, D.a, D, r_max, b_max)

    def in_range(self, tau: HomogeneousForm) -> bool:
        return tau.r <= self.r_max and tau.b <= self.b_max

    def __call__(self, tau: HomogeneousForm) -> HomogeneousForm:
        if not self.in_range(tau):
            raise BoundsError(
                f"Omega^{tau.r}({tau.b}) is outside the declared range r <= {self.r_max}, b <= {self.b_max}")
        out = self._evaluator(tau)
        return _fit(out, self.n, tau.r + self.q, tau.b + self.a, "black-box output")


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _basis_upto(n: int, max_degree: int, max_weight: int, min_weight: int = 0) -> Iterator[HomogeneousForm]:
    for b in range(min_weight, max_weight + 1):
        for r in range(0, min(max_degree, b) + 1):
            yield from form_basis(n, r, b)


@dataclass
class OrderTestResult:
    passed: bool
    witness: Optional[Tuple[HomogeneousForm, HomogeneousForm, HomogeneousForm, HomogeneousForm]] = None

    def __bool__(self) -> bool:
        return self.passed


def double_bracket(D, mu: HomogeneousForm, tau: HomogeneousForm, rho: HomogeneousForm) -> HomogeneousForm:
    """``[[D, lambda_mu], lambda_tau](rho)`` with graded-commutator signs."""
    q, p, s = D.q, mu.r, tau.r

    def inner(x: HomogeneousForm) -> HomogeneousForm:
        return D(wedge(mu, x)) - wedge(mu, D(x)).scale(_sign(q * p))

    return inner(wedge(tau, rho)) - wedge(tau, inner(rho)).scale(_sign((q + p) * s))


def bracket_order_test(D: BlackBoxOperator, max_weight: int | None = None,
                       max_degree: int | None = None) -> OrderTestResult:
    """Check the double bracket vanishes on all basis triples with total weight ``<= max_weight``."""
    max_weight = D.b_max if max_weight is None else max_weight
    max_degree = D.r_max if max_degree is None else max_degree
    if max_weight > D.b_max or max_degree > D.r_max:
        raise BoundsError("order test bounds exceed the black box's declared range")
    n = D.n
    # constants commute with everything, so mu and tau start at weight 1
    probes = list(_basis_upto(n, max_degree, max_weight, min_weight=1))
    for mu in probes:
        for tau in probes:
            if mu.b + tau.b > max_weight or mu.r + tau.r > max_degree:
                continue
            for rho in _basis_upto(n, max_degree - mu.r - tau.r, max_weight - mu.b - tau.b):
                res = double_bracket(D, mu, tau, rho)
                if not res.is_zero():
                    return OrderTestResult(False, (mu, tau, rho, res))
    return OrderTestResult(True)


def decompose(D: BlackBoxOperator, verify: bool = True, verify_weight: int | None = None) -> DiffOperator:
    """Recover the unique ``(K, L, mu)`` from evaluations on ``1``, ``x_i`` and ``dx_i``."""
    n, q, a = D.n, D.q, D.a
    if D.b_max < 1 or D.r_max < 1:
        raise BoundsError("decomposition needs evaluations on weight-1 forms of degree <= 1")
    mu = D(HomogeneousForm.constant(n))

    def reduced(tau: HomogeneousForm) -> HomogeneousForm:
        return D(tau) - wedge(mu, tau)

    sigma = [reduced(HomogeneousForm.x(n, i)) for i in range(n)]
    rho = [reduced(HomogeneousForm.dx(n, i)) - ext_d(s).scale(_sign(q)) for i, s in enumerate(sigma)]
    out = DiffOperator(n, q, a,
                       VectorValuedForm(n, q, a, [_fit(s, n, q, a + 1, "K component") for s in sigma]),
                       VectorValuedForm(n, q + 1, a, [_fit(p, n, q + 1, a + 1, "L component") for p in rho]),
                       mu)
    if verify:
        top = D.b_max if verify_weight is None else min(verify_weight, D.b_max)
        for tau in _basis_upto(n, D.r_max, top):
            got, want = apply(out, tau), D(tau)
            if got != want:
                raise NotOrderOneError(
                    f"decomposition disagrees with the operator on {tau}", (tau, want, got))
    return out


def from_id_family(w1: HomogeneousForm, w2: HomogeneousForm, mu: HomogeneousForm,
                   q: int | None = None, a: int | None = None) -> DiffOperator:
    """Canonical triple of ``tau -> w1 ^ d tau + r * w2 ^ tau + mu ^ tau``.

    ``L_{w1 ^ Id}`` differs from ``w1 ^ L_Id`` by ``(-1)^q dw1 ^ i_Id``, which is
    moved into the contraction part.
    """
    n = w1.n
    if q is None:
        q = w1.r + 1 if not w1.is_zero() else (w2.r if not w2.is_zero() else mu.r)
    if a is None:
        a = next((f.b for f in (w1, w2, mu) if not f.is_zero()), 0)
    if q < 1:
        raise StructuralError("operators of the Id family need q >= 1")
    w1 = _fit(w1, n, q - 1, a, "w1")
    w2 = _fit(w2, n, q, a, "w2")
    mu = _fit(mu, n, q, a, "mu")
    ident = identity_vv(n)
    K = wedge_vv(w1, ident)
    L = wedge_vv(w2 - ext_d(w1).scale(_sign(q)), ident)
    return DiffOperator(n, q, a, K, L, mu, family=IdFamily(q, a, w1, w2, mu))


def lambda_op(mu: HomogeneousForm) -> DiffOperator:
    return DiffOperator(mu.n, mu.r, mu.b, mu=mu)


def d_op(n: int) -> DiffOperator:
    """The exterior differential as ``L_Id``."""
    return DiffOperator(n, 1, 0, K=identity_vv(n))


def form_degree_op(n: int) -> DiffOperator:
    """``tau -> r tau`` as ``i_Id``."""
    return DiffOperator(n, 0, 0, L=identity_vv(n))


def basis_forms(n: int, max_degree: int, max_weight: int) -> List[HomogeneousForm]:
    return list(_basis_upto(n, max_degree, max_weight))
