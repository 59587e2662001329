"""Vector-valued forms ``Omega^p (x) T`` and the derivations they induce.

A vector-valued form is stored by components: ``L = sum_i rho_i (x) d/dx_i``
with every ``rho_i`` in ``Omega^p(a + 1)``, so that ``L`` has weight ``a``
(each ``d/dx_i`` carries weight -1).
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence, Tuple

from .exterior import (
    HomogeneousField,
    HomogeneousForm,
    StructuralError,
    contract_field,
    ext_d,
    render_form,
    same_n,
    wedge,
)
from .scalar_poly import ScalarLike, as_scalar


class VectorValuedForm:
    __slots__ = ("n", "degree", "weight", "components")

    def __init__(self, n: int, degree: int, weight: int, components: Sequence[HomogeneousForm] | None = None):
        self.n, self.degree, self.weight = n, degree, weight
        if components is None:
            components = [HomogeneousForm.zero(n, degree, weight + 1) for _ in range(n)]
        components = tuple(components)
        if len(components) != n:
            raise StructuralError(f"expected {n} components, got {len(components)}")
        for rho in components:
            if (rho.n, rho.r, rho.b) != (n, degree, weight + 1):
                raise StructuralError(
                    f"component in Omega^{rho.r}({rho.b}) does not fit degree {degree}, weight {weight}"
                )
        self.components: Tuple[HomogeneousForm, ...] = components

    @classmethod
    def zero(cls, n: int, degree: int, weight: int) -> "VectorValuedForm":
        return cls(n, degree, weight)

    @classmethod
    def from_pairs(cls, n: int, degree: int, weight: int, pairs: Iterable[Tuple[HomogeneousForm, HomogeneousField]]):
        """Aggregate ``sum omega (x) X`` into per-direction components."""
        comps = [HomogeneousForm.zero(n, degree, weight + 1) for _ in range(n)]
        for omega, X in pairs:
            for i in range(n):
                coeff = X.component(i)
                if coeff.is_zero():
                    continue
                comps[i] = comps[i] + wedge(HomogeneousForm.from_poly(coeff), omega)
        return cls(n, degree, weight, comps)

    @classmethod
    def from_field(cls, X: HomogeneousField) -> "VectorValuedForm":
        return cls(X.n, 0, X.weight, [HomogeneousForm.from_poly(X.component(i)) for i in range(X.n)])

    def to_field(self) -> HomogeneousField:
        if self.degree != 0:
            raise StructuralError("only form-degree 0 vector-valued forms are fields")
        terms = {}
        for i, rho in enumerate(self.components):
            for (g, _), v in rho.terms.items():
                terms[(g, i)] = v
        return HomogeneousField(self.n, self.weight, terms)

    def is_zero(self) -> bool:
        return all(rho.is_zero() for rho in self.components)

    def __add__(self, other: "VectorValuedForm") -> "VectorValuedForm":
        if (self.n, self.degree, self.weight) != (other.n, other.degree, other.weight):
            raise StructuralError("vector-valued forms of different type")
        return VectorValuedForm(self.n, self.degree, self.weight,
                                [u + v for u, v in zip(self.components, other.components)])

    def __neg__(self) -> "VectorValuedForm":
        return self.scale(-1)

    def __sub__(self, other: "VectorValuedForm") -> "VectorValuedForm":
        return self + (-other)

    def scale(self, s: ScalarLike) -> "VectorValuedForm":
        s = as_scalar(s)
        return VectorValuedForm(self.n, self.degree, self.weight, [rho.scale(s) for rho in self.components])

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorValuedForm):
            return NotImplemented
        return (self.n, self.degree, self.weight, self.components) == (
            other.n, other.degree, other.weight, other.components)

    def __hash__(self) -> int:
        return hash((self.n, self.degree, self.weight, self.components))

    def __repr__(self) -> str:
        return f"<VV degree={self.degree} weight={self.weight} n={self.n}: {render_vv(self)}>"


def render_vv(L: VectorValuedForm) -> str:
    pieces = []
    for i, rho in enumerate(L.components):
        for key, v in rho.items():
            body = render_form(HomogeneousForm._raw(L.n, rho.r, rho.b, {key: abs(v)}))
            pieces.append(("-" if v < 0 else "+", f"{body} @ d/dx{i + 1}"))
    if not pieces:
        return "0"
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def _coord_fields(n: int):
    return [HomogeneousField.coordinate(n, i) for i in range(n)]


def contract_vv(L: VectorValuedForm, tau: HomogeneousForm) -> HomogeneousForm:
    """``i_L tau = sum_i rho_i ^ i_{d/dx_i} tau``; lands in ``Omega^{p+r-1}(a+b)``."""
    n = same_n(L, tau)
    out = HomogeneousForm.zero(n, L.degree + tau.r - 1, L.weight + tau.b)
    if tau.r == 0:
        return out
    for rho, X in zip(L.components, _coord_fields(n)):
        if rho.is_zero():
            continue
        out = out + wedge(rho, contract_field(X, tau))
    return out


def lie_vv(K: VectorValuedForm, tau: HomogeneousForm) -> HomogeneousForm:
    """``L_K = [i_K, d] = i_K d - (-1)^(p-1) d i_K`` for ``K`` of form degree ``p``."""
    first = contract_vv(K, ext_d(tau))
    second = ext_d(contract_vv(K, tau))
    return first + second if (K.degree - 1) % 2 else first - second


def identity_vv(n: int) -> VectorValuedForm:
    """``Id = sum_i dx_i (x) d/dx_i``."""
    if n < 1:
        raise ValueError("identity needs n >= 1")
    return VectorValuedForm(n, 1, 0, [HomogeneousForm.dx(n, i) for i in range(n)])


def wedge_vv(omega: HomogeneousForm, L: VectorValuedForm) -> VectorValuedForm:
    """``omega ^ L``, wedging every form part on the left."""
    same_n(omega, L)
    return VectorValuedForm(L.n, L.degree + omega.r, L.weight + omega.b,
                            [wedge(omega, rho) for rho in L.components])


class GradedEndomorphism:
    """A scalar-linear map ``Omega^r(b) -> Omega^{r+q}(b+a)`` checked on every call."""

    def __init__(self, n: int, q: int, a: int, evaluator: Callable[[HomogeneousForm], HomogeneousForm]):
        self.n, self.q, self.a = n, q, a
        self._evaluator = evaluator

    def __call__(self, tau: HomogeneousForm) -> HomogeneousForm:
        out = self._evaluator(tau)
        if (out.n, out.r, out.b) != (tau.n, tau.r + self.q, tau.b + self.a):
            raise StructuralError(
                f"endomorphism of bidegree ({self.q},{self.a}) sent Omega^{tau.r}({tau.b}) "
                f"to Omega^{out.r}({out.b})"
            )
        return out
