"""The linearized differential and the regularity complex of an integrable 1-form."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .deformation import (
    ActionCoefficients,
    Bounds,
    CheckResult,
    LinearityFailure,
    TruncationError,
    act,
    dd_coefficients,
    dt_coefficients,
)
from .exterior import (
    HomogeneousField,
    HomogeneousForm,
    contract_radial,
    dim,
    ext_d,
    field_basis,
    form_basis,
    lie_field,
    wedge,
)
from .linalg import is_zero_matrix, matmul
from .modtools import DegreeMatrix, DegreeTable, matrix_of
from .operators import DiffOperator, from_id_family
from .scalar_poly import HomogeneousPolynomial


class InvariantViolation(ValueError):
    pass


@dataclass(frozen=True)
class IntegrableOneForm:
    """A homogeneous 1-form with ``i_R w = 0`` and ``w ^ dw = 0``."""

    omega: HomogeneousForm

    def __post_init__(self):
        w = self.omega
        if w.r != 1:
            raise InvariantViolation(f"expected a 1-form, got form degree {w.r}")
        if w.is_zero():
            raise InvariantViolation("the zero form carries no foliation")
        if not contract_radial(w).is_zero():
            raise InvariantViolation(f"i_R w = {contract_radial(w)} is not zero")
        frob = wedge(w, ext_d(w))
        if not frob.is_zero():
            raise InvariantViolation(f"w ^ dw = {frob} is not zero")

    @property
    def n(self) -> int:
        return self.omega.n

    @property
    def weight(self) -> int:
        return self.omega.b


def radial_fixture(f: HomogeneousPolynomial, g: HomogeneousPolynomial) -> IntegrableOneForm:
    """``i_R(df ^ dg)``, integrable for any homogeneous ``f`` and ``g``."""
    df, dg = ext_d(HomogeneousForm.from_poly(f)), ext_d(HomogeneousForm.from_poly(g))
    return IntegrableOneForm(contract_radial(wedge(df, dg)))


def _omega(w) -> IntegrableOneForm:
    return w if isinstance(w, IntegrableOneForm) else IntegrableOneForm(w)


def kappa(r: int) -> Fraction:
    return Fraction(r + 1, 2)


def omega_triangle(w, tau: HomogeneousForm) -> HomogeneousForm:
    """``w ^ d tau + (r + 1)/2 dw ^ tau``."""
    w = _omega(w).omega
    return wedge(w, ext_d(tau)) + wedge(ext_d(w), tau).scale(kappa(tau.r))


def omega_triangle_field(w, X: HomogeneousField) -> HomogeneousForm:
    """``L_X w = i_X dw + d i_X w``."""
    return lie_field(X, _omega(w).omega)


def omega_triangle_operator(w) -> DiffOperator:
    """The same map on forms, as an operator of the ``Id`` family."""
    w = _omega(w).omega
    half = ext_d(w).scale(Fraction(1, 2))
    return from_id_family(w, half, half, q=2, a=w.b)


# --------------------------------------------------------------------------
# linearized actions


def linearized_d_action(f, tau: HomogeneousForm) -> HomogeneousForm:
    """``b/(b+c) f tau + 1/(b+c) df ^ i_R tau`` (usual product when ``b = c = 0``)."""
    A = dd_coefficients().with_thresholds((0,) * (tau.n + 1))
    return act(f, tau, A)


def field_action(f: HomogeneousPolynomial, X: HomogeneousField) -> HomogeneousField:
    """``b/(b+c) f X`` on ``T(b)``, ``b >= 1``."""
    if isinstance(f, HomogeneousForm):
        if f.r:
            raise ValueError("the acting element must be a function")
        f = HomogeneousPolynomial(f.n, f.b, {g: v for (g, _), v in f.terms.items()})
    b, c = X.weight, f.degree
    if b < 1:
        raise TruncationError(f"fields of weight {b} lie below the threshold 1")
    return X.times(f).scale(Fraction(b, b + c))


def linearized_t_action(f, obj: Union[HomogeneousForm, HomogeneousField], a: int):
    """The action making ``w``-triangle linear, for ``w`` of weight ``a``."""
    if isinstance(obj, HomogeneousField):
        return field_action(f, obj)
    return act(f, obj, dt_coefficients(a))


# --------------------------------------------------------------------------
# the complex T -> Omega^1 -> Omega^3 -> ...


Position = Union[str, int]


def field_space(n: int, b: int) -> List[HomogeneousField]:
    if b < -1:
        return []
    return [HomogeneousField(n, b, {key: 1}) for key in field_basis(n, b)]


def positions(n: int) -> List[Position]:
    return ["T"] + list(range(1, n + 1, 2))


def _position_weight(pos: Position, w: int, e: int) -> int:
    return w - e if pos == "T" else w + (pos - 1) // 2 * e


def _position_dim(n: int, pos: Position, b: int) -> int:
    if pos == "T":
        return len(field_space(n, b))
    return dim(n, pos, b)


@dataclass
class RegularityComplex:
    """Differentials of ``C(w)`` at each requested weight.

    At weight ``k`` the complex reads ``T(k-e) -> Omega^1(k) -> Omega^3(k+e) -> ...``
    with ``e`` the weight of ``w``.
    """

    omega: IntegrableOneForm
    weights: Tuple[int, ...]
    matrices: Dict[Tuple[int, Position], DegreeMatrix] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.omega.n

    def positions(self) -> List[Position]:
        return positions(self.n)

    def source(self, w: int, pos: Position) -> Tuple[Position, int]:
        return pos, _position_weight(pos, w, self.omega.weight)

    def dims(self, w: int) -> List[int]:
        return [_position_dim(self.n, p, _position_weight(p, w, self.omega.weight)) for p in self.positions()]

    def ranks(self, w: int) -> List[int]:
        return [self.matrices[(w, p)].rank() for p in self.positions()[:-1]] + [0]

    def homology(self, w: int) -> List[int]:
        """Homology dimension at every position of the weight-``w`` slice."""
        dims, ranks = self.dims(w), self.ranks(w)
        return [d - rk - (ranks[i - 1] if i else 0) for i, (d, rk) in enumerate(zip(dims, ranks))]


def differential_matrix(w, pos: Position, b: int) -> DegreeMatrix:
    """Matrix of the differential leaving ``pos`` in weight ``b``."""
    w = _omega(w)
    n, e = w.n, w.weight
    if pos == "T":
        images = [omega_triangle_field(w, X) for X in field_space(n, b)]
        return DegreeMatrix(("T", b), (1, b + e), matrix_of(images, n, 1, b + e), len(images))
    images = [omega_triangle(w, tau) for tau in form_basis(n, pos, b)]
    return DegreeMatrix((pos, b), (pos + 2, b + e), matrix_of(images, n, pos + 2, b + e), dim(n, pos, b))


def build_complex(w, weights: Iterable[int]) -> RegularityComplex:
    w = _omega(w)
    cx = RegularityComplex(w, tuple(weights))
    pos = cx.positions()
    for k in cx.weights:
        for p in pos[:-1]:
            cx.matrices[(k, p)] = differential_matrix(w, p, _position_weight(p, k, w.weight))
        for p, nxt in zip(pos[:-2], pos[1:-1]):
            first, second = cx.matrices[(k, p)], cx.matrices[(k, nxt)]
            if first.ncols and second.rows and not is_zero_matrix(matmul(second.rows, first.rows)):
                raise InvariantViolation(f"differentials at {p} and {nxt} do not compose to zero in weight {k}")
    return cx


@dataclass
class PhiRow:
    weight: int
    dimension: int
    phi: int
    incoming_rank: int
    homology: int
    regular: Optional[bool] = None


def phi_omega(w, a_range: Iterable[int], verdict_range: Iterable[int] | None = None) -> DegreeTable:
    """Kernel dimension of ``w``-triangle on ``Omega^1(k)`` and the homology there."""
    w = _omega(w)
    n, e = w.n, w.weight
    verdict = set(verdict_range) if verdict_range is not None else None
    table = DegreeTable()
    for k in a_range:
        d = dim(n, 1, k)
        out = differential_matrix(w, 1, k)
        phi = d - out.rank()
        incoming = differential_matrix(w, "T", k - e).rank()
        h = phi - incoming
        table.rows.append(PhiRow(k, d, phi, incoming, h,
                                 None if verdict is not None and k not in verdict else h == 0))
    return table


def verify_field_linearity(w, bounds: Bounds) -> CheckResult:
    """``L_{f.X} w = f.(L_X w)`` for fields of weight ``1 .. b_max``, ``deg f <= c_max``."""
    w = _omega(w)
    n, e = w.n, w.weight
    A = dt_coefficients(e)
    checked = 0
    for c in range(1, bounds.c_max + 1):
        monos = list(form_basis(n, 0, c))
        for b in range(1, bounds.b_max + 1):
            for X in field_space(n, b):
                image = omega_triangle_field(w, X)
                for f in monos:
                    lhs = omega_triangle_field(w, field_action(f, X))
                    rhs = act(f, image, A)
                    checked += 1
                    if lhs != rhs:
                        return CheckResult(False, checked, LinearityFailure(f, X, lhs, rhs))
    return CheckResult(True, checked)


def field_vector(X: HomogeneousField) -> list:
    return [X.terms.get(key, Fraction(0)) for key in field_basis(X.n, X.weight)]


def alpha_beta_gap(A: ActionCoefficients, r: int, b: int) -> Fraction:
    """``alpha(r,b,1)^2 - beta(r,b,1)^2``."""
    alpha, beta = A(r, b, 1)
    return alpha * alpha - beta * beta


__all__ = [
    "IntegrableOneForm", "InvariantViolation", "RegularityComplex", "PhiRow",
    "radial_fixture", "kappa", "omega_triangle", "omega_triangle_field", "omega_triangle_operator",
    "linearized_d_action", "linearized_t_action", "field_action", "field_space", "positions",
    "differential_matrix", "build_complex", "phi_omega", "verify_field_linearity", "alpha_beta_gap",
]
