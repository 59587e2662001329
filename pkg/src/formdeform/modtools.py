"""Degreewise linear algebra for graded operators and deformed module structures."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .deformation import ActionCoefficients, act
from .exterior import (
    HomogeneousField,
    HomogeneousForm,
    contract_field,
    dim,
    form_basis,
    from_vector,
    to_vector,
    wedge,
)
from .linalg import Matrix, is_zero_matrix, matmul, nullspace, rank
from .scalar_poly import shift_index


@dataclass
class DegreeMatrix:
    domain: Tuple[int, int]
    codomain: Tuple[int, int]
    rows: Matrix
    ncols: int

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def rank(self) -> int:
        if not self.rows or not self.ncols:
            return 0
        return rank(self.rows)


def matrix_of(images: Sequence[HomogeneousForm], n: int, r: int, b: int) -> Matrix:
    """Matrix whose column ``j`` holds the coordinates of ``images[j]`` in ``Omega^r(b)``."""
    nrows = dim(n, r, b)
    cols = [to_vector(img) if nrows else [] for img in images]
    return [[col[i] for col in cols] for i in range(nrows)]


def operator_matrix(D, r: int, b: int) -> DegreeMatrix:
    n = D.n
    images = [D(tau) for tau in form_basis(n, r, b)]
    return DegreeMatrix((r, b), (r + D.q, b + D.a), matrix_of(images, n, r + D.q, b + D.a), dim(n, r, b))


@dataclass
class DegreeRow:
    r: int
    b: int
    dimension: Optional[int] = None
    rank: Optional[int] = None
    kernel: Optional[int] = None
    image: Optional[int] = None
    generators: Optional[int] = None
    in_domain: bool = True


@dataclass
class DegreeTable:
    """Rows of one dataclass type, emitted in insertion order."""

    rows: list = field(default_factory=list)

    def columns(self) -> List[str]:
        return [f.name for f in fields(self.rows[0])] if self.rows else []

    def to_json(self) -> list:
        return [{k: v for k, v in asdict(row).items() if v is not None} for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = self.columns()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in self.rows:
            d = asdict(row)
            w.writerow(["" if d[c] is None else d[c] for c in cols])
        return buf.getvalue()


def kernel_dims(D, r: int, b_range: Iterable[int], A: ActionCoefficients | None = None) -> DegreeTable:
    """Per-weight dimension, rank, nullity and image dimension of ``D`` on ``Omega^r(b)``."""
    table = DegreeTable()
    for b in b_range:
        if A is not None and not A.trivial and b < A.threshold(r):
            table.rows.append(DegreeRow(r, b, in_domain=False))
            continue
        m = operator_matrix(D, r, b)
        rk = m.rank()
        table.rows.append(DegreeRow(r, b, m.ncols, rk, m.ncols - rk, rk))
    return table


def kernel_basis(D, r: int, b: int) -> List[HomogeneousForm]:
    m = operator_matrix(D, r, b)
    if not m.ncols:
        return []
    vecs = nullspace(m.rows, m.ncols) if m.rows else nullspace([[Fraction(0)] * m.ncols], m.ncols)
    return [from_vector(D.n, r, b, v) for v in vecs]


def image_basis(D, r: int, b: int) -> List[HomogeneousForm]:
    """Spanning set of ``D(Omega^{r-q}(b-a))`` inside ``Omega^r(b)``."""
    return [D(tau) for tau in form_basis(D.n, r - D.q, b - D.a)]


# --------------------------------------------------------------------------
# action matrices


def action_matrix(A: ActionCoefficients, n: int, r: int, b: int, i: int) -> Matrix:
    """Matrix of ``tau -> x_i . tau`` from ``Omega^r(b)`` to ``Omega^r(b+1)``."""
    xi = HomogeneousForm.x(n, i)
    return matrix_of([act(xi, tau, A) for tau in form_basis(n, r, b)], n, r, b + 1)


def matrix_linearity_defect(D, A: ActionCoefficients, r: int, b: int) -> Optional[Tuple[int, Matrix]]:
    """First ``i`` with ``D_{b+1} M_i != M_i' D_b`` and the difference, or None."""
    n = D.n
    d0 = operator_matrix(D, r, b).rows
    d1 = operator_matrix(D, r, b + 1).rows
    for i in range(n):
        m_src = action_matrix(A, n, r, b, i)
        m_dst = action_matrix(A, n, r + D.q, b + D.a, i)
        lhs = matmul(d1, m_src)
        rhs = matmul(m_dst, d0)
        if lhs != rhs:
            return i, [[u - v for u, v in zip(x, y)] for x, y in zip(lhs, rhs)]
    return None


# --------------------------------------------------------------------------
# generator reduction


class ReductionUnavailable(ValueError):
    pass


@dataclass
class ReductionCertificate:
    """``target = sum coef * (x_k . source)`` with exact residual."""

    target: HomogeneousForm
    steps: List[Tuple[Fraction, int, HomogeneousForm]]
    residual: HomogeneousForm

    def replay(self, A: ActionCoefficients) -> HomogeneousForm:
        n = self.target.n
        out = HomogeneousForm.zero(n, self.target.r, self.target.b)
        for coef, k, src in self.steps:
            out = out + act(HomogeneousForm.x(n, k), src, A).scale(coef)
        return out

    @property
    def exact(self) -> bool:
        return self.residual.is_zero()


def _divide_x(term: HomogeneousForm, k: int) -> HomogeneousForm:
    ((g, idx), v), = term.terms.items()
    return HomogeneousForm._raw(term.n, term.r, term.b - 1, {(shift_index(g, k, -1), idx): v})


def reduce_degree(target: HomogeneousForm, A: ActionCoefficients) -> ReductionCertificate:
    """Express a basis element of weight ``b + 1`` through ``x_k . (weight b)``."""
    if len(target.terms) != 1:
        raise ValueError("reduction target must be a single basis term")
    n, r = target.n, target.r
    b = target.b - 1
    if target.b <= A.threshold(r):
        return ReductionCertificate(target, [], HomogeneousForm.zero(n, r, target.b))
    ((gamma, idx), scale), = target.terms.items()
    alpha, beta = A(r, b, 1)
    disc = alpha * alpha - beta * beta
    if disc == 0:
        raise ReductionUnavailable(f"alpha^2 = beta^2 at r={r}, b={b}")
    if b <= n:
        raise ReductionUnavailable(f"weight b={b} does not exceed n={n}")

    steps: List[Tuple[Fraction, int, HomogeneousForm]] = []
    unit_target = HomogeneousForm._raw(n, r, target.b, {(gamma, idx): Fraction(1)})
    inside = [k for k in idx if gamma[k]]
    if r == 0:
        if alpha == 0:
            raise ReductionUnavailable(f"alpha vanishes at r=0, b={b}")
        k = next(k for k in range(n) if gamma[k])
        steps.append((1 / alpha, k, _divide_x(unit_target, k)))
    elif inside:
        k = inside[0]
        steps.append((1 / (alpha + beta), k, _divide_x(unit_target, k)))
    else:
        if alpha + beta == 0:
            raise ReductionUnavailable(f"alpha + beta vanishes at r={r}, b={b}")
        k = next(k for k in range(n) if gamma[k] >= 2)
        ell = idx[0]
        lowered = _divide_x(unit_target, k)
        dx_idx = HomogeneousForm._raw(n, r, r, {((0,) * n, idx): Fraction(1)})
        mono = HomogeneousForm._raw(n, 0, b - r, {(shift_index(gamma, k, -1), ()): Fraction(1)})
        src2 = wedge(mono, wedge(HomogeneousForm.dx(n, k),
                                 contract_field(HomogeneousField.coordinate(n, ell), dx_idx)))
        xk, xl = HomogeneousForm.x(n, k), HomogeneousForm.x(n, ell)
        # alpha x_k.lowered - beta x_l.src2 = (alpha^2 - beta^2) target + leftover,
        # and every leftover term carries dx_k with x_k present
        leftover = (act(xk, lowered, A).scale(alpha) - act(xl, src2, A).scale(beta)
                    - unit_target.scale(disc))
        steps.append((alpha / disc, k, lowered))
        steps.append((-beta / disc, ell, src2))
        for (g, I), v in leftover.items():
            if k not in I or not g[k]:
                raise ReductionUnavailable(f"leftover term outside the direct case at r={r}, b={b}")
            term = HomogeneousForm._raw(n, r, target.b, {(g, I): Fraction(1)})
            steps.append((-v / (disc * (alpha + beta)), k, _divide_x(term, k)))
    steps = [(c * scale, k, src) for c, k, src in steps]
    cert = ReductionCertificate(target, steps, HomogeneousForm.zero(n, r, target.b))
    cert.residual = cert.replay(A) - target
    return cert


@dataclass
class GenerationResult:
    passed: bool
    certificates: int
    witness: Optional[Tuple[HomogeneousForm, str]] = None

    def __bool__(self) -> bool:
        return self.passed


def generation_check(r: int, A: ActionCoefficients, n: int, depth: int) -> GenerationResult:
    """Reduce every basis element of weights ``n_r + 1 .. n_r + depth`` and replay."""
    nr = A.threshold(r)
    if nr <= n:
        raise ValueError(f"threshold n_{r} = {nr} must exceed n = {n}")
    count = 0
    for w in range(nr + 1, nr + depth + 1):
        for target in form_basis(n, r, w):
            try:
                cert = reduce_degree(target, A)
            except ReductionUnavailable as exc:
                return GenerationResult(False, count, (target, str(exc)))
            count += 1
            if not cert.exact:
                return GenerationResult(False, count, (target, f"nonzero residual {cert.residual}"))
    return GenerationResult(True, count)


# --------------------------------------------------------------------------
# minimal generators of action-closed subspaces


class NotASubmoduleError(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


Subspace = Callable[[int], List[HomogeneousForm]]


def generator_degrees(V: Subspace, A: ActionCoefficients, n: int, r: int, b_range: Iterable[int]) -> DegreeTable:
    """New generators per weight: ``dim V(b) - dim span{x_i . v : v in V(b-1)}``."""
    table = DegreeTable()
    nr = 0 if A.trivial else A.threshold(r)
    for b in b_range:
        if b < nr:
            table.rows.append(DegreeRow(r, b, in_domain=False))
            continue
        span = V(b)
        vecs = [to_vector(v) for v in span]
        dim_v = rank(vecs) if vecs and vecs[0] else 0
        images = []
        if b - 1 >= nr:
            for v in V(b - 1):
                for i in range(n):
                    images.append(act(HomogeneousForm.x(n, i), v, A))
        img_vecs = [to_vector(w) for w in images]
        dim_img = rank(img_vecs) if img_vecs and img_vecs[0] else 0
        if img_vecs and img_vecs[0]:
            joint = rank(vecs + img_vecs) if vecs else dim_img
            if joint != dim_v:
                bad = next(w for w in images if rank(vecs + [to_vector(w)]) != dim_v) if vecs else images[0]
                raise NotASubmoduleError(f"action leaves the subspace at weight {b}", bad)
        table.rows.append(DegreeRow(r, b, dimension=dim_v, generators=dim_v - dim_img))
    return table


def kernel_subspace(D, r: int) -> Subspace:
    return lambda b: kernel_basis(D, r, b)


def image_subspace(D, r: int) -> Subspace:
    return lambda b: image_basis(D, r, b)


def full_subspace(n: int, r: int) -> Subspace:
    return lambda b: list(form_basis(n, r, b))


def zero_matrix_check(m: Matrix) -> bool:
    return is_zero_matrix(m)
