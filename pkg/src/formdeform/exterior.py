"""The bigraded exterior algebra of polynomial differential forms.

A basis element of ``Omega^r(b)`` is ``x^gamma dx_I`` with ``|I| = r`` and
``|gamma| + r = b``.  Index sets are stored strictly increasing and 0-based;
rendering uses 1-based names ``x1 .. xn``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, Iterator, Mapping, Optional, Tuple

from .scalar_poly import (
    HomogeneousPolynomial,
    MultiIndex,
    ScalarLike,
    StructuralError,
    add_index,
    as_scalar,
    fmt_scalar,
    monomials,
    render_monomial,
    shift_index,
    unit,
)

IndexSet = Tuple[int, ...]
FormKey = Tuple[MultiIndex, IndexSet]


class AlgebraError(AssertionError):
    """An identity that must hold exactly did not."""


def merge_sign(i: IndexSet, j: IndexSet) -> Optional[Tuple[int, IndexSet]]:
    """Sign and sorted index set of ``dx_I ^ dx_J``; None when they overlap."""
    if set(i) & set(j):
        return None
    inversions = sum(1 for a in i for b in j if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(i + j))


@lru_cache(maxsize=None)
def basis(n: int, r: int, b: int) -> Tuple[FormKey, ...]:
    """Canonical basis of ``Omega^r(b)``: index sets in lex order, then monomials descending."""
    if r < 0 or r > n or b < r:
        return ()
    monos = monomials(n, b - r)
    return tuple((g, idx) for idx in combinations(range(n), r) for g in monos)


@lru_cache(maxsize=None)
def basis_index(n: int, r: int, b: int) -> Dict[FormKey, int]:
    return {key: k for k, key in enumerate(basis(n, r, b))}


def dim(n: int, r: int, b: int) -> int:
    if r < 0 or r > n or b < r:
        return 0
    return comb(n, r) * comb(n - 1 + b - r, b - r)


class HomogeneousForm:
    """An element of ``Omega^r(b)`` in ``n`` variables with exact rational coefficients."""

    __slots__ = ("n", "r", "b", "_terms", "_hash")

    def __init__(self, n: int, r: int, b: int, terms: Mapping[FormKey, ScalarLike] = ()):
        self.n, self.r, self.b = n, r, b
        clean: Dict[FormKey, Fraction] = {}
        for (g, idx), v in dict(terms).items():
            g, idx = tuple(g), tuple(idx)
            if len(g) != n or min(g, default=0) < 0 or len(idx) != r or sum(g) + r != b:
                raise StructuralError(f"term {(g, idx)} does not belong to Omega^{r}({b}) with n={n}")
            if any(not 0 <= k < n for k in idx):
                raise StructuralError(f"index set {idx} out of range for n={n}")
            srt = tuple(sorted(idx))
            if len(set(srt)) != len(srt):
                continue
            # fold the sorting permutation into the coefficient
            inv = sum(1 for p in range(len(idx)) for q in range(p + 1, len(idx)) if idx[p] > idx[q])
            v = as_scalar(v) * (-1 if inv % 2 else 1)
            key = (g, srt)
            clean[key] = clean.get(key, Fraction(0)) + v
        self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, n: int, r: int, b: int, terms: Dict[FormKey, Fraction]) -> "HomogeneousForm":
        # trusted constructor: keys are canonical, zero values are dropped here
        obj = cls.__new__(cls)
        obj.n, obj.r, obj.b = n, r, b
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, n: int, r: int, b: int) -> "HomogeneousForm":
        return cls._raw(n, r, b, {})

    @classmethod
    def basis_element(cls, n: int, gamma: MultiIndex, idx: IndexSet, coef: ScalarLike = 1) -> "HomogeneousForm":
        return cls(n, len(idx), sum(gamma) + len(idx), {(tuple(gamma), tuple(idx)): coef})

    @classmethod
    def from_poly(cls, p: HomogeneousPolynomial) -> "HomogeneousForm":
        return cls._raw(p.n, 0, p.degree, {(g, ()): v for g, v in p.terms.items()})

    @classmethod
    def constant(cls, n: int, value: ScalarLike = 1) -> "HomogeneousForm":
        return cls._raw(n, 0, 0, {((0,) * n, ()): as_scalar(value)})

    @classmethod
    def dx(cls, n: int, i: int) -> "HomogeneousForm":
        return cls._raw(n, 1, 1, {((0,) * n, (i,)): Fraction(1)})

    @classmethod
    def x(cls, n: int, i: int) -> "HomogeneousForm":
        return cls._raw(n, 0, 1, {(unit(n, i), ()): Fraction(1)})

    @property
    def terms(self) -> Mapping[FormKey, Fraction]:
        return self._terms

    @property
    def bidegree(self) -> Tuple[int, int]:
        return self.r, self.b

    def items(self) -> Iterator[Tuple[FormKey, Fraction]]:
        """Terms in enumerator order."""
        for key in sorted(self._terms, key=_key_order):
            yield key, self._terms[key]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def _same_space(self, other: "HomogeneousForm") -> None:
        if self.n != other.n or self.r != other.r or self.b != other.b:
            raise StructuralError(
                f"cannot add Omega^{self.r}({self.b}) [n={self.n}] and Omega^{other.r}({other.b}) [n={other.n}]"
            )

    def __add__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        self._same_space(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return HomogeneousForm._raw(self.n, self.r, self.b, out)

    def __neg__(self) -> "HomogeneousForm":
        return HomogeneousForm._raw(self.n, self.r, self.b, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        return self + (-other)

    def scale(self, s: ScalarLike) -> "HomogeneousForm":
        s = as_scalar(s)
        if not s:
            return HomogeneousForm.zero(self.n, self.r, self.b)
        return HomogeneousForm._raw(self.n, self.r, self.b, {k: s * v for k, v in self._terms.items()})

    def __mul__(self, s):
        if isinstance(s, (int, Fraction)):
            return self.scale(s)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self.scale(1 / as_scalar(s))

    def wedge(self, other: "HomogeneousForm") -> "HomogeneousForm":
        return wedge(self, other)

    def d(self) -> "HomogeneousForm":
        return ext_d(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        return (self.n, self.r, self.b) == (other.n, other.r, other.b) and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.r, self.b, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"<Omega^{self.r}({self.b}) n={self.n}: {render_form(self)}>"

    def __str__(self) -> str:
        return render_form(self)


def _key_order(key: FormKey):
    g, idx = key
    return (idx, tuple(-e for e in g))


def same_n(*forms) -> int:
    ns = {f.n for f in forms}
    if len(ns) != 1:
        raise StructuralError(f"variable count mismatch: {sorted(ns)}")
    return ns.pop()


def wedge(mu: HomogeneousForm, tau: HomogeneousForm) -> HomogeneousForm:
    n = same_n(mu, tau)
    out: Dict[FormKey, Fraction] = {}
    for (g, i), u in mu._terms.items():
        for (h, j), v in tau._terms.items():
            m = merge_sign(i, j)
            if m is None:
                continue
            sign, k = m
            key = (add_index(g, h), k)
            out[key] = out.get(key, 0) + sign * u * v
    return HomogeneousForm._raw(n, mu.r + tau.r, mu.b + tau.b, out)


def ext_d(tau: HomogeneousForm) -> HomogeneousForm:
    """Exterior differential, bidegree (1, 0)."""
    n = tau.n
    out: Dict[FormKey, Fraction] = {}
    for (g, idx), v in tau._terms.items():
        for k in range(n):
            if not g[k] or k in idx:
                continue
            sign = -1 if sum(1 for i in idx if i < k) % 2 else 1
            key = (shift_index(g, k, -1), tuple(sorted(idx + (k,))))
            out[key] = out.get(key, 0) + sign * g[k] * v
    return HomogeneousForm._raw(n, tau.r + 1, tau.b, out)


def wedge_poly(p: HomogeneousPolynomial, tau: HomogeneousForm) -> HomogeneousForm:
    return wedge(HomogeneousForm.from_poly(p), tau)


# --------------------------------------------------------------------------
# vector fields


FieldKey = Tuple[MultiIndex, int]


class HomogeneousField:
    """An element of ``T(b)``: sum of ``c * x^gamma d/dx_i`` with ``|gamma| - 1 = b``."""

    __slots__ = ("n", "weight", "_terms", "_hash")

    def __init__(self, n: int, weight: int, terms: Mapping[FieldKey, ScalarLike] = ()):
        self.n, self.weight = n, weight
        clean: Dict[FieldKey, Fraction] = {}
        for (g, i), v in dict(terms).items():
            g = tuple(g)
            if len(g) != n or min(g, default=0) < 0 or sum(g) - 1 != weight or not 0 <= i < n:
                raise StructuralError(f"term {(g, i)} does not belong to T({weight}) with n={n}")
            v = as_scalar(v)
            clean[(g, i)] = clean.get((g, i), Fraction(0)) + v
        self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    @classmethod
    def coordinate(cls, n: int, i: int) -> "HomogeneousField":
        return cls(n, -1, {((0,) * n, i): 1})

    @classmethod
    def from_components(cls, comps) -> "HomogeneousField":
        """Field ``sum_i comps[i] d/dx_i`` from homogeneous polynomials of equal degree."""
        comps = list(comps)
        n = len(comps)
        deg = {p.degree for p in comps if not p.is_zero()} or {comps[0].degree}
        if len(deg) != 1:
            raise StructuralError("field components must share one degree")
        c = deg.pop()
        return cls(n, c - 1, {(g, i): v for i, p in enumerate(comps) for g, v in p.terms.items()})

    @property
    def terms(self) -> Mapping[FieldKey, Fraction]:
        return self._terms

    def items(self) -> Iterator[Tuple[FieldKey, Fraction]]:
        for key in sorted(self._terms, key=lambda k: (k[1], tuple(-e for e in k[0]))):
            yield key, self._terms[key]

    def component(self, i: int) -> HomogeneousPolynomial:
        return HomogeneousPolynomial(self.n, self.weight + 1, {g: v for (g, j), v in self._terms.items() if j == i})

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "HomogeneousField") -> "HomogeneousField":
        if (self.n, self.weight) != (other.n, other.weight):
            raise StructuralError("fields of different weight or variable count")
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return HomogeneousField(self.n, self.weight, out)

    def scale(self, s: ScalarLike) -> "HomogeneousField":
        s = as_scalar(s)
        return HomogeneousField(self.n, self.weight, {k: s * v for k, v in self._terms.items()})

    def times(self, f: HomogeneousPolynomial) -> "HomogeneousField":
        """Pointwise product ``f X``."""
        out: Dict[FieldKey, Fraction] = {}
        for (g, i), v in self._terms.items():
            for h, u in f.terms.items():
                key = (add_index(g, h), i)
                out[key] = out.get(key, 0) + u * v
        return HomogeneousField(self.n, self.weight + f.degree, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogeneousField):
            return NotImplemented
        return (self.n, self.weight, self._terms) == (other.n, other.weight, other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.weight, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"<T({self.weight}) n={self.n}: {render_field(self)}>"


@lru_cache(maxsize=None)
def field_basis(n: int, b: int) -> Tuple[FieldKey, ...]:
    """Basis ``x^gamma d/dx_i`` of ``T(b)``: direction first, then monomials descending."""
    return tuple((g, i) for i in range(n) for g in monomials(n, b + 1))


@lru_cache(maxsize=None)
def field_basis_index(n: int, b: int) -> Dict[FieldKey, int]:
    return {key: k for k, key in enumerate(field_basis(n, b))}


def radial_field(n: int) -> HomogeneousField:
    if n < 1:
        raise ValueError("radial field needs n >= 1")
    return HomogeneousField(n, 0, {(unit(n, i), i): 1 for i in range(n)})


def contract_field(X: HomogeneousField, tau: HomogeneousForm) -> HomogeneousForm:
    """Interior product ``i_X tau``, bidegree (-1, weight(X))."""
    n = same_n(X, tau)
    out: Dict[FormKey, Fraction] = {}
    for (h, i), u in X._terms.items():
        for (g, idx), v in tau._terms.items():
            if i not in idx:
                continue
            pos = idx.index(i)
            key = (add_index(g, h), idx[:pos] + idx[pos + 1:])
            out[key] = out.get(key, 0) + (-u if pos % 2 else u) * v
    return HomogeneousForm._raw(n, tau.r - 1, tau.b + X.weight, out)


def contract_radial(tau: HomogeneousForm) -> HomogeneousForm:
    """``i_R tau``; weight is preserved."""
    out: Dict[FormKey, Fraction] = {}
    for (g, idx), v in tau._terms.items():
        for pos, i in enumerate(idx):
            key = (shift_index(g, i, 1), idx[:pos] + idx[pos + 1:])
            out[key] = out.get(key, 0) + (-v if pos % 2 else v)
    return HomogeneousForm._raw(tau.n, tau.r - 1, tau.b, out)


def lie_field(X: HomogeneousField, tau: HomogeneousForm) -> HomogeneousForm:
    """Cartan formula ``i_X d tau + d i_X tau``."""
    return contract_field(X, ext_d(tau)) + ext_d(contract_field(X, tau))


def lie_radial(tau: HomogeneousForm) -> HomogeneousForm:
    """``i_R d tau + d i_R tau``, asserted equal to ``b * tau``."""
    out = contract_radial(ext_d(tau)) + ext_d(contract_radial(tau))
    if out != tau.scale(tau.b):
        raise AlgebraError(f"radial Lie derivative is not {tau.b} * tau on {tau!r}")
    return out


class DomainError(ValueError):
    pass


def radial_exact_split(tau: HomogeneousForm) -> Tuple[HomogeneousForm, HomogeneousForm]:
    """Return ``(d i_R tau / b, i_R d tau / b)``; the pair sums to ``tau``."""
    if tau.b == 0:
        raise DomainError("radial/exact split is undefined in weight 0")
    exact = ext_d(contract_radial(tau)) / tau.b
    radial = contract_radial(ext_d(tau)) / tau.b
    return exact, radial


class FormBasisEnumerator:
    """Iterates the canonical basis of ``Omega^r(b)`` as forms."""

    def __init__(self, n: int, r: int, b: int):
        self.n, self.r, self.b = n, r, b

    def __len__(self) -> int:
        return dim(self.n, self.r, self.b)

    def __iter__(self) -> Iterator[HomogeneousForm]:
        for key in basis(self.n, self.r, self.b):
            yield HomogeneousForm._raw(self.n, self.r, self.b, {key: Fraction(1)})


def form_basis(n: int, r: int, b: int) -> FormBasisEnumerator:
    return FormBasisEnumerator(n, r, b)


def to_vector(tau: HomogeneousForm) -> list:
    idx = basis_index(tau.n, tau.r, tau.b)
    vec = [Fraction(0)] * len(idx)
    for key, v in tau._terms.items():
        vec[idx[key]] = v
    return vec


def from_vector(n: int, r: int, b: int, vec) -> HomogeneousForm:
    keys = basis(n, r, b)
    return HomogeneousForm._raw(n, r, b, {keys[k]: Fraction(v) for k, v in enumerate(vec) if v})


# --------------------------------------------------------------------------
# rendering


def render_dx(idx: IndexSet) -> str:
    return "^".join(f"dx{i + 1}" for i in idx)


def render_form(tau: HomogeneousForm) -> str:
    """Canonical text ``c*x1^a1*...*xn^an dxi1^dxi2^...``, terms in enumerator order."""
    if tau.is_zero():
        return "0"
    pieces = []
    for (g, idx), v in tau.items():
        mag = abs(v)
        head = [render_monomial(g)] if any(g) else []
        if mag != 1 or (not head and not idx):
            head.insert(0, fmt_scalar(mag))
        body = "*".join(head)
        if idx:
            body = f"{body} {render_dx(idx)}" if body else render_dx(idx)
        pieces.append(("-" if v < 0 else "+", body))
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def render_field(X: HomogeneousField) -> str:
    if X.is_zero():
        return "0"
    pieces = []
    for (g, i), v in X.items():
        mag = abs(v)
        head = [render_monomial(g)] if any(g) else []
        if mag != 1:
            head.insert(0, fmt_scalar(mag))
        head.append(f"d/dx{i + 1}")
        pieces.append(("-" if v < 0 else "+", "*".join(head)))
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text
