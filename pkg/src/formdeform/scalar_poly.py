"""Exact rational scalars, multi-indices and homogeneous polynomials over Q."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

Scalar = Fraction
MultiIndex = Tuple[int, ...]
ScalarLike = Union[int, Fraction]


class StructuralError(ValueError):
    """Operands live in incompatible spaces (variable count or degree)."""


def as_scalar(value: ScalarLike | str) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floating point values are not exact scalars")
    return Fraction(value)


def fmt_scalar(value: Fraction) -> str:
    """Render as ``p`` or ``p/q``."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def unit(n: int, k: int) -> MultiIndex:
    return tuple(1 if i == k else 0 for i in range(n))


def add_index(g: MultiIndex, h: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(g, h))


def shift_index(g: MultiIndex, k: int, by: int) -> MultiIndex:
    """g + by*e_k, or None when a coordinate would go negative."""
    out = list(g)
    out[k] += by
    if out[k] < 0:
        return None
    return tuple(out)


@lru_cache(maxsize=None)
def monomials(n: int, c: int) -> Tuple[MultiIndex, ...]:
    """All exponent vectors of total degree c, in descending lex order."""
    if c < 0:
        return ()
    if n == 0:
        return ((),) if c == 0 else ()
    out = []
    for combo in combinations_with_replacement(range(n), c):
        g = [0] * n
        for i in combo:
            g[i] += 1
        out.append(tuple(g))
    out.sort(reverse=True)
    return tuple(out)


class HomogeneousPolynomial:
    """A homogeneous polynomial of degree ``c`` in ``n`` variables."""

    __slots__ = ("n", "degree", "_terms", "_hash")

    def __init__(self, n: int, degree: int, terms: Mapping[MultiIndex, ScalarLike] = ()):
        self.n = n
        self.degree = degree
        clean: Dict[MultiIndex, Fraction] = {}
        for g, v in dict(terms).items():
            g = tuple(g)
            if len(g) != n or sum(g) != degree or min(g, default=0) < 0:
                raise StructuralError(f"exponent {g} does not belong to S({degree}) in {n} variables")
            v = as_scalar(v)
            if v:
                clean[g] = clean.get(g, Fraction(0)) + v
                if not clean[g]:
                    del clean[g]
        self._terms = clean
        self._hash = None

    @classmethod
    def monomial(cls, gamma: Iterable[int], coef: ScalarLike = 1) -> "HomogeneousPolynomial":
        gamma = tuple(gamma)
        return cls(len(gamma), sum(gamma), {gamma: coef})

    @classmethod
    def variable(cls, n: int, i: int) -> "HomogeneousPolynomial":
        """The coordinate ``x_{i+1}`` (0-based ``i``)."""
        return cls.monomial(unit(n, i))

    @classmethod
    def constant(cls, n: int, value: ScalarLike = 1) -> "HomogeneousPolynomial":
        return cls(n, 0, {(0,) * n: value})

    @property
    def terms(self) -> Mapping[MultiIndex, Fraction]:
        return self._terms

    def items(self) -> Iterator[Tuple[MultiIndex, Fraction]]:
        for g in sorted(self._terms, reverse=True):
            yield g, self._terms[g]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def _check(self, other: "HomogeneousPolynomial", same_degree: bool) -> None:
        if self.n != other.n:
            raise StructuralError(f"variable count mismatch: {self.n} vs {other.n}")
        if same_degree and self.degree != other.degree:
            raise StructuralError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        self._check(other, True)
        out = dict(self._terms)
        for g, v in other._terms.items():
            out[g] = out.get(g, 0) + v
        return HomogeneousPolynomial(self.n, self.degree, out)

    def __neg__(self) -> "HomogeneousPolynomial":
        return HomogeneousPolynomial(self.n, self.degree, {g: -v for g, v in self._terms.items()})

    def __sub__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        return self + (-other)

    def scale(self, s: ScalarLike) -> "HomogeneousPolynomial":
        s = as_scalar(s)
        return HomogeneousPolynomial(self.n, self.degree, {g: s * v for g, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, HomogeneousPolynomial):
            self._check(other, False)
            out: Dict[MultiIndex, Fraction] = {}
            for g, u in self._terms.items():
                for h, v in other._terms.items():
                    k = add_index(g, h)
                    out[k] = out.get(k, 0) + u * v
            return HomogeneousPolynomial(self.n, self.degree + other.degree, out)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def partial(self, i: int) -> "HomogeneousPolynomial":
        """Derivative with respect to ``x_{i+1}`` (0-based ``i``)."""
        if not 0 <= i < self.n:
            raise IndexError(f"variable index {i} out of range for n={self.n}")
        out = {}
        for g, v in self._terms.items():
            if g[i]:
                out[shift_index(g, i, -1)] = v * g[i]
        # degree -1 only ever holds the zero polynomial
        return HomogeneousPolynomial(self.n, self.degree - 1, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        return self.n == other.n and self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.degree, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"HomogeneousPolynomial(n={self.n}, degree={self.degree}, {render_poly(self)!r})"


def render_monomial(g: MultiIndex) -> str:
    parts = []
    for i, e in enumerate(g):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return "*".join(parts)


def render_poly(p: HomogeneousPolynomial) -> str:
    if p.is_zero():
        return "0"
    out = []
    for g, v in p.items():
        mono = render_monomial(g)
        mag = abs(v)
        if not mono:
            body = fmt_scalar(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{fmt_scalar(mag)}*{mono}"
        out.append(("-" if v < 0 else "+", body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def poly_add(p: HomogeneousPolynomial, q: HomogeneousPolynomial) -> HomogeneousPolynomial:
    return p + q


def poly_mul(p: HomogeneousPolynomial, q: HomogeneousPolynomial) -> HomogeneousPolynomial:
    return p * q


def partial(p: HomogeneousPolynomial, i: int) -> HomogeneousPolynomial:
    return p.partial(i)
