"""Seeded random forms and operators for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .exterior import HomogeneousForm, basis
from .operators import DiffOperator
from .vvforms import VectorValuedForm


def random_scalar(rng: random.Random, height: int = 5) -> Fraction:
    num = rng.randint(-height, height)
    return Fraction(num, rng.randint(1, height)) if rng.random() < 0.3 else Fraction(num)


def random_form(rng: random.Random, n: int, r: int, b: int, density: float = 0.4, height: int = 5) -> HomogeneousForm:
    terms = {key: random_scalar(rng, height) for key in basis(n, r, b) if rng.random() < density}
    return HomogeneousForm(n, r, b, terms)


def random_vv(rng: random.Random, n: int, degree: int, weight: int, density: float = 0.3) -> VectorValuedForm:
    return VectorValuedForm(n, degree, weight,
                            [random_form(rng, n, degree, weight + 1, density) for _ in range(n)])


def random_operator(rng: random.Random, n: int, max_weight: int = 3) -> DiffOperator:
    """Random ``(K, L, mu)`` of a random bidegree ``(q, a)`` with all parts of weight ``<= max_weight``."""
    q = rng.randint(0, n - 1)
    a = rng.randint(-1, max_weight - 1)
    # parts whose space is empty come out as zero
    return DiffOperator(n, q, a, random_vv(rng, n, q, a), random_vv(rng, n, q + 1, a), random_form(rng, n, q, a))
