"""Independent reference computations, written on top of sympy.

None of this reuses the package's algebra: forms here are dicts from
increasing index tuples to sympy polynomials, evaluated on coordinate fields
through explicit permutation sums.  Ranks come from sympy's DomainMatrix.

Run ``python tests/oracles.py`` to regenerate ``tests/expected/oracle_values.json``.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from math import factorial
from pathlib import Path

import sympy as sp
from sympy.polys.matrices import DomainMatrix

EXPECTED = Path(__file__).parent / "expected" / "oracle_values.json"


def xs(n):
    return sp.symbols(f"x1:{n + 1}")


def perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
            elif seq[i] == seq[j]:
                return 0
    return sign


class SForm:
    """``{I: coefficient}`` over increasing 0-based index tuples ``I``."""

    def __init__(self, n, r, comps=None):
        self.n, self.r = n, r
        self.comps = {}
        for I, v in (comps or {}).items():
            v = sp.expand(v)
            if v != 0:
                self.comps[tuple(I)] = v

    def at(self, js) -> sp.Expr:
        """Value on the coordinate fields ``d/dx_j`` for ``j`` in ``js``."""
        s = perm_sign(js)
        if not s:
            return sp.Integer(0)
        return s * self.comps.get(tuple(sorted(js)), sp.Integer(0))

    def __add__(self, other):
        out = dict(self.comps)
        for I, v in other.comps.items():
            out[I] = out.get(I, 0) + v
        return SForm(self.n, self.r, out)

    def scale(self, c):
        return SForm(self.n, self.r, {I: c * v for I, v in self.comps.items()})

    def __eq__(self, other):
        return self.r == other.r and self.comps == other.comps


def from_package(tau) -> SForm:
    X = xs(tau.n)
    comps = {}
    for (g, idx), v in tau.terms.items():
        mono = sp.Integer(1)
        for x, e in zip(X, g):
            mono *= x ** e
        comps[idx] = comps.get(idx, 0) + sp.Rational(v.numerator, v.denominator) * mono
    return SForm(tau.n, tau.r, comps)


def wedge(a: SForm, b: SForm) -> SForm:
    out = {}
    for I, u in a.comps.items():
        for J, v in b.comps.items():
            s = perm_sign(I + J)
            if s:
                K = tuple(sorted(I + J))
                out[K] = out.get(K, 0) + s * u * v
    return SForm(a.n, a.r + b.r, out)


def d(a: SForm) -> SForm:
    X = xs(a.n)
    out = {}
    for I, u in a.comps.items():
        for k in range(a.n):
            s = perm_sign((k,) + I)
            if s:
                K = tuple(sorted((k,) + I))
                out[K] = out.get(K, 0) + s * sp.diff(u, X[k])
    return SForm(a.n, a.r + 1, out)


def forms_from_components(n, r, fn) -> SForm:
    """Build an ``r``-form from its values on increasing index tuples."""
    return SForm(n, r, {I: fn(I) for I in itertools.combinations(range(n), r)})


def contraction(rhos, tau: SForm) -> SForm:
    """``i_L tau`` for ``L = sum_i rho_i (x) d/dx_i`` by the permutation-sum formula.

    ``(i_L tau)(X_1..X_{p+r-1}) = 1/(p! (r-1)!) sum_sigma sgn(sigma)
    tau(L(X_s1..X_sp), X_s(p+1) ..)`` with every ``rho_i`` a ``p``-form.
    """
    n, r = tau.n, tau.r
    p = rhos[0].r
    deg = p + r - 1
    if r == 0:
        return SForm(n, deg)
    norm = sp.Rational(1, factorial(p) * factorial(r - 1))

    def value(K):
        total = sp.Integer(0)
        for perm in itertools.permutations(range(deg)):
            s = perm_sign(perm)
            ks = [K[j] for j in perm]
            for i, rho in enumerate(rhos):
                total += s * rho.at(ks[:p]) * tau.at([i] + ks[p:])
        return norm * total

    return forms_from_components(n, deg, value)


def radial_contraction(tau: SForm) -> SForm:
    X = xs(tau.n)
    if tau.r == 0:
        return SForm(tau.n, -1)
    return forms_from_components(tau.n, tau.r - 1, lambda K: sum(X[j] * tau.at((j,) + K) for j in range(tau.n)))


def lie_field(comps, tau: SForm) -> SForm:
    """``L_X tau`` for ``X = sum comps[i] d/dx_i`` via Cartan, contraction by evaluation."""
    n = tau.n

    def ix(t: SForm) -> SForm:
        if t.r == 0:
            return SForm(n, -1)
        return forms_from_components(n, t.r - 1, lambda K: sum(c * t.at((i,) + K) for i, c in enumerate(comps)))

    out = ix(d(tau))
    inner = ix(tau)
    return out + d(inner) if inner.r >= 0 else out


# --------------------------------------------------------------------------
# bases and ranks


def monomials(n, c):
    X = xs(n)
    if c < 0:
        return []
    out = []
    for combo in itertools.combinations_with_replacement(range(n), c):
        m = sp.Integer(1)
        for i in combo:
            m *= X[i]
        out.append(m)
    return out


def form_basis(n, r, b):
    return [SForm(n, r, {I: m}) for I in itertools.combinations(range(n), r) for m in monomials(n, b - r)]


def field_basis(n, b):
    out = []
    for i in range(n):
        for m in monomials(n, b + 1):
            comps = [sp.Integer(0)] * n
            comps[i] = m
            out.append(comps)
    return out


def coefficient_rows(images):
    """Dense matrix (rows = images) over the union of (index, monomial) keys."""
    X = None
    keyed = []
    keys = {}
    for img in images:
        row = {}
        for I, v in img.comps.items():
            if X is None:
                X = xs(img.n)
            for mono, c in sp.Poly(v, *X).terms():
                key = (I, mono)
                keys.setdefault(key, len(keys))
                row[keys[key]] = c
        keyed.append(row)
    return [[row.get(k, 0) for k in range(len(keys))] for row in keyed], len(keys)


def rank_of(images) -> int:
    rows, ncols = coefficient_rows(images)
    if not rows or not ncols:
        return 0
    return DomainMatrix([[sp.QQ(int(sp.numer(v)), int(sp.denom(v))) for v in row] for row in rows],
                        (len(rows), ncols), sp.QQ).rank()


def kernel(images, domain):
    """Basis of the kernel of ``domain[j] -> images[j]`` as combinations of ``domain``."""
    rows, ncols = coefficient_rows(images)
    if not ncols:
        return list(domain)
    M = sp.Matrix(rows).T
    out = []
    for vec in M.nullspace():
        acc = SForm(domain[0].n, domain[0].r)
        for c, f in zip(vec, domain):
            if c != 0:
                acc = acc + f.scale(c)
        out.append(acc)
    return out


# --------------------------------------------------------------------------
# the worked instances


def omega_xy(n):
    X = xs(n)
    return SForm(n, 1, {(0,): -X[1], (1,): X[0]})


def triangle(w: SForm, tau: SForm) -> SForm:
    return wedge(w, d(tau)) + wedge(d(w), tau).scale(sp.Rational(tau.r + 1, 2))


def phi_table(w: SForm, e: int, weights):
    """Per weight: dim, kernel of the form differential, rank of the field differential."""
    n = w.n
    rows = []
    for k in weights:
        basis1 = form_basis(n, 1, k)
        out_rank = rank_of([triangle(w, t) for t in basis1])
        in_rank = rank_of([lie_field(c, w) for c in field_basis(n, k - e)]) if k - e >= -1 else 0
        rows.append({"weight": k, "dimension": len(basis1), "phi": len(basis1) - out_rank,
                     "incoming_rank": in_rank})
    return rows


def dd_act(f_mono, c, tau: SForm, b) -> SForm:
    """Linearized action of the exterior differential, written from its defining formula."""
    if b == 0 and c == 0:
        return wedge(SForm(tau.n, 0, {(): f_mono}), tau)
    alpha, beta = sp.Rational(b, b + c), sp.Rational(1, b + c)
    f = SForm(tau.n, 0, {(): f_mono})
    out = wedge(f, tau).scale(alpha)
    if tau.r:
        out = out + wedge(d(f), radial_contraction(tau)).scale(beta)
    return out


def closed_forms(n, r, b):
    domain = form_basis(n, r, b)
    return kernel([d(t) for t in domain], domain)


def span_growth_generators(n, r, weights, threshold):
    """New generators of ker(d) per weight, by spanning all ``f . v`` from every lower weight."""
    rows = []
    kernels = {}
    for b in weights:
        if b < threshold:
            rows.append({"b": b, "dimension": None, "generators": None})
            continue
        kernels[b] = closed_forms(n, r, b)
        reached = []
        for low in range(threshold, b):
            c = b - low
            for v in kernels.get(low) or closed_forms(n, r, low):
                for m in monomials(n, c):
                    reached.append(dd_act(m, c, v, low))
        dim_v = len(kernels[b])
        rows.append({"b": b, "dimension": dim_v, "generators": dim_v - rank_of(reached)})
    return rows


def d_kernel_dims(n, r, weights):
    out = []
    for b in weights:
        domain = form_basis(n, r, b)
        rk = rank_of([d(t) for t in domain])
        out.append({"b": b, "dimension": len(domain), "rank": rk, "kernel": len(domain) - rk})
    return out


def freeze():
    values = {
        "phi_xy_n3": phi_table(omega_xy(3), 2, range(1, 9)),
        "phi_xy_n2": phi_table(omega_xy(2), 2, range(1, 7)),
        "d_kernel_n2_r1": d_kernel_dims(2, 1, range(0, 6)),
        "d_kernel_n3_r1": d_kernel_dims(3, 1, range(0, 9)),
        "d_kernel_n3_r0": d_kernel_dims(3, 0, range(0, 5)),
        "dd_generators_n3_r1": span_growth_generators(3, 1, range(1, 9), 1),
    }
    EXPECTED.parent.mkdir(exist_ok=True)
    EXPECTED.write_text(json.dumps(values, indent=1) + "\n")
    return values


def to_fraction(v) -> Fraction:
    v = sp.Rational(v)
    return Fraction(int(v.p), int(v.q))


if __name__ == "__main__":
    import time

    t = time.time()
    freeze()
    print(f"wrote {EXPECTED} in {time.time() - t:.1f}s")
