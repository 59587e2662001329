import json
from fractions import Fraction
from pathlib import Path

import pytest

from formdeform.applications import omega_triangle_operator
from formdeform.deformation import ActionCoefficients, dd_coefficients, dt_coefficients
from formdeform.exterior import HomogeneousForm as F, dim, ext_d, form_basis, to_vector, wedge
from formdeform.modtools import (
    DegreeTable,
    NotASubmoduleError,
    ReductionUnavailable,
    full_subspace,
    generation_check,
    generator_degrees,
    image_basis,
    kernel_basis,
    kernel_dims,
    kernel_subspace,
    matrix_linearity_defect,
    operator_matrix,
    reduce_degree,
)
from formdeform.operators import DiffOperator, d_op, form_degree_op, lambda_op
from formdeform.vvforms import VectorValuedForm

EXPECTED = json.loads((Path(__file__).parent / "expected" / "oracle_values.json").read_text())


def term(n, exps, idx):
    return F(n, len(idx), sum(exps) + len(idx), {(tuple(exps), tuple(idx)): 1})


def test_operator_matrix_examples():
    m = operator_matrix(d_op(2), 0, 1)
    assert m.rows == [[1, 0], [0, 1]]
    zero = operator_matrix(lambda_op(F.zero(2, 0, 0)), 1, 2)
    assert all(v == 0 for row in zero.rows for v in row)


def test_operator_matrix_columns_are_images():
    w = wedge(F.x(3, 0), F.dx(3, 1)) - wedge(F.x(3, 1), F.dx(3, 0))
    D = omega_triangle_operator(w)
    m = operator_matrix(D, 1, 2)
    for j, tau in enumerate(form_basis(3, 1, 2)):
        assert [row[j] for row in m.rows] == to_vector(D(tau))


def test_operator_matrix_additive():
    A, B = d_op(3), DiffOperator(3, 1, 0, K=VectorValuedForm(3, 1, 0, [F.dx(3, 1), F.zero(3, 1, 1), F.dx(3, 0)]))
    for r in range(3):
        ma, mb, ms = (operator_matrix(D, r, 3).rows for D in (A, B, A + B))
        assert ms == [[u + v for u, v in zip(x, y)] for x, y in zip(ma, mb)]


@pytest.mark.parametrize("key,n,r", [("d_kernel_n2_r1", 2, 1), ("d_kernel_n3_r1", 3, 1), ("d_kernel_n3_r0", 3, 0)])
def test_kernel_dims_match_oracle(key, n, r):
    rows = EXPECTED[key]
    table = kernel_dims(d_op(n), r, [row["b"] for row in rows])
    got = [{k: v for k, v in row.items() if k in ("b", "dimension", "rank", "kernel")} for row in table.to_json()]
    assert got == rows
    for row in table.rows:
        assert row.rank + row.kernel == row.dimension


def test_kernel_dims_flags_truncation_and_csv():
    table = kernel_dims(d_op(3), 1, range(0, 3), dd_coefficients(3))
    assert [row.in_domain for row in table.rows] == [False, True, True]
    assert table.to_json()[0] == {"r": 1, "b": 0, "in_domain": False}
    assert table.to_csv().splitlines()[0] == "r,b,dimension,rank,kernel,image,generators,in_domain"
    assert DegreeTable().to_json() == [] and DegreeTable().columns() == []


def test_kernel_and_image_bases():
    D = d_op(3)
    ker = kernel_basis(D, 1, 3)
    assert len(ker) == 10
    assert all(ext_d(k).is_zero() for k in ker)
    assert all(ext_d(v).is_zero() for v in image_basis(D, 1, 3))
    assert kernel_basis(form_degree_op(2), 0, 2) == list(form_basis(2, 0, 2))


def test_matrix_linearity_defect():
    assert matrix_linearity_defect(d_op(3), dd_coefficients(3), 1, 2) is None
    trivial = ActionCoefficients("trivial")
    i, diff = matrix_linearity_defect(d_op(3), trivial, 1, 2)
    assert any(v for row in diff for v in row)


def test_reduce_case_i():
    A = dt_coefficients(2, 3, generation=True)
    target = term(3, (4, 0, 0), (0,))
    cert = reduce_degree(target, A)
    assert len(cert.steps) == 1 and cert.exact
    alpha, beta = A(1, 4, 1)
    assert cert.steps[0][0] == 1 / (alpha + beta)
    assert cert.replay(A) == target


def test_reduce_case_ii():
    A = dt_coefficients(2, 3, generation=True)
    target = term(3, (0, 5, 0), (0,))
    cert = reduce_degree(target, A)
    assert {k for _, k, _ in cert.steps} == {0, 1} and cert.exact
    assert cert.replay(A) == target


def test_reduce_functions_and_scaled_targets():
    A = dd_coefficients(3, generation=True)
    target = F(3, 0, 6, {((2, 2, 2), ()): Fraction(-3, 7)})
    cert = reduce_degree(target, A)
    assert cert.exact and cert.replay(A) == target


def test_reduce_at_threshold_is_empty():
    A = dt_coefficients(2, 3, generation=True)
    assert A.threshold(1) == 4
    cert = reduce_degree(term(3, (3, 0, 0), (0,)), A)
    assert cert.steps == [] and cert.exact


def test_reduce_errors():
    A = dd_coefficients(3)
    with pytest.raises(ReductionUnavailable):
        reduce_degree(term(3, (2, 0, 0), (1,)), A)
    with pytest.raises(ValueError):
        reduce_degree(term(3, (5, 0, 0), (1,)) + term(3, (0, 5, 0), (1,)), A)
    equal = ActionCoefficients("custom", func=lambda r, b, c: (Fraction(1, 2), Fraction(1, 2)),
                               thresholds=(4, 4, 4, 4))
    with pytest.raises(ReductionUnavailable):
        reduce_degree(term(3, (5, 0, 0), (1,)), equal)


@pytest.mark.parametrize("A", [dd_coefficients(3, generation=True), dt_coefficients(2, 3, generation=True)],
                         ids=["dd", "dt"])
@pytest.mark.parametrize("r", [1, 2])
def test_generation_passes(A, r):
    res = generation_check(r, A, 3, 2)
    assert res and res.certificates == sum(dim(3, r, A.threshold(r) + k) for k in (1, 2))


def test_generation_fails_on_corrupted_coefficients():
    equal = ActionCoefficients("custom", func=lambda r, b, c: (Fraction(1, 2), Fraction(1, 2)),
                               thresholds=(4, 4, 4, 4))
    res = generation_check(1, equal, 3, 1)
    assert not res
    target, reason = res.witness
    assert target.b == 5 and "alpha" in reason
    with pytest.raises(ValueError):
        generation_check(1, dd_coefficients(3), 3, 1)


def test_generator_degrees_full_space():
    A = dt_coefficients(2, 3, generation=True)
    table = generator_degrees(full_subspace(3, 1), A, 3, 1, range(3, 8))
    assert [row.in_domain for row in table.rows] == [False, True, True, True, True]
    assert [row.generators for row in table.rows[2:]] == [0, 0, 0]
    assert table.rows[1].generators == dim(3, 1, 4)


def test_generator_degrees_kernel_matches_oracle():
    rows = EXPECTED["dd_generators_n3_r1"][:5]
    A = dd_coefficients(3)
    table = generator_degrees(kernel_subspace(d_op(3), 1), A, 3, 1, [row["b"] for row in rows])
    assert [(row.b, row.dimension, row.generators) for row in table.rows] == \
        [(row["b"], row["dimension"], row["generators"]) for row in rows]


def test_generator_degrees_zero_subspace():
    table = generator_degrees(lambda b: [], dd_coefficients(3), 3, 1, range(1, 5))
    assert [(row.dimension, row.generators) for row in table.rows] == [(0, 0)] * 4


def test_generator_degrees_rejects_non_submodule():
    V = lambda b: [term(3, (b - 1, 0, 0), (0,))]
    with pytest.raises(NotASubmoduleError) as info:
        generator_degrees(V, dd_coefficients(3), 3, 1, range(1, 4))
    assert info.value.witness is not None
