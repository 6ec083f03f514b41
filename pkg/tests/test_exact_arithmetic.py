import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tests.conftest import dense_rank
from tests.strategies import gaussians, matrices
from utils.errors import ContractError, ParseError
from utils.exact_arithmetic import (
    I, ONE, ZERO, SparseMatrix, Subspace, complement_basis, conjugate, format_gaussian, gaussian,
    gaussian_from_json, gaussian_to_json, kernel_basis, parse_gaussian, parse_rational, rank, solve, solve_columns,
    subquotient_dim,
)


@pytest.mark.parametrize("text, expected", [
    ("1/2", gaussian("1/2")),
    ("-3", gaussian(-3)),
    ("2/4", gaussian("1/2")),
    ("1/2-3/4i", gaussian("1/2", "-3/4")),
    ("0+1/2i", gaussian(0, "1/2")),
    ("-1/2i", gaussian(0, "-1/2")),
    ("3i", gaussian(0, 3)),
    ("i", I),
    ("-i", -I),
    ("1+i", gaussian(1, 1)),
])
def test_parse_gaussian(text, expected):
    assert parse_gaussian(text) == expected


@pytest.mark.parametrize("text", ["", "abc", "1/", "1/2/3", "1/2+", "ii", "1.5"])
def test_parse_gaussian_rejects_malformed_tokens(text):
    with pytest.raises(ParseError):
        parse_gaussian(text)


def test_zero_denominator_is_a_parse_error():
    with pytest.raises(ParseError, match="Zero denominator"):
        parse_rational("1/0")


def test_format_gaussian_uses_token_syntax():
    assert format_gaussian(gaussian("-1/2", "1/3")) == "-1/2+1/3i"
    assert format_gaussian(gaussian(0, "-1/2")) == "-1/2i"
    assert format_gaussian(gaussian(4)) == "4"
    assert format_gaussian(ZERO) == "0"


@given(gaussians)
def test_format_then_parse_recovers_value(value):
    assert parse_gaussian(format_gaussian(value)) == value


def test_gaussian_json_fields():
    assert gaussian_to_json(gaussian(0, "-1/2")) == {"re": "0/1", "im": "-1/2"}
    assert gaussian_from_json({"re": "3/6"}) == gaussian("1/2")
    with pytest.raises(ParseError):
        gaussian_from_json({"re": "x"})


def test_sparse_matrix_strips_zeros_and_checks_bounds():
    matrix = SparseMatrix(2, 2, {(0, 0): ZERO, (1, 1): ONE})
    assert matrix.entries == {(1, 1): ONE}
    with pytest.raises(ValueError):
        SparseMatrix(1, 1, {(1, 0): ONE})


def test_sparse_matrix_product_and_apply():
    a = SparseMatrix.from_rows([[1, 2], [0, I]])
    b = SparseMatrix.from_rows([[1], [1]])
    assert (a @ b).to_rows() == [[gaussian(3)], [I]]
    assert a.apply((ONE, ONE)) == (gaussian(3), I)
    assert (a + (-a)).is_zero()


def test_rank_examples():
    assert rank(SparseMatrix.identity(3)) == 3
    assert rank(SparseMatrix.zeros(2, 5)) == 0
    assert rank(SparseMatrix.from_rows([[1, 2], [2, 4]])) == 1
    assert rank(SparseMatrix.from_rows([[1, I], [I, -1]])) == 1


@given(matrices())
def test_rank_matches_dense_oracle(matrix):
    assert rank(matrix) == dense_rank(matrix)


@given(matrices())
def test_rank_nullity(matrix):
    kernel = kernel_basis(matrix)
    assert rank(matrix) + kernel.dim == matrix.cols
    for vector in kernel.basis:
        assert not any(matrix.apply(vector))


def test_kernel_basis_is_canonical():
    kernel = kernel_basis(SparseMatrix.from_rows([[1, 1]]))
    assert kernel.dim == 1
    assert kernel.contains((ONE, -ONE))
    assert kernel == kernel_basis(SparseMatrix.from_rows([[2, 2], [3, 3]]))


def test_kernel_of_empty_matrices():
    assert kernel_basis(SparseMatrix.zeros(3, 0)).dim == 0
    assert kernel_basis(SparseMatrix.zeros(0, 2)).dim == 2


def test_solve_finds_solution_or_none():
    matrix = SparseMatrix.from_rows([[1, 1], [0, 0]])
    solution = solve(matrix, (gaussian(2), ZERO))
    assert matrix.apply(solution) == (gaussian(2), ZERO)
    assert solve(matrix, (ZERO, ONE)) is None
    assert solve(matrix, (ZERO, ZERO)) == (ZERO, ZERO)


def test_solve_rejects_wrong_length():
    with pytest.raises(ContractError):
        solve(SparseMatrix.identity(2), (ONE,))


@given(matrices(), st.data())
@settings(max_examples=50)
def test_solve_image_vectors(matrix, data):
    x = data.draw(st.lists(gaussians, min_size=matrix.cols, max_size=matrix.cols))
    rhs = matrix.apply(x)
    solution = solve(matrix, rhs)
    assert solution is not None
    assert matrix.apply(solution) == rhs


def test_subspace_span_is_canonical():
    assert Subspace.span(2, [(1, 1), (2, 2)]) == Subspace.span(2, [(3, 3)])
    assert Subspace.span(2, [(1, 0), (1, 1)]) == Subspace.full(2)
    assert Subspace.span(3, []) == Subspace.zero(3)


def test_subspace_sum_and_image():
    x = Subspace.span(3, [(1, 0, 0)])
    y = Subspace.span(3, [(0, 1, 0)])
    assert (x + y).dim == 2
    assert x.is_subspace_of(x + y)
    shift = SparseMatrix.from_rows([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    assert (x + y).image(shift) == Subspace.span(3, [(0, 1, 0), (0, 0, 1)])


def test_subquotient_dim_and_witness():
    cycles = Subspace.span(3, [(1, 0, 0), (0, 1, 0)])
    boundaries = Subspace.span(3, [(1, 1, 0)])
    assert subquotient_dim(cycles, boundaries) == 1
    with pytest.raises(ContractError) as info:
        subquotient_dim(boundaries, cycles)
    assert info.value.witness is not None


def test_complement_basis_extends_to_larger_space():
    larger = Subspace.full(3)
    smaller = Subspace.span(3, [(1, 1, 1)])
    complement = complement_basis(larger, smaller)
    assert len(complement) == 2
    assert smaller + Subspace.span(3, complement) == larger


def test_conjugate():
    assert conjugate(gaussian("1/2", "-3/4")) == gaussian("1/2", "3/4")
    assert conjugate(ZERO) == ZERO


@given(gaussians)
def test_conjugate_is_an_involution_with_real_norm(value):
    assert conjugate(conjugate(value)) == value
    assert not (value * conjugate(value)).y


def test_subspace_pivots_follow_the_echelon_basis():
    space = Subspace.span(4, [(0, 2, 0, 2), (0, 0, 1, 0), (0, 1, 1, 1)])
    assert space.pivots == (1, 2)
    assert space.reduce((0, 1, 3, 1)) == (ZERO, ZERO, ZERO, ZERO)


def test_direct_sum_matches_span_of_embedded_vectors():
    left = Subspace.span(2, [(1, I)])
    right = Subspace.span(2, [(0, 1), (1, 0)])
    combined = Subspace.direct_sum(4, [((1, 3), left), ((0, 2), right)])
    assert combined == Subspace.span(4, [(0, 1, 0, I), (1, 0, 0, 0), (0, 0, 1, 0)])
    assert combined.pivots == (0, 1, 2)
    with pytest.raises(ContractError):
        Subspace.direct_sum(4, [((0,), right)])


def test_restrict_reads_the_subspace_in_fewer_coordinates():
    space = Subspace.span(4, [(0, 1, 0, 2)])
    assert space.restrict((1, 3)) == Subspace.span(2, [(1, 2)])
    with pytest.raises(ContractError):
        space.restrict((1, 2))


def test_solve_columns_flags_inconsistent_systems():
    matrix = SparseMatrix.from_rows([[1, 0], [0, 0], [1, 0]])
    solutions = solve_columns(matrix, [(2, 0, 2), (1, 1, 0), (0, 0, 0)])
    assert solutions[0] == (gaussian(2), ZERO)
    assert solutions[1] is None
    assert solutions[2] == (ZERO, ZERO)
    assert solve_columns(matrix, []) == []
    with pytest.raises(ContractError):
        solve_columns(matrix, [(1, 1)])


@given(matrices(), st.data())
@settings(max_examples=50)
def test_solve_columns_agrees_with_solve(matrix, data):
    vectors = st.lists(gaussians, min_size=matrix.cols, max_size=matrix.cols)
    targets = [matrix.apply(data.draw(vectors)) for _ in range(3)]
    targets.append(tuple(data.draw(st.lists(gaussians, min_size=matrix.rows, max_size=matrix.rows))))
    for target, solution in zip(targets, solve_columns(matrix, targets)):
        if solution is None:
            assert solve(matrix, target) is None
        else:
            assert matrix.apply(solution) == target


@given(matrices(max_rows=5, max_cols=5), matrices(max_rows=5, max_cols=5))
def test_complement_basis_of_random_subspaces(first, second):
    size = min(first.cols, second.cols)
    smaller = Subspace.span(size, [row[:size] for row in first.to_rows()])
    larger = smaller + Subspace.span(size, [row[:size] for row in second.to_rows()])
    complement = complement_basis(larger, smaller)
    assert len(complement) == larger.dim - smaller.dim
    assert smaller + Subspace.span(size, complement) == larger
