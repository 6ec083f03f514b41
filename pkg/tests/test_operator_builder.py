import json

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from tests.strategies import algebra_specs, elements, gaussians, poisson_bivectors, scaled_monomials
from utils.algebra_model import AlgebraSpec, Element, TypeIndex, basis, from_coordinates, type_components
from utils.errors import ContractError, NotPoissonError, ParseError, SpecError
from utils.exact_arithmetic import I, ONE, gaussian, rank
from utils.operator_builder import (
    OPERATOR_CACHE_SIZE, Bivector, _total_differential, ad_bivector, ad_bivector_element, ad_vector, ad_vector_element,
    bivector_from_json, bivector_to_json, d_form, dbar, dbar_element, is_holomorphic_poisson, is_schouten_central,
    parse_lambda_tokens, split_bivector, total_differential, weight, wt_vector,
)
from utils.template_manager import builtin_example

HALF_I = gaussian(0, "1/2")
corpus = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def W(spec, l=1):
    return Element.vector(spec.n + l - 1)


def T(j):
    return Element.vector(j - 1)


def wbar(k):
    return Element.form(k - 1)


def rhobar(spec, l=1):
    return Element.form(spec.n + l - 1)


def test_d_form_examples(heis_ext_1, w4n6_0):
    assert not d_form(heis_ext_1, "omega_bar", 1)
    assert not d_form(heis_ext_1, "omega", 1)
    assert d_form(heis_ext_1, "rho", 1) == (Element.dual(0) ^ wbar(1)).scale(-HALF_I)
    assert d_form(w4n6_0, "rho_bar", 1) == (Element.dual(0) ^ wbar(2)).scale(gaussian("1/2"))


def test_d_form_rejects_unknown_generators(heis_ext_1):
    with pytest.raises(SpecError):
        d_form(heis_ext_1, "theta", 1)
    with pytest.raises(SpecError):
        d_form(heis_ext_1, "rho", 2)


def test_dbar_on_generators(heis_ext_1):
    spec = heis_ext_1
    assert dbar_element(spec, T(1)) == (wbar(1) ^ W(spec)).scale(-HALF_I)
    assert not dbar_element(spec, W(spec))
    assert not dbar_element(spec, rhobar(spec))
    assert not dbar_element(spec, wbar(1))


def test_dbar_through_rho_bar(heis_ext_1):
    spec = heis_ext_1
    assert dbar_element(spec, rhobar(spec) ^ T(1)) == (rhobar(spec) ^ wbar(1) ^ W(spec)).scale(HALF_I)


def test_ad_vector_examples(heis_ext_1):
    spec = heis_ext_1
    assert ad_vector_element(spec, T(1), rhobar(spec)) == wbar(1).scale(-HALF_I)
    assert not ad_vector_element(spec, T(1), wbar(1))
    assert ad_vector(spec, W(spec)).is_zero()


def test_ad_vector_rejects_non_vectors(heis_ext_1):
    with pytest.raises(ContractError):
        ad_vector(heis_ext_1, wbar(1))


def test_ad_bivector_example(heis_ext_1, wt):
    spec = heis_ext_1
    assert ad_bivector_element(spec, wt(spec, 1), rhobar(spec)) == (W(spec) ^ wbar(1)).scale(-HALF_I)


def test_ad_bivector_vanishes_for_abelian_algebra():
    spec = AlgebraSpec(2, 1)
    assert ad_bivector(spec, Bivector(T(1) ^ T(2))).is_zero()


def test_poisson_verdicts(heis_ext_1, wt):
    verdict = is_holomorphic_poisson(heis_ext_1, wt(heis_ext_1, 1))
    assert verdict.holomorphic and verdict.poisson and verdict.accepted
    flat = AlgebraSpec(2, 1)
    assert is_holomorphic_poisson(flat, Bivector(T(1) ^ T(2))).accepted


def test_non_holomorphic_bivector_is_rejected_with_witness():
    spec = builtin_example("heis_sum", m=1, n=1)
    verdict = is_holomorphic_poisson(spec, Bivector(T(1) ^ T(2)))
    assert verdict.poisson
    assert not verdict.holomorphic
    assert verdict.dbar_witness == dbar_element(spec, T(1) ^ T(2))
    with pytest.raises(NotPoissonError) as info:
        total_differential(spec, Bivector(T(1) ^ T(2)))
    assert info.value.exit_code == 2


def test_total_differential_special_cases(heis_ext_1, wt):
    zero = total_differential(heis_ext_1, Bivector.zero())
    assert zero.apply(T(1)) == dbar_element(heis_ext_1, T(1))
    flat = AlgebraSpec(1, 1)
    flat_d = total_differential(flat, wt(flat, 1))
    assert all(flat_d.block(degree).is_zero() for degree in range(5))
    total_differential(heis_ext_1, wt(heis_ext_1, 1)).verify_square_zero()


def test_total_differential_is_cached_per_name(wt):
    constants = {(1, 1, 1): gaussian(0, "-1/2")}
    first = AlgebraSpec(1, 1, constants, "first")
    second = AlgebraSpec(1, 1, constants, "second")
    assert first == second
    assert total_differential(first, wt(first, 1)).spec.name == "first"
    assert total_differential(second, wt(second, 1)).spec.name == "second"
    assert total_differential(first, wt(first, 1)) is total_differential(first, wt(first, 1))
    assert _total_differential.cache_info().maxsize == OPERATOR_CACHE_SIZE


def test_weight_counts_vectors_and_rho_bar(heis_ext_1):
    spec = heis_ext_1
    assert weight(spec, next(iter((T(1) ^ wbar(1)).terms))) == 1
    assert weight(spec, next(iter((W(spec) ^ rhobar(spec)).terms))) == 2
    assert weight(spec, next(iter(Element.dual(0).terms))) == 0


@given(algebra_specs(), st.data())
@corpus
def test_weight_pieces_split_the_total_differential(spec, data):
    differential = total_differential(spec, data.draw(poisson_bivectors(spec)))
    for degree in range(2 * spec.dim + 1):
        pieces = differential.pieces(degree)
        covered = sorted(c for piece in pieces.values() for c in piece.coordinates)
        assert covered == list(range(differential.dim(degree)))
        assert differential.rank(degree) == rank(differential.block(degree))


@given(algebra_specs())
@corpus
def test_dbar_squares_to_zero(spec):
    assert dbar(spec).compose(dbar(spec)).is_zero()


@given(algebra_specs(), st.data())
@corpus
def test_bivector_identities(spec, data):
    bivector = data.draw(poisson_bivectors(spec))
    ad = ad_bivector(spec, bivector)
    assert ad.compose(ad).is_zero()
    assert (dbar(spec).compose(ad) + ad.compose(dbar(spec))).is_zero()


def _assert_leibniz(spec, bivector, x, y):
    sign = -1 if x.degree % 2 else 1
    assert dbar_element(spec, x ^ y) == (dbar_element(spec, x) ^ y) + (x ^ dbar_element(spec, y)).scale(sign)
    ad = lambda z: ad_bivector_element(spec, bivector, z)
    assert ad(x ^ y) == (ad(x) ^ y) + (x ^ ad(y)).scale(sign)


@given(algebra_specs(), st.data())
@corpus
def test_graded_leibniz(spec, data):
    top = spec.dim
    grades = st.tuples(st.integers(0, top), st.integers(0, top))
    (p1, q1), (p2, q2) = data.draw(grades), data.draw(grades)
    bivector = data.draw(poisson_bivectors(spec))
    _assert_leibniz(spec, bivector, data.draw(elements(spec, p1, q1)), data.draw(elements(spec, p2, q2)))
    pairs = st.tuples(scaled_monomials(spec), scaled_monomials(spec))
    for x, y in data.draw(st.lists(pairs, min_size=50, max_size=50)):
        _assert_leibniz(spec, bivector, x, y)


def _image_types(spec, image_of, x):
    return set(type_components(spec, image_of(x)))


@given(algebra_specs(min_m=1, max_m=1), st.data())
@corpus
def test_type_shifts(spec, data):
    T_vector = from_coordinates(spec, 1, 0, tuple(data.draw(gaussians) for _ in range(spec.n)) + (gaussian(0),))
    lambda1 = Bivector(W(spec) ^ T_vector)
    for p in range(spec.dim + 1):
        for q in range(spec.dim + 1):
            for monomial in basis(spec, p, q):
                x = Element.monomial(monomial)
                (k, l, a, b), = type_components(spec, x)
                for index in _image_types(spec, lambda z: dbar_element(spec, z), x):
                    assert index == TypeIndex(k - 1, l + 1, a + 1, b)
                for index in _image_types(spec, lambda z: ad_bivector_element(spec, lambda1, z), x):
                    assert index == TypeIndex(k, l + 1, a + 1, b - 1)


def test_lambda2_type_shift(w4n6_0):
    spec = w4n6_0
    lambda2 = Bivector(T(1) ^ T(2))
    image = ad_bivector_element(spec, lambda2, rhobar(spec) ^ wbar(1))
    assert image
    assert set(type_components(spec, image)) == {TypeIndex(1, 0, 2, 0)}


def test_trivial_contraction_kills_ad(w4n6_0, wt):
    assert not ad_vector_element(w4n6_0, T(2), rhobar(w4n6_0))
    assert ad_bivector(w4n6_0, wt(w4n6_0, 2)).is_zero()
    assert not ad_bivector(w4n6_0, wt(w4n6_0, 1)).is_zero()


def test_schouten_centrality(w4n6_0):
    lambda2 = Bivector(T(1) ^ T(2))
    assert not is_schouten_central(w4n6_0, lambda2)
    assert is_schouten_central(w4n6_0, lambda2) == ad_bivector(w4n6_0, lambda2).is_zero()
    assert is_schouten_central(w4n6_0, Bivector.zero())
    assert is_schouten_central(AlgebraSpec(2, 1), lambda2)
    with pytest.raises(ContractError):
        is_schouten_central(w4n6_0, Bivector(W(w4n6_0) ^ T(1)))


def test_split_bivector_and_wt_vector():
    spec = builtin_example("heis_ext", n=2)
    bivector = Bivector.from_terms(spec, wt=[((1, 2), I)], tt=[((1, 2), 3)])
    lambda1, lambda2 = split_bivector(spec, bivector)
    assert lambda1.element == (W(spec) ^ T(2)).scale(I)
    assert lambda2.element == (T(1) ^ T(2)).scale(3)
    assert wt_vector(spec, bivector) == T(2).scale(I)
    with pytest.raises(ContractError):
        wt_vector(AlgebraSpec(1, 2), Bivector.zero())


def test_parse_lambda_tokens():
    spec = builtin_example("heis_ext", n=2)
    bivector = parse_lambda_tokens(spec, ["wt:1,1=1", "tt:1,2=1/2-i"])
    assert bivector.element == (W(spec) ^ T(1)) + (T(1) ^ T(2)).scale(gaussian("1/2", -1))


@pytest.mark.parametrize("token, column", [
    ("xx:1,1=1", 1),
    ("wt:1=1", 4),
    ("wt:1,1", 4),
    ("wt:1,1=1/0", 8),
])
def test_parse_lambda_tokens_reports_columns(heis_ext_1, token, column):
    with pytest.raises(ParseError) as info:
        parse_lambda_tokens(heis_ext_1, ["wt:1,1=1", token])
    assert info.value.line == 2
    assert info.value.column == column


def test_parse_lambda_tokens_rejects_out_of_range_indices(heis_ext_1):
    with pytest.raises(SpecError):
        parse_lambda_tokens(heis_ext_1, ["wt:2,1=1"])
    with pytest.raises(SpecError):
        parse_lambda_tokens(heis_ext_1, ["tt:1,1=1"])


def test_bivector_json_round_trip():
    spec = AlgebraSpec(2, 2)
    bivector = Bivector.from_terms(spec, wt=[((2, 1), I)], tt=[((1, 2), ONE)], ww=[((1, 2), gaussian("1/3"))])
    data = json.loads(json.dumps(bivector_to_json(spec, bivector)))
    assert data["wt"] == [{"l": 2, "j": 1, "re": "0/1", "im": "1/1"}]
    assert bivector_from_json(spec, data) == bivector


def test_bivector_from_json_rejects_malformed_input(heis_ext_1):
    with pytest.raises(ParseError):
        bivector_from_json(heis_ext_1, [])
    with pytest.raises(ParseError):
        bivector_from_json(heis_ext_1, {"wt": {"l": 1}})
