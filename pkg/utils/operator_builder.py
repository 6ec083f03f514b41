"""
Differential operators on the invariant bi-complex B^{p,q}, assembled as
exact sparse block matrices: d on forms, dbar, ad_V, ad_Lambda and the total
differential D = dbar + ad_Lambda.
"""
import re
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, List, Mapping, Sequence, Tuple

from utils.algebra_model import (
    FORM, VECTOR, AlgebraSpec, Element, GeneratorKey, Monomial, TypeIndex, _basis, apply_derivation,
    basis_index, contract, describe, from_coordinates, to_coordinates, type_components,
)
from utils.errors import ContractError, NotPoissonError, ParseError, SpecError
from utils.exact_arithmetic import (
    ZERO, SparseMatrix, conjugate, gaussian_from_json, gaussian_to_json, parse_gaussian, rank,
)

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

FORM_KINDS = ("omega", "omega_bar", "rho", "rho_bar")
OPERATOR_CACHE_SIZE = 32
_NO_IMAGE = Element()


@dataclass(frozen=True)
class GradedOperator:
    """Block matrices acting basis(p, q) -> basis(p + shift[0], q + shift[1])."""
    name: str
    spec: AlgebraSpec
    shift: Tuple[int, int]
    blocks: Mapping[Tuple[int, int], SparseMatrix]

    def block(self, p: int, q: int) -> SparseMatrix:
        if (p, q) in self.blocks:
            return self.blocks[(p, q)]
        dp, dq = self.shift
        dim = self.spec.dim
        return SparseMatrix.zeros(len(_basis(dim, p + dp, q + dq)), len(_basis(dim, p, q)))

    def apply(self, x: Element) -> Element:
        dp, dq = self.shift
        result = Element()
        for (p, q), component in x.components().items():
            image = self.block(p, q).apply(to_coordinates(self.spec, component, p, q))
            result = result + from_coordinates(self.spec, p + dp, q + dq, image)
        return result

    def compose(self, other: "GradedOperator") -> "GradedOperator":
        """self after other."""
        dp, dq = other.shift
        blocks = {
            (p, q): self.block(p + dp, q + dq) @ matrix
            for (p, q), matrix in other.blocks.items()
        }
        shift = (self.shift[0] + dp, self.shift[1] + dq)
        return GradedOperator(f"{self.name}*{other.name}", self.spec, shift, blocks)

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        if self.shift != other.shift:
            raise ContractError(f"Cannot add operators with shifts {self.shift} and {other.shift}.")
        keys = set(self.blocks) | set(other.blocks)
        blocks = {key: self.block(*key) + other.block(*key) for key in keys}
        return GradedOperator(f"{self.name}+{other.name}", self.spec, self.shift, blocks)

    def is_zero(self) -> bool:
        return all(matrix.is_zero() for matrix in self.blocks.values())


def _assemble(spec: AlgebraSpec, name: str, shift: Tuple[int, int], image_of: Callable[[Element], Element]) -> GradedOperator:
    dp, dq = shift
    blocks = {}
    for p in range(spec.dim + 1):
        for q in range(spec.dim + 1):
            source = _basis(spec.dim, p, q)
            target = basis_index(spec, p + dp, q + dq)
            entries = {}
            for col, monomial in enumerate(source):
                for image, coeff in image_of(Element.monomial(monomial)).terms.items():
                    row = target.get(image)
                    if row is None:
                        raise ContractError(f"Operator {name} maps {monomial} outside B^{{{p + dp},{q + dq}}}.")
                    entries[(row, col)] = coeff
            blocks[(p, q)] = SparseMatrix(len(target), len(source), entries)
    logging.info(f"Assembled {name} for n={spec.n}, m={spec.m} ({sum(len(b.entries) for b in blocks.values())} nonzero entries).")
    return GradedOperator(name, spec, shift, blocks)


def d_form(spec: AlgebraSpec, kind: str, index: int) -> Element:
    """
    Exterior derivative of a one-form generator.

    Args:
        spec: The algebra.
        kind: One of "omega", "omega_bar", "rho", "rho_bar".
        index: 1-based index (j for omega, l for rho).

    Returns:
        d of the generator as a mixed (1,0)^(0,1) element; zero for omega and
        omega_bar.

    Raises:
        SpecError: For an unknown generator.
    """
    if kind not in FORM_KINDS:
        raise SpecError(f"Unknown form generator kind {kind!r}; expected one of {', '.join(FORM_KINDS)}.")
    bound = spec.n if kind.startswith("omega") else spec.m
    if not 1 <= index <= bound:
        raise SpecError(f"Form generator {kind}^{index} does not exist for n={spec.n}, m={spec.m}.")
    if kind.startswith("omega"):
        return Element()
    result = Element()
    for (l, j, i), value in spec.constants:
        if l != index:
            continue
        if kind == "rho":
            result = result + (Element.dual(i - 1) ^ Element.form(j - 1)).scale(value)
        else:
            result = result + (Element.dual(j - 1) ^ Element.form(i - 1)).scale(-conjugate(value))
    return result


@lru_cache(maxsize=OPERATOR_CACHE_SIZE)
def _dbar_images(spec: AlgebraSpec) -> Dict[GeneratorKey, Element]:
    images: Dict[GeneratorKey, Element] = {}
    for (l, k, j), value in spec.constants:
        key = (VECTOR, j - 1)
        term = (Element.form(k - 1) ^ Element.vector(spec.n + l - 1)).scale(value)
        images[key] = images.get(key, _NO_IMAGE) + term
    return images


def dbar_element(spec: AlgebraSpec, x: Element) -> Element:
    """dbar as an odd derivation; on generators only dbar T_j = sum E^l_{kj} wb^k ^ W_l is nonzero."""
    images = _dbar_images(spec)
    return apply_derivation(x, lambda key: images.get(key, _NO_IMAGE), odd=True)


@lru_cache(maxsize=OPERATOR_CACHE_SIZE)
def dbar(spec: AlgebraSpec) -> GradedOperator:
    return _assemble(spec, "dbar", (0, 1), lambda x: dbar_element(spec, x))


def _require_vector(spec: AlgebraSpec, V: Element):
    if any(len(m.vec_idx) != 1 or m.form_idx or m.dual_idx for m in V.terms):
        raise ContractError("Expected a vector of grade (1,0).", witness=V)


@lru_cache(maxsize=OPERATOR_CACHE_SIZE)
def _ad_vector_images(spec: AlgebraSpec, V: Element) -> Dict[GeneratorKey, Element]:
    _require_vector(spec, V)
    images = {}
    for l in range(1, spec.m + 1):
        image = contract(V, d_form(spec, "rho_bar", l))
        if image:
            images[(FORM, spec.n + l - 1)] = image
    return images


def ad_vector_element(spec: AlgebraSpec, V: Element, x: Element) -> Element:
    """Even derivation vanishing on vectors and wb, with rb^l -> contraction of V into d(rb^l)."""
    images = _ad_vector_images(spec, V)
    if not images:
        return Element()
    return apply_derivation(x, lambda key: images.get(key, _NO_IMAGE), odd=False)


@lru_cache(maxsize=OPERATOR_CACHE_SIZE)
def ad_vector(spec: AlgebraSpec, V: Element) -> GradedOperator:
    _require_vector(spec, V)
    return _assemble(spec, "ad_V", (0, 0), lambda x: ad_vector_element(spec, V, x))


@dataclass(frozen=True)
class Bivector:
    """A grade-(2,0) element; Lambda_1 + Lambda_2 are recovered with `split_bivector`."""
    element: Element

    def __post_init__(self):
        for monomial in self.element.terms:
            if len(monomial.vec_idx) != 2 or monomial.form_idx or monomial.dual_idx:
                raise ContractError("A bivector must be of grade (2,0).", witness=self.element)

    @classmethod
    def zero(cls) -> "Bivector":
        return cls(Element())

    @classmethod
    def from_terms(
        cls,
        spec: AlgebraSpec,
        wt: Iterable[Tuple[Tuple[int, int], Any]] = (),
        tt: Iterable[Tuple[Tuple[int, int], Any]] = (),
        ww: Iterable[Tuple[Tuple[int, int], Any]] = (),
    ) -> "Bivector":
        """
        Builds sum c W_l^T_j + sum c T_i^T_j + sum c W_l1^W_l2 from 1-based index pairs.

        Raises:
            SpecError: For an index outside the algebra or a repeated generator.
        """
        total = Element()
        for kind, terms, first_bound, second_bound in (("wt", wt, spec.m, spec.n), ("tt", tt, spec.n, spec.n), ("ww", ww, spec.m, spec.m)):
            for (a, b), coeff in terms:
                if not (1 <= a <= first_bound and 1 <= b <= second_bound):
                    raise SpecError(f"Bivector term {kind}:{a},{b} names a generator outside n={spec.n}, m={spec.m}.")
                first = spec.n + a - 1 if kind in ("wt", "ww") else a - 1
                second = spec.n + b - 1 if kind == "ww" else b - 1
                if first == second:
                    raise SpecError(f"Bivector term {kind}:{a},{b} repeats a generator.")
                total = total + (Element.vector(first) ^ Element.vector(second)).scale(coeff)
        return cls(total)

    def __add__(self, other: "Bivector") -> "Bivector":
        return Bivector(self.element + other.element)

    def __bool__(self) -> bool:
        return bool(self.element)


def split_bivector(spec: AlgebraSpec, bivector: Bivector) -> Tuple[Bivector, Bivector]:
    """(Lambda_1, Lambda_2): the parts involving a central vector, and the t^{2,0} part."""
    lambda1, lambda2 = Element(), Element()
    for index, component in type_components(spec, bivector.element).items():
        if index == TypeIndex(2, 0, 0, 0):
            lambda2 = lambda2 + component
        else:
            lambda1 = lambda1 + component
    return Bivector(lambda1), Bivector(lambda2)


def wt_vector(spec: AlgebraSpec, bivector: Bivector) -> Element:
    """For m = 1, the unique T in t^{1,0} with Lambda_1 = W ^ T."""
    if spec.m != 1:
        raise ContractError(f"Lambda_1 = W ^ T needs m = 1, got m = {spec.m}.")
    lambda1, _ = split_bivector(spec, bivector)
    terms = {}
    for monomial, coeff in lambda1.element.terms.items():
        t_index, w_index = monomial.vec_idx
        terms[Monomial(vec_idx=(t_index,))] = -coeff
    T = Element(terms)
    if (Element.vector(spec.n) ^ T) != lambda1.element:
        raise ContractError("Lambda_1 is not of the form W ^ T.", witness=lambda1.element)
    return T


def ad_bivector_element(spec: AlgebraSpec, bivector: Bivector, x: Element) -> Element:
    """ad of V1^V2 is V1 ^ ad_V2 - V2 ^ ad_V1, extended linearly over the monomials of the bivector."""
    result = Element()
    for monomial, coeff in bivector.element.terms.items():
        first, second = (Element.vector(index) for index in monomial.vec_idx)
        term = (first ^ ad_vector_element(spec, second, x)) - (second ^ ad_vector_element(spec, first, x))
        result = result + term.scale(coeff)
    return result


@lru_cache(maxsize=OPERATOR_CACHE_SIZE)
def ad_bivector(spec: AlgebraSpec, bivector: Bivector) -> GradedOperator:
    return _assemble(spec, "ad_Lambda", (1, 0), lambda x: ad_bivector_element(spec, bivector, x))


@dataclass(frozen=True)
class PoissonVerdict:
    holomorphic: bool
    poisson: bool
    dbar_witness: Element
    bracket_witness: Element

    @property
    def accepted(self) -> bool:
        return self.holomorphic and self.poisson


def is_holomorphic_poisson(spec: AlgebraSpec, bivector: Bivector) -> PoissonVerdict:
    """Checks dbar Lambda = 0 and [Lambda, Lambda] = ad_Lambda(Lambda) = 0; witnesses are the computed values."""
    dbar_value = dbar_element(spec, bivector.element)
    bracket_value = ad_bivector_element(spec, bivector, bivector.element)
    return PoissonVerdict(not dbar_value, not bracket_value, dbar_value, bracket_value)


def total_layout(spec: AlgebraSpec, degree: int) -> List[Tuple[int, int, int]]:
    """Segments (p, offset, size) of K^degree = sum over p of B^{p, degree - p}, in increasing p."""
    segments = []
    offset = 0
    for p in range(max(0, degree - spec.dim), min(degree, spec.dim) + 1):
        size = len(_basis(spec.dim, p, degree - p))
        segments.append((p, offset, size))
        offset += size
    return segments


def weight(spec: AlgebraSpec, monomial: Monomial) -> int:
    """Number of vectors plus number of rho-bar factors; dbar and every ad_Lambda preserve it."""
    return len(monomial.vec_idx) + sum(1 for index in monomial.form_idx if index >= spec.n)


@dataclass(frozen=True)
class WeightPiece:
    """The coordinates of K^degree of one weight, with the column p of each."""
    degree: int
    weight: int
    coordinates: Tuple[int, ...]
    columns: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coordinates)

    def at_or_after(self, p: int) -> Tuple[int, ...]:
        """Local indices of the coordinates in F^p."""
        return tuple(i for i, column in enumerate(self.columns) if column >= p)

    def before(self, p: int) -> Tuple[int, ...]:
        """Local indices of the coordinates outside F^p."""
        return tuple(i for i, column in enumerate(self.columns) if column < p)


class TotalDifferential:
    """
    D = dbar + ad_Lambda on the total complex K^n.

    D preserves `weight`, so each block splits into the diagonal pieces
    returned by `piece_block`.
    """

    def __init__(self, spec: AlgebraSpec, bivector: Bivector, dbar_operator: GradedOperator, ad_operator: GradedOperator):
        self.spec = spec
        self.bivector = bivector
        self.dbar = dbar_operator
        self.ad = ad_operator
        self._blocks: Dict[int, SparseMatrix] = {}
        self._pieces: Dict[int, Dict[int, WeightPiece]] = {}
        self._piece_blocks: Dict[Tuple[int, int], SparseMatrix] = {}

    def dim(self, degree: int) -> int:
        return sum(size for _, _, size in total_layout(self.spec, degree))

    def block(self, degree: int) -> SparseMatrix:
        """Matrix of D: K^degree -> K^(degree + 1)."""
        if degree not in self._blocks:
            self._blocks[degree] = self._build_block(degree)
        return self._blocks[degree]

    def _build_block(self, degree: int) -> SparseMatrix:
        rows, cols = self.dim(degree + 1), self.dim(degree)
        target = {p: offset for p, offset, _ in total_layout(self.spec, degree + 1)}
        entries = {}
        for p, offset, _ in total_layout(self.spec, degree):
            q = degree - p
            for operator, target_p in ((self.dbar, p), (self.ad, p + 1)):
                if target_p not in target:
                    continue
                for (row, col), value in operator.block(p, q).entries.items():
                    key = (target[target_p] + row, offset + col)
                    entries[key] = entries.get(key, ZERO) + value
        return SparseMatrix(rows, cols, entries)

    def pieces(self, degree: int) -> Dict[int, WeightPiece]:
        """The weight pieces of K^degree, keyed by weight."""
        if degree not in self._pieces:
            grouped: Dict[int, List[Tuple[int, int]]] = {}
            for p, offset, _ in total_layout(self.spec, degree):
                for i, monomial in enumerate(_basis(self.spec.dim, p, degree - p)):
                    grouped.setdefault(weight(self.spec, monomial), []).append((offset + i, p))
            self._pieces[degree] = {
                w: WeightPiece(degree, w, tuple(c for c, _ in entries), tuple(p for _, p in entries))
                for w, entries in sorted(grouped.items())
            }
        return self._pieces[degree]

    def piece(self, degree: int, w: int) -> WeightPiece:
        return self.pieces(degree).get(w, WeightPiece(degree, w, (), ()))

    def piece_block(self, degree: int, w: int) -> SparseMatrix:
        """D restricted to the weight-w pieces of K^degree and K^(degree + 1)."""
        key = (degree, w)
        if key not in self._piece_blocks:
            rows = self.piece(degree + 1, w).coordinates
            cols = self.piece(degree, w).coordinates
            self._piece_blocks[key] = self.block(degree).restrict(rows, cols)
        return self._piece_blocks[key]

    def rank(self, degree: int) -> int:
        """Rank of D on K^degree, summed over weight pieces."""
        return sum(rank(self.piece_block(degree, w)) for w in self.pieces(degree))

    def apply(self, x: Element) -> Element:
        return self.dbar.apply(x) + self.ad.apply(x)

    def verify_square_zero(self):
        for degree in range(0, 2 * self.spec.dim):
            square = self.block(degree + 1) @ self.block(degree)
            if not square.is_zero():
                (row, col), value = next(iter(square.entries.items()))
                logging.error(f"D^2 != 0 on K^{degree}: entry ({row}, {col}) = {value}.")
                raise ContractError(f"D o D does not vanish on K^{degree}.", witness=(row, col, value))

    def verify_weight_preserved(self):
        for degree in range(0, 2 * self.spec.dim):
            inside = sum(len(self.piece_block(degree, w).entries) for w in self.pieces(degree))
            if inside != len(self.block(degree).entries):
                logging.error(f"D mixes weights on K^{degree}.")
                raise ContractError(f"D does not preserve the weight on K^{degree}.")


def total_differential(spec: AlgebraSpec, bivector: Bivector) -> TotalDifferential:
    """
    Assembles D = dbar + ad_Lambda and verifies D o D = 0.

    Raises:
        NotPoissonError: If Lambda is not holomorphic or not Poisson.
        ContractError: If D o D fails to vanish.
    """
    return _total_differential(spec, spec.name, bivector)


@lru_cache(maxsize=OPERATOR_CACHE_SIZE)
def _total_differential(spec: AlgebraSpec, name: str, bivector: Bivector) -> TotalDifferential:
    verdict = is_holomorphic_poisson(spec, bivector)
    if not verdict.holomorphic:
        logging.error(f"Rejected bivector for '{name}': dbar Lambda = {describe(spec, verdict.dbar_witness)}.")
        raise NotPoissonError(f"Lambda is not holomorphic: dbar Lambda = {describe(spec, verdict.dbar_witness)}.", verdict)
    if not verdict.poisson:
        logging.error(f"Rejected bivector for '{name}': [Lambda, Lambda] = {describe(spec, verdict.bracket_witness)}.")
        raise NotPoissonError(f"Lambda is not Poisson: [Lambda, Lambda] = {describe(spec, verdict.bracket_witness)}.", verdict)
    differential = TotalDifferential(spec, bivector, dbar(spec), ad_bivector(spec, bivector))
    differential.verify_square_zero()
    differential.verify_weight_preserved()
    return differential


def is_schouten_central(spec: AlgebraSpec, lambda2: Bivector) -> bool:
    """
    True iff ad_{Lambda_2} vanishes on every degree-one generator.

    Raises:
        ContractError: If Lambda_2 has a component outside t^{2,0}.
    """
    for index, component in type_components(spec, lambda2.element).items():
        if index != TypeIndex(2, 0, 0, 0):
            raise ContractError(f"Lambda_2 has a component of type {tuple(index)}; expected (2,0;0,0).", witness=component)
    generators = [Element.vector(i) for i in range(spec.dim)] + [Element.form(i) for i in range(spec.dim)]
    return all(not ad_bivector_element(spec, lambda2, generator) for generator in generators)


_TOKEN_KINDS = ("wt", "tt", "ww")
_INDEX_RE = re.compile(r"^(\d+),(\d+)$")


def parse_lambda_tokens(spec: AlgebraSpec, tokens: Sequence[str]) -> Bivector:
    """
    Parses command-line terms `wt:l,j=coeff`, `tt:i,j=coeff` and `ww:l1,l2=coeff`.

    Raises:
        ParseError: With the 1-based column of the offending part.
        SpecError: For indices outside the algebra.
    """
    terms: Dict[str, List[Tuple[Tuple[int, int], Any]]] = {kind: [] for kind in _TOKEN_KINDS}
    for number, token in enumerate(tokens, start=1):
        kind, colon, rest = token.partition(":")
        if kind not in _TOKEN_KINDS or not colon:
            raise ParseError(f"Lambda token {number} {token!r}: expected wt:, tt: or ww:", line=number, column=1)
        indices, equals, coeff_text = rest.partition("=")
        match = _INDEX_RE.match(indices)
        if not match or not equals:
            raise ParseError(f"Lambda token {number} {token!r}: expected two indices 'a,b=coeff'", line=number, column=len(kind) + 2)
        try:
            coeff = parse_gaussian(coeff_text)
        except ParseError as e:
            raise ParseError(f"Lambda token {number} {token!r}: {e}", line=number, column=len(kind) + len(indices) + 3)
        terms[kind].append(((int(match.group(1)), int(match.group(2))), coeff))
    return Bivector.from_terms(spec, wt=terms["wt"], tt=terms["tt"], ww=terms["ww"])


def bivector_to_json(spec: AlgebraSpec, bivector: Bivector) -> Dict[str, List[Dict[str, Any]]]:
    data: Dict[str, List[Dict[str, Any]]] = {"wt": [], "tt": []}
    ww = []
    for monomial, coeff in sorted(bivector.element.terms.items(), key=lambda item: item[0]):
        first, second = monomial.vec_idx
        if second < spec.n:
            data["tt"].append({"i": first + 1, "j": second + 1, **gaussian_to_json(coeff)})
        elif first < spec.n:
            data["wt"].append({"l": second - spec.n + 1, "j": first + 1, **gaussian_to_json(-coeff)})
        else:
            ww.append({"l1": first - spec.n + 1, "l2": second - spec.n + 1, **gaussian_to_json(coeff)})
    if ww:
        data["ww"] = ww
    return data


def bivector_from_json(spec: AlgebraSpec, data: Any) -> Bivector:
    if not isinstance(data, Mapping):
        raise ParseError("Bivector file must contain a JSON object.")
    fields = {"wt": ("l", "j"), "tt": ("i", "j"), "ww": ("l1", "l2")}
    terms = {}
    for kind, names in fields.items():
        entries = data.get(kind, [])
        if not isinstance(entries, list):
            raise ParseError(f"Bivector field '{kind}' must be a list.")
        parsed = []
        for position, entry in enumerate(entries):
            try:
                pair = tuple(int(entry[name]) for name in names)
            except (KeyError, TypeError, ValueError):
                raise ParseError(f"Bivector {kind}[{position}] needs integer fields {', '.join(names)}.")
            parsed.append((pair, gaussian_from_json(entry)))
        terms[kind] = parsed
    return Bivector.from_terms(spec, **terms)
