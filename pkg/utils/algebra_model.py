"""
Algebra data model and exterior-algebra substrate.

Generators are ordered T_1 < ... < T_n < W_1 < ... < W_m for vectors and
wb^1 < ... < wb^n < rb^1 < ... < rb^m for (0,1)-forms (omega-bar, rho-bar),
with 0-based indices in `Monomial`. Inside a monomial all vectors come first,
then the transient (1,0)-forms w^i, r^l (only produced by `d_form`), then the
(0,1)-forms. Every sign in the package derives from this single order.
"""
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from pathlib import Path
from types import MappingProxyType
from typing import Any, Callable, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from sympy.polys.domains.gaussiandomains import GaussianRational

from utils.errors import ContractError, ParseError, SpecError
from utils.exact_arithmetic import (
    I, ONE, ZERO, SparseMatrix, Subspace, Vector, conjugate, format_gaussian, format_rational, gaussian,
    gaussian_from_json, gaussian_to_json, parse_rational, rank,
)

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

VECTOR, DUAL, FORM = 0, 1, 2
GeneratorKey = Tuple[int, int]
BASIS_CACHE_SIZE = 1024


@dataclass(frozen=True, order=True)
class Monomial:
    """Basis wedge-monomial; index tuples are strictly ascending."""
    vec_idx: Tuple[int, ...] = ()
    form_idx: Tuple[int, ...] = ()
    dual_idx: Tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("vec_idx", "form_idx", "dual_idx"):
            indices = tuple(getattr(self, name))
            if any(a >= b for a, b in zip(indices, indices[1:])):
                raise ValueError(f"Monomial {name} must be strictly ascending, got {indices}.")
            object.__setattr__(self, name, indices)

    @classmethod
    def from_keys(cls, keys: Iterable[GeneratorKey]) -> "Monomial":
        groups: Dict[int, List[int]] = {VECTOR: [], DUAL: [], FORM: []}
        for kind, index in keys:
            groups[kind].append(index)
        return cls(tuple(groups[VECTOR]), tuple(groups[FORM]), tuple(groups[DUAL]))

    def keys(self) -> Tuple[GeneratorKey, ...]:
        """Generators in global order: vectors, then (1,0)-forms, then (0,1)-forms."""
        return (
            tuple((VECTOR, i) for i in self.vec_idx)
            + tuple((DUAL, i) for i in self.dual_idx)
            + tuple((FORM, i) for i in self.form_idx)
        )

    @property
    def bigrade(self) -> Tuple[int, int]:
        return (len(self.vec_idx), len(self.form_idx))

    @property
    def degree(self) -> int:
        return len(self.vec_idx) + len(self.form_idx) + len(self.dual_idx)


def _merge(left: Monomial, right: Monomial) -> Optional[Tuple[bool, Monomial]]:
    """Returns (negative, product) for left ^ right, or None when a generator repeats."""
    a, b = left.keys(), right.keys()
    if set(a) & set(b):
        return None
    inversions = sum(1 for x in a for y in b if x > y)
    return inversions % 2 == 1, Monomial.from_keys(sorted(a + b))


class Element:
    """A sparse Q(i)-linear combination of monomials."""
    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Any]] = None):
        cleaned: Dict[Monomial, GaussianRational] = {}
        for monomial, coeff in (terms or {}).items():
            coeff = gaussian(coeff)
            if coeff:
                cleaned[monomial] = coeff
        self._terms = cleaned

    @classmethod
    def monomial(cls, monomial: Monomial, coeff: Any = ONE) -> "Element":
        return cls({monomial: coeff})

    @classmethod
    def scalar(cls, value: Any) -> "Element":
        return cls({Monomial(): value})

    @classmethod
    def vector(cls, index: int) -> "Element":
        return cls({Monomial(vec_idx=(index,)): ONE})

    @classmethod
    def form(cls, index: int) -> "Element":
        return cls({Monomial(form_idx=(index,)): ONE})

    @classmethod
    def dual(cls, index: int) -> "Element":
        return cls({Monomial(dual_idx=(index,)): ONE})

    @property
    def terms(self) -> Mapping[Monomial, GaussianRational]:
        return MappingProxyType(self._terms)

    def coefficient(self, monomial: Monomial) -> GaussianRational:
        return self._terms.get(monomial, ZERO)

    def bigrades(self) -> List[Tuple[int, int]]:
        return sorted({monomial.bigrade for monomial in self._terms})

    @property
    def bigrade(self) -> Tuple[int, int]:
        """The common bigrade of all terms; ContractError for mixed or empty elements."""
        grades = self.bigrades()
        if len(grades) != 1:
            raise ContractError(f"Element has no single bigrade (found {grades}).", witness=self)
        return grades[0]

    @property
    def degree(self) -> int:
        degrees = {monomial.degree for monomial in self._terms}
        if len(degrees) > 1:
            raise ContractError(f"Element is not homogeneous (degrees {sorted(degrees)}).", witness=self)
        return degrees.pop() if degrees else 0

    def components(self) -> Dict[Tuple[int, int], "Element"]:
        split: Dict[Tuple[int, int], Dict[Monomial, GaussianRational]] = {}
        for monomial, coeff in self._terms.items():
            split.setdefault(monomial.bigrade, {})[monomial] = coeff
        return {grade: Element(terms) for grade, terms in split.items()}

    def scale(self, factor: Any) -> "Element":
        factor = gaussian(factor)
        return Element({monomial: coeff * factor for monomial, coeff in self._terms.items()})

    def __add__(self, other: "Element") -> "Element":
        if not isinstance(other, Element):
            return NotImplemented
        total = dict(self._terms)
        for monomial, coeff in other._terms.items():
            total[monomial] = total.get(monomial, ZERO) + coeff
        return Element(total)

    def __sub__(self, other: "Element") -> "Element":
        if not isinstance(other, Element):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "Element":
        return Element({monomial: -coeff for monomial, coeff in self._terms.items()})

    def __mul__(self, factor: Any) -> "Element":
        if isinstance(factor, Element):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def __xor__(self, other: "Element") -> "Element":
        if not isinstance(other, Element):
            return NotImplemented
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "Element(0)"
        parts = [
            f"{format_gaussian(coeff)}*{monomial.vec_idx}|{monomial.dual_idx}|{monomial.form_idx}"
            for monomial, coeff in sorted(self._terms.items(), key=lambda item: item[0])
        ]
        return f"Element({' + '.join(parts)})"


def wedge(x: Element, y: Element) -> Element:
    """Exterior product; the sign is the parity of the merge permutation."""
    total: Dict[Monomial, GaussianRational] = {}
    for left, a in x.terms.items():
        for right, b in y.terms.items():
            merged = _merge(left, right)
            if merged is None:
                continue
            negative, product = merged
            value = a * b
            total[product] = total.get(product, ZERO) + (-value if negative else value)
    return Element(total)


def contract(vector: Element, form: Element) -> Element:
    """
    Interior product of a grade-(1,0) vector with a form.

    T_j pairs with w^j and W_l with r^l; the sign is (-1) to the number of
    generators preceding the removed (1,0)-form.
    """
    total: Dict[Monomial, GaussianRational] = {}
    for vector_monomial, vector_coeff in vector.terms.items():
        if len(vector_monomial.vec_idx) != 1 or vector_monomial.form_idx or vector_monomial.dual_idx:
            raise ContractError("Contraction requires a vector of grade (1,0).", witness=vector)
        target = (DUAL, vector_monomial.vec_idx[0])
        for monomial, coeff in form.terms.items():
            keys = monomial.keys()
            if target not in keys:
                continue
            position = keys.index(target)
            reduced = Monomial.from_keys(keys[:position] + keys[position + 1:])
            value = vector_coeff * coeff
            total[reduced] = total.get(reduced, ZERO) + (-value if position % 2 else value)
    return Element(total)


def apply_derivation(x: Element, image_of: Callable[[GeneratorKey], Element], odd: bool) -> Element:
    """
    Extends a map on generators to all monomials by the graded Leibniz rule.

    For an odd derivation the image of the generator in position i (0-based)
    picks up the sign (-1)^i; an even derivation picks up no sign.
    """
    total = Element()
    for monomial, coeff in x.terms.items():
        keys = monomial.keys()
        for position, key in enumerate(keys):
            image = image_of(key)
            if not image:
                continue
            prefix = Element.monomial(Monomial.from_keys(keys[:position]))
            suffix = Element.monomial(Monomial.from_keys(keys[position + 1:]))
            term = (prefix ^ image ^ suffix).scale(-coeff if odd and position % 2 else coeff)
            total = total + term
    return total


@dataclass(frozen=True)
class AlgebraSpec:
    """
    Dimensions (n, m) and the structure constants E^l_{kj} of
    [Tb_k, T_j] = sum_l E^l_{kj} W_l - sum_l conj(E^l_{jk}) Wb_l.

    `constants` maps 1-based (l, k, j) to a Gaussian rational; omitted
    entries are zero. It is normalized to a sorted tuple of pairs.
    """
    n: int
    m: int
    constants: Any = ()
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        for label, value in (("n", self.n), ("m", self.m)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise SpecError(f"Dimension {label} must be a non-negative integer, got {value!r}.")
        items = self.constants.items() if isinstance(self.constants, Mapping) else self.constants
        table: Dict[Tuple[int, int, int], GaussianRational] = {}
        for key, value in items:
            l, k, j = (int(index) for index in key)
            if not (1 <= l <= self.m and 1 <= k <= self.n and 1 <= j <= self.n):
                raise SpecError(f"Structure constant index (l={l}, k={k}, j={j}) out of range for n={self.n}, m={self.m}.")
            if (l, k, j) in table:
                raise SpecError(f"Structure constant (l={l}, k={k}, j={j}) given twice.")
            table[(l, k, j)] = gaussian(value)
        normalized = tuple(sorted(((key, value) for key, value in table.items() if value), key=lambda item: item[0]))
        object.__setattr__(self, "constants", normalized)
        object.__setattr__(self, "_table", dict(normalized))

    @property
    def dim(self) -> int:
        return self.n + self.m

    def E(self, l: int, k: int, j: int) -> GaussianRational:
        """E^l_{kj}, 1-based."""
        return self._table.get((l, k, j), ZERO)

    def with_name(self, name: str) -> "AlgebraSpec":
        return AlgebraSpec(self.n, self.m, self.constants, name)


class TypeIndex(NamedTuple):
    """Counts of T, W, wb and rb generators in a monomial."""
    k: int
    l: int
    a: int
    b: int


def type_index(monomial: Monomial, n: int) -> TypeIndex:
    k = sum(1 for index in monomial.vec_idx if index < n)
    a = sum(1 for index in monomial.form_idx if index < n)
    return TypeIndex(k, len(monomial.vec_idx) - k, a, len(monomial.form_idx) - a)


def type_components(spec: AlgebraSpec, x: Element) -> Dict[TypeIndex, Element]:
    """Splits an element of pure bigrade into its (k, l; a, b) type components."""
    if any(monomial.dual_idx for monomial in x.terms):
        raise ContractError("Type decomposition is defined on B^{p,q} only; found a (1,0)-form factor.", witness=x)
    if len(x.bigrades()) > 1:
        raise ContractError(f"Type decomposition needs a pure bigrade, found {x.bigrades()}.", witness=x)
    split: Dict[TypeIndex, Dict[Monomial, GaussianRational]] = {}
    for monomial, coeff in x.terms.items():
        split.setdefault(type_index(monomial, spec.n), {})[monomial] = coeff
    return {index: Element(terms) for index, terms in split.items()}


@lru_cache(maxsize=BASIS_CACHE_SIZE)
def _basis(dim: int, p: int, q: int) -> Tuple[Monomial, ...]:
    if not (0 <= p <= dim and 0 <= q <= dim):
        return ()
    return tuple(
        Monomial(vectors, forms)
        for vectors in combinations(range(dim), p)
        for forms in combinations(range(dim), q)
    )


@lru_cache(maxsize=BASIS_CACHE_SIZE)
def _basis_index(dim: int, p: int, q: int) -> Mapping[Monomial, int]:
    return MappingProxyType({monomial: i for i, monomial in enumerate(_basis(dim, p, q))})


def basis(spec: AlgebraSpec, p: int, q: int) -> List[Monomial]:
    """Lexicographically ordered basis of B^{p,q}; empty for out-of-range grades."""
    return list(_basis(spec.dim, p, q))


def basis_index(spec: AlgebraSpec, p: int, q: int) -> Mapping[Monomial, int]:
    return _basis_index(spec.dim, p, q)


def to_coordinates(spec: AlgebraSpec, x: Element, p: int, q: int) -> Vector:
    """Coordinates of x in basis(spec, p, q)."""
    index = basis_index(spec, p, q)
    vector = [ZERO] * len(index)
    for monomial, coeff in x.terms.items():
        position = index.get(monomial)
        if position is None:
            raise ContractError(f"Monomial {monomial} is not in B^{{{p},{q}}}.", witness=x)
        vector[position] = coeff
    return tuple(vector)


def from_coordinates(spec: AlgebraSpec, p: int, q: int, vector: Sequence[Any]) -> Element:
    monomials = _basis(spec.dim, p, q)
    if len(vector) != len(monomials):
        raise ContractError(f"Expected {len(monomials)} coordinates for B^{{{p},{q}}}, got {len(vector)}.")
    return Element({monomial: value for monomial, value in zip(monomials, vector)})


def generator_name(spec: AlgebraSpec, key: GeneratorKey) -> str:
    kind, index = key
    central = index >= spec.n
    number = index - spec.n + 1 if central else index + 1
    if kind == VECTOR:
        return f"W{number}" if central else f"T{number}"
    if kind == DUAL:
        return f"r{number}" if central else f"w{number}"
    return f"rb{number}" if central else f"wb{number}"


def describe(spec: AlgebraSpec, x: Element) -> str:
    """Human-readable form, e.g. '1/2i*W1^wb1'."""
    if not x:
        return "0"
    parts = []
    for monomial, coeff in sorted(x.terms.items(), key=lambda item: item[0]):
        names = "^".join(generator_name(spec, key) for key in monomial.keys()) or "1"
        parts.append(f"({format_gaussian(coeff)})*{names}")
    return " + ".join(parts)


@dataclass(frozen=True)
class ValidationReport:
    name: str
    n: int
    m: int
    accepted: bool
    center_matches: bool
    m_is_1: bool
    warnings: Tuple[str, ...] = ()

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "m": self.m,
            "accepted": self.accepted,
            "center_matches": self.center_matches,
            "m_is_1": self.m_is_1,
            "warnings": list(self.warnings),
        }


def validate(spec: AlgebraSpec) -> ValidationReport:
    """
    Diagnoses an AlgebraSpec. Every E array defines a 2-step algebra with
    abelian J, so it is always accepted; the report warns when the
    declared center differs from the true one and when m != 1.
    """
    warnings: List[str] = []
    center_warnings = 0
    columns = [
        [spec.E(l, k, j) for l in range(1, spec.m + 1)]
        for k in range(1, spec.n + 1)
        for j in range(1, spec.n + 1)
    ]
    values = SparseMatrix.from_columns(spec.m, columns)
    span_rank = rank(values)
    if span_rank < spec.m:
        warnings.append(
            f"declared center strictly contains derived algebra "
            f"(bracket values span {span_rank} of {spec.m} central directions)"
        )
        center_warnings += 1
        span = Subspace.span(spec.m, columns)
        for l in range(spec.m):
            unit = tuple(ONE if i == l else ZERO for i in range(spec.m))
            if not span.contains(unit):
                warnings.append(f"W_{l + 1} is outside the span of bracket values")

    for j in range(1, spec.n + 1):
        if all(not spec.E(l, k, j) and not spec.E(l, j, k) for l in range(1, spec.m + 1) for k in range(1, spec.n + 1)):
            warnings.append(f"T_{j} brackets trivially with every generator; the true center is larger than declared")
            center_warnings += 1

    if spec.m != 1:
        warnings.append(f"m = {spec.m}: the degeneracy theorems require m = 1")

    for warning in warnings:
        logging.warning(f"Validation of '{spec.name}': {warning}")
    return ValidationReport(
        name=spec.name,
        n=spec.n,
        m=spec.m,
        accepted=True,
        center_matches=center_warnings == 0,
        m_is_1=spec.m == 1,
        warnings=tuple(warnings),
    )


RealVector = Dict[str, GaussianRational]


def _add_into(target: RealVector, source: Mapping[str, GaussianRational], factor: GaussianRational = ONE):
    for name, coeff in source.items():
        value = target.get(name, ZERO) + coeff * factor
        if value:
            target[name] = value
        else:
            target.pop(name, None)


@dataclass(frozen=True)
class RealFrameSpec:
    """
    A real basis {X_k, JX_k, Z_l, JZ_l} with its bracket table and J.

    `J` holds (source, sign, target) triples meaning J(source) = sign * target;
    `brackets` holds (a, b, ((generator, coefficient), ...)) for [a, b], with
    antisymmetry implied and unlisted pairs zero.
    """
    name: str
    t_basis: Tuple[str, ...]
    c_basis: Tuple[str, ...]
    J: Tuple[Tuple[str, int, str], ...]
    brackets: Tuple[Tuple[str, str, Tuple[Tuple[str, GaussianRational], ...]], ...]

    @classmethod
    def build(
        cls,
        name: str,
        t_basis: Sequence[str],
        c_basis: Sequence[str],
        J: Mapping[str, Tuple[int, str]],
        brackets: Mapping[Tuple[str, str], Mapping[str, Any]],
    ) -> "RealFrameSpec":
        j_table = tuple(sorted((source, int(sign), target) for source, (sign, target) in J.items()))
        bracket_table = tuple(sorted(
            (a, b, tuple(sorted((gen, gaussian(coeff)) for gen, coeff in value.items() if gaussian(coeff))))
            for (a, b), value in brackets.items()
        ))
        return cls(name, tuple(t_basis), tuple(c_basis), j_table, bracket_table)

    def j_map(self) -> Dict[str, Tuple[int, str]]:
        return {source: (sign, target) for source, sign, target in self.J}

    @property
    def generators(self) -> Tuple[str, ...]:
        images = self.j_map()
        return (
            self.t_basis
            + tuple(images[name][1] for name in self.t_basis if name in images)
            + self.c_basis
            + tuple(images[name][1] for name in self.c_basis if name in images)
        )

    def center_span(self) -> Tuple[str, ...]:
        images = self.j_map()
        return self.c_basis + tuple(images[name][1] for name in self.c_basis if name in images)

    def apply_J(self, vector: Mapping[str, GaussianRational]) -> RealVector:
        images = self.j_map()
        result: RealVector = {}
        for name, coeff in vector.items():
            sign, target = images[name]
            _add_into(result, {target: coeff}, gaussian(sign))
        return result

    @cached_property
    def _bracket_table(self) -> Dict[Tuple[str, str], RealVector]:
        return {(x, y): dict(value) for x, y, value in self.brackets}

    def bracket(self, a: str, b: str) -> RealVector:
        table = self._bracket_table
        if (a, b) in table:
            return dict(table[(a, b)])
        if (b, a) in table:
            return {name: -coeff for name, coeff in table[(b, a)].items()}
        return {}

    def bracket_vectors(self, u: Mapping[str, GaussianRational], v: Mapping[str, GaussianRational]) -> RealVector:
        result: RealVector = {}
        for a, x in u.items():
            for b, y in v.items():
                _add_into(result, self.bracket(a, b), x * y)
        return result

    def check(self):
        """
        Verifies the frame invariants.

        Raises:
            SpecError: If J is not a signed involution with J^2 = -1, a
                bracket leaves the center span or involves a central
                generator, or the abelian condition [JA, JB] = [A, B] fails.
        """
        images = self.j_map()
        generators = self.generators
        if len(set(generators)) != len(generators) or len(generators) != 2 * (len(self.t_basis) + len(self.c_basis)):
            raise SpecError(f"Real frame '{self.name}': J must map the declared basis to distinct new generators.")
        for name in generators:
            if name not in images:
                raise SpecError(f"Real frame '{self.name}': J is undefined on {name}.")
            sign, target = images[name]
            if sign not in (1, -1) or target not in images:
                raise SpecError(f"Real frame '{self.name}': J({name}) must be +/- a generator.")
            back_sign, back = images[target]
            if back != name or sign * back_sign != -1:
                raise SpecError(f"Real frame '{self.name}': J(J({name})) is not -{name}.")

        center = set(self.center_span())
        known = set(generators)
        for a, b, value in self.brackets:
            if a not in known or b not in known:
                raise SpecError(f"Real frame '{self.name}': bracket [{a}, {b}] names an unknown generator.")
            if value and (a in center or b in center):
                raise SpecError(f"Real frame '{self.name}': bracket [{a}, {b}] involves a central generator.")
            outside = [gen for gen, _ in value if gen not in center]
            if outside:
                raise SpecError(f"Real frame '{self.name}': bracket [{a}, {b}] leaves the center span along {outside}.")
            if any(coeff.y for _, coeff in value):
                raise SpecError(f"Real frame '{self.name}': bracket [{a}, {b}] has a non-real coefficient.")

        for a, b in combinations(generators, 2):
            twisted = self.bracket_vectors(self.apply_J({a: ONE}), self.apply_J({b: ONE}))
            if twisted != self.bracket(a, b):
                raise SpecError(f"Real frame '{self.name}': abelian condition [J{a}, J{b}] = [{a}, {b}] fails.")


def complexify(rf: RealFrameSpec) -> AlgebraSpec:
    """
    Reads the structure constants off the real frame, using
    T_k = (X_k - i JX_k)/2 and W_l = (Z_l - i JZ_l)/2, so Z_l = W_l + Wb_l
    and JZ_l = i (W_l - Wb_l).

    Raises:
        SpecError: If the frame is invalid or a computed bracket has a
            component outside span{W_l, Wb_l}.
    """
    rf.check()
    images = rf.j_map()
    n, m = len(rf.t_basis), len(rf.c_basis)
    half = gaussian("1/2")

    center: Dict[str, Tuple[int, GaussianRational, GaussianRational]] = {}
    for l, name in enumerate(rf.c_basis):
        sign, image = images[name]
        center[name] = (l, ONE, ONE)
        twist = I * gaussian(sign)
        center[image] = (l, twist, -twist)

    def holomorphic(name: str) -> RealVector:
        sign, image = images[name]
        return {name: half, image: -I * half * gaussian(sign)}

    holomorphic_basis = [holomorphic(name) for name in rf.t_basis]
    constants: Dict[Tuple[int, int, int], GaussianRational] = {}
    antiholomorphic_parts: Dict[Tuple[int, int, int], GaussianRational] = {}
    for k, t_k in enumerate(holomorphic_basis):
        t_k_bar = {name: conjugate(coeff) for name, coeff in t_k.items()}
        for j, t_j in enumerate(holomorphic_basis):
            value = rf.bracket_vectors(t_k_bar, t_j)
            for name, coeff in value.items():
                if name not in center:
                    raise SpecError(
                        f"Real frame '{rf.name}': [Tb_{k + 1}, T_{j + 1}] has a component along {name}, "
                        f"outside span{{W, Wb}}."
                    )
                l, along_w, along_w_bar = center[name]
                key = (l + 1, k + 1, j + 1)
                constants[key] = constants.get(key, ZERO) + coeff * along_w
                antiholomorphic_parts[key] = antiholomorphic_parts.get(key, ZERO) + coeff * along_w_bar

    spec = AlgebraSpec(n, m, constants, rf.name)
    for (l, k, j), value in antiholomorphic_parts.items():
        if value != -conjugate(spec.E(l, j, k)):
            raise SpecError(f"Real frame '{rf.name}': Wb_{l} component of [Tb_{k}, T_{j}] is inconsistent.")
    logging.info(f"Complexified real frame '{rf.name}' to n={n}, m={m} with {len(spec.constants)} nonzero constants.")
    return spec


def read_json(path: Union[str, Path]) -> Any:
    """
    Reads a JSON document.

    Raises:
        ParseError: With line and column for malformed JSON, or when the
            file cannot be read.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logging.error(f"Could not read {path}: {e}")
        raise ParseError(f"Could not read {path}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        logging.error(f"Error decoding JSON from {path}: {e}")
        raise ParseError(f"Malformed JSON in {path}: {e.msg}", line=e.lineno, column=e.colno)


def _require(data: Mapping[str, Any], key: str, kind: type, context: str) -> Any:
    if not isinstance(data, Mapping) or key not in data:
        raise ParseError(f"{context}: missing field '{key}'.")
    value = data[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise ParseError(f"{context}: field '{key}' must be of type {kind.__name__}.")
    return value


def algebra_to_json(spec: AlgebraSpec) -> Dict[str, Any]:
    return {
        "name": spec.name,
        "n": spec.n,
        "m": spec.m,
        "E": [{"l": l, "k": k, "j": j, **gaussian_to_json(value)} for (l, k, j), value in spec.constants],
    }


def algebra_from_json(data: Any) -> AlgebraSpec:
    n = _require(data, "n", int, "AlgebraSpec")
    m = _require(data, "m", int, "AlgebraSpec")
    entries = data.get("E", [])
    if not isinstance(entries, list):
        raise ParseError("AlgebraSpec: field 'E' must be a list.")
    constants = []
    for position, entry in enumerate(entries):
        context = f"AlgebraSpec E[{position}]"
        key = tuple(_require(entry, index, int, context) for index in ("l", "k", "j"))
        constants.append((key, gaussian_from_json(entry)))
    return AlgebraSpec(n, m, constants, str(data.get("name", "custom")))


def load_algebra(path: Union[str, Path]) -> AlgebraSpec:
    return algebra_from_json(read_json(path))


def dump_algebra(spec: AlgebraSpec, path: Union[str, Path]):
    Path(path).write_text(json.dumps(algebra_to_json(spec), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def realframe_to_json(rf: RealFrameSpec) -> Dict[str, Any]:
    return {
        "name": rf.name,
        "t_basis": list(rf.t_basis),
        "c_basis": list(rf.c_basis),
        "J": [{"from": source, "sign": sign, "to": target} for source, sign, target in rf.J],
        "brackets": [
            {"a": a, "b": b, "value": [{"gen": gen, "coeff": format_rational(coeff.x)} for gen, coeff in value]}
            for a, b, value in rf.brackets
        ],
    }


def realframe_from_json(data: Any) -> RealFrameSpec:
    name = str(data.get("name", "custom")) if isinstance(data, Mapping) else "custom"
    t_basis = _require(data, "t_basis", list, "RealFrameSpec")
    c_basis = _require(data, "c_basis", list, "RealFrameSpec")
    j_table = {}
    for position, entry in enumerate(_require(data, "J", list, "RealFrameSpec")):
        context = f"RealFrameSpec J[{position}]"
        j_table[_require(entry, "from", str, context)] = (
            _require(entry, "sign", int, context),
            _require(entry, "to", str, context),
        )
    brackets = {}
    for position, entry in enumerate(_require(data, "brackets", list, "RealFrameSpec")):
        context = f"RealFrameSpec brackets[{position}]"
        pair = (_require(entry, "a", str, context), _require(entry, "b", str, context))
        brackets[pair] = {
            _require(term, "gen", str, context): parse_rational(str(_require(term, "coeff", str, context)))
            for term in _require(entry, "value", list, context)
        }
    return RealFrameSpec.build(name, [str(x) for x in t_basis], [str(x) for x in c_basis], j_table, brackets)


def load_realframe(path: Union[str, Path]) -> RealFrameSpec:
    return realframe_from_json(read_json(path))
