"""
Cohomology dimensions, spectral-sequence pages and differentials for the
column filtration F^p K^n = sum_{p' >= p} B^{p', n - p'}, degeneracy
diagnosis, and the exactness equation for Lambda_1 = W ^ T.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Tuple

from utils.algebra_model import (
    AlgebraSpec, Element, Monomial, TypeIndex, basis, contract, describe, from_coordinates, to_coordinates,
    type_components,
)
from utils.config_manager import ConfigManager
from utils.errors import ContractError
from utils.exact_arithmetic import (
    ZERO, SparseMatrix, Subspace, Vector, complement_basis, gaussian_to_json, kernel_basis, rank, solve,
    solve_columns, subquotient_dim,
)
from utils.operator_builder import (
    Bivector, WeightPiece, ad_bivector, ad_bivector_element, d_form, dbar, dbar_element, is_schouten_central,
    split_bivector, total_differential, total_layout, wt_vector,
)

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

Grade = Tuple[int, int]

SEQUENCE_CACHE_SIZE = 16


@dataclass(frozen=True)
class CohomologyTable:
    """dims[(p, q)] = dim H^q(g^{p,0}); total[n] = dim H^n_Lambda when a bivector is attached."""
    dims: Dict[Grade, int]
    total: Dict[int, int] = field(default_factory=dict)

    def diagonal_sums(self) -> Dict[int, int]:
        sums: Dict[int, int] = {}
        for (p, q), value in self.dims.items():
            sums[p + q] = sums.get(p + q, 0) + value
        return sums

    def euler_characteristic(self) -> int:
        values = self.total if self.total else self.diagonal_sums()
        return sum((-1) ** degree * value for degree, value in values.items())

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"dims": [[p, q, d] for (p, q), d in sorted(self.dims.items())]}
        if self.total:
            data["h_lambda"] = [[degree, d] for degree, d in sorted(self.total.items())]
        return data


def dolbeault_dims(spec: AlgebraSpec) -> CohomologyTable:
    """dims(p, q) = dim ker dbar on B^{p,q} - rank dbar on B^{p,q-1}."""
    operator = dbar(spec)
    ranks = {(p, q): rank(operator.block(p, q)) for p in range(spec.dim + 1) for q in range(spec.dim + 1)}
    dims = {}
    for (p, q), block_rank in ranks.items():
        kernel = operator.block(p, q).cols - block_rank
        dims[(p, q)] = kernel - ranks.get((p, q - 1), 0)
    logging.info(f"Dolbeault dimensions for '{spec.name}': total {sum(dims.values())}.")
    return CohomologyTable(dims)


def poisson_cohomology_dims(spec: AlgebraSpec, bivector: Bivector) -> CohomologyTable:
    """
    Dolbeault dims together with total(n) = dim ker D on K^n - rank D on K^(n-1).

    Raises:
        NotPoissonError: Propagated from total_differential.
        ContractError: If the Euler characteristic disagrees with that of K.
    """
    differential = total_differential(spec, bivector)
    top = 2 * spec.dim
    ranks = {degree: differential.rank(degree) for degree in range(-1, top + 1)}
    total = {
        degree: differential.dim(degree) - ranks[degree] - ranks[degree - 1]
        for degree in range(top + 1)
    }
    expected = sum((-1) ** degree * differential.dim(degree) for degree in range(top + 1))
    table = CohomologyTable(dolbeault_dims(spec).dims, total)
    if table.euler_characteristic() != expected:
        raise ContractError(f"Euler characteristic {table.euler_characteristic()} of H_Lambda differs from {expected}.")
    return table


@dataclass(frozen=True)
class Page:
    """
    E_r: dimensions, representative subspaces of K^{p+q} and the blocks of
    d_r : E_r^{p,q} -> E_r^{p+r, q-r+1} in the representatives' echelon bases.
    """
    r: int
    dims: Dict[Grade, int]
    reps: Dict[Grade, Subspace]
    d_blocks: Dict[Grade, SparseMatrix]

    def d_block(self, p: int, q: int) -> SparseMatrix:
        if (p, q) in self.d_blocks:
            return self.d_blocks[(p, q)]
        return SparseMatrix.zeros(self.dims.get((p + self.r, q - self.r + 1), 0), self.dims.get((p, q), 0))

    def is_zero_differential(self) -> bool:
        return all(block.is_zero() for block in self.d_blocks.values())

    def diagonal_sums(self) -> Dict[int, int]:
        sums: Dict[int, int] = {}
        for (p, q), value in self.dims.items():
            sums[p + q] = sums.get(p + q, 0) + value
        return sums

    def euler_characteristic(self) -> int:
        return sum((-1) ** (p + q) * value for (p, q), value in self.dims.items())

    def to_json(self, include_differentials: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {"r": self.r, "dims": [[p, q, d] for (p, q), d in sorted(self.dims.items())]}
        if include_differentials:
            data["differentials"] = [
                {
                    "source": [p, q],
                    "target": [p + self.r, q - self.r + 1],
                    "matrix": [[i, j, gaussian_to_json(value)] for (i, j), value in sorted(block.entries.items())],
                }
                for (p, q), block in sorted(self.d_blocks.items())
                if not block.is_zero()
            ]
        return data


class SpectralSequence:
    """
    Pages of the column-filtered total complex of one (spec, Lambda) pair.

    Z_r^{p,q} = {x in F^p K^{p+q} : Dx in F^{p+r} K^{p+q+1}} and
    E_r^{p,q} = Z_r^{p,q} / (Z_{r-1}^{p+1,q-1} + D Z_{r-1}^{p-r+1,q+r-2}).

    D preserves the weight, so every space is computed one weight piece at a
    time in the piece's local coordinates; `cycles` and `boundaries` return
    their direct sums in K^{p+q}.
    """

    def __init__(self, spec: AlgebraSpec, bivector: Bivector):
        self.spec = spec
        self.bivector = bivector
        self.differential = total_differential(spec, bivector)
        self._local_cycles: Dict[Tuple[int, int, Tuple[int, ...], Tuple[int, ...]], Subspace] = {}
        self._local_boundaries: Dict[Tuple[int, int, int, int], Subspace] = {}
        self._cycles: Dict[Tuple[int, int, int], Subspace] = {}
        self._boundaries: Dict[Tuple[int, int, int], Subspace] = {}
        self._pages: Dict[int, Page] = {}

    def to_total(self, x: Element, degree: int) -> Vector:
        """Coordinates of x in K^degree; x may mix bigrades of that total degree."""
        ambient = self.differential.dim(degree)
        result = [ZERO] * ambient
        offsets = {p: offset for p, offset, _ in total_layout(self.spec, degree)}
        for (p, q), component in x.components().items():
            if p + q != degree:
                raise ContractError(f"Component of bigrade ({p},{q}) does not lie in K^{degree}.", witness=x)
            for i, value in enumerate(to_coordinates(self.spec, component, p, q)):
                result[offsets[p] + i] = value
        return tuple(result)

    def from_total(self, vector: Vector, degree: int) -> Element:
        result = Element()
        for p, offset, size in total_layout(self.spec, degree):
            result = result + from_coordinates(self.spec, p, degree - p, vector[offset:offset + size])
        return result

    def _cycles_in_piece(self, r: int, p: int, degree: int, w: int) -> Subspace:
        piece = self.differential.piece(degree, w)
        source = piece.at_or_after(p)
        forbidden = self.differential.piece(degree + 1, w).before(p + r)
        key = (degree, w, source, forbidden)
        if key not in self._local_cycles:
            if not source:
                cycles = Subspace.zero(len(piece))
            else:
                kernel = kernel_basis(self.differential.piece_block(degree, w).restrict(forbidden, source))
                cycles = Subspace.direct_sum(len(piece), [(source, kernel)])
            self._local_cycles[key] = cycles
        return self._local_cycles[key]

    def _boundaries_in_piece(self, r: int, p: int, q: int, w: int) -> Subspace:
        key = (r, p, q, w)
        if key not in self._local_boundaries:
            degree = p + q
            lower = self._cycles_in_piece(r - 1, p + 1, degree, w)
            earlier = self._cycles_in_piece(r - 1, p - r + 1, degree - 1, w)
            self._local_boundaries[key] = lower + earlier.image(self.differential.piece_block(degree - 1, w))
        return self._local_boundaries[key]

    def _direct_sum(self, degree: int, local: Callable[[int], Subspace]) -> Subspace:
        pieces = self.differential.pieces(degree)
        return Subspace.direct_sum(
            self.differential.dim(degree), [(piece.coordinates, local(w)) for w, piece in pieces.items()]
        )

    def cycles(self, r: int, p: int, q: int) -> Subspace:
        key = (r, p, q)
        if key not in self._cycles:
            self._cycles[key] = self._direct_sum(p + q, lambda w: self._cycles_in_piece(r, p, p + q, w))
        return self._cycles[key]

    def boundaries(self, r: int, p: int, q: int) -> Subspace:
        key = (r, p, q)
        if key not in self._boundaries:
            self._boundaries[key] = self._direct_sum(p + q, lambda w: self._boundaries_in_piece(r, p, q, w))
        return self._boundaries[key]

    def page(self, r: int) -> Page:
        if r < 1:
            raise ContractError(f"Pages start at r = 1, got r = {r}.")
        if r not in self._pages:
            self._pages[r] = self._compute_page(r)
        return self._pages[r]

    def _compute_page(self, r: int) -> Page:
        top = self.spec.dim
        grid = [(p, q) for p in range(top + 1) for q in range(top + 1)]
        dims: Dict[Grade, int] = {}
        reps: Dict[Grade, Subspace] = {}
        local_reps: Dict[Tuple[int, int, int], Subspace] = {}
        for p, q in grid:
            dims[(p, q)] = 0
            for w in self.differential.pieces(p + q):
                cycles = self._cycles_in_piece(r, p, p + q, w)
                boundaries = self._boundaries_in_piece(r, p, q, w)
                dims[(p, q)] += subquotient_dim(cycles, boundaries)
                local_reps[(p, q, w)] = Subspace.span(cycles.ambient_dim, complement_basis(cycles, boundaries))
            reps[(p, q)] = self._direct_sum(p + q, lambda w: local_reps[(p, q, w)])

        d_blocks: Dict[Grade, SparseMatrix] = {}
        for p, q in grid:
            target = (p + r, q - r + 1)
            if target not in dims:
                continue
            entries: Dict[Tuple[int, int], Any] = {}
            if dims[(p, q)] and dims[target]:
                source_index = _row_index(reps[(p, q)], self.differential.pieces(p + q))
                target_index = _row_index(reps[target], self.differential.pieces(p + q + 1))
                for w in self.differential.pieces(p + q):
                    entries.update(self._d_entries(r, p, q, w, local_reps, source_index, target_index))
            d_blocks[(p, q)] = SparseMatrix(dims[target], dims[(p, q)], entries)

        if r == 1:
            expected = dolbeault_dims(self.spec).dims
            if dims != expected:
                raise ContractError(f"E_1 of '{self.spec.name}' differs from the Dolbeault cohomology.", witness=dims)

        page = Page(r, dims, reps, d_blocks)
        logging.info(
            f"Page E_{r} for '{self.spec.name}': total dimension {sum(dims.values())}, "
            f"{'zero' if page.is_zero_differential() else 'nonzero'} d_{r}."
        )
        return page

    def _d_entries(
        self,
        r: int,
        p: int,
        q: int,
        w: int,
        local_reps: Dict[Tuple[int, int, int], Subspace],
        source_index: Dict[Tuple[int, int], int],
        target_index: Dict[Tuple[int, int], int],
    ) -> Dict[Tuple[int, int], Any]:
        """Entries of d_r from the weight-w piece at (p, q), in the pages' representative bases."""
        source_reps = local_reps[(p, q, w)]
        target = (p + r, q - r + 1)
        target_reps = local_reps.get((target[0], target[1], w))
        if not source_reps.dim or target_reps is None or not target_reps.dim:
            return {}
        boundaries = self._boundaries_in_piece(r, target[0], target[1], w)
        change_of_basis = SparseMatrix.from_columns(target_reps.ambient_dim, target_reps.basis + boundaries.basis)
        block = self.differential.piece_block(p + q, w)
        images = [block.apply(representative) for representative in source_reps.basis]
        entries = {}
        for pivot, image, coefficients in zip(source_reps.pivots, images, solve_columns(change_of_basis, images)):
            if coefficients is None:
                raise ContractError(f"D of a representative at ({p},{q}) is not an E_{r} cycle at {target}.", witness=image)
            col = source_index[(w, pivot)]
            for local_row, target_pivot in enumerate(target_reps.pivots):
                entries[(target_index[(w, target_pivot)], col)] = coefficients[local_row]
        return entries


def _row_index(space: Subspace, pieces: Dict[int, WeightPiece]) -> Dict[Tuple[int, int], int]:
    """Maps (weight, local pivot) of each piece's echelon row to its row in the direct sum."""
    position = {pivot: row for row, pivot in enumerate(space.pivots)}
    return {
        (w, local): position[coordinate]
        for w, piece in pieces.items()
        for local, coordinate in enumerate(piece.coordinates)
        if coordinate in position
    }


def spectral_sequence(spec: AlgebraSpec, bivector: Bivector) -> SpectralSequence:
    return _spectral_sequence(spec, spec.name, bivector)


@lru_cache(maxsize=SEQUENCE_CACHE_SIZE)
def _spectral_sequence(spec: AlgebraSpec, name: str, bivector: Bivector) -> SpectralSequence:
    return SpectralSequence(spec, bivector)


def page(spec: AlgebraSpec, bivector: Bivector, r: int) -> Page:
    """E_r of the spectral sequence; E_1 agrees with dolbeault_dims."""
    return spectral_sequence(spec, bivector).page(r)


def first_row_vanishes(spec: AlgebraSpec, bivector: Bivector) -> bool:
    """d_1 vanishes on the row q = 0."""
    first = page(spec, bivector, 1)
    return all(first.d_block(p, 0).is_zero() for p in range(spec.dim + 1))


def first_column_vanishes(spec: AlgebraSpec, bivector: Bivector) -> bool:
    """d_1 vanishes on the column p = 0."""
    first = page(spec, bivector, 1)
    return all(first.d_block(0, q).is_zero() for q in range(spec.dim + 1))


@dataclass(frozen=True)
class ZigzagResult:
    gamma: Element
    value: Element
    lift: Element
    zero_class: bool


def d2_zigzag(spec: AlgebraSpec, bivector: Bivector, class_rep: Element) -> ZigzagResult:
    """
    Solves dbar Gamma = ad_Lambda Upsilon and returns ad_Lambda Gamma.

    The filtered d_2 of the class of Upsilon is the class of -ad_Lambda Gamma,
    represented by D applied to `lift` = Upsilon - Gamma.

    Raises:
        ContractError: If Upsilon is not dbar-closed, if ad_Lambda Upsilon is
            not dbar-exact, or if the class depends on the choice of Gamma.
    """
    sequence = spectral_sequence(spec, bivector)
    if not class_rep:
        return ZigzagResult(Element(), Element(), Element(), True)
    p, q = class_rep.bigrade
    closure = dbar_element(spec, class_rep)
    if closure:
        raise ContractError("Class representative is not dbar-closed.", witness=closure)

    pushed = ad_bivector_element(spec, bivector, class_rep)
    dbar_operator = dbar(spec)
    source_block = dbar_operator.block(p + 1, q - 1) if q >= 1 else SparseMatrix.zeros(len(basis(spec, p + 1, q)), 0)
    coefficients = solve(source_block, to_coordinates(spec, pushed, p + 1, q))
    if coefficients is None:
        raise ContractError("ad_Lambda of the class representative is not dbar-exact.", witness=pushed)
    gamma = from_coordinates(spec, p + 1, q - 1, coefficients) if q >= 1 else Element()
    value = ad_bivector_element(spec, bivector, gamma)

    degree = p + q + 1
    boundaries = sequence.boundaries(2, p + 2, q - 1)
    zero_class = boundaries.contains(sequence.to_total(value, degree))

    if q >= 1:
        freedom = kernel_basis(source_block)
        if freedom.dim:
            other = gamma + from_coordinates(spec, p + 1, q - 1, freedom.basis[0])
            difference = ad_bivector_element(spec, bivector, other) - value
            if not boundaries.contains(sequence.to_total(difference, degree)):
                raise ContractError("The d_2 class depends on the choice of Gamma.", witness=difference)

    return ZigzagResult(gamma, value, class_rep - gamma, zero_class)


def _contraction_matrix(spec: AlgebraSpec, kind: str) -> SparseMatrix:
    """Matrix of T -> contraction of T into d(rho) or d(rho-bar), t^{1,0} -> t^{*(0,1)}."""
    form = d_form(spec, kind, 1)
    entries = {}
    for j in range(spec.n):
        for monomial, coeff in contract(Element.vector(j), form).terms.items():
            if monomial.vec_idx or monomial.dual_idx or len(monomial.form_idx) != 1 or monomial.form_idx[0] >= spec.n:
                raise ContractError(f"Contraction into d{kind} left t^{{*(0,1)}}.", witness=monomial)
            entries[(monomial.form_idx[0], j)] = coeff
    return SparseMatrix(spec.n, spec.n, entries)


def _require_m_is_1(spec: AlgebraSpec, operation: str):
    if spec.m != 1:
        raise ContractError(f"{operation} requires m = 1, got m = {spec.m}.")


def _t_coordinates(spec: AlgebraSpec, T: Element) -> Vector:
    coordinates = [ZERO] * spec.n
    for monomial, coeff in T.terms.items():
        if len(monomial.vec_idx) != 1 or monomial.form_idx or monomial.dual_idx or monomial.vec_idx[0] >= spec.n:
            raise ContractError("Expected a vector in t^{1,0}.", witness=T)
        coordinates[monomial.vec_idx[0]] = coeff
    return tuple(coordinates)


def exactness_solver(spec: AlgebraSpec, T: Element) -> Optional[Element]:
    """
    Solves the contraction identity of T into d(rho-bar) = -(contraction of V into d(rho)) for V in t^{1,0}.

    Returns:
        V with dbar V = ad_{W^T}(rho-bar), or None when no V exists.

    Raises:
        ContractError: If m != 1, T is not in t^{1,0}, or the solution fails
            the dbar check.
    """
    _require_m_is_1(spec, "The exactness solver")
    t = _t_coordinates(spec, T)
    rho = _contraction_matrix(spec, "rho")
    rho_bar = _contraction_matrix(spec, "rho_bar")
    rhs = tuple(-value for value in rho_bar.apply(t))
    solution = solve(rho, rhs)
    if solution is None:
        logging.info(f"Exactness equation has no solution for T = {describe(spec, T)} in '{spec.name}'.")
        return None
    V = Element({Monomial(vec_idx=(j,)): value for j, value in enumerate(solution)})

    lambda1 = Bivector(Element.vector(spec.n) ^ T)
    expected = ad_bivector_element(spec, lambda1, Element.form(spec.n))
    if dbar_element(spec, V) != expected:
        raise ContractError("dbar V differs from ad_{W^T}(rho-bar).", witness=V)
    return V


@dataclass(frozen=True)
class DrhoRank:
    rank_drho: int
    rank_drhobar: int
    kernel_drhobar: Subspace


def drho_rank(spec: AlgebraSpec) -> DrhoRank:
    """Ranks of the contraction maps of d(rho) and d(rho-bar) and the kernel of the latter in the T-basis."""
    _require_m_is_1(spec, "drho_rank")
    rho_bar = _contraction_matrix(spec, "rho_bar")
    return DrhoRank(rank(_contraction_matrix(spec, "rho")), rank(rho_bar), kernel_basis(rho_bar))


def lambda1_primitive(spec: AlgebraSpec, T: Element, upsilon: Element) -> Element:
    """
    For a dbar-closed Upsilon = rho-bar ^ Psi of type (p,0;q-1,1), returns
    V ^ Psi, whose dbar is ad_{W^T} Upsilon.

    Raises:
        ContractError: If m != 1, Upsilon has the wrong type or is not closed,
            the exactness equation has no solution, or the result fails the
            dbar check.
    """
    _require_m_is_1(spec, "lambda1_primitive")
    p, q = upsilon.bigrade
    for index, component in type_components(spec, upsilon).items():
        if index != TypeIndex(p, 0, q - 1, 1):
            raise ContractError(f"Expected type ({p},0;{q - 1},1), found {tuple(index)}.", witness=component)
    closure = dbar_element(spec, upsilon)
    if closure:
        raise ContractError("Upsilon is not dbar-closed.", witness=closure)
    V = exactness_solver(spec, T)
    if V is None:
        raise ContractError("The exactness equation has no solution for this T.", witness=T)

    psi_terms = {}
    for monomial, coeff in upsilon.terms.items():
        reduced = Monomial(monomial.vec_idx, monomial.form_idx[:-1])
        psi_terms[reduced] = -coeff if reduced.degree % 2 else coeff
    psi = Element(psi_terms)
    if (Element.form(spec.n) ^ psi) != upsilon:
        raise ContractError("Upsilon does not factor as rho-bar ^ Psi.", witness=upsilon)

    primitive = V ^ psi
    lambda1 = Bivector(Element.vector(spec.n) ^ T)
    if dbar_element(spec, primitive) != ad_bivector_element(spec, lambda1, upsilon):
        raise ContractError("dbar(V ^ Psi) differs from ad_{W^T} Upsilon.", witness=primitive)
    return primitive


@dataclass(frozen=True)
class DegeneracyReport:
    name: str
    n: int
    m: int
    page: int
    pages: Tuple[Page, ...]
    h_lambda: Dict[int, int]
    checks: Dict[str, Any]

    def to_json(self, include_differentials: bool = False) -> Dict[str, Any]:
        return {
            "algebra": {"name": self.name, "n": self.n, "m": self.m},
            "e_pages": [page.to_json(include_differentials) for page in self.pages],
            "h_lambda": [[degree, d] for degree, d in sorted(self.h_lambda.items())],
            "degeneracy_page": self.page,
            "checks": dict(self.checks),
        }


def degeneracy_page(spec: AlgebraSpec, bivector: Bivector, max_pages: Optional[int] = None) -> DegeneracyReport:
    """
    Iterates pages up to the guard n + m + 1 (or the configured cap), finds
    the page after the last nonzero differential, cross-checks E_infinity
    against H_Lambda and, for m = 1, asserts the degeneracy theorems.

    Raises:
        NotPoissonError: Propagated from total_differential.
        ContractError: If E_infinity disagrees with H_Lambda or a theorem
            implication fails.
    """
    sequence = spectral_sequence(spec, bivector)
    guard = spec.dim + 1
    limit = max_pages if max_pages is not None else ConfigManager().get_max_pages(spec)
    last = max(1, min(limit, guard))
    pages = tuple(sequence.page(r) for r in range(1, last + 1))
    nonzero = [current.r for current in pages if not current.is_zero_differential()]
    found = max(nonzero) + 1 if nonzero else 1
    converged = limit >= guard

    cohomology = poisson_cohomology_dims(spec, bivector)
    if converged:
        limit_sums = pages[-1].diagonal_sums()
        for degree, dimension in cohomology.total.items():
            if limit_sums.get(degree, 0) != dimension:
                raise ContractError(
                    f"E_infinity has dimension {limit_sums.get(degree, 0)} in degree {degree}, "
                    f"but H_Lambda has dimension {dimension}."
                )

    _, lambda2 = split_bivector(spec, bivector)
    central = is_schouten_central(spec, lambda2)
    checks: Dict[str, Any] = {
        "m_is_1": spec.m == 1,
        "drhobar_rank": None,
        "lambda2_central": central,
        "exactness_solvable": None,
        "lambda1_trivial": None,
        "first_row_vanishes": first_row_vanishes(spec, bivector),
        "first_column_vanishes": first_column_vanishes(spec, bivector),
        "converged": converged,
        "theorem_consistent": None,
    }
    if spec.m == 1:
        T = wt_vector(spec, bivector)
        solvable = exactness_solver(spec, T) is not None
        ranks = drho_rank(spec)
        trivial = not contract(T, d_form(spec, "rho_bar", 1))
        checks.update(drhobar_rank=ranks.rank_drhobar, exactness_solvable=solvable, lambda1_trivial=trivial)
        if converged:
            failures = _theorem_failures(spec, bivector, found, solvable, central, ranks, trivial, lambda2, cohomology)
            if failures:
                logging.error(f"Degeneracy theorem check failed for '{spec.name}': {'; '.join(failures)}.")
                raise ContractError(f"Degeneracy theorem check failed: {'; '.join(failures)}.")
            checks["theorem_consistent"] = True

    logging.info(f"Spectral sequence for '{spec.name}' degenerates at E_{found}.")
    return DegeneracyReport(spec.name, spec.n, spec.m, found, pages, cohomology.total, checks)


def _theorem_failures(
    spec: AlgebraSpec,
    bivector: Bivector,
    found: int,
    solvable: bool,
    central: bool,
    ranks: DrhoRank,
    trivial: bool,
    lambda2: Bivector,
    cohomology: CohomologyTable,
) -> List[str]:
    failures = []
    if found > 2:
        failures.append(f"degeneracy page {found} exceeds 2")
    if (found == 1) != (solvable and central):
        failures.append(
            f"first-page degeneracy is {found == 1} but exactness solvable = {solvable}, Lambda_2 central = {central}"
        )
    if ranks.rank_drhobar == spec.n and central and found != 1:
        failures.append("d(rho-bar) is non-degenerate and Lambda_2 is central, yet E_1 != E_infinity")
    if trivial:
        lambda1, _ = split_bivector(spec, bivector)
        if not ad_bivector(spec, lambda1).is_zero():
            failures.append("contraction of T into d(rho-bar) vanishes but ad_{Lambda_1} does not")
        if not lambda2 and cohomology.total != cohomology.diagonal_sums():
            failures.append("ad_Lambda vanishes but H_Lambda differs from the Dolbeault sum")
    return failures
