"""
Exact arithmetic over the Gaussian rationals Q(i) and the sparse linear algebra
(rank, kernel, solve, subquotient dimension) used by every other module.

Scalars are sympy `QQ_I` elements; matrices are converted to sympy
`DomainMatrix` for elimination, which is always fraction-free (`method='FF'`).
"""
import re
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix

from utils.errors import ContractError, ParseError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

ELIMINATION_METHOD = "FF"

ZERO = QQ_I.zero
ONE = QQ_I.one
I = QQ_I(0, 1)

Vector = Tuple[GaussianRational, ...]

_RATIONAL = r"\d+(?:/\d+)?"
_RATIONAL_RE = re.compile(r"^(?P<num>[+-]?\d+)(?:/(?P<den>\d+))?$")
_IMAGINARY_RE = re.compile(rf"^(?P<sign>[+-]?)(?P<mag>{_RATIONAL})?i$")
_COMPLEX_RE = re.compile(rf"^(?P<re>[+-]?{_RATIONAL})(?:(?P<sign>[+-])(?P<mag>{_RATIONAL})?i)?$")


def parse_rational(text: str):
    """Parses "p/q" or "p" into a reduced QQ element."""
    match = _RATIONAL_RE.match(text.strip())
    if not match:
        raise ParseError(f"Malformed rational {text!r}; expected 'p/q'.")
    denominator = int(match.group("den") or 1)
    if denominator == 0:
        raise ParseError(f"Zero denominator in rational {text!r}.")
    return QQ(int(match.group("num")), denominator)


def _to_rational(value: Any):
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ.convert(value)


def gaussian(re_part: Any = 0, im_part: Any = 0) -> GaussianRational:
    """
    Builds an exact Gaussian rational a + b*i.

    Args:
        re_part: Real part (int, "p/q" string, Fraction, QQ element) or an
            existing GaussianRational, which is returned unchanged.
        im_part: Imaginary part, same accepted types.

    Returns:
        The QQ_I element.
    """
    if isinstance(re_part, GaussianRational) and not im_part:
        return re_part
    return QQ_I(_to_rational(re_part), _to_rational(im_part))


def parse_gaussian(text: str) -> GaussianRational:
    """
    Parses the token syntax used on the command line: "p/q", "p/qi" or
    "p/q+p/qi" (either part may be an integer; "i" and "-i" are accepted).
    """
    token = text.replace(" ", "")
    match = _IMAGINARY_RE.match(token)
    if match:
        magnitude = parse_rational(match.group("mag") or "1")
        return QQ_I(QQ(0), -magnitude if match.group("sign") == "-" else magnitude)
    match = _COMPLEX_RE.match(token)
    if not match:
        raise ParseError(f"Malformed Gaussian rational {text!r}; expected 'p/q' or 'p/q+p/qi'.")
    real = parse_rational(match.group("re"))
    imaginary = QQ(0)
    if match.group("sign"):
        imaginary = parse_rational(match.group("mag") or "1")
        if match.group("sign") == "-":
            imaginary = -imaginary
    return QQ_I(real, imaginary)


def conjugate(value: GaussianRational) -> GaussianRational:
    """Complex conjugate a - b*i."""
    return QQ_I(value.x, -value.y)


def format_rational(value, short: bool = False) -> str:
    """Formats a QQ element as "p/q" (q > 0, lowest terms); `short` drops "/1"."""
    numerator, denominator = int(value.numerator), int(value.denominator)
    if short and denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


def format_gaussian(value: GaussianRational) -> str:
    """Formats a Gaussian rational in the token syntax accepted by parse_gaussian."""
    real, imaginary = value.x, value.y
    if not imaginary:
        return format_rational(real, short=True)
    if not real:
        return f"{format_rational(imaginary, short=True)}i"
    sign = "+" if imaginary > 0 else "-"
    return f"{format_rational(real, short=True)}{sign}{format_rational(abs(imaginary), short=True)}i"


def gaussian_to_json(value: GaussianRational) -> Dict[str, str]:
    return {"re": format_rational(value.x), "im": format_rational(value.y)}


def gaussian_from_json(data: Mapping[str, Any]) -> GaussianRational:
    try:
        return gaussian(str(data.get("re", "0")), str(data.get("im", "0")))
    except AttributeError:
        raise ParseError(f"Expected an object with 're' and 'im' fields, got {data!r}.")


def zero_vector(length: int) -> Vector:
    return (ZERO,) * length


@dataclass(frozen=True)
class SparseMatrix:
    """A rows x cols matrix over Q(i) stored as a dictionary of nonzero entries."""
    rows: int
    cols: int
    entries: Mapping[Tuple[int, int], GaussianRational] = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError(f"Invalid matrix shape {self.rows}x{self.cols}.")
        cleaned: Dict[Tuple[int, int], GaussianRational] = {}
        for (row, col), value in self.entries.items():
            if not (0 <= row < self.rows and 0 <= col < self.cols):
                raise ValueError(f"Entry ({row}, {col}) outside a {self.rows}x{self.cols} matrix.")
            value = gaussian(value)
            if value:
                cleaned[(row, col)] = value
        object.__setattr__(self, "entries", cleaned)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, size: int) -> "SparseMatrix":
        return cls(size, size, {(i, i): ONE for i in range(size)})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], cols: Optional[int] = None) -> "SparseMatrix":
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != width:
                raise ValueError(f"Row {i} has length {len(row)}, expected {width}.")
            for j, value in enumerate(row):
                entries[(i, j)] = gaussian(value)
        return cls(len(rows), width, entries)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Sequence[Any]]) -> "SparseMatrix":
        entries = {}
        for j, column in enumerate(columns):
            for i, value in enumerate(column):
                entries[(i, j)] = gaussian(value)
        return cls(rows, len(columns), entries)

    @classmethod
    def from_domain_matrix(cls, matrix: DomainMatrix) -> "SparseMatrix":
        rows, cols = matrix.shape
        return cls(rows, cols, matrix.convert_to(QQ_I).to_dok())

    def to_domain_matrix(self) -> DomainMatrix:
        return DomainMatrix.from_dok(dict(self.entries), (self.rows, self.cols), QQ_I)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not self.entries

    def apply(self, vector: Sequence[GaussianRational]) -> Vector:
        if len(vector) != self.cols:
            raise ContractError(f"Vector of length {len(vector)} applied to a {self.rows}x{self.cols} matrix.")
        result = [ZERO] * self.rows
        for (row, col), value in self.entries.items():
            if vector[col]:
                result[row] += value * vector[col]
        return tuple(result)

    def column(self, col: int) -> Vector:
        result = [ZERO] * self.rows
        for (row, j), value in self.entries.items():
            if j == col:
                result[row] = value
        return tuple(result)

    def to_rows(self) -> List[List[GaussianRational]]:
        dense = [[ZERO] * self.cols for _ in range(self.rows)]
        for (row, col), value in self.entries.items():
            dense[row][col] = value
        return dense

    def restrict(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> "SparseMatrix":
        """Submatrix on the given rows and columns, renumbered in the order given."""
        row_map = {old: new for new, old in enumerate(row_indices)}
        col_map = {old: new for new, old in enumerate(col_indices)}
        entries = {
            (row_map[row], col_map[col]): value
            for (row, col), value in self.entries.items()
            if row in row_map and col in col_map
        }
        return SparseMatrix(len(row_indices), len(col_indices), entries)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(col, row): v for (row, col), v in self.entries.items()})

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ContractError(f"Cannot add matrices of shapes {self.shape} and {other.shape}.")
        entries = dict(self.entries)
        for key, value in other.entries.items():
            entries[key] = entries.get(key, ZERO) + value
        return SparseMatrix(self.rows, self.cols, entries)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, {key: -value for key, value in self.entries.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ContractError(f"Cannot multiply matrices of shapes {self.shape} and {other.shape}.")
        if self.is_zero() or other.is_zero():
            return SparseMatrix.zeros(self.rows, other.cols)
        return SparseMatrix.from_domain_matrix(self.to_domain_matrix().matmul(other.to_domain_matrix()))


SparseRow = Tuple[Tuple[int, GaussianRational], ...]


def _sparse(vector: Sequence[GaussianRational]) -> SparseRow:
    return tuple((j, value) for j, value in enumerate(vector) if value)


@dataclass(frozen=True)
class Subspace:
    """
    A subspace of Q(i)^ambient_dim stored by its reduced row echelon basis.

    Build instances with `span` or `direct_sum`; the plain constructor trusts
    its input to be in canonical form already. Equal subspaces have identical
    stored bases.
    """
    ambient_dim: int
    basis: Tuple[Vector, ...] = ()
    _rows: Tuple[SparseRow, ...] = field(default=(), init=False, repr=False, compare=False)
    _pivots: Tuple[int, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(_sparse(vector) for vector in self.basis)
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "_pivots", tuple(row[0][0] for row in rows))

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence[Any]]) -> "Subspace":
        rows = []
        for vector in vectors:
            if len(vector) != ambient_dim:
                raise ContractError(f"Vector of length {len(vector)} in a space of dimension {ambient_dim}.")
            row = tuple(gaussian(value) for value in vector)
            if any(row):
                rows.append(row)
        if not rows:
            return cls(ambient_dim, ())
        dok = {(i, j): value for i, row in enumerate(rows) for j, value in enumerate(row) if value}
        reduced, pivots = DomainMatrix.from_dok(dok, (len(rows), ambient_dim), QQ_I).rref(method=ELIMINATION_METHOD)
        dense = reduced.to_list()
        return cls(ambient_dim, tuple(tuple(dense[i]) for i in range(len(pivots))))

    @classmethod
    def direct_sum(cls, ambient_dim: int, parts: Iterable[Tuple[Sequence[int], "Subspace"]]) -> "Subspace":
        """
        Embeds subspaces living on pairwise disjoint coordinate sets.

        Each part is (coordinates, subspace of Q(i)^len(coordinates)); the
        embedded echelon rows, sorted by pivot, are again in canonical form.
        """
        rows = []
        for coordinates, part in parts:
            if len(coordinates) != part.ambient_dim:
                raise ContractError(f"{len(coordinates)} coordinates for a subspace of Q(i)^{part.ambient_dim}.")
            for pivot, row in zip(part._pivots, part._rows):
                rows.append((coordinates[pivot], [(coordinates[j], value) for j, value in row]))
        basis = []
        for _, row in sorted(rows, key=lambda item: item[0]):
            dense = [ZERO] * ambient_dim
            for j, value in row:
                dense[j] = value
            basis.append(tuple(dense))
        return cls(ambient_dim, tuple(basis))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(
            tuple(ONE if i == j else ZERO for j in range(ambient_dim)) for i in range(ambient_dim)
        ))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return self._pivots

    def restrict(self, coordinates: Sequence[int]) -> "Subspace":
        """
        The same subspace read in the given coordinates.

        Raises:
            ContractError: If a basis vector has support outside them.
        """
        position = {old: new for new, old in enumerate(coordinates)}
        basis = []
        for vector, row in zip(self.basis, self._rows):
            local = [ZERO] * len(coordinates)
            for j, value in row:
                if j not in position:
                    raise ContractError(f"Basis vector has support at coordinate {j}, outside the restriction.", witness=vector)
                local[position[j]] = value
            basis.append(tuple(local))
        return Subspace(len(coordinates), tuple(basis))

    def reduce(self, vector: Sequence[GaussianRational]) -> Vector:
        """Residue of `vector` after elimination against the echelon basis."""
        residue = [gaussian(value) for value in vector]
        for pivot, row in zip(self._pivots, self._rows):
            factor = residue[pivot]
            if factor:
                for j, value in row:
                    residue[j] -= factor * value
        return tuple(residue)

    def contains(self, vector: Sequence[GaussianRational]) -> bool:
        if len(vector) != self.ambient_dim:
            raise ContractError(f"Vector of length {len(vector)} tested against a space of dimension {self.ambient_dim}.")
        return not any(self.reduce(vector))

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(vector) for vector in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ContractError(f"Cannot add subspaces of Q(i)^{self.ambient_dim} and Q(i)^{other.ambient_dim}.")
        if not other.basis:
            return self
        if not self.basis:
            return other
        return Subspace.span(self.ambient_dim, self.basis + other.basis)

    def image(self, matrix: SparseMatrix) -> "Subspace":
        return Subspace.span(matrix.rows, (matrix.apply(vector) for vector in self.basis))

    def to_json(self) -> List[List[Dict[str, str]]]:
        return [[gaussian_to_json(value) for value in vector] for vector in self.basis]


class _Echelon:
    """
    Rows kept in insertion order, each zero at the pivots of the rows before
    it, so one pass in that order reduces a vector completely.
    """

    def __init__(self, start: Subspace):
        self.rows: List[Tuple[int, Dict[int, GaussianRational]]] = [
            (pivot, dict(row)) for pivot, row in zip(start._pivots, start._rows)
        ]

    def residue(self, vector: Sequence[GaussianRational]) -> Dict[int, GaussianRational]:
        residue = {j: value for j, value in enumerate(vector) if value}
        for pivot, row in self.rows:
            factor = residue.get(pivot)
            if not factor:
                continue
            for j, value in row.items():
                updated = residue.get(j, ZERO) - factor * value
                if updated:
                    residue[j] = updated
                else:
                    residue.pop(j, None)
        return residue

    def extend(self, vector: Sequence[GaussianRational]) -> bool:
        """Adds `vector` when it is independent of the rows; returns whether it was added."""
        residue = self.residue(vector)
        if not residue:
            return False
        pivot = min(residue)
        scale = ONE / residue[pivot]
        self.rows.append((pivot, {j: value * scale for j, value in residue.items()}))
        return True


def rank(matrix: SparseMatrix) -> int:
    """Exact rank over Q(i) by fraction-free elimination."""
    if matrix.is_zero():
        return 0
    _, pivots = matrix.to_domain_matrix().rref(method=ELIMINATION_METHOD)
    return len(pivots)


def kernel_basis(matrix: SparseMatrix) -> Subspace:
    """Canonical echelon basis of {x : Mx = 0}."""
    if matrix.cols == 0:
        return Subspace.zero(0)
    if matrix.is_zero():
        return Subspace.full(matrix.cols)
    null = matrix.to_domain_matrix().nullspace()
    return Subspace.span(matrix.cols, null.to_list())


def solve_columns(matrix: SparseMatrix, columns: Sequence[Sequence[Any]]) -> List[Optional[Vector]]:
    """
    Solves Mx = b for several right-hand sides with one elimination of [M | B].

    Returns:
        For each b, a particular solution (free variables set to zero) or
        None when that system is inconsistent.

    Raises:
        ContractError: If some b has the wrong length, or a solution fails the
            exact substitution check.
    """
    targets = []
    for rhs in columns:
        if len(rhs) != matrix.rows:
            raise ContractError(f"Right-hand side of length {len(rhs)} for a matrix with {matrix.rows} rows.")
        targets.append(tuple(gaussian(value) for value in rhs))
    if not targets:
        return []
    if not matrix.rows:
        return [zero_vector(matrix.cols) for _ in targets]

    augmented = dict(matrix.entries)
    for k, target in enumerate(targets):
        augmented.update({(i, matrix.cols + k): value for i, value in enumerate(target) if value})
    reduced, pivots = DomainMatrix.from_dok(
        augmented, (matrix.rows, matrix.cols + len(targets)), QQ_I
    ).rref(method=ELIMINATION_METHOD)
    reduced_entries = reduced.to_dok()
    matrix_pivots = [pivot for pivot in pivots if pivot < matrix.cols]
    inconsistent = {
        col - matrix.cols
        for (row, col), value in reduced_entries.items()
        if row >= len(matrix_pivots) and col >= matrix.cols and value
    }

    solutions: List[Optional[Vector]] = []
    for k, target in enumerate(targets):
        if k in inconsistent:
            solutions.append(None)
            continue
        solution = [ZERO] * matrix.cols
        for row, pivot in enumerate(matrix_pivots):
            solution[pivot] = reduced_entries.get((row, matrix.cols + k), ZERO)
        solution = tuple(solution)
        if matrix.apply(solution) != target:
            logging.error("Substitution check failed for a solved linear system.")
            raise ContractError("Solution does not satisfy Mx = b.", witness=solution)
        solutions.append(solution)
    return solutions


def solve(matrix: SparseMatrix, rhs: Sequence[Any]) -> Optional[Vector]:
    """
    Finds a particular solution of Mx = b.

    Args:
        matrix: The coefficient matrix M.
        rhs: The right-hand side b, of length M.rows.

    Returns:
        A solution vector (free variables set to zero), or None when the
        system is inconsistent.

    Raises:
        ContractError: If b has the wrong length, or if the solution fails
            the exact substitution check.
    """
    if len(rhs) != matrix.rows:
        raise ContractError(f"Right-hand side of length {len(rhs)} for a matrix with {matrix.rows} rows.")
    target = tuple(gaussian(value) for value in rhs)
    if not any(target):
        return zero_vector(matrix.cols)
    if matrix.is_zero():
        return None
    return solve_columns(matrix, [target])[0]


def subquotient_dim(cycles: Subspace, boundaries: Subspace) -> int:
    """
    Dimension of cycles / boundaries.

    Raises:
        ContractError: If boundaries is not contained in cycles; the witness
            is a basis vector of boundaries outside cycles.
    """
    if cycles.ambient_dim != boundaries.ambient_dim:
        raise ContractError(
            f"Subquotient of subspaces in different ambient spaces "
            f"({cycles.ambient_dim} and {boundaries.ambient_dim})."
        )
    for vector in boundaries.basis:
        if not cycles.contains(vector):
            raise ContractError("Boundary space is not contained in the cycle space.", witness=vector)
    return cycles.dim - boundaries.dim


def complement_basis(larger: Subspace, smaller: Subspace) -> Tuple[Vector, ...]:
    """
    Vectors from `larger`'s echelon basis that extend `smaller` to a basis of
    `larger`, chosen greedily in basis order.
    """
    echelon = _Echelon(smaller)
    return tuple(vector for vector in larger.basis if echelon.extend(vector))
