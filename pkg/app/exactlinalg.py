"""
Exact linear algebra over ZZ, QQ and GF(ℓ)
Thin layer over sympy's DomainMatrix: coefficient domains, kernels (saturated
over ZZ), ranks, characteristic polynomials, eigenspaces and reduction mod ℓ.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from .exactmath import format_rational, reduce_rational, require_prime

logger = logging.getLogger(__name__)

# Matrices are sympy DomainMatrix objects: every entry lives in the declared domain.
ExactMatrix = DomainMatrix

Number = Union[int, Fraction]


@dataclass(frozen=True)
class CoefficientDomain:
    """
    Coefficient domain of a space: ℤ, ℚ or 𝔽_ℓ

    characteristic is 0 for ℤ and ℚ; integral distinguishes ℤ from ℚ.
    """
    characteristic: int = 0
    integral: bool = False

    @classmethod
    def parse(cls, spec: Union[str, int, "CoefficientDomain"]) -> "CoefficientDomain":
        """Parse 'Q', 'Z' or a prime (int or decimal string)."""
        if isinstance(spec, CoefficientDomain):
            return spec
        text = str(spec).strip().upper()
        if text in ("Q", "QQ"):
            return RATIONALS
        if text in ("Z", "ZZ"):
            return INTEGERS
        if text.startswith("F_"):
            text = text[2:]
        try:
            ell = int(text)
        except ValueError:
            raise ValueError(f"Unknown coefficient domain '{spec}'. Use Q, Z or a prime")
        require_prime(ell, "field characteristic")
        return cls(characteristic=ell)

    @property
    def name(self) -> str:
        if self.characteristic:
            return f"F_{self.characteristic}"
        return "Z" if self.integral else "Q"

    @property
    def is_field(self) -> bool:
        return not self.integral

    @property
    def sympy_domain(self):
        if self.characteristic:
            return GF(self.characteristic)
        return ZZ if self.integral else QQ

    def field(self) -> "CoefficientDomain":
        """Fraction field (ℚ for ℤ, itself otherwise)."""
        return RATIONALS if self.integral else self

    def element(self, value: Number):
        """Convert an int or Fraction into a domain element."""
        K = self.sympy_domain
        q = Fraction(value)
        if self.characteristic:
            return K(reduce_rational(q, self.characteristic))
        if self.integral:
            if q.denominator != 1:
                raise ValueError(f"{format_rational(q)} is not an integer")
            return K(q.numerator)
        return K(q.numerator, q.denominator)

    def to_python(self, element) -> Number:
        """Convert a domain element back to int (ℤ, 𝔽_ℓ in [0, ℓ)) or Fraction (ℚ)."""
        if self.characteristic:
            return int(element) % self.characteristic
        if self.integral:
            return int(element)
        q = Fraction(int(element.numerator), int(element.denominator))
        return q.numerator if q.denominator == 1 else q

    def __str__(self) -> str:
        return self.name


RATIONALS = CoefficientDomain(0, False)
INTEGERS = CoefficientDomain(0, True)


def finite_field(ell: int) -> CoefficientDomain:
    return CoefficientDomain.parse(ell)


def domain_of(M: DomainMatrix) -> CoefficientDomain:
    """Recover the CoefficientDomain tag of a DomainMatrix."""
    K = M.domain
    if K == ZZ:
        return INTEGERS
    if K == QQ:
        return RATIONALS
    if getattr(K, "is_FiniteField", False):
        return CoefficientDomain(characteristic=int(K.characteristic()))
    raise ValueError(f"Unsupported matrix domain {K}")


# ── Construction and conversion ───────────────────────────────────────────────

def sparse_matrix(entries: Dict[Tuple[int, int], Number], shape: Tuple[int, int],
                  domain: CoefficientDomain) -> DomainMatrix:
    """Build a sparse DomainMatrix from {(i, j): value}; zero values are dropped."""
    rows: Dict[int, Dict[int, object]] = {}
    K = domain.sympy_domain
    for (i, j), value in entries.items():
        element = domain.element(value)
        if element == K.zero:
            continue
        rows.setdefault(i, {})[j] = element
    return DomainMatrix(rows, shape, K)


def matrix_from_rows(rows: Sequence[Sequence[Number]], domain: CoefficientDomain,
                     ncols: int = None) -> DomainMatrix:
    """Build a sparse DomainMatrix from a row-major list of numbers."""
    width = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    entries = {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row) if v}
    return sparse_matrix(entries, (len(rows), width), domain)


def matrix_from_columns(columns: Sequence[Sequence[Number]], nrows: int,
                        domain: CoefficientDomain) -> DomainMatrix:
    """Build a sparse DomainMatrix whose columns are the given vectors."""
    entries = {(i, j): v for j, col in enumerate(columns) for i, v in enumerate(col) if v}
    return sparse_matrix(entries, (nrows, len(columns)), domain)


def identity(n: int, domain: CoefficientDomain) -> DomainMatrix:
    return DomainMatrix.eye(n, domain.sympy_domain).to_sparse()


def zeros(shape: Tuple[int, int], domain: CoefficientDomain) -> DomainMatrix:
    return DomainMatrix.zeros(shape, domain.sympy_domain).to_sparse()


def convert(M: DomainMatrix, domain: CoefficientDomain) -> DomainMatrix:
    """
    Convert a matrix to another coefficient domain

    ℤ/ℚ → 𝔽_ℓ reduces entries (ℓ must not divide a denominator).
    """
    source = domain_of(M)
    if source == domain:
        return M.to_sparse()
    if domain.characteristic and not source.characteristic and not source.integral:
        entries = {(i, j): source.to_python(v) for (i, j), v in _entries(M)}
        return sparse_matrix(entries, M.shape, domain)
    return M.to_sparse().convert_to(domain.sympy_domain)


def _entries(M: DomainMatrix) -> Iterable[Tuple[Tuple[int, int], object]]:
    for i, row in M.to_sparse().rep.items():
        for j, v in row.items():
            yield (i, j), v


def entry_dict(M: DomainMatrix) -> Dict[Tuple[int, int], Number]:
    """Nonzero entries as python numbers keyed by (row, col)."""
    domain = domain_of(M)
    return {key: domain.to_python(v) for key, v in _entries(M)}


def to_rows(M: DomainMatrix) -> List[List[Number]]:
    """Row-major python numbers."""
    domain = domain_of(M)
    out = [[0] * M.shape[1] for _ in range(M.shape[0])]
    for (i, j), v in _entries(M):
        out[i][j] = domain.to_python(v)
    return out


def column(M: DomainMatrix, j: int) -> List[Number]:
    domain = domain_of(M)
    out = [0] * M.shape[0]
    for (i, jj), v in _entries(M):
        if jj == j:
            out[i] = domain.to_python(v)
    return out


def serialize_matrix(M: DomainMatrix) -> List[List[str]]:
    """Row-major JSON-ready array of entry strings."""
    return [[format_rational(v) for v in row] for row in to_rows(M)]


def is_zero(M: DomainMatrix) -> bool:
    return M.to_sparse().is_zero_matrix


def equal(A: DomainMatrix, B: DomainMatrix) -> bool:
    """Entrywise equality (formats are unified first)."""
    return A.shape == B.shape and is_zero(A.to_sparse() - B.to_sparse().convert_to(A.domain))


# ── Kernels, ranks, characteristic polynomials ────────────────────────────────

def _field_nullspace(M: DomainMatrix) -> DomainMatrix:
    """Null-space basis (as columns) of a matrix over a field, read off the RREF."""
    K = M.domain
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return DomainMatrix.eye(ncols, K).to_sparse()
    R, pivots = M.to_sparse().rref()
    rows = R.to_sparse().rep
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    basis: Dict[int, Dict[int, object]] = {}
    for idx, f in enumerate(free):
        basis.setdefault(f, {})[idx] = K.one
        for i, pc in enumerate(pivots):
            v = rows.get(i, {}).get(f)
            if v:
                basis.setdefault(pc, {})[idx] = -v
    return DomainMatrix(basis, (ncols, len(free)), K)


def _primitive_columns(B: DomainMatrix) -> DomainMatrix:
    """Scale every column of a ℚ-matrix to a primitive integer vector."""
    columns: Dict[int, Dict[int, Fraction]] = {}
    for (i, j), v in _entries(B):
        columns.setdefault(j, {})[i] = RATIONALS.to_python(v)
    entries: Dict[Tuple[int, int], int] = {}
    for j, col in columns.items():
        den = lcm(*(Fraction(v).denominator for v in col.values()))
        ints = {i: int(Fraction(v) * den) for i, v in col.items()}
        g = 0
        for v in ints.values():
            g = gcd(g, v)
        for i, v in ints.items():
            entries[(i, j)] = v // g
    return sparse_matrix(entries, B.shape, INTEGERS)


def saturate(B: DomainMatrix) -> DomainMatrix:
    """
    Saturate an integer column basis

    Returns a basis of (ℚ-span of the columns) ∩ ℤ^m, taken from the first r
    columns of S⁻¹ in the Smith decomposition D = S·B·T.

    Args:
        B: Integer matrix of full column rank r

    Returns:
        m × r integer matrix whose column lattice is saturated
    """
    m, r = B.shape
    if r == 0:
        return zeros((m, 0), INTEGERS)
    _, S, _ = smith_normal_decomp(B.to_dense().convert_to(ZZ))
    S_inv = S.convert_to(QQ).inv().to_sparse()
    sat = S_inv.extract(list(range(m)), list(range(r)))
    return _primitive_columns(sat)


def kernel(M: DomainMatrix) -> "Subspace":
    """
    Kernel of a matrix

    Over a field the RREF null-space basis; over ℤ a basis of the saturated
    integer kernel.
    """
    domain = domain_of(M)
    if domain.is_field:
        return Subspace(_field_nullspace(M.to_sparse()), domain)
    basis = _field_nullspace(M.to_sparse().convert_to(QQ))
    if all(isinstance(RATIONALS.to_python(v), int) for _, v in _entries(basis)):
        # RREF kernel bases carry an identity block on the free columns
        return Subspace(basis.convert_to(ZZ), INTEGERS)
    return Subspace(saturate(_primitive_columns(basis)), INTEGERS)


def rank(M: DomainMatrix) -> int:
    if domain_of(M).integral:
        return M.to_sparse().convert_to(QQ).rank()
    return M.to_sparse().rank()


def charpoly(M: DomainMatrix) -> List[Number]:
    """Monic characteristic polynomial, coefficients from the leading one down."""
    rows, cols = M.shape
    if rows != cols:
        raise ValueError(f"charpoly needs a square matrix, got {rows}x{cols}")
    domain = domain_of(M)
    if rows == 0:
        return [1]
    return [domain.to_python(c) for c in M.to_sparse().charpoly()]


def eval_poly_mod(coeffs: Sequence[Number], x: int, ell: int) -> int:
    """Evaluate a polynomial (leading coefficient first) at x modulo ℓ."""
    acc = 0
    for c in coeffs:
        acc = (acc * x + reduce_rational(c, ell)) % ell
    return acc


def eigenspace(M: DomainMatrix, value: Number) -> "Subspace":
    return common_eigenspace([(M, value)])


def common_eigenspace(pairs: Sequence[Tuple[DomainMatrix, Number]]) -> "Subspace":
    """
    Intersection of the kernels of (M_i - λ_i·Id)

    Raises:
        ValueError: If the matrices disagree in size or domain
    """
    if not pairs:
        raise ValueError("common_eigenspace needs at least one (matrix, eigenvalue) pair")
    n = pairs[0][0].shape[1]
    domain = domain_of(pairs[0][0]).field()
    blocks = []
    for M, value in pairs:
        if M.shape != (n, n):
            raise ValueError(f"Dimension mismatch: expected {n}x{n}, got {M.shape[0]}x{M.shape[1]}")
        if domain_of(M).field() != domain:
            raise ValueError(f"Domain mismatch: {domain_of(M)} vs {domain}")
        shift = sparse_matrix({(i, i): value for i in range(n)}, (n, n), domain)
        blocks.append(convert(M, domain) - shift)
    stacked = blocks[0].vstack(*blocks[1:]) if len(blocks) > 1 else blocks[0]
    return kernel(stacked)


def reduce_mod(space: "Subspace", ell: int) -> "Subspace":
    """
    Reduce a ℤ- or ℚ-subspace modulo ℓ

    The basis is first cleared to primitive integer columns and saturated, so
    the reduction keeps the rank of the rational span.

    Raises:
        ValueError: If the space is already over a finite field
    """
    target = finite_field(ell)
    if space.domain.characteristic:
        raise ValueError(f"reduce_mod expects a space over Z or Q, got {space.domain}")
    m = space.ambient_dim
    if space.dim == 0:
        return Subspace(zeros((m, 0), target), target)
    integral = _primitive_columns(convert(space.basis, RATIONALS))
    reduced = integral.convert_to(target.sympy_domain)
    if rank(reduced) == space.dim:
        # already ℓ-saturated
        return Subspace(reduced, target)
    reduced = saturate(integral).convert_to(target.sympy_domain)
    r = rank(reduced)
    if r != space.dim:
        raise ValueError(f"Reduction mod {ell} lost rank ({r} < {space.dim}) after saturation")
    logger.debug(f"reduce_mod: dim {space.dim} lattice reduced mod {ell}")
    return Subspace(reduced, target)


# ── Subspaces ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Subspace of a coordinate space, given by a full-column-rank basis matrix

    Columns of basis are coordinate vectors of length ambient_dim.
    """
    basis: DomainMatrix
    domain: CoefficientDomain

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int, domain: CoefficientDomain) -> "Subspace":
        return cls(zeros((ambient_dim, 0), domain), domain)

    @classmethod
    def full(cls, ambient_dim: int, domain: CoefficientDomain) -> "Subspace":
        return cls(identity(ambient_dim, domain), domain)

    @classmethod
    def span(cls, vectors: Sequence[Sequence[Number]], ambient_dim: int,
             domain: CoefficientDomain) -> "Subspace":
        """Subspace spanned by (possibly dependent) vectors."""
        if not vectors:
            return cls.zero(ambient_dim, domain)
        field = domain.field()
        R, pivots = matrix_from_rows(vectors, field, ncols=ambient_dim).rref()
        rows = to_rows(R)[:len(pivots)]
        return cls(matrix_from_columns(rows, ambient_dim, field), field)

    @cached_property
    def field_basis(self) -> DomainMatrix:
        return convert(self.basis, self.domain.field()).to_sparse()

    @cached_property
    def _pivot_rows(self) -> List[int]:
        _, pivots = self.field_basis.transpose().rref()
        return list(pivots)

    def vectors(self) -> List[List[Number]]:
        return [column(self.basis, j) for j in range(self.dim)]

    def coordinates(self, V: DomainMatrix) -> DomainMatrix:
        """
        Solve basis·X = V

        Raises:
            ValueError: If some column of V is outside the subspace
        """
        field = self.domain.field()
        V = convert(V, field)
        if self.dim == 0:
            if not is_zero(V):
                raise ValueError("Vector is not in the zero subspace")
            return zeros((0, V.shape[1]), field)
        B = self.field_basis
        rows = self._pivot_rows
        X = B.extract(rows, list(range(self.dim))).lu_solve(V.extract(rows, list(range(V.shape[1]))))
        X = X.to_sparse()
        if not is_zero(B * X - V):
            raise ValueError("Vectors are not contained in the subspace")
        return X

    def contains(self, vector: Sequence[Number]) -> bool:
        V = matrix_from_columns([vector], self.ambient_dim, self.domain.field())
        try:
            self.coordinates(V)
            return True
        except ValueError:
            return False

    def contains_space(self, other: "Subspace") -> bool:
        try:
            self.coordinates(convert(other.basis, self.domain.field()))
            return True
        except ValueError:
            return False

    def restrict(self, operator: DomainMatrix) -> DomainMatrix:
        """
        Matrix of an ambient operator on this subspace (in basis coordinates)

        Raises:
            ValueError: If the subspace is not invariant under the operator
        """
        field = self.domain.field()
        image = convert(operator, field) * self.field_basis
        try:
            return self.coordinates(image)
        except ValueError:
            raise ValueError("Subspace is not invariant under the operator")

    def kernel_of(self, operator: DomainMatrix) -> "Subspace":
        """{v in this subspace : operator·v = 0} as a subspace of the ambient space."""
        field = self.domain.field()
        if self.dim == 0:
            return Subspace.zero(self.ambient_dim, field)
        coords = kernel(convert(operator, field) * self.field_basis)
        if coords.dim == 0:
            return Subspace.zero(self.ambient_dim, field)
        return Subspace(self.field_basis * coords.basis, field)

    def vector_from_coordinates(self, coords: Sequence[Number]) -> List[Number]:
        field = self.domain.field()
        x = matrix_from_columns([coords], self.dim, field)
        return column(self.field_basis * x, 0)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, domain={self.domain})"
