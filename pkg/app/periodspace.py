"""
Period-polynomial spaces
The ambient module V_w(N) of polynomial tuples indexed by P¹(ℤ/N), the
subspace W_w(N) cut out by the (1+S) and (1+U+U²) relations, the δ-split,
trace and inclusion between levels, and extended polynomials.

Coordinates of V_w(N) are ordered by (label position in proj_line, degree).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from sympy import Poly, symbols
from sympy.polys.domains import ZZ

from .cosets import (
    DELTA, IDENTITY, S, U, CosetLabel, IntMatrix2, act, delta_conj, fiber,
    label_index, proj_line, project, psi,
)
from .exactlinalg import (
    CoefficientDomain, DomainMatrix, Number, Subspace, column, convert, identity,
    is_zero, kernel, matrix_from_columns, rank, sparse_matrix,
)
from .exactmath import format_rational, reduce_rational, require_prime

logger = logging.getLogger(__name__)

_X = symbols("X")

Block = Tuple[CosetLabel, CosetLabel, int, IntMatrix2]


# ── Single polynomials ────────────────────────────────────────────────────────

@lru_cache(maxsize=8192)
def slash_matrix(gamma: IntMatrix2, w: int) -> Tuple[Tuple[int, ...], ...]:
    """
    Matrix of P ↦ P|₋w γ on coefficient vectors (lowest degree first)

    Column j holds the coefficients of (aX+b)^j (cX+d)^{w-j}.
    """
    if gamma.det == 0:
        raise ValueError(f"slash needs a nonzero determinant, got {gamma}")
    a, b, c, d = gamma.as_tuple()
    top = Poly(a * _X + b, _X, domain=ZZ)
    bottom = Poly(c * _X + d, _X, domain=ZZ)
    columns = []
    for j in range(w + 1):
        coeffs = [int(v) for v in reversed((top ** j * bottom ** (w - j)).all_coeffs())]
        columns.append(coeffs + [0] * (w + 1 - len(coeffs)))
    return tuple(tuple(columns[j][i] for j in range(w + 1)) for i in range(w + 1))


def slash(P: Sequence[Number], gamma: IntMatrix2, w: int) -> Tuple[Number, ...]:
    """P|₋w γ (X) = P(γX)(cX+d)^w for deg P ≤ w."""
    if len(P) != w + 1:
        raise ValueError(f"Polynomial must have {w + 1} coefficients, got {len(P)}")
    M = slash_matrix(gamma, w)
    return tuple(_clean(sum(M[i][j] * P[j] for j in range(w + 1) if P[j])) for i in range(w + 1))


def _clean(value: Number) -> Number:
    q = Fraction(value)
    return q.numerator if q.denominator == 1 else q


def _normalize(value: Number, domain: CoefficientDomain) -> Number:
    if domain.characteristic:
        return reduce_rational(value, domain.characteristic)
    value = _clean(value)
    if domain.integral and not isinstance(value, int):
        raise ValueError(f"{format_rational(value)} is not an integer")
    return value


def format_poly(P: Sequence[Number], var: str = "X", offset: int = 0) -> str:
    """Human-readable polynomial, highest degree first (e.g. '-49*X^4 + 1')."""
    terms = []
    for j in reversed(range(len(P))):
        c = Fraction(P[j])
        if c == 0:
            continue
        deg = j + offset
        mono = "" if deg == 0 else (var if deg == 1 else f"{var}^{deg}")
        mag = abs(c)
        coef = format_rational(mag)
        body = coef if not mono else (mono if mag == 1 else f"{coef}*{mono}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    sign, body = terms[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text


@dataclass(frozen=True)
class ExtPoly:
    """
    Extended polynomial with degrees -1 … w+1

    coeffs[i] is the coefficient of X^{i-1}.
    """
    w: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.w + 3:
            raise ValueError(f"ExtPoly of weight {self.w} needs {self.w + 3} coefficients")

    @classmethod
    def from_degrees(cls, w: int, terms: Mapping[int, Number]) -> "ExtPoly":
        coeffs = [Fraction(0)] * (w + 3)
        for deg, value in terms.items():
            if not -1 <= deg <= w + 1:
                raise ValueError(f"Degree {deg} outside -1..{w + 1}")
            coeffs[deg + 1] += Fraction(value)
        return cls(w, tuple(coeffs))

    def coefficient(self, degree: int) -> Fraction:
        return self.coeffs[degree + 1]

    def __add__(self, other: "ExtPoly") -> "ExtPoly":
        if other.w != self.w:
            raise ValueError("ExtPoly weights differ")
        return ExtPoly(self.w, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def scale(self, factor: Number) -> "ExtPoly":
        f = Fraction(factor)
        return ExtPoly(self.w, tuple(f * x for x in self.coeffs))

    def slash_diagonal(self, d: int) -> "ExtPoly":
        """P | diag(d, 1): X^j ↦ d^j X^j for j = -1 … w+1."""
        return ExtPoly(self.w, tuple(x * Fraction(d) ** (i - 1) for i, x in enumerate(self.coeffs)))

    def ordinary_part(self) -> Tuple[Fraction, ...]:
        return self.coeffs[1:-1]

    def principal_part(self) -> Dict[int, Fraction]:
        return {-1: self.coeffs[0], self.w + 1: self.coeffs[-1]}

    def to_json(self) -> Dict[str, object]:
        return {"offset": -1, "coeffs": [format_rational(c) for c in self.coeffs]}

    def __str__(self) -> str:
        return format_poly(self.coeffs, offset=-1)


# ── Polynomial tuples ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class VectorPoly:
    """Tuple of polynomials of degree ≤ w, one per label of proj_line(N)"""
    N: int
    w: int
    domain: CoefficientDomain
    values: Tuple[Tuple[Number, ...], ...]

    def __post_init__(self):
        if len(self.values) != psi(self.N):
            raise ValueError(f"VectorPoly at level {self.N} needs {psi(self.N)} components")
        if any(len(v) != self.w + 1 for v in self.values):
            raise ValueError(f"Every component must have {self.w + 1} coefficients")

    @classmethod
    def from_function(cls, N: int, w: int, domain: CoefficientDomain, fn) -> "VectorPoly":
        """Build from a callable label → coefficient sequence."""
        return cls(N, w, domain, tuple(
            tuple(_normalize(c, domain) for c in fn(A)) for A in proj_line(N)))

    @classmethod
    def from_vector(cls, N: int, w: int, domain: CoefficientDomain,
                    vector: Sequence[Number]) -> "VectorPoly":
        n = w + 1
        return cls(N, w, domain, tuple(
            tuple(_normalize(vector[i * n + j], domain) for j in range(n))
            for i in range(psi(N))))

    @classmethod
    def constant_one(cls, N: int, w: int, domain: CoefficientDomain) -> "VectorPoly":
        return cls.from_function(N, w, domain, lambda A: [1] + [0] * w)

    def __getitem__(self, label: CosetLabel) -> Tuple[Number, ...]:
        return self.values[label_index(label)]

    def to_vector(self) -> List[Number]:
        return [c for value in self.values for c in value]

    def __add__(self, other: "VectorPoly") -> "VectorPoly":
        self._check_compatible(other)
        return VectorPoly(self.N, self.w, self.domain, tuple(
            tuple(_normalize(x + y, self.domain) for x, y in zip(u, v))
            for u, v in zip(self.values, other.values)))

    def __sub__(self, other: "VectorPoly") -> "VectorPoly":
        return self + other.scale(-1)

    def scale(self, factor: Number) -> "VectorPoly":
        return VectorPoly(self.N, self.w, self.domain, tuple(
            tuple(_normalize(factor * x, self.domain) for x in v) for v in self.values))

    def is_zero(self) -> bool:
        return all(x == 0 for v in self.values for x in v)

    def reduce_mod(self, ell: int) -> "VectorPoly":
        """Reduce rational coefficients modulo ℓ (ℓ must not divide a denominator)."""
        target = CoefficientDomain.parse(ell)
        return VectorPoly(self.N, self.w, target, tuple(
            tuple(reduce_rational(x, ell) for x in v) for v in self.values))

    def to_json(self) -> Dict[str, List[str]]:
        return {str(A): [format_rational(c) for c in v] for A, v in zip(proj_line(self.N), self.values)}

    def _check_compatible(self, other: "VectorPoly"):
        if (self.N, self.w, self.domain) != (other.N, other.w, other.domain):
            raise ValueError("VectorPoly level, weight or domain differ")


def coordinate_index(label: CosetLabel, degree: int, w: int) -> int:
    return label_index(label) * (w + 1) + degree


def ambient_dim(N: int, w: int) -> int:
    return psi(N) * (w + 1)


def block_operator(rows_level: int, cols_level: int, w: int, domain: CoefficientDomain,
                   blocks: Iterable[Block]) -> DomainMatrix:
    """
    Assemble an operator from blocks (row label, column label, coefficient, γ)

    Each block adds coefficient·slash_matrix(γ) at (row label, column label).
    """
    n = w + 1
    acc: Dict[Tuple[int, int], int] = {}
    for row_label, col_label, coeff, gamma in blocks:
        if not coeff:
            continue
        r0 = label_index(row_label) * n
        c0 = label_index(col_label) * n
        M = slash_matrix(gamma, w)
        for i in range(n):
            for j in range(n):
                if M[i][j]:
                    key = (r0 + i, c0 + j)
                    acc[key] = acc.get(key, 0) + coeff * M[i][j]
    return sparse_matrix(acc, (ambient_dim(rows_level, w), ambient_dim(cols_level, w)), domain)


def group_matrix(N: int, w: int, gamma: IntMatrix2, domain: CoefficientDomain) -> DomainMatrix:
    """Matrix of (P|γ)(A) = P(Aγ⁻¹)|γ on V_w(N)."""
    inverse = gamma.inverse()
    return block_operator(N, N, w, domain, ((A, act(A, inverse), 1, gamma) for A in proj_line(N)))


def delta_matrix(N: int, w: int, domain: CoefficientDomain) -> DomainMatrix:
    """Matrix of (P|δ)(A) = P(δAδ)|δ on V_w(N)."""
    return block_operator(N, N, w, domain, ((A, delta_conj(A), 1, DELTA) for A in proj_line(N)))


def group_act(P: VectorPoly, gamma: IntMatrix2) -> VectorPoly:
    """P|γ for γ ∈ SL₂(ℤ)."""
    inverse = gamma.inverse()
    return VectorPoly.from_function(P.N, P.w, P.domain, lambda A: slash(P[act(A, inverse)], gamma, P.w))


def delta_act(P: VectorPoly) -> VectorPoly:
    return VectorPoly.from_function(P.N, P.w, P.domain, lambda A: slash(P[delta_conj(A)], DELTA, P.w))


def relation_residuals(P: VectorPoly) -> Tuple[VectorPoly, VectorPoly]:
    """(P|(1+S), P|(1+U+U²)); both vanish exactly on W_w(N)."""
    first = P + group_act(P, S)
    second = P + group_act(P, U) + group_act(P, U @ U)
    return first, second


def satisfies_relations(P: VectorPoly) -> bool:
    return all(r.is_zero() for r in relation_residuals(P))


# ── W_w(N) ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class PeriodSubspace(Subspace):
    """Subspace of V_w(N) that remembers its level and weight"""
    level: int = 1
    weight: int = 0

    @classmethod
    def wrap(cls, space: Subspace, level: int, weight: int) -> "PeriodSubspace":
        return cls(space.basis, space.domain, level, weight)

    def elements(self) -> List[VectorPoly]:
        """Basis vectors as polynomial tuples."""
        return [VectorPoly.from_vector(self.level, self.weight, self.domain.field(), column(self.basis, j))
                for j in range(self.dim)]

    def contains_poly(self, P: VectorPoly) -> bool:
        return self.contains(P.to_vector())

    def sub(self, space: Subspace) -> "PeriodSubspace":
        return PeriodSubspace.wrap(space, self.level, self.weight)


def _check_weight_and_domain(w: int, domain: CoefficientDomain):
    if w < 0 or w % 2:
        raise ValueError(f"Weight w must be even and >= 0, got {w}")
    if domain.characteristic in (2, 3):
        raise ValueError(f"Characteristic {domain.characteristic} is not supported (must differ from 2 and 3)")


def relation_matrix(N: int, w: int, domain: CoefficientDomain) -> DomainMatrix:
    """Stacked matrices of 1+S and 1+U+U² on V_w(N)."""
    n = ambient_dim(N, w)
    one = identity(n, domain)
    first = one + group_matrix(N, w, S, domain)
    second = one + group_matrix(N, w, U, domain) + group_matrix(N, w, U @ U, domain)
    return first.vstack(second)


@lru_cache(maxsize=64)
def build_W(N: int, w: int, domain: CoefficientDomain) -> PeriodSubspace:
    """
    W_w(N) over a coefficient domain

    Args:
        N: Level ≥ 1
        w: Even weight ≥ 0
        domain: ℤ (saturated lattice), ℚ or 𝔽_ℓ

    Returns:
        PeriodSubspace basis of the simultaneous kernel of 1+S and 1+U+U²

    Raises:
        ValueError: For odd weight or characteristic 2 or 3
    """
    _check_weight_and_domain(w, domain)
    space = kernel(relation_matrix(N, w, domain))
    logger.info(f"Built W_{w}({N}) over {domain}: dim {space.dim} (ambient {ambient_dim(N, w)})")
    return PeriodSubspace.wrap(space, N, w)


def split_pm(W: PeriodSubspace) -> Tuple[PeriodSubspace, PeriodSubspace]:
    """
    δ-eigenspaces (W⁺, W⁻)

    Raises:
        ValueError: If 2 is not invertible in the domain
    """
    if W.domain.characteristic == 2:
        raise ValueError("split_pm needs 2 to be invertible")
    domain = W.domain.field()
    n = ambient_dim(W.level, W.weight)
    delta = delta_matrix(W.level, W.weight, domain)
    plus = W.kernel_of(delta - identity(n, domain))
    minus = W.kernel_of(delta + identity(n, domain))
    if plus.dim + minus.dim != W.dim:
        raise RuntimeError(f"δ-split dims {plus.dim}+{minus.dim} do not add up to {W.dim}")
    return W.sub(plus), W.sub(minus)


def parity_subspace(W: PeriodSubspace, parity: int) -> PeriodSubspace:
    """W⁺ for parity +1, W⁻ for parity -1."""
    plus, minus = split_pm(W)
    return plus if parity > 0 else minus


# ── Level change ──────────────────────────────────────────────────────────────

def trace_matrix(N: int, M: int, w: int, domain: CoefficientDomain) -> DomainMatrix:
    """tr^N_M as a matrix V_w(N) → V_w(M)."""
    return block_operator(M, N, w, domain, ((project(A, M), A, 1, IDENTITY) for A in proj_line(N)))


def include_matrix(M: int, N: int, w: int, domain: CoefficientDomain) -> DomainMatrix:
    """i_M^N as a matrix V_w(M) → V_w(N)."""
    return block_operator(N, M, w, domain, ((A, project(A, M), 1, IDENTITY) for A in proj_line(N)))


def trace(P: VectorPoly, M: int) -> VectorPoly:
    """(tr P)(C) = Σ_{A in fiber(C)} P(A); no slash twist."""
    if M < 1 or P.N % M:
        raise ValueError(f"Level {M} does not divide {P.N}")

    def component(C: CosetLabel):
        total = [0] * (P.w + 1)
        for A in fiber(C, P.N):
            total = [x + y for x, y in zip(total, P[A])]
        return total

    return VectorPoly.from_function(M, P.w, P.domain, component)


def include(P: VectorPoly, N: int) -> VectorPoly:
    """(i P)(A) = P(project(A)) at level N."""
    if N % P.N:
        raise ValueError(f"Level {P.N} does not divide {N}")
    return VectorPoly.from_function(N, P.w, P.domain, lambda A: P[project(A, P.N)])


# ── Unipotent kernel and image ────────────────────────────────────────────────

def unipotent_kernel_image_check(w: int, ell: int, a: int) -> bool:
    """
    Check the kernel and image of u - 1 on V_w(𝔽_ℓ) for u = (1 a; 0 1)

    Verifies im(1-u) = polynomials of degree ≤ w-1, ker(1-u) = constants and
    1 + u + … + u^{ℓ-1} = 0.

    Raises:
        ValueError: If ℓ is not a prime > w or ℓ divides a
    """
    require_prime(ell, "ell")
    if ell <= w:
        raise ValueError(f"Need ell > w, got ell={ell}, w={w}")
    if a % ell == 0:
        raise ValueError(f"Need ell not dividing a, got a={a}, ell={ell}")
    domain = CoefficientDomain.parse(ell)
    n = w + 1

    def unipotent(shift: int) -> DomainMatrix:
        M = slash_matrix(IntMatrix2(1, shift, 0, 1), w)
        return sparse_matrix({(i, j): M[i][j] for i in range(n) for j in range(n)}, (n, n), domain)

    one_minus_u = identity(n, domain) - unipotent(a)
    image_ok = rank(one_minus_u) == w and all(v == 0 for v in _row(one_minus_u, w))
    ker = kernel(one_minus_u)
    kernel_ok = ker.dim == 1 and ker.contains([1] + [0] * w)
    norm = unipotent(0)
    for i in range(1, ell):
        norm = norm + unipotent(i * a)
    norm_ok = is_zero(norm)
    logger.debug(f"unipotent_kernel_image_check(w={w}, ell={ell}, a={a}): image={image_ok} kernel={kernel_ok} norm={norm_ok}")
    return image_ok and kernel_ok and norm_ok


def _row(M: DomainMatrix, i: int) -> List[Number]:
    return column(M.transpose(), i)


def vectors_to_matrix(polys: Sequence[VectorPoly], domain: CoefficientDomain) -> DomainMatrix:
    """Columns are the coordinate vectors of the given tuples."""
    if not polys:
        raise ValueError("No tuples given")
    return matrix_from_columns([P.to_vector() for P in polys], ambient_dim(polys[0].N, polys[0].w), domain)


def apply_operator(operator: DomainMatrix, P: VectorPoly, target_level: int = None) -> VectorPoly:
    """Apply an ambient matrix to a polynomial tuple."""
    domain = P.domain.field()
    image = convert(operator, domain) * matrix_from_columns([P.to_vector()], len(P.to_vector()), domain)
    level = target_level if target_level is not None else P.N
    return VectorPoly.from_vector(level, P.w, domain, column(image, 0))
