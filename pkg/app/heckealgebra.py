"""
Hecke algebra on period-polynomial spaces
Formal sums of integer matrices, Hecke elements T̃_n verified against the
Choie-Zagier relation, the double cosets Σ_n (gcd(n, N) = 1) and Θ_Q
(Atkin-Lehner), their action on V_w(N) and the resulting matrices on W_w(N).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Optional, Tuple

from sympy import divisors
from sympy.core.intfunc import igcdex

from .cosets import (
    IDENTITY, S, T, CosetLabel, IntMatrix2, canonical, lift, proj_line,
)
from .exactlinalg import CoefficientDomain, DomainMatrix, RATIONALS, sparse_matrix, to_rows
from .periodspace import (
    PeriodSubspace, VectorPoly, ambient_dim, block_operator, build_W, delta_matrix, slash,
)

logger = logging.getLogger(__name__)

REALIZATIONS = ("ceil", "nearest", "solver")

_solver_settings = {"max_bound": 4}


# ── Formal sums ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class FormalMatrixSum:
    """
    Element of R_n = ℤ[M_n / ±1]

    terms are sorted lexicographically on the sign-normalized matrix and carry
    nonzero integer coefficients.
    """
    n: int
    terms: Tuple[Tuple[IntMatrix2, int], ...] = ()

    @classmethod
    def from_items(cls, n: int, items: Iterable[Tuple[IntMatrix2, int]]) -> "FormalMatrixSum":
        """
        Collect terms, merging M with -M

        Raises:
            ValueError: If a matrix does not have determinant n
        """
        acc: Dict[IntMatrix2, int] = {}
        for M, coeff in items:
            if M.det != n:
                raise ValueError(f"Matrix {M} has determinant {M.det}, expected {n}")
            key = M.sign_normalized()
            acc[key] = acc.get(key, 0) + coeff
        terms = tuple(sorted(((M, c) for M, c in acc.items() if c), key=lambda t: t[0].as_tuple()))
        return cls(n, terms)

    @classmethod
    def of(cls, *matrices: IntMatrix2) -> "FormalMatrixSum":
        if not matrices:
            raise ValueError("At least one matrix is needed")
        return cls.from_items(matrices[0].det, ((M, 1) for M in matrices))

    def as_dict(self) -> Dict[IntMatrix2, int]:
        return dict(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "FormalMatrixSum") -> "FormalMatrixSum":
        if other.n != self.n:
            raise ValueError(f"Cannot add formal sums of determinants {self.n} and {other.n}")
        return FormalMatrixSum.from_items(self.n, self.terms + other.terms)

    def __neg__(self) -> "FormalMatrixSum":
        return FormalMatrixSum(self.n, tuple((M, -c) for M, c in self.terms))

    def __sub__(self, other: "FormalMatrixSum") -> "FormalMatrixSum":
        return self + (-other)

    def __mul__(self, other: "FormalMatrixSum") -> "FormalMatrixSum":
        """Product in the Hecke ring: (Σ a_M M)(Σ b_N N) = Σ a_M b_N MN."""
        return FormalMatrixSum.from_items(
            self.n * other.n,
            ((M @ N, a * b) for M, a in self.terms for N, b in other.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> List[Dict[str, object]]:
        return [{"matrix": list(M.as_tuple()), "coeff": c} for M, c in self.terms]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{M}" if c != 1 else str(M) for M, c in self.terms)


ONE_MINUS_S = FormalMatrixSum.from_items(1, [(IDENTITY, 1), (S, -1)])
ONE_PLUS_S = FormalMatrixSum.from_items(1, [(IDENTITY, 1), (S, 1)])


def coset_reps_infty(n: int) -> List[IntMatrix2]:
    """Upper-triangular representatives (a b; 0 d), ad = n, 0 ≤ b < d, of SL₂(ℤ)\\M_n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return [IntMatrix2(n // d, b, 0, d) for d in divisors(n) for b in range(d)]


def t_infinity(n: int) -> FormalMatrixSum:
    return FormalMatrixSum.from_items(n, ((M, 1) for M in coset_reps_infty(n)))


# ── Choie-Zagier relation ─────────────────────────────────────────────────────

def _orbit_key(M: IntMatrix2) -> Tuple[int, int, int, int]:
    """Canonical point of the orbit {±T^k M}: c > 0 (or c = 0, d > 0), then a mod c or b mod d."""
    a, b, c, d = M.as_tuple()
    if c < 0 or (c == 0 and d < 0):
        a, b, c, d = -a, -b, -c, -d
    if c > 0:
        k = -(a // c)
        return (a + k * c, b + k * d, c, d)
    return (a, b % d, c, d)


def cz_defect(element: FormalMatrixSum, n: int) -> Dict[Tuple[int, int, int, int], int]:
    """
    Defect of T^∞_n(1-S) - (1-S)T̃ modulo (1-T)R_n

    Returns:
        Map from orbit key to nonzero orbit coefficient sum; empty iff the
        relation holds exactly

    Raises:
        ValueError: If a term does not have determinant n
    """
    if element.n != n or any(M.det != n for M, _ in element.terms):
        raise ValueError(f"Hecke element has determinant {element.n}, expected {n}")
    D = t_infinity(n) * ONE_MINUS_S - ONE_MINUS_S * element
    sums: Dict[Tuple[int, int, int, int], int] = {}
    for M, coeff in D.terms:
        key = _orbit_key(M)
        sums[key] = sums.get(key, 0) + coeff
    return {key: value for key, value in sums.items() if value}


def is_hecke_element(element: FormalMatrixSum, n: int) -> bool:
    try:
        return not cz_defect(element, n)
    except ValueError:
        return False


def _next_k(top: int, bottom: int, realization: str) -> int:
    if realization == "ceil":
        return -((-bottom) // top)
    # nearest integer, ties rounded up
    return int((Fraction(bottom, top) + Fraction(1, 2)) // 1)


def continued_fraction_element(n: int, realization: str = "ceil") -> FormalMatrixSum:
    """
    T̃_n from continued-fraction chains

    Each (a b; 0 d) of T^∞_n is pushed through Y ↦ T^k S Y until its top-right
    entry vanishes; the visited matrices are summed.
    """
    if realization not in ("ceil", "nearest"):
        raise ValueError(f"Unknown chain realization '{realization}'")
    items = []
    for M in coset_reps_infty(n):
        Y = M
        items.append((Y, 1))
        while Y.b != 0:
            k = _next_k(Y.b, Y.d, realization)
            Y = T.power(k) @ S @ Y
            items.append((Y, 1))
    return FormalMatrixSum.from_items(n, items)


def _candidates(n: int, bound: int) -> List[IntMatrix2]:
    seen = set()
    span = range(-bound, bound + 1)
    for a in span:
        for b in span:
            for c in span:
                for d in span:
                    if a * d - b * c == n:
                        seen.add(IntMatrix2(a, b, c, d).sign_normalized())
    return sorted(seen, key=lambda M: M.as_tuple())


def solve_hecke_element(n: int, max_bound: int = 4) -> FormalMatrixSum:
    """
    Hecke element from the linear system on bounded support

    Unknowns are coefficients of det-n matrices with entries bounded by B,
    with one equation per T-orbit. The system is an incidence system, so the
    basic RREF solution is integral. B grows until a solution exists.

    Raises:
        RuntimeError: If no solution exists for B ≤ max_bound
    """
    target: Dict[Tuple[int, int, int, int], int] = {}
    for M, coeff in (t_infinity(n) * ONE_MINUS_S).terms:
        key = _orbit_key(M)
        target[key] = target.get(key, 0) + coeff

    for bound in range(1, max_bound + 1):
        support = _candidates(n, bound)
        orbits: Dict[Tuple[int, int, int, int], int] = {key: i for i, key in enumerate(sorted(target))}
        columns: List[Dict[int, int]] = []
        for Y in support:
            col: Dict[int, int] = {}
            for M, sign in ((Y, 1), (S @ Y, -1)):
                row = orbits.setdefault(_orbit_key(M), len(orbits))
                col[row] = col.get(row, 0) + sign
            columns.append(col)
        width = len(support)
        entries = {(r, j): v for j, col in enumerate(columns) for r, v in col.items() if v}
        for key, value in target.items():
            entries[(orbits[key], width)] = value
        augmented = sparse_matrix(entries, (len(orbits), width + 1), RATIONALS)
        R, pivots = augmented.rref()
        if width in pivots:
            logger.debug(f"solve_hecke_element(n={n}): no solution with entries bounded by {bound}")
            continue
        rows = to_rows(R)
        items = []
        for i, j in enumerate(pivots):
            value = Fraction(rows[i][width])
            if value.denominator != 1:
                raise RuntimeError(f"Non-integral Hecke element coefficient {value} for n={n}")
            items.append((support[j], int(value)))
        element = FormalMatrixSum.from_items(n, items)
        if cz_defect(element, n):
            raise RuntimeError(f"Solved Hecke element for n={n} fails the relation check")
        logger.info(f"Solved Hecke element for n={n} with bound {bound}: {len(element)} terms")
        return element
    raise RuntimeError(f"No Hecke element for n={n} with entries bounded by {max_bound}")


@lru_cache(maxsize=None)
def hecke_element(n: int, realization: str = "ceil", max_bound: Optional[int] = None) -> FormalMatrixSum:
    """
    Verified Hecke element T̃_n

    Args:
        n: Determinant ≥ 1
        realization: 'ceil' or 'nearest' continued-fraction chains, or 'solver'
        max_bound: Entry bound for the linear-system fallback (default: configured bound)

    Returns:
        FormalMatrixSum passing cz_defect

    Raises:
        RuntimeError: If neither the chains nor the bounded search give a valid element
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if realization not in REALIZATIONS:
        raise ValueError(f"Unknown realization '{realization}', expected one of {REALIZATIONS}")
    if realization != "solver":
        element = continued_fraction_element(n, realization)
        defect = cz_defect(element, n)
        if not defect:
            logger.debug(f"T~_{n} ({realization}): {len(element)} terms, relation verified")
            return element
        logger.warning(f"T~_{n} ({realization}) failed the relation check on {len(defect)} orbits, solving instead")
    return solve_hecke_element(n, max_bound or _solver_settings["max_bound"])


def configure_solver(max_bound: int):
    """Set the default entry bound of the fallback solver and drop cached elements."""
    if max_bound < 1:
        raise ValueError(f"Solver bound must be >= 1, got {max_bound}")
    if _solver_settings["max_bound"] != max_bound:
        _solver_settings["max_bound"] = max_bound
        hecke_element.cache_clear()
        logger.debug(f"Hecke solver bound set to {max_bound}")


def second_realization(n: int, realization: str = "ceil") -> FormalMatrixSum:
    """T̃_n + (1+S)σ_n: another valid element, acting identically on W."""
    shift = ONE_PLUS_S * FormalMatrixSum.of(IntMatrix2(n, 0, 0, 1))
    element = hecke_element(n, realization) + shift
    if cz_defect(element, n):
        raise RuntimeError(f"Second realization of T~_{n} fails the relation check")
    return element


# ── Double cosets ─────────────────────────────────────────────────────────────

HECKE_COPRIME = "hecke"
ATKIN_LEHNER = "atkin_lehner"


@lru_cache(maxsize=None)
def al_matrix(Q: int, N: int) -> IntMatrix2:
    """
    Atkin-Lehner matrix w_Q = (Qa b; Nc Qd) of determinant Q

    w_N = (0 -1; N 0); otherwise a = c = 1 and Qd - (N/Q)b = 1 with 0 ≤ d < N/Q.
    """
    check_exact_divisor(Q, N)
    if Q == N:
        return IntMatrix2(0, -1, N, 0)
    R = N // Q
    x, y, _ = igcdex(Q, R)
    d, b = int(x), -int(y)
    t = d // R
    d, b = d - t * R, b - t * Q
    w = IntMatrix2(Q, b, N, Q * d)
    if w.det != Q:
        raise RuntimeError(f"w_{Q} for level {N} has determinant {w.det}")
    return w


def check_exact_divisor(Q: int, N: int):
    if Q < 1 or N % Q or gcd(Q, N // Q) != 1:
        raise ValueError(f"{Q} is not an exact divisor of {N}")


@dataclass(frozen=True)
class DoubleCosetSpec:
    """Σ_n = Γ₀(N) diag(1, n) Γ₀(N) with gcd(n, N) = 1, or Θ_Q = Γ₀(N) w_Q for Q ∥ N"""
    kind: str
    n: int
    N: int

    def __post_init__(self):
        if self.kind == HECKE_COPRIME:
            if self.n < 1 or gcd(self.n, self.N) != 1:
                raise ValueError(f"Hecke operator T_{self.n} needs gcd(n, N) = 1 (N={self.N})")
        elif self.kind == ATKIN_LEHNER:
            check_exact_divisor(self.n, self.N)
        else:
            raise ValueError(f"Unknown double coset kind '{self.kind}'")

    @classmethod
    def hecke(cls, n: int, N: int) -> "DoubleCosetSpec":
        return cls(HECKE_COPRIME, n, N)

    @classmethod
    def atkin_lehner(cls, Q: int, N: int) -> "DoubleCosetSpec":
        return cls(ATKIN_LEHNER, Q, N)

    def contains(self, Y: IntMatrix2) -> bool:
        """Membership of Y in the double coset."""
        if Y.det != self.n:
            return False
        if self.kind == HECKE_COPRIME:
            return Y.c % self.N == 0 and gcd(Y.a, self.N) == 1
        Q = self.n
        return Y.a % Q == 0 and Y.d % Q == 0 and Y.c % self.N == 0

    def __str__(self) -> str:
        name = "T" if self.kind == HECKE_COPRIME else "W"
        return f"{name}_{self.n}@{self.N}"


def decompose(M: IntMatrix2, A: CosetLabel, sigma_spec: DoubleCosetSpec) -> Optional[CosetLabel]:
    """
    Coset A_M with lift(A_M)·M·lift(A)⁻¹ ∈ Σ

    Returns:
        The label, or None when M·lift(A)⁻¹ is not in SL₂(ℤ)·Σ

    Raises:
        ValueError: If det M or the level does not match Σ
    """
    if M.det != sigma_spec.n:
        raise ValueError(f"det {M} = {M.det} does not match {sigma_spec}")
    if A.N != sigma_spec.N:
        raise ValueError(f"Label {A} is not at level {sigma_spec.N}")
    X = M @ lift(A).inverse()
    N = sigma_spec.N
    if sigma_spec.kind == HECKE_COPRIME:
        return canonical(X.c, -X.a, N)
    Q = sigma_spec.n
    Y = X @ al_matrix(Q, N).adjugate()
    if any(entry % Q for entry in Y.as_tuple()):
        return None
    G = IntMatrix2(Y.a // Q, Y.b // Q, Y.c // Q, Y.d // Q)
    return canonical(-G.c, G.a, N)


@dataclass
class EqStarReport:
    """Coset counts compared by the bijectivity check for one double coset"""
    spec: str
    gamma_cosets: int
    sl2_cosets: int
    ok: bool
    per_matrix: Dict[str, int] = field(default_factory=dict)


def eq_star_check(sigma_spec: DoubleCosetSpec) -> EqStarReport:
    """
    Compare |Γ₀(N)\\Σ| with |SL₂(ℤ)\\SL₂(ℤ)Σ|

    For each upper-triangular representative M of SL₂(ℤ)\\M_n the labels A
    with lift(A)·M ∈ Σ are counted; bijectivity means every M in SL₂(ℤ)Σ
    has exactly one.
    """
    labels = proj_line(sigma_spec.N)
    per_matrix: Dict[str, int] = {}
    gamma_cosets = sl2_cosets = 0
    ok = True
    for M in coset_reps_infty(sigma_spec.n):
        count = sum(1 for A in labels if sigma_spec.contains(lift(A) @ M))
        per_matrix[str(M)] = count
        gamma_cosets += count
        if count:
            sl2_cosets += 1
        ok = ok and count <= 1
    ok = ok and gamma_cosets == sl2_cosets
    if not ok:
        logger.warning(f"Bijectivity check failed for {sigma_spec}: {gamma_cosets} vs {sl2_cosets}")
    return EqStarReport(str(sigma_spec), gamma_cosets, sl2_cosets, ok, per_matrix)


# ── Action ────────────────────────────────────────────────────────────────────

def _verified(element: FormalMatrixSum, sigma_spec: DoubleCosetSpec) -> FormalMatrixSum:
    if element.n != sigma_spec.n:
        raise ValueError(f"Hecke element of determinant {element.n} does not match {sigma_spec}")
    if not _is_verified(element):
        raise ValueError(f"Formal sum for {sigma_spec} fails the Choie-Zagier relation")
    return element


@lru_cache(maxsize=256)
def _is_verified(element: FormalMatrixSum) -> bool:
    return not cz_defect(element, element.n)


def act_sigma(P: VectorPoly, sigma_spec: DoubleCosetSpec, element: FormalMatrixSum) -> VectorPoly:
    """
    (P|T̃)(A) = Σ_M c_M P(A_M)|M over the terms whose A_M exists

    Raises:
        ValueError: If the element is not a verified Hecke element of the right determinant
    """
    if P.N != sigma_spec.N:
        raise ValueError(f"Tuple level {P.N} does not match {sigma_spec}")
    _verified(element, sigma_spec)

    def component(A: CosetLabel):
        total = [0] * (P.w + 1)
        for M, coeff in element.terms:
            target = decompose(M, A, sigma_spec)
            if target is None:
                continue
            image = slash(P[target], M, P.w)
            total = [x + coeff * y for x, y in zip(total, image)]
        return total

    return VectorPoly.from_function(P.N, P.w, P.domain, component)


def sigma_operator(N: int, w: int, domain: CoefficientDomain, sigma_spec: DoubleCosetSpec,
                   element: FormalMatrixSum) -> DomainMatrix:
    """Ambient matrix of act_sigma on V_w(N)."""
    _verified(element, sigma_spec)
    blocks = []
    for A in proj_line(N):
        for M, coeff in element.terms:
            target = decompose(M, A, sigma_spec)
            if target is not None:
                blocks.append((A, target, coeff, M))
    return block_operator(N, N, w, domain, blocks)


@lru_cache(maxsize=128)
def hecke_operator(N: int, w: int, domain: CoefficientDomain, n: int,
                   realization: str = "ceil") -> DomainMatrix:
    """Ambient matrix of T_n on V_w(N), gcd(n, N) = 1."""
    return sigma_operator(N, w, domain, DoubleCosetSpec.hecke(n, N), hecke_element(n, realization))


def _al_scale(Q: int, w: int, domain: CoefficientDomain) -> Fraction:
    factor = Fraction(1, Q ** (w // 2))
    if domain.characteristic and Q % domain.characteristic == 0:
        raise ValueError(f"{Q}^{w // 2} is not invertible in {domain}")
    if domain.integral and factor.denominator != 1:
        raise ValueError(f"{Q}^{w // 2} is not invertible in {domain}")
    return factor


@lru_cache(maxsize=128)
def theta_operator(N: int, w: int, domain: CoefficientDomain, Q: int,
                   realization: str = "ceil") -> DomainMatrix:
    """Ambient matrix of the unnormalized Θ_Q action on V_w(N)."""
    return sigma_operator(N, w, domain, DoubleCosetSpec.atkin_lehner(Q, N), hecke_element(Q, realization))


@lru_cache(maxsize=128)
def atkin_lehner_operator(N: int, w: int, domain: CoefficientDomain, Q: int,
                          realization: str = "ceil") -> DomainMatrix:
    """
    Ambient matrix of the normalized W_Q = Q^{-w/2}·Θ_Q

    Raises:
        ValueError: If Q^{w/2} is not invertible in the domain
    """
    factor = _al_scale(Q, w, domain)
    theta = theta_operator(N, w, domain.field(), Q, realization)
    n = ambient_dim(N, w)
    scale = sparse_matrix({(i, i): factor for i in range(n)}, (n, n), domain.field())
    return scale * theta


def _W(N: int, w: int, domain: CoefficientDomain) -> PeriodSubspace:
    return build_W(N, w, domain)


def hecke_matrix(N: int, w: int, domain: CoefficientDomain, n: int,
                 realization: str = "ceil") -> DomainMatrix:
    """
    Matrix of T_n on the chosen basis of W_w(N)

    Raises:
        ValueError: If gcd(n, N) ≠ 1
    """
    W = _W(N, w, domain)
    return W.restrict(hecke_operator(N, w, domain, n, realization))


def atkin_lehner_matrix(N: int, w: int, domain: CoefficientDomain, Q: int,
                        realization: str = "ceil") -> DomainMatrix:
    """
    Matrix of the normalized Atkin-Lehner operator W_Q on the basis of W_w(N)

    Raises:
        ValueError: If Q is not an exact divisor of N or Q^{w/2} is not invertible
    """
    check_exact_divisor(Q, N)
    W = _W(N, w, domain)
    return W.restrict(atkin_lehner_operator(N, w, domain, Q, realization))


def theta_matrix(N: int, w: int, domain: CoefficientDomain, Q: int,
                 realization: str = "ceil") -> DomainMatrix:
    W = _W(N, w, domain)
    return W.restrict(theta_operator(N, w, domain, Q, realization))


def delta_restricted(N: int, w: int, domain: CoefficientDomain) -> DomainMatrix:
    """Matrix of P ↦ P|δ on the basis of W_w(N)."""
    W = _W(N, w, domain)
    return W.restrict(delta_matrix(N, w, domain))

