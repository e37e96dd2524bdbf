"""
Eisenstein period polynomials
Closed forms of the even Eisenstein classes P⁺(E_{k,N}^{(ε)}), their Atkin-Lehner
construction, the level-1 odd extended class and its identity-coset sums,
trace identities and the odd Eisenstein eigenspace modulo ℓ.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Dict, List, Mapping, Optional, Tuple

from sympy import divisors

from .cosets import CosetLabel, identity_coset, label_index
from .exactlinalg import (
    RATIONALS, CoefficientDomain, convert, finite_field, matrix_from_columns, rank, sparse_matrix,
)
from .exactmath import bernoulli, is_square_free, prime_factors, reduce_rational, require_prime, sigma
from .heckealgebra import DoubleCosetSpec, act_sigma, atkin_lehner_operator, hecke_element, hecke_operator
from .periodspace import (
    ExtPoly, PeriodSubspace, VectorPoly, ambient_dim, build_W, include, parity_subspace, trace,
)

logger = logging.getLogger(__name__)

EISENSTEIN_PRIMES = (2, 3, 5)


# ── Atkin-Lehner sign systems ─────────────────────────────────────────────────

@dataclass(frozen=True)
class EpsSystem:
    """
    Atkin-Lehner signs ε(p) = ±1 for the primes of a square-free level

    ε extends multiplicatively to all divisors of N.
    """
    N: int
    signs: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if not is_square_free(self.N):
            raise ValueError(f"Level {self.N} is not square-free")
        primes = [p for p, _ in self.signs]
        if sorted(primes) != prime_factors(self.N):
            raise ValueError(f"Signs must be given exactly for the primes of {self.N}, got {primes}")
        if any(s not in (1, -1) for _, s in self.signs):
            raise ValueError(f"Signs must be +1 or -1, got {dict(self.signs)}")

    @classmethod
    def from_map(cls, N: int, signs: Mapping[int, int]) -> "EpsSystem":
        return cls(N, tuple(sorted(signs.items())))

    @classmethod
    def uniform(cls, N: int, sign: int) -> "EpsSystem":
        return cls.from_map(N, {p: sign for p in prime_factors(N)})

    @classmethod
    def parse(cls, text: str, N: int) -> "EpsSystem":
        """
        Parse '+1', '-1' (same sign at every prime) or 'p=±1,q=±1'

        Raises:
            ValueError: On malformed text or primes not dividing N
        """
        text = str(text).strip().replace("−", "-")
        if "=" not in text:
            return cls.uniform(N, _parse_sign(text))
        signs: Dict[int, int] = {}
        for part in text.split(","):
            prime, _, sign = part.partition("=")
            signs[int(prime)] = _parse_sign(sign)
        return cls.from_map(N, signs)

    def __call__(self, d: int) -> int:
        return eps_value(self, d)

    def restrict(self, M: int) -> "EpsSystem":
        if self.N % M:
            raise ValueError(f"{M} does not divide {self.N}")
        return EpsSystem(M, tuple((p, s) for p, s in self.signs if M % p == 0))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.signs)

    def __str__(self) -> str:
        if not self.signs:
            return "+1"
        return ",".join(f"{p}={'+1' if s > 0 else '-1'}" for p, s in self.signs)


def _parse_sign(text: str) -> int:
    value = int(text.strip())
    if value not in (1, -1):
        raise ValueError(f"Sign must be +1 or -1, got '{text}'")
    return value


def eps_value(eps: EpsSystem, d: int) -> int:
    """ε(d) = Π_{p|d} ε(p) for d | N."""
    if d < 1 or eps.N % d:
        raise ValueError(f"{d} does not divide {eps.N}")
    value = 1
    for p, s in eps.signs:
        if d % p == 0:
            value *= s
    return value


def _check_weight(w: int):
    if w < 2 or w % 2:
        raise ValueError(f"Weight w must be even and >= 2, got {w}")


def _reduced_level(N: int, a: int) -> int:
    """N_a = N / gcd(N, a)."""
    return N // gcd(N, a)


# ── Even classes ──────────────────────────────────────────────────────────────

def p_zero(N: int, w: int, domain: CoefficientDomain = RATIONALS) -> VectorPoly:
    """P₀ = 𝟙|(1-S): the constant tuple 1 - X^w."""
    _check_weight(w)
    return VectorPoly.from_function(N, w, domain, lambda A: [1] + [0] * (w - 1) + [-1])


def pal_image(N: int, w: int, A: CosetLabel) -> Tuple[int, ...]:
    """Value N_z^w - N_t^w X^w of P₀|Θ_N at A = (z:t)."""
    _check_weight(w)
    if A.N != N:
        raise ValueError(f"Label {A} is not at level {N}")
    return (_reduced_level(N, A.c) ** w,) + (0,) * (w - 1) + (-_reduced_level(N, A.d) ** w,)


def eis_plus(N: int, eps: EpsSystem, w: int, domain: CoefficientDomain = RATIONALS) -> VectorPoly:
    """
    Even Eisenstein class P⁺(E_{w+2,N}^{(ε)})

    The component at A = (z:t) is ε(N_z)N_z^{w/2} - ε(N_t)N_t^{w/2}X^w.

    Raises:
        ValueError: If N is not square-free or ε is not a sign system at level N
    """
    _check_weight(w)
    if eps.N != N:
        raise ValueError(f"Sign system is for level {eps.N}, not {N}")
    half = w // 2

    def component(A: CosetLabel):
        Nz, Nt = _reduced_level(N, A.c), _reduced_level(N, A.d)
        return [eps(Nz) * Nz ** half] + [0] * (w - 1) + [-eps(Nt) * Nt ** half]

    return VectorPoly.from_function(N, w, domain, component)


def eis_plus_from_atkin_lehner(N: int, eps: EpsSystem, w: int, realization: str = "ceil") -> VectorPoly:
    """
    Even Eisenstein class assembled from Atkin-Lehner images of P₀

    Σ_{d|N} ε(d) d^{-w/2} i_d^N(P₀|Θ_d T̃_d) / Π_{p|N}(1 + ε(p)p^{-w/2}), with the
    double-coset action evaluated at every level d.
    """
    _check_weight(w)
    if eps.N != N:
        raise ValueError(f"Sign system is for level {eps.N}, not {N}")
    total = VectorPoly.from_function(N, w, RATIONALS, lambda A: [0] * (w + 1))
    for d in divisors(N):
        image = act_sigma(p_zero(d, w), DoubleCosetSpec.atkin_lehner(d, d), hecke_element(d, realization))
        total = total + include(image, N).scale(Fraction(eps(d), d ** (w // 2)))
    norm = Fraction(1)
    for p in prime_factors(N):
        norm *= 1 + Fraction(eps(p), p ** (w // 2))
    return total.scale(1 / norm)


def trace_identity_check(M: int, p: int, eps: EpsSystem, k: int) -> bool:
    """
    Check tr^{Mp}_M P⁺(E_{k,Mp}^{(ε)}) = (1 + ε(p)p^{k/2})·P⁺(E_{k,M}^{(ε|M)})

    Raises:
        ValueError: If Mp is not square-free or ε is not at level Mp
    """
    require_prime(p, "p")
    N = M * p
    if eps.N != N:
        raise ValueError(f"Sign system is for level {eps.N}, not {N}")
    w = k - 2
    lhs = trace(eis_plus(N, eps, w), M)
    factor = 1 + eps(p) * p ** (k // 2)
    rhs = eis_plus(M, eps.restrict(M), w).scale(factor)
    ok = (lhs - rhs).is_zero()
    logger.debug(f"trace identity M={M} p={p} eps={eps} k={k}: factor {factor} -> {ok}")
    return ok


# ── Odd classes ───────────────────────────────────────────────────────────────

def _interior_coefficient(k: int, n: int) -> Fraction:
    return Fraction(1, 2) * comb(k - 2, n - 1) * bernoulli(n) / n * bernoulli(k - n) / (k - n)


def eis_minus_level1(k: int) -> ExtPoly:
    """
    Extended odd class of E_k at level 1

    Principal terms -(B_k/2k)/(k-1) at X^{-1} and X^{k-1}; interior coefficient
    (1/2)·C(k-2, n-1)(B_n/n)(B_{k-n}/(k-n)) at X^{n-1} for 0 < n < k.
    """
    if k < 4 or k % 2:
        raise ValueError(f"k must be even and >= 4, got {k}")
    principal = -bernoulli(k) / (2 * k) / (k - 1)
    terms: Dict[int, Fraction] = {-1: principal, k - 1: principal}
    for n in range(1, k):
        terms[n - 1] = terms.get(n - 1, Fraction(0)) + _interior_coefficient(k, n)
    return ExtPoly.from_degrees(k - 2, terms)


def eis_minus_identity_coset(N: int, eps: EpsSystem, k: int) -> ExtPoly:
    """Σ_{d|N} ε(d) d^{-w/2}·(eis_minus_level1(k) | diag(d, 1))."""
    if eps.N != N:
        raise ValueError(f"Sign system is for level {eps.N}, not {N}")
    base = eis_minus_level1(k)
    w = k - 2
    total = ExtPoly.from_degrees(w, {})
    for d in divisors(N):
        total = total + base.slash_diagonal(d).scale(Fraction(eps(d), d ** (w // 2)))
    return total


def odd_route_coefficients(k: int, p: int) -> List[Fraction]:
    """Interior coefficients (1/2)C(k-2, n-1)(B_n/n)(B_{k-n}/(k-n))(1 - p^{n-1}) at X^{n-1}."""
    coeffs = [Fraction(0)] * (k - 1)
    for n in range(1, k):
        coeffs[n - 1] += _interior_coefficient(k, n) * (1 - p ** (n - 1))
    return coeffs


def odd_route_nonvanishing(k: int, p: int, ell: int) -> bool:
    """True iff some odd-route coefficient is a nonzero ℓ-unit."""
    for c in odd_route_coefficients(k, p):
        if c and c.numerator % ell and c.denominator % ell:
            return True
    return False


def eisenstein_eigen_pairs(N: int, w: int, domain: CoefficientDomain, eps: EpsSystem,
                           realization: str = "ceil") -> List[Tuple[object, int]]:
    """(ambient operator, Eisenstein eigenvalue) pairs for T_n, n ∈ {2,3,5} coprime to N, and W_p."""
    pairs: List[Tuple[object, int]] = []
    for n in EISENSTEIN_PRIMES:
        if gcd(n, N) == 1:
            pairs.append((hecke_operator(N, w, domain, n, realization), sigma(n, w + 1)))
    for p in prime_factors(N):
        pairs.append((atkin_lehner_operator(N, w, domain, p, realization), eps(p)))
    return pairs


def joint_eigenspace(space: PeriodSubspace, pairs) -> PeriodSubspace:
    """Common eigenspace {v in space : Op v = λ v for all pairs}."""
    domain = space.domain.field()
    n = ambient_dim(space.level, space.weight)
    current = space
    for operator, value in pairs:
        shift = sparse_matrix({(i, i): value for i in range(n)}, (n, n), domain)
        current = space.sub(current.kernel_of(convert(operator, domain) - shift))
        if current.dim == 0:
            break
    return current


def odd_eisenstein_eigenspace(p: int, eps: EpsSystem, k: int, ell: int) -> PeriodSubspace:
    """Common Eisenstein eigenspace in W⁻_{k-2}(p) over 𝔽_ℓ."""
    require_prime(p, "p")
    domain = finite_field(ell)
    w = k - 2
    minus = parity_subspace(build_W(p, w, domain), -1)
    return joint_eigenspace(minus, eisenstein_eigen_pairs(p, w, domain, eps))


@dataclass
class OddRouteReport:
    """Identity-coset comparison of the odd Eisenstein eigenspace modulo ℓ"""
    eigenspace_dim: int
    principal_part_vanishes: bool
    target_nonzero: bool
    matches: bool
    reason: Optional[str] = None


def odd_identity_coset_matches(p: int, eps: EpsSystem, k: int, ell: int) -> OddRouteReport:
    """
    Whether some class of the odd eigenspace has identity-coset value proportional to
    the reduction of eis_minus_identity_coset(p, ε, k)
    """
    space = odd_eisenstein_eigenspace(p, eps, k, ell)
    ext = eis_minus_identity_coset(p, eps, k)
    try:
        principal = [reduce_rational(c, ell) for c in ext.principal_part().values()]
        target = [reduce_rational(c, ell) for c in ext.ordinary_part()]
    except ValueError as e:
        return OddRouteReport(space.dim, False, False, False, str(e))
    principal_vanishes = all(c == 0 for c in principal)
    target_nonzero = any(target)
    if space.dim == 0 or not target_nonzero:
        return OddRouteReport(space.dim, principal_vanishes, target_nonzero, False,
                              "empty eigenspace" if space.dim == 0 else "target reduces to zero")
    w = k - 2
    start = label_index(identity_coset(p)) * (w + 1)
    components = [v[start:start + w + 1] for v in space.vectors()]
    domain = space.domain.field()
    base = matrix_from_columns(components, w + 1, domain)
    extended = matrix_from_columns(components + [target], w + 1, domain)
    matches = rank(base) == rank(extended)
    if not matches:
        logger.warning(f"Odd Eisenstein eigenspace mod {ell} (p={p}, k={k}) misses the identity-coset value")
    return OddRouteReport(space.dim, principal_vanishes, target_nonzero, matches)


def identity_component(P: VectorPoly) -> Tuple:
    return P[identity_coset(P.N)]
