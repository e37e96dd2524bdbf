"""
Independent oracles
Classical dimension formulas for modular forms on Γ₀(N), the Eichler-Shimura
cross-check against the period spaces, and the q-expansion of Δ.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from sympy import divisors, legendre_symbol

from .exactlinalg import RATIONALS, CoefficientDomain
from .exactmath import is_square_free, prime_factors, require_prime
from .periodspace import build_W, split_pm

logger = logging.getLogger(__name__)


@dataclass
class DimensionRecord:
    """Dimensions of M_k(Γ₀(N)), S_k(Γ₀(N)) and its new parts"""
    level: int
    weight: int
    modular: int
    cusp: int
    new: int
    p_new: Optional[int] = None

    def to_json(self) -> Dict[str, Optional[int]]:
        return {"dimM": self.modular, "dimS": self.cusp, "dimSnew": self.new, "dimSpnew": self.p_new}


def _kronecker_minus_one(p: int) -> int:
    return 0 if p == 2 else int(legendre_symbol(p - 1, p))


def _kronecker_minus_three(p: int) -> int:
    if p == 3:
        return 0
    if p == 2:
        return -1
    return int(legendre_symbol((-3) % p, p))


def _signature(N: int):
    """(index μ, ν₂, ν₃, cusps, genus) of Γ₀(N) for square-free N."""
    primes = prime_factors(N)
    mu = N
    nu2 = 1
    nu3 = 1
    for p in primes:
        mu = mu // p * (p + 1)
        nu2 *= 1 + _kronecker_minus_one(p)
        nu3 *= 1 + _kronecker_minus_three(p)
    cusps = 2 ** len(primes)
    genus = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    if genus.denominator != 1:
        raise RuntimeError(f"Non-integral genus {genus} for level {N}")
    return mu, nu2, nu3, cusps, int(genus)


def cusp_dim(N: int, k: int) -> int:
    """dim S_k(Γ₀(N)) for square-free N and even k ≥ 2."""
    if N == 0 or not is_square_free(N):
        raise ValueError(f"Level {N} is not square-free")
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and >= 2, got {k}")
    _, nu2, nu3, cusps, genus = _signature(N)
    if k == 2:
        return genus
    return (k - 1) * (genus - 1) + (k // 2 - 1) * cusps + nu2 * (k // 4) + nu3 * (k // 3)


def modular_dim(N: int, k: int) -> int:
    cusps = _signature(N)[3]
    if k == 2:
        return cusp_dim(N, k) + cusps - 1
    return cusp_dim(N, k) + cusps


def new_cusp_dim(N: int, k: int) -> int:
    """dim S_k(Γ₀(N))^new = Σ_{d|N} (-2)^{ω(N/d)} dim S_k(Γ₀(d)) for square-free N."""
    return sum((-2) ** len(prime_factors(N // d)) * cusp_dim(d, k) for d in divisors(N))


def dim_oracle(N: int, k: int, p: Optional[int] = None) -> DimensionRecord:
    """
    Classical dimensions at square-free level N and even weight k

    Args:
        N: Square-free level
        k: Even weight ≥ 2
        p: Optional prime divisor of N for the p-new dimension dim S_k(N) - 2 dim S_k(N/p)

    Returns:
        DimensionRecord
    """
    record = DimensionRecord(N, k, modular_dim(N, k), cusp_dim(N, k), new_cusp_dim(N, k))
    if p is not None:
        require_prime(p, "p")
        if N % p:
            raise ValueError(f"{p} does not divide {N}")
        record.p_new = record.cusp - 2 * cusp_dim(N // p, k)
    return record


@dataclass
class EichlerShimuraCheck:
    """Period-space dimensions against the classical ones"""
    level: int
    weight: int
    dim_plus: int
    dim_minus: int
    modular: int
    cusp: int

    @property
    def ok(self) -> bool:
        return self.dim_plus == self.modular and self.dim_minus == self.cusp


def eichler_shimura_check(N: int, k: int, domain: CoefficientDomain = RATIONALS) -> EichlerShimuraCheck:
    """Compare dim W⁺_{k-2}(N), dim W⁻_{k-2}(N) with dim M_k(N), dim S_k(N)."""
    plus, minus = split_pm(build_W(N, k - 2, domain))
    record = dim_oracle(N, k)
    check = EichlerShimuraCheck(N, k, plus.dim, minus.dim, record.modular, record.cusp)
    if not check.ok:
        logger.warning(f"Eichler-Shimura mismatch at N={N}, k={k}: W+={plus.dim} W-={minus.dim} "
                       f"M={record.modular} S={record.cusp}")
    return check


def _series_mul(a: List[int], b: List[int], prec: int) -> List[int]:
    out = [0] * prec
    for i, x in enumerate(a[:prec]):
        if x:
            for j, y in enumerate(b[:prec - i]):
                out[i + j] += x * y
    return out


def delta_qexpansion(prec: int) -> List[int]:
    """
    Coefficients τ(0), …, τ(prec-1) of Δ = q∏(1-q^m)^24

    Args:
        prec: Number of coefficients (≥ 1)
    """
    if prec < 1:
        raise ValueError(f"Precision must be >= 1, got {prec}")
    product = [1] + [0] * (prec - 1)
    for m in range(1, prec):
        factor = [0] * prec
        factor[0] = 1
        factor[m] = -1
        for _ in range(24):
            product = _series_mul(product, factor, prec)
    return [0] + product[:prec - 1]


def ramanujan_tau(n: int) -> int:
    return delta_qexpansion(n + 1)[n]
