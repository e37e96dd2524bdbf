"""
Exact arithmetic helpers
Rationals, residues mod ℓ, Bernoulli numbers, divisor sums and the
numerator-divisibility conditions used by the congruence verifiers.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Any, Dict, List, Optional, Union

from sympy import divisors, factorint, isprime, multiplicity
from sympy.polys.domains import GF

logger = logging.getLogger(__name__)

# Exact rational type: always in lowest terms with a positive denominator.
Rational = Fraction

RationalLike = Union[int, Fraction]


def to_rational(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or 'num/den' string into a Fraction."""
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_rational(value: RationalLike) -> str:
    """Serialize a rational as 'num/den' (integers stay bare)."""
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def mod_int(value: int, ell: int):
    """Residue of value in the prime field GF(ℓ)."""
    return GF(ell)(value)


def format_mod_int(value: int, ell: int) -> str:
    """Serialize a residue as 'value mod ℓ' with value in [0, ℓ)."""
    return f"{int(value) % ell} mod {ell}"


def reduce_rational(value: RationalLike, ell: int) -> int:
    """
    Reduce a rational number modulo a prime

    Args:
        value: Rational number
        ell: Prime modulus

    Returns:
        Integer in [0, ℓ) congruent to value

    Raises:
        ValueError: If ℓ divides the denominator
    """
    q = Fraction(value)
    if q.denominator % ell == 0:
        raise ValueError(f"Cannot reduce {format_rational(q)} mod {ell}: denominator divisible by {ell}")
    return q.numerator * pow(q.denominator, -1, ell) % ell


def require_prime(value: int, name: str = "value") -> int:
    """Return value if it is a prime, otherwise raise ValueError."""
    if not isinstance(value, int) or not isprime(value):
        raise ValueError(f"{name} must be prime, got {value}")
    return value


def is_square_free(n: int) -> bool:
    """True iff no prime square divides n (n ≥ 1)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return all(e == 1 for e in factorint(n).values())


def prime_factors(n: int) -> List[int]:
    """Sorted list of the distinct prime divisors of n."""
    return sorted(factorint(n))


def valuation(n: int, ell: int) -> int:
    """ℓ-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    return int(multiplicity(ell, abs(n)))


@lru_cache(maxsize=None)
def _bernoulli_even_table(m: int) -> tuple:
    """B_0, B_2, ..., B_{2m} via the even binomial recurrence."""
    table = [Fraction(1)]
    for j in range(1, m + 1):
        n = 2 * j
        s = sum((Fraction(comb(n + 1, 2 * i)) * table[i] for i in range(j)), Fraction(0))
        # B_1 = -1/2 term of the recurrence
        s += Fraction(n + 1) * Fraction(-1, 2)
        table.append(-s / (n + 1))
    return tuple(table)


def bernoulli(k: int) -> Fraction:
    """
    Bernoulli number B_k as an exact rational

    Convention B_1 = -1/2; B_k = 0 for odd k > 1.

    Args:
        k: Nonnegative integer

    Returns:
        B_k as a Fraction
    """
    if k < 0:
        raise ValueError(f"Bernoulli index must be nonnegative, got {k}")
    if k == 1:
        return Fraction(-1, 2)
    if k % 2 == 1:
        return Fraction(0)
    return _bernoulli_even_table(k // 2)[k // 2]


def sigma(n: int, a: int) -> int:
    """Divisor power sum σ_a(n) = Σ_{d|n} d^a."""
    if n < 1:
        raise ValueError(f"sigma requires n >= 1, got {n}")
    return sum(d ** a for d in divisors(n))


def numerator_divides(ell: int, q: RationalLike) -> bool:
    """True iff ℓ divides the numerator of q in lowest terms (q = 0 counts as divisible)."""
    return Fraction(q).numerator % ell == 0


@dataclass
class T1Conditions:
    """Outcome of the Eisenstein-congruence hypothesis check for one (k, p, ε, ℓ)."""
    k: int
    p: int
    eps: int
    ell: int
    divides_plus: bool
    ok: bool
    checks: Dict[str, bool] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)

    @property
    def case(self) -> str:
        return "ell | p^(k/2)+eps" if self.divides_plus else "ell | p^(k/2-1)+eps"


def _odd_route_witness(k: int, p: int, ell: int) -> Optional[int]:
    """Smallest even n in (0, k) with ℓ ∤ B_n B_{k-n} (p^{n-1} - 1)."""
    for n in range(2, k - 1, 2):
        value = bernoulli(n) * bernoulli(k - n) * (p ** (n - 1) - 1)
        if value != 0 and not numerator_divides(ell, value):
            return n
    return None


def t1_conditions(k: int, p: int, eps: int, ell: int) -> T1Conditions:
    """
    Check the Eisenstein-congruence hypotheses for (k, p, ε, ℓ)

    Checks ℓ > k-2, ℓ > 3, ℓ ≠ k+1 (waived when ℓ | p^{k/2}+ε), that ℓ divides
    (p^{k/2}+ε)(p^{k/2-1}+ε) and the numerator of (B_k/k)(p^{k/2}+ε). On the
    odd route (ℓ ∤ p^{k/2}+ε) an even n with ℓ ∤ B_n B_{k-n}(p^{n-1}-1) is
    searched and recorded.

    Args:
        k: Even weight ≥ 4
        p: Prime level
        eps: Atkin-Lehner sign (+1 or -1)
        ell: Prime modulus

    Returns:
        T1Conditions record

    Raises:
        ValueError: If p or ℓ is not prime, k is not even ≥ 4 or ε ∉ {±1}
    """
    require_prime(p, "p")
    require_prime(ell, "ell")
    if k < 4 or k % 2:
        raise ValueError(f"k must be even and >= 4, got {k}")
    if eps not in (1, -1):
        raise ValueError(f"eps must be +1 or -1, got {eps}")

    plus = p ** (k // 2) + eps
    minus = p ** (k // 2 - 1) + eps
    divides_plus = plus % ell == 0

    checks = {
        "ell_gt_k_minus_2": ell > k - 2,
        "ell_gt_3": ell > 3,
        "ell_ne_k_plus_1": ell != k + 1 or divides_plus,
        "ell_divides_product": (plus * minus) % ell == 0,
        "ell_divides_bernoulli_numerator": numerator_divides(ell, bernoulli(k) / k * plus),
    }
    witnesses: Dict[str, Any] = {
        "p_half_plus_eps": plus,
        "p_half_minus_one_plus_eps": minus,
        "k_plus_one_branch": ell == k + 1,
    }
    if divides_plus:
        witnesses["ell_valuation"] = valuation(plus, ell)
    else:
        n = _odd_route_witness(k, p, ell)
        checks["odd_route_witness"] = n is not None
        witnesses["odd_route_n"] = n

    ok = all(checks.values())
    logger.debug(f"t1_conditions(k={k}, p={p}, eps={eps}, ell={ell}) -> ok={ok} checks={checks}")
    return T1Conditions(k=k, p=p, eps=eps, ell=ell, divides_plus=divides_plus,
                        ok=ok, checks=checks, witnesses=witnesses)
