"""
Cosets of Γ₀(N) in SL₂(ℤ)
The coset space Γ₀(N)\\SL₂(ℤ) realized as P¹(ℤ/N): canonical labels, the right
SL₂(ℤ)-action, δ-conjugation, level projections and fibers, and explicit lifts.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Tuple

from sympy import factorint
from sympy.core.intfunc import igcdex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntMatrix2:
    """2×2 integer matrix (a b; c d)"""
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "IntMatrix2":
        return IntMatrix2(-self.a, -self.b, -self.c, -self.d)

    def adjugate(self) -> "IntMatrix2":
        """adj(M), so that M·adj(M) = det(M)·Id."""
        return IntMatrix2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "IntMatrix2":
        """Inverse of a matrix in SL₂(ℤ)."""
        if self.det != 1:
            raise ValueError(f"Matrix {self} is not in SL2(Z)")
        return self.adjugate()

    def power(self, k: int) -> "IntMatrix2":
        base = self if k >= 0 else self.inverse()
        result = IDENTITY
        for _ in range(abs(k)):
            result = result @ base
        return result

    def sign_normalized(self) -> "IntMatrix2":
        """Representative of {M, -M} whose first nonzero entry is positive."""
        for entry in self.as_tuple():
            if entry:
                return self if entry > 0 else -self
        return self

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __str__(self) -> str:
        return f"({self.a} {self.b}; {self.c} {self.d})"


IDENTITY = IntMatrix2(1, 0, 0, 1)
S = IntMatrix2(0, -1, 1, 0)
T = IntMatrix2(1, 1, 0, 1)
U = IntMatrix2(1, -1, 1, 0)
DELTA = IntMatrix2(-1, 0, 0, 1)


def sigma_matrix(N: int) -> IntMatrix2:
    """σ_N = (N 0; 0 1)."""
    return IntMatrix2(N, 0, 0, 1)


def fricke_matrix(N: int) -> IntMatrix2:
    """w_N = (0 -1; N 0)."""
    return IntMatrix2(0, -1, N, 0)


@dataclass(frozen=True, order=True)
class CosetLabel:
    """Point (c:d) of P¹(ℤ/N) in canonical form; labels the coset Γ₀(N)·(* *; c d)"""
    N: int
    c: int
    d: int

    def __str__(self) -> str:
        return f"{self.c}:{self.d}@{self.N}"

    @classmethod
    def parse(cls, text: str, N: Optional[int] = None) -> "CosetLabel":
        """Parse 'c:d@N' (or 'c:d' with an explicit level) into a canonical label."""
        body, _, level = text.partition("@")
        if level:
            N = int(level)
        if N is None:
            raise ValueError(f"Label '{text}' has no level")
        c, _, d = body.partition(":")
        return canonical(int(c), int(d), N)


def psi(N: int) -> int:
    """Index [SL₂(ℤ) : Γ₀(N)] = N·∏_{p|N}(1 + 1/p)."""
    result = N
    for p in factorint(N):
        result = result // p * (p + 1)
    return result


@lru_cache(maxsize=None)
def _canonical_table(N: int) -> Dict[Tuple[int, int], CosetLabel]:
    """Map every admissible pair mod N to its canonical label."""
    if N == 1:
        return {(0, 0): CosetLabel(1, 0, 1)}
    units = [u for u in range(1, N) if gcd(u, N) == 1]
    table: Dict[Tuple[int, int], CosetLabel] = {}
    for c in range(N):
        for d in range(N):
            if gcd(gcd(c, d), N) != 1 or (c, d) in table:
                continue
            orbit = {((u * c) % N, (u * d) % N) for u in units}
            # smallest unit multiple in lexicographic order
            rep = min(orbit)
            label = CosetLabel(N, rep[0], rep[1])
            for pair in orbit:
                table[pair] = label
    logger.debug(f"P1(Z/{N}) table built: {len(set(table.values()))} points")
    return table


def canonical(c: int, d: int, N: int) -> CosetLabel:
    """
    Canonical label of (c:d) in P¹(ℤ/N)

    Raises:
        ValueError: If gcd(c, d, N) ≠ 1
    """
    if N < 1:
        raise ValueError(f"Level must be positive, got {N}")
    key = (c % N, d % N)
    try:
        return _canonical_table(N)[key]
    except KeyError:
        raise ValueError(f"({c}:{d}) is not a point of P1(Z/{N})")


@lru_cache(maxsize=None)
def proj_line(N: int) -> Tuple[CosetLabel, ...]:
    """All points of P¹(ℤ/N), canonical and sorted."""
    labels = tuple(sorted(set(_canonical_table(N).values())))
    if len(labels) != psi(N):
        raise RuntimeError(f"P1(Z/{N}) has {len(labels)} points, expected {psi(N)}")
    return labels


@lru_cache(maxsize=None)
def _label_indices(N: int) -> Dict[CosetLabel, int]:
    return {label: i for i, label in enumerate(proj_line(N))}


def label_index(label: CosetLabel) -> int:
    """Position of a label in proj_line(label.N)."""
    return _label_indices(label.N)[label]


def identity_coset(N: int) -> CosetLabel:
    return canonical(0, 1, N)


def act(label: CosetLabel, gamma: IntMatrix2) -> CosetLabel:
    """Right action A ↦ Aγ: the row vector (c, d)·γ, canonicalized."""
    if gamma.det != 1:
        raise ValueError(f"act requires det 1, got det {gamma.det} for {gamma}")
    c, d = label.c, label.d
    return canonical(c * gamma.a + d * gamma.c, c * gamma.b + d * gamma.d, label.N)


def delta_conj(label: CosetLabel) -> CosetLabel:
    """δAδ for δ = diag(-1, 1): (c:d) ↦ (-c:d)."""
    return canonical(-label.c, label.d, label.N)


def _check_divides(M: int, N: int):
    if M < 1 or N % M:
        raise ValueError(f"Level {M} does not divide {N}")


def project(label: CosetLabel, M: int) -> CosetLabel:
    """Γ₀(N)g ↦ Γ₀(M)g for M | N."""
    _check_divides(M, label.N)
    return canonical(label.c, label.d, M)


@lru_cache(maxsize=None)
def _fibers(M: int, N: int) -> Dict[CosetLabel, Tuple[CosetLabel, ...]]:
    fibers: Dict[CosetLabel, List[CosetLabel]] = {C: [] for C in proj_line(M)}
    for A in proj_line(N):
        fibers[project(A, M)].append(A)
    return {C: tuple(As) for C, As in fibers.items()}


def fiber(label: CosetLabel, N: int) -> Tuple[CosetLabel, ...]:
    """All labels of level N projecting to a label of level M | N."""
    _check_divides(label.N, N)
    return _fibers(label.N, N)[label]


def lift(label: CosetLabel) -> IntMatrix2:
    """
    Explicit representative in SL₂(ℤ) of the coset labelled (c:d)

    The bottom row is (c, d + jN) with the smallest j ≥ 0 making it coprime
    (c ≡ 0 is lifted to N unless (0:1)); the top row comes from the extended
    gcd, shifted so that 0 ≤ a < c when c ≠ 0.
    """
    N, c, d = label.N, label.c, label.d
    if (c, d) == (0, 1):
        return IDENTITY
    c1 = c if c != 0 else N
    d1 = d
    while gcd(c1, d1) != 1:
        d1 += N
    x, y, g = igcdex(d1, c1)
    a, b = int(x), -int(y)
    if c1:
        t = a // c1
        a, b = a - t * c1, b - t * d1
    gamma = IntMatrix2(a, b, c1, d1)
    if gamma.det != 1:
        raise RuntimeError(f"Lift of {label} failed: {gamma} has det {gamma.det}")
    return gamma
