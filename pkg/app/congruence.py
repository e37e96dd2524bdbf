"""
Congruence verifiers
New subspaces, eigensystem extraction and root checks modulo ℓ, and the
verifiers for the Eisenstein-congruence theorems and the surjectivity of
reduction on p-new subspaces.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .exactlinalg import (
    RATIONALS, CoefficientDomain, DomainMatrix, charpoly, column, convert, eval_poly_mod,
    finite_field, identity, matrix_from_columns, sparse_matrix,
)
from .exactmath import (
    T1Conditions, format_rational, prime_factors, reduce_rational, require_prime, sigma,
    t1_conditions,
)
from .cosets import identity_coset, label_index
from .eisenstein import (
    EISENSTEIN_PRIMES, EpsSystem, OddRouteReport, eis_plus, eisenstein_eigen_pairs, joint_eigenspace,
    odd_identity_coset_matches, odd_route_nonvanishing,
)
from .heckealgebra import atkin_lehner_operator, check_exact_divisor, hecke_operator, theta_operator
from .periodspace import (
    PeriodSubspace, VectorPoly, ambient_dim, build_W, delta_matrix, parity_subspace, trace_matrix,
)

logger = logging.getLogger(__name__)


# ── New subspaces ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class NewSpaceSpec:
    """
    p-new subspace request

    al_signs maps exact divisors Q of N to the required Atkin-Lehner sign;
    parity selects W⁺ (+1) or W⁻ (-1).
    """
    N: int
    w: int
    domain: CoefficientDomain
    p: int
    al_signs: Tuple[Tuple[int, int], ...] = ()
    parity: Optional[int] = None
    realization: str = "ceil"

    def __post_init__(self):
        require_prime(self.p, "p")
        if self.N % self.p:
            raise ValueError(f"{self.p} does not divide {self.N}")
        for Q, sign in self.al_signs:
            check_exact_divisor(Q, self.N)
            if sign not in (1, -1):
                raise ValueError(f"Atkin-Lehner sign must be +1 or -1, got {sign}")
        if self.parity not in (None, 1, -1):
            raise ValueError(f"Parity must be +1, -1 or None, got {self.parity}")
        ell = self.domain.characteristic
        if ell and (ell <= self.w or (6 * self.N) % ell == 0):
            raise ValueError(f"Need ell > w and ell not dividing 6N, got ell={ell}, w={self.w}, N={self.N}")

    @classmethod
    def create(cls, N: int, w: int, domain: CoefficientDomain, p: int,
               al_signs: Optional[Mapping[int, int]] = None, parity: Optional[int] = None,
               realization: str = "ceil") -> "NewSpaceSpec":
        return cls(N, w, domain, p, tuple(sorted((al_signs or {}).items())), parity, realization)


def new_subspace(spec: NewSpaceSpec) -> PeriodSubspace:
    """
    W_w(N)^{p-new} with optional parity and Atkin-Lehner conditions

    Kernel of P ↦ (tr_{N/p} P, tr_{N/p}(P|Θ_N T̃_N)) inside W_w(N); Atkin-Lehner
    conditions use Θ_Q - ε·Q^{w/2}.
    """
    N, w = spec.N, spec.w
    field_domain = spec.domain.field()
    W = build_W(N, w, spec.domain)
    M = N // spec.p
    tr = trace_matrix(N, M, w, field_domain)
    theta = theta_operator(N, w, field_domain, N, spec.realization)
    conditions = tr.vstack(tr * theta)
    space = W.sub(W.kernel_of(conditions))
    n = ambient_dim(N, w)
    if spec.parity is not None and space.dim:
        shift = identity(n, field_domain) if spec.parity > 0 else -identity(n, field_domain)
        space = W.sub(space.kernel_of(delta_matrix(N, w, field_domain) - shift))
    for Q, sign in spec.al_signs:
        if not space.dim:
            break
        scalar = sparse_matrix({(i, i): sign * Q ** (w // 2) for i in range(n)}, (n, n), field_domain)
        space = W.sub(space.kernel_of(theta_operator(N, w, field_domain, Q, spec.realization) - scalar))
    logger.info(f"New subspace N={N} w={w} p={spec.p} over {spec.domain}: dim {space.dim}")
    return space


# ── Eigensystems ──────────────────────────────────────────────────────────────

@dataclass
class EigenData:
    """Rational Hecke eigensystem of an eigenform g of level M and weight k"""
    level: int
    k: int
    eigenvalues: Dict[int, Fraction]
    al_signs: Dict[int, int] = field(default_factory=dict)
    components: Optional[VectorPoly] = None
    den: Optional[int] = None
    minus_components: Optional[VectorPoly] = None
    den_minus: Optional[int] = None

    def __post_init__(self):
        self.eigenvalues.setdefault(1, Fraction(1))
        if self.eigenvalues[1] != 1:
            raise ValueError("λ_1 must be 1")

    def to_json(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "k": self.k,
            "eigenvalues": {str(n): format_rational(v) for n, v in sorted(self.eigenvalues.items())},
            "al_signs": {str(q): s for q, s in sorted(self.al_signs.items())},
            "den": self.den,
            "components": self.components.to_json() if self.components else None,
            "den_minus": self.den_minus,
            "minus_components": self.minus_components.to_json() if self.minus_components else None,
        }


def restricted_charpolys(space: PeriodSubspace, n_list: Sequence[int],
                         realization: str = "ceil") -> Dict[int, List[Fraction]]:
    """
    Characteristic polynomials of T_n restricted to a ℚ-subspace

    Raises:
        ValueError: If the space is not invariant under some T_n
    """
    result = {}
    for n in n_list:
        operator = hecke_operator(space.level, space.weight, RATIONALS, n, realization)
        result[n] = charpoly(space.restrict(operator))
        logger.debug(f"charpoly T_{n} on dim {space.dim}: {result[n]}")
    return result


def eigensystem_roots(space: PeriodSubspace, n_list: Sequence[int], ell: int,
                      targets: Mapping[int, int], realization: str = "ceil") -> Dict[int, bool]:
    """
    For each n: does charpoly(T_n | space) vanish at targets[n] modulo ℓ?

    The zero space gives False for every n.

    Raises:
        ValueError: If the space is not over ℚ or not invariant
    """
    require_prime(ell, "ell")
    if space.domain.characteristic:
        raise ValueError("eigensystem_roots expects a space over Q")
    if space.dim == 0:
        return {n: False for n in n_list}
    polys = restricted_charpolys(space, n_list, realization)
    return {n: eval_poly_mod(polys[n], targets[n] % ell, ell) == 0 for n in n_list}


def _charpolys_mod(polys: Mapping[int, List[Fraction]], ell: int) -> Dict[str, List[int]]:
    return {str(n): [reduce_rational(c, ell) for c in coeffs] for n, coeffs in polys.items()}


def _eigenvalue_of(operator: DomainMatrix, vector: List[Fraction]) -> Fraction:
    """λ with operator·v = λ·v, or ValueError if v is not an eigenvector."""
    n = len(vector)
    v = matrix_from_columns([vector], n, RATIONALS)
    image = column(convert(operator, RATIONALS) * v, 0)
    pivot = next(i for i, x in enumerate(vector) if x)
    value = Fraction(image[pivot]) / Fraction(vector[pivot])
    if any(Fraction(y) != value * Fraction(x) for x, y in zip(vector, image)):
        raise ValueError("Selected vector is not a joint eigenvector")
    return value


def _normalized_eigenvector(W: PeriodSubspace, parity: int, selector: Tuple[int, int],
                            realization: str) -> List[Fraction]:
    """
    The δ-parity part of W cut by T_n = λ, scaled at the identity coset

    P⁺ is scaled to constant term 1 and P⁻ to X-coefficient 1.

    Raises:
        ValueError: If the cut is not a line or the normalizing entry vanishes
    """
    M, w = W.level, W.weight
    n_sel, value = selector
    space = parity_subspace(W, parity)
    eigen = joint_eigenspace(space, [(hecke_operator(M, w, RATIONALS, n_sel, realization), value)])
    if eigen.dim != 1:
        raise ValueError(f"T_{n_sel} = {value} cuts a space of dimension {eigen.dim} "
                         f"at level {M}, weight {w + 2}, parity {parity:+d}")
    vector = [Fraction(x) for x in eigen.vectors()[0]]
    pivot = label_index(identity_coset(M)) * (w + 1) + (0 if parity == 1 else 1)
    if vector[pivot] == 0:
        term = "constant term" if parity == 1 else "X-coefficient"
        raise ValueError(f"Identity-coset {term} vanishes; cannot normalize")
    return [x / vector[pivot] for x in vector]


def _den(vector: Sequence[Fraction]) -> int:
    return lcm(*(x.denominator for x in vector))


def rational_newform_eigendata(M: int, k: int, selector: Tuple[int, int],
                               n_list: Sequence[int] = (2, 3, 5, 7), parity: int = 1,
                               realization: str = "ceil") -> EigenData:
    """
    Eigensystem of the rational eigenform selected by T_n-eigenvalue

    The δ-parity part of W_{k-2}(M) is cut by T_n = λ; the result must be one-
    dimensional. P⁺(g) is normalized so that its identity-coset constant term
    is 1, P⁻(g) so that its identity-coset X-coefficient is 1. With parity +1
    and k ≥ 6 the odd class is extracted as well (when the cut is a line), so
    that both denominators are available to the level-raising check.

    Args:
        M: Level
        k: Weight
        selector: (n, λ_n) selecting the eigenform
        n_list: Indices whose eigenvalues are read (those sharing a factor with M are skipped)
        parity: +1 for P⁺(g), -1 for P⁻(g)

    Raises:
        ValueError: If the selected eigenspace is empty or not one-dimensional
    """
    if parity not in (1, -1):
        raise ValueError(f"parity must be +1 or -1, got {parity}")
    w = k - 2
    n_sel = selector[0]
    W = build_W(M, w, RATIONALS)
    vector = _normalized_eigenvector(W, parity, selector, realization)

    eigenvalues: Dict[int, Fraction] = {1: Fraction(1)}
    for n in sorted(set(n_list) | {n_sel}):
        if gcd(n, M) == 1:
            eigenvalues[n] = _eigenvalue_of(hecke_operator(M, w, RATIONALS, n, realization), vector)
    al_signs: Dict[int, int] = {}
    for q in prime_factors(M):
        sign = _eigenvalue_of(atkin_lehner_operator(M, w, RATIONALS, q, realization), vector)
        al_signs[q] = int(sign)

    if parity == -1:
        odd = vector
    elif k >= 6:
        try:
            odd = _normalized_eigenvector(W, -1, selector, realization)
        except ValueError as e:
            logger.debug(f"No odd class for level {M}, k={k}, selector {selector}: {e}")
            odd = None
    else:
        odd = None
    den = _den(vector) if parity == 1 else None
    data = EigenData(M, k, eigenvalues, al_signs, VectorPoly.from_vector(M, w, RATIONALS, vector), den)
    if odd is not None:
        data.minus_components = VectorPoly.from_vector(M, w, RATIONALS, odd)
        data.den_minus = _den(odd)
    logger.info(f"Eigenform at level {M}, k={k}: eigenvalues "
                f"{ {n: format_rational(v) for n, v in eigenvalues.items()} } AL {al_signs} "
                f"den {den} den⁻ {data.den_minus}")
    return data


def al_power_coeffs(lam_p: int, eps: int, k: int, m: int, p: int) -> Tuple[int, int]:
    """
    (λ_{p^m}(g_p^{(ε)}), (-εp^{k/2-1})^m)

    λ_{p^m}(g) follows λ_{p^n} = λ_p λ_{p^{n-1}} - p^{k-1} λ_{p^{n-2}}, and the
    p-stabilized coefficient is λ_{p^m} + εp^{k/2}λ_{p^{m-1}}. Their difference is
    divisible by λ_p + εp^{k/2-1}(p+1).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    lam = [1, lam_p]
    for n in range(2, m + 1):
        lam.append(lam_p * lam[n - 1] - p ** (k - 1) * lam[n - 2])
    stabilized = lam[m] + eps * p ** (k // 2) * lam[m - 1]
    return stabilized, (-eps * p ** (k // 2 - 1)) ** m


def al_power_divisor(lam_p: int, eps: int, k: int, p: int) -> int:
    return lam_p + eps * p ** (k // 2 - 1) * (p + 1)


# ── Eisenstein congruence at prime level ──────────────────────────────────────

@dataclass
class T1Report:
    """Outcome of the Eisenstein congruence check at prime level"""
    conditions: T1Conditions
    membership: Optional[bool] = None
    nonzero: Optional[bool] = None
    odd_route: Optional[OddRouteReport] = None
    roots: Dict[int, bool] = field(default_factory=dict)
    targets: Dict[int, int] = field(default_factory=dict)
    charpolys_mod: Dict[str, List[int]] = field(default_factory=dict)
    eisenstein_eigenspace_dim: Optional[int] = None
    identity_coset_matches: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return (self.conditions.ok and self.membership is not False and bool(self.nonzero)
                and bool(self.roots) and all(self.roots.values()))


def eisenstein_eigenspace_mod(k: int, p: int, eps: int, ell: int,
                              realization: str = "ceil") -> Tuple[PeriodSubspace, VectorPoly]:
    """Common Eisenstein eigenspace in W^{+,new,(ε)}_{k-2}(p) over 𝔽_ℓ, with the reduced class."""
    w = k - 2
    domain = finite_field(ell)
    eps_sys = EpsSystem.uniform(p, eps)
    new = new_subspace(NewSpaceSpec.create(p, w, domain, p, {p: eps}, 1, realization))
    eigen = joint_eigenspace(new, [pair for pair in eisenstein_eigen_pairs(p, w, domain, eps_sys, realization)])
    return eigen, eis_plus(p, eps_sys, w).reduce_mod(ell)


def identity_coset_comparison(space: PeriodSubspace, target: VectorPoly) -> Optional[bool]:
    """Compare normalized identity-coset values when the eigenspace is a line."""
    if space.dim != 1:
        return None
    ell = space.domain.characteristic
    w = space.weight
    start = label_index(identity_coset(space.level)) * (w + 1)
    vector = space.vectors()[0][start:start + w + 1]
    ident = list(target[identity_coset(target.N)])
    if not vector[0] or not ident[0]:
        return None
    scale_v = pow(int(vector[0]), -1, ell)
    scale_t = pow(int(ident[0]), -1, ell)
    return all((int(a) * scale_v - int(b) * scale_t) % ell == 0 for a, b in zip(vector, ident))


def verify_T1(k: int, p: int, eps: int, ell: int, realization: str = "ceil") -> T1Report:
    """
    Verify the Eisenstein congruence at prime level p

    Args:
        k: Even weight ≥ 4
        p: Prime level
        eps: Atkin-Lehner sign
        ell: Prime modulus

    Returns:
        T1Report; failed conditions are reported, not raised
    """
    conditions = t1_conditions(k, p, eps, ell)
    report = T1Report(conditions)
    if not conditions.ok:
        logger.info(f"verify_T1 k={k} p={p} eps={eps} ell={ell}: conditions fail {conditions.checks}")
        return report
    w = k - 2
    if conditions.divides_plus:
        eigen, reduced = eisenstein_eigenspace_mod(k, p, eps, ell, realization)
        new = new_subspace(NewSpaceSpec.create(p, w, finite_field(ell), p, realization=realization))
        report.membership = new.contains_poly(reduced)
        report.nonzero = not reduced.is_zero()
        report.eisenstein_eigenspace_dim = eigen.dim
        report.identity_coset_matches = identity_coset_comparison(eigen, reduced)
    else:
        report.nonzero = odd_route_nonvanishing(k, p, ell)
        report.odd_route = odd_identity_coset_matches(p, EpsSystem.uniform(p, eps), k, ell)

    n_list = [n for n in EISENSTEIN_PRIMES if n != p]
    report.targets = {n: sigma(n, k - 1) % ell for n in n_list}
    space = new_subspace(NewSpaceSpec.create(p, w, RATIONALS, p, {p: eps}, 1, realization))
    if space.dim:
        polys = restricted_charpolys(space, n_list, realization)
        report.charpolys_mod = _charpolys_mod(polys, ell)
        report.roots = {n: eval_poly_mod(polys[n], report.targets[n], ell) == 0 for n in n_list}
    else:
        report.roots = {n: False for n in n_list}
    logger.info(f"verify_T1 k={k} p={p} eps={eps} ell={ell}: passed={report.passed}")
    return report


# ── Surjectivity of reduction ─────────────────────────────────────────────────

@dataclass
class T2Report:
    """Dimensions of the p-new subspace over ℚ and over 𝔽_ℓ"""
    N: int
    p: int
    w: int
    ell: int
    dim_q: int
    dim_fl: int
    expected_anomaly: int

    @property
    def surjective(self) -> bool:
        return self.dim_q == self.dim_fl

    @property
    def anomaly(self) -> int:
        return self.dim_fl - self.dim_q

    @property
    def passed(self) -> bool:
        return self.anomaly == self.expected_anomaly


def verify_T2(N: int, p: int, w: int, ell: int, realization: str = "ceil") -> T2Report:
    """
    Compare dim W_w(N)^{p-new} over ℚ and over 𝔽_ℓ

    The expected anomaly is 1 when ℓ = w+3 and 0 otherwise.

    Raises:
        ValueError: If p does not exactly divide N, ℓ ≤ w or ℓ divides 3N
    """
    require_prime(p, "p")
    require_prime(ell, "ell")
    if N % p or gcd(p, N // p) != 1:
        raise ValueError(f"{p} must exactly divide {N}")
    if ell <= w or (3 * N) % ell == 0 or ell == 2:
        raise ValueError(f"Need ell > w and ell not dividing 6N, got ell={ell}, w={w}, N={N}")
    dim_q = new_subspace(NewSpaceSpec.create(N, w, RATIONALS, p, realization=realization)).dim
    dim_fl = new_subspace(NewSpaceSpec.create(N, w, finite_field(ell), p, realization=realization)).dim
    report = T2Report(N, p, w, ell, dim_q, dim_fl, 1 if ell == w + 3 else 0)
    if report.anomaly >= 2 or report.anomaly < 0:
        logger.warning(f"verify_T2 N={N} p={p} w={w} ell={ell}: unexpected anomaly {report.anomaly}")
    logger.info(f"verify_T2 N={N} p={p} w={w} ell={ell}: dimQ={dim_q} dimF={dim_fl}")
    return report


# ── Level raising ─────────────────────────────────────────────────────────────

@dataclass
class T3Report:
    """Outcome of the cusp-form congruence check at level Mp"""
    lambda_p: Fraction
    lambda_target: int
    lambda_congruence: bool
    denominator_condition: bool
    roots: Dict[int, bool] = field(default_factory=dict)
    targets: Dict[int, int] = field(default_factory=dict)
    charpolys_mod: Dict[str, List[int]] = field(default_factory=dict)
    newform_ap: int = 0
    denominator_plus: bool = False
    denominator_minus: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return (self.lambda_congruence and self.denominator_condition
                and bool(self.roots) and all(self.roots.values()))


def verify_T3(M: int, p: int, k: int, eps: int, ell: int, g: EigenData,
              realization: str = "ceil") -> T3Report:
    """
    Verify the congruence between g_p^{(ε)} and a p-new eigenform at level Mp

    Raises:
        ValueError: If gcd(p, M) ≠ 1, ℓ ≤ k-2, ℓ | 3Mp or ℓ = k+1
    """
    require_prime(p, "p")
    require_prime(ell, "ell")
    if gcd(p, M) != 1:
        raise ValueError(f"p={p} must not divide M={M}")
    if ell <= k - 2 or (3 * M * p) % ell == 0 or ell == k + 1:
        raise ValueError(f"Need ell > k-2, ell not dividing 3Mp and ell != k+1, got ell={ell}")
    if g.level != M or g.k != k:
        raise ValueError(f"Eigendata is for level {g.level}, weight {g.k}")
    if p not in g.eigenvalues:
        raise ValueError(f"Eigendata has no eigenvalue λ_{p}")
    lam_p = g.eigenvalues[p]
    target = -eps * p ** (k // 2 - 1) * (p + 1)
    lam_ok = (Fraction(lam_p) - target).numerator % ell == 0
    plus_ok = g.den is not None and ((p ** (k // 2 - 1) + eps) * g.den) % ell != 0
    minus_ok = None
    if k >= 6 and g.den_minus is not None:
        minus_ok = ((p ** (k // 2 - 2) + eps) * g.den_minus) % ell != 0
    report = T3Report(lam_p, target, lam_ok, plus_ok or bool(minus_ok),
                      newform_ap=-eps * p ** (k // 2 - 1), denominator_plus=plus_ok, denominator_minus=minus_ok)
    if not lam_ok:
        logger.info(f"verify_T3: λ_{p} = {format_rational(lam_p)} not ≡ {target} mod {ell}")
        return report
    N = M * p
    n_list = [n for n in sorted(g.eigenvalues) if n > 1 and gcd(n, N) == 1]
    report.targets = {n: reduce_rational(g.eigenvalues[n], ell) for n in n_list}
    space = new_subspace(NewSpaceSpec.create(N, k - 2, RATIONALS, p, {p: eps}, realization=realization))
    if space.dim and n_list:
        polys = restricted_charpolys(space, n_list, realization)
        report.charpolys_mod = _charpolys_mod(polys, ell)
        report.roots = {n: eval_poly_mod(polys[n], report.targets[n], ell) == 0 for n in n_list}
    else:
        report.roots = {n: False for n in n_list}
    logger.info(f"verify_T3 M={M} p={p} k={k} eps={eps} ell={ell}: passed={report.passed}")
    return report
