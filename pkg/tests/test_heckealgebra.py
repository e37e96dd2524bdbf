"""
Unit tests for heckealgebra
"""

import pytest

from app.cosets import IDENTITY, S, IntMatrix2, canonical, fricke_matrix, identity_coset, sigma_matrix
from app.exactlinalg import RATIONALS, charpoly, equal, finite_field, identity
from app.heckealgebra import (
    ONE_MINUS_S, ONE_PLUS_S, DoubleCosetSpec, FormalMatrixSum, act_sigma, al_matrix, atkin_lehner_matrix,
    check_exact_divisor, configure_solver, continued_fraction_element, coset_reps_infty, cz_defect,
    decompose, delta_restricted, eq_star_check, hecke_element, hecke_matrix, is_hecke_element,
    second_realization, sigma_operator, solve_hecke_element, t_infinity,
)
from app.exactmath import sigma
from app.periodspace import build_W, satisfies_relations


class TestFormalMatrixSum:
    """Tests for formal sums of integer matrices modulo ±1."""

    def test_sign_merge(self):
        total = FormalMatrixSum.from_items(1, [(S, 1), (-S, 1)])
        assert total.as_dict() == {S.sign_normalized(): 2}

    def test_add_cancels(self):
        assert (ONE_MINUS_S + ONE_PLUS_S).as_dict() == {IDENTITY: 2}

    def test_product_kills_s_squared(self):
        """(1-S)(1+S) = 1 - S² = 0 since S² = -1."""
        assert (ONE_MINUS_S * ONE_PLUS_S).is_zero()

    def test_determinant_checked(self):
        with pytest.raises(ValueError, match="determinant"):
            FormalMatrixSum.from_items(2, [(IDENTITY, 1)])

    def test_mismatched_add_raises(self):
        with pytest.raises(ValueError):
            ONE_MINUS_S + t_infinity(2)

    def test_to_json(self):
        data = FormalMatrixSum.of(sigma_matrix(2)).to_json()
        assert data == [{"matrix": [2, 0, 0, 1], "coeff": 1}]


class TestHeckeElements:
    """Tests for Hecke elements and the relation check."""

    @pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (4, 7), (6, 12)])
    def test_coset_reps_count(self, n, count):
        assert len(coset_reps_infty(n)) == count

    @pytest.mark.parametrize("realization", ["ceil", "nearest"])
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 11])
    def test_chains_satisfy_relation(self, n, realization):
        element = continued_fraction_element(n, realization)
        assert cz_defect(element, n) == {}
        assert is_hecke_element(element, n)

    def test_wrong_determinant_is_not_hecke(self):
        assert not is_hecke_element(t_infinity(2), 3)

    def test_cached_element(self):
        assert hecke_element(5) is hecke_element(5)

    def test_unknown_realization_raises(self):
        with pytest.raises(ValueError, match="realization"):
            hecke_element(2, "floor")

    def test_solver(self):
        element = solve_hecke_element(2)
        assert is_hecke_element(element, 2)

    def test_second_realization_is_valid(self):
        assert is_hecke_element(second_realization(3), 3)

    def test_configure_solver_rejects_zero(self):
        with pytest.raises(ValueError):
            configure_solver(0)


class TestDoubleCosets:
    """Tests for double coset membership and decomposition."""

    def test_exact_divisor(self):
        check_exact_divisor(2, 14)
        with pytest.raises(ValueError, match="exact divisor"):
            check_exact_divisor(2, 4)

    def test_hecke_needs_coprime(self):
        with pytest.raises(ValueError, match="gcd"):
            DoubleCosetSpec.hecke(7, 7)

    def test_fricke_matrix(self):
        assert al_matrix(7, 7) == fricke_matrix(7)

    @pytest.mark.parametrize("Q,N", [(2, 14), (7, 14), (5, 35), (7, 7)])
    def test_al_matrix_in_theta(self, Q, N):
        w = al_matrix(Q, N)
        assert w.det == Q
        assert DoubleCosetSpec.atkin_lehner(Q, N).contains(w)

    def test_decompose_hecke_identity(self):
        spec = DoubleCosetSpec.hecke(2, 7)
        assert decompose(IntMatrix2(1, 0, 0, 2), identity_coset(7), spec) == identity_coset(7)

    def test_decompose_sigma_n_identity(self):
        """σ_N at the identity coset lands on (1:0)."""
        spec = DoubleCosetSpec.atkin_lehner(7, 7)
        assert decompose(sigma_matrix(7), identity_coset(7), spec) == canonical(1, 0, 7)

    def test_decompose_fricke_identity(self):
        spec = DoubleCosetSpec.atkin_lehner(7, 7)
        assert decompose(fricke_matrix(7), identity_coset(7), spec) == identity_coset(7)

    def test_decompose_det_mismatch_raises(self):
        with pytest.raises(ValueError, match="does not match"):
            decompose(IntMatrix2(1, 0, 0, 3), identity_coset(7), DoubleCosetSpec.hecke(2, 7))

    @pytest.mark.parametrize("spec", [
        DoubleCosetSpec.hecke(2, 7),
        DoubleCosetSpec.hecke(3, 14),
        DoubleCosetSpec.atkin_lehner(7, 7),
        DoubleCosetSpec.atkin_lehner(2, 14),
        DoubleCosetSpec.atkin_lehner(7, 14),
    ])
    def test_eq_star(self, spec):
        report = eq_star_check(spec)
        assert report.ok
        assert report.gamma_cosets == report.sl2_cosets


class TestOperators:
    """Tests for Hecke and Atkin-Lehner matrices on W_w(N)."""

    def test_ramanujan_charpoly(self):
        """T_2 on W_10(1) has roots 2049, -24, -24."""
        H = hecke_matrix(1, 10, RATIONALS, 2)
        assert charpoly(H) == [1, -2001, -97776, -1180224]

    def test_level_7_roots(self):
        H = hecke_matrix(7, 4, RATIONALS, 2)
        poly = charpoly(H)
        value = lambda x: sum(c * x ** (len(poly) - 1 - i) for i, c in enumerate(poly))
        assert value(33) == 0
        assert value(-10) == 0

    def test_act_sigma_on_eisenstein_class(self):
        """The even Eisenstein class is a T_2 eigenvector with eigenvalue σ_5(2)."""
        from app.eisenstein import EpsSystem, eis_plus
        P = eis_plus(7, EpsSystem.uniform(7, 1), 4)
        image = act_sigma(P, DoubleCosetSpec.hecke(2, 7), hecke_element(2))
        assert (image - P.scale(33)).is_zero()

    def test_act_sigma_level_mismatch(self):
        from app.eisenstein import p_zero
        with pytest.raises(ValueError, match="does not match"):
            act_sigma(p_zero(1, 4), DoubleCosetSpec.hecke(2, 7), hecke_element(2))

    def test_commutes_with_delta(self):
        H = hecke_matrix(7, 4, RATIONALS, 2)
        D = delta_restricted(7, 4, RATIONALS)
        assert equal(H * D, D * H)

    def test_hecke_operators_commute(self):
        T3 = hecke_matrix(14, 2, RATIONALS, 3)
        T5 = hecke_matrix(14, 2, RATIONALS, 5)
        assert equal(T3 * T5, T5 * T3)

    @pytest.mark.parametrize("N,w,Q", [(7, 2, 7), (7, 4, 7), (14, 2, 2), (14, 2, 7), (14, 4, 14)])
    def test_al_involution(self, N, w, Q):
        A = atkin_lehner_matrix(N, w, RATIONALS, Q)
        assert equal(A * A, identity(A.shape[0], RATIONALS))

    def test_al_commutes_with_hecke(self):
        A = atkin_lehner_matrix(7, 4, RATIONALS, 7)
        H = hecke_matrix(7, 4, RATIONALS, 2)
        assert equal(A * H, H * A)

    def test_al_not_invertible_mod_q(self):
        with pytest.raises(ValueError, match="not invertible"):
            atkin_lehner_matrix(7, 4, finite_field(7), 7)

    def test_realizations_agree(self):
        """Two independent T̃_2 give the same operator on W."""
        W = build_W(7, 4, RATIONALS)
        spec = DoubleCosetSpec.hecke(2, 7)
        first = W.restrict(sigma_operator(7, 4, RATIONALS, spec, hecke_element(2, "ceil")))
        nearest = W.restrict(sigma_operator(7, 4, RATIONALS, spec, hecke_element(2, "nearest")))
        shifted = W.restrict(sigma_operator(7, 4, RATIONALS, spec, second_realization(2)))
        assert equal(first, nearest)
        assert equal(first, shifted)

    def test_unverified_sum_rejected(self):
        with pytest.raises(ValueError, match="relation"):
            sigma_operator(7, 4, RATIONALS, DoubleCosetSpec.hecke(2, 7), FormalMatrixSum.of(sigma_matrix(2)))


def _first_coprime_prime(N):
    return next(q for q in (2, 3, 5, 7) if N % q)


class TestOperatorGrid:
    """Operator identities over a grid of levels and weights."""

    @pytest.mark.parametrize("N", [1, 5, 7, 14, 19])
    @pytest.mark.parametrize("w", [2, 4, 8, 10])
    def test_act_sigma_preserves_W(self, N, w):
        n = _first_coprime_prime(N)
        spec = DoubleCosetSpec.hecke(n, N)
        element = hecke_element(n)
        for P in build_W(N, w, RATIONALS).elements():
            assert satisfies_relations(act_sigma(P, spec, element))

    @pytest.mark.parametrize("N,n", [(N, n) for N in (1, 5, 7, 14) for n in (2, 3, 5) if N % n])
    def test_eisenstein_eigenvalue(self, N, n):
        """P⁺(E) is a T̃_n-eigenvector with eigenvalue σ_{w+1}(n)."""
        from app.eisenstein import EpsSystem, eis_plus
        w = 4
        P = eis_plus(N, EpsSystem.uniform(N, 1), w)
        image = act_sigma(P, DoubleCosetSpec.hecke(n, N), hecke_element(n))
        assert (image - P.scale(sigma(n, w + 1))).is_zero()

    @pytest.mark.parametrize("w", [2, 4])
    def test_atkin_lehner_commute_and_compose(self, w):
        """On W_w(14), A_2 and A_7 commute and their product is A_14."""
        A2 = atkin_lehner_matrix(14, w, RATIONALS, 2)
        A7 = atkin_lehner_matrix(14, w, RATIONALS, 7)
        A14 = atkin_lehner_matrix(14, w, RATIONALS, 14)
        assert equal(A2 * A7, A7 * A2)
        assert equal(A2 * A7, A14)
