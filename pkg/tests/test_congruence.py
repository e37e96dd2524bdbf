"""
Unit tests for congruence
"""

import random
from dataclasses import replace

import pytest
from fractions import Fraction

from app.congruence import (
    EigenData, NewSpaceSpec, al_power_coeffs, al_power_divisor, eigensystem_roots, new_subspace,
    rational_newform_eigendata, verify_T1, verify_T2, verify_T3,
)
from app.cosets import canonical, identity_coset
from app.eisenstein import EpsSystem, eis_plus
from app.exactlinalg import RATIONALS, Subspace, finite_field
from app.periodspace import build_W
from app.reference_data import EXAMPLE_5_1, EXAMPLE_5_3, T2_CASES


@pytest.fixture(scope="module")
def g_7_6():
    """Rational newform of level 7, weight 6 with λ₂ = -10."""
    return rational_newform_eigendata(7, 6, (2, -10))


class TestNewSubspace:
    """Tests for p-new subspaces."""

    def test_spec_requires_divisor(self):
        with pytest.raises(ValueError, match="does not divide"):
            NewSpaceSpec.create(7, 4, RATIONALS, 5)

    def test_spec_requires_exact_divisor_for_signs(self):
        with pytest.raises(ValueError, match="exact divisor"):
            NewSpaceSpec.create(14, 2, RATIONALS, 2, {4: 1})

    def test_spec_rejects_small_ell(self):
        with pytest.raises(ValueError, match="ell"):
            NewSpaceSpec.create(7, 4, finite_field(7), 7)

    def test_spec_rejects_bad_parity(self):
        with pytest.raises(ValueError, match="Parity"):
            NewSpaceSpec.create(7, 4, RATIONALS, 7, parity=2)

    def test_new_at_level_7(self):
        """Two copies of the one-dimensional W_4(1) are old, leaving 2·dim S_6(7)^new = 6."""
        space = new_subspace(NewSpaceSpec.create(7, 4, RATIONALS, 7))
        assert space.dim == 6

    def test_new_subspace_excludes_eisenstein(self):
        for sign in (1, -1):
            space = new_subspace(NewSpaceSpec.create(7, 4, RATIONALS, 7))
            assert not space.contains_poly(eis_plus(7, EpsSystem.uniform(7, sign), 4))

    def test_parity_and_sign_cut_down(self):
        full = new_subspace(NewSpaceSpec.create(7, 4, RATIONALS, 7))
        plus = new_subspace(NewSpaceSpec.create(7, 4, RATIONALS, 7, parity=1))
        signed = new_subspace(NewSpaceSpec.create(7, 4, RATIONALS, 7, {7: 1}, parity=1))
        assert plus.dim == 3
        assert signed.dim <= plus.dim <= full.dim


class TestEigensystemRoots:
    """Tests for characteristic-polynomial root checks."""

    def test_ramanujan(self):
        W = build_W(1, 10, RATIONALS)
        assert eigensystem_roots(W, [2], 691, {2: 2049}) == {2: True}
        assert eigensystem_roots(W, [2], 691, {2: 5}) == {2: False}

    def test_zero_space_is_false(self):
        W = build_W(7, 2, RATIONALS)
        zero = W.sub(Subspace.zero(W.ambient_dim, RATIONALS))
        assert eigensystem_roots(zero, [2, 3], 11, {2: 0, 3: 0}) == {2: False, 3: False}

    def test_mod_ell_space_rejected(self):
        W = build_W(7, 2, finite_field(11))
        with pytest.raises(ValueError, match="over Q"):
            eigensystem_roots(W, [2], 5, {2: 0})


class TestEigenData:
    """Tests for rational eigensystems read off the period space."""

    def test_level_7_weight_6(self, g_7_6):
        data = EXAMPLE_5_3
        assert {n: g_7_6.eigenvalues[n] for n in (2, 3, 5)} == data["g_eigenvalues"]
        assert g_7_6.al_signs == {7: data["g_al_sign"]}
        assert g_7_6.den == data["g_den"]

    def test_normalized_components(self, g_7_6):
        assert g_7_6.components[identity_coset(7)] == (1, 0, 0, 0, -49)
        assert g_7_6.components[canonical(1, 1, 7)] == (49, 0, 0, 0, -49)

    def test_all_listed_components(self, g_7_6):
        for (c, d), coeffs in EXAMPLE_5_3["g_components"].items():
            assert g_7_6.components[canonical(c, d, 7)] == coeffs

    def test_delta(self):
        data = rational_newform_eigendata(1, 12, (2, -24), n_list=(2, 3))
        assert data.eigenvalues[3] == 252

    def test_ambiguous_selector_raises(self):
        with pytest.raises(ValueError, match="dimension"):
            rational_newform_eigendata(7, 6, (2, 1))

    def test_lambda_one_fixed(self):
        with pytest.raises(ValueError):
            EigenData(1, 12, {1: Fraction(2)})

    def test_to_json(self, g_7_6):
        payload = g_7_6.to_json()
        assert payload["eigenvalues"]["2"] == "-10"
        assert payload["den"] == 2
        assert payload["den_minus"] == g_7_6.den_minus

    def test_odd_class_normalized(self, g_7_6):
        """P⁻(g) has X-coefficient 1 at the identity coset and no even-degree terms."""
        ident = g_7_6.minus_components[identity_coset(7)]
        assert ident[1] == 1
        assert ident[0] == ident[2] == ident[4] == 0
        assert isinstance(g_7_6.den_minus, int) and g_7_6.den_minus >= 1

    def test_odd_parity_selection(self, g_7_6):
        data = rational_newform_eigendata(7, 6, (2, -10), parity=-1)
        assert data.den is None
        assert data.den_minus == g_7_6.den_minus
        assert data.components[identity_coset(7)] == g_7_6.minus_components[identity_coset(7)]
        assert data.eigenvalues[2] == -10

    def test_bad_parity_raises(self):
        with pytest.raises(ValueError, match="parity"):
            rational_newform_eigendata(7, 6, (2, -10), parity=0)


class TestAtkinLehnerPowers:
    """Tests for the stabilized coefficient identity."""

    def test_first_power(self):
        stabilized, newform = al_power_coeffs(-10, -1, 6, 1, 2)
        assert stabilized - newform == al_power_divisor(-10, -1, 6, 2)

    def test_divisor_value(self):
        assert al_power_divisor(-10, -1, 6, 2) == -22

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_divisibility(self, m):
        rng = random.Random(20 + m)
        for _ in range(20):
            lam = rng.randint(-500, 500)
            for eps in (1, -1):
                stabilized, newform = al_power_coeffs(lam, eps, 6, m, 2)
                divisor = al_power_divisor(lam, eps, 6, 2)
                if divisor:
                    assert (stabilized - newform) % divisor == 0

    def test_m_zero_raises(self):
        with pytest.raises(ValueError):
            al_power_coeffs(1, 1, 6, 0, 2)


class TestVerifyT1:
    """Tests for the Eisenstein congruence at prime level."""

    def test_level_19(self):
        data = EXAMPLE_5_1
        report = verify_T1(data["k"], data["p"], data["eps"], data["ell"])
        assert report.conditions.ok
        assert report.membership is True
        assert report.nonzero is True
        assert report.roots == {2: True, 3: True, 5: True}
        assert report.passed

    def test_newform_matches_targets(self):
        data = EXAMPLE_5_1
        for n, target in data["eisenstein_targets"].items():
            assert (data["newform"][n] - target) % data["ell"] == 0

    def test_level_7_mod_43(self):
        report = verify_T1(6, 7, 1, 43)
        assert report.passed
        assert report.targets == {2: 33, 3: 244 % 43, 5: 3126 % 43}

    def test_failed_conditions_are_reported(self):
        report = verify_T1(6, 19, 1, 11)
        assert not report.passed
        assert report.membership is None
        assert report.roots == {}


class TestVerifyT2:
    """Tests for surjectivity of reduction on p-new subspaces."""

    @pytest.mark.parametrize("case", T2_CASES, ids=lambda c: f"N{c['N']}-w{c['w']}-ell{c['ell']}")
    def test_anomaly(self, case):
        report = verify_T2(case["N"], case["p"], case["w"], case["ell"])
        assert report.anomaly == case["anomaly"]
        assert report.passed
        assert report.surjective == (case["anomaly"] == 0)

    def test_not_exact_divisor_raises(self):
        with pytest.raises(ValueError, match="exactly divide"):
            verify_T2(7, 2, 2, 11)

    def test_ell_dividing_level_raises(self):
        with pytest.raises(ValueError, match="ell"):
            verify_T2(14, 2, 4, 7)


class TestVerifyT3:
    """Tests for level raising of the level 7 newform."""

    def test_raise_to_level_14(self, g_7_6):
        raise_data = EXAMPLE_5_3["raise"]
        report = verify_T3(raise_data["M"], raise_data["p"], raise_data["k"], raise_data["eps"],
                           raise_data["ell"], g_7_6)
        assert report.lambda_target == 12
        assert report.lambda_congruence
        assert report.denominator_condition
        assert report.roots == {3: True, 5: True}
        assert report.newform_ap == 4
        assert report.passed

    def test_odd_denominator_suffices(self, g_7_6):
        """ℓ dividing den P⁺(g) is allowed when (p^{k/2-2}+ε)·den P⁻(g) is prime to ℓ."""
        g = replace(g_7_6, den=11, den_minus=1)
        report = verify_T3(7, 2, 6, -1, 11, g)
        assert report.denominator_plus is False
        assert report.denominator_minus is True
        assert report.denominator_condition
        assert report.passed

    def test_both_denominators_divisible(self, g_7_6):
        g = replace(g_7_6, den=11, den_minus=11)
        report = verify_T3(7, 2, 6, -1, 11, g)
        assert report.denominator_minus is False
        assert not report.denominator_condition
        assert not report.passed

    def test_even_denominator_alone(self, g_7_6):
        report = verify_T3(7, 2, 6, -1, 11, replace(g_7_6, den_minus=None))
        assert report.denominator_plus is True
        assert report.denominator_minus is None
        assert report.denominator_condition

    def test_raised_newform_coefficients(self):
        f = EXAMPLE_5_3["raised_newform"]
        assert (f[3] - (-14)) % 11 == 0
        assert (f[5] - (-56)) % 11 == 0

    def test_failing_lambda_congruence(self, g_7_6):
        report = verify_T3(7, 2, 6, -1, 13, g_7_6)
        assert not report.lambda_congruence
        assert not report.passed
        assert report.roots == {}

    def test_p_dividing_m_raises(self, g_7_6):
        with pytest.raises(ValueError, match="must not divide"):
            verify_T3(7, 7, 6, -1, 11, g_7_6)

    def test_ell_k_plus_one_raises(self, g_7_6):
        with pytest.raises(ValueError, match="ell"):
            verify_T3(7, 2, 6, -1, 7, g_7_6)

    def test_level_mismatch_raises(self, g_7_6):
        with pytest.raises(ValueError, match="Eigendata"):
            verify_T3(5, 2, 6, -1, 11, g_7_6)
