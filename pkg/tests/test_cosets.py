"""
Unit tests for cosets
"""

import pytest

from app.cosets import (
    DELTA, IDENTITY, S, T, U, CosetLabel, IntMatrix2, act, canonical, delta_conj, fiber,
    fricke_matrix, identity_coset, label_index, lift, proj_line, project, psi,
)


class TestIntMatrix2:
    """Tests for 2×2 integer matrices."""

    def test_generator_orders(self):
        assert S @ S == -IDENTITY
        assert U @ U @ U == -IDENTITY

    def test_u_is_t_times_s(self):
        assert T @ S == U

    def test_inverse(self):
        M = IntMatrix2(2, 1, 3, 2)
        assert M @ M.inverse() == IDENTITY

    def test_inverse_of_non_unimodular_raises(self):
        with pytest.raises(ValueError, match="SL2"):
            IntMatrix2(2, 0, 0, 1).inverse()

    def test_power_negative(self):
        assert T.power(-3) == IntMatrix2(1, -3, 0, 1)

    def test_sign_normalized(self):
        assert IntMatrix2(0, -1, 1, 0).sign_normalized() == IntMatrix2(0, 1, -1, 0)

    def test_fricke_det(self):
        assert fricke_matrix(7).det == 7


class TestProjectiveLine:
    """Tests for P¹(ℤ/N) enumeration."""

    @pytest.mark.parametrize("N,expected", [(1, 1), (2, 3), (7, 8), (12, 24), (14, 24), (19, 20)])
    def test_psi(self, N, expected):
        assert psi(N) == expected
        assert len(proj_line(N)) == expected

    def test_labels_sorted_and_indexed(self):
        labels = proj_line(14)
        assert list(labels) == sorted(labels)
        assert [label_index(A) for A in labels] == list(range(len(labels)))

    def test_canonical_scalar_invariant(self):
        assert canonical(2, 2, 7) == canonical(1, 1, 7)
        assert canonical(3, 6, 7) == canonical(1, 2, 7)

    def test_canonical_rejects_non_point(self):
        with pytest.raises(ValueError):
            canonical(2, 4, 14)

    def test_identity_coset(self):
        assert identity_coset(7) == CosetLabel(7, 0, 1)

    def test_parse(self):
        assert CosetLabel.parse("2:2@7") == canonical(1, 1, 7)
        assert CosetLabel.parse("1:3", 7) == canonical(1, 3, 7)

    def test_parse_without_level_raises(self):
        with pytest.raises(ValueError, match="no level"):
            CosetLabel.parse("1:1")


class TestActions:
    """Tests for the right action and level change."""

    @pytest.mark.parametrize("N", [1, 7, 12, 14])
    def test_lift_is_representative(self, N):
        for A in proj_line(N):
            g = lift(A)
            assert g.det == 1
            assert canonical(g.c, g.d, N) == A

    def test_act_permutes(self):
        labels = proj_line(7)
        assert sorted(act(A, S) for A in labels) == list(labels)
        assert sorted(act(A, U) for A in labels) == list(labels)

    def test_act_matches_lift(self):
        for A in proj_line(14):
            g = lift(A) @ T
            assert act(A, T) == canonical(g.c, g.d, 14)

    def test_act_requires_det_one(self):
        with pytest.raises(ValueError, match="det 1"):
            act(identity_coset(7), IntMatrix2(2, 0, 0, 1))

    def test_delta_conj_involution(self):
        for A in proj_line(14):
            assert delta_conj(delta_conj(A)) == A
        g = DELTA @ IntMatrix2(1, 0, 3, 1) @ DELTA
        assert delta_conj(canonical(3, 1, 7)) == canonical(g.c, g.d, 7)

    def test_fiber_sizes(self):
        """Fibers of P¹(ℤ/14) → P¹(ℤ/7) have p+1 = 3 points."""
        for C in proj_line(7):
            points = fiber(C, 14)
            assert len(points) == 3
            assert all(project(A, 7) == C for A in points)

    def test_project_requires_divisor(self):
        with pytest.raises(ValueError, match="does not divide"):
            project(identity_coset(14), 3)
