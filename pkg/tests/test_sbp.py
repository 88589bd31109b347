import numpy as np
import pytest

from hyperpoisson.sbp import (
    format_operator,
    gll_operator,
    mass_corner,
    scale_to_element,
)


def sbp_identity_residual(mass_diag, deriv, t_left, t_right):
    md = np.diag(mass_diag) @ deriv
    boundary = np.outer(t_right, t_right) - np.outer(t_left, t_left)
    return np.max(np.abs(md + md.T - boundary))


class TestReferenceOperator:
    @pytest.mark.parametrize("degree", range(1, 9))
    def test_sbp_identity(self, degree):
        op = gll_operator(degree)
        res = sbp_identity_residual(op.mass_diag, op.deriv,
                                    op.boundary_left, op.boundary_right)
        assert res <= 1e-13

    @pytest.mark.parametrize("degree", range(1, 9))
    def test_annihilates_constants(self, degree):
        op = gll_operator(degree)
        assert np.max(np.abs(op.deriv @ np.ones(degree + 1))) <= 1e-13

    @pytest.mark.parametrize("degree", range(1, 9))
    def test_differentiates_monomials(self, degree):
        op = gll_operator(degree)
        for k in range(1, degree + 1):
            err = op.deriv @ op.nodes**k - k * op.nodes ** (k - 1)
            assert np.max(np.abs(err)) <= 1e-12

    @pytest.mark.parametrize("degree", range(1, 9))
    def test_total_mass(self, degree):
        op = gll_operator(degree)
        assert abs(op.mass_diag.sum() - 2.0) <= 1e-13

    @pytest.mark.parametrize("degree", range(1, 9))
    def test_quadrature_exactness(self, degree):
        # GLL rule integrates monomials exactly up to degree 2p - 1
        op = gll_operator(degree)
        for k in range(2 * degree):
            exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
            assert abs(op.mass_diag @ op.nodes**k - exact) <= 1e-12

    def test_node_layout(self):
        for degree in (1, 4, 7, 12):
            op = gll_operator(degree)
            assert op.nodes[0] == -1.0 and op.nodes[-1] == 1.0
            assert np.all(np.diff(op.nodes) > 0)
            assert np.all(op.mass_diag > 0)


class TestKnownOperators:
    def test_degree_1(self):
        op = gll_operator(1)
        assert np.allclose(op.nodes, [-1.0, 1.0], atol=0)
        assert np.allclose(op.mass_diag, [1.0, 1.0], atol=0)
        assert np.allclose(op.deriv, [[-0.5, 0.5], [-0.5, 0.5]], atol=1e-15)

    def test_degree_2_weights_against_moment_solve(self):
        # independent oracle: weights from the moment conditions on the
        # known nodes, then checked exact through degree 2p - 1 = 3
        nodes = np.array([-1.0, 0.0, 1.0])
        vander = np.vander(nodes, 3, increasing=True).T
        moments = np.array([2.0, 0.0, 2.0 / 3.0])
        weights = np.linalg.solve(vander, moments)
        assert abs(weights @ nodes**3 - 0.0) <= 1e-15
        op = gll_operator(2)
        assert np.allclose(op.nodes, nodes, atol=1e-15)
        assert np.allclose(op.mass_diag, weights, atol=1e-15)
        assert np.allclose(op.mass_diag, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)

    def test_degree_3_nodes_against_bisection(self):
        # interior nodes are the roots of P_3'(x) = (15 x^2 - 3) / 2
        def dp3(x):
            return 7.5 * x * x - 1.5

        lo, hi = 0.1, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if dp3(lo) * dp3(mid) <= 0:
                hi = mid
            else:
                lo = mid
        root = 0.5 * (lo + hi)
        assert abs(root - 1 / np.sqrt(5)) <= 1e-14
        op = gll_operator(3)
        assert np.allclose(op.nodes, [-1.0, -root, root, 1.0], atol=1e-14)
        assert np.allclose(op.mass_diag, [1 / 6, 5 / 6, 5 / 6, 1 / 6],
                           atol=1e-15)

    @pytest.mark.parametrize("degree", [0, -2, 13])
    def test_rejects_bad_degree(self, degree):
        with pytest.raises(ValueError):
            gll_operator(degree)

    def test_rejects_non_integer_degree(self):
        with pytest.raises(TypeError):
            gll_operator(2.5)


class TestScaledOperator:
    @pytest.mark.parametrize("degree", range(1, 9))
    @pytest.mark.parametrize("length", [0.1, 1.0, 2.7])
    def test_scaled_invariants(self, degree, length):
        op = gll_operator(degree)
        scaled = scale_to_element(op, 0.3, 0.3 + length)
        res = sbp_identity_residual(scaled.mass_diag, scaled.deriv,
                                    op.boundary_left, op.boundary_right)
        assert res <= 1e-13
        assert abs(scaled.mass_diag.sum() - length) <= 1e-13
        assert np.max(np.abs(scaled.deriv @ np.ones(degree + 1))) <= 1e-13
        nodes = 0.3 + 0.5 * length * (op.nodes + 1.0)
        for k in range(1, degree + 1):
            err = scaled.deriv @ nodes**k - k * nodes ** (k - 1)
            assert np.max(np.abs(err)) <= 1e-12 * max(1.0, np.max(nodes**k))

    def test_identity_scaling(self):
        scaled = scale_to_element(gll_operator(1), 0.0, 2.0)
        assert np.allclose(scaled.deriv, [[-0.5, 0.5], [-0.5, 0.5]], atol=0)
        assert np.allclose(scaled.mass_diag, [1.0, 1.0], atol=0)

    def test_halving(self):
        scaled = scale_to_element(gll_operator(1), 0.0, 1.0)
        assert np.allclose(scaled.deriv, [[-1.0, 1.0], [-1.0, 1.0]], atol=0)
        assert np.allclose(scaled.mass_diag, [0.5, 0.5], atol=0)

    def test_quarter_length_corner_mass(self):
        scaled = scale_to_element(gll_operator(2), 0.0, 0.5)
        assert abs(scaled.mass_diag[0] - 1.0 / 12.0) <= 1e-16

    def test_degenerate_element_rejected(self):
        op = gll_operator(2)
        with pytest.raises(ValueError):
            scale_to_element(op, 1.0, 1.0)
        with pytest.raises(ValueError):
            scale_to_element(op, 2.0, 1.0)


class TestMassCorner:
    def test_known_values(self):
        assert mass_corner(scale_to_element(gll_operator(2), 0, 2), "left") == 3.0
        assert mass_corner(scale_to_element(gll_operator(1), 0, 1), "right") == 2.0
        assert abs(mass_corner(scale_to_element(gll_operator(3), 0, 2), "left")
                   - 6.0) <= 1e-12

    def test_positive_both_sides(self):
        scaled = scale_to_element(gll_operator(4), -0.2, 1.7)
        assert mass_corner(scaled, "left") > 0
        assert mass_corner(scaled, "right") > 0

    def test_bad_side(self):
        with pytest.raises(ValueError):
            mass_corner(scale_to_element(gll_operator(1), 0, 1), "top")


def test_format_operator_dump():
    text = format_operator(gll_operator(2))
    lines = text.splitlines()
    assert lines[0] == "GLL SBP operator, degree 2"
    assert len(lines) == 4 + 3  # header, nodes, mass, "deriv:", 3 rows
