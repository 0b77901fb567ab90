import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvswap import SqueezerSpec, is_physical, vacuum_state
from cvswap.criteria import partial_transpose
from cvswap.gaussian import combination_variance, quadrature_vector, symplectic_eigenvalues
from cvswap.states import NetworkRecipe, build_epr, build_ghz, correlation_report, network_matrix

s = np.sqrt


def ghz(variant, squeezer):
    return build_ghz(NetworkRecipe.default(variant, squeezer))


def row(terms, n=3):
    return quadrature_vector(n, terms)


class TestNetworkLinearForms:
    """Output combinations written in terms of the squeezer input quadratures."""

    def test_ghz_a(self):
        net = NetworkRecipe.default("ghz_a").network().matrix
        x12 = row([(0, "x", 1), (1, "x", -1)]) @ net
        np.testing.assert_allclose(x12, row([(0, "x", s(3 / 2)), (2, "x", -s(1 / 2))]), atol=1e-12)
        x23 = row([(1, "x", 1), (2, "x", -1)]) @ net
        np.testing.assert_allclose(x23, row([(2, "x", s(2))]), atol=1e-12)
        x13 = row([(0, "x", 1), (2, "x", -1)]) @ net
        np.testing.assert_allclose(x13, row([(0, "x", s(3 / 2)), (2, "x", s(1 / 2))]), atol=1e-12)
        psum = row([(0, "p", 1), (1, "p", 1), (2, "p", 1)]) @ net
        np.testing.assert_allclose(psum, row([(1, "p", s(3))]), atol=1e-12)

    def test_ghz_b(self):
        net = NetworkRecipe.default("ghz_b").network().matrix
        x12 = row([(0, "x", 1), (1, "x", -1)]) @ net
        np.testing.assert_allclose(x12, row([(0, "p", -s(3 / 2)), (2, "x", -s(1 / 2))]), atol=1e-12)
        x13 = row([(0, "x", 1), (2, "x", -1)]) @ net
        np.testing.assert_allclose(x13, row([(0, "p", -s(3 / 2)), (2, "x", s(1 / 2))]), atol=1e-12)
        psum = row([(0, "p", 1), (1, "p", 1), (2, "p", 1)]) @ net
        np.testing.assert_allclose(psum, row([(1, "p", s(3))]), atol=1e-12)


class TestGHZ:
    @pytest.mark.parametrize("variant", ["ghz_a", "ghz_b"])
    def test_pure_correlations(self, variant, pure_026):
        rep = correlation_report(ghz(variant, pure_026), "ghz3")
        for key in ("x1-x2", "x2-x3", "x1-x3"):
            assert rep[key] == pytest.approx(0.52, abs=1e-12)
        assert rep["p1+p2+p3"] == pytest.approx(0.78, abs=1e-12)

    def test_criteria_at_pure_026(self, pure_026):
        rep = correlation_report(ghz("ghz_a", pure_026), "ghz3")
        assert rep["x1-x2"] + rep["p1+p2+p3"] == pytest.approx(1.30, abs=1e-12)
        assert rep["x2-x3"] + rep["p1+p2+p3"] == pytest.approx(1.30, abs=1e-12)

    @pytest.mark.parametrize("variant", ["ghz_a", "ghz_b"])
    def test_no_squeezing_is_boundary(self, variant):
        rep = correlation_report(ghz(variant, SqueezerSpec(1.0, 1.0)), "ghz3")
        assert rep["x1-x2"] == pytest.approx(2.0, abs=1e-12)
        # unit-weight p-sum of three vacua contributes 3, so the combo is 2 + 3
        assert rep["x1-x2"] + rep["p1+p2+p3"] == pytest.approx(5.0, abs=1e-12)

    def test_wrong_pattern(self):
        sq = SqueezerSpec(0.26, 9.64)
        with pytest.raises(ValueError):
            NetworkRecipe("ghz_a", (sq, sq, sq), (1 / 3, 1 / 2))
        with pytest.raises(ValueError):
            NetworkRecipe("ghz_b", (sq,), (1 / 3, 1 / 2))

    def test_epr_recipe_rejected(self):
        with pytest.raises(ValueError):
            build_ghz(NetworkRecipe.default("epr"))

    @given(st.floats(0.0, 2.0))
    def test_a_and_b_agree_and_satisfy_criteria(self, r):
        sq = SqueezerSpec.pure(r)
        ra = correlation_report(ghz("ghz_a", sq), "ghz3")
        rb = correlation_report(ghz("ghz_b", sq), "ghz3")
        for k in ra:
            assert ra[k] == pytest.approx(rb[k], abs=1e-10)
        combos = (ra["x1-x2"] + ra["p1+p2+p3"], ra["x2-x3"] + ra["p1+p2+p3"])
        # 2V + 3V for pure squeezing; below 4 once V < 0.8
        assert combos == pytest.approx((5 * sq.v_sq, 5 * sq.v_sq), abs=1e-10)
        if sq.v_sq < 0.8 - 1e-9:
            assert max(combos) < 4
        assert is_physical(ghz("ghz_a", sq)) and is_physical(ghz("ghz_b", sq))


class TestEPR:
    def test_pure(self, pure_026):
        rep = correlation_report(build_epr(NetworkRecipe.default("epr", pure_026)), "epr")
        assert rep["x1-x2"] == pytest.approx(0.52, abs=1e-12)
        assert rep["p1+p2"] == pytest.approx(0.52, abs=1e-12)

    def test_vacuum_is_separable(self):
        e = build_epr(NetworkRecipe.default("epr", SqueezerSpec(1.0, 1.0)))
        np.testing.assert_allclose(e.cov, np.eye(4), atol=1e-15)
        assert symplectic_eigenvalues(partial_transpose(e.cov, 0))[0] == pytest.approx(1.0, abs=1e-12)

    def test_impure(self, exp_squeezer):
        e = build_epr(NetworkRecipe.default("epr", exp_squeezer))
        assert combination_variance(e, row([(0, "x", 1), (1, "x", -1)], 2)) == pytest.approx(0.52, abs=1e-12)
        assert combination_variance(e, row([(0, "x", 1), (1, "x", 1)], 2)) == pytest.approx(2 * 9.64, abs=1e-12)

    def test_wrong_recipe(self):
        with pytest.raises(ValueError):
            build_epr(NetworkRecipe.default("ghz_a"))


class TestNetworkMatrix:
    def test_ghz_a_first_row(self):
        u, _ = network_matrix("ghz_a")
        np.testing.assert_allclose(u[0], [s(2 / 3), s(1 / 3), 0], atol=1e-15)

    def test_ghz_b_corner(self):
        u, _ = network_matrix("ghz_b")
        assert u[0, 0] == pytest.approx(1j * s(2 / 3))

    @pytest.mark.parametrize("variant", ["ghz_a", "ghz_b"])
    def test_unitary_and_symplectic(self, variant):
        u, sym = network_matrix(variant)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(3), atol=1e-12)
        om = np.kron(np.eye(3), [[0, 1], [-1, 0]])
        np.testing.assert_allclose(sym @ om @ sym.T, om, atol=1e-12)

    def test_unknown(self):
        with pytest.raises(ValueError):
            network_matrix("epr")


def test_vacuum_report():
    rep = correlation_report(vacuum_state(3), "ghz3")
    assert list(rep.values()) == pytest.approx([2, 2, 2, 3])


def test_report_mode_mismatch():
    with pytest.raises(ValueError):
        correlation_report(vacuum_state(2), "ghz3")
