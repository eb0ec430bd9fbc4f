import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import weighted_complexes
from hdxwalk.cochains import Cochain, inner_product, norm
from hdxwalk.errors import DimensionError, UndefinedRatioError
from hdxwalk.operators import (
    assemble_codifferential,
    assemble_differential,
    assemble_lower_walk,
    assemble_nonlazy_upper,
    assemble_upper_laplacian,
    assemble_upper_walk,
    bound_from_differential_norm,
    dump_operator,
    operator,
    verify_factorizations,
)


def _all_ks(m, lo, hi_offset):
    return range(lo, m.n + hi_offset)


class TestUpperWalk:
    def test_triangle(self, triangle):
        M = assemble_upper_walk(triangle[1], 0)
        D = M.dense()
        assert np.allclose(np.diag(D), 0.5)
        assert np.allclose(D[~np.eye(3, dtype=bool)], 0.25)
        assert np.allclose(M.eigenvalues(), [0.25, 0.25, 1.0])

    def test_k4_edges(self, k4):
        X, m = k4
        D = assemble_upper_walk(m, 1).dense()
        e01, e23 = X.index((0, 1)), X.index((2, 3))
        assert D[e01, e01] == pytest.approx(1 / 3)
        assert D[e01, e23] == 0.0
        neighbours = [X.index(e) for e in [(0, 2), (0, 3), (1, 2), (1, 3)]]
        assert np.allclose(D[e01, neighbours], 1 / 6)
        ev = assemble_upper_walk(m, 1).eigenvalues()
        assert np.allclose(ev, [0, 0, 1 / 3, 1 / 3, 1 / 3, 1], atol=1e-12)

    def test_range(self, k4):
        with pytest.raises(DimensionError):
            assemble_upper_walk(k4[1], 2)
        with pytest.raises(DimensionError):
            assemble_upper_walk(k4[1], -1)

    def test_fixes_constants(self, random93):
        m = random93[1]
        for k in range(3):
            one = Cochain.constant(m, k)
            assert np.allclose(assemble_upper_walk(m, k)(one).values, 1.0, atol=1e-12)


class TestLowerWalk:
    def test_k0_is_projection(self, random12):
        m = random12[1]
        D = assemble_lower_walk(m, 0).dense()
        expect = np.tile(m.of(0) / m[()], (D.shape[0], 1))
        assert np.allclose(D, expect, atol=1e-15)
        assert np.allclose(D @ D, D, atol=1e-14)

    def test_triangle_k1_rows(self, triangle):
        D = assemble_lower_walk(triangle[1], 1).dense()
        assert np.allclose(D.sum(axis=1), 1.0, atol=1e-12)

    def test_triangle_dd_star(self, triangle, rng):
        m = triangle[1]
        d, ds = assemble_differential(m, 0), assemble_codifferential(m, 0)
        Mm = assemble_lower_walk(m, 1)
        for _ in range(10):
            phi = Cochain.random(m, 1, rng)
            assert np.allclose(d(ds(phi)).values, 2 * Mm(phi).values, atol=1e-12)

    def test_top_dimension_allowed(self, k4):
        D = assemble_lower_walk(k4[1], 2).dense()
        assert np.allclose(D.sum(axis=1), 1.0, atol=1e-12)


class TestNonLazy:
    def test_k0_weighted_adjacency(self, random12):
        X, m = random12
        D = assemble_nonlazy_upper(m, 0).dense()
        for e in X.faces(1)[:20]:
            u, v = X.index((e[0],)), X.index((e[1],))
            assert D[u, v] == pytest.approx(m[e] / m[(e[0],)])

    def test_triangle_spectrum(self, triangle):
        assert np.allclose(assemble_nonlazy_upper(triangle[1], 0).eigenvalues(), [-0.5, -0.5, 1.0])

    def test_affine_combination_exact_diagonal(self, complete73):
        m = complete73[1]
        for k in range(3):
            Mp = assemble_upper_walk(m, k).dense()
            Mn = assemble_nonlazy_upper(m, k).dense()
            assert np.all(np.diag(Mn) == 0.0)
            assert np.allclose(Mn, ((k + 2) * Mp - np.eye(len(Mp))) / (k + 1), atol=1e-15)
            one = Cochain.constant(m, k)
            assert np.allclose(assemble_nonlazy_upper(m, k)(one).values, 1.0, atol=1e-12)

    def test_laplacian_relation(self, random12):
        m = random12[1]
        L = assemble_upper_laplacian(m, 0).dense()
        assert np.allclose(L, np.eye(len(L)) - assemble_nonlazy_upper(m, 0).dense())


class TestDifferentials:
    def test_shapes(self, random93):
        X, m = random93
        for k in range(-1, X.n):
            assert assemble_differential(m, k).shape == (X.size(k + 1), X.size(k))
            assert assemble_codifferential(m, k).shape == (X.size(k), X.size(k + 1))

    def test_constants(self, complete73):
        m = complete73[1]
        for k in range(-1, 3):
            d1 = assemble_differential(m, k)(Cochain.constant(m, k))
            assert np.allclose(d1.values, k + 2)
            ds1 = assemble_codifferential(m, k)(Cochain.constant(m, k + 1))
            assert np.allclose(ds1.values, 1.0)

    def test_entries(self, k4):
        X, m = k4
        d = assemble_differential(m, 0).dense()
        assert set(np.unique(d)) == {0.0, 1.0}
        ds = assemble_codifferential(m, 0).dense()
        assert ds[X.index((0,)), X.index((0, 1))] == pytest.approx(m[(0, 1)] / m[(0,)])

    def test_triangle_hand_evaluation(self, triangle, rng):
        m = triangle[1]
        phi = Cochain.random(m, 0, rng)
        lhs = assemble_codifferential(m, 0)(assemble_differential(m, 0)(phi)).values
        p = phi.values
        expect = np.array([p[0] + (p[1] + p[2]) / 2, p[1] + (p[0] + p[2]) / 2, p[2] + (p[0] + p[1]) / 2])
        assert np.allclose(lhs, expect)
        assert np.allclose(lhs, 2 * assemble_upper_walk(m, 0)(phi).values)

    @given(weighted_complexes(), st.integers(0, 2**32 - 1))
    def test_adjoint(self, built, seed):
        X, m = built
        r = np.random.default_rng(seed)
        k = int(r.integers(-1, X.n))
        phi, psi = Cochain.random(m, k, r), Cochain.random(m, k + 1, r)
        lhs = inner_product(assemble_differential(m, k)(phi), psi)
        rhs = inner_product(phi, assemble_codifferential(m, k)(psi))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, norm(phi) * norm(psi) * (k + 2))

    def test_dispatch(self, k4):
        assert operator(k4[1], "d", 0).kind == "d"
        with pytest.raises(ValueError):
            operator(k4[1], "sideways", 0)


class TestFactorizations:
    @pytest.mark.parametrize("name", ["triangle", "k4", "complete62", "complete73", "random12", "random93"])
    def test_fixtures(self, name, request):
        m = request.getfixturevalue(name)[1]
        for k in range(m.n + 1):
            rep = verify_factorizations(m, k)
            assert rep.max_residual() <= 1e-12
            assert (rep.upper is None) == (k == m.n)

    @given(weighted_complexes())
    def test_random(self, built):
        X, m = built
        for k in range(X.n + 1):
            assert verify_factorizations(m, k).max_residual() <= 1e-10

    @given(weighted_complexes(), st.integers(0, 2**32 - 1))
    def test_spectrum_and_quadratic_form(self, built, seed):
        X, m = built
        r = np.random.default_rng(seed)
        for k in range(X.n):
            M = assemble_upper_walk(m, k)
            ev = M.eigenvalues()
            assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10
            phi = Cochain.random(m, k, r)
            q = inner_product(M(phi), phi)
            dn = norm(assemble_differential(m, k)(phi)) ** 2 / (k + 2)
            assert abs(q - dn) <= 1e-12 * max(1.0, abs(dn))

    def test_range(self, k4):
        with pytest.raises(DimensionError):
            verify_factorizations(k4[1], 3)


class TestDifferentialNormBound:
    def test_constant(self, complete62):
        m = complete62[1]
        for k in range(2):
            b = bound_from_differential_norm(Cochain.constant(m, k))
            # ||d 1||^2 = (k+2)^2 m(X(k+1)) and m(X(k)) = (k+2) m(X(k+1))
            assert b.epsilon == pytest.approx(k + 2)
            assert b.lhs == pytest.approx(b.rhs)
            assert b.passed

    def test_matching(self, k4):
        chi = Cochain.indicator(k4[1], 1, [(0, 1), (2, 3)])
        b = bound_from_differential_norm(chi)
        assert b.lhs == pytest.approx(4 / 3)
        assert b.rhs == pytest.approx(b.epsilon * 4 / 3)
        assert b.passed

    def test_zero(self, k4):
        with pytest.raises(UndefinedRatioError):
            bound_from_differential_norm(Cochain.zeros(k4[1], 1))

    @given(weighted_complexes(), st.integers(0, 2**32 - 1))
    def test_random(self, built, seed):
        X, m = built
        r = np.random.default_rng(seed)
        for k in range(X.n):
            assert bound_from_differential_norm(Cochain.random(m, k, r)).passed


def test_dump(tmp_path, k4):
    X, m = k4
    op = assemble_codifferential(m, 0)
    mat, leg = dump_operator(op, tmp_path / "ds0")
    A = np.loadtxt(mat, delimiter=",")
    assert np.array_equal(A, op.dense())
    lines = leg.read_text().splitlines()
    assert lines[0] == "axis,index,vertices"
    assert lines[1] == "row,0,0"
    assert f"col,{X.size(1) - 1},2 3" in lines
