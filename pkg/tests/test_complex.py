import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import weighted_complexes
from hdxwalk.complex import (
    SimplicialComplex,
    WeightFunction,
    build_from_top_faces,
    homogeneous_weight,
    link,
    simplex,
    validate,
)
from hdxwalk.errors import (
    DimensionError,
    DimensionMismatchError,
    DomainError,
    DuplicateFaceError,
    MissingFaceError,
    PurityError,
)
from hdxwalk.generators import complete_complex


def test_simplex_normalizes():
    assert simplex([2, 0, 1]) == (0, 1, 2)
    assert simplex([]) == ()
    with pytest.raises(DomainError):
        simplex([1, 1])
    with pytest.raises(DomainError):
        simplex([-1, 2])


class TestBuild:
    def test_single_triangle(self):
        X, m = build_from_top_faces([((0, 1, 2), 1.0)])
        assert m[(0, 1)] == 1
        assert m[(0,)] == 2
        assert m[()] == 6

    def test_k4_skeleton(self):
        X, m = build_from_top_faces([(t, 1.0) for t in combinations(range(4), 3)])
        assert all(m[e] == 2 for e in X.faces(1))
        assert all(m[v] == 6 for v in X.faces(0))
        assert m[()] == 24

    def test_disjoint_edges_build(self):
        X, m = build_from_top_faces([((0, 1), 1), ((2, 3), 1)])
        assert X.n == 1 and X.size(0) == 4
        assert m[()] == 4

    def test_ragged(self):
        with pytest.raises(DimensionMismatchError):
            build_from_top_faces([((0, 1, 2), 1), ((0, 3), 1)])

    def test_empty(self):
        with pytest.raises(DimensionMismatchError):
            build_from_top_faces([])

    @pytest.mark.parametrize("w", [0.0, -1.0, float("nan"), float("inf")])
    def test_bad_weight(self, w):
        with pytest.raises(DomainError):
            build_from_top_faces([((0, 1, 2), w)])

    def test_duplicate(self):
        with pytest.raises(DuplicateFaceError):
            build_from_top_faces([((0, 1, 2), 1), ((2, 1, 0), 1)])

    def test_lexicographic_indexing(self):
        X, _ = build_from_top_faces([((3, 1, 2), 1), ((0, 1, 2), 1)])
        assert X.faces(1) == ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3))
        assert X.index((2, 1)) == 2
        assert X.faces(-1) == ((),)

    def test_indexing_deterministic(self):
        tops = [((5, 9, 2), 2.0), ((2, 3, 9), 1.0), ((3, 5, 9), 0.5)]
        X1, m1 = build_from_top_faces(tops)
        X2, m2 = build_from_top_faces(list(reversed(tops)))
        for k in range(-1, 3):
            assert X1.faces(k) == X2.faces(k)
            assert np.array_equal(m1.of(k), m2.of(k))

    def test_noncontiguous_vertices(self):
        X, m = build_from_top_faces([((10, 20, 30), 1)])
        assert X.vertices == (10, 20, 30)


class TestHomogeneous:
    def test_triangle(self, triangle):
        X, _ = triangle
        m = homogeneous_weight(X)
        assert m[(0, 1, 2)] == 1 and m[(0, 1)] == 1 and m[(0,)] == 2 and m[()] == 6

    def test_k4_vertex(self, k4):
        X, _ = k4
        assert homogeneous_weight(X)[(0,)] == 6

    def test_complete_5_2(self):
        X, m = complete_complex(5, 2)[:2]
        assert m[()] == math.factorial(3) * math.comb(5, 3) == 60

    def test_not_pure(self):
        X = SimplicialComplex([(0, 1, 2), (0, 1), (0, 2), (1, 2), (0,), (1,), (2,), (3,)])
        with pytest.raises(PurityError):
            homogeneous_weight(X)

    def test_not_closed(self):
        with pytest.raises(PurityError):
            homogeneous_weight(SimplicialComplex([(0, 1, 2)]))

    @given(weighted_complexes(integer_weights=True))
    def test_closed_form_matches_recursion(self, built):
        X, _ = built
        _, m1 = build_from_top_faces([(t, 1) for t in X.top_faces])
        mh = homogeneous_weight(X)
        for k in range(-1, X.n + 1):
            assert np.array_equal(mh.of(k), m1.of(k))
            counts = np.array([len(X.tops_containing(f)) for f in X.faces(k)])
            assert np.array_equal(mh.of(k), math.factorial(X.n - k) * counts)


class TestValidate:
    def test_triangle_clean(self, triangle):
        X, m = triangle
        rep = validate(X, m)
        assert rep.ok and rep.max_residual() == 0
        assert m.total(0) == 6 == math.factorial(3) * m.total(2)

    def test_corrupted_vertex(self, triangle):
        X, m = triangle
        bad = m.replace((0,), 3.0)
        rep = validate(X, bad)
        assert not rep.ok
        # dimension 0 is index 1 in the per-k list (k = -1 first)
        assert rep.recursion_residuals[1] > 0
        assert rep.recursion_worst[1] == (0,)

    def test_k4_clean(self, k4):
        rep = validate(*k4)
        assert rep.recursion_residuals == (0.0, 0.0, 0.0)

    def test_reports_closure_and_purity(self):
        X = SimplicialComplex([(0, 1, 2), (0, 1), (0,), (1,), (2,), (5,)])
        w = WeightFunction(X, tuple(np.ones(X.size(k)) for k in range(-1, X.n + 1)))
        rep = validate(X, w)
        assert ((0, 1, 2), (0, 2)) in rep.closure_violations
        assert (5,) in rep.purity_violations
        assert not rep.ok

    @given(weighted_complexes(integer_weights=True))
    def test_integer_weights_exact(self, built):
        assert validate(*built).ok

    @given(weighted_complexes())
    def test_float_weights_exact(self, built):
        # doubles are rationals; the recursion is recomputed exactly
        rep = validate(*built)
        assert rep.coface_sum_residual < 1e-14 and rep.totals_residual < 1e-14

    @given(weighted_complexes(integer_weights=True), st.data())
    def test_coface_sums_all_levels(self, built, data):
        X, m = built
        k = data.draw(st.integers(-1, X.n - 1))
        l = data.draw(st.integers(k + 1, X.n))
        for tau in X.faces(k):
            total = sum(Fraction(m[s]) for s in X.faces(l) if set(tau) <= set(s))
            assert Fraction(m[tau]) == math.factorial(l - k) * total
        assert Fraction(m.total(k)) == Fraction(math.factorial(l + 1), math.factorial(k + 1)) * Fraction(
            m.total(l)
        )


class TestLink:
    def test_triangle_vertex(self, triangle):
        X, m = triangle
        lk = link(X, m, (0,))
        assert lk.complex.faces(0) == ((1,), (2,))
        assert lk.complex.faces(1) == ((1, 2),)
        assert lk.weights[(1,)] == m[(0, 1)] == 1

    def test_k4_vertex(self, k4):
        X, m = k4
        lk = link(X, m, (0,))
        # the link is the 3-cycle on {1, 2, 3}
        assert lk.complex.top_faces == ((1, 2), (1, 3), (2, 3))
        assert all(lk.weights[e] == 1 for e in lk.complex.faces(1))

    def test_empty_is_identity(self, k4):
        X, m = k4
        lk = link(X, m, ())
        assert lk.complex is X and lk.weights is m
        assert all(np.array_equal(ix, np.arange(X.size(j - 1))) for j, ix in enumerate(lk.parent_index))

    def test_missing(self, k4):
        with pytest.raises(MissingFaceError):
            link(*k4, (0, 7))

    def test_top_face(self, k4):
        with pytest.raises(DimensionError):
            link(*k4, (0, 1, 2))

    def test_link_weights_recursion(self, random12):
        X, m = random12
        for tau in X.faces(0)[:5]:
            lk = link(X, m, tau)
            assert validate(lk.complex, lk.weights).ok

    def test_membership_rule(self, random93):
        X, m = random93
        tau = X.faces(1)[3]
        lk = link(X, m, tau)
        for l in range(lk.n + 1):
            expect = {
                tuple(v for v in s if v not in tau)
                for s in X.faces(len(tau) - 1 + l + 1)
                if set(tau) <= set(s)
            }
            assert set(lk.complex.faces(l)) == expect

    def test_links_compose(self, complete73):
        X, m = complete73
        tau, eta = (0,), (3,)
        inner = link(X, m, tau)
        twice = link(inner.complex, inner.weights, eta)
        direct = link(X, m, (0, 3))
        for l in range(direct.n + 1):
            assert twice.complex.faces(l) == direct.complex.faces(l)
            assert np.array_equal(twice.weights.of(l), direct.weights.of(l))
