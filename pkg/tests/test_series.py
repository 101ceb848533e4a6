from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest

from quasicopula import (
    IndexOutOfRange,
    StagesNotConsecutive,
    build_stage,
    chessboard_diamond,
    check_quasi_copula,
    classify,
    counterexample,
    error_certificate,
    expand,
    extend,
    literal_partial_sum,
    named,
    partial_sum,
    stage_boundary,
    sup_distance_on_grid,
    telescope,
)
from quasicopula.bilinear import grid_points


@pytest.fixture(scope="module")
def q1hat():
    return extend(chessboard_diamond(1), name="Q1hat")


@pytest.fixture(scope="module")
def q1_series(q1hat):
    return expand(q1hat, 4)


class TestStage:
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_product(self, n):
        s = build_stage(named("Pi"), n)
        assert (s.alpha, s.beta) == (1, 0)
        assert s.Qhat.exact_value(F(2, 7), F(3, 5)) == F(6, 35)
        assert s.Bhat.exact_value(F(1, 3), F(1, 3)) == F(1, 9)

    def test_min_on_halves(self):
        s = build_stage(named("M"), 2)
        assert (s.alpha, s.beta) == (2, -1)

    def test_q1_recovered(self, q1hat):
        s = build_stage(q1hat, 3)
        assert (s.alpha, s.beta) == (3, -2)
        assert s.grid == chessboard_diamond(1)

    @pytest.mark.parametrize("n", [1, 3, 4, 6])
    def test_stage_agrees_with_target_at_nodes(self, q1hat, n):
        s = build_stage(q1hat, n)
        for y in s.mesh.ys:
            for x in s.mesh.xs:
                assert s.Qhat.exact_value(x, y) == q1hat.exact_value(x, y)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            build_stage(named("Pi"), 0)


class TestTelescope:
    def test_product(self):
        t = telescope(build_stage(named("Pi"), 1), build_stage(named("Pi"), 2))
        assert (t.zeta, t.xi) == (1, -1)
        pts = grid_points(20)
        X, Y = np.meshgrid(pts, pts)
        assert np.allclose(t.D(X, Y), X * Y) and np.allclose(t.E(X, Y), X * Y)
        assert t.identity_error <= 1e-12

    def test_min_two_three(self):
        s2, s3 = build_stage(named("M"), 2), build_stage(named("M"), 3)
        assert s3.alpha == 3  # diagonal cell 1/3 over area 1/9
        t = telescope(s2, s3)
        assert t.zeta == s3.alpha + 1 == 4

    def test_not_consecutive(self):
        with pytest.raises(StagesNotConsecutive):
            telescope(build_stage(named("M"), 1), build_stage(named("M"), 3))

    @pytest.mark.parametrize("name", ["M", "W", "Q1hat", "counterexample"])
    def test_coefficients_and_copula_terms(self, name, q1hat):
        Q = {"Q1hat": q1hat, "counterexample": counterexample()}.get(name) or named(name)
        series = expand(Q, 5)
        for t in series.telescopes:
            assert t.zeta + t.xi == 0
            assert t.zeta >= 1 and t.xi <= -1
            assert check_quasi_copula(t.D, k=50).ok and check_quasi_copula(t.E, k=50).ok
            assert t.identity_error <= 1e-9


class TestExpand:
    def test_lengths(self):
        s = expand(named("M"), 3)
        assert s.K == tuple(int(abs(t.xi)) + 1 for t in s.telescopes)
        assert all(K > abs(t.xi) for K, t in zip(s.K, s.telescopes))
        assert len(s) == 2 + sum(2 * n * K for n, K in zip((1, 2, 3), s.K))
        assert len(list(s.terms())) == len(s)

    def test_product_partial_sums_normalise_to_product(self):
        s = expand(named("Pi"), 3)
        pts = grid_points(10)
        X, Y = np.meshgrid(pts, pts)
        for j in range(1, len(s) + 1):
            ps = partial_sum(s, j)
            assert np.allclose(ps.normalized()(X, Y), X * Y, atol=1e-12)
            if ps.kind == "convex":
                assert np.allclose(ps.function(X, Y), X * Y, atol=1e-12)

    def test_complete_stages_sum_to_one(self, q1_series):
        for p in range(1, q1_series.N + 2):
            j = stage_boundary(q1_series, p)
            assert q1_series.coefficient_sum(j) == 1
            assert partial_sum(q1_series, j).function.exact_value(1, 1) == 1

    def test_counterexample_growth(self):
        s = expand(counterexample(), 8)
        xis = [abs(t.xi) for t in s.telescopes]
        assert xis == sorted(xis)
        assert list(s.K) == sorted(s.K) and s.K[-1] > s.K[0]

    def test_roles(self, q1_series):
        roles = [t.role for t in q1_series.terms()]
        assert roles[:2] == ["A", "B"]
        assert set(roles[2:]) == {"D", "E"}
        assert roles[2::2] == ["D"] * ((len(roles) - 2) // 2)


class TestPartialSums:
    def test_classification(self, q1_series):
        assert classify(q1_series, 1)[0] == "head"
        assert classify(q1_series, 2) == ("convex", 1, 0, 1)
        kind, p, k, factor = classify(q1_series, 3)
        assert (kind, p, k) == ("scaled", 1, 1)
        assert factor == 1 + q1_series.telescopes[0].zeta / q1_series.K[0]

    def test_bounds(self, q1_series):
        with pytest.raises(IndexOutOfRange):
            partial_sum(q1_series, 0)
        with pytest.raises(IndexOutOfRange):
            literal_partial_sum(q1_series, len(q1_series) + 1)
        with pytest.raises(IndexOutOfRange):
            stage_boundary(q1_series, q1_series.N + 2)

    def test_literal_matches_closed_form(self, q1_series):
        pts = grid_points(30)
        X, Y = np.meshgrid(pts, pts)
        for j in range(1, len(q1_series) + 1):
            lit = literal_partial_sum(q1_series, j)
            closed = partial_sum(q1_series, j).function
            assert np.max(np.abs(lit(X, Y) - closed(X, Y))) <= 1e-12
        for j in (1, 2, 7, 40):
            probe = (F(2, 7), F(5, 9))
            assert literal_partial_sum(q1_series, j).exact_value(*probe) == partial_sum(
                q1_series, j
            ).function.exact_value(*probe)

    def test_every_normalised_partial_sum_is_quasi_copula(self, q1_series):
        for j in range(1, len(q1_series) + 1):
            ps = partial_sum(q1_series, j)
            assert ps.factor >= 1
            assert check_quasi_copula(ps.normalized(), k=50).ok, j

    def test_complete_stage_equals_stage_approximant(self, q1_series):
        for p in range(1, q1_series.N + 2):
            S = partial_sum(q1_series, stage_boundary(q1_series, p)).function
            assert sup_distance_on_grid(S, q1_series.stages[p - 1].Qhat, 40) <= 1e-12


class TestCertificates:
    def test_product_is_exact(self):
        s = expand(named("Pi"), 4)
        for p in range(1, 5):
            e = error_certificate(named("Pi"), s, p)
            assert e.measured <= 1e-12 and e.bound == F(4, p)

    def test_min_stage_eight(self):
        s = expand(named("M"), 8)
        e = error_certificate(named("M"), s, 8)
        assert e.measured <= 0.5 and e.bound == F(1, 2)

    def test_counterexample_stage_sixteen(self):
        Q = counterexample()
        e = error_certificate(Q, expand(Q, 16), 16)
        assert e.measured <= 0.25

    def test_incomplete_stage_refused(self):
        s = expand(named("M"), 2)
        with pytest.raises(IndexOutOfRange):
            error_certificate(named("M"), s, 3)
