"""Tests for the jump-process simulation and its law checks"""
import math

import numpy as np
import pytest

from src.errors import DomainError
from src.kendall_sim import (
    PathRecord,
    block_rng,
    build_model,
    first_passage,
    inversion_consistency_check,
    jump_census,
    kendall_integral_check,
    label_from_level,
    laplace_transform_check,
    marginal_law_check,
    marginal_probability,
    passage_law_check,
    passage_probability,
    phi_y_check,
    run_blocks,
    sample_path,
)
from src.lfunction import make_context
from src.spec_models import MultiplicativeSpec

ZETA_2 = math.pi**2 / 6


class TestSubordinatorModel:
    """Test atom construction for the zeta spec at sigma = 2"""

    def setup_method(self):
        self.ctx = make_context(MultiplicativeSpec.all_ones(), 2.0)
        self.model = build_model(self.ctx)

    def test_atoms_are_prime_powers(self):
        assert self.model.atom_n[:8].tolist() == [2, 3, 4, 5, 7, 8, 9, 11]
        assert self.model.atom_mass[2] == pytest.approx(1 / 32)

    def test_total_mass_close_to_log_zeta(self):
        assert self.model.total_mass == pytest.approx(math.log(ZETA_2), abs=1e-4)
        assert 0 <= self.model.mass_defect < 1e-4

    def test_cdf_ends_at_one(self):
        assert self.model.cdf[-1] == 1.0
        assert np.all(np.diff(self.model.cdf) >= 0)

    def test_marginal_probabilities_sum_below_one(self):
        total = sum(marginal_probability(self.model, n, 1.0) for n in range(1, 200))
        assert 0.99 < total <= 1.0
        assert marginal_probability(self.model, 1, 1.0) == pytest.approx(math.exp(-self.model.total_mass))

    def test_passage_probability_at_one(self):
        # Y_x = cx exactly when no jump occurs before cx
        p = passage_probability(self.model, 1, 1.0, 0.5)
        assert p == pytest.approx(math.exp(-0.5 * self.model.total_mass))

    def test_rejects_signed_coefficients(self):
        ctx = make_context(MultiplicativeSpec.builtin("chi4"), 2.0)
        with pytest.raises(DomainError):
            build_model(ctx)

    def test_rejects_short_truncation(self):
        with pytest.raises(DomainError) as excinfo:
            build_model(self.ctx, N=100)
        assert excinfo.value.parameter == "N"


class TestSinglePath:
    def setup_method(self):
        self.ctx = make_context(MultiplicativeSpec.all_ones(), 2.0)
        self.model = build_model(self.ctx)

    def test_first_passage_by_hand(self):
        path = PathRecord(np.array([0.2, 1.0]), np.array([math.log(2), math.log(3)]), horizon=10.0)
        sample = first_passage(path, 1.0, 0.5)
        assert sample.y == pytest.approx(0.5 * (1 + math.log(2)))
        assert sample.n_label == 2
        assert sample.hit

    def test_first_passage_without_jumps(self):
        path = PathRecord(np.zeros(0), np.zeros(0), horizon=10.0)
        sample = first_passage(path, 2.0, 0.5)
        assert sample.y == pytest.approx(1.0)
        assert sample.n_label == 1

    def test_censored_passage(self):
        path = PathRecord(np.array([0.1]), np.array([math.log(1000)]), horizon=1.0)
        sample = first_passage(path, 1.0, 0.5)
        assert not sample.hit
        assert sample.n_label is None

    def test_sample_path_is_reproducible(self):
        a = sample_path(self.model, 5.0, seed=4)
        b = sample_path(self.model, 5.0, seed=4)
        assert np.array_equal(a.jump_times, b.jump_times)
        assert np.array_equal(a.jump_sizes, b.jump_sizes)
        assert np.all(np.diff(a.jump_times) >= 0)
        assert a.value_at(5.0) == pytest.approx(a.jump_sizes.sum())

    def test_label_guard_band(self):
        assert label_from_level(math.log(6)) == 6
        assert label_from_level(math.log(6) + 1e-3) is None


def test_block_streams_are_independent_of_workers():
    serial = run_blocks(70_000, 9, lambda rng, count: rng.random(3), workers=1)
    pooled = run_blocks(70_000, 9, lambda rng, count: rng.random(3), workers=3)
    assert len(serial) == 3
    assert all(np.array_equal(a, b) for a, b in zip(serial, pooled))
    assert not np.array_equal(block_rng(9, 0).random(3), block_rng(9, 1).random(3))


class TestMonteCarloLaws:
    """Fixed-seed checks of the simulated laws against their closed forms"""

    def setup_method(self):
        self.ctx = make_context(MultiplicativeSpec.all_ones(), 2.0)
        self.model = build_model(self.ctx)

    def test_marginal_law(self):
        report = marginal_law_check(self.model, 1.0, paths=200_000, seed=1)
        assert report.ok
        assert [row["n"] for row in report.rows] == list(range(1, 21))
        assert report.summary["max_abs_z"] <= 4

    def test_passage_law(self):
        report = passage_law_check(self.model, 1.0, 0.5, paths=100_000, seed=2)
        assert report.ok
        assert report.summary["censored_fraction"] == 0.0
        assert report.summary["support_max_error"] < 1e-9
        assert report.summary["drift_ratio"] < 1

    def test_passage_law_is_worker_independent(self):
        a = passage_law_check(self.model, 0.5, 0.5, paths=40_000, seed=5, workers=1)
        b = passage_law_check(self.model, 0.5, 0.5, paths=40_000, seed=5, workers=2)
        assert a.to_dict() == b.to_dict()

    def test_kendall_identity(self):
        report = kendall_integral_check(self.model, 0.3, 2.0, 0.5, paths=50_000, seed=3)
        assert report.ok
        assert report.summary["lhs"] > 0

    def test_kendall_trivial_above_reach(self):
        report = kendall_integral_check(self.model, 5.0, 2.0, 0.5, paths=1_000, seed=3)
        assert report.summary["lhs"] == 0.0
        assert report.summary["rhs"] == 0.0
        assert report.ok

    def test_jump_census(self):
        report = jump_census(self.model, 2.0, paths=50_000, seed=6)
        assert report.ok
        assert report.summary["expected_jumps"] == pytest.approx(2 * self.model.total_mass)

    def test_laplace_transform(self):
        report = laplace_transform_check(self.model, 1.5, paths=100_000, seed=7)
        assert report.ok
        for row in report.rows:
            assert row["theoretical"] == pytest.approx(row["closed_form"], abs=1e-4)

    def test_phi_y_functional_equation(self):
        report = phi_y_check(self.model, 1.0, 0.5, 1.0, paths=100_000, seed=8)
        assert report.ok

    def test_inversion_consistency(self):
        report = inversion_consistency_check(self.model, 3.0, 0.5, 1.0, paths=100_000, seed=10)
        assert report.ok
        assert report.summary["f_simulated"] == pytest.approx(report.summary["f_series"], abs=0.02)

    def test_inversion_consistency_domain(self):
        with pytest.raises(DomainError):
            inversion_consistency_check(self.model, 2.1, 0.5, 1.0, paths=10, seed=0)
