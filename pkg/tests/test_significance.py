import io
import json

import numpy as np
import pytest

from kompet.errors import InputError
from kompet.significance import (
    AsoResult,
    ScoreSample,
    aso,
    bonferroni,
    compare_all,
    read_runs,
    violation_ratio,
)


def rand_samples(rng, n=None):
    n = n or int(rng.integers(3, 12))
    return rng.normal(loc=rng.uniform(-1, 1), scale=rng.uniform(0.1, 2.0), size=n)


class TestViolationRatio:
    def test_full_dominance(self):
        assert violation_ratio([1.0, 1.0, 1.0], [0.0, 0.0, 0.0]) == 0.0

    def test_identical_convention(self):
        assert violation_ratio([0.3, 0.5, 0.7], [0.3, 0.5, 0.7]) == 0.5

    def test_full_inversion(self):
        assert violation_ratio([0.0, 0.0], [1.0, 1.0]) == 1.0

    def test_complement_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, b = rand_samples(rng), rand_samples(rng)
            if np.array_equal(np.sort(a), np.sort(b)):
                continue
            assert violation_ratio(a, b) + violation_ratio(b, a) == pytest.approx(1.0, abs=1e-12)

    def test_shift_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            a, b = rand_samples(rng), rand_samples(rng)
            shift = float(rng.uniform(-5, 5))
            assert violation_ratio(a + shift, b + shift) == pytest.approx(
                violation_ratio(a, b), abs=1e-12
            )

    def test_positive_scale_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b = rand_samples(rng), rand_samples(rng)
            scale = float(rng.uniform(0.1, 10))
            assert violation_ratio(a * scale, b * scale) == pytest.approx(
                violation_ratio(a, b), abs=1e-12
            )

    def test_range(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            v = violation_ratio(rand_samples(rng), rand_samples(rng))
            assert 0.0 <= v <= 1.0

    def test_accepts_score_samples(self):
        a = ScoreSample("a", (0.6, 0.7, 0.8))
        b = ScoreSample("b", (0.1, 0.2, 0.3))
        assert violation_ratio(a, b) == 0.0


class TestAso:
    def test_separated_samples_dominant(self):
        a = [0.9, 0.91, 0.92, 0.93, 0.94]
        b = [0.1, 0.11, 0.12, 0.13, 0.14]
        result = aso(a, b, alpha=0.05, seed=0)
        assert result.epsilon_hat == 0.0
        assert result.epsilon_min < 0.05
        assert result.dominant

    def test_identical_samples(self):
        # epsilon_hat is exactly 0.5; the bootstrap sigma is large for
        # identical samples, so epsilon_min only satisfies <= 0.5.
        a = [0.5, 0.6, 0.7]
        result = aso(a, a, alpha=0.05, seed=0)
        assert result.epsilon_hat == 0.5
        assert result.epsilon_min <= 0.5

    def test_threshold_is_strict(self):
        r = AsoResult(epsilon_hat=0.5, sigma_boot=0.0, epsilon_min=0.5, alpha=0.05, dominant=False)
        assert not r.dominant
        # A result sitting exactly at the threshold is not dominant.
        rng = np.random.default_rng(77)
        a = rand_samples(rng, 5)
        got = aso(a, a, alpha=0.4999, seed=0, bootstrap_iters=100)
        assert got.dominant == (got.epsilon_min < 0.5)

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(5)
        a, b = rand_samples(rng), rand_samples(rng)
        first = aso(a, b, alpha=0.05, seed=42)
        second = aso(a, b, alpha=0.05, seed=42)
        assert first == second

    def test_different_seeds_differ_in_sigma(self):
        rng = np.random.default_rng(6)
        a, b = rand_samples(rng, 8), rand_samples(rng, 8)
        r1 = aso(a, b, alpha=0.05, seed=1)
        r2 = aso(a, b, alpha=0.05, seed=2)
        assert r1.epsilon_hat == r2.epsilon_hat
        assert r1.sigma_boot != r2.sigma_boot

    def test_epsilon_min_below_hat_for_small_alpha(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            a, b = rand_samples(rng), rand_samples(rng)
            r = aso(a, b, alpha=0.05, seed=3)
            assert r.epsilon_min <= r.epsilon_hat

    def test_epsilon_min_monotone_in_alpha(self):
        rng = np.random.default_rng(8)
        a, b = rand_samples(rng, 6), rand_samples(rng, 6)
        values = [
            aso(a, b, alpha=alpha, seed=11).epsilon_min for alpha in (0.01, 0.05, 0.1, 0.25, 0.4)
        ]
        assert values == sorted(values)

    def test_clipping(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            r = aso(rand_samples(rng), rand_samples(rng), alpha=0.05, seed=1)
            assert 0.0 <= r.epsilon_min <= 1.0

    def test_low_bootstrap_rejected(self):
        with pytest.raises(InputError, match="unstable"):
            aso([1.0, 2.0], [1.0, 2.0], bootstrap_iters=50)

    def test_bad_alpha(self):
        with pytest.raises(InputError):
            aso([1.0, 2.0], [1.0, 2.0], alpha=1.5)


class TestBonferroni:
    def test_values(self):
        assert bonferroni(0.05, 1) == 0.05
        assert bonferroni(0.05, 5) == pytest.approx(0.01)
        assert bonferroni(0.05, 21) == pytest.approx(0.05 / 21)

    def test_zero_comparisons(self):
        with pytest.raises(InputError):
            bonferroni(0.05, 0)


class TestCompareAll:
    def _samples(self, k, seed=0):
        rng = np.random.default_rng(seed)
        return [ScoreSample(f"m{i}", tuple(rng.normal(i * 0.3, 0.4, 5))) for i in range(k)]

    def test_two_samples_shape(self):
        matrix = compare_all(self._samples(2), 0.05, seed=0)
        assert matrix.results[0][0] is None
        assert matrix.results[1][1] is None
        assert isinstance(matrix.results[0][1], AsoResult)
        assert isinstance(matrix.results[1][0], AsoResult)
        assert matrix.alpha_adjusted == pytest.approx(0.05 / 2)

    def test_dominance_antisymmetric(self):
        a = ScoreSample("hi", (0.9, 0.92, 0.94, 0.96, 0.98))
        b = ScoreSample("lo", (0.1, 0.12, 0.14, 0.16, 0.18))
        matrix = compare_all([a, b], 0.05, seed=0)
        assert matrix.results[0][1].dominant
        assert not matrix.results[1][0].dominant

    def test_seven_models_42_comparisons(self):
        matrix = compare_all(self._samples(7), 0.05, seed=0, bootstrap_iters=100, grid_size=100)
        done = [r for row in matrix.results for r in row if r is not None]
        assert len(done) == 42
        assert matrix.alpha_adjusted == pytest.approx(0.05 / 42)
        assert all(r.alpha == pytest.approx(0.05 / 42) for r in done)

    def test_duplicate_ids_rejected(self):
        dup = [
            ScoreSample("m", (0.1, 0.2)),
            ScoreSample("m", (0.3, 0.4)),
        ]
        with pytest.raises(InputError, match="duplicate"):
            compare_all(dup, 0.05)

    def test_deterministic(self):
        a = compare_all(self._samples(3), 0.05, seed=4, bootstrap_iters=200, grid_size=200)
        b = compare_all(self._samples(3), 0.05, seed=4, bootstrap_iters=200, grid_size=200)
        assert a == b

    def test_tsv_marks_dominance(self):
        a = ScoreSample("hi", (0.9, 0.92, 0.94))
        b = ScoreSample("lo", (0.1, 0.12, 0.14))
        tsv = compare_all([a, b], 0.05, seed=0).to_tsv()
        lines = tsv.strip().splitlines()
        assert lines[0] == "model\thi\tlo"
        assert "*" in lines[1]
        assert "-" in lines[1]


class TestScoreSample:
    def test_too_few_scores(self):
        with pytest.raises(InputError):
            ScoreSample("m", (1.0,))

    def test_non_finite(self):
        with pytest.raises(InputError):
            ScoreSample("m", (1.0, float("nan")))


class TestRunsIO:
    def test_read(self):
        text = json.dumps([{"model": "a", "scores": [0.1, 0.2]}, {"model": "b", "scores": [0.3, 0.4]}])
        samples = read_runs(io.StringIO(text))
        assert [s.model_id for s in samples] == ["a", "b"]
        assert samples[0].scores == (0.1, 0.2)

    def test_bad_json(self):
        with pytest.raises(InputError):
            read_runs(io.StringIO("{nope"))

    def test_missing_fields(self):
        with pytest.raises(InputError):
            read_runs(io.StringIO('[{"model": "a"}]'))
