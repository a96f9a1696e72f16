import math
from fractions import Fraction

import numpy as np
import pytest

from singlerail import (
    CapacityError,
    ConfigError,
    compare_yield,
    entanglement_ratio,
    monte_carlo_yield,
    swap_chain,
    yield_oracle,
    yield_series,
    yield_term,
)
from conftest import make_pair

INV_SQRT2 = 1 / math.sqrt(2)


def coeffs(alpha_sq: float, theta: float = 0.0):
    p = make_pair(alpha_sq, theta=theta)
    return p.alpha, p.beta


class TestYieldTerm:
    def test_round_index_domain(self):
        with pytest.raises(ConfigError):
            yield_term(INV_SQRT2, INV_SQRT2, 0)

    @pytest.mark.parametrize("alpha_sq", [0.05, 0.2, 0.5, 0.8, 0.95])
    def test_first_term_is_ab_squared(self, alpha_sq):
        a, b = coeffs(alpha_sq)
        assert yield_term(a, b, 1) == pytest.approx(alpha_sq * (1 - alpha_sq), abs=1e-15)

    def test_balanced_first_terms(self):
        assert yield_term(INV_SQRT2, INV_SQRT2, 1) == pytest.approx(0.25, abs=1e-12)
        assert yield_term(INV_SQRT2, INV_SQRT2, 2) == pytest.approx(1 / 16, abs=1e-12)

    def test_unbalanced_second_term(self):
        a, b = coeffs(0.8)
        assert yield_term(a, b, 2) == pytest.approx(8 / 425, abs=1e-12)

    def test_series_matches_terms(self):
        a, b = coeffs(0.7)
        series = yield_series(a, b, 5)
        assert series == [yield_term(a, b, n) for n in range(1, 6)]

    def test_deep_terms_do_not_overflow(self):
        a, b = coeffs(0.9)
        for n in range(1, 17):
            v = yield_term(a, b, n)
            assert math.isfinite(v) and v >= 0.0


class TestYieldOracle:
    def test_domain(self):
        with pytest.raises(ConfigError):
            yield_oracle(INV_SQRT2, INV_SQRT2, 0)
        with pytest.raises(CapacityError):
            yield_oracle(INV_SQRT2, INV_SQRT2, 17)

    def test_balanced_exact_fractions(self):
        rounds = yield_oracle(INV_SQRT2, INV_SQRT2, 4)
        assert [r.yield_value for r in rounds] == [
            Fraction(1, 4),
            Fraction(1, 16),
            Fraction(1, 64),
            Fraction(1, 256),
        ]

    def test_unbalanced_exact_fractions(self):
        # alpha_sq = 0.8 passed as exact amplitudes keeps the tree rational
        a, b = math.sqrt(0.8), math.sqrt(0.2)
        rounds = yield_oracle(a, b, 3)
        assert [r.yield_value for r in rounds] == [
            Fraction(4, 25),
            Fraction(8, 425),
            Fraction(64, 109225),
        ]

    def test_attempt_halving(self):
        rounds = yield_oracle(INV_SQRT2, INV_SQRT2, 3)
        assert [r.attempts for r in rounds] == [
            Fraction(1, 2),
            Fraction(1, 8),
            Fraction(1, 32),
        ]

    def test_total_yield_below_one_half(self):
        # at most one concentrated pair per two inputs
        for alpha_sq in (0.3, 0.5, 0.8):
            a, b = coeffs(alpha_sq)
            total = sum(r.yield_value for r in yield_oracle(a, b, 10))
            assert total < Fraction(1, 2)

    def test_coefficient_recursion(self):
        rounds = yield_oracle(math.sqrt(0.8), math.sqrt(0.2), 3)
        xs = [r.alpha_sq for r in rounds]
        assert xs[0] == Fraction(4, 5)
        for prev, nxt in zip(xs, xs[1:]):
            assert nxt == prev**2 / (prev**2 + (1 - prev) ** 2)

    def test_matches_ledger_simulation(self):
        # exact enumeration against the full state-vector iteration
        from singlerail import iterate_concentration

        pair = make_pair(0.8)
        ledger = iterate_concentration(pair, 4)
        rounds = yield_oracle(pair.alpha, pair.beta, 4)
        for entry, oracle in zip(ledger.entries, rounds):
            assert entry.yield_per_source_pair == pytest.approx(
                float(oracle.yield_value), abs=1e-12
            )
            assert entry.attempts_per_source_pair == pytest.approx(
                float(oracle.attempts), abs=1e-12
            )


class TestCompareYield:
    def test_first_two_rounds_match(self):
        a, b = coeffs(0.8)
        report = compare_yield(a, b, 5)
        assert report.terms[0].matches
        assert report.terms[1].matches

    def test_later_rounds_documented_not_suppressed(self):
        a, b = coeffs(0.5)
        report = compare_yield(a, b, 4)
        flagged = report.discrepancies
        assert [t.round_index for t in flagged] == [3, 4]
        for t in flagged:
            assert t.discrepancy == pytest.approx(abs(t.value - t.oracle_value))
            assert t.value != t.oracle_value

    def test_balanced_frozen_values(self):
        report = compare_yield(INV_SQRT2, INV_SQRT2, 4)
        values = [(t.value, t.oracle_value) for t in report.terms]
        assert values[2][0] == pytest.approx(3 / 128, abs=1e-12)
        assert values[2][1] == pytest.approx(1 / 64, abs=1e-12)
        assert values[3][0] == pytest.approx(1 / 128, abs=1e-12)
        assert values[3][1] == pytest.approx(1 / 256, abs=1e-12)

    def test_cumulative_totals(self):
        a, b = coeffs(0.7)
        report = compare_yield(a, b, 5)
        assert report.cumulative_formula == pytest.approx(
            sum(t.value for t in report.terms), abs=1e-15
        )
        assert report.cumulative_oracle == pytest.approx(
            sum(t.oracle_value for t in report.terms), abs=1e-12
        )

    @pytest.mark.parametrize("alpha_sq", [0.3, 0.65, 0.9])
    def test_recycling_beats_single_round(self, alpha_sq):
        a, b = coeffs(alpha_sq)
        report = compare_yield(a, b, 5)
        assert report.cumulative_oracle > report.terms[0].oracle_value

    def test_oracle_monotone_in_rounds(self):
        a, b = coeffs(0.8)
        totals = [compare_yield(a, b, n).cumulative_oracle for n in (1, 2, 3, 4)]
        assert totals == sorted(totals)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_alpha_beta_symmetry(self, n):
        a, b = coeffs(0.8)
        assert yield_term(a, b, n) == pytest.approx(yield_term(b, a, n), abs=1e-12)
        fwd = yield_oracle(a, b, n)[-1].yield_value
        rev = yield_oracle(b, a, n)[-1].yield_value
        assert float(fwd) == pytest.approx(float(rev), abs=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 0.8, 2.4])
    def test_phase_independence(self, theta):
        a0, b0 = coeffs(0.8, theta=0.0)
        a1, b1 = coeffs(0.8, theta=theta)
        r0 = compare_yield(a0, b0, 3)
        r1 = compare_yield(a1, b1, 3)
        for t0, t1 in zip(r0.terms, r1.terms):
            assert t0.value == pytest.approx(t1.value, abs=1e-12)
            assert t0.oracle_value == pytest.approx(t1.oracle_value, abs=1e-12)


class TestMonteCarloYield:
    def test_deterministic(self):
        a, b = coeffs(0.8)
        r1 = monte_carlo_yield(a, b, 3, 10_000, seed=9)
        r2 = monte_carlo_yield(a, b, 3, 10_000, seed=9)
        assert [(m.successes, m.attempts) for m in r1] == [
            (m.successes, m.attempts) for m in r2
        ]

    def test_estimates_track_oracle(self):
        a, b = coeffs(0.8)
        rounds = monte_carlo_yield(a, b, 2, 100_000, seed=2)
        oracle = yield_oracle(a, b, 2)
        for mc, exact in zip(rounds, oracle):
            if mc.stderr == 0.0:
                continue
            assert abs(mc.estimate - float(exact.yield_value)) < 4 * mc.stderr

    def test_attached_to_report(self):
        a, b = coeffs(0.5)
        report = compare_yield(a, b, 2, mc_trials=20_000, seed=1)
        assert report.mc_trials == 20_000
        assert len(report.monte_carlo) == 2
        assert report.monte_carlo[0].attempts == 10_000


class TestEntanglementRatio:
    def test_values(self):
        assert entanglement_ratio(make_pair(0.5)) == pytest.approx(1.0)
        assert entanglement_ratio(make_pair(0.8)) == pytest.approx(0.25)

    def test_after_one_swap(self):
        out = swap_chain(make_pair(0.8), 1)
        assert entanglement_ratio(out) == pytest.approx(1 / 16, abs=1e-12)
