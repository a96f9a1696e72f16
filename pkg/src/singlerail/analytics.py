"""Yield accounting for iterated concentration, three independent ways.

Per round the protocol either distills one maximally entangled pair or
(at probe angle pi) recycles a less entangled one into the next round.
This module evaluates the per-source-pair yield of each round via

* ``yield_term``: the closed-form series, a fixed algebraic shortcut;
* ``yield_oracle``: exhaustive herald-branch enumeration in exact rational
  arithmetic, with a per-source-pair inventory (round n is fed by 2**n
  source pairs per attempt);
* ``monte_carlo_yield``: seeded sampling of the same herald tree.

The closed-form series and the enumeration agree for rounds 1 and 2 but
not beyond; ``compare_yield`` tabulates all voices side by side and flags
every difference above tolerance as a documented discrepancy instead of
failing or hiding it.  The enumeration is the authority.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, ConfigError
from .protocols import (
    SingleRailPair,
    Tag,
    concentration_round,
    recyclable_to_pair,
)

#: formula-vs-oracle differences above this are reported as discrepancies
YIELD_MATCH_TOL = 1e-12

#: herald-tree enumeration cap: round n is fed by 2**n source pairs
MAX_ORACLE_ROUNDS = 16


def _balance_ratio(x: float, y: float, power: int) -> float:
    """(x*y)**power / (x**power + y**power)**2, computed without under/overflow."""
    lo, hi = (x, y) if x <= y else (y, x)
    if hi == 0.0:
        return 0.0
    r = (lo / hi) ** power
    return r / (1.0 + r) ** 2


def yield_term(alpha: complex, beta: complex, n: int) -> float:
    """Closed-form yield of round ``n`` per source pair.

    The first three rounds are explicit special cases; deeper rounds use
    the product form with the bracket index running from 3 to n-1.  Only
    the moduli of ``alpha`` and ``beta`` enter.  The expression stays
    fixed even where the exact enumeration disagrees (rounds >= 3);
    ``compare_yield`` surfaces those differences instead of reconciling
    them.
    """
    if n < 1:
        raise ConfigError(f"round index starts at 1, got {n}")
    x = abs(alpha) ** 2
    y = abs(beta) ** 2
    ab_sq = x * y  # |alpha * beta|^2
    if n == 1:
        return ab_sq
    if n == 2:
        return 0.5 * (1.0 - 2.0 * ab_sq) * _balance_ratio(x, y, 2)
    if n == 3:
        return (
            0.25
            * (1.0 - 2.0 * ab_sq)
            * (1.0 - _balance_ratio(x, y, 2))
            * _balance_ratio(x, y, 4)
        )
    bracket = 1.0
    for j in range(3, n):  # j = 3 .. n-1
        bracket *= 1.0 - 2.0 * _balance_ratio(x, y, 2 ** (j - 2))
    return (
        (1.0 - 2.0 * ab_sq)
        / 2.0 ** (n - 1)
        * bracket
        * _balance_ratio(x, y, 2 ** (n - 1))
    )


def yield_series(alpha: complex, beta: complex, n_rounds: int) -> list[float]:
    return [yield_term(alpha, beta, n) for n in range(1, n_rounds + 1)]


@dataclass(frozen=True)
class OracleRound:
    """Exact accounting of one round of the herald tree.

    All fields are per source pair where applicable; ``alpha_sq`` is the
    a-side weight of the pair entering this round.
    """

    round_index: int
    alpha_sq: Fraction
    attempts: Fraction
    success_probability: Fraction
    recycle_probability: Fraction
    yield_value: Fraction


def _two_copy_branches(x: Fraction) -> dict[tuple[int, int], Fraction]:
    """Weights of the four product branches of two identical pairs.

    Keys are the photon counts on the monitored (b-side) modes of each
    copy; with a-side weight x the photon sits on the b side with weight
    1 - x independently per copy.
    """
    y = 1 - x
    return {(0, 0): x * x, (0, 1): x * y, (1, 0): y * x, (1, 1): y * y}


def yield_oracle(
    alpha: complex, beta: complex, n_rounds: int
) -> list[OracleRound]:
    """Exhaustive herald-tree enumeration of iterated concentration.

    Walks the tree round by round in exact rational arithmetic: the four
    product branches are grouped by monitored photon total (the pi-angle
    readout merges totals 0 and 2), the merged branch is pushed through
    the beam-splitter/detector reduction to obtain the next round's pair
    weight, and a deterministic-fraction inventory tracks attempts per
    source pair (round 1 starts at one attempt per two pairs, each later
    attempt eats two recycled survivors).
    """
    if n_rounds < 1:
        raise ConfigError(f"need at least one round, got {n_rounds}")
    if n_rounds > MAX_ORACLE_ROUNDS:
        raise CapacityError(
            f"oracle enumerates at most {MAX_ORACLE_ROUNDS} rounds "
            f"(2**n source pairs feed round n), got {n_rounds}"
        )
    a_sq = Fraction(float(abs(alpha))) ** 2
    b_sq = Fraction(float(abs(beta))) ** 2
    if a_sq + b_sq == 0:
        raise ConfigError("alpha and beta cannot both vanish")
    x = a_sq / (a_sq + b_sq)

    half = Fraction(1, 2)
    attempts = half  # one attempt consumes two source pairs
    rounds: list[OracleRound] = []
    for n in range(1, n_rounds + 1):
        branches = _two_copy_branches(x)
        p_keep = branches[(0, 1)] + branches[(1, 0)]
        p_even = branches[(0, 0)] + branches[(1, 1)]
        rounds.append(
            OracleRound(
                round_index=n,
                alpha_sq=x,
                attempts=attempts,
                success_probability=p_keep,
                recycle_probability=p_even,
                yield_value=attempts * p_keep,
            )
        )
        if p_even == 0:
            attempts = Fraction(0)
            continue
        # beam-splitter reduction of the merged branch: the second copy's
        # photon reaches either detector with weight 1/2, and both detector
        # sub-branches leave the surviving photon on the a side with the
        # (0, 0) branch's weight
        a_weight = branches[(0, 0)] * (half + half)
        b_weight = branches[(1, 1)] * (half + half)
        x = a_weight / (a_weight + b_weight)
        attempts = attempts * p_even * half
    return rounds


@dataclass(frozen=True)
class YieldTerm:
    """One round's closed-form value next to the exact enumeration."""

    round_index: int
    value: float
    oracle_value: float
    oracle_exact: Fraction
    discrepancy: float
    matches: bool


@dataclass(frozen=True)
class MonteCarloRound:
    round_index: int
    attempts: int
    successes: int
    estimate: float
    stderr: float


@dataclass(frozen=True)
class YieldReport:
    """Side-by-side yield table: closed form, enumeration, sampling."""

    alpha: complex
    beta: complex
    terms: tuple[YieldTerm, ...]
    cumulative_formula: float
    cumulative_oracle: float
    monte_carlo: tuple[MonteCarloRound, ...] | None
    mc_trials: int

    @property
    def discrepancies(self) -> tuple[YieldTerm, ...]:
        return tuple(t for t in self.terms if not t.matches)


def monte_carlo_yield(
    alpha: complex,
    beta: complex,
    n_rounds: int,
    trials: int,
    seed: int = 0,
) -> list[MonteCarloRound]:
    """Sample the herald tree on a population of ``trials`` source pairs.

    Each round's branch probabilities come from the exact state-vector
    simulation of that round; the multinomial draws are the only
    stochastic element and are fully determined by ``seed``.
    """
    if trials < 1:
        raise ConfigError(f"need at least one source pair, got {trials}")
    if n_rounds < 1:
        raise ConfigError(f"need at least one round, got {n_rounds}")
    rng = np.random.default_rng(seed)
    pair = SingleRailPair.from_coefficients(alpha, beta)
    current: SingleRailPair | None = pair
    population = trials  # surviving pairs entering the current round
    out: list[MonteCarloRound] = []
    for n in range(1, n_rounds + 1):
        attempts = population // 2
        if current is None or attempts == 0:
            out.append(MonteCarloRound(n, attempts, 0, 0.0, 0.0))
            population = 0
            continue
        branches = concentration_round(
            current.with_modes("a1", "b1"), current.with_modes("a2", "b2")
        )
        p_success = math.fsum(
            r.probability for r in branches if r.tag is Tag.SUCCESS
        )
        recyclables = [r for r in branches if r.tag is Tag.RECYCLABLE]
        p_recycle = math.fsum(r.probability for r in recyclables)
        p_fail = max(0.0, 1.0 - p_success - p_recycle)
        pvals = np.array([p_success, p_recycle, p_fail], dtype=float)
        successes, recycles, _ = rng.multinomial(attempts, pvals / pvals.sum())
        p_hat = successes / attempts
        out.append(
            MonteCarloRound(
                round_index=n,
                attempts=attempts,
                successes=int(successes),
                estimate=successes / trials,
                stderr=math.sqrt(p_hat * (1.0 - p_hat) / attempts)
                * attempts
                / trials,
            )
        )
        current = (
            recyclable_to_pair(recyclables[0]) if recyclables else None
        )
        population = int(recycles)
    return out


def compare_yield(
    alpha: complex,
    beta: complex,
    n_rounds: int,
    mc_trials: int = 0,
    seed: int = 0,
) -> YieldReport:
    """Tabulate closed form vs enumeration (vs sampling) per round.

    Any |formula - oracle| above ``YIELD_MATCH_TOL`` is carried in the
    report as a documented discrepancy with both values; nothing is
    clipped or suppressed.
    """
    formula = yield_series(alpha, beta, n_rounds)
    oracle = yield_oracle(alpha, beta, n_rounds)
    terms = []
    for f_val, o_round in zip(formula, oracle):
        o_val = float(o_round.yield_value)
        gap = abs(f_val - o_val)
        terms.append(
            YieldTerm(
                round_index=o_round.round_index,
                value=f_val,
                oracle_value=o_val,
                oracle_exact=o_round.yield_value,
                discrepancy=gap,
                matches=gap <= YIELD_MATCH_TOL,
            )
        )
    mc = (
        tuple(monte_carlo_yield(alpha, beta, n_rounds, mc_trials, seed))
        if mc_trials > 0
        else None
    )
    return YieldReport(
        alpha=complex(alpha),
        beta=complex(beta),
        terms=tuple(terms),
        cumulative_formula=sum(formula),
        cumulative_oracle=float(sum(r.yield_value for r in oracle)),
        monte_carlo=mc,
        mc_trials=mc_trials,
    )


def entanglement_ratio(pair: SingleRailPair) -> float:
    """min/max of the two branch weights; 1 means maximally entangled."""
    lo, hi = sorted((pair.alpha_sq, pair.beta_sq))
    return lo / hi
