"""Closed-form global-majority-voting baseline (classical repetition code).

The whole lattice is read out and overwritten with its majority state once
per update period of 1+delta CA steps, while each cell flips independently
with probability p per step.  Everything reduces to three closed forms:
the per-cell flip probability after t steps, the logical flip probability
per update (even cell counts resolve ties to a flip with probability 1/2),
and the geometric-distribution mean flip time 1/P.

All three work with exact Fractions as well as floats; large lattices take
a log-space path to stay overflow-safe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from scipy import stats


@dataclass(frozen=True)
class VotingParams:
    """Lattice size, per-step flip probability and readout delay."""
    n: int
    p: float | Fraction
    delta: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one cell")
        if not 0 <= self.p <= 1:
            raise ValueError("flip probability must lie in [0, 1]")
        if self.delta < 0:
            raise ValueError("delay must be non-negative")


@dataclass(frozen=True)
class VotingFlipTime:
    """Mean flip time in update periods (1/P) and in CA steps ((1+delta)/P)."""
    probability: float | Fraction
    periods: float | Fraction
    steps: float | Fraction


def flip_prob_after(t: int, p):
    """Probability that a cell has flipped an odd number of times after t steps.

    Equals (1 - (1-2p)^t) / 2; exact when p is a Fraction.
    """
    if t < 0:
        raise ValueError("step count must be non-negative")
    one = Fraction(1) if isinstance(p, Rational) else 1.0
    return (one - (one - 2 * p) ** t) / 2


def logical_flip_prob(n: int, t: int, p):
    """Probability that the update after t noise steps reads out the wrong majority.

    Binomial tail P[X > n/2] for X ~ Bin(n, p(t)), plus half the tie mass
    for even n.  Exact for Fraction p; log-space floats otherwise (safe up
    to n ~ 10^3 and beyond).
    """
    if n < 1:
        raise ValueError("need at least one cell")
    pt = flip_prob_after(t, p)
    if isinstance(pt, Rational):
        tail = sum(Fraction(math.comb(n, j)) * pt**j * (1 - pt) ** (n - j)
                   for j in range(n // 2 + 1, n + 1))
        if n % 2 == 0:
            tail += Fraction(math.comb(n, n // 2), 2) * (pt * (1 - pt)) ** (n // 2)
        return tail
    pt = float(pt)
    tail = float(stats.binom.sf(n // 2, n, pt))
    if n % 2 == 0:
        half = n // 2
        if pt in (0.0, 1.0):
            tie = 0.0
        else:
            log_tie = (math.lgamma(n + 1) - 2 * math.lgamma(half + 1)
                       + half * math.log(pt * (1.0 - pt)))
            tie = 0.5 * math.exp(log_tie)
        tail += tie
    return tail


def mean_flip_time(params: VotingParams) -> VotingFlipTime:
    """Mean flip time of the periodically corrected lattice.

    The per-update logical flip is a Bernoulli(P(1+delta)) event, so the
    flip time is geometric with mean 1/P update periods; multiplying by
    the period length converts to CA steps.
    """
    period = 1 + params.delta
    prob = logical_flip_prob(params.n, period, params.p)
    if prob == 0:
        return VotingFlipTime(prob, math.inf, math.inf)
    one = Fraction(1) if isinstance(prob, Rational) else 1.0
    periods = one / prob
    return VotingFlipTime(prob, periods, period * periods)
