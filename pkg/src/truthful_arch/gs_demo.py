"""Exhaustive manipulability scans of small ordinal voting rules.

An ordering lists alternative ids from most to least preferred.  A voter
manipulates when some other ordering elects an alternative she ranks
strictly higher under her true ordering.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from truthful_arch.strategic import candidate_budget, BUDGET_ENV

RULE_KINDS = ("plurality", "borda", "dictatorship")


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OrdinalProfile:
    orderings: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        orderings = tuple(tuple(o) for o in self.orderings)
        if not orderings:
            raise ValueError("profile needs at least one voter")
        m = len(orderings[0])
        for o in orderings:
            if sorted(o) != list(range(m)):
                raise ValueError(f"ordering {o} is not a permutation of 0..{m - 1}")
        object.__setattr__(self, "orderings", orderings)

    @property
    def n(self) -> int:
        return len(self.orderings)

    @property
    def m(self) -> int:
        return len(self.orderings[0])

    def replace(self, voter: int, ordering: Sequence[int]) -> "OrdinalProfile":
        orderings = list(self.orderings)
        orderings[voter] = tuple(ordering)
        return OrdinalProfile(tuple(orderings))


@dataclass(frozen=True)
class VotingRule:
    kind: str
    dictator: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in RULE_KINDS:
            raise ValueError(f"unknown rule {self.kind!r}; expected one of {', '.join(RULE_KINDS)}")
        if (self.kind == "dictatorship") != (self.dictator is not None):
            raise ValueError("a dictator id is required for dictatorship and only for it")

    def __str__(self) -> str:
        return self.kind if self.dictator is None else f"{self.kind}({self.dictator})"


@dataclass(frozen=True)
class GsWitness:
    profile: OrdinalProfile
    voter: int
    misreport: tuple[int, ...]
    truthful_winner: int
    manipulated_winner: int


@dataclass(frozen=True)
class GsScanResult:
    rule: VotingRule
    n: int
    m: int
    total_profiles: int
    manipulable_profiles: int
    example: Optional[GsWitness]


def _lowest_argmax(scores: Sequence[int]) -> int:
    best = max(scores)
    return scores.index(best)


def evaluate_rule(rule: VotingRule, profile: OrdinalProfile) -> int:
    m = profile.m
    if rule.kind == "dictatorship":
        if not 0 <= rule.dictator < profile.n:
            raise ValueError(f"dictator {rule.dictator} not in 0..{profile.n - 1}")
        return profile.orderings[rule.dictator][0]
    scores = [0] * m
    for ordering in profile.orderings:
        if rule.kind == "plurality":
            scores[ordering[0]] += 1
        else:
            for rank, alt in enumerate(ordering):
                scores[alt] += m - 1 - rank
    return _lowest_argmax(scores)


def all_profiles(n: int, m: int) -> Iterator[OrdinalProfile]:
    orders = list(itertools.permutations(range(m)))
    for combo in itertools.product(orders, repeat=n):
        yield OrdinalProfile(combo)


def find_manipulation(rule: VotingRule, profile: OrdinalProfile) -> Optional[GsWitness]:
    """First (voter, misreport) that profits at this profile, if any."""
    winner = evaluate_rule(rule, profile)
    for voter, truth in enumerate(profile.orderings):
        rank = {alt: r for r, alt in enumerate(truth)}
        if rank[winner] == 0:
            continue
        for lie in itertools.permutations(range(profile.m)):
            if lie == truth:
                continue
            outcome = evaluate_rule(rule, profile.replace(voter, lie))
            if rank[outcome] < rank[winner]:
                return GsWitness(profile, voter, lie, winner, outcome)
    return None


def gs_scan(rule: VotingRule, n: int, m: int = 3, budget: Optional[int] = None) -> GsScanResult:
    if n < 1 or m < 1:
        raise ValueError("need at least one voter and one alternative")
    if rule.dictator is not None and not 0 <= rule.dictator < n:
        raise ValueError(f"dictator {rule.dictator} not in 0..{n - 1}")
    budget = candidate_budget() if budget is None else budget
    total = math.factorial(m) ** n
    work = total * math.factorial(m)
    if work > budget:
        raise BudgetExceeded(f"scan needs {work} evaluations, budget is {budget} (see {BUDGET_ENV})")
    count = 0
    example = None
    for profile in all_profiles(n, m):
        witness = find_manipulation(rule, profile)
        if witness is not None:
            count += 1
            if example is None:
                example = witness
    return GsScanResult(rule, n, m, total, count, example)
