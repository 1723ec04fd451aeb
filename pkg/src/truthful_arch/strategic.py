"""Exhaustive search for profitable misreports.

A manipulator's report ranges over the uniform grid ``-100, -100 + step,
..., 100`` for every alternative.  Candidates are enumerated in
lexicographic order (coalition members in ascending id, each member's
alternatives in order) and the first candidate with the best gain wins.

The inner loop works on integers: every rational in the scenario and the
grid is multiplied by one common denominator, which keeps all comparisons
exact while letting numpy evaluate whole batches of candidates at once.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from truthful_arch.core import (
    BENEFIT_MAX,
    BENEFIT_MIN,
    InvalidDictator,
    Mechanism,
    MechanismOutcome,
    Scenario,
    apply_mechanism,
    to_rational,
)

OBJECTIVES = ("benefit", "net_benefit")
DEFAULT_GRID_STEP = Fraction(10)
DEFAULT_BUDGET = 10**7
BUDGET_ENV = "TRUTHFUL_ARCH_BUDGET"
CHUNK = 1 << 15
_INT64_SAFE = 1 << 62


class GridTooFine(ValueError):
    pass


def candidate_budget() -> int:
    """Search-candidate cap, overridable through ``TRUTHFUL_ARCH_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{BUDGET_ENV} must be positive")
    return value


def default_objective(mechanism: Mechanism) -> str:
    return "net_benefit" if mechanism.has_payments else "benefit"


def grid_points(step: Any) -> tuple[Fraction, ...]:
    step = to_rational(step)
    if step <= 0:
        raise ValueError("grid step must be positive")
    count = (BENEFIT_MAX - BENEFIT_MIN) / step
    if count.denominator != 1:
        raise ValueError(f"grid step {step} does not divide [-100, 100] evenly")
    return tuple(BENEFIT_MIN + k * step for k in range(int(count) + 1))


@dataclass(frozen=True)
class ManipulationQuery:
    mechanism: Mechanism
    scenario: Scenario
    manipulators: tuple[int, ...]
    objective: Optional[str] = None
    grid_step: Fraction = DEFAULT_GRID_STEP
    weak: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.mechanism, str):
            object.__setattr__(self, "mechanism", Mechanism.parse(self.mechanism))
        manipulators = tuple(sorted(set(int(i) for i in self.manipulators)))
        if not manipulators:
            raise ValueError("at least one manipulator is required")
        for i in manipulators:
            if not 0 <= i < self.scenario.n:
                raise ValueError(f"manipulator {i} not in 0..{self.scenario.n - 1}")
        object.__setattr__(self, "manipulators", manipulators)
        objective = self.objective or default_objective(self.mechanism)
        if objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "grid_step", to_rational(self.grid_step))
        grid_points(self.grid_step)
        dictator = self.mechanism.dictator
        if dictator is not None and not 0 <= dictator < self.scenario.n:
            raise InvalidDictator(f"dictator {dictator} not in 0..{self.scenario.n - 1}")
        self.scenario.require_actual()


@dataclass(frozen=True)
class ManipulationReport:
    """Outcome of a misreport search.

    Per-member tuples follow ``manipulators`` order.  ``gain`` is the total
    over the coalition (the single gain for a unilateral search); witnesses
    are ranked by the smallest member gain first, then by ``gain``.
    """

    query: ManipulationQuery
    found: bool
    witness: Optional[dict[int, tuple[Fraction, ...]]]
    truthful_values: tuple[Fraction, ...]
    best_values: tuple[Fraction, ...]
    truthful_outcome: MechanismOutcome
    manipulated_outcome: Optional[MechanismOutcome]
    search_size: int

    @property
    def manipulators(self) -> tuple[int, ...]:
        return self.query.manipulators

    @property
    def gains(self) -> tuple[Fraction, ...]:
        return tuple(b - t for b, t in zip(self.best_values, self.truthful_values))

    @property
    def truthful_value(self) -> Fraction:
        return sum(self.truthful_values, Fraction(0))

    @property
    def best_value(self) -> Fraction:
        return sum(self.best_values, Fraction(0))

    @property
    def gain(self) -> Fraction:
        return self.best_value - self.truthful_value

    @property
    def min_gain(self) -> Fraction:
        return min(self.gains)


def objective_values(
    outcome: MechanismOutcome, scenario: Scenario, members: Iterable[int], objective: str
) -> tuple[Fraction, ...]:
    """Each member's realized objective: actual benefit, plus payment for net benefit."""
    actual = scenario.require_actual()
    values = []
    for i in members:
        value = actual[i][outcome.selected]
        if objective == "net_benefit":
            value += outcome.payments[i]
        values.append(value)
    return tuple(values)


def evaluate_misreport(
    query: ManipulationQuery, reports: dict[int, Sequence[Any]]
) -> tuple[MechanismOutcome, tuple[Fraction, ...]]:
    """Exact single-candidate evaluation through :func:`apply_mechanism`."""
    scenario = query.scenario.with_reports(reports)
    outcome = apply_mechanism(query.mechanism, scenario)
    return outcome, objective_values(outcome, scenario, query.manipulators, query.objective)


def truthful_baseline(query: ManipulationQuery) -> Scenario:
    actual = query.scenario.require_actual()
    return query.scenario.with_reports({i: actual[i].values for i in query.manipulators})


class _IntegerModel:
    """The query rescaled to integers, evaluated on batches of candidates."""

    def __init__(self, query: ManipulationQuery, grid: Sequence[Fraction]):
        scenario = query.scenario
        actual = scenario.require_actual()
        values: list[Fraction] = [v for p in scenario.reported for v in p.values]
        values += [v for p in actual for v in p.values]
        values += list(grid)
        self.scale = math.lcm(*(v.denominator for v in values))
        self.mechanism = query.mechanism
        self.members = list(query.manipulators)
        self.objective = query.objective
        self.n, self.m = scenario.n, scenario.m

        # CBAM keys: d_j * n * L == total_j * q_j * (L / p_j) for cost p_j / q_j
        costs = scenario.costs
        lcm_num = math.lcm(*(c.numerator for c in costs))
        coef = [c.denominator * (lcm_num // c.numerator) for c in costs]
        bound = 100 * self.scale * self.n * max(coef) * 4
        self.dtype: Any = np.int64 if bound < _INT64_SAFE else object

        def ints(rows: Iterable[Sequence[Fraction]]) -> np.ndarray:
            return np.array([[int(v * self.scale) for v in row] for row in rows], dtype=self.dtype)

        self.reported = ints(p.values for p in scenario.reported)
        self.actual = ints(p.values for p in actual)
        self.grid = np.array([int(v * self.scale) for v in grid], dtype=self.dtype)
        self.coef = np.array(coef, dtype=self.dtype)

    def decode(self, indices: np.ndarray) -> np.ndarray:
        """Flat lexicographic indices -> candidate reports, shape (N, members, m)."""
        width = len(self.members) * self.m
        base = len(self.grid)
        digits = np.empty((len(indices), width), dtype=np.int64)
        rest = indices.copy()
        for pos in range(width - 1, -1, -1):
            rest, digits[:, pos] = np.divmod(rest, base)
        return self.grid[digits].reshape(len(indices), len(self.members), self.m)

    def values(self, candidates: np.ndarray) -> np.ndarray:
        """Objective values, shape (N, members), scaled by ``self.scale``."""
        count = len(candidates)
        full = np.broadcast_to(self.reported, (count, self.n, self.m)).copy()
        full[:, self.members, :] = candidates
        kind = self.mechanism.kind
        totals = full.sum(axis=1)
        if kind == "cbam":
            keys = totals * self.coef
        elif kind == "dictatorial-cbam":
            keys = full[:, self.mechanism.dictator, :] * self.coef
        elif kind == "dictator":
            keys = full[:, self.mechanism.dictator, :]
        else:
            keys = totals
        selected = np.argmax(keys, axis=1)
        rows = np.arange(count)
        out = np.empty((count, len(self.members)), dtype=self.dtype)
        for col, i in enumerate(self.members):
            value = self.actual[i][selected]
            if self.objective == "net_benefit" and kind == "vcg":
                others = totals - full[:, i, :]
                value = value + others[rows, selected] - others.max(axis=1)
            out[:, col] = value
        return out


def _best_in_range(
    model: _IntegerModel, truthful: np.ndarray, start: int, stop: int, weak: bool
) -> Optional[tuple[tuple[int, int], int]]:
    """Best ((min_gain, total_gain), index) among successful candidates in [start, stop)."""
    indices = np.arange(start, stop, dtype=np.int64)
    gains = model.values(model.decode(indices)) - truthful
    if weak:
        ok = (gains >= 0).all(axis=1) & (gains > 0).any(axis=1)
    else:
        ok = (gains > 0).all(axis=1)
    if not ok.any():
        return None
    cand = np.flatnonzero(ok)
    min_gain = gains[cand].min(axis=1)
    cand = cand[min_gain == min_gain.max()]
    total = gains[cand].sum(axis=1)
    pos = cand[total == total.max()][0]
    return (int(gains[pos].min()), int(gains[pos].sum())), int(indices[pos])


def _search(query: ManipulationQuery, workers: int = 1) -> ManipulationReport:
    grid = grid_points(query.grid_step)
    width = len(query.manipulators) * query.scenario.m
    size = len(grid) ** width
    budget = candidate_budget()
    if size > budget:
        raise GridTooFine(
            f"{size} candidate reports exceed the budget of {budget}; "
            f"use a coarser grid step or raise {BUDGET_ENV}"
        )

    baseline = truthful_baseline(query)
    truthful_outcome = apply_mechanism(query.mechanism, baseline)
    truthful_values = objective_values(truthful_outcome, baseline, query.manipulators, query.objective)

    model = _IntegerModel(query, grid)
    truthful = np.array([int(v * model.scale) for v in truthful_values], dtype=model.dtype)
    ranges = [(s, min(s + CHUNK, size)) for s in range(0, size, CHUNK)]
    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(lambda r: _best_in_range(model, truthful, *r, query.weak), ranges))
    else:
        partial = [_best_in_range(model, truthful, *r, query.weak) for r in ranges]

    # order-independent reduction: highest key, then lowest index
    hits = [p for p in partial if p is not None]
    if not hits:
        return ManipulationReport(
            query=query,
            found=False,
            witness=None,
            truthful_values=truthful_values,
            best_values=truthful_values,
            truthful_outcome=truthful_outcome,
            manipulated_outcome=None,
            search_size=size,
        )
    _, index = max(hits, key=lambda h: (h[0], -h[1]))
    chosen = model.decode(np.array([index], dtype=np.int64))[0]
    witness = {
        i: tuple(Fraction(int(v), model.scale) for v in row) for i, row in zip(query.manipulators, chosen)
    }
    outcome, best_values = evaluate_misreport(query, witness)
    return ManipulationReport(
        query=query,
        found=True,
        witness=witness,
        truthful_values=truthful_values,
        best_values=best_values,
        truthful_outcome=truthful_outcome,
        manipulated_outcome=outcome,
        search_size=size,
    )


def search_unilateral(query: ManipulationQuery, workers: int = 1) -> ManipulationReport:
    if len(query.manipulators) != 1:
        raise ValueError("unilateral search takes exactly one manipulator")
    return _search(query, workers)


def search_coalition(query: ManipulationQuery, workers: int = 1) -> ManipulationReport:
    """Joint misreport search; success means every member strictly gains (or weakly, with ``weak``)."""
    if len(query.manipulators) < 2:
        raise ValueError("coalition search takes at least two manipulators")
    return _search(query, workers)


def search(query: ManipulationQuery, workers: int = 1) -> ManipulationReport:
    return _search(query, workers)


def verify_truthfulness(
    mechanism: Mechanism | str,
    scenario: Scenario,
    grid_step: Any = DEFAULT_GRID_STEP,
    objective: Optional[str] = None,
    workers: int = 1,
) -> list[ManipulationReport]:
    """Unilateral search for every stakeholder against all-truthful reporting.

    The mechanism is grid-truthful on this scenario iff no report is ``found``.
    """
    baseline = scenario.truthful()
    return [
        search_unilateral(
            ManipulationQuery(
                mechanism=mechanism if isinstance(mechanism, Mechanism) else Mechanism.parse(mechanism),
                scenario=baseline,
                manipulators=(i,),
                objective=objective,
                grid_step=grid_step,
            ),
            workers,
        )
        for i in range(scenario.n)
    ]
