"""Domain model for stakeholder-driven architecture selection.

Every benefit, cost, score and payment is a :class:`fractions.Fraction`.
Scenario documents carry decimal strings ("62.33") which are parsed
exactly, so argmax ties are decided without rounding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Optional, Sequence

BENEFIT_MIN = Fraction(-100)
BENEFIT_MAX = Fraction(100)

MECHANISM_KINDS = ("cbam", "dictatorial-cbam", "dictator", "vcg")
NET_BENEFIT_BASES = ("actual", "reported")


class ScenarioError(ValueError):
    """Base class for rejected inputs."""


class BenefitOutOfRange(ScenarioError):
    pass


class NonPositiveCost(ScenarioError):
    pass


class DimensionMismatch(ScenarioError):
    pass


class MissingActualBenefits(ScenarioError):
    pass


class ScoreOutOfRange(ScenarioError):
    pass


class UnknownMechanism(ValueError):
    pass


class InvalidDictator(ValueError):
    pass


def to_rational(value: Any) -> Fraction:
    """Parse a decimal string, integer or Fraction exactly.

    Floats are refused: their binary expansion would leak into tie checks.
    """
    if isinstance(value, bool):
        raise TypeError(f"not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(f"cannot parse number {value!r}") from exc
    raise TypeError(f"expected a decimal string, got {type(value).__name__}: {value!r}")


def format_rational(value: Fraction) -> str:
    """Inverse of :func:`to_rational`: a finite decimal when one exists, else ``p/q``."""
    value = Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    if places == 0:
        return str(value.numerator)
    scaled = value * 10**places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


@dataclass(frozen=True)
class Alternative:
    id: int
    name: str
    cost: Fraction


@dataclass(frozen=True)
class Stakeholder:
    id: int
    name: str


@dataclass(frozen=True)
class BenefitProfile:
    """One stakeholder's benefit for every alternative."""

    stakeholder_id: int
    values: tuple[Fraction, ...]

    def __getitem__(self, alternative: int) -> Fraction:
        return self.values[alternative]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Scenario:
    alternatives: tuple[Alternative, ...]
    stakeholders: tuple[Stakeholder, ...]
    reported: tuple[BenefitProfile, ...]
    actual: Optional[tuple[BenefitProfile, ...]] = None

    @property
    def n(self) -> int:
        return len(self.stakeholders)

    @property
    def m(self) -> int:
        return len(self.alternatives)

    @property
    def costs(self) -> tuple[Fraction, ...]:
        return tuple(a.cost for a in self.alternatives)

    def require_actual(self) -> tuple[BenefitProfile, ...]:
        if self.actual is None:
            raise MissingActualBenefits("scenario has no actual benefits; this operation needs them")
        return self.actual

    def with_reports(self, reports: Mapping[int, Sequence[Any]]) -> "Scenario":
        """Copy of the scenario with some stakeholders' reported rows replaced."""
        rows = [list(p.values) for p in self.reported]
        for i, values in reports.items():
            rows[i] = list(values)
        return build_scenario(
            costs=self.costs,
            reported=rows,
            actual=None if self.actual is None else [p.values for p in self.actual],
            alternative_names=[a.name for a in self.alternatives],
            stakeholder_names=[s.name for s in self.stakeholders],
        )

    def truthful(self) -> "Scenario":
        """Copy in which everyone reports their actual benefits."""
        actual = self.require_actual()
        return self.with_reports({p.stakeholder_id: p.values for p in actual})


@dataclass(frozen=True)
class Mechanism:
    """A selection method plus its parameters (only dictator variants take one)."""

    kind: str
    dictator: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in MECHANISM_KINDS:
            raise UnknownMechanism(
                f"unknown mechanism {self.kind!r}; expected one of {', '.join(MECHANISM_KINDS)}"
            )
        needs_dictator = self.kind in ("dictatorial-cbam", "dictator")
        if needs_dictator and self.dictator is None:
            raise InvalidDictator(f"mechanism {self.kind!r} needs a dictator id")
        if not needs_dictator and self.dictator is not None:
            raise InvalidDictator(f"mechanism {self.kind!r} takes no dictator")

    @property
    def has_payments(self) -> bool:
        return self.kind == "vcg"

    @classmethod
    def parse(cls, text: str, dictator: Optional[int] = None) -> "Mechanism":
        """Accepts ``"vcg"``, ``"dictator(1)"`` or ``"dictator"`` plus an explicit id."""
        match = re.fullmatch(r"\s*([a-z-]+)\s*(?:\(\s*(-?\d+)\s*\))?\s*", text)
        if match is None:
            raise UnknownMechanism(f"cannot parse mechanism {text!r}")
        kind, arg = match.groups()
        if arg is not None:
            if dictator is not None and dictator != int(arg):
                raise InvalidDictator(f"conflicting dictator ids in {text!r} and {dictator}")
            dictator = int(arg)
        return cls(kind, dictator)

    def __str__(self) -> str:
        return self.kind if self.dictator is None else f"{self.kind}({self.dictator})"


@dataclass(frozen=True)
class VcgTrace:
    trb: tuple[Fraction, ...]
    selected: int
    t_plus: tuple[Fraction, ...]
    t_minus: tuple[Fraction, ...]
    payments: tuple[Fraction, ...]
    net_benefits: Optional[tuple[Fraction, ...]] = None


@dataclass(frozen=True)
class MechanismOutcome:
    mechanism: Mechanism
    selected: int
    scores: tuple[Fraction, ...]
    payments: tuple[Fraction, ...]
    net_benefits: Optional[tuple[Fraction, ...]]
    tie: tuple[int, ...]
    trace: Optional[VcgTrace] = field(default=None, compare=True)


def argmax_lowest(scores: Sequence[Fraction]) -> tuple[int, tuple[int, ...]]:
    """Return (lowest-index argmax, full argmax set) using exact comparison."""
    if not scores:
        raise ValueError("argmax of an empty sequence")
    best = max(scores)
    tie = tuple(k for k, s in enumerate(scores) if s == best)
    return tie[0], tie


def contribution_to_benefit(score: Any) -> Fraction:
    score = to_rational(score)
    if not -1 <= score <= 1:
        raise ScoreOutOfRange(f"contribution score {score} outside [-1, 1]")
    return score * 100


def _profiles(rows: Sequence[Sequence[Any]], m: int, n: int, label: str) -> tuple[BenefitProfile, ...]:
    if len(rows) != n:
        raise DimensionMismatch(f"{label}: expected {n} stakeholder rows, got {len(rows)}")
    profiles = []
    for i, row in enumerate(rows):
        if isinstance(row, (str, bytes)) or len(row) != m:
            raise DimensionMismatch(
                f"{label}[{i}]: expected {m} values, got {len(row) if not isinstance(row, str) else 'a string'}"
            )
        values = tuple(to_rational(v) for v in row)
        for j, v in enumerate(values):
            if not BENEFIT_MIN <= v <= BENEFIT_MAX:
                raise BenefitOutOfRange(f"{label}[{i}][{j}] = {format_rational(v)} outside [-100, 100]")
        profiles.append(BenefitProfile(i, values))
    return tuple(profiles)


def build_scenario(
    costs: Sequence[Any],
    reported: Sequence[Sequence[Any]],
    actual: Optional[Sequence[Sequence[Any]]] = None,
    alternative_names: Optional[Sequence[str]] = None,
    stakeholder_names: Optional[Sequence[str]] = None,
) -> Scenario:
    """Validated Scenario from plain sequences; names default to AS1.. and s1.."""
    m = len(costs)
    n = len(reported)
    if m < 1:
        raise DimensionMismatch("scenario needs at least one alternative")
    if n < 1:
        raise DimensionMismatch("scenario needs at least one stakeholder")
    alternative_names = alternative_names or [f"AS{j + 1}" for j in range(m)]
    stakeholder_names = stakeholder_names or [f"s{i + 1}" for i in range(n)]
    if len(alternative_names) != m or len(stakeholder_names) != n:
        raise DimensionMismatch("name lists do not match scenario dimensions")
    alternatives = []
    for j, (name, cost) in enumerate(zip(alternative_names, costs)):
        cost = to_rational(cost)
        if cost <= 0:
            raise NonPositiveCost(f"alternative {name!r} has cost {format_rational(cost)}; costs must be > 0")
        alternatives.append(Alternative(j, str(name), cost))
    stakeholders = tuple(Stakeholder(i, str(name)) for i, name in enumerate(stakeholder_names))
    return Scenario(
        alternatives=tuple(alternatives),
        stakeholders=stakeholders,
        reported=_profiles(reported, m, n, "reported"),
        actual=None if actual is None else _profiles(actual, m, n, "actual"),
    )


def validate_scenario(raw: Mapping[str, Any]) -> Scenario:
    """Validate a parsed scenario document (see README for the JSON layout)."""
    if not isinstance(raw, Mapping):
        raise ScenarioError("scenario document must be a JSON object")
    for key in ("alternatives", "stakeholders", "reported"):
        if key not in raw:
            raise ScenarioError(f"scenario document is missing {key!r}")
    alternatives = raw["alternatives"]
    stakeholders = raw["stakeholders"]
    try:
        names = [a["name"] for a in alternatives]
        costs = [a["cost"] for a in alternatives]
        people = [s["name"] for s in stakeholders]
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"malformed alternatives/stakeholders entry: {exc}") from exc
    if len(raw["reported"]) != len(people):
        raise DimensionMismatch(
            f"reported: expected {len(people)} stakeholder rows, got {len(raw['reported'])}"
        )
    return build_scenario(
        costs=costs,
        reported=raw["reported"],
        actual=raw.get("actual"),
        alternative_names=names or None,
        stakeholder_names=people or None,
    )


def scenario_to_document(scenario: Scenario) -> dict[str, Any]:
    def rows(profiles: Iterable[BenefitProfile]) -> list[list[str]]:
        return [[format_rational(v) for v in p.values] for p in profiles]

    doc: dict[str, Any] = {
        "alternatives": [{"name": a.name, "cost": format_rational(a.cost)} for a in scenario.alternatives],
        "stakeholders": [{"name": s.name} for s in scenario.stakeholders],
    }
    if scenario.actual is not None:
        doc["actual"] = rows(scenario.actual)
    doc["reported"] = rows(scenario.reported)
    return doc


def apply_mechanism(
    mechanism: Mechanism | str,
    scenario: Scenario,
    net_benefit_basis: str = "actual",
) -> MechanismOutcome:
    """Run one selection method on the scenario's reported benefits.

    ``net_benefit_basis`` picks which profile supplies u_i(selected) in the
    net benefit: the actual one (default, omitted when absent) or the report.
    """
    from truthful_arch import mechanisms

    if isinstance(mechanism, str):
        mechanism = Mechanism.parse(mechanism)
    if net_benefit_basis not in NET_BENEFIT_BASES:
        raise ValueError(f"net_benefit_basis must be one of {NET_BENEFIT_BASES}")
    if mechanism.dictator is not None and not 0 <= mechanism.dictator < scenario.n:
        raise InvalidDictator(f"dictator {mechanism.dictator} not in 0..{scenario.n - 1}")
    if mechanism.kind == "cbam":
        return mechanisms.cbam_select(scenario, net_benefit_basis)
    if mechanism.kind == "dictatorial-cbam":
        return mechanisms.dictatorial_cbam_select(scenario, mechanism.dictator, net_benefit_basis)
    if mechanism.kind == "dictator":
        return mechanisms.dictator_select(scenario, mechanism.dictator, net_benefit_basis)
    outcome, _ = mechanisms.vcg_select(scenario, net_benefit_basis)
    return outcome
