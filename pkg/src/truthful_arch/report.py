"""Tabular reports with exact values, rounded only when rendered."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from truthful_arch.core import MechanismOutcome, Scenario, format_rational
from truthful_arch.gs_demo import GsScanResult
from truthful_arch.strategic import ManipulationReport

FORMATS = ("table-text", "csv", "json")


def round_half_up(value: Fraction, places: int = 2) -> Fraction:
    """Round to ``places`` decimals, halves away from zero."""
    scaled = abs(Fraction(value)) * 10**places
    rounded = Fraction(math.floor(scaled + Fraction(1, 2)), 10**places)
    return -rounded if value < 0 else rounded


def render_number(value: Any, places: int = 2) -> str:
    if not isinstance(value, (int, Fraction)):
        return str(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    rounded = round_half_up(value, places)
    text = f"{abs(rounded.numerator) * 10**places // rounded.denominator:0{places + 1}d}"
    sign = "-" if rounded < 0 else ""
    if places == 0:
        return sign + text
    return f"{sign}{text[:-places]}.{text[-places:]}"


def _exact(value: Any) -> Any:
    if isinstance(value, (int, Fraction)):
        return format_rational(Fraction(value))
    return value


@dataclass
class Table:
    title: str
    columns: list[str]
    rows: list[tuple[str, list[Any]]] = field(default_factory=list)

    def add(self, label: str, values: Sequence[Any]) -> None:
        self.rows.append((label, list(values)))


@dataclass
class Report:
    title: str
    tables: list[Table] = field(default_factory=list)
    notes: list[tuple[str, Any]] = field(default_factory=list)
    rounding: int = 2

    def note(self, key: str, value: Any) -> None:
        self.notes.append((key, value))

    def render(self, fmt: str = "table-text") -> str:
        if fmt == "table-text":
            return self._text()
        if fmt == "csv":
            return self._csv()
        if fmt == "json":
            return self._json()
        raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")

    def _cell(self, value: Any) -> str:
        return render_number(value, self.rounding)

    def _text(self) -> str:
        lines = [self.title, "=" * len(self.title)]
        for key, value in self.notes:
            lines.append(f"{key}: {self._cell(value)}")
        for table in self.tables:
            lines.append("")
            lines.append(table.title)
            header = [""] + table.columns
            body = [[label] + [self._cell(v) for v in values] for label, values in table.rows]
            widths = [max(len(r[c]) for r in [header] + body) for c in range(len(header))]
            for row in [header] + body:
                cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
                lines.append("  ".join(cells).rstrip())
        return "\n".join(lines) + "\n"

    def _csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for key, value in self.notes:
            writer.writerow(["note", key, self._cell(value)])
        for table in self.tables:
            writer.writerow(["table", table.title] + table.columns)
            for label, values in table.rows:
                writer.writerow(["row", label] + [self._cell(v) for v in values])
        return buf.getvalue()

    def _json(self) -> str:
        doc = {
            "title": self.title,
            "notes": {key: {"display": self._cell(v), "exact": _exact(v)} for key, v in self.notes},
            "tables": [
                {
                    "title": t.title,
                    "columns": t.columns,
                    "rows": [
                        {
                            "label": label,
                            "display": [self._cell(v) for v in values],
                            "exact": [_exact(v) for v in values],
                        }
                        for label, values in t.rows
                    ],
                }
                for t in self.tables
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


def outcome_report(scenario: Scenario, outcome: MechanismOutcome, basis: str = "actual") -> Report:
    alt_names = [a.name for a in scenario.alternatives]
    people = [s.name for s in scenario.stakeholders]
    report = Report(f"Mechanism {outcome.mechanism} on {scenario.m} alternatives, {scenario.n} stakeholders")
    report.note("selected", alt_names[outcome.selected])
    report.note("tie", ", ".join(alt_names[k] for k in outcome.tie))

    per_alt = Table("Per alternative", alt_names)
    kind = outcome.mechanism.kind
    if kind == "cbam":
        per_alt.add("Average reported benefit", [
            sum((p[k] for p in scenario.reported), Fraction(0)) / scenario.n for k in range(scenario.m)
        ])
    per_alt.add("Cost", list(scenario.costs))
    score_label = {"vcg": "Total reported benefit", "dictator": "Dictator's report"}.get(kind, "Desirability")
    per_alt.add(score_label, list(outcome.scores))
    report.tables.append(per_alt)

    per_person = Table("Per stakeholder", people)
    if outcome.trace is not None:
        per_person.add("T+", list(outcome.trace.t_plus))
        per_person.add("T-", list(outcome.trace.t_minus))
    per_person.add("Payment", list(outcome.payments))
    if outcome.net_benefits is not None:
        profiles = scenario.reported if basis == "reported" else scenario.actual
        per_person.add(f"Benefit of selected ({basis})", [p[outcome.selected] for p in profiles])
        per_person.add("Net benefit", list(outcome.net_benefits))
    report.tables.append(per_person)
    return report


def manipulation_report(result: ManipulationReport) -> Report:
    query = result.query
    scenario = query.scenario
    alt_names = [a.name for a in scenario.alternatives]
    people = [scenario.stakeholders[i].name for i in query.manipulators]
    report = Report(f"Misreport search against {query.mechanism} ({query.objective})")
    report.note("manipulators", ", ".join(people))
    report.note("grid step", query.grid_step)
    report.note("candidates evaluated", result.search_size)
    report.note("found", "true" if result.found else "false")
    report.note("truthful selection", alt_names[result.truthful_outcome.selected])
    if result.manipulated_outcome is not None:
        report.note("manipulated selection", alt_names[result.manipulated_outcome.selected])
    report.note("truthful value", result.truthful_value)
    report.note("best value", result.best_value)
    report.note("gain", result.gain)

    values = Table("Objective per manipulator", people)
    values.add("Truthful", list(result.truthful_values))
    values.add("Best", list(result.best_values))
    values.add("Gain", list(result.gains))
    report.tables.append(values)
    if result.witness is not None:
        witness = Table("Witness misreport", alt_names)
        actual = scenario.require_actual()
        for i in query.manipulators:
            witness.add(f"{scenario.stakeholders[i].name} actual", list(actual[i].values))
            witness.add(f"{scenario.stakeholders[i].name} reported", list(result.witness[i]))
        report.tables.append(witness)
    return report


def truthfulness_report(scenario: Scenario, results: Sequence[ManipulationReport]) -> Report:
    mechanism = results[0].query.mechanism if results else "?"
    report = Report(f"Unilateral truthfulness check for {mechanism}")
    report.note("grid-truthful", "true" if not any(r.found for r in results) else "false")
    table = Table("Per stakeholder", [s.name for s in scenario.stakeholders])
    table.add("Found", ["yes" if r.found else "no" for r in results])
    table.add("Gain", [r.gain for r in results])
    report.tables.append(table)
    return report


def gs_report(result: GsScanResult, alternative_names: Optional[Sequence[str]] = None) -> Report:
    names = list(alternative_names or [f"a{j}" for j in range(result.m)])
    report = Report(f"Manipulability scan: {result.rule}, n={result.n}, m={result.m}")
    report.note("total profiles", result.total_profiles)
    report.note("manipulable profiles", result.manipulable_profiles)
    example = result.example
    if example is not None:
        table = Table("Witness", [f"rank {r + 1}" for r in range(result.m)])
        for v, ordering in enumerate(example.profile.orderings):
            table.add(f"voter {v} true", [names[a] for a in ordering])
        table.add(f"voter {example.voter} lie", [names[a] for a in example.misreport])
        report.tables.append(table)
        report.note("truthful winner", names[example.truthful_winner])
        report.note("manipulated winner", names[example.manipulated_winner])
    return report
