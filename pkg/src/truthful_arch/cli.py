"""Command-line entry point: ``truthful-arch select | analyze | verify | gs-scan``."""

from __future__ import annotations

import json
import sys
from importlib import resources
from pathlib import Path
from typing import NoReturn, Optional

import click

from truthful_arch.core import (
    InvalidDictator,
    Mechanism,
    NET_BENEFIT_BASES,
    Scenario,
    ScenarioError,
    UnknownMechanism,
    apply_mechanism,
    validate_scenario,
)
from truthful_arch.gs_demo import RULE_KINDS, BudgetExceeded, VotingRule, gs_scan
from truthful_arch.report import FORMATS, gs_report, manipulation_report, outcome_report, truthfulness_report
from truthful_arch.strategic import OBJECTIVES, GridTooFine, ManipulationQuery, search, verify_truthfulness

EXIT_INPUT_ERROR = 2


def fail(message: str) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INPUT_ERROR)


def bundled_fixtures() -> list[str]:
    root = resources.files("truthful_arch") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(path: str) -> Scenario:
    """Read a scenario file; bare names like ``table1.json`` fall back to the bundled fixtures."""
    file = Path(path)
    if file.is_file():
        text = file.read_text()
    else:
        name = file.name if file.name.endswith(".json") else f"{file.name}.json"
        if file.parent != Path(".") or name not in bundled_fixtures():
            fail(f"scenario file not found: {path}")
        text = (resources.files("truthful_arch") / "fixtures" / name).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        fail(f"cannot parse {path} as JSON: {exc}")
    try:
        return validate_scenario(raw)
    except (ScenarioError, TypeError) as exc:
        fail(f"invalid scenario {path}: {type(exc).__name__}: {exc}")


def parse_mechanism(text: str, dictator: Optional[int]) -> Mechanism:
    try:
        return Mechanism.parse(text, dictator)
    except (UnknownMechanism, InvalidDictator) as exc:
        fail(f"{type(exc).__name__}: {exc}")


mechanism_option = click.option(
    "--mechanism", "mechanism_text", required=True,
    help="cbam, dictatorial-cbam, dictator or vcg; dictator variants accept e.g. dictator(1).",
)
dictator_option = click.option("--dictator", type=int, default=None, help="Zero-based dictator stakeholder id.")
scenario_option = click.option(
    "--scenario", "scenario_path", required=True, help="Scenario JSON file or bundled fixture name."
)
format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default="table-text", show_default=True)
rounding_option = click.option("--rounding", type=int, default=2, show_default=True, help="Displayed decimals.")


@click.group()
def main() -> None:
    """Architecture selection under strategic stakeholders."""


@main.command()
@mechanism_option
@dictator_option
@scenario_option
@click.option("--net-benefit-basis", type=click.Choice(NET_BENEFIT_BASES), default="actual", show_default=True)
@format_option
@rounding_option
def select(mechanism_text, dictator, scenario_path, net_benefit_basis, fmt, rounding):
    """Run one mechanism on the reported benefits."""
    scenario = load_scenario(scenario_path)
    mechanism = parse_mechanism(mechanism_text, dictator)
    try:
        outcome = apply_mechanism(mechanism, scenario, net_benefit_basis)
    except (InvalidDictator, ScenarioError) as exc:
        fail(f"{type(exc).__name__}: {exc}")
    report = outcome_report(scenario, outcome, net_benefit_basis)
    report.rounding = rounding
    click.echo(report.render(fmt), nl=False)


@main.command()
@mechanism_option
@dictator_option
@scenario_option
@click.option("--manipulators", required=True, help="Comma-separated zero-based stakeholder ids.")
@click.option("--objective", type=click.Choice(OBJECTIVES), default=None,
              help="Defaults to net_benefit for vcg, benefit otherwise.")
@click.option("--grid-step", default="10", show_default=True, help="Rational step dividing 200.")
@click.option("--weak", is_flag=True, help="Coalition succeeds if nobody loses and someone gains.")
@click.option("--workers", type=int, default=1, show_default=True)
@format_option
@rounding_option
def analyze(mechanism_text, dictator, scenario_path, manipulators, objective, grid_step, weak, workers, fmt,
            rounding):
    """Search for profitable misreports by one stakeholder or a coalition."""
    scenario = load_scenario(scenario_path)
    mechanism = parse_mechanism(mechanism_text, dictator)
    try:
        ids = tuple(int(x) for x in manipulators.split(",") if x.strip())
        query = ManipulationQuery(mechanism, scenario, ids, objective, grid_step, weak)
        result = search(query, workers=workers)
    except (ScenarioError, GridTooFine, InvalidDictator, ValueError) as exc:
        fail(f"{type(exc).__name__}: {exc}")
    report = manipulation_report(result)
    report.rounding = rounding
    click.echo(report.render(fmt), nl=False)


@main.command()
@mechanism_option
@dictator_option
@scenario_option
@click.option("--objective", type=click.Choice(OBJECTIVES), default=None)
@click.option("--grid-step", default="10", show_default=True)
@format_option
def verify(mechanism_text, dictator, scenario_path, objective, grid_step, fmt):
    """Unilateral misreport search for every stakeholder from all-truthful reports."""
    scenario = load_scenario(scenario_path)
    mechanism = parse_mechanism(mechanism_text, dictator)
    try:
        results = verify_truthfulness(mechanism, scenario, grid_step, objective)
    except (ScenarioError, GridTooFine, InvalidDictator, ValueError) as exc:
        fail(f"{type(exc).__name__}: {exc}")
    click.echo(truthfulness_report(scenario, results).render(fmt), nl=False)


@main.command("gs-scan")
@click.option("--rule", type=click.Choice(RULE_KINDS), required=True)
@click.option("--voters", type=int, required=True)
@click.option("--alternatives", type=int, default=3, show_default=True)
@click.option("--dictator", type=int, default=None)
@format_option
def gs_scan_command(rule, voters, alternatives, dictator, fmt):
    """Count profiles where some voter profits from a false ordering."""
    if rule == "dictatorship" and dictator is None:
        dictator = 0
    try:
        voting_rule = VotingRule(rule, dictator if rule == "dictatorship" else None)
        result = gs_scan(voting_rule, voters, alternatives)
    except BudgetExceeded as exc:
        fail(f"BudgetExceeded: {exc}")
    except ValueError as exc:
        fail(str(exc))
    click.echo(gs_report(result).render(fmt), nl=False)


if __name__ == "__main__":
    main()
