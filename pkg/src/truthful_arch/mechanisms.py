"""The four selection methods: CBAM, dictatorial CBAM, plain dictatorship and VCG.

Every method picks the lowest-index alternative among exact score ties.
CBAM's uncertainty comparison is not modelled; it is pure max-desirability.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from truthful_arch.core import (
    InvalidDictator,
    Mechanism,
    MechanismOutcome,
    Scenario,
    VcgTrace,
    argmax_lowest,
)

ZERO = Fraction(0)


def _check_dictator(scenario: Scenario, dictator: int) -> None:
    if not isinstance(dictator, int) or not 0 <= dictator < scenario.n:
        raise InvalidDictator(f"dictator {dictator!r} not in 0..{scenario.n - 1}")


def _realized(scenario: Scenario, selected: int, basis: str) -> Optional[tuple[Fraction, ...]]:
    """u_i(selected) for every stakeholder, or None when the basis profile is missing."""
    if basis == "reported":
        profiles = scenario.reported
    else:
        profiles = scenario.actual
        if profiles is None:
            return None
    return tuple(p[selected] for p in profiles)


def _zero_payment_outcome(
    mechanism: Mechanism, scenario: Scenario, scores: tuple[Fraction, ...], basis: str
) -> MechanismOutcome:
    selected, tie = argmax_lowest(scores)
    return MechanismOutcome(
        mechanism=mechanism,
        selected=selected,
        scores=scores,
        payments=(ZERO,) * scenario.n,
        net_benefits=_realized(scenario, selected, basis),
        tie=tie,
    )


def cbam_desirability(scenario: Scenario) -> tuple[Fraction, ...]:
    """Average reported benefit over mean cost, per alternative."""
    n = scenario.n
    return tuple(
        sum((p[j] for p in scenario.reported), ZERO) / (n * alt.cost)
        for j, alt in enumerate(scenario.alternatives)
    )


def cbam_select(scenario: Scenario, net_benefit_basis: str = "actual") -> MechanismOutcome:
    return _zero_payment_outcome(Mechanism("cbam"), scenario, cbam_desirability(scenario), net_benefit_basis)


def dictatorial_cbam_select(
    scenario: Scenario, dictator: int, net_benefit_basis: str = "actual"
) -> MechanismOutcome:
    """CBAM where the dictator's report stands in for the average benefit."""
    _check_dictator(scenario, dictator)
    report = scenario.reported[dictator]
    scores = tuple(report[j] / alt.cost for j, alt in enumerate(scenario.alternatives))
    return _zero_payment_outcome(Mechanism("dictatorial-cbam", dictator), scenario, scores, net_benefit_basis)


def dictator_select(scenario: Scenario, dictator: int, net_benefit_basis: str = "actual") -> MechanismOutcome:
    _check_dictator(scenario, dictator)
    scores = scenario.reported[dictator].values
    return _zero_payment_outcome(Mechanism("dictator", dictator), scenario, scores, net_benefit_basis)


def vcg_select(scenario: Scenario, net_benefit_basis: str = "actual") -> tuple[MechanismOutcome, VcgTrace]:
    """Utilitarian choice with Clarke pivot payments.

    For stakeholder i, ``t_plus`` is the others' total at the chosen
    alternative and ``t_minus`` the best total the others could reach on
    their own; the payment is their difference and never positive.
    """
    reported = scenario.reported
    m = scenario.m
    trb = tuple(sum((p[k] for p in reported), ZERO) for k in range(m))
    selected, tie = argmax_lowest(trb)
    t_plus = tuple(trb[selected] - p[selected] for p in reported)
    t_minus = tuple(max(trb[k] - p[k] for k in range(m)) for p in reported)
    payments = tuple(tp - tm for tp, tm in zip(t_plus, t_minus))
    realized = _realized(scenario, selected, net_benefit_basis)
    net = None if realized is None else tuple(u + p for u, p in zip(realized, payments))
    trace = VcgTrace(
        trb=trb,
        selected=selected,
        t_plus=t_plus,
        t_minus=t_minus,
        payments=payments,
        net_benefits=net,
    )
    outcome = MechanismOutcome(
        mechanism=Mechanism("vcg"),
        selected=selected,
        scores=trb,
        payments=payments,
        net_benefits=net,
        tie=tie,
        trace=trace,
    )
    return outcome, trace
