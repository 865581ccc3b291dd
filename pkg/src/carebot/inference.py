"""Rule evaluation and weighted center-of-gravity defuzzification.

Classic max-min composition: antecedent firing strengths fold atom degrees
with min (AND) and max (OR); each fired rule clips its consequent terms at
the firing strength (scaled by the rule weight); clipped sets are combined
per output variable by max; the combined set is collapsed to a crisp value
by a sampled weighted centroid.

The discrete consequent vocabulary is mapped onto continuous intensity
channels, one output variable per action, each on [0, 1] with low/high
ramp terms. A rule consequent asserts the high term of every channel it
names (expression ``neutral`` asserts the low term of the expression
channel). The behavior module later thresholds these intensities back to
discrete actions.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EvaluationError
from .fuzzy import FuzzifiedValue, LinguisticVariable, membership_grid, trapezoid
from .rules import Atom, Condition, Consequent, Rule, RuleBase

DEFAULT_RESOLUTION = 1001

# Appraisal channel -> output variable carrying its rule-driven intensity.
CHANNEL_OUTPUTS = {
    "call_nurses": "call_nurses_intensity",
    "record_data": "record_intensity",
    "smile": "expression_intensity",
}
ACTION_CHANNELS = tuple(CHANNEL_OUTPUTS)


@dataclass(frozen=True)
class FiringRecord:
    """How strongly one rule fired, with per-atom degrees for provenance."""

    rule_id: int
    strength: float
    atom_degrees: tuple[tuple[str, str, float], ...]


@dataclass(frozen=True)
class AggregatedOutput:
    """Combined clipped consequent set for one output variable."""

    variable: str
    degrees: dict[str, float]
    contributing: tuple[int, ...]


@dataclass(frozen=True)
class CrispOutput:
    variable: str
    value: float
    degenerate: bool = False


def default_output_variables() -> dict[str, LinguisticVariable]:
    """One intensity variable per action channel, ramp terms low/high on [0, 1]."""
    variables = {}
    for name in CHANNEL_OUTPUTS.values():
        variables[name] = LinguisticVariable(
            name=name,
            universe=(0.0, 1.0),
            terms=(
                ("low", trapezoid(0.0, 0.0, 0.0, 1.0)),
                ("high", trapezoid(0.0, 1.0, 1.0, 1.0)),
            ),
        )
    return variables


def consequent_assertions(consequent: Consequent) -> tuple[tuple[str, str], ...]:
    """(output variable, term) pairs asserted by a consequent.

    no_action asserts nothing: it is derived from the alerting decision
    downstream rather than carried on its own channel.
    """
    assertions = []
    for action in consequent.actions:
        if action == "call_nurses":
            assertions.append((CHANNEL_OUTPUTS["call_nurses"], "high"))
        elif action == "record_data":
            assertions.append((CHANNEL_OUTPUTS["record_data"], "high"))
    if consequent.expression == "smile":
        assertions.append((CHANNEL_OUTPUTS["smile"], "high"))
    elif consequent.expression == "neutral":
        assertions.append((CHANNEL_OUTPUTS["smile"], "low"))
    return tuple(sorted(assertions))


def _condition_strength(node: Condition, inputs: dict[str, FuzzifiedValue],
                        rule: Rule, atoms: list) -> float:
    if isinstance(node, Atom):
        fuzzified = inputs.get(node.variable)
        if fuzzified is None:
            raise EvaluationError(
                f"rule {rule.id}: no input for variable {node.variable!r}"
            )
        if node.term not in fuzzified.degrees:
            raise EvaluationError(
                f"rule {rule.id}: input for {node.variable!r} has no term {node.term!r}"
            )
        degree = fuzzified.degrees[node.term]
        atoms.append((node.variable, node.term, degree))
        return degree
    left = _condition_strength(node.left, inputs, rule, atoms)
    right = _condition_strength(node.right, inputs, rule, atoms)
    return min(left, right) if node.op == "AND" else max(left, right)


def fire_rules(rb: RuleBase, inputs: dict[str, FuzzifiedValue]) -> list[FiringRecord]:
    """Evaluate every rule's antecedent; one record per rule, ordered by id."""
    records = []
    for rule in sorted(rb.rules, key=lambda r: r.id):
        atoms: list[tuple[str, str, float]] = []
        strength = _condition_strength(rule.antecedent, inputs, rule, atoms)
        records.append(FiringRecord(rule.id, strength, tuple(atoms)))
    return records


def aggregate(firings: list[FiringRecord], rb: RuleBase,
              output_var: LinguisticVariable) -> AggregatedOutput:
    """Max-combine the clipped consequent sets landing on one output variable.

    A variable no rule asserts comes back with all-zero degrees — that is
    the "no evidence" case, not an error.
    """
    strengths = {f.rule_id: f.strength for f in firings}
    degrees = {term: 0.0 for term in output_var.term_names}
    contributing = []
    for rule in rb.rules:
        if rule.id not in strengths:
            continue
        clipped = min(strengths[rule.id], 1.0) * rule.weight
        for variable, term in consequent_assertions(rule.consequent):
            if variable != output_var.name:
                continue
            if term not in degrees:
                raise ConfigError(
                    f"rule {rule.id} asserts unknown term {term!r} on {variable!r}"
                )
            degrees[term] = max(degrees[term], clipped)
            if clipped > 0.0:
                contributing.append(rule.id)
    return AggregatedOutput(
        variable=output_var.name,
        degrees=degrees,
        contributing=tuple(sorted(set(contributing))),
    )


def defuzzify_wcog(agg: AggregatedOutput, var: LinguisticVariable,
                   resolution: int = DEFAULT_RESOLUTION) -> CrispOutput:
    """Weighted center of gravity over a uniformly sampled universe.

    The combined membership at x is the max over terms of the term's
    membership clipped at its aggregated degree. All-zero membership has no
    centroid; the universe midpoint is returned with the degenerate flag set
    so downstream arbitration can treat it as "no evidence".
    """
    if resolution < 2:
        raise ConfigError(f"defuzzification resolution must be >= 2, got {resolution}")
    if agg.variable != var.name:
        raise ConfigError(
            f"aggregated output is for {agg.variable!r}, not {var.name!r}"
        )
    lo, hi = var.universe
    xs = np.linspace(lo, hi, resolution)
    mu = np.zeros(resolution)
    for term, mf in var.terms:
        clip = agg.degrees.get(term, 0.0)
        if clip > 0.0:
            mu = np.maximum(mu, np.minimum(clip, membership_grid(mf, xs)))
    total = float(mu.sum())
    if total == 0.0:
        return CrispOutput(var.name, var.midpoint, degenerate=True)
    value = float((xs * mu).sum() / total)
    return CrispOutput(var.name, min(max(value, lo), hi), degenerate=False)
