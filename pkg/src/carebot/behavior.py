"""Decision pipeline and append-only decision log.

The engine turns one perception event into one discrete decision through a
fixed pipeline: fuzzify the crisp inputs, fire the rule base, aggregate and
defuzzify each action channel, blend the three appraisal routes, threshold
the fused activations, and arbitrate conflicts (alerting outranks affect
display). Every decision is written to a line-delimited log that is only
ever appended to.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .appraisal import (AppraisalWeights, ChannelActivations, DEFAULT_WEIGHTS,
                        ea_activations, fuse, p_activations)
from .errors import ConfigError, Diagnostic, ValidationError
from .fuzzy import (LinguisticVariable, default_input_variables, fuzzify,
                    valence_score)
from .inference import (ACTION_CHANNELS, CHANNEL_OUTPUTS, DEFAULT_RESOLUTION,
                        aggregate, default_output_variables, defuzzify_wcog,
                        fire_rules)
from .perception import PerceptionEvent
from .rules import ACTIONS, EXPRESSIONS, RuleBase, default_rulebase

DEFAULT_THRESHOLD = 0.5


def default_thresholds() -> dict[str, float]:
    return {channel: DEFAULT_THRESHOLD for channel in ACTION_CHANNELS}


def crisp_inputs(event: PerceptionEvent) -> dict[str, float]:
    """Map an event onto the rule vocabulary's crisp input values."""
    return {
        "emotion": valence_score(event.emotion_probs),
        "sound": event.sound_norm,
        "head_angle": event.head_angle_deg,
    }


@dataclass(frozen=True)
class BehaviorDecision:
    """Discrete outcome for one event, with the evidence that produced it."""

    timestamp: float
    subject_id: str
    actions: tuple[str, ...]
    expression: str
    fired_rules: tuple[tuple[int, float], ...]
    c_o: dict[str, float]
    degenerate_flags: dict[str, bool]
    clamped_inputs: tuple[str, ...] = ()
    valence: float = 0.0

    def __post_init__(self):
        if "record_data" not in self.actions:
            raise ValidationError("decision must always include record_data")
        if ("no_action" in self.actions) != ("call_nurses" in self.actions):
            raise ValidationError("no_action must accompany call_nurses exactly")
        if self.expression not in EXPRESSIONS:
            raise ValidationError(f"unknown expression {self.expression!r}")
        if self.expression == "smile" and "call_nurses" in self.actions:
            raise ValidationError("smile and call_nurses must not co-occur")

    @property
    def alerting(self) -> bool:
        return "call_nurses" in self.actions

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "subject_id": self.subject_id,
            "actions": list(self.actions),
            "expression": self.expression,
            "fired_rules": [[rid, strength] for rid, strength in self.fired_rules],
            "c_o": dict(self.c_o),
            "degenerate_flags": dict(self.degenerate_flags),
            "clamped_inputs": list(self.clamped_inputs),
            "valence": self.valence,
        }


@dataclass
class Engine:
    """Validated bundle of everything decide() needs, plus decide() itself."""

    rulebase: RuleBase
    input_variables: dict[str, LinguisticVariable]
    output_variables: dict[str, LinguisticVariable]
    weights: AppraisalWeights = DEFAULT_WEIGHTS
    thresholds: dict[str, float] = field(default_factory=default_thresholds)
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if set(self.thresholds) != set(ACTION_CHANNELS):
            raise ConfigError(
                f"thresholds must cover channels {sorted(ACTION_CHANNELS)}, "
                f"got {sorted(self.thresholds)}"
            )
        for channel, value in self.thresholds.items():
            if not (isinstance(value, (int, float)) and math.isfinite(value)
                    and 0.0 < value < 1.0):
                raise ConfigError(f"threshold for {channel} must be in (0, 1), got {value!r}")
        if self.resolution < 2:
            raise ConfigError(f"resolution must be >= 2, got {self.resolution}")
        for name, terms in self.rulebase.variables.items():
            var = self.input_variables.get(name)
            if var is None:
                raise ConfigError(f"rule base uses variable {name!r} with no definition")
            missing = set(terms) - set(var.term_names)
            if missing:
                raise ConfigError(
                    f"variable {name!r} is missing terms {sorted(missing)} used by the rule base"
                )
        for channel, var_name in CHANNEL_OUTPUTS.items():
            if var_name not in self.output_variables:
                raise ConfigError(f"missing output variable {var_name!r} for channel {channel}")

    @classmethod
    def default(cls, weights: AppraisalWeights = DEFAULT_WEIGHTS,
                thresholds: dict[str, float] | None = None,
                resolution: int = DEFAULT_RESOLUTION,
                rulebase: RuleBase | None = None) -> "Engine":
        return cls(
            rulebase=rulebase if rulebase is not None else default_rulebase(),
            input_variables=default_input_variables(),
            output_variables=default_output_variables(),
            weights=weights,
            thresholds=thresholds if thresholds is not None else default_thresholds(),
            resolution=resolution,
        )

    def decide(self, event: PerceptionEvent) -> BehaviorDecision:
        crisp = crisp_inputs(event)
        fuzzified = {}
        clamped = []
        for name, var in sorted(self.input_variables.items()):
            if name not in crisp:
                raise ConfigError(f"no event field feeds input variable {name!r}")
            fuzzified[name] = fuzzify(var, crisp[name])
            if fuzzified[name].clamped:
                clamped.append(name)

        firings = fire_rules(self.rulebase, fuzzified)

        x_fkbs = {}
        degenerate = {}
        for channel in ACTION_CHANNELS:
            var = self.output_variables[CHANNEL_OUTPUTS[channel]]
            agg = aggregate(firings, self.rulebase, var)
            out = defuzzify_wcog(agg, var, self.resolution)
            # No rule pushed on this channel: treat as zero drive, not as the
            # universe midpoint the fallback defuzzifier reports.
            x_fkbs[channel] = 0.0 if out.degenerate else out.value
            degenerate[channel] = out.degenerate

        valence = crisp["emotion"]
        activations = ChannelActivations(
            x_ea=ea_activations(valence, event.emotion_probs),
            x_fkbs=x_fkbs,
            x_p=p_activations(event, head_var=self.input_variables.get("head_angle")),
        )
        cognitive = fuse(self.weights, activations)
        c_o = cognitive.c_o

        # record_data is unconditional: every stock rule logs, and a care
        # record with holes is worse than a noisy one.
        chosen = {"record_data"}
        if c_o["call_nurses"] >= self.thresholds["call_nurses"]:
            chosen.add("call_nurses")
            chosen.add("no_action")
        actions = tuple(a for a in ACTIONS if a in chosen)

        if "call_nurses" not in chosen and c_o["smile"] >= self.thresholds["smile"]:
            expression = "smile"
        else:
            expression = "neutral"

        fired = tuple((f.rule_id, f.strength) for f in firings if f.strength > 0.0)
        return BehaviorDecision(
            timestamp=event.timestamp,
            subject_id=event.subject_id,
            actions=actions,
            expression=expression,
            fired_rules=fired,
            c_o=c_o,
            degenerate_flags=degenerate,
            clamped_inputs=tuple(clamped),
            valence=valence,
        )


def decision_record(event: PerceptionEvent, decision: BehaviorDecision) -> dict:
    """Flat log record: the event snapshot plus every decision field."""
    record = event.to_dict()
    record.update(decision.to_dict())
    return record


def serialize_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True)


class EventLog:
    """Append-only JSONL decision log with monotone timestamps."""

    def __init__(self, path):
        self.path = Path(path)
        self._count = 0
        self._last_timestamp = None
        if self.path.exists():
            with open(self.path, "r", encoding="utf-8", errors="replace") as handle:
                for line in handle:
                    if not line.strip():
                        continue
                    self._count += 1
                    try:
                        obj = json.loads(line)
                        ts = obj.get("timestamp")
                        if isinstance(ts, (int, float)):
                            self._last_timestamp = ts
                    except json.JSONDecodeError:
                        pass
        self._handle = open(self.path, "a", encoding="utf-8")

    def append(self, event: PerceptionEvent, decision: BehaviorDecision) -> int:
        """Durably append one record; returns its 1-based position."""
        if self._handle.closed:
            raise ValidationError("log is closed")
        if self._last_timestamp is not None and decision.timestamp < self._last_timestamp:
            raise ValidationError(
                f"log timestamps must be non-decreasing, "
                f"{decision.timestamp} after {self._last_timestamp}"
            )
        line = serialize_record(decision_record(event, decision))
        self._handle.write(line + "\n")
        self._handle.flush()
        self._count += 1
        self._last_timestamp = decision.timestamp
        return self._count

    def close(self):
        if not self._handle.closed:
            self._handle.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False

    def __len__(self):
        return self._count


def log_append(log: EventLog, event: PerceptionEvent,
               decision: BehaviorDecision) -> int:
    return log.append(event, decision)


def log_read(path, start: float | None = None, end: float | None = None,
             subject: str | None = None) -> tuple[list[dict], list[Diagnostic]]:
    """Read a decision log back, tolerating damage.

    Corrupt lines become positioned diagnostics; every intact record is
    still returned, filtered to the requested time window and subject and
    ordered by timestamp.
    """
    records = []
    diagnostics = []
    with open(path, "r", encoding="utf-8", errors="replace") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                diagnostics.append(Diagnostic(line_no, err.colno, "corrupt",
                                              f"invalid JSON: {err.msg}"))
                continue
            if not isinstance(obj, dict) or not isinstance(obj.get("timestamp"), (int, float)) \
                    or not isinstance(obj.get("subject_id"), str):
                diagnostics.append(Diagnostic(line_no, 1, "corrupt",
                                              "record lacks timestamp/subject_id"))
                continue
            records.append(obj)
    if start is not None:
        records = [r for r in records if r["timestamp"] >= start]
    if end is not None:
        records = [r for r in records if r["timestamp"] <= end]
    if subject is not None:
        records = [r for r in records if r["subject_id"] == subject]
    records.sort(key=lambda r: r["timestamp"])
    return records, diagnostics
