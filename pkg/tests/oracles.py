"""Independent reference implementations the tests check the engine against.

Everything here is written from the math, not from the package internals:
membership alternatives (interpolation over node lists and a direct piecewise
formula), a brute-force sampled centroid, a from-scratch transcription of the
whole decision pipeline, and seeded random generators for events, traces, and
rule bases.
"""

import json
import random

import numpy as np

EMOTIONS = ("anger", "happiness", "sadness", "surprise", "disgust", "fear")


# --- membership oracles ---------------------------------------------------

def piecewise_membership(shape, params, x):
    """Direct formula for a triangle or trapezoid, step edges when collapsed."""
    if shape == "triangle":
        a, b, c = params
        b2, c2, d = b, b, c
    else:
        a, b2, c2, d = params
    if x < a or x > d:
        return 0.0
    if b2 <= x <= c2:
        return 1.0
    if x < b2:
        return (x - a) / (b2 - a)
    return (d - x) / (d - c2)


def interp_membership(shape, params, xs):
    """np.interp over the shape's node list.

    Coincident nodes (collapsed edges) keep the larger membership, so a
    saturated shoulder is 1.0 at its closed endpoint, matching the step-edge
    reading of a zero-width ramp.
    """
    if shape == "triangle":
        a, b, c = params
        raw = [(a, 0.0), (b, 1.0), (c, 0.0)]
    else:
        a, b, c, d = params
        raw = [(a, 0.0), (b, 1.0), (c, 1.0), (d, 0.0)]
    nodes: list[list[float]] = []
    for x, y in raw:
        if nodes and nodes[-1][0] == x:
            nodes[-1][1] = max(nodes[-1][1], y)
        else:
            nodes.append([x, y])
    nodes_x = [x for x, _ in nodes]
    nodes_y = [y for _, y in nodes]
    return np.interp(xs, nodes_x, nodes_y, left=0.0, right=0.0)


def brute_centroid(universe, clipped_terms, n=100_000):
    """Sampled center of gravity of max-combined clipped sets.

    clipped_terms: list of (shape, params, clip). Returns None when the
    aggregate has no mass anywhere on the grid.
    """
    lo, hi = universe
    xs = np.linspace(lo, hi, n)
    mu = np.zeros_like(xs)
    for shape, params, clip in clipped_terms:
        mu = np.maximum(mu, np.minimum(clip, interp_membership(shape, params, xs)))
    total = float(mu.sum())
    if total == 0.0:
        return None
    return float((xs * mu).sum() / total)


# --- from-scratch pipeline transcription -----------------------------------

_EMOTION_TERMS = {
    "negative": ("trapezoid", (-1.0, -1.0, -1.0, 0.0)),
    "neutral": ("triangle", (-0.5, 0.0, 0.5)),
    "positive": ("trapezoid", (0.0, 1.0, 1.0, 1.0)),
}
_SOUND_TERMS = {
    "low": ("trapezoid", (0.0, 0.0, 0.1, 0.5)),
    "normal": ("triangle", (0.1, 0.5, 0.9)),
    "high": ("trapezoid", (0.5, 0.9, 1.0, 1.0)),
}
_HEAD_TERMS = {
    "normal": ("trapezoid", (0.0, 0.0, 0.0, 25.0)),
    "low": ("triangle", (0.0, 25.0, 45.0)),
    "high": ("trapezoid", (25.0, 45.0, 90.0, 90.0)),
}


def _degrees(terms, x):
    return {name: piecewise_membership(shape, params, x)
            for name, (shape, params) in terms.items()}


def _ramp_centroid(clip, n=20_001):
    """Centroid of min(clip, x) on [0, 1]; the high term of a channel."""
    xs = np.linspace(0.0, 1.0, n)
    mu = np.minimum(clip, xs)
    total = float(mu.sum())
    if total == 0.0:
        return 0.0
    return float((xs * mu).sum() / total)


def naive_decide(probs, sound, head, weights=(0.25, 0.5, 0.25), threshold=0.5):
    """Whole pipeline, re-derived: returns (actions, expression, c_o)."""
    valence = probs[1] - (probs[0] + probs[2] + probs[3] + probs[4] + probs[5])
    e = _degrees(_EMOTION_TERMS, valence)
    s = _degrees(_SOUND_TERMS, sound)
    h = _degrees(_HEAD_TERMS, head)

    strengths = {
        1: e["negative"],
        2: e["neutral"],
        3: e["positive"],
        4: min(s["low"], h["low"]),
        5: s["normal"],
        6: min(s["high"], e["negative"]),
        7: h["low"],
        8: h["normal"],
        9: min(h["high"], s["low"]),
    }
    alert_clip = max(strengths[r] for r in (1, 4, 6, 7, 9))
    record_clip = max(strengths.values())
    smile_clip = strengths[3]

    x_fkbs = {
        "call_nurses": _ramp_centroid(alert_clip) if alert_clip > 0 else 0.0,
        "record_data": _ramp_centroid(record_clip) if record_clip > 0 else 0.0,
        "smile": _ramp_centroid(smile_clip) if smile_clip > 0 else 0.0,
    }
    x_ea = {
        "call_nurses": max(0.0, -valence),
        "record_data": 1.0,
        "smile": max(0.0, valence),
    }
    x_p = {
        "call_nurses": max(1.0 - sound, 1.0 - h["normal"]),
        "record_data": 1.0,
        "smile": 0.0,
    }
    w_ea, w_fkbs, w_p = weights
    c_o = {ch: w_ea * x_ea[ch] + w_fkbs * x_fkbs[ch] + w_p * x_p[ch]
           for ch in ("call_nurses", "record_data", "smile")}

    actions = {"record_data"}
    if c_o["call_nurses"] >= threshold:
        actions |= {"call_nurses", "no_action"}
    if "call_nurses" not in actions and c_o["smile"] >= threshold:
        expression = "smile"
    else:
        expression = "neutral"
    return actions, expression, c_o


# --- random generators ------------------------------------------------------

def random_probs(rng: random.Random):
    raw = [rng.random() for _ in range(6)]
    total = sum(raw)
    return tuple(value / total for value in raw)


def random_event_fields(rng: random.Random, timestamp=0.0, subject="subj"):
    return {
        "timestamp": timestamp,
        "subject_id": subject,
        "emotion_probs": list(random_probs(rng)),
        "sound_norm": rng.random(),
        "head_angle_deg": rng.random() * 90.0,
    }


def write_random_trace(path, rng: random.Random, count, subject="subj"):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps({"schema_version": 1, "subjects": [subject]}) + "\n")
        for i in range(count):
            fields = random_event_fields(rng, timestamp=float(i * 100), subject=subject)
            handle.write(json.dumps(fields) + "\n")


_NAME_ALPHA = "abcdefghijklmnopqrstuvwxyz"


def _random_name(rng: random.Random, taken):
    while True:
        name = "".join(rng.choice(_NAME_ALPHA) for _ in range(rng.randint(3, 8)))
        if name not in taken and name not in {"if", "then", "is", "and", "or",
                                              "rule", "var", "weight"}:
            taken.add(name)
            return name


def random_rulebase_text(rng: random.Random) -> str:
    """A syntactically and semantically valid random rule file."""
    taken = set()
    variables = {}
    for _ in range(rng.randint(1, 4)):
        var = _random_name(rng, taken)
        variables[var] = [_random_name(rng, taken) for _ in range(rng.randint(2, 4))]
    actions = ["no_action", "call_nurses", "record_data"]
    expressions = ["neutral", "smile"]

    def condition(depth):
        if depth <= 0 or rng.random() < 0.4:
            var = rng.choice(sorted(variables))
            term = rng.choice(variables[var])
            return f"{var} IS {term}"
        op = rng.choice(["AND", "OR"])
        left = condition(depth - 1)
        right = condition(depth - 1)
        text = f"{left} {op} {right}"
        if rng.random() < 0.5:
            text = f"({text})"
        return text

    lines = [f"VAR {var}: {', '.join(terms)}" for var, terms in variables.items()]
    lines.append("")
    used_ids = set()
    for _ in range(rng.randint(1, 8)):
        rule_id = rng.randint(1, 500)
        while rule_id in used_ids:
            rule_id = rng.randint(1, 500)
        used_ids.add(rule_id)
        chosen_actions = rng.sample(actions, rng.randint(0, len(actions)))
        chosen_expr = rng.choice(expressions + [None])
        if not chosen_actions and chosen_expr is None:
            chosen_actions = ["record_data"]
        items = list(chosen_actions)
        if chosen_expr is not None:
            items.append(chosen_expr)
        rng.shuffle(items)
        weight = ""
        if rng.random() < 0.3:
            weight = f" WEIGHT {round(rng.uniform(0.05, 1.0), 3):g}"
        lines.append(f"RULE {rule_id}{weight}: IF {condition(2)} THEN {', '.join(items)}")
    return "\n".join(lines) + "\n"
