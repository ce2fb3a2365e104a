"""Synthetic agents over a circular hue space.

Each agent judges six color terms by hue intervals: assent inside the
interval, dissent outside, with a background noise process that first
neutralizes a fraction of verdicts and then flips a fraction of the
surviving decided ones. Noise draws are keyed by (seed, agent, term,
event, epoch), so repeated queries of the same key repeat exactly and
results never depend on query order.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

from .ledger import Verdict
from .seeding import derive_seed, keyed_uniforms

__all__ = [
    "COLOR_TERMS",
    "Condition",
    "SimEvent",
    "HueInterval",
    "NoiseParams",
    "AgentPolicy",
    "SimAgent",
    "UnknownTermError",
    "gen_events",
    "gen_policies",
    "sim_verdict",
    "inject_drift",
    "save_policy",
    "load_policy",
]

COLOR_TERMS = ("red", "orange", "yellow", "green", "blue", "purple")

# Divergence generators, calibrated so measured disagreement lands on the
# documented targets (see experiments.py and the calibration tests):
#   moderate: two terms shifted 30.5 degrees -> ~7.4% overall disagreement
#   high: centers on a 30-degree grid, half-widths from a six-value menu
#         -> ~40.7% overall disagreement, with a 1/72 chance per term of
#         exact agreement (the only way a term certifies in that regime)
MODERATE_DRIFT_SHIFT_DEG = 30.5
MODERATE_DRIFT_TERM_COUNT = 2
HIGH_DIVERGENCE_CENTER_STEP_DEG = 30
HIGH_DIVERGENCE_HALF_WIDTHS_DEG = (13.0, 28.0, 43.0, 58.0, 73.0, 88.0)


class Condition(enum.Enum):
    """Divergence regime used to generate an agent pair."""

    NOISE_ONLY = "noise-only"
    MODERATE_DRIFT = "moderate"
    HIGH_DIVERGENCE = "high"


class UnknownTermError(KeyError):
    """Queried term is not part of the policy's vocabulary."""


@dataclass(frozen=True)
class SimEvent:
    """A generated event: position in circular hue space, degrees in [0, 360)."""

    pei: str
    hue: float

    @property
    def content(self) -> str:
        return json.dumps({"hue": self.hue})


@dataclass(frozen=True)
class HueInterval:
    """An arc of hue space: center and half-width in degrees, wrapping mod 360."""

    center: float
    half_width: float

    def contains(self, hue: float) -> bool:
        dist = abs((hue - self.center) % 360.0)
        dist = min(dist, 360.0 - dist)
        return dist <= self.half_width


@dataclass(frozen=True)
class NoiseParams:
    """Verdict noise: neutralize first, then flip surviving decided verdicts."""

    neutral_rate: float = 0.05
    flip_rate: float = 0.01

    def __post_init__(self) -> None:
        if not 0.0 <= self.neutral_rate <= 1.0:
            raise ValueError(f"neutral_rate must be in [0, 1], got {self.neutral_rate}")
        if not 0.0 <= self.flip_rate <= 1.0:
            raise ValueError(f"flip_rate must be in [0, 1], got {self.flip_rate}")


@dataclass(frozen=True)
class AgentPolicy:
    """An agent's per-term verdict rule plus its noise process and seed."""

    agent_id: str
    intervals: Mapping[str, HueInterval]
    noise: NoiseParams
    seed: int

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "seed": self.seed,
            "noise": {
                "neutral_rate": self.noise.neutral_rate,
                "flip_rate": self.noise.flip_rate,
            },
            "intervals": {
                term: {"center": iv.center, "half_width": iv.half_width}
                for term, iv in self.intervals.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AgentPolicy":
        return cls(
            agent_id=data["agent_id"],
            intervals={
                term: HueInterval(iv["center"], iv["half_width"])
                for term, iv in data["intervals"].items()
            },
            noise=NoiseParams(**data["noise"]),
            seed=data["seed"],
        )


def gen_events(n: int, seed: int) -> list[SimEvent]:
    """Generate n events with hues i.i.d. uniform on [0, 360)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(derive_seed(seed, "events"))
    return [
        SimEvent(pei=f"e{seed:x}-{i:05d}", hue=rng.random() * 360.0)
        for i in range(n)
    ]


def _canonical_intervals() -> dict[str, HueInterval]:
    return {
        term: HueInterval(center=60.0 * i, half_width=30.0)
        for i, term in enumerate(COLOR_TERMS)
    }


def gen_policies(condition: Condition, seed: int, *,
                 noise: NoiseParams = NoiseParams(),
                 drift_terms: int = MODERATE_DRIFT_TERM_COUNT,
                 drift_shift: float = MODERATE_DRIFT_SHIFT_DEG,
                 ) -> tuple[AgentPolicy, AgentPolicy]:
    """Generate the agent pair for a divergence condition.

    noise-only: identical canonical six-band policies.
    moderate: agent A2's intervals for drift_terms terms shifted by
        drift_shift degrees.
    high: both agents draw every interval independently, centers uniform
        on a 30-degree grid and half-widths uniform over a six-value menu.
    """
    rng = random.Random(derive_seed(seed, "policies", condition.value))
    seed1 = derive_seed(seed, "agent", "A1")
    seed2 = derive_seed(seed, "agent", "A2")
    base = _canonical_intervals()

    if condition is Condition.NOISE_ONLY:
        iv1, iv2 = base, dict(base)
    elif condition is Condition.MODERATE_DRIFT:
        iv1 = base
        iv2 = dict(base)
        for term in rng.sample(COLOR_TERMS, drift_terms):
            old = iv2[term]
            iv2[term] = HueInterval((old.center + drift_shift) % 360.0, old.half_width)
    elif condition is Condition.HIGH_DIVERGENCE:
        centers = [float(c) for c in
                   range(0, 360, HIGH_DIVERGENCE_CENTER_STEP_DEG)]
        widths = HIGH_DIVERGENCE_HALF_WIDTHS_DEG
        iv1 = {t: HueInterval(rng.choice(centers), rng.choice(widths))
               for t in COLOR_TERMS}
        iv2 = {t: HueInterval(rng.choice(centers), rng.choice(widths))
               for t in COLOR_TERMS}
    else:  # pragma: no cover
        raise ValueError(f"unknown condition {condition!r}")

    return (
        AgentPolicy("A1", iv1, noise, seed1),
        AgentPolicy("A2", iv2, noise, seed2),
    )


def sim_verdict(policy: AgentPolicy, term: str, event: SimEvent,
                draws: tuple[float, float]) -> Verdict:
    """Evaluate one verdict given two uniform noise draws.

    The base verdict is assent iff the hue lies in the term's interval.
    The first draw may neutralize it; the second may flip a survivor.
    """
    interval = policy.intervals.get(term)
    if interval is None:
        raise UnknownTermError(term)
    base = Verdict.ASSENT if interval.contains(event.hue) else Verdict.DISSENT
    u_neutral, u_flip = draws
    if u_neutral < policy.noise.neutral_rate:
        return Verdict.NEUTRAL
    if u_flip < policy.noise.flip_rate:
        return base.inverted()
    return base


class SimAgent:
    """Verdict provider backed by a hue-interval policy.

    The policy itself is immutable; the agent holds the current policy
    reference and audit-round index. Noise draws are keyed by
    (policy seed, agent id, term, event id, epoch).
    """

    def __init__(self, policy: AgentPolicy, epoch: int = 0):
        self.policy = policy
        self.epoch = epoch

    @property
    def agent_id(self) -> str:
        return self.policy.agent_id

    def verdict(self, term: str, event: SimEvent) -> Verdict:
        draws = keyed_uniforms(self.policy.seed, self.policy.agent_id,
                               term, event.pei, self.epoch)
        return sim_verdict(self.policy, term, event, draws)

    def adopt_term_policy(self, term: str, reference: "SimAgent") -> None:
        """Copy the reference agent's interval for one term.

        The adopter keeps its own noise process and seed, so residual
        divergence after adoption is exactly the noise floor.
        """
        ref_policy = getattr(reference, "policy", None)
        if ref_policy is None or term not in ref_policy.intervals:
            raise ValueError(f"reference provides no interval for term {term!r}")
        intervals = dict(self.policy.intervals)
        intervals[term] = ref_policy.intervals[term]
        self.policy = replace(self.policy, intervals=intervals)


def inject_drift(policy: AgentPolicy, term: str, magnitude: float) -> AgentPolicy:
    """A copy of the policy with one term's interval center shifted."""
    if term not in policy.intervals:
        raise UnknownTermError(term)
    intervals = dict(policy.intervals)
    old = intervals[term]
    intervals[term] = HueInterval((old.center + magnitude) % 360.0, old.half_width)
    return replace(policy, intervals=intervals)


def save_policy(policy: AgentPolicy, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(policy.to_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def load_policy(path: str | Path) -> AgentPolicy:
    return AgentPolicy.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
