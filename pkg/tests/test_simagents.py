import math

import pytest

from semcert.guard import measure_disagreement
from semcert.ledger import Verdict
from semcert.simagents import (
    COLOR_TERMS,
    HIGH_DIVERGENCE_HALF_WIDTHS_DEG,
    AgentPolicy,
    Condition,
    HueInterval,
    NoiseParams,
    SimAgent,
    SimEvent,
    UnknownTermError,
    gen_events,
    gen_policies,
    inject_drift,
    load_policy,
    save_policy,
    sim_verdict,
)
from semcert.seeding import derive_seed


class TestGenEvents:
    def test_deterministic(self):
        assert gen_events(1000, seed=12) == gen_events(1000, seed=12)

    def test_hue_range_and_mean(self):
        events = gen_events(20000, seed=3)
        hues = [e.hue for e in events]
        assert all(0.0 <= h < 360.0 for h in hues)
        assert abs(sum(hues) / len(hues) - 180.0) < 10.0

    def test_split_has_disjoint_ids(self):
        events = gen_events(1000, seed=5)
        audit, heldout = events[:400], events[400:]
        assert len(audit) == 400 and len(heldout) == 600
        assert not ({e.pei for e in audit} & {e.pei for e in heldout})

    def test_distinct_seeds_distinct_ids(self):
        a = {e.pei for e in gen_events(100, seed=1)}
        b = {e.pei for e in gen_events(100, seed=2)}
        assert not (a & b)


class TestHueInterval:
    def test_wraparound(self):
        iv = HueInterval(center=350.0, half_width=30.0)
        assert iv.contains(10.0)
        assert iv.contains(330.0)
        assert not iv.contains(60.0)

    def test_boundary_inclusive(self):
        iv = HueInterval(center=100.0, half_width=20.0)
        assert iv.contains(120.0) and iv.contains(80.0)


class TestGenPolicies:
    def test_noise_only_identical_rules(self):
        p1, p2 = gen_policies(Condition.NOISE_ONLY, seed=0)
        assert p1.intervals == p2.intervals
        assert p1.agent_id != p2.agent_id
        assert p1.seed != p2.seed  # independent noise streams

    def test_noise_only_evenly_spaced_bands(self):
        p1, _ = gen_policies(Condition.NOISE_ONLY, seed=0)
        centers = sorted(iv.center for iv in p1.intervals.values())
        assert centers == [0.0, 60.0, 120.0, 180.0, 240.0, 300.0]
        assert all(iv.half_width == 30.0 for iv in p1.intervals.values())

    def test_moderate_perturbs_exactly_two_terms(self):
        for seed in range(10):
            p1, p2 = gen_policies(Condition.MODERATE_DRIFT, seed=seed)
            differing = [t for t in COLOR_TERMS
                         if p1.intervals[t] != p2.intervals[t]]
            assert len(differing) == 2

    def test_high_divergence_draws_from_menu(self):
        p1, p2 = gen_policies(Condition.HIGH_DIVERGENCE, seed=8)
        for policy in (p1, p2):
            for iv in policy.intervals.values():
                assert iv.center % 30 == 0
                assert iv.half_width in HIGH_DIVERGENCE_HALF_WIDTHS_DEG

    def test_policy_file_round_trip(self, tmp_path):
        p1, _ = gen_policies(Condition.HIGH_DIVERGENCE, seed=8)
        path = tmp_path / "policy.json"
        save_policy(p1, path)
        assert load_policy(path) == p1


class TestSimVerdict:
    def _noiseless(self):
        return AgentPolicy("A1", {"red": HueInterval(0.0, 30.0)},
                           NoiseParams(0.0, 0.0), seed=1)

    def test_deterministic_rule_without_noise(self):
        policy = self._noiseless()
        inside = SimEvent("x", 0.0)
        outside = SimEvent("y", 180.0)
        assert sim_verdict(policy, "red", inside, (0.9, 0.9)) is Verdict.ASSENT
        assert sim_verdict(policy, "red", outside, (0.9, 0.9)) is Verdict.DISSENT

    def test_total_neutralization(self):
        policy = AgentPolicy("A1", {"red": HueInterval(0.0, 30.0)},
                             NoiseParams(1.0, 0.0), seed=1)
        assert sim_verdict(policy, "red", SimEvent("x", 0.0), (0.5, 0.5)) is Verdict.NEUTRAL

    def test_flip_inverts_base(self):
        policy = AgentPolicy("A1", {"red": HueInterval(0.0, 30.0)},
                             NoiseParams(0.05, 0.01), seed=1)
        assert sim_verdict(policy, "red", SimEvent("x", 0.0), (0.9, 0.001)) is Verdict.DISSENT

    def test_unknown_term(self):
        with pytest.raises(UnknownTermError):
            sim_verdict(self._noiseless(), "chartreuse", SimEvent("x", 0.0), (0.5, 0.5))


class TestSimAgent:
    def test_keyed_repeatability(self):
        p1, _ = gen_policies(Condition.NOISE_ONLY, seed=4)
        agent = SimAgent(p1)
        event = SimEvent("e-repeat", 33.0)
        first = [agent.verdict(t, event) for t in COLOR_TERMS]
        second = [agent.verdict(t, event) for t in COLOR_TERMS]
        assert first == second

    def test_epoch_changes_the_stream(self):
        p1, _ = gen_policies(Condition.NOISE_ONLY, seed=4)
        agent = SimAgent(p1)
        events = gen_events(2000, seed=9)
        before = [agent.verdict("red", e) for e in events]
        agent.epoch = 1
        after = [agent.verdict("red", e) for e in events]
        assert before != after

    def test_noise_frequencies(self):
        # hue pinned at an interval center so every flip shows as dissent
        policy = AgentPolicy("A1", {"red": HueInterval(0.0, 30.0)},
                             NoiseParams(0.05, 0.01), seed=77)
        agent = SimAgent(policy)
        event = SimEvent("e-fixed", 0.0)
        counts = {Verdict.ASSENT: 0, Verdict.NEUTRAL: 0, Verdict.DISSENT: 0}
        for epoch in range(10000):
            agent.epoch = epoch
            counts[agent.verdict("red", event)] += 1
        assert counts[Verdict.NEUTRAL] / 10000 == pytest.approx(0.05, abs=0.01)
        assert counts[Verdict.DISSENT] / 10000 == pytest.approx(0.95 * 0.01, abs=0.004)

    def test_noise_floor_band(self):
        # identically-ruled agents disagree only through noise; the flip
        # process alone predicts 2 * f * (1 - f) of eligible comparisons
        rates = []
        for seed in range(100):
            p1, p2 = gen_policies(Condition.NOISE_ONLY, seed=seed)
            events = gen_events(120, seed=derive_seed("floor", seed))
            report = measure_disagreement(SimAgent(p1), SimAgent(p2),
                                          COLOR_TERMS, events)
            rates.append(report.rate)
        mean_rate = sum(rates) / len(rates)
        assert 0.015 <= mean_rate <= 0.027

    def test_adoption_copies_rule_keeps_noise(self):
        p1, p2 = gen_policies(Condition.HIGH_DIVERGENCE, seed=21)
        a1, a2 = SimAgent(p1), SimAgent(p2)
        term = COLOR_TERMS[0]
        old_seed, old_noise = a2.policy.seed, a2.policy.noise
        a2.adopt_term_policy(term, a1)
        assert a2.policy.intervals[term] == a1.policy.intervals[term]
        assert a2.policy.seed == old_seed
        assert a2.policy.noise == old_noise
        others = [t for t in COLOR_TERMS if t != term]
        assert all(a2.policy.intervals[t] == p2.intervals[t] for t in others)


class TestInjectDrift:
    def test_zero_magnitude_is_identity(self):
        p1, _ = gen_policies(Condition.NOISE_ONLY, seed=0)
        assert inject_drift(p1, "red", 0.0) == p1

    def test_only_named_term_changes(self):
        p1, _ = gen_policies(Condition.NOISE_ONLY, seed=0)
        drifted = inject_drift(p1, "blue", 25.0)
        assert drifted.intervals["blue"].center == (p1.intervals["blue"].center + 25.0) % 360
        assert all(drifted.intervals[t] == p1.intervals[t]
                   for t in COLOR_TERMS if t != "blue")

    def test_shift_disagreement_matches_interval_overlap(self):
        # 60-degree shift of a 60-degree band leaves no overlap inside the
        # union: the rules differ on exactly 120 of 360 degrees
        p1, _ = gen_policies(Condition.NOISE_ONLY, seed=0)
        drifted = inject_drift(p1, "red", 60.0)
        grid = [i * 0.25 for i in range(1440)]
        differ = sum(
            1 for h in grid
            if p1.intervals["red"].contains(h) != drifted.intervals["red"].contains(h)
        )
        expected = 2 * 60.0 / 360.0
        assert differ / len(grid) == pytest.approx(expected, abs=0.01)

    def test_unknown_term(self):
        p1, _ = gen_policies(Condition.NOISE_ONLY, seed=0)
        with pytest.raises(UnknownTermError):
            inject_drift(p1, "mauve", 10.0)
