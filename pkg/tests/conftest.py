from __future__ import annotations

import json
from pathlib import Path

import pytest

from semcert.certification import Event
from semcert.ledger import Verdict

MOCK_VOCAB = ("harmful", "misleading", "sensitive", "spam", "benign", "escalate")


class FixedAgent:
    """In-process provider answering from a table or a fixed verdict.

    table maps term -> {pei -> verdict string}; events missing from the
    table get the default verdict.
    """

    def __init__(self, agent_id: str, table: dict | None = None,
                 default: str = "neutral", always: str | None = None):
        self.agent_id = agent_id
        self.table = table or {}
        self.default = default
        self.always = always
        self.calls = 0

    def verdict(self, term: str, event) -> Verdict:
        self.calls += 1
        if self.always is not None:
            return Verdict(self.always)
        raw = self.table.get(term, {}).get(event.pei, self.default)
        return Verdict(raw)


class FlakyAgent(FixedAgent):
    """Fails on one specific (term, pei) query."""

    def __init__(self, agent_id: str, fail_term: str, fail_pei: str, **kwargs):
        super().__init__(agent_id, **kwargs)
        self.fail_term = fail_term
        self.fail_pei = fail_pei

    def verdict(self, term: str, event) -> Verdict:
        if term == self.fail_term and event.pei == self.fail_pei:
            raise RuntimeError("provider exploded")
        return super().verdict(term, event)


def make_events(n: int, prefix: str = "ev") -> list[Event]:
    return [Event(pei=f"{prefix}-{i:03d}") for i in range(n)]


def make_recorded_pair_tables() -> tuple[dict, dict, list[Event], list[Event]]:
    """Two recorded verdict tables over a 6-term moderation vocabulary.

    Constructed so that at tau=0.06 exactly benign and sensitive certify
    (benign: 0 contradictions in 120; sensitive: 2 in 100 eligible), the
    held-out unguarded rate is 15/277 (~5.42%), and the guarded rate over
    the two certified terms is 2/77 (~2.60%).
    """
    audit = make_events(120, "aud")
    heldout = make_events(50, "evl")
    t1: dict[str, dict[str, str]] = {t: {} for t in MOCK_VOCAB}
    t2: dict[str, dict[str, str]] = {t: {} for t in MOCK_VOCAB}

    def fill(term, events, v1, v2):
        for e in events:
            t1[term][e.pei] = v1
            t2[term][e.pei] = v2

    # audit phase
    fill("benign", audit, "assent", "assent")
    fill("sensitive", audit[:20], "neutral", "neutral")
    fill("sensitive", audit[20:118], "assent", "assent")
    fill("sensitive", audit[118:], "assent", "dissent")
    audit_contras = {"harmful": 5, "misleading": 7, "spam": 9, "escalate": 30}
    for term, n_contra in audit_contras.items():
        fill(term, audit[:n_contra], "assent", "dissent")
        fill(term, audit[n_contra:], "assent", "assent")

    # held-out phase: benign 10 neutral pairs + 1 contradiction in 40
    # eligible, sensitive 13 neutral pairs + 1 in 37 eligible, the four
    # uncertified terms 3+3+3+4 contradictions in 50 eligible each
    fill("benign", heldout[:10], "neutral", "neutral")
    fill("benign", heldout[10:49], "assent", "assent")
    fill("benign", heldout[49:], "assent", "dissent")
    fill("sensitive", heldout[:13], "neutral", "neutral")
    fill("sensitive", heldout[13:49], "assent", "assent")
    fill("sensitive", heldout[49:], "assent", "dissent")
    eval_contras = {"harmful": 3, "misleading": 3, "spam": 3, "escalate": 4}
    for term, n_contra in eval_contras.items():
        fill(term, heldout[:n_contra], "assent", "dissent")
        fill(term, heldout[n_contra:], "assent", "assent")

    return t1, t2, audit, heldout


@pytest.fixture
def recorded_pair(tmp_path: Path):
    """The recorded mock pair as table files plus event lists."""
    t1, t2, audit, heldout = make_recorded_pair_tables()
    table_path = tmp_path / "tables.json"
    table_path.write_text(json.dumps({"A1": t1, "A2": t2}), encoding="utf-8")
    return table_path, t1, t2, audit, heldout
