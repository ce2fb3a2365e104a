"""Core-guarded reasoning: vocabulary restriction and disagreement measurement.

Disagreement is measured on held-out events and never written to the
certification ledger; callers that need an audit trail of evaluation
verdicts can pass a log sink.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .certification import CertifiedCore, Event, VerdictProvider

__all__ = ["TermCounts", "DisagreementReport", "guarded_vocabulary", "measure_disagreement"]


@dataclass(frozen=True)
class TermCounts:
    eligible: int
    contradictions: int


@dataclass(frozen=True)
class DisagreementReport:
    """Contradiction rate over a term set on a shared event list.

    ``no_vocabulary`` distinguishes "nothing measurable" (empty term set)
    from a measured zero rate. ``incomplete`` is set when a provider
    failed partway through.
    """

    terms_used: tuple[str, ...]
    eligible: int
    contradictions: int
    rate: float
    per_term: dict[str, TermCounts]
    no_vocabulary: bool = False
    incomplete: bool = False

    def to_dict(self) -> dict:
        return {
            "terms_used": list(self.terms_used),
            "eligible": self.eligible,
            "contradictions": self.contradictions,
            "rate": self.rate,
            "per_term": {
                t: {"eligible": tc.eligible, "contradictions": tc.contradictions}
                for t, tc in self.per_term.items()
            },
            "no_vocabulary": self.no_vocabulary,
            "incomplete": self.incomplete,
        }


def guarded_vocabulary(core: CertifiedCore, full_vocab: Iterable[str]) -> set[str]:
    """Terms available for consequential decisions: certified core only."""
    return core.core & set(full_vocab)


def measure_disagreement(a1: VerdictProvider, a2: VerdictProvider,
                         terms: Iterable[str], events: Sequence[Event],
                         log: list | None = None) -> DisagreementReport:
    """Query both providers on every (term, event) pair and count contradictions.

    Eligible comparisons are those where both verdicts are decided; the
    rate is contradictions / eligible (0.0 when nothing is eligible).
    These queries are evaluation-only and are not appended to any ledger.
    """
    term_list = sorted(set(terms))
    per_term: dict[str, TermCounts] = {}
    eligible = contradictions = 0
    incomplete = False
    for term in term_list:
        t_elig = t_contra = 0
        for event in events:
            try:
                v1 = a1.verdict(term, event)
                v2 = a2.verdict(term, event)
            except Exception:
                incomplete = True
                break
            if log is not None:
                log.append({"agent": a1.agent_id, "term": term,
                            "pei": event.pei, "verdict": v1.value})
                log.append({"agent": a2.agent_id, "term": term,
                            "pei": event.pei, "verdict": v2.value})
            if v1.decided and v2.decided:
                t_elig += 1
                if v1 != v2:
                    t_contra += 1
        per_term[term] = TermCounts(t_elig, t_contra)
        eligible += t_elig
        contradictions += t_contra
        if incomplete:
            break
    rate = contradictions / eligible if eligible else 0.0
    return DisagreementReport(
        terms_used=tuple(term_list),
        eligible=eligible,
        contradictions=contradictions,
        rate=rate,
        per_term=per_term,
        no_vocabulary=not term_list,
        incomplete=incomplete,
    )
