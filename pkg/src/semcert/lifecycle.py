"""Vocabulary lifecycle: recertification and renegotiation.

Recertification re-audits every core term on fresh events and revokes
terms that no longer clear the predicate; it can shrink the core but
never grow it. Renegotiation restores an excluded term by having the
less entrenched agent adopt the more entrenched agent's interpretation,
followed by a fresh audit that must pass before the term re-enters the
core.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .certification import (
    AuditError,
    CertifiedCore,
    CertStatus,
    Event,
    TermCertificate,
    VerdictProvider,
    audit_term,
    evaluate_tally,
    sample_audit_plan,
)
from .ledger import Ledger, Verdict
from .stats import ProtocolParams

__all__ = [
    "RecertAction",
    "RecertOutcome",
    "RenegotiationOutcome",
    "recertify",
    "entrenchment",
    "entrenchment_criterion",
    "renegotiate",
]


class RecertAction(enum.Enum):
    RETAINED = "retained"
    REVOKED_BOUND = "revoked_bound"
    REVOKED_COVERAGE = "revoked_coverage"


@dataclass(frozen=True)
class RecertOutcome:
    """Result of re-auditing one core term on fresh events."""

    term: str
    u_prime: float
    s_prime: float
    action: RecertAction
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "u_prime": self.u_prime,
            "s_prime": self.s_prime,
            "action": self.action.value,
            "error": self.error,
        }


@dataclass(frozen=True)
class RenegotiationOutcome:
    """Result of one renegotiation attempt for an excluded term."""

    term: str
    reference_agent: str
    entrenchment_counts: dict[str, int]
    adopted: bool
    restored: bool
    certificate: TermCertificate | None = None

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "reference_agent": self.reference_agent,
            "entrenchment_counts": dict(self.entrenchment_counts),
            "adopted": self.adopted,
            "restored": self.restored,
            "certificate": self.certificate.to_dict() if self.certificate else None,
        }


def _status_to_action(status: CertStatus) -> RecertAction:
    if status is CertStatus.CERTIFIED:
        return RecertAction.RETAINED
    if status is CertStatus.REJECTED_COVERAGE:
        return RecertAction.REVOKED_COVERAGE
    # Bound failure takes precedence when both criteria fail.
    return RecertAction.REVOKED_BOUND


def recertify(core: CertifiedCore, a1: VerdictProvider, a2: VerdictProvider,
              fresh_pool: Sequence[Event], params: ProtocolParams,
              ledger: Ledger, epoch: int, *,
              per_term_size: int | None = None,
              seed: int = 0) -> tuple[CertifiedCore, list[RecertOutcome]]:
    """Re-audit core terms on a fresh event sample and revoke failures.

    Only terms whose certificate predates this epoch are re-audited, so a
    term freshly certified at this epoch (e.g. just renegotiated) is left
    alone. An audit failure conservatively revokes the term with an error
    flag. The returned core carries refreshed certificates for retained
    terms and the failing certificates for revoked ones.
    """
    if epoch <= core.epoch:
        raise ValueError(
            f"recertification epoch {epoch} must exceed core epoch {core.epoch}"
        )
    size = per_term_size if per_term_size is not None else len(fresh_pool)
    terms = sorted(
        t for t in core.core
        if core.certificates[t].epoch < epoch
    )
    outcomes: list[RecertOutcome] = []
    updated = core
    if not terms:
        return updated, outcomes
    plan = sample_audit_plan(fresh_pool, terms, size, seed)
    new_certs: list[TermCertificate] = []
    errors = dict(core.errors)
    for term in terms:
        first_seq = len(ledger)
        try:
            tally = audit_term(a1, a2, term, plan.events_by_term[term], ledger, epoch)
        except AuditError as exc:
            # Stale certificates must not survive an unauditable term.
            outcomes.append(RecertOutcome(term, 1.0, 0.0,
                                          RecertAction.REVOKED_BOUND, error=str(exc)))
            errors[term] = str(exc)
            certificates = {t: c for t, c in updated.certificates.items() if t != term}
            updated = CertifiedCore(
                epoch=updated.epoch,
                certificates=certificates,
                core=frozenset(t for t, c in certificates.items()
                               if c.status is CertStatus.CERTIFIED),
                errors=errors,
            )
            continue
        u, s, status = evaluate_tally(tally, params)
        cert = TermCertificate(
            term=term, tally=tally, u=u, s=s, params=params, epoch=epoch,
            ledger_span=(first_seq, len(ledger) - 1), status=status,
        )
        new_certs.append(cert)
        outcomes.append(RecertOutcome(term, u, s, _status_to_action(status)))
    updated = updated.with_certificates(*new_certs)
    updated = CertifiedCore(epoch=epoch, certificates=updated.certificates,
                            core=updated.core, errors=errors)
    return updated, outcomes


def entrenchment(ledger: Ledger, term: str, agent: str) -> int:
    """Number of decided (non-neutral) ledger verdicts for (agent, term)."""
    return sum(
        1 for entry in ledger.query(term=term, agent=agent)
        if entry.verdict is not Verdict.NEUTRAL
    )


def entrenchment_criterion(ledger: Ledger, term: str, a1: VerdictProvider,
                           a2: VerdictProvider) -> tuple[VerdictProvider, dict[str, int]]:
    """Default reference-selection rule: historical precedent.

    The agent with more decided verdicts for the term wins; ties break
    toward the lexicographically smaller agent id so replays are
    deterministic.
    """
    counts = {
        a1.agent_id: entrenchment(ledger, term, a1.agent_id),
        a2.agent_id: entrenchment(ledger, term, a2.agent_id),
    }
    ranked = sorted((a1, a2), key=lambda a: (-counts[a.agent_id], a.agent_id))
    return ranked[0], counts


def renegotiate(term: str, a1: VerdictProvider, a2: VerdictProvider,
                ledger: Ledger, fresh_pool: Sequence[Event],
                params: ProtocolParams, epoch: int, *,
                per_term_size: int | None = None,
                seed: int = 0,
                criterion=entrenchment_criterion) -> RenegotiationOutcome:
    """Attempt to restore an excluded term by policy adoption and re-audit.

    The criterion picks the reference agent (by default the more
    entrenched one); the other agent adopts the reference interpretation,
    keeping its own noise process. Restoration requires the fresh audit
    to certify. Providers without adoption support leave the outcome
    unadopted.
    """
    reference, counts = criterion(ledger, term, a1, a2)
    adopter = a2 if reference is a1 else a1

    adopt = getattr(adopter, "adopt_term_policy", None)
    if adopt is None:
        return RenegotiationOutcome(term=term, reference_agent=reference.agent_id,
                                    entrenchment_counts=counts,
                                    adopted=False, restored=False)
    try:
        adopt(term, reference)
    except Exception:
        return RenegotiationOutcome(term=term, reference_agent=reference.agent_id,
                                    entrenchment_counts=counts,
                                    adopted=False, restored=False)

    size = per_term_size if per_term_size is not None else len(fresh_pool)
    plan = sample_audit_plan(fresh_pool, [term], size, seed)
    first_seq = len(ledger)
    try:
        tally = audit_term(a1, a2, term, plan.events_by_term[term], ledger, epoch)
    except AuditError:
        return RenegotiationOutcome(term=term, reference_agent=reference.agent_id,
                                    entrenchment_counts=counts,
                                    adopted=True, restored=False)
    u, s, status = evaluate_tally(tally, params)
    cert = TermCertificate(
        term=term, tally=tally, u=u, s=s, params=params, epoch=epoch,
        ledger_span=(first_seq, len(ledger) - 1), status=status,
    )
    return RenegotiationOutcome(
        term=term,
        reference_agent=reference.agent_id,
        entrenchment_counts=counts,
        adopted=True,
        restored=status is CertStatus.CERTIFIED,
        certificate=cert,
    )
