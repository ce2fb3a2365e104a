"""End-to-end term certification.

Audits a pair of verdict providers on per-term event samples, records
every verdict in the ledger, tallies contradictions among eligible
comparisons, and admits terms whose Wilson-bounded contradiction rate
clears the threshold with sufficient coverage. Also provides third-party
replay: recomputing the certified core from ledger entries alone.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence, runtime_checkable

from .ledger import ChainCheck, Ledger, LedgerTamperedError, Verdict, WitnessedTest
from .seeding import derive_seed
from .stats import ProtocolParams, TermTally, coverage, wilson_upper

__all__ = [
    "Event",
    "VerdictProvider",
    "AuditPlan",
    "CertStatus",
    "TermCertificate",
    "CertifiedCore",
    "StimulusMeaning",
    "AuditError",
    "ReplayError",
    "sample_audit_plan",
    "audit_term",
    "evaluate_tally",
    "certify",
    "stimulus_meaning",
    "replay_certification",
]


@dataclass(frozen=True)
class Event:
    """An auditable event: a stable public identifier plus judgeable payload."""

    pei: str
    content: str = ""


@runtime_checkable
class VerdictProvider(Protocol):
    """Anything that can judge whether a term applies to an event."""

    agent_id: str

    def verdict(self, term: str, event) -> Verdict: ...


class AuditError(Exception):
    """A provider failed mid-audit; the affected term's audit is aborted."""

    def __init__(self, term: str, pei: str, cause: Exception):
        super().__init__(f"audit of term {term!r} failed at event {pei!r}: {cause}")
        self.term = term
        self.pei = pei
        self.cause = cause


class ReplayError(Exception):
    """Ledger contents do not form a complete, replayable audit."""


class CertStatus(enum.Enum):
    CERTIFIED = "certified"
    REJECTED_BOUND = "rejected_bound"
    REJECTED_COVERAGE = "rejected_coverage"
    REJECTED_BOTH = "rejected_both"


@dataclass(frozen=True)
class AuditPlan:
    """Per-term event samples to audit, drawn without replacement per term."""

    seed: int
    per_term_size: int
    events_by_term: Mapping[str, tuple[Event, ...]]

    @property
    def vocabulary(self) -> tuple[str, ...]:
        return tuple(self.events_by_term)


@dataclass(frozen=True)
class TermCertificate:
    """Certification outcome for one term, recomputable from its ledger span."""

    term: str
    tally: TermTally
    u: float
    s: float
    params: ProtocolParams
    epoch: int
    ledger_span: tuple[int, int]
    status: CertStatus

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "tally": self.tally.to_dict(),
            "u": self.u,
            "s": self.s,
            "params": self.params.to_dict(),
            "epoch": self.epoch,
            "ledger_span": list(self.ledger_span),
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TermCertificate":
        return cls(
            term=data["term"],
            tally=TermTally.from_dict(data["tally"]),
            u=data["u"],
            s=data["s"],
            params=ProtocolParams.from_dict(data["params"]),
            epoch=data["epoch"],
            ledger_span=(data["ledger_span"][0], data["ledger_span"][1]),
            status=CertStatus(data["status"]),
        )


@dataclass(frozen=True)
class CertifiedCore:
    """The set of certified terms at an epoch, with all certificates kept.

    Rejected terms keep their (failing) certificates so later lifecycle
    steps can see why they failed. ``errors`` holds terms whose audit
    aborted on provider failure.
    """

    epoch: int
    certificates: Mapping[str, TermCertificate]
    core: frozenset[str]
    errors: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = frozenset(
            t for t, cert in self.certificates.items()
            if cert.status is CertStatus.CERTIFIED
        )
        if self.core != expected:
            raise ValueError("core must equal the set of certified terms")

    def with_certificates(self, *certs: TermCertificate) -> "CertifiedCore":
        """A new core with the given certificates merged in.

        The core set is recomputed; the epoch field (round of the last
        full certification pass) is unchanged.
        """
        certificates = dict(self.certificates)
        for cert in certs:
            certificates[cert.term] = cert
        core = frozenset(
            t for t, cert in certificates.items()
            if cert.status is CertStatus.CERTIFIED
        )
        return CertifiedCore(epoch=self.epoch, certificates=certificates,
                             core=core, errors=dict(self.errors))

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "core": sorted(self.core),
            "certificates": {t: c.to_dict() for t, c in self.certificates.items()},
            "errors": dict(self.errors),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "CertifiedCore":
        certificates = {
            t: TermCertificate.from_dict(c) for t, c in data["certificates"].items()
        }
        return cls(
            epoch=data["epoch"],
            certificates=certificates,
            core=frozenset(data["core"]),
            errors=dict(data.get("errors", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "CertifiedCore":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class StimulusMeaning:
    """How a term partitions an agent's witnessed events by verdict."""

    term: str
    agent: str
    positive: frozenset[str]
    negative: frozenset[str]
    neutral: frozenset[str]


def sample_audit_plan(pool: Sequence[Event], vocabulary: Sequence[str],
                      per_term_size: int, seed: int) -> AuditPlan:
    """Draw an independent uniform sample of events for each term.

    Samples are without replacement within a term; different terms may
    overlap. Identical inputs always produce the identical plan.
    """
    if per_term_size > len(pool):
        raise ValueError(
            f"per_term_size {per_term_size} exceeds pool size {len(pool)}"
        )
    if per_term_size < 1:
        raise ValueError("per_term_size must be at least 1")
    pool = list(pool)
    events_by_term = {}
    for term in vocabulary:
        rng = random.Random(derive_seed(seed, "audit-plan", term))
        events_by_term[term] = tuple(rng.sample(pool, per_term_size))
    return AuditPlan(seed=seed, per_term_size=per_term_size,
                     events_by_term=events_by_term)


def audit_term(a1: VerdictProvider, a2: VerdictProvider, term: str,
               events: Sequence[Event], ledger: Ledger, epoch: int) -> TermTally:
    """Audit one term: query both providers on every event, ledger both verdicts.

    Counts follow the eligibility rules: n_aud counts events with at least
    one decided verdict, k counts events where both are decided, and c
    counts decided disagreements (one assent, one dissent). A provider
    failure aborts this term's audit; entries already written remain.
    """
    n_aud = k = c = 0
    for event in events:
        try:
            v1 = a1.verdict(term, event)
            v2 = a2.verdict(term, event)
        except Exception as exc:  # provider failure is data, not a crash
            raise AuditError(term, event.pei, exc) from exc
        ledger.append(a1.agent_id, event.pei, term, v1, epoch)
        ledger.append(a2.agent_id, event.pei, term, v2, epoch)
        if v1.decided or v2.decided:
            n_aud += 1
        if v1.decided and v2.decided:
            k += 1
            if v1 != v2:
                c += 1
    return TermTally(n_aud=n_aud, k=k, c=c)


def evaluate_tally(tally: TermTally, params: ProtocolParams) -> tuple[float, float, CertStatus]:
    """Apply the certification predicate to a tally: (u, s, status)."""
    u = wilson_upper(tally.c, tally.k, params.delta)
    s = coverage(tally)
    bound_ok = u <= params.tau
    cov_ok = s >= params.rho_min
    if bound_ok and cov_ok:
        status = CertStatus.CERTIFIED
    elif not bound_ok and not cov_ok:
        status = CertStatus.REJECTED_BOTH
    elif not bound_ok:
        status = CertStatus.REJECTED_BOUND
    else:
        status = CertStatus.REJECTED_COVERAGE
    return u, s, status


def certify(a1: VerdictProvider, a2: VerdictProvider, plan: AuditPlan,
            params: ProtocolParams, ledger: Ledger, epoch: int) -> CertifiedCore:
    """Run the full certification pass over the plan's vocabulary.

    Each term is audited independently; a provider failure on one term is
    recorded under ``errors`` and does not affect the others.
    """
    certificates: dict[str, TermCertificate] = {}
    errors: dict[str, str] = {}
    for term in plan.vocabulary:
        first_seq = len(ledger)
        try:
            tally = audit_term(a1, a2, term, plan.events_by_term[term], ledger, epoch)
        except AuditError as exc:
            errors[term] = str(exc)
            continue
        u, s, status = evaluate_tally(tally, params)
        certificates[term] = TermCertificate(
            term=term, tally=tally, u=u, s=s, params=params, epoch=epoch,
            ledger_span=(first_seq, len(ledger) - 1), status=status,
        )
    core = frozenset(
        t for t, cert in certificates.items() if cert.status is CertStatus.CERTIFIED
    )
    return CertifiedCore(epoch=epoch, certificates=certificates,
                         core=core, errors=errors)


def stimulus_meaning(ledger: Ledger, agent: str, term: str,
                     epoch_range: tuple[int, int] | None = None) -> StimulusMeaning:
    """Partition an agent's witnessed tests for a term by verdict."""
    positive, negative, neutral = set(), set(), set()
    for entry in ledger.query(term=term, agent=agent, epoch_range=epoch_range):
        if entry.verdict is Verdict.ASSENT:
            positive.add(entry.pei)
        elif entry.verdict is Verdict.DISSENT:
            negative.add(entry.pei)
        else:
            neutral.add(entry.pei)
    return StimulusMeaning(term=term, agent=agent,
                           positive=frozenset(positive),
                           negative=frozenset(negative),
                           neutral=frozenset(neutral))


def replay_certification(ledger: Ledger, params: ProtocolParams,
                         epoch: int) -> CertifiedCore:
    """Recompute the certified core from ledger entries alone.

    Verifies the chain first and refuses to replay a tampered ledger.
    Every (event, term) audited at the epoch must carry verdicts from
    exactly two distinct agents; an orphaned verdict is a replay error.
    The result is identical to the core produced by the live run that
    wrote the entries, regardless of entry order within an event.
    """
    check = ledger.verify()
    if not check.valid:
        raise LedgerTamperedError(check.invalid_at)

    by_term: dict[str, list[WitnessedTest]] = {}
    for entry in ledger.query(epoch_range=(epoch, epoch)):
        by_term.setdefault(entry.term, []).append(entry)

    certificates: dict[str, TermCertificate] = {}
    for term, entries in by_term.items():
        by_pei: dict[str, list[WitnessedTest]] = {}
        for entry in entries:
            by_pei.setdefault(entry.pei, []).append(entry)
        n_aud = k = c = 0
        for pei, pair in by_pei.items():
            if len(pair) != 2 or pair[0].agent == pair[1].agent:
                seqs = [e.seq for e in pair]
                raise ReplayError(
                    f"orphaned verdict for term {term!r} event {pei!r} "
                    f"at epoch {epoch} (seq {seqs})"
                )
            v1, v2 = pair[0].verdict, pair[1].verdict
            if v1.decided or v2.decided:
                n_aud += 1
            if v1.decided and v2.decided:
                k += 1
                if v1 != v2:
                    c += 1
        tally = TermTally(n_aud=n_aud, k=k, c=c)
        u, s, status = evaluate_tally(tally, params)
        span = (min(e.seq for e in entries), max(e.seq for e in entries))
        certificates[term] = TermCertificate(
            term=term, tally=tally, u=u, s=s, params=params, epoch=epoch,
            ledger_span=span, status=status,
        )
    core = frozenset(
        t for t, cert in certificates.items() if cert.status is CertStatus.CERTIFIED
    )
    return CertifiedCore(epoch=epoch, certificates=certificates, core=core)
