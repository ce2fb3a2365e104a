"""semcert: behavioral certification of shared vocabulary between agents.

Two agents are audited on shared observable events; a term enters the
certified core when the one-sided Wilson bound on its contradiction rate
clears a threshold with sufficient coverage. Every audit verdict lands in
an append-only hash-chained ledger, so certification decisions replay
from the ledger alone. Downstream reasoning restricted to the core
inherits the certified disagreement bound; recertification detects drift
and renegotiation recovers revoked terms.
"""

__version__ = "0.1.0"

from .adapter import ExternalAgent, external_provider
from .certification import (
    AuditPlan,
    CertifiedCore,
    CertStatus,
    Event,
    StimulusMeaning,
    TermCertificate,
    VerdictProvider,
    audit_term,
    certify,
    replay_certification,
    sample_audit_plan,
    stimulus_meaning,
)
from .guard import DisagreementReport, guarded_vocabulary, measure_disagreement
from .ledger import ChainCheck, Ledger, Verdict, WitnessedTest, verify_file
from .lifecycle import (
    RecertAction,
    RecertOutcome,
    RenegotiationOutcome,
    entrenchment,
    recertify,
    renegotiate,
)
from .simagents import (
    COLOR_TERMS,
    AgentPolicy,
    Condition,
    NoiseParams,
    SimAgent,
    SimEvent,
    gen_events,
    gen_policies,
    inject_drift,
    sim_verdict,
)
from .stats import ProtocolParams, TermTally, coverage, normal_quantile, wilson_upper

__all__ = [
    "__version__",
    "AgentPolicy",
    "AuditPlan",
    "CertifiedCore",
    "CertStatus",
    "ChainCheck",
    "COLOR_TERMS",
    "Condition",
    "DisagreementReport",
    "Event",
    "ExternalAgent",
    "Ledger",
    "NoiseParams",
    "ProtocolParams",
    "RecertAction",
    "RecertOutcome",
    "RenegotiationOutcome",
    "SimAgent",
    "SimEvent",
    "StimulusMeaning",
    "TermCertificate",
    "TermTally",
    "Verdict",
    "VerdictProvider",
    "WitnessedTest",
    "audit_term",
    "certify",
    "coverage",
    "entrenchment",
    "external_provider",
    "gen_events",
    "gen_policies",
    "guarded_vocabulary",
    "inject_drift",
    "measure_disagreement",
    "normal_quantile",
    "recertify",
    "renegotiate",
    "replay_certification",
    "sample_audit_plan",
    "sim_verdict",
    "stimulus_meaning",
    "verify_file",
    "wilson_upper",
]
