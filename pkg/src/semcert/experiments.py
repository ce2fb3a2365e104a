"""Desk-scale simulation experiments.

Three studies over synthetic agent pairs:

* static: certification plus guarded/unguarded disagreement across the
  three divergence conditions, averaged over seeded runs.
* timeseries: drift injected mid-run, with frozen, recertifying, and
  renegotiating variants over 50 epochs.
* tradeoff: analytic coverage-versus-disagreement curves for a
  two-population vocabulary model, exact binomial sums cross-checked by
  Monte Carlo.

Every run derives all randomness from one base seed, so repeated
invocations are bit-identical.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .certification import certify, sample_audit_plan
from .guard import guarded_vocabulary, measure_disagreement
from .ledger import Ledger
from .lifecycle import RecertAction, recertify, renegotiate
from .seeding import derive_seed
from .simagents import (
    COLOR_TERMS,
    Condition,
    SimAgent,
    gen_events,
    gen_policies,
    inject_drift,
)
from .stats import ProtocolParams, wilson_upper

__all__ = [
    "DEFAULT_PARAMS",
    "AUDIT_POOL_SIZE",
    "HELDOUT_SIZE",
    "DEFAULT_PER_TERM_SIZE",
    "Scenario",
    "StaticRunRecord",
    "StaticSummary",
    "TimeseriesConfig",
    "TimeseriesRecord",
    "TwoPopulationModel",
    "TradeoffPoint",
    "run_static",
    "run_timeseries",
    "run_tradeoff",
    "calibrate_moderate_shift",
    "emit_results",
]

DEFAULT_PARAMS = ProtocolParams(tau=0.05, delta=0.05, rho_min=0.10)
AUDIT_POOL_SIZE = 400
HELDOUT_SIZE = 600

# Audit-sample size per term, drawn from the 400-event audit pool. At the
# default thresholds a well-aligned term (true contradiction rate at the
# ~2% noise floor) passes with probability ~0.65 at this size, which puts
# the mean certified-core sizes on their documented targets (3.8 of 6
# noise-only, 2.6 of 6 moderate). Smaller samples reject far too many
# aligned terms: at 120 events the pass rate drops to ~0.37.
DEFAULT_PER_TERM_SIZE = 195

# Fresh-audit sizing for per-epoch recertification. Re-testing the same
# term every epoch is a repeated-testing regime: with per-epoch failure
# probability q the core decays like (1-q)^epochs, so q must be pushed
# well below the single-audit level. 900 fresh events per term keeps a
# noise-floor term's survival above 97% across 49 consecutive re-audits.
RECERT_POOL_SIZE = 1000
RECERT_PER_TERM_SIZE = 900


class Scenario(enum.Enum):
    BASELINE = "baseline"
    FROZEN = "frozen"
    RECERT = "recert"
    RENEGOTIATE = "renegotiate"


@dataclass(frozen=True)
class StaticRunRecord:
    condition: str
    seed: int
    core_size: int
    unguarded_rate: float
    guarded_rate: float
    guarded_measurable: bool
    certified_terms: str  # |-joined, stable order


@dataclass(frozen=True)
class StaticSummary:
    """Means across runs; the guarded mean covers only runs where a core
    existed, since an empty core leaves nothing to measure."""

    condition: str
    n_runs: int
    unguarded_mean: float
    guarded_mean: float | None
    guarded_measured_runs: int
    core_mean: float
    empty_core_runs: int

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "n_runs": self.n_runs,
            "unguarded_mean": self.unguarded_mean,
            "guarded_mean": self.guarded_mean,
            "guarded_measured_runs": self.guarded_measured_runs,
            "core_mean": self.core_mean,
            "empty_core_runs": self.empty_core_runs,
        }


def run_static(condition: Condition, n_runs: int,
               params: ProtocolParams = DEFAULT_PARAMS,
               base_seed: int = 0, *,
               per_term_size: int = DEFAULT_PER_TERM_SIZE,
               audit_pool_size: int = AUDIT_POOL_SIZE,
               heldout_size: int = HELDOUT_SIZE,
               vocabulary: Sequence[str] = COLOR_TERMS,
               ) -> tuple[list[StaticRunRecord], StaticSummary]:
    """Certify and measure disagreement for n_runs seeded runs of one condition."""
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    records: list[StaticRunRecord] = []
    for i in range(n_runs):
        run_seed = derive_seed(base_seed, "static", condition.value, i)
        events = gen_events(audit_pool_size + heldout_size,
                            derive_seed(run_seed, "events"))
        audit_pool = events[:audit_pool_size]
        heldout = events[audit_pool_size:]
        p1, p2 = gen_policies(condition, derive_seed(run_seed, "policies"))
        a1, a2 = SimAgent(p1), SimAgent(p2)
        ledger = Ledger()
        plan = sample_audit_plan(audit_pool, vocabulary, per_term_size,
                                 derive_seed(run_seed, "plan"))
        core = certify(a1, a2, plan, params, ledger, epoch=0)
        unguarded = measure_disagreement(a1, a2, vocabulary, heldout)
        guarded = measure_disagreement(
            a1, a2, sorted(guarded_vocabulary(core, vocabulary)), heldout)
        records.append(StaticRunRecord(
            condition=condition.value,
            seed=run_seed,
            core_size=len(core.core),
            unguarded_rate=unguarded.rate,
            guarded_rate=guarded.rate,
            guarded_measurable=not guarded.no_vocabulary,
            certified_terms="|".join(sorted(core.core)),
        ))
    measured = [r.guarded_rate for r in records if r.guarded_measurable]
    summary = StaticSummary(
        condition=condition.value,
        n_runs=n_runs,
        unguarded_mean=sum(r.unguarded_rate for r in records) / n_runs,
        guarded_mean=(sum(measured) / len(measured)) if measured else None,
        guarded_measured_runs=len(measured),
        core_mean=sum(r.core_size for r in records) / n_runs,
        empty_core_runs=sum(1 for r in records if r.core_size == 0),
    )
    return records, summary


@dataclass(frozen=True)
class TimeseriesConfig:
    epochs: int = 50
    drift_epoch: int = 10
    n_runs: int = 10
    audit_pool_size: int = AUDIT_POOL_SIZE
    per_term_size: int = DEFAULT_PER_TERM_SIZE
    heldout_size: int = HELDOUT_SIZE
    recert_pool_size: int = RECERT_POOL_SIZE
    recert_per_term: int = RECERT_PER_TERM_SIZE
    drift_magnitude_deg: float = 18.0

    def __post_init__(self) -> None:
        if not 0 <= self.drift_epoch < self.epochs:
            raise ValueError("drift_epoch must lie inside the epoch range")


@dataclass(frozen=True)
class TimeseriesRecord:
    scenario: str
    epoch: int
    guarded_rate: float | None
    unguarded_rate: float
    core_size: float
    drifted: bool


def _timeseries_run(scenario: Scenario, params: ProtocolParams,
                    run_seed: int, cfg: TimeseriesConfig):
    """One seeded trajectory; returns per-epoch (guarded, unguarded, core)."""
    p1, p2 = gen_policies(Condition.NOISE_ONLY, derive_seed(run_seed, "policies"))
    a1, a2 = SimAgent(p1), SimAgent(p2)
    ledger = Ledger()
    pool = gen_events(cfg.audit_pool_size, derive_seed(run_seed, "audit-pool"))
    plan = sample_audit_plan(pool, COLOR_TERMS, cfg.per_term_size,
                             derive_seed(run_seed, "plan"))
    core = certify(a1, a2, plan, params, ledger, epoch=0)
    drift_term = min(core.core) if core.core else COLOR_TERMS[0]
    lifecycle = scenario in (Scenario.RECERT, Scenario.RENEGOTIATE)
    pending_revoked: list[str] = []
    rows = []
    for epoch in range(cfg.epochs):
        a1.epoch = a2.epoch = epoch
        if scenario is not Scenario.BASELINE and epoch == cfg.drift_epoch:
            a2.policy = inject_drift(a2.policy, drift_term, cfg.drift_magnitude_deg)

        heldout = gen_events(cfg.heldout_size, derive_seed(run_seed, "eval", epoch))
        unguarded = measure_disagreement(a1, a2, COLOR_TERMS, heldout)
        guarded = measure_disagreement(a1, a2, sorted(core.core), heldout)
        rows.append((
            epoch,
            None if guarded.no_vocabulary else guarded.rate,
            unguarded.rate,
            len(core.core),
        ))

        if lifecycle and epoch >= 1:
            if scenario is Scenario.RENEGOTIATE and pending_revoked:
                reneg_pool = gen_events(cfg.recert_pool_size,
                                        derive_seed(run_seed, "reneg-pool", epoch))
                for term in list(pending_revoked):
                    outcome = renegotiate(
                        term, a1, a2, ledger, reneg_pool, params, epoch,
                        per_term_size=cfg.recert_per_term,
                        seed=derive_seed(run_seed, "reneg", epoch, term))
                    if outcome.restored:
                        core = core.with_certificates(outcome.certificate)
                        pending_revoked.remove(term)
            recert_pool = gen_events(cfg.recert_pool_size,
                                     derive_seed(run_seed, "recert-pool", epoch))
            core, outcomes = recertify(
                core, a1, a2, recert_pool, params, ledger, epoch,
                per_term_size=cfg.recert_per_term,
                seed=derive_seed(run_seed, "recert", epoch))
            if scenario is Scenario.RENEGOTIATE:
                for oc in outcomes:
                    if oc.action is not RecertAction.RETAINED:
                        pending_revoked.append(oc.term)
    return rows


def run_timeseries(scenario: Scenario,
                   params: ProtocolParams = DEFAULT_PARAMS,
                   seed: int = 0,
                   cfg: TimeseriesConfig = TimeseriesConfig(),
                   ) -> list[TimeseriesRecord]:
    """Average per-epoch rates and core sizes over cfg.n_runs trajectories."""
    per_run = [
        _timeseries_run(scenario, params,
                        derive_seed(seed, "timeseries", scenario.value, r), cfg)
        for r in range(cfg.n_runs)
    ]
    records = []
    for epoch in range(cfg.epochs):
        guarded_vals = [rows[epoch][1] for rows in per_run if rows[epoch][1] is not None]
        records.append(TimeseriesRecord(
            scenario=scenario.value,
            epoch=epoch,
            guarded_rate=(sum(guarded_vals) / len(guarded_vals)) if guarded_vals else None,
            unguarded_rate=sum(rows[epoch][2] for rows in per_run) / cfg.n_runs,
            core_size=sum(rows[epoch][3] for rows in per_run) / cfg.n_runs,
            drifted=scenario is not Scenario.BASELINE and epoch >= cfg.drift_epoch,
        ))
    return records


@dataclass(frozen=True)
class TwoPopulationModel:
    """Vocabulary model: a fraction pi of terms contradict at p_lo, the
    rest at p_hi."""

    p_lo: float = 0.01
    p_hi: float = 0.30

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_lo <= 1.0 or not 0.0 <= self.p_hi <= 1.0:
            raise ValueError("model rates must be in [0, 1]")


@dataclass(frozen=True)
class TradeoffPoint:
    pi: float
    tau: float
    coverage: float
    guarded_disagreement: float
    unguarded_baseline: float
    coverage_mc: float | None = None
    guarded_mc: float | None = None


def _binom_cdf(x: int, n: int, p: float) -> float:
    if x < 0:
        return 0.0
    if x >= n:
        return 1.0
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    log_p, log_q = math.log(p), math.log1p(-p)
    lg_n = math.lgamma(n + 1)
    total = 0.0
    for c in range(x + 1):
        total += math.exp(lg_n - math.lgamma(c + 1) - math.lgamma(n - c + 1)
                          + c * log_p + (n - c) * log_q)
    return min(1.0, total)


def run_tradeoff(pi_values: Sequence[float], tau_grid: Sequence[float],
                 model: TwoPopulationModel = TwoPopulationModel(),
                 k_audit: int = 120, delta: float = 0.05,
                 n_mc: int = 0, mc_seed: int = 0) -> list[TradeoffPoint]:
    """Coverage and certified-term disagreement as functions of the threshold.

    Certification of a term with true rate p is the event that the Wilson
    bound of c ~ Binomial(k_audit, p) contradictions clears tau, computed
    by exact binomial summation. When n_mc > 0 each point also carries a
    Monte Carlo estimate as a cross-check.
    """
    if not pi_values or not tau_grid:
        raise ValueError("pi_values and tau_grid must be nonempty")
    u_by_c = [wilson_upper(c, k_audit, delta) for c in range(k_audit + 1)]

    points = []
    for pi in pi_values:
        if not 0.0 <= pi <= 1.0:
            raise ValueError(f"pi must be in [0, 1], got {pi}")
        unguarded = pi * model.p_lo + (1.0 - pi) * model.p_hi
        mc = None
        if n_mc > 0:
            rng = np.random.default_rng(derive_seed(mc_seed, "tradeoff-mc", pi))
            is_lo = rng.random(n_mc) < pi
            p_terms = np.where(is_lo, model.p_lo, model.p_hi)
            cs = rng.binomial(k_audit, p_terms)
            us = np.asarray(u_by_c)[cs]
            mc = (p_terms, us)
        for tau in tau_grid:
            # u_by_c is nondecreasing in c, so the accepted set is a prefix.
            cstar = -1
            for c_val, u in enumerate(u_by_c):
                if u <= tau:
                    cstar = c_val
                else:
                    break
            f_lo = _binom_cdf(cstar, k_audit, model.p_lo)
            f_hi = _binom_cdf(cstar, k_audit, model.p_hi)
            cov = pi * f_lo + (1.0 - pi) * f_hi
            if cov > 0.0:
                guarded = (pi * model.p_lo * f_lo
                           + (1.0 - pi) * model.p_hi * f_hi) / cov
            else:
                guarded = 0.0
            coverage_mc = guarded_mc = None
            if mc is not None:
                p_terms, us = mc
                certified = us <= tau
                coverage_mc = float(certified.mean())
                guarded_mc = float(p_terms[certified].mean()) if certified.any() else 0.0
            points.append(TradeoffPoint(
                pi=pi, tau=tau, coverage=cov, guarded_disagreement=guarded,
                unguarded_baseline=unguarded,
                coverage_mc=coverage_mc, guarded_mc=guarded_mc,
            ))
    return points


def calibrate_moderate_shift(shifts: Sequence[float] = (27.0, 29.0, 30.5, 32.0, 34.0),
                             target: float = 0.074, n_runs: int = 30,
                             base_seed: int = 0, *,
                             heldout_size: int = HELDOUT_SIZE) -> dict:
    """Sweep the moderate-drift shift and pick the one whose mean
    unguarded disagreement lands closest to the target.

    Certification is irrelevant to this measurement, so each probe run
    only generates policies and measures disagreement on held-out events.
    """
    table = []
    for shift in shifts:
        rates = []
        for i in range(n_runs):
            run_seed = derive_seed(base_seed, "calibrate", shift, i)
            events = gen_events(heldout_size, derive_seed(run_seed, "events"))
            p1, p2 = gen_policies(Condition.MODERATE_DRIFT,
                                  derive_seed(run_seed, "policies"),
                                  drift_shift=shift)
            report = measure_disagreement(SimAgent(p1), SimAgent(p2),
                                          COLOR_TERMS, events)
            rates.append(report.rate)
        table.append({"shift": shift, "mean_unguarded": sum(rates) / n_runs})
    best = min(table, key=lambda row: abs(row["mean_unguarded"] - target))
    return {"target": target, "table": table, "best_shift": best["shift"],
            "best_mean_unguarded": best["mean_unguarded"]}


def _record_rows(records: Sequence) -> tuple[list[str], list[dict]]:
    names = [f.name for f in fields(records[0])]
    rows = []
    for record in records:
        row = {}
        for name in names:
            value = getattr(record, name)
            if isinstance(value, bool):
                value = str(value).lower()
            elif value is None:
                value = ""
            row[name] = value
        rows.append(row)
    return names, rows


def emit_results(records: Sequence, out_dir: str | Path,
                 name: str | None = None) -> list[Path]:
    """Write records as CSV (one row each) plus a JSON copy; returns paths.

    The stem is inferred from the record type when not given.
    """
    if not records:
        raise ValueError("no records to emit")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stems = {
        StaticRunRecord: "static_runs",
        TimeseriesRecord: "timeseries",
        TradeoffPoint: "tradeoff",
    }
    stem = name or stems.get(type(records[0]), type(records[0]).__name__.lower())
    names, rows = _record_rows(records)

    csv_path = out_dir / f"{stem}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=names)
        writer.writeheader()
        writer.writerows(rows)

    json_path = out_dir / f"{stem}.json"
    payload = [
        {name: getattr(record, name) for name in names} for record in records
    ]
    json_path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return [csv_path, json_path]


def emit_static_summary(summaries: Sequence[StaticSummary],
                        out_dir: str | Path) -> list[Path]:
    """Condition-level summary table: condition, unguarded, guarded, core."""
    if not summaries:
        raise ValueError("no summaries to emit")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "static_summary.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["condition", "unguarded", "guarded", "core"])
        for s in summaries:
            writer.writerow([
                s.condition,
                s.unguarded_mean,
                "" if s.guarded_mean is None else s.guarded_mean,
                s.core_mean,
            ])
    json_path = out_dir / "static_summary.json"
    json_path.write_text(
        json.dumps([s.to_dict() for s in summaries], sort_keys=True, indent=2) + "\n",
        encoding="utf-8")
    return [csv_path, json_path]
