"""Command-line interface.

Subcommands: certify, guard measure, recertify, renegotiate,
ledger verify|replay, exp static|timeseries|tradeoff,
sim gen-events|gen-agents, stats wilson.

A JSON config file may supply any value a flag omits; explicit flags win.
Every command that writes an output directory also writes a manifest
(resolved config plus versions) sufficient to re-run it bit-identically.
Errors are reported as one JSON object on stderr with distinct exit
codes: 1 failed verification, 2 usage, 3 invalid configuration,
4 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
from pathlib import Path

from . import __version__
from .adapter import AdapterError, external_provider
from .certification import (
    AuditError,
    CertifiedCore,
    Event,
    ReplayError,
    certify,
    replay_certification,
    sample_audit_plan,
)
from .guard import guarded_vocabulary, measure_disagreement
from .ledger import Ledger, LedgerTamperedError, verify_file
from .lifecycle import recertify, renegotiate
from .simagents import (
    COLOR_TERMS,
    Condition,
    SimEvent,
    gen_events,
    gen_policies,
    save_policy,
)
from .stats import ProtocolParams, wilson_upper
from . import experiments
from .experiments import (
    Scenario,
    TimeseriesConfig,
    TwoPopulationModel,
    emit_results,
    emit_static_summary,
    run_static,
    run_timeseries,
    run_tradeoff,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4

_ENV_OUT = "SEMCERT_OUT"


def _default_out() -> str:
    return os.environ.get(_ENV_OUT, "semcert-out")


def _resolve(args: argparse.Namespace, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _load_config(args: argparse.Namespace) -> dict:
    path = getattr(args, "config", None)
    if not path:
        return {}
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _params(args: argparse.Namespace, config: dict,
            tau: float = 0.05, delta: float = 0.05,
            rho_min: float = 0.10) -> ProtocolParams:
    return ProtocolParams(
        tau=_resolve(args, config, "tau", tau),
        delta=_resolve(args, config, "delta", delta),
        rho_min=_resolve(args, config, "rho_min", rho_min),
    )


def load_events(path: str | Path) -> list:
    """Read an events file: either generated hue events or external ones."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    items = data["events"] if isinstance(data, dict) else data
    events = []
    for item in items:
        if "hue" in item:
            events.append(SimEvent(pei=item["pei"], hue=item["hue"]))
        else:
            events.append(Event(pei=item["pei"], content=item.get("content", "")))
    return events


def save_events(events, path: str | Path, seed: int | None = None) -> None:
    payload = {
        "seed": seed,
        "n": len(events),
        "events": [
            {"pei": e.pei, "hue": e.hue} if isinstance(e, SimEvent)
            else {"pei": e.pei, "content": e.content}
            for e in events
        ],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def _load_vocab(path: str | None) -> tuple[str, ...]:
    if path is None:
        return COLOR_TERMS
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list) or not all(isinstance(t, str) for t in data):
        raise ValueError("vocabulary file must hold a JSON list of strings")
    return tuple(data)


def _providers(args: argparse.Namespace, config: dict):
    specs = _resolve(args, config, "agents", None)
    if not specs or len(specs) != 2:
        raise ValueError("exactly two --agents adapter specs are required")
    ids = _resolve(args, config, "agent_ids", ["A1", "A2"])
    timeout = _resolve(args, config, "timeout", 30.0)
    return (external_provider(specs[0], agent_id=ids[0], timeout=timeout),
            external_provider(specs[1], agent_id=ids[1], timeout=timeout))


def _write_manifest(out_dir: Path, command: str, config: dict) -> None:
    manifest = {
        "command": command,
        "config": config,
        "versions": {
            "semcert": __version__,
            "python": platform.python_version(),
        },
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _emit_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


# ---------------------------------------------------------------- commands


def _cmd_certify(args) -> int:
    config = _load_config(args)
    params = _params(args, config)
    seed = _resolve(args, config, "seed", 0)
    epoch = _resolve(args, config, "epoch", 0)
    per_term = _resolve(args, config, "per_term", experiments.DEFAULT_PER_TERM_SIZE)
    vocab = _load_vocab(_resolve(args, config, "vocab", None))
    events = load_events(_resolve(args, config, "events", None))
    a1, a2 = _providers(args, config)
    ledger = Ledger(_resolve(args, config, "ledger", None))
    plan = sample_audit_plan(events, vocab, per_term, seed)
    core = certify(a1, a2, plan, params, ledger, epoch)
    sys.stdout.write(core.to_json())
    out = _resolve(args, config, "out", None)
    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "core.json").write_text(core.to_json(), encoding="utf-8")
        _write_manifest(out_dir, "certify", {
            "tau": params.tau, "delta": params.delta, "rho_min": params.rho_min,
            "seed": seed, "epoch": epoch, "per_term": per_term,
            "vocab": list(vocab), "events": str(args.events),
            "ledger": str(args.ledger), "agents": list(args.agents),
        })
    return EXIT_OK


def _cmd_guard_measure(args) -> int:
    config = _load_config(args)
    core = CertifiedCore.from_json(Path(args.core).read_text(encoding="utf-8"))
    events = load_events(_resolve(args, config, "events", None))
    a1, a2 = _providers(args, config)
    if args.terms:
        terms = [t for t in args.terms.split(",") if t]
    else:
        terms = sorted(guarded_vocabulary(core, core.certificates.keys()))
    log: list | None = [] if args.log_verdicts else None
    report = measure_disagreement(a1, a2, terms, events, log=log)
    payload = report.to_dict()
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    if args.out:
        _emit_json(Path(args.out), payload)
        _write_manifest(Path(args.out).parent, "guard measure", {
            "core": str(args.core), "events": str(args.events),
            "agents": list(args.agents), "terms": terms,
        })
    if args.log_verdicts:
        lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in log)
        Path(args.log_verdicts).write_text(lines, encoding="utf-8")
    return EXIT_OK


def _cmd_recertify(args) -> int:
    config = _load_config(args)
    params = _params(args, config)
    seed = _resolve(args, config, "seed", 0)
    per_term = _resolve(args, config, "per_term", None)
    core = CertifiedCore.from_json(Path(args.core).read_text(encoding="utf-8"))
    events = load_events(_resolve(args, config, "events", None))
    a1, a2 = _providers(args, config)
    ledger = Ledger(args.ledger)
    updated, outcomes = recertify(core, a1, a2, events, params, ledger,
                                  args.epoch, per_term_size=per_term, seed=seed)
    out_dir = Path(_resolve(args, config, "out", _default_out()))
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "core.json").write_text(updated.to_json(), encoding="utf-8")
    _emit_json(out_dir / "recert_outcomes.json", [o.to_dict() for o in outcomes])
    _write_manifest(out_dir, "recertify", {
        "tau": params.tau, "delta": params.delta, "rho_min": params.rho_min,
        "seed": seed, "epoch": args.epoch, "per_term": per_term,
        "core": str(args.core), "events": str(args.events),
        "ledger": str(args.ledger), "agents": list(args.agents),
    })
    sys.stdout.write(updated.to_json())
    return EXIT_OK


def _cmd_renegotiate(args) -> int:
    config = _load_config(args)
    params = _params(args, config)
    seed = _resolve(args, config, "seed", 0)
    per_term = _resolve(args, config, "per_term", None)
    core = CertifiedCore.from_json(Path(args.core).read_text(encoding="utf-8"))
    if args.term in core.core:
        raise ValueError(f"term {args.term!r} is already in the certified core")
    events = load_events(_resolve(args, config, "events", None))
    a1, a2 = _providers(args, config)
    ledger = Ledger(args.ledger)
    outcome = renegotiate(args.term, a1, a2, ledger, events, params,
                          args.epoch, per_term_size=per_term, seed=seed)
    out_dir = Path(_resolve(args, config, "out", _default_out()))
    out_dir.mkdir(parents=True, exist_ok=True)
    _emit_json(out_dir / "renegotiation.json", outcome.to_dict())
    if outcome.restored:
        updated = core.with_certificates(outcome.certificate)
        (out_dir / "core.json").write_text(updated.to_json(), encoding="utf-8")
    _write_manifest(out_dir, "renegotiate", {
        "term": args.term, "tau": params.tau, "delta": params.delta,
        "rho_min": params.rho_min, "seed": seed, "epoch": args.epoch,
        "per_term": per_term, "core": str(args.core),
        "events": str(args.events), "ledger": str(args.ledger),
        "agents": list(args.agents),
    })
    sys.stdout.write(json.dumps(outcome.to_dict(), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _cmd_ledger_verify(args) -> int:
    check = verify_file(args.path)
    payload = {"valid": check.valid}
    if not check.valid:
        payload["invalid_at"] = check.invalid_at
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK if check.valid else EXIT_VERIFY_FAILED


def _cmd_ledger_replay(args) -> int:
    config = _load_config(args)
    params = _params(args, config)
    epoch = _resolve(args, config, "epoch", 0)
    check = verify_file(args.path)
    if not check.valid:
        raise LedgerTamperedError(check.invalid_at)
    ledger = Ledger.load(args.path)
    core = replay_certification(ledger, params, epoch)
    sys.stdout.write(core.to_json())
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "core.json").write_text(core.to_json(), encoding="utf-8")
        _write_manifest(out_dir, "ledger replay", {
            "path": str(args.path), "tau": params.tau, "delta": params.delta,
            "rho_min": params.rho_min, "epoch": epoch,
        })
    return EXIT_OK


_CONDITIONS = {c.value: c for c in Condition}


def _cmd_exp_static(args) -> int:
    config = _load_config(args)
    params = _params(args, config)
    runs = _resolve(args, config, "runs", 100)
    seed = _resolve(args, config, "seed", 0)
    per_term = _resolve(args, config, "per_term", experiments.DEFAULT_PER_TERM_SIZE)
    condition = _CONDITIONS[args.condition]
    records, summary = run_static(condition, runs, params, seed,
                                  per_term_size=per_term)
    out_dir = Path(_resolve(args, config, "out", _default_out()))
    emit_results(records, out_dir)
    emit_static_summary([summary], out_dir)
    _write_manifest(out_dir, "exp static", {
        "condition": args.condition, "runs": runs, "seed": seed,
        "per_term": per_term, "tau": params.tau, "delta": params.delta,
        "rho_min": params.rho_min,
    })
    sys.stdout.write(json.dumps(summary.to_dict(), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _cmd_exp_timeseries(args) -> int:
    config = _load_config(args)
    params = _params(args, config)
    seed = _resolve(args, config, "seed", 0)
    cfg = TimeseriesConfig(
        epochs=_resolve(args, config, "epochs", 50),
        drift_epoch=_resolve(args, config, "drift_epoch", 10),
        n_runs=_resolve(args, config, "runs", 10),
    )
    scenario = Scenario(args.scenario)
    records = run_timeseries(scenario, params, seed, cfg)
    out_dir = Path(_resolve(args, config, "out", _default_out()))
    emit_results(records, out_dir)
    _write_manifest(out_dir, "exp timeseries", {
        "scenario": args.scenario, "epochs": cfg.epochs,
        "drift_epoch": cfg.drift_epoch, "runs": cfg.n_runs, "seed": seed,
        "tau": params.tau, "delta": params.delta, "rho_min": params.rho_min,
    })
    sys.stdout.write(f"wrote {len(records)} epoch records to {out_dir}\n")
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    """Parse 'start:stop:step' into an inclusive grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid {text!r}")
    n = int(round((stop - start) / step))
    return [round(start + i * step, 10) for i in range(n + 1)]


def _cmd_exp_tradeoff(args) -> int:
    config = _load_config(args)
    seed = _resolve(args, config, "seed", 0)
    delta = _resolve(args, config, "delta", 0.05)
    k_audit = _resolve(args, config, "k_audit", 120)
    n_mc = _resolve(args, config, "mc", 0)
    pi_values = [float(p) for p in
                 _resolve(args, config, "pi", "0.3,0.5,0.7,0.9").split(",")]
    tau_grid = _parse_grid(_resolve(args, config, "tau_grid", "0.01:0.20:0.01"))
    model = TwoPopulationModel(
        p_lo=_resolve(args, config, "p_lo", 0.01),
        p_hi=_resolve(args, config, "p_hi", 0.30),
    )
    points = run_tradeoff(pi_values, tau_grid, model, k_audit=k_audit,
                          delta=delta, n_mc=n_mc, mc_seed=seed)
    out_dir = Path(_resolve(args, config, "out", _default_out()))
    emit_results(points, out_dir)
    _write_manifest(out_dir, "exp tradeoff", {
        "pi": pi_values, "tau_grid": tau_grid, "p_lo": model.p_lo,
        "p_hi": model.p_hi, "k_audit": k_audit, "delta": delta,
        "mc": n_mc, "seed": seed,
    })
    sys.stdout.write(f"wrote {len(points)} tradeoff points to {out_dir}\n")
    return EXIT_OK


def _cmd_sim_gen_events(args) -> int:
    config = _load_config(args)
    n = _resolve(args, config, "n", 1000)
    seed = _resolve(args, config, "seed", 0)
    events = gen_events(n, seed)
    save_events(events, args.out, seed=seed)
    sys.stdout.write(f"wrote {n} events to {args.out}\n")
    return EXIT_OK


def _cmd_sim_gen_agents(args) -> int:
    config = _load_config(args)
    seed = _resolve(args, config, "seed", 0)
    condition = _CONDITIONS[args.condition]
    p1, p2 = gen_policies(condition, seed)
    out_dir = Path(_resolve(args, config, "out", _default_out()))
    out_dir.mkdir(parents=True, exist_ok=True)
    path1 = out_dir / f"agent_{p1.agent_id}.json"
    path2 = out_dir / f"agent_{p2.agent_id}.json"
    save_policy(p1, path1)
    save_policy(p2, path2)
    _write_manifest(out_dir, "sim gen-agents",
                    {"condition": args.condition, "seed": seed})
    sys.stdout.write(f"wrote {path1} and {path2}\n")
    return EXIT_OK


def _cmd_stats_wilson(args) -> int:
    delta = args.delta if args.delta is not None else 0.05
    u = wilson_upper(args.c, args.k, delta)
    sys.stdout.write(json.dumps(
        {"c": args.c, "k": args.k, "delta": delta, "u": u},
        sort_keys=True) + "\n")
    return EXIT_OK


# ----------------------------------------------------------------- parser


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=float, help="contradiction threshold (default 0.05)")
    p.add_argument("--delta", type=float, help="confidence parameter (default 0.05)")
    p.add_argument("--rho-min", dest="rho_min", type=float,
                   help="coverage floor (default 0.10)")


def _add_agent_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--agents", nargs=2, metavar=("SPEC1", "SPEC2"),
                   help="adapter specs: sim:<policy.json>, cmd:<argv>, tcp:<host:port>")
    p.add_argument("--agent-ids", dest="agent_ids", nargs=2,
                   metavar=("ID1", "ID2"),
                   help="agent ids for non-sim adapters (default A1 A2)")
    p.add_argument("--timeout", type=float,
                   help="per-verdict timeout in seconds (default 30)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semcert",
        description="Certify shared vocabulary between two agents from "
                    "witnessed behavioral tests.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="audit two agents and certify terms")
    p.add_argument("--config", help="JSON config supplying omitted flags")
    p.add_argument("--ledger", required=True, help="ledger file to append to")
    p.add_argument("--vocab", help="JSON list of terms (default: 6 color terms)")
    p.add_argument("--events", required=True, help="audit events file")
    _add_param_flags(p)
    p.add_argument("--per-term", dest="per_term", type=int,
                   help="audit events per term (default 195)")
    p.add_argument("--seed", type=int, help="plan sampling seed (default 0)")
    p.add_argument("--epoch", type=int, help="audit round index (default 0)")
    _add_agent_flags(p)
    p.add_argument("--out", help="output directory for core.json + manifest")
    p.set_defaults(func=_cmd_certify)

    guard = sub.add_parser("guard", help="core-guarded reasoning tools")
    guard_sub = guard.add_subparsers(dest="guard_command", required=True)
    p = guard_sub.add_parser("measure", help="measure disagreement on held-out events")
    p.add_argument("--config")
    p.add_argument("--core", required=True, help="certified core JSON")
    p.add_argument("--events", required=True, help="held-out events file")
    p.add_argument("--terms", help="comma-separated override of the term set")
    _add_agent_flags(p)
    p.add_argument("--out", help="report JSON path")
    p.add_argument("--log-verdicts", dest="log_verdicts",
                   help="JSONL file recording every evaluation verdict")
    p.set_defaults(func=_cmd_guard_measure)

    p = sub.add_parser("recertify", help="re-audit core terms on fresh events")
    p.add_argument("--config")
    p.add_argument("--ledger", required=True)
    p.add_argument("--core", required=True)
    p.add_argument("--events", required=True, help="fresh events file")
    p.add_argument("--epoch", type=int, required=True)
    _add_param_flags(p)
    p.add_argument("--per-term", dest="per_term", type=int,
                   help="fresh audit size per term (default: whole pool)")
    p.add_argument("--seed", type=int)
    _add_agent_flags(p)
    p.add_argument("--out", help="output directory (default $SEMCERT_OUT)")
    p.set_defaults(func=_cmd_recertify)

    p = sub.add_parser("renegotiate",
                       help="restore an excluded term via entrenchment adoption")
    p.add_argument("--config")
    p.add_argument("--term", required=True)
    p.add_argument("--ledger", required=True)
    p.add_argument("--core", required=True)
    p.add_argument("--events", required=True, help="fresh events file")
    p.add_argument("--epoch", type=int, required=True)
    _add_param_flags(p)
    p.add_argument("--per-term", dest="per_term", type=int)
    p.add_argument("--seed", type=int)
    _add_agent_flags(p)
    p.add_argument("--out", help="output directory (default $SEMCERT_OUT)")
    p.set_defaults(func=_cmd_renegotiate)

    led = sub.add_parser("ledger", help="ledger tooling")
    led_sub = led.add_subparsers(dest="ledger_command", required=True)
    p = led_sub.add_parser("verify", help="verify a ledger file's hash chain")
    p.add_argument("path")
    p.set_defaults(func=_cmd_ledger_verify)
    p = led_sub.add_parser("replay",
                           help="recompute certification from ledger entries")
    p.add_argument("path")
    p.add_argument("--config")
    _add_param_flags(p)
    p.add_argument("--epoch", type=int, help="audit round to replay (default 0)")
    p.add_argument("--out", help="output directory for core.json + manifest")
    p.set_defaults(func=_cmd_ledger_replay)

    exp = sub.add_parser("exp", help="simulation experiments")
    exp_sub = exp.add_subparsers(dest="exp_command", required=True)

    p = exp_sub.add_parser("static", help="certification across divergence conditions")
    p.add_argument("--config")
    p.add_argument("--condition", required=True,
                   choices=sorted(_CONDITIONS), help="divergence condition")
    p.add_argument("--runs", type=int, help="number of seeded runs (default 100)")
    p.add_argument("--seed", type=int, help="base seed (default 0)")
    p.add_argument("--per-term", dest="per_term", type=int,
                   help="audit events per term (default 195)")
    _add_param_flags(p)
    p.add_argument("--out", help="output directory (default $SEMCERT_OUT)")
    p.set_defaults(func=_cmd_exp_static)

    p = exp_sub.add_parser("timeseries", help="drift, recertification, renegotiation")
    p.add_argument("--config")
    p.add_argument("--scenario", required=True,
                   choices=[s.value for s in Scenario])
    p.add_argument("--epochs", type=int, help="epochs to simulate (default 50)")
    p.add_argument("--drift-epoch", dest="drift_epoch", type=int,
                   help="epoch at which drift is injected (default 10)")
    p.add_argument("--runs", type=int, help="trajectories to average (default 10)")
    p.add_argument("--seed", type=int)
    _add_param_flags(p)
    p.add_argument("--out", help="output directory (default $SEMCERT_OUT)")
    p.set_defaults(func=_cmd_exp_timeseries)

    p = exp_sub.add_parser("tradeoff", help="coverage vs reliability curves")
    p.add_argument("--config")
    p.add_argument("--pi", help="comma-separated well-aligned fractions "
                               "(default 0.3,0.5,0.7,0.9)")
    p.add_argument("--tau-grid", dest="tau_grid",
                   help="threshold grid start:stop:step (default 0.01:0.20:0.01)")
    p.add_argument("--p-lo", dest="p_lo", type=float,
                   help="aligned-population contradiction rate (default 0.01)")
    p.add_argument("--p-hi", dest="p_hi", type=float,
                   help="misaligned-population contradiction rate (default 0.30)")
    p.add_argument("--k-audit", dest="k_audit", type=int,
                   help="eligible comparisons per term (default 120)")
    p.add_argument("--delta", type=float, help="confidence parameter (default 0.05)")
    p.add_argument("--mc", type=int,
                   help="Monte Carlo cross-check sample size (default 0 = off)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory (default $SEMCERT_OUT)")
    p.set_defaults(func=_cmd_exp_tradeoff)

    sim = sub.add_parser("sim", help="synthetic agents and events")
    sim_sub = sim.add_subparsers(dest="sim_command", required=True)
    p = sim_sub.add_parser("gen-events", help="generate uniform hue events")
    p.add_argument("--config")
    p.add_argument("--n", type=int, help="number of events (default 1000)")
    p.add_argument("--seed", type=int, help="generation seed (default 0)")
    p.add_argument("--out", required=True, help="events JSON file to write")
    p.set_defaults(func=_cmd_sim_gen_events)
    p = sim_sub.add_parser("gen-agents", help="generate an agent policy pair")
    p.add_argument("--config")
    p.add_argument("--condition", required=True, choices=sorted(_CONDITIONS))
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory (default $SEMCERT_OUT)")
    p.set_defaults(func=_cmd_sim_gen_agents)

    st = sub.add_parser("stats", help="statistical kernels")
    st_sub = st.add_subparsers(dest="stats_command", required=True)
    p = st_sub.add_parser("wilson", help="one-sided Wilson upper bound")
    p.add_argument("--c", type=int, required=True, help="contradictions")
    p.add_argument("--k", type=int, required=True, help="eligible comparisons")
    p.add_argument("--delta", type=float, help="confidence parameter (default 0.05)")
    p.set_defaults(func=_cmd_stats_wilson)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_CONFIG
    except (AuditError, ReplayError, LedgerTamperedError, AdapterError,
            OSError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, LedgerTamperedError):
            payload["invalid_at"] = exc.invalid_at
        sys.stderr.write(json.dumps(payload) + "\n")
        return EXIT_RUNTIME


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
