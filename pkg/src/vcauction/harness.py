"""Experiment plumbing: run mechanisms, audit the results, measure runtimes.

Every mechanism result passes through one chokepoint that re-validates the
allocation against all constraints before it is reported or serialized, so an
infeasible assignment can never leak into an output file.
"""
from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

from .model import (
    Assignment,
    BuyerId,
    Scenario,
    SellerId,
    TOLERANCE,
    scenario_dumps,
)
from .economics import assignment_feasible, objective
from .optimal import (
    BudgetExceeded,
    run_optimal_mechanism,
    solve_naive,
    solve_optimal,
    verify_truthfulness_opt,
)
from .matching import (
    BuyerPrefList,
    build_broker_list,
    build_buyer_list,
    run_matching,
    verify_truthfulness_matching,
)
from .baselines import BASELINE_KINDS, run_baseline
from .generator import GenConfig, config_to_dict, generate, preset

__all__ = [
    "MECHANISMS",
    "MechanismRun",
    "scenario_digest",
    "run_mechanism",
    "run_to_doc",
    "ir_violations",
    "experiment",
    "verify_report",
    "bench_sweep",
    "serialize_buyer_lists",
]

MECHANISMS = ("opt", "maxuosg") + BASELINE_KINDS

# Above this many buyers the exact solver is skipped in batch experiments.
OPT_BUYER_CUTOFF = 10


@dataclass
class MechanismRun:
    mechanism: str
    success: bool
    objective_value: float
    runtime_secs: float
    assignment: Assignment | None
    payments: dict[SellerId, float] | None
    truncated: bool = False
    detail: dict = field(default_factory=dict)


def scenario_digest(s: Scenario) -> str:
    return hashlib.sha256(scenario_dumps(s).encode()).hexdigest()[:16]


def run_mechanism(
    s: Scenario,
    name: str,
    seed: int = 0,
    budget_secs: float | None = None,
) -> MechanismRun:
    """Dispatch one mechanism and re-validate whatever it produced."""
    if name not in MECHANISMS:
        raise ValueError(f"unknown mechanism {name!r}, expected one of {MECHANISMS}")
    t0 = time.perf_counter()
    assignment: Assignment | None = None
    payments: dict[SellerId, float] | None = None
    truncated = False
    detail: dict = {}

    if name == "opt":
        try:
            outcome = run_optimal_mechanism(s, budget_secs=budget_secs)
        except BudgetExceeded:
            outcome = None
            truncated = True
        if outcome is not None:
            assignment = outcome.assignment
            payments = outcome.payments
            detail["explored_nodes"] = outcome.explored_nodes
    elif name == "maxuosg":
        outcome = run_matching(s)
        detail["trace_events"] = len(outcome.match_trace)
        detail["match_trace"] = [list(ev) for ev in outcome.match_trace]
        if outcome.success:
            assignment = outcome.assignment
            payments = outcome.payments
    else:
        assignment = run_baseline(s, name, seed=seed)

    runtime = time.perf_counter() - t0
    if assignment is not None and not assignment_feasible(s, assignment, require_complete=True):
        raise RuntimeError(f"mechanism {name} produced an infeasible assignment")
    value = objective(s, assignment) if assignment is not None else 0.0
    return MechanismRun(
        mechanism=name,
        success=assignment is not None,
        objective_value=value,
        runtime_secs=runtime,
        assignment=assignment,
        payments=payments,
        truncated=truncated,
        detail=detail,
    )


def ir_violations(s: Scenario, run: MechanismRun) -> list[str]:
    """Individual-rationality audit: winners, their VMs, and their providers.

    Checks payment >= bid and utility >= 0 per winner, then aggregates winner
    utilities per VM and per provider. Payments are required for the audit,
    so baseline runs (allocation only) report nothing.
    """
    if not run.success or run.payments is None:
        return []
    bad: list[str] = []
    vm_total: dict[tuple[int, int], float] = {}
    sp_total: dict[int, float] = {}
    for sid, payment in run.payments.items():
        sel = s.seller(sid)
        utility = payment - sel.true_value
        if payment < sel.bid - TOLERANCE:
            bad.append(
                f"{run.mechanism}: payment {payment:.9f} below bid {sel.bid:.9f} for {sid.label()}"
            )
        if utility < -TOLERANCE:
            bad.append(
                f"{run.mechanism}: negative utility {utility:.9f} for {sid.label()}"
            )
        vm_key = (sid.sp_index, sid.vm_index)
        vm_total[vm_key] = vm_total.get(vm_key, 0.0) + utility
        sp_total[sid.sp_index] = sp_total.get(sid.sp_index, 0.0) + utility
    for (m, y), total in vm_total.items():
        if total < -TOLERANCE:
            bad.append(f"{run.mechanism}: VM ({m},{y}) total utility {total:.9f} negative")
    for m, total in sp_total.items():
        if total < -TOLERANCE:
            bad.append(f"{run.mechanism}: provider {m} total utility {total:.9f} negative")
    return bad


def _pairs_doc(assignment: Assignment) -> list:
    return [
        {"buyer": [b.job_index, b.component_index], "seller": [s.sp_index, s.vm_index, s.rank]}
        for b, s in assignment.pairs
    ]


def _payments_doc(payments: dict[SellerId, float]) -> dict:
    return {f"{k.sp_index}:{k.vm_index}:{k.rank}": v for k, v in sorted(payments.items())}


def run_to_doc(s: Scenario, run: MechanismRun) -> dict:
    doc = {
        "mechanism": run.mechanism,
        "success": run.success,
        "objective": run.objective_value,
        "runtime_secs": run.runtime_secs,
        "truncated": run.truncated,
        "scenario_digest": scenario_digest(s),
        "buyers": len(s.buyers),
        "sellers": len(s.sellers),
    }
    if run.assignment is not None:
        doc["pairs"] = _pairs_doc(run.assignment)
        doc["validated"] = True
    if run.payments is not None:
        doc["payments"] = _payments_doc(run.payments)
    doc.update({k: v for k, v in run.detail.items() if k != "match_trace"})
    if "match_trace" in run.detail:
        doc["match_trace"] = run.detail["match_trace"]
    return doc


def experiment(
    cfg: GenConfig,
    trials: int,
    base_seed: int = 0,
    budget_secs: float | None = 300.0,
    include_opt: bool | None = None,
    preset_name: str | None = None,
) -> tuple[dict, list[dict]]:
    """Generate `trials` scenarios and run every applicable mechanism.

    Returns (summary, rows). The exact solver joins only when the buyer count
    is at or below OPT_BUYER_CUTOFF (or when include_opt forces it).
    """
    rows: list[dict] = []
    sums: dict[str, float] = {}
    times: dict[str, float] = {}
    wins: dict[str, int] = {}
    any_ir: list[str] = []

    for trial in range(trials):
        seed = base_seed + trial
        s = generate(cfg, seed=seed)
        digest = scenario_digest(s)
        use_opt = include_opt if include_opt is not None else len(s.buyers) <= OPT_BUYER_CUTOFF
        mechanisms = (("opt",) if use_opt else ()) + ("maxuosg",) + BASELINE_KINDS
        for name in mechanisms:
            run = run_mechanism(s, name, seed=seed, budget_secs=budget_secs)
            any_ir.extend(ir_violations(s, run))
            rows.append(
                {
                    "trial": trial,
                    "seed": seed,
                    "scenario_digest": digest,
                    "buyers": len(s.buyers),
                    "sellers": len(s.sellers),
                    "mechanism": name,
                    "success": int(run.success),
                    "objective": run.objective_value,
                    "runtime_secs": run.runtime_secs,
                    "truncated": int(run.truncated),
                }
            )
            if run.success:
                sums[name] = sums.get(name, 0.0) + run.objective_value
                times[name] = times.get(name, 0.0) + run.runtime_secs
                wins[name] = wins.get(name, 0) + 1

    mech_stats = {}
    for name in MECHANISMS:
        n = wins.get(name, 0)
        mech_stats[name] = {
            "successes": n,
            "mean_objective": (sums[name] / n) if n else None,
            "mean_runtime_secs": (times[name] / n) if n else None,
        }
    improvements = {}
    base_mean = mech_stats["maxuosg"]["mean_objective"]
    for name in BASELINE_KINDS:
        other = mech_stats[name]["mean_objective"]
        if base_mean is not None and other:
            improvements[name] = (base_mean / other - 1.0) * 100.0
        else:
            improvements[name] = None

    summary = {
        "preset": preset_name,
        "config": config_to_dict(cfg),
        "trials": trials,
        "base_seed": base_seed,
        "mechanisms": mech_stats,
        "improvement_over_baseline_pct": improvements,
        "ir_violations": any_ir,
    }
    return summary, rows


def serialize_buyer_lists(lists: dict[BuyerId, BuyerPrefList]) -> list[dict]:
    out = []
    for buyer in sorted(lists):
        lst = lists[buyer]
        out.append(
            {
                "buyer": [buyer.job_index, buyer.component_index],
                "entries": [
                    {
                        "index": i,
                        "seller": None
                        if e.seller is None
                        else [e.seller.sp_index, e.seller.vm_index, e.seller.rank],
                        "value": e.value,
                    }
                    for i, e in enumerate(lst.entries)
                ],
            }
        )
    return out


def verify_report(
    s: Scenario,
    mechanism: str = "maxuosg",
    budget_secs: float | None = 300.0,
) -> tuple[dict, list[dict]]:
    """Run one mechanism, audit rationality, and sweep every winner's bid.

    Returns (report, sweep_rows); report["violations"] non-empty means the
    auction failed a hard property.
    """
    if mechanism not in ("opt", "maxuosg"):
        raise ValueError("verify supports mechanisms 'opt' and 'maxuosg'")
    run = run_mechanism(s, mechanism, budget_secs=budget_secs)
    report: dict = {
        "mechanism": mechanism,
        "scenario_digest": scenario_digest(s),
        "success": run.success,
        "objective": run.objective_value,
        "violations": [],
        "winners": [],
        "sweeps": [],
    }
    rows: list[dict] = []
    if not run.success:
        return report, rows

    report["violations"] = ir_violations(s, run)
    assert run.payments is not None
    for sid, payment in sorted(run.payments.items()):
        sel = s.seller(sid)
        report["winners"].append(
            {
                "seller": [sid.sp_index, sid.vm_index, sid.rank],
                "bid": sel.bid,
                "payment": payment,
                "utility": payment - sel.true_value,
            }
        )

    if mechanism == "maxuosg":
        lists = {b: build_buyer_list(s, b) for b in s.buyers}
        report["buyer_lists"] = serialize_buyer_lists(lists)
        report["broker_list"] = [
            {
                "buyer": [e.buyer.job_index, e.buyer.component_index],
                "seller": [e.seller.sp_index, e.seller.vm_index, e.seller.rank],
                "value": e.value,
            }
            for e in build_broker_list([lists[b] for b in s.buyers]).entries
        ]
        assert run.assignment is not None
        report["pairs"] = _pairs_doc(run.assignment)

    for sid in sorted(run.payments):
        if mechanism == "opt":
            sweep = verify_truthfulness_opt(s, sid)
            if sweep["dominance_violations"]:
                report["violations"].append(
                    f"opt: dominance violated for {sid.label()} at bids {sweep['dominance_violations']}"
                )
        else:
            sweep = verify_truthfulness_matching(s, sid)
        label = f"{sid.sp_index}:{sid.vm_index}:{sid.rank}"
        report["sweeps"].append(
            {
                "seller": [sid.sp_index, sid.vm_index, sid.rank],
                "true_value": sweep["true_value"],
                "truthful_utility": sweep["truthful_utility"],
            }
        )
        for r in sweep["rows"]:
            rows.append(
                {
                    "seller": label,
                    "bid": r["bid"],
                    "won": int(r["won"]),
                    "payment": "" if r["payment"] is None else r["payment"],
                    "utility": r["utility"],
                    "classification": r.get("classification", ""),
                    "order_preserved": int(r.get("order_preserved", False)),
                }
            )
    return report, rows


def bench_sweep(
    job_type: int,
    sp_counts: list[int],
    base_seed: int = 0,
    budget_secs: float | None = 300.0,
) -> list[dict]:
    """Runtime table across provider counts for one job type.

    Three timings per cell: the literal enumeration (whose cost is the
    b!*C(s,b) candidate count and therefore grows monotonically with seller
    count), the pruned branch-and-bound solver, and the matching mechanism.
    Enumeration and branch-and-bound share the budget; a cell that exhausts
    it is flagged incomplete instead of hanging the sweep.
    """
    import math

    def log10_or_blank(x: float):
        return math.log10(x) if x > 0 else ""

    rows = []
    for sp in sp_counts:
        cfg_cell = GenConfig(
            job_types=(job_type,),
            sp_count=sp,
            vms_per_sp=preset("bench").vms_per_sp,
        )
        s = generate(cfg_cell, seed=base_seed + sp)

        t0 = time.perf_counter()
        enum_completed = True
        enum_maps: int | str = ""
        try:
            enum_res = solve_naive(s, budget_secs=budget_secs)
            enum_maps = enum_res.explored
        except BudgetExceeded:
            enum_completed = False
        enum_runtime = time.perf_counter() - t0

        t0 = time.perf_counter()
        bnb_completed = True
        try:
            solve_optimal(s, budget_secs=budget_secs)
        except BudgetExceeded:
            bnb_completed = False
        bnb_runtime = time.perf_counter() - t0

        match_run = run_mechanism(s, "maxuosg")
        row = {
            "job_type": job_type,
            "sp_count": sp,
            "buyers": len(s.buyers),
            "sellers": len(s.sellers),
            "enum_completed": int(enum_completed),
            "enum_maps": enum_maps,
            "enum_runtime_secs": enum_runtime,
            "enum_log10_runtime": log10_or_blank(enum_runtime),
            "bnb_completed": int(bnb_completed),
            "bnb_runtime_secs": bnb_runtime,
            "bnb_log10_runtime": log10_or_blank(bnb_runtime),
            "maxuosg_runtime_secs": match_run.runtime_secs,
            "maxuosg_log10_runtime": log10_or_blank(match_run.runtime_secs),
            "enum_over_maxuosg": (enum_runtime / match_run.runtime_secs)
            if match_run.runtime_secs > 0
            else "",
        }
        rows.append(row)
    return rows
