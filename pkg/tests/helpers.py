"""Shared scenario builders and an independent brute-force oracle.

make_tiny keeps instances small enough (at most 4 buyers, 8 sellers) for
exhaustive cross-checking; roughly half the draws use a tight contact
threshold so the structure constraint actually bites.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from vcauction import (
    GraphJob,
    JobEdge,
    Scenario,
    ServiceProvider,
    ValuationConfig,
    VirtualMachine,
    expand_vms,
    max_rank_for,
    validate_scenario,
)

_SHAPES = {
    1: ((),),
    2: (((0, 1),),),
    3: (((0, 1), (1, 2)), ((0, 1), (1, 2), (0, 2))),
    4: (((0, 1), (0, 2), (0, 3)), ((0, 1), (1, 2), (2, 3))),
}


def make_tiny(seed: int) -> Scenario:
    """Random scenario with <= 4 buyers and <= 8 sellers."""
    rng = np.random.default_rng(seed)
    n_total = int(rng.choice([2, 3, 4], p=[0.25, 0.35, 0.4]))
    if n_total == 4 and rng.random() < 0.35:
        sizes = [2, 2] if rng.random() < 0.5 else [1, 3]
    elif n_total == 3 and rng.random() < 0.3:
        sizes = [1, 2]
    else:
        sizes = [n_total]

    jobs = []
    for jn, size in enumerate(sizes):
        shapes = _SHAPES[size]
        edge_list = shapes[int(rng.integers(len(shapes)))]
        alpha = float(rng.uniform(2.5, 4.5))
        times = tuple(float(rng.uniform(0.6, 0.7)) for _ in range(size))
        edges = []
        for a, b in edge_list:
            w = float(rng.uniform(0.05, 0.7))
            edges.append(JobEdge(a, b, min(w, times[a], times[b])))
        jobs.append(GraphJob(jn, alpha, times, tuple(edges)))
    jobs = tuple(jobs)
    max_demand = max(t for job in jobs for t in job.tolerable_times)

    tight = rng.random() < 0.5
    if tight:
        epsilon = float(rng.uniform(0.96, 0.995))
        lam = lambda: float(rng.uniform(0.5, 2.0))
    else:
        epsilon = float(rng.uniform(0.9, 0.95))
        lam = lambda: float(rng.uniform(0.05, 0.06))

    n_sp = int(rng.integers(1, 4))
    vm_counts = {1: int(rng.integers(1, 4)), 2: int(rng.integers(1, 3)), 3: 1}[n_sp]
    sps = []
    for m in range(n_sp):
        vms = tuple(
            VirtualMachine(base, max_rank_for(base, max_demand))
            for base in (float(rng.uniform(0.3, 0.5)) for _ in range(vm_counts))
        )
        sps.append(ServiceProvider(m, vms))
    sps = tuple(sps)

    rates = [[0.0] * n_sp for _ in range(n_sp)]
    for i in range(n_sp):
        for j in range(i + 1, n_sp):
            rates[i][j] = rates[j][i] = lam()

    coverage = []
    for _ in jobs:
        cov = frozenset(m for m in range(n_sp) if rng.random() < 0.8)
        if not cov:
            cov = frozenset({int(rng.integers(n_sp))})
        coverage.append(cov)

    valuation = ValuationConfig(
        beta1=float(rng.uniform(0.7, 0.9)), beta2=float(rng.uniform(0.9, 1.0))
    )
    s = Scenario(
        jobs=jobs,
        sps=sps,
        contact_rate=tuple(tuple(row) for row in rates),
        coverage=tuple(coverage),
        epsilon=epsilon,
        valuation=valuation,
        seed=seed,
        sellers=expand_vms(sps, max_demand, valuation),
    )
    problems = validate_scenario(s)
    assert not problems, problems
    assert len(s.buyers) <= 4 and len(s.sellers) <= 8
    return s


def backtrack_scenario() -> Scenario:
    """Two buyers whose top seller sits on a provider the job edge cannot span.

    The first broker entry must be dropped twice before both buyers land on
    the second provider, which is the only structure-preserving completion.
    """
    job = GraphJob(0, 7.0, (0.38, 0.38), (JobEdge(0, 1, 0.3),))
    valuation = ValuationConfig(beta1=0.9, beta2=1.0)
    sps = (
        ServiceProvider(0, (VirtualMachine(0.2, 1),)),
        ServiceProvider(1, (VirtualMachine(0.25, 1), VirtualMachine(0.26, 1))),
    )
    s = Scenario(
        jobs=(job,),
        sps=sps,
        contact_rate=((0.0, 2.0), (2.0, 0.0)),
        coverage=(frozenset({0, 1}),),
        epsilon=0.95,
        valuation=valuation,
        seed=0,
        sellers=expand_vms(sps, 0.38, valuation),
    )
    assert not validate_scenario(s)
    return s


def three_provider_scenario() -> Scenario:
    """One triangle job over three providers with an 11-seller expansion.

    Provider 0 carries VMs of 1.5 s and 0.8 s base time, provider 1 one of
    1.2 s, provider 2 one of 0.75 s; the largest tolerable time of 3 s caps
    the ranks at 2, 3, 2 and 4 respectively.
    """
    job = GraphJob(
        0,
        1.0,
        (3.0, 2.5, 2.8),
        (JobEdge(0, 1, 0.2), JobEdge(1, 2, 0.2), JobEdge(0, 2, 0.2)),
    )
    valuation = ValuationConfig(beta1=0.25, beta2=0.95)
    sps = (
        ServiceProvider(0, (VirtualMachine(1.5, 2), VirtualMachine(0.8, 3))),
        ServiceProvider(1, (VirtualMachine(1.2, 2),)),
        ServiceProvider(2, (VirtualMachine(0.75, 4),)),
    )
    s = Scenario(
        jobs=(job,),
        sps=sps,
        contact_rate=(
            (0.0, 0.05, 0.05),
            (0.05, 0.0, 0.05),
            (0.05, 0.05, 0.0),
        ),
        coverage=(frozenset({0, 1, 2}),),
        epsilon=0.9,
        valuation=valuation,
        seed=0,
        sellers=expand_vms(sps, 3.0, valuation),
    )
    assert not validate_scenario(s)
    return s


def independent_best_value(s: Scenario) -> float | None:
    """Brute-force optimum over complete assignments, from raw fields only.

    Reimplements the feasibility rules with explicit arithmetic rather than
    calling the library, so solver bugs cannot hide in shared code. Returns
    None when no complete feasible assignment exists.
    """
    buyers = list(s.buyers)
    sellers = list(s.sellers)
    edges = list(s.job_edges())
    best = None
    for combo in itertools.permutations(range(len(sellers)), len(buyers)):
        value = 0.0
        placed = {}
        ok = True
        for buyer, si in zip(buyers, combo):
            sel = sellers[si]
            job = s.jobs[buyer.job_index]
            t = job.tolerable_times[buyer.component_index]
            if sel.id.sp_index not in s.coverage[buyer.job_index]:
                ok = False
                break
            if sel.capability > t + 1e-9:
                ok = False
                break
            u = job.alpha * (t - sel.capability) - sel.bid
            if u <= 1e-9:
                ok = False
                break
            placed[buyer] = sel.id.sp_index
            value += u
        if not ok:
            continue
        for b1, b2, w in edges:
            m1, m2 = placed[b1], placed[b2]
            if m1 != m2 and math.exp(-s.contact_rate[m1][m2] * w) < s.epsilon - 1e-9:
                ok = False
                break
        if ok and (best is None or value > best):
            best = value
    return best
