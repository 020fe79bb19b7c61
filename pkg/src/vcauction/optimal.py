"""Exact winner determination and clarke-pivot payments.

Two interchangeable solvers maximize total UoS over complete feasible
assignments: solve_naive literally enumerates every buyer permutation against
every same-size seller subset (the reference oracle, factorial cost), while
solve_optimal runs a depth-first search with an admissible upper bound and
returns the identical optimum. Ties on objective value are broken toward the
lexicographically smallest pair list, so both solvers agree exactly.

Payments follow the pivot rule: a winner receives its bid plus the welfare it
adds, F(K*) - F_without, where F_without re-solves the scenario with that
seller removed. When removal leaves no complete assignment at all, F_without
is 0 (the market cannot run), which keeps F(K*) >= F_without and therefore
non-negative winner utility under truthful bids.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .model import TOLERANCE, Assignment, Scenario, SellerId
from .economics import gross_utility, objective, uos

__all__ = [
    "BudgetExceeded",
    "SolveResult",
    "OptOutcome",
    "solve_naive",
    "solve_optimal",
    "vcg_payment",
    "run_optimal_mechanism",
    "default_bid_grid",
    "verify_truthfulness_opt",
]


class BudgetExceeded(RuntimeError):
    """Raised when a solve runs past its wall-clock deadline."""


@dataclass(frozen=True)
class SolveResult:
    assignment: Assignment | None
    objective_value: float
    explored: int


@dataclass(frozen=True)
class OptOutcome:
    assignment: Assignment
    objective_value: float
    payments: dict[SellerId, float]
    explored_nodes: int


class _Problem:
    """Scenario flattened into index arrays for the searches."""

    def __init__(self, s: Scenario, excluded: frozenset[SellerId] = frozenset()):
        self.s = s
        self.buyers = list(s.buyers)
        self.sellers = [sel for sel in s.sellers if sel.id not in excluded]
        nb, ns = len(self.buyers), len(self.sellers)
        self.nb, self.ns = nb, ns
        self.uos = [[0.0] * ns for _ in range(nb)]
        self.feasible = [[False] * ns for _ in range(nb)]
        self.feas_mask = [0] * nb
        for bi, buyer in enumerate(self.buyers):
            t = s.tolerable_time(buyer)
            alpha = s.alpha(buyer)
            cov = s.coverage[buyer.job_index]
            for si, sel in enumerate(self.sellers):
                if sel.id.sp_index not in cov:
                    continue
                if t + TOLERANCE < sel.capability:
                    continue
                value = uos(alpha, gross_utility(t, sel.capability), sel.bid)
                if value > TOLERANCE:
                    self.uos[bi][si] = value
                    self.feasible[bi][si] = True
                    self.feas_mask[bi] |= 1 << si
        self.best_uos = [
            max((self.uos[bi][si] for si in range(ns) if self.feasible[bi][si]), default=0.0)
            for bi in range(nb)
        ]
        self.sp_of = [sel.id.sp_index for sel in self.sellers]

        buyer_pos = {b: i for i, b in enumerate(self.buyers)}
        n_sp = len(s.sps)
        self.edges_of: list[list[tuple[int, tuple[tuple[bool, ...], ...]]]] = [
            [] for _ in range(nb)
        ]
        for b1, b2, weight in s.job_edges():
            allowed = tuple(
                tuple(
                    m1 == m2
                    or math.exp(-s.rate(m1, m2) * weight) >= s.epsilon - TOLERANCE
                    for m2 in range(n_sp)
                )
                for m1 in range(n_sp)
            )
            i, j = buyer_pos[b1], buyer_pos[b2]
            self.edges_of[i].append((j, allowed))
            self.edges_of[j].append((i, allowed))

    def pair_list(self, assigned: list[int]) -> tuple:
        pairs = [
            (self.buyers[bi], self.sellers[si].id)
            for bi, si in enumerate(assigned)
            if si >= 0
        ]
        return tuple(sorted(pairs))


def _edges_ok(prob: _Problem, assigned: list[int], bi: int, si: int) -> bool:
    sp = prob.sp_of[si]
    for other, allowed in prob.edges_of[bi]:
        osi = assigned[other]
        if osi >= 0 and not allowed[sp][prob.sp_of[osi]]:
            return False
    return True


def solve_naive(
    s: Scenario,
    excluded: frozenset[SellerId] = frozenset(),
    budget_secs: float | None = None,
) -> SolveResult:
    """Literal enumeration: every buyer ordering against every seller subset.

    Examines exactly b! * C(s, b) candidates; intended as the ground-truth
    oracle on tiny instances and as the runtime yardstick the pruned solver
    is benchmarked against.
    """
    deadline = time.perf_counter() + budget_secs if budget_secs is not None else None
    prob = _Problem(s, excluded)
    nb, ns = prob.nb, prob.ns
    count = 0
    best_value = -math.inf
    best_pairs: tuple | None = None

    for subset in itertools.combinations(range(ns), nb):
        for order in itertools.permutations(range(nb)):
            count += 1
            if deadline is not None and count % 4096 == 0 and time.perf_counter() > deadline:
                raise BudgetExceeded(f"enumeration stopped after {count} candidates")
            assigned = [-1] * nb
            total = 0.0
            ok = True
            for pos, bi in enumerate(order):
                si = subset[pos]
                if not prob.feasible[bi][si] or not _edges_ok(prob, assigned, bi, si):
                    ok = False
                    break
                assigned[bi] = si
                total += prob.uos[bi][si]
            if not ok:
                continue
            pairs = prob.pair_list(assigned)
            if total > best_value + TOLERANCE:
                best_value, best_pairs = total, pairs
            elif total >= best_value - TOLERANCE and (
                best_pairs is None or pairs < best_pairs
            ):
                best_value, best_pairs = max(best_value, total), pairs

    if best_pairs is None:
        return SolveResult(None, 0.0, count)
    assignment = Assignment(best_pairs)
    return SolveResult(assignment, objective(s, assignment), count)


def _greedy_seed(prob: _Problem, order: list[int]) -> list[int] | None:
    """Cheap feasible completion used to prime the search bound."""
    assigned = [-1] * prob.nb
    used = 0
    for bi in order:
        best_si, best_v = -1, -math.inf
        for si in range(prob.ns):
            if not prob.feasible[bi][si] or (used >> si) & 1:
                continue
            if prob.uos[bi][si] > best_v and _edges_ok(prob, assigned, bi, si):
                best_si, best_v = si, prob.uos[bi][si]
        if best_si < 0:
            return None
        assigned[bi] = best_si
        used |= 1 << best_si
    return assigned


def solve_optimal(
    s: Scenario,
    excluded: frozenset[SellerId] = frozenset(),
    require_complete: bool = True,
    budget_secs: float | None = None,
    _deadline: float | None = None,
) -> SolveResult:
    """Branch-and-bound equivalent of solve_naive.

    With require_complete=False the search may leave buyers unmatched and
    maximizes over partial assignments (the empty assignment is always
    feasible, so the result is never infeasible in that mode).
    """
    deadline = _deadline
    if budget_secs is not None:
        d = time.perf_counter() + budget_secs
        deadline = d if deadline is None else min(deadline, d)

    prob = _Problem(s, excluded)
    nb = prob.nb
    if nb == 0:
        return SolveResult(Assignment(()), 0.0, 0)
    if require_complete and any(prob.feas_mask[bi] == 0 for bi in range(nb)):
        return SolveResult(None, 0.0, 0)

    # Most constrained buyer first; candidates by descending value.
    order = sorted(range(nb), key=lambda bi: (bin(prob.feas_mask[bi]).count("1"), bi))
    candidates = [
        sorted(
            (si for si in range(prob.ns) if prob.feasible[bi][si]),
            key=lambda si: (-prob.uos[bi][si], si),
        )
        for bi in range(nb)
    ]
    suffix_bound = [0.0] * (nb + 1)
    for pos in range(nb - 1, -1, -1):
        suffix_bound[pos] = suffix_bound[pos + 1] + prob.best_uos[order[pos]]

    best_value = -math.inf
    best_pairs: tuple | None = None

    if require_complete:
        seed = _greedy_seed(prob, order)
        if seed is not None:
            pairs = prob.pair_list(seed)
            best_pairs = pairs
            best_value = sum(prob.uos[bi][si] for bi, si in enumerate(seed))

    assigned = [-1] * nb
    nodes = 0
    tick = 0

    def consider(total: float) -> None:
        nonlocal best_value, best_pairs
        pairs = prob.pair_list(assigned)
        if total > best_value + TOLERANCE:
            best_value, best_pairs = total, pairs
        elif total >= best_value - TOLERANCE and (
            best_pairs is None or pairs < best_pairs
        ):
            best_value, best_pairs = max(best_value, total), pairs

    def dfs(pos: int, used: int, total: float) -> None:
        nonlocal nodes, tick
        if deadline is not None:
            tick += 1
            if tick >= 2048:
                tick = 0
                if time.perf_counter() > deadline:
                    raise BudgetExceeded("optimal solve exceeded its budget")
        if pos == nb:
            consider(total)
            return
        if total + suffix_bound[pos] < best_value - TOLERANCE:
            return
        bi = order[pos]
        if require_complete:
            # Forward check: every unassigned buyer still needs a free seller.
            for later in range(pos, nb):
                if prob.feas_mask[order[later]] & ~used == 0:
                    return
        for si in candidates[bi]:
            if (used >> si) & 1:
                continue
            if not _edges_ok(prob, assigned, bi, si):
                continue
            nodes += 1
            assigned[bi] = si
            dfs(pos + 1, used | (1 << si), total + prob.uos[bi][si])
            assigned[bi] = -1
        if not require_complete:
            dfs(pos + 1, used, total)

    dfs(0, 0, 0.0)

    if best_pairs is None:
        return SolveResult(None, 0.0, nodes)
    assignment = Assignment(best_pairs)
    return SolveResult(assignment, objective(s, assignment), nodes)


def vcg_payment(
    s: Scenario,
    k_star: Assignment,
    f_star: float,
    sid: SellerId,
    _deadline: float | None = None,
) -> float:
    """Pivot payment for one winner: bid + F(K*) - F_without.

    F_without is the complete-assignment optimum with the seller removed, or
    0 when no complete assignment survives the removal.
    """
    if sid not in k_star.seller_to_buyer():
        raise ValueError(f"{sid.label()} is not a winner")
    without = solve_optimal(s, excluded=frozenset({sid}), _deadline=_deadline)
    f_wo = without.objective_value if without.assignment is not None else 0.0
    return f_star - f_wo + s.seller(sid).bid


def run_optimal_mechanism(s: Scenario, budget_secs: float | None = None) -> OptOutcome | None:
    """Winner determination plus a pivot payment per winner.

    Returns None when no complete feasible assignment exists. The budget, if
    given, covers the main solve and all payment re-solves together.
    """
    deadline = time.perf_counter() + budget_secs if budget_secs is not None else None
    res = solve_optimal(s, _deadline=deadline)
    if res.assignment is None:
        return None
    explored = res.explored
    payments: dict[SellerId, float] = {}
    for sid in res.assignment.seller_to_buyer():
        payments[sid] = vcg_payment(s, res.assignment, res.objective_value, sid, _deadline=deadline)
    return OptOutcome(res.assignment, res.objective_value, payments, explored)


def default_bid_grid(true_value: float) -> tuple[float, ...]:
    """21 evenly spaced bids across [0.5q, 1.5q], with q itself guaranteed."""
    pts = {float(x) for x in np.linspace(0.5 * true_value, 1.5 * true_value, 21)}
    pts.add(float(true_value))
    return tuple(sorted(pts))


def verify_truthfulness_opt(
    s: Scenario,
    sid: SellerId,
    bid_grid: tuple[float, ...] | None = None,
) -> dict:
    """Sweep one seller's reported bid and compare utilities against truth.

    Utility is payment - true_value when the seller wins, else 0. The removal
    term F_without never involves the swept seller's bid, so it is computed
    once. The report flags any bid whose utility beats the truthful one.
    """
    q = s.seller(sid).true_value
    grid = bid_grid if bid_grid is not None else default_bid_grid(q)
    if not any(b == q for b in grid):
        raise ValueError("bid grid must contain the true value")

    without = solve_optimal(s, excluded=frozenset({sid}))
    f_wo = without.objective_value if without.assignment is not None else 0.0

    rows = []
    truthful_utility = 0.0
    for bid in grid:
        res = solve_optimal(s.with_seller_bid(sid, bid))
        won = res.assignment is not None and sid in res.assignment.seller_to_buyer()
        if won:
            payment = res.objective_value - f_wo + bid
            utility = payment - q
        else:
            payment = None
            utility = 0.0
        rows.append({"bid": bid, "won": won, "payment": payment, "utility": utility})
        if bid == q:
            truthful_utility = utility

    violations = [r["bid"] for r in rows if r["utility"] > truthful_utility + TOLERANCE]
    return {
        "seller": sid,
        "true_value": q,
        "f_without": f_wo,
        "truthful_utility": truthful_utility,
        "rows": rows,
        "dominance_violations": violations,
        "dominant": not violations,
    }
