"""Valuations, utility-of-service, and the C1-C4 feasibility rules.

UoS (utility of service) is a buyer's net benefit from one matched seller:
alpha * (tolerable_time - capability) - bid. A pair is admissible (C1) only
when the seller's provider covers the job, the capability fits the deadline,
and the UoS is strictly positive. Structure preservation (C2) requires the
inter-provider contact to survive each job edge's transmission time with
probability at least epsilon. C3 demands every buyer matched, C4 lets each
seller serve at most one buyer.
"""
from __future__ import annotations

from typing import Mapping

from .model import (
    TOLERANCE,
    Assignment,
    BuyerId,
    Scenario,
    SellerId,
    ValuationConfig,
    contact_probability,
)

__all__ = [
    "ValuationConfig",
    "true_valuation",
    "gross_utility",
    "uos",
    "pair_feasible",
    "edge_feasible",
    "extension_feasible",
    "assignment_feasible",
    "objective",
]


def true_valuation(capability: float, cfg: ValuationConfig) -> float:
    """Linear seller valuation; rejects parameterizations that price at or below zero."""
    q = cfg.price_for(capability)
    if q <= 0:
        raise ValueError(
            f"non-positive valuation {q} for capability {capability} "
            f"(beta1={cfg.beta1}, beta2={cfg.beta2})"
        )
    return q


def gross_utility(tolerable_time: float, capability: float) -> float:
    return tolerable_time - capability


def uos(alpha: float, gross: float, bid: float) -> float:
    return alpha * gross - bid


def pair_feasible(s: Scenario, buyer: BuyerId, sid: SellerId) -> bool:
    """C1 for one pair: coverage, deadline, and strictly positive UoS."""
    sel = s.seller(sid)
    if sid.sp_index not in s.coverage[buyer.job_index]:
        return False
    t = s.tolerable_time(buyer)
    if t + TOLERANCE < sel.capability:
        return False
    value = uos(s.alpha(buyer), gross_utility(t, sel.capability), sel.bid)
    return value > TOLERANCE


def edge_feasible(s: Scenario, m1: int, m2: int, weight: float) -> bool:
    """C2 for one job edge whose endpoints run on providers m1 and m2."""
    if m1 == m2:
        return True
    return contact_probability(s.rate(m1, m2), weight) >= s.epsilon - TOLERANCE


def extension_feasible(
    s: Scenario,
    assigned: Mapping[BuyerId, SellerId],
    buyer: BuyerId,
    sid: SellerId,
) -> bool:
    """Would adding (buyer, sid) keep a partial assignment feasible?

    Checks C1 for the new pair, C4 against sellers already in use, and C2
    against every already-assigned neighbor of the buyer.
    """
    if buyer in assigned:
        return False
    if sid in set(assigned.values()):
        return False
    if not pair_feasible(s, buyer, sid):
        return False
    job = s.job_of(buyer)
    for e in job.edges:
        if e.x1 == buyer.component_index:
            other = BuyerId(buyer.job_index, e.x2)
        elif e.x2 == buyer.component_index:
            other = BuyerId(buyer.job_index, e.x1)
        else:
            continue
        partner = assigned.get(other)
        if partner is not None and not edge_feasible(
            s, sid.sp_index, partner.sp_index, e.weight
        ):
            return False
    return True


def assignment_feasible(s: Scenario, a: Assignment, require_complete: bool = False) -> bool:
    """Check C1, C2 and C4 for a whole assignment; C3 when require_complete."""
    if not a.is_one_to_one():
        return False
    mapping = a.buyer_to_seller()
    for buyer, sid in mapping.items():
        s.job_of(buyer)
        s.seller(sid)
        if not pair_feasible(s, buyer, sid):
            return False
    for b1, b2, weight in s.job_edges():
        s1 = mapping.get(b1)
        s2 = mapping.get(b2)
        if s1 is None or s2 is None:
            continue
        if not edge_feasible(s, s1.sp_index, s2.sp_index, weight):
            return False
    if require_complete and len(mapping) != len(s.buyers):
        return False
    return True


def objective(s: Scenario, a: Assignment) -> float:
    """Total UoS over the matched pairs (the quantity every mechanism maximizes)."""
    total = 0.0
    for buyer, sid in sorted(a.pairs):
        sel = s.seller(sid)
        t = s.tolerable_time(buyer)
        total += uos(s.alpha(buyer), gross_utility(t, sel.capability), sel.bid)
    return total
