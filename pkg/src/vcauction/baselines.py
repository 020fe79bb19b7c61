"""Reference allocation policies the matching mechanism is measured against.

Buyers are visited in a seeded random order; each takes one admissible seller
according to the policy. A buyer with no admissible seller dead-ends the
attempt and triggers a full restart with a fresh order.
"""
from __future__ import annotations

import numpy as np

from .model import Assignment, BuyerId, Scenario, SellerId
from .economics import extension_feasible

__all__ = ["BASELINE_KINDS", "run_baseline"]

# ETPM: lowest capability first. LPM: lowest bid first. RMM: uniform random.
BASELINE_KINDS = ("etpm", "lpm", "rmm")


def run_baseline(
    s: Scenario,
    kind: str,
    seed: int = 0,
    max_restarts: int = 20,
) -> Assignment | None:
    """Run one baseline policy; None when every attempt dead-ends."""
    kind = kind.lower()
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline {kind!r}, expected one of {BASELINE_KINDS}")
    rng = np.random.default_rng(seed)
    buyers = list(s.buyers)
    if not buyers:
        return Assignment(())

    for _attempt in range(max_restarts + 1):
        order = [buyers[i] for i in rng.permutation(len(buyers))]
        assigned: dict[BuyerId, SellerId] = {}
        dead = False
        for buyer in order:
            candidates = [
                sel
                for sel in s.sellers
                if extension_feasible(s, assigned, buyer, sel.id)
            ]
            if not candidates:
                dead = True
                break
            candidates.sort(key=lambda sel: sel.id)
            if kind == "etpm":
                pick = min(candidates, key=lambda sel: (sel.capability, sel.id))
            elif kind == "lpm":
                pick = min(candidates, key=lambda sel: (sel.bid, sel.id))
            else:
                pick = candidates[int(rng.integers(len(candidates)))]
            assigned[buyer] = pick.id
        if not dead:
            return Assignment.from_pairs(list(assigned.items()))
    return None
