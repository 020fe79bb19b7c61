"""Greedy broker matching that maximizes per-step UoS gain.

Each buyer ranks its C1-feasible sellers by UoS value, with a virtual
critical entry appended last (value: minimum real value minus delta). The
broker merges every real entry into one list, scans it top-down, and accepts
each pair that keeps the partial assignment feasible. Dead ends backtrack:
with several pairs matched the most recent acceptance is dropped and the scan
resumes just past it; with a single pair matched the anchor advances one list
position and the scan restarts there. A winner pays its buyer's value for it
minus the value of the entry immediately behind it in that buyer's list, so
payment always covers the bid.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import TOLERANCE, Assignment, BuyerId, Scenario, SellerId
from .economics import (
    edge_feasible,
    gross_utility,
    objective,
    pair_feasible,
    uos,
)

__all__ = [
    "DEFAULT_DELTA",
    "PrefEntry",
    "BuyerPrefList",
    "BrokerPrefList",
    "MatchingOutcome",
    "build_buyer_list",
    "build_broker_list",
    "match",
    "matching_payment",
    "run_matching",
    "verify_truthfulness_matching",
]

DEFAULT_DELTA = 1e-3


@dataclass(frozen=True)
class PrefEntry:
    """One list entry; seller None marks the virtual critical entry."""

    buyer: BuyerId
    seller: SellerId | None
    value: float

    @property
    def is_virtual(self) -> bool:
        return self.seller is None


@dataclass(frozen=True)
class BuyerPrefList:
    buyer: BuyerId
    entries: tuple[PrefEntry, ...]

    def real_entries(self) -> tuple[PrefEntry, ...]:
        return self.entries[:-1]


@dataclass(frozen=True)
class BrokerPrefList:
    entries: tuple[PrefEntry, ...]


@dataclass(frozen=True)
class MatchingOutcome:
    """assignment is None when the scan exhausted its anchors."""

    assignment: Assignment | None
    objective_value: float
    payments: dict[SellerId, float]
    match_trace: tuple[tuple, ...]

    @property
    def success(self) -> bool:
        return self.assignment is not None


def build_buyer_list(
    s: Scenario,
    buyer: BuyerId,
    delta: float = DEFAULT_DELTA,
    top_k: int | None = None,
) -> BuyerPrefList:
    """Rank feasible sellers by value, best first, virtual entry last.

    top_k truncates to the best k real entries before the virtual entry is
    appended. An empty real list yields a single virtual entry of value
    -delta.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    t = s.tolerable_time(buyer)
    alpha = s.alpha(buyer)
    real = []
    for sel in s.sellers:
        if not pair_feasible(s, buyer, sel.id):
            continue
        value = uos(alpha, gross_utility(t, sel.capability), sel.bid)
        real.append(PrefEntry(buyer, sel.id, value))
    real.sort(key=lambda e: (-e.value, e.seller))
    if top_k is not None:
        real = real[: max(0, top_k)]
    floor = real[-1].value if real else 0.0
    entries = tuple(real) + (PrefEntry(buyer, None, floor - delta),)
    return BuyerPrefList(buyer, entries)


def build_broker_list(lists: list[BuyerPrefList]) -> BrokerPrefList:
    """Merge all real entries, best value first; ties by buyer then seller."""
    merged = [e for lst in lists for e in lst.real_entries()]
    merged.sort(key=lambda e: (-e.value, e.buyer, e.seller))
    return BrokerPrefList(tuple(merged))


def _acceptable(
    s: Scenario,
    entry: PrefEntry,
    matched_buyers: dict[BuyerId, SellerId],
    matched_sellers: set[SellerId],
) -> str | None:
    """None when the entry can join the partial match, else a reject reason."""
    if entry.buyer in matched_buyers or entry.seller in matched_sellers:
        return "taken"
    if not pair_feasible(s, entry.buyer, entry.seller):
        return "c1"
    job = s.job_of(entry.buyer)
    for e in job.edges:
        if e.x1 == entry.buyer.component_index:
            other = BuyerId(entry.buyer.job_index, e.x2)
        elif e.x2 == entry.buyer.component_index:
            other = BuyerId(entry.buyer.job_index, e.x1)
        else:
            continue
        partner = matched_buyers.get(other)
        if partner is not None and not edge_feasible(
            s, entry.seller.sp_index, partner.sp_index, e.weight
        ):
            return "c2"
    return None


def match(
    s: Scenario, broker: BrokerPrefList
) -> tuple[Assignment | None, tuple[tuple, ...]]:
    """Scan the broker list until every buyer is matched or anchors run out.

    Returns the assignment (None on failure) and a trace of scan events:
    ("accept"|"skip"|"reject"|"delete"|"restart", index) plus a final
    ("complete",) or ("fail",). Accepted pairs always sit at increasing list
    positions, so the most recently accepted pair is the deepest one.
    """
    entries = broker.entries
    total_buyers = len(s.buyers)
    trace: list[tuple] = []
    if total_buyers == 0:
        trace.append(("complete",))
        return Assignment(()), tuple(trace)
    if not entries:
        trace.append(("fail",))
        return None, tuple(trace)

    L = len(entries)
    stack: list[int] = [0]
    matched_buyers: dict[BuyerId, SellerId] = {entries[0].buyer: entries[0].seller}
    matched_sellers: set[SellerId] = {entries[0].seller}
    trace.append(("accept", 0))
    pos = 1

    def complete() -> bool:
        return len(stack) == total_buyers

    if complete():
        trace.append(("complete",))
        return _to_assignment(matched_buyers), tuple(trace)

    while True:
        idx = pos
        while idx < L and not complete():
            entry = entries[idx]
            why = _acceptable(s, entry, matched_buyers, matched_sellers)
            if why is None:
                stack.append(idx)
                matched_buyers[entry.buyer] = entry.seller
                matched_sellers.add(entry.seller)
                trace.append(("accept", idx))
            else:
                trace.append(("skip" if why == "taken" else "reject", idx))
            idx += 1
        if complete():
            trace.append(("complete",))
            return _to_assignment(matched_buyers), tuple(trace)
        if len(stack) > 1:
            dropped = stack.pop()
            e = entries[dropped]
            del matched_buyers[e.buyer]
            matched_sellers.discard(e.seller)
            trace.append(("delete", dropped))
            pos = dropped + 1
        else:
            anchor = stack[0] + 1
            if anchor >= L:
                trace.append(("fail",))
                return None, tuple(trace)
            old = entries[stack[0]]
            del matched_buyers[old.buyer]
            matched_sellers.discard(old.seller)
            stack[0] = anchor
            e = entries[anchor]
            matched_buyers[e.buyer] = e.seller
            matched_sellers.add(e.seller)
            trace.append(("restart", anchor))
            pos = anchor + 1
            if complete():
                trace.append(("complete",))
                return _to_assignment(matched_buyers), tuple(trace)


def _to_assignment(matched: dict[BuyerId, SellerId]) -> Assignment:
    return Assignment.from_pairs(list(matched.items()))


def matching_payment(
    s: Scenario,
    lists: dict[BuyerId, BuyerPrefList],
    assignment: Assignment,
    winner: SellerId,
) -> float:
    """Winner's buyer-side value minus the next entry's value in that list.

    The next entry may be the virtual critical one, whose value is used
    directly; since lists are sorted, payment never drops below the bid.
    """
    buyer = assignment.seller_to_buyer().get(winner)
    if buyer is None:
        raise ValueError(f"{winner.label()} is not a winner")
    lst = lists[buyer]
    position = None
    for i, e in enumerate(lst.entries):
        if e.seller == winner:
            position = i
            break
    if position is None:
        raise ValueError(f"{winner.label()} not in {buyer.label()}'s list")
    nxt = lst.entries[position + 1]
    sel = s.seller(winner)
    own = s.alpha(buyer) * gross_utility(s.tolerable_time(buyer), sel.capability)
    return own - nxt.value


def run_matching(
    s: Scenario,
    delta: float = DEFAULT_DELTA,
    top_k: int | None = None,
) -> MatchingOutcome:
    """Full pipeline: build lists, match, price winners."""
    lists = {b: build_buyer_list(s, b, delta=delta, top_k=top_k) for b in s.buyers}
    broker = build_broker_list([lists[b] for b in s.buyers])
    assignment, trace = match(s, broker)
    if assignment is None:
        return MatchingOutcome(None, 0.0, {}, trace)
    payments = {
        sid: matching_payment(s, lists, assignment, sid)
        for sid in assignment.seller_to_buyer()
    }
    return MatchingOutcome(assignment, objective(s, assignment), payments, trace)


def _classify(utility: float, truthful_utility: float, won: bool) -> str:
    if utility > truthful_utility + TOLERANCE:
        return "gain"
    if abs(utility - truthful_utility) <= TOLERANCE:
        return "equal"
    if not won:
        return "risk-zero"
    if utility < -TOLERANCE:
        return "risk-loss"
    return "no-gain"


def verify_truthfulness_matching(
    s: Scenario,
    sid: SellerId,
    bid_grid: tuple[float, ...] | None = None,
    delta: float = DEFAULT_DELTA,
    top_k: int | None = None,
) -> dict:
    """Sweep one seller's bid through the full matching pipeline.

    Each row records the misreport outcome and whether the perturbation left
    the broker list's pair order unchanged (the regime where no misreport
    should ever beat truth-telling).
    """
    from .optimal import default_bid_grid

    q = s.seller(sid).true_value
    grid = bid_grid if bid_grid is not None else default_bid_grid(q)
    if not any(b == q for b in grid):
        raise ValueError("bid grid must contain the true value")

    def broker_shape(sc: Scenario) -> tuple:
        lists = {b: build_buyer_list(sc, b, delta=delta, top_k=top_k) for b in sc.buyers}
        broker = build_broker_list([lists[b] for b in sc.buyers])
        return tuple((e.buyer, e.seller) for e in broker.entries)

    truthful_shape = broker_shape(s)
    truthful = run_matching(s, delta=delta, top_k=top_k)
    if truthful.success and sid in truthful.payments:
        truthful_utility = truthful.payments[sid] - q
    else:
        truthful_utility = 0.0

    rows = []
    for bid in grid:
        s2 = s.with_seller_bid(sid, bid)
        outcome = run_matching(s2, delta=delta, top_k=top_k)
        won = outcome.success and sid in outcome.payments
        payment = outcome.payments[sid] if won else None
        utility = (payment - q) if won else 0.0
        rows.append(
            {
                "bid": bid,
                "won": won,
                "payment": payment,
                "utility": utility,
                "order_preserved": broker_shape(s2) == truthful_shape,
                "classification": _classify(utility, truthful_utility, won),
            }
        )

    gains = [r for r in rows if r["classification"] == "gain"]
    return {
        "seller": sid,
        "true_value": q,
        "truthful_utility": truthful_utility,
        "rows": rows,
        "order_preserving_gains": [r["bid"] for r in gains if r["order_preserved"]],
        "gains": [r["bid"] for r in gains],
    }
