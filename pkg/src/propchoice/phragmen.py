"""Sequential budget-accrual selection (unit and weighted prices).

Voters earn budget continuously at rate 1.  A candidate c with supporter
set N(c) becomes purchasable at the moment its supporters' combined unspent
budget reaches its price; the simulation is event-driven and exact: with
``l_i`` the last time voter i's budget was reset, the purchase time of c is
``(price(c) + sum_{i in N(c)} l_i) / |N(c)|``, a quantity that only changes
when a supporter resets.  The earliest purchasable candidate is bought
(ties lexicographic by id, resolved sequentially with recomputation), its
supporters' budgets reset to zero, and candidates that no longer fit beside
the purchases are removed.  Candidates approved by nobody are never bought.

Voters with identical ballots always reset together, so their budgets stay
equal forever; the simulation therefore tracks one reset time per ballot
type and expands per-voter payments only when recording an event.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .constraints import _bits
from .model import Election

REMOVAL_REASON = "infeasible-with-purchases"


@dataclass(frozen=True)
class PurchaseEvent:
    """One purchase: who was bought when, and who paid what.

    ``payments`` lists every supporter of the candidate (zero entries
    included for supporters reset at this very timestamp); they sum to the
    candidate's price.  ``reset`` is the set of voters whose budgets were
    cleared, which is exactly the supporter set.
    """

    time: Fraction
    candidate: str
    payments: dict[str, Fraction]
    reset: frozenset[str]


@dataclass(frozen=True)
class PhragmenTrace:
    """Full run record: purchases, removals, and the terminal partition.

    Every universe candidate ends purchased, removed (with the time and
    reason), or unsupported.  ``final_time`` is the last event time (0 for
    an empty run).
    """

    events: tuple[PurchaseEvent, ...]
    removals: tuple[tuple[Fraction, str, str], ...]
    outcome: frozenset[str]
    unsupported: frozenset[str]
    final_time: Fraction
    weighted: bool
    stats: dict = field(compare=False, default_factory=dict)


def _run(e: Election, weighted: bool) -> PhragmenTrace:
    system = e.system
    contains = system.contains_mask
    m = e.m
    prices = [
        system.weight(system.ids[j]) if weighted else Fraction(1) for j in range(m)
    ]

    # ballot types: (mask, member voter indices); one reset clock per type
    type_of_mask: dict[int, int] = {}
    type_members: list[list[int]] = []
    for i in range(e.n):
        b = e.ballot_masks[i]
        t = type_of_mask.get(b)
        if t is None:
            type_of_mask[b] = t = len(type_members)
            type_members.append([])
        type_members[t].append(i)
    type_masks = list(type_of_mask)
    type_counts = [len(ms) for ms in type_members]
    last_reset = [Fraction(0)] * len(type_masks)
    approving = [
        [t for t, bm in enumerate(type_masks) if bm >> j & 1] for j in range(m)
    ]
    n_of = [sum(type_counts[t] for t in approving[j]) for j in range(m)]

    purchased = 0
    available = [True] * m
    events: list[PurchaseEvent] = []
    removals: list[tuple[Fraction, str, str]] = []

    def sweep(now: Fraction) -> None:
        for j in range(m):
            if available[j] and not contains(purchased | (1 << j)):
                available[j] = False
                removals.append((now, system.ids[j], REMOVAL_REASON))

    sweep(Fraction(0))
    final_time = Fraction(0)
    while True:
        best_j: Optional[int] = None
        best_t = Fraction(0)
        for j in range(m):
            if not available[j] or n_of[j] == 0:
                continue
            paid = sum(
                (type_counts[t] * last_reset[t] for t in approving[j]), Fraction(0)
            )
            t_j = (prices[j] + paid) / n_of[j]
            if best_j is None or t_j < best_t:
                best_j, best_t = j, t_j
        if best_j is None:
            break
        payments: dict[str, Fraction] = {}
        reset: list[str] = []
        for t in approving[best_j]:
            pay = best_t - last_reset[t]
            for i in type_members[t]:
                payments[e.voter_ids[i]] = pay
                reset.append(e.voter_ids[i])
            last_reset[t] = best_t
        purchased |= 1 << best_j
        available[best_j] = False
        events.append(
            PurchaseEvent(best_t, system.ids[best_j], payments, frozenset(reset))
        )
        final_time = best_t
        sweep(best_t)

    unsupported = frozenset(
        system.ids[j] for j in range(m) if available[j]
    )
    return PhragmenTrace(
        events=tuple(events),
        removals=tuple(removals),
        outcome=system.set_of(purchased),
        unsupported=unsupported,
        final_time=final_time,
        weighted=weighted,
        stats={"events": len(events), "removals": len(removals)},
    )


def run_phragmen(e: Election) -> PhragmenTrace:
    """Unit-price sequential selection (every candidate costs 1)."""

    e.require_mode("approval", context="phragmen")
    return _run(e, weighted=False)


def run_phragmen_weighted(e: Election) -> PhragmenTrace:
    """Weighted sequential selection: price(c) = weight(c)."""

    e.require_mode("approval", context="phragmen")
    return _run(e, weighted=True)


@dataclass(frozen=True)
class TraceAuditResult:
    """Bookkeeping verdict; ``code`` names the first violated identity."""

    ok: bool
    code: Optional[str] = None
    detail: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def trace_audit(trace: PhragmenTrace, e: Election) -> TraceAuditResult:
    """Re-verify a trace's bookkeeping identities against the election.

    Checks, in order (the first failure is reported):

    - ``times-order``: event times nonnegative and nondecreasing;
    - ``payment-sum``: each event's payments sum to the candidate's price;
    - ``payer-not-supporter``: only supporters of the candidate pay;
    - ``reset-bookkeeping``: each payment equals the time elapsed since the
      payer's previous reset, and the reset set is the full supporter set;
    - ``overspend``: no negative payment, and no voter's total spend
      exceeds the elapsed time;
    - ``prefix-feasibility``: every prefix of the purchase sequence is
      feasible;
    - ``removal-unjustified``: every removal is infeasible together with
      the purchases made up to (and including) its timestamp;
    - ``partition``: purchased, removed, and unsupported candidates
      partition the universe, unsupported ones truly have no supporters,
      and no supported candidate was silently dropped;
    - ``outcome-mismatch``: the recorded outcome is the purchase set.
    """

    system = e.system
    m = e.m
    prices = [
        system.weight(system.ids[j]) if trace.weighted else Fraction(1)
        for j in range(m)
    ]

    def fail(code: str, detail: str) -> TraceAuditResult:
        return TraceAuditResult(False, code, detail)

    prev = Fraction(0)
    for ev in trace.events:
        if ev.time < 0 or ev.time < prev:
            return fail("times-order", f"event at {ev.time} before {prev}")
        prev = ev.time
    for ev in trace.events:
        j = system.index.get(ev.candidate)
        if j is None:
            return fail("payment-sum", f"unknown candidate {ev.candidate!r}")
        if sum(ev.payments.values(), Fraction(0)) != prices[j]:
            return fail("payment-sum", f"payments for {ev.candidate!r} miss the price")
        supporters = {e.voter_ids[i] for i in _bits(e.supporter_masks[j])}
        if set(ev.payments) - supporters:
            return fail(
                "payer-not-supporter", f"non-supporter paid for {ev.candidate!r}"
            )
    last_reset = {vid: Fraction(0) for vid in e.voter_ids}
    for ev in trace.events:
        j = system.index[ev.candidate]
        supporters = {e.voter_ids[i] for i in _bits(e.supporter_masks[j])}
        if set(ev.payments) != supporters or set(ev.reset) != supporters:
            return fail(
                "reset-bookkeeping", f"reset set for {ev.candidate!r} is not N(c)"
            )
        for vid, pay in ev.payments.items():
            if pay != ev.time - last_reset[vid]:
                return fail(
                    "reset-bookkeeping",
                    f"payment of {vid!r} at {ev.time} is not the accrued budget",
                )
        for vid in ev.reset:
            last_reset[vid] = ev.time
    spend = {vid: Fraction(0) for vid in e.voter_ids}
    for ev in trace.events:
        for vid, pay in ev.payments.items():
            if pay < 0:
                return fail("overspend", f"negative payment by {vid!r}")
            spend[vid] += pay
    for vid, total in spend.items():
        if total > trace.final_time:
            return fail("overspend", f"{vid!r} spent more than the elapsed time")
    mask = 0
    for ev in trace.events:
        mask |= 1 << system.index[ev.candidate]
        if not system.contains_mask(mask):
            return fail(
                "prefix-feasibility", f"prefix through {ev.candidate!r} infeasible"
            )
    for t, cid, _reason in trace.removals:
        j = system.index.get(cid)
        if j is None:
            return fail("removal-unjustified", f"unknown candidate {cid!r}")
        upto = 0
        for ev in trace.events:
            if ev.time <= t:
                upto |= 1 << system.index[ev.candidate]
        if system.contains_mask(upto | (1 << j)):
            return fail("removal-unjustified", f"{cid!r} still fit when removed")
    bought = {ev.candidate for ev in trace.events}
    removed = {cid for _, cid, _ in trace.removals}
    unsupported = set(trace.unsupported)
    if (
        bought & removed
        or bought & unsupported
        or removed & unsupported
        or bought | removed | unsupported != set(system.ids)
    ):
        return fail("partition", "purchased/removed/unsupported do not partition")
    for cid in unsupported:
        if e.supporter_masks[system.index[cid]]:
            return fail("partition", f"{cid!r} has supporters but was never processed")
    if trace.outcome != frozenset(bought):
        return fail("outcome-mismatch", "outcome differs from the purchase set")
    return TraceAuditResult(True)
