"""Constructive selection rule built from greedy cohesive-group extraction.

The partition step repeatedly extracts, from the voters not yet assigned,
the group that can justify the largest common utility target: target
values beta are scanned downward over the achievable utility values of
the remaining voters, slate sizes alpha upward, and groups in
lexicographic voter order; the first group that is (alpha, beta)-cohesive
is removed, and the scan restarts on the remainder.  Cohesiveness is
always judged against the full electorate (the population share in its
counter-proposal threshold keeps the original voter count n) — only
membership is restricted to the remaining voters.  Every nonempty voter
set is (0, 0)-cohesive via the empty slate, so the loop terminates with a
partition, and because later rounds choose among fewer groups under
unchanged verdicts, the extracted targets are non-increasing.

The assembly step then searches for per-group slates W_r with
``|W_r| <= alpha_r`` giving every group member utility at least beta_r,
such that the union of all slates is feasible.  It enumerates only
inclusion-minimal utility-satisfying slates (shrinking a slate keeps the
union feasible and other groups unaffected, so this loses no solutions)
and backtracks across groups with feasibility checked on every prefix
union, which is sound because feasible sets are closed downward.  The
final union is extended to an inclusion-maximal feasible set in candidate
order.  For partitions produced by the extraction step a solution always
exists; a completed search without one raises ``search-exhausted`` and
signals a defect, not an input condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .axioms import cohesive
from .constraints import DEFAULT_CAP, _popcount
from .errors import SearchExhaustedError
from .model import Election


@dataclass(frozen=True)
class CohesiveGroup:
    """One extracted group with the (alpha, beta) claim it was chosen for."""

    voters: tuple[str, ...]
    alpha: int
    beta: Fraction


@dataclass(frozen=True)
class CohesivePartition:
    """Ordered disjoint groups covering the electorate."""

    groups: tuple[CohesiveGroup, ...]
    stats: dict = field(compare=False, default_factory=dict)


@dataclass(frozen=True)
class GreedyOutcome:
    """Assembled outcome plus the per-group slates that realize the claims."""

    outcome: frozenset[str]
    slates: tuple[frozenset[str], ...]
    partition: CohesivePartition
    stats: dict = field(compare=False, default_factory=dict)


def _voter_type_key(e: Election, vi: int) -> object:
    """Hashable utility-structure key; equal keys mean interchangeable voters."""

    if e.mode == "approval":
        return e.ballot_masks[vi]
    if e.mode == "additive":
        return tuple(sorted(e._additive[vi].items()))
    return tuple(sorted(e._tables[vi]))


def _lex_min_cohesive(
    e: Election,
    eligible: list[int],
    alpha: int,
    beta: Fraction,
    method: str,
    cap: int,
    cache: dict,
    stats: dict,
) -> Optional[list[int]]:
    """First (alpha, beta)-cohesive subset of ``eligible`` in lex index order."""

    type_keys = {i: _voter_type_key(e, i) for i in eligible}
    chosen: list[int] = []

    def verdict() -> bool:
        key = (alpha, beta, tuple(sorted(type_keys[i] for i in chosen)))
        hit = cache.get(key)
        if hit is None:
            stats["oracle_calls"] += 1
            hit = cohesive(
                e,
                [e.voter_ids[i] for i in chosen],
                alpha,
                beta,
                mode="fixed",
                method=method,
                cap=cap,
            ).ok
            cache[key] = hit
        return hit

    def rec(start: int) -> Optional[list[int]]:
        for pos in range(start, len(eligible)):
            chosen.append(eligible[pos])
            if verdict():
                return list(chosen)
            deeper = rec(pos + 1)
            if deeper is not None:
                return deeper
            chosen.pop()
        return None

    return rec(0)


def greedy_cohesive_partition(
    e: Election, method: str = "auto", cap: int = DEFAULT_CAP
) -> CohesivePartition:
    """Partition voters by repeatedly extracting the strongest cohesive group.

    Each round maximizes beta over the achievable utility values of the
    remaining voters, breaks ties by the smallest slate size alpha, then by
    the lexicographically first voter set; a round with no positive-beta
    cohesive group extracts the first remaining voter as a (0, 0) group.
    """

    remaining = list(range(e.n))
    groups: list[CohesiveGroup] = []
    cache: dict = {}
    stats = {"rounds": 0, "oracle_calls": 0}
    while remaining:
        stats["rounds"] += 1
        betas = sorted(
            {v for i in remaining for v in e.achievable_utilities(i) if v > 0},
            reverse=True,
        )
        found: Optional[tuple[list[int], int, Fraction]] = None
        for beta in betas:
            eligible = [i for i in remaining if e.u_mask(i, e.system.full_mask) >= beta]
            if not eligible:
                continue
            for alpha in range(1, e.m + 1):
                got = _lex_min_cohesive(e, eligible, alpha, beta, method, cap, cache, stats)
                if got is not None:
                    found = (got, alpha, beta)
                    break
            if found is not None:
                break
        if found is None:
            first = remaining[0]
            groups.append(CohesiveGroup((e.voter_ids[first],), 0, Fraction(0)))
            remaining = remaining[1:]
        else:
            members, alpha, beta = found
            groups.append(
                CohesiveGroup(tuple(e.voter_ids[i] for i in members), alpha, Fraction(beta))
            )
            picked = set(members)
            remaining = [i for i in remaining if i not in picked]
    return CohesivePartition(tuple(groups), stats)


def _support_mask(e: Election, members: list[int]) -> int:
    """Candidates that can contribute utility to anyone in the group."""

    mask = 0
    if e.mode == "table":
        for i in members:
            for entry_mask, _val in e._tables[i]:
                mask |= entry_mask
        return mask
    for i in members:
        mask |= e.ballot_masks[i]
    return mask


def _minimal_slates(
    e: Election, members: list[int], alpha: int, beta: Fraction
) -> list[int]:
    """Inclusion-minimal X with |X| <= alpha and u_i(X) >= beta for members.

    Ordered by (size, mask); only candidates with potential utility to the
    group are considered, which loses nothing under monotone utilities.
    """

    support = _support_mask(e, members)
    bits = [j for j in range(e.m) if support >> j & 1]
    satisfying: list[int] = []

    def rec(pos: int, mask: int, size: int) -> None:
        if all(e.u_mask(i, mask) >= beta for i in members):
            satisfying.append(mask)
            return  # supersets are never minimal
        if size == alpha:
            return
        for nxt in range(pos, len(bits)):
            rec(nxt + 1, mask | (1 << bits[nxt]), size + 1)

    rec(0, 0, 0)
    # the early return above is not a complete minimality filter: a set can
    # be reached along an order where no proper prefix satisfies, yet a
    # non-prefix subset does
    satisfying.sort(key=lambda m: (_popcount(m), m))
    minimal: list[int] = []
    for m in satisfying:
        if not any(prev & m == prev for prev in minimal):
            minimal.append(m)
    return minimal


def construct_fjr_outcome(
    e: Election,
    method: str = "auto",
    cap: int = DEFAULT_CAP,
    partition: Optional[CohesivePartition] = None,
) -> GreedyOutcome:
    """Assemble a feasible outcome realizing every extracted group's claim.

    Backtracks over per-group slates in extraction order; the returned
    outcome is the slate union extended to an inclusion-maximal feasible
    set.  Raises ``search-exhausted`` if no assignment exists, which the
    extraction procedure's guarantees rule out for partitions it produced.
    """

    part = partition if partition is not None else greedy_cohesive_partition(e, method, cap)
    system = e.system
    per_round: list[list[int]] = []
    for g in part.groups:
        if g.beta <= 0:
            per_round.append([0])
            continue
        members = [e.voter_index[v] for v in g.voters]
        slates = _minimal_slates(e, members, g.alpha, g.beta)
        per_round.append(slates)
    stats = {"nodes": 0, "slates": [len(s) for s in per_round]}
    solution: list[int] = [0] * len(per_round)

    def rec(r: int, union: int) -> bool:
        if r == len(per_round):
            return True
        for x in per_round[r]:
            merged = union | x
            if merged != union and not system.contains_mask(merged):
                continue
            stats["nodes"] += 1
            solution[r] = x
            if rec(r + 1, merged):
                return True
        return False

    if not rec(0, 0):
        raise SearchExhaustedError(
            "no feasible assignment of group slates exists for this partition"
        )
    wmask = 0
    for x in solution:
        wmask |= x
    for j in range(e.m):
        if not wmask >> j & 1 and system.contains_mask(wmask | (1 << j)):
            wmask |= 1 << j
    return GreedyOutcome(
        frozenset(system.set_of(wmask)),
        tuple(frozenset(system.set_of(x)) for x in solution),
        part,
        stats,
    )
