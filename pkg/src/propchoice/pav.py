"""Proportional approval voting over general feasibility systems.

The score of an outcome W is ``sum_i H(|W ∩ A_i|)`` with ``H`` the harmonic
prefix sum (``H(t) = 1 + 1/2 + ... + 1/t``), computed exactly as fractions.
`solve_pav_exact` maximizes the score over all feasible sets by
branch-and-bound; `pav_swap_search` runs the single-swap local search whose
fixed points matter on matroidal systems.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .constraints import DEFAULT_CAP, _bits, _popcount
from .errors import EnumerationCapExceeded, ValidationError
from .model import Election


def _harmonic(up_to: int) -> list[Fraction]:
    h = [Fraction(0)]
    for t in range(1, up_to + 1):
        h.append(h[-1] + Fraction(1, t))
    return h


def pav_score(e: Election, outcome: Iterable[str]) -> Fraction:
    """Exact harmonic score of an outcome (which need not be feasible)."""

    e.require_mode("approval", context="pav")
    wmask = e.system.mask_of(outcome)
    h = _harmonic(e.m)
    return sum(
        (h[_popcount(e.ballot_masks[i] & wmask)] for i in range(e.n)), Fraction(0)
    )


@dataclass(frozen=True)
class PavResult:
    """Exact maximization result.

    ``winners`` lists every inclusion-maximal feasible set attaining the
    optimal score, in depth-first lexicographic enumeration order.
    """

    score: Fraction
    winners: tuple[frozenset[str], ...]
    stats: dict = field(compare=False, default_factory=dict)


def solve_pav_exact(e: Election, cap: int = DEFAULT_CAP) -> PavResult:
    """Maximize the harmonic score over feasible sets, reporting all ties.

    Depth-first search over feasible sets in lexicographic candidate order.
    The optimistic bound adds, for every candidate still addable, one more
    harmonic step per approver at their current utility
    (``sum_{i in N(c)} 1/(u_i(W)+1)`` — an upper bound on the candidate's
    marginal by concavity of H); branches are pruned only when the bound is
    strictly below the best score found, so ties survive.  The score is
    monotone under inclusion, hence the optimum is attained on maximal sets
    and only those are reported.
    """

    e.require_mode("approval", context="pav")
    system = e.system
    contains = system.contains_mask
    m, n = e.m, e.n
    supporters = [list(_bits(e.supporter_masks[j])) for j in range(m)]
    util = [0] * n
    best: list[Optional[Fraction]] = [None]
    winners: list[int] = []
    stats = {"nodes": 0}

    def marginal(j: int) -> Fraction:
        return sum((Fraction(1, util[i] + 1) for i in supporters[j]), Fraction(0))

    def rec(mask: int, start: int, score: Fraction) -> None:
        stats["nodes"] += 1
        if stats["nodes"] > cap:
            raise EnumerationCapExceeded(cap, "feasible sets")
        if all(mask >> j & 1 or not contains(mask | (1 << j)) for j in range(m)):
            if best[0] is None or score > best[0]:
                best[0] = score
                winners.clear()
                winners.append(mask)
            elif score == best[0]:
                winners.append(mask)
        if best[0] is not None:
            bound = score + sum((marginal(j) for j in range(start, m)), Fraction(0))
            if bound < best[0]:
                return
        for j in range(start, m):
            nxt = mask | (1 << j)
            if contains(nxt):
                gain = marginal(j)
                for i in supporters[j]:
                    util[i] += 1
                rec(nxt, j + 1, score + gain)
                for i in supporters[j]:
                    util[i] -= 1

    rec(0, 0, Fraction(0))
    return PavResult(
        best[0] if best[0] is not None else Fraction(0),
        tuple(system.set_of(w) for w in winners),
        stats,
    )


@dataclass(frozen=True)
class SwapSearchResult:
    """Local search outcome: final set, its score, and the swaps applied."""

    outcome: frozenset[str]
    score: Fraction
    steps: tuple[tuple[str, str, Fraction], ...]


def pav_swap_search(
    e: Election, start: Iterable[str], cap: int = DEFAULT_CAP
) -> SwapSearchResult:
    """Single-swap local search from a feasible, maximal starting set.

    Repeatedly applies the first swap ``(W \\ {c}) ∪ {c'}`` — scanning
    removed candidates, then incoming ones, in id order — that keeps
    feasibility and strictly increases the score.  Terminates because the
    score strictly increases within a finite family of sets.
    """

    e.require_mode("approval", context="pav")
    system = e.system
    contains = system.contains_mask
    m = e.m
    wmask = system.mask_of(start)
    if not contains(wmask):
        raise ValidationError("infeasible-outcome", "start set is not feasible")
    if any(not wmask >> j & 1 and contains(wmask | (1 << j)) for j in range(m)):
        raise ValidationError("not-maximal", "start set must be maximal")
    h = _harmonic(m)

    def score_of(mask: int) -> Fraction:
        return sum(
            (h[_popcount(e.ballot_masks[i] & mask)] for i in range(e.n)), Fraction(0)
        )

    score = score_of(wmask)
    steps: list[tuple[str, str, Fraction]] = []
    improved = True
    rounds = 0
    while improved:
        rounds += 1
        if rounds > cap:
            raise EnumerationCapExceeded(cap, "swap rounds")
        improved = False
        for j in range(m):
            if not wmask >> j & 1:
                continue
            for j2 in range(m):
                if wmask >> j2 & 1:
                    continue
                cand = (wmask & ~(1 << j)) | (1 << j2)
                if not contains(cand):
                    continue
                cand_score = score_of(cand)
                if cand_score > score:
                    steps.append((system.ids[j], system.ids[j2], cand_score))
                    wmask, score = cand, cand_score
                    improved = True
                    break
            if improved:
                break
    return SwapSearchResult(system.set_of(wmask), score, tuple(steps))
