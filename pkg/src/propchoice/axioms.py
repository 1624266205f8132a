"""Brute-force auditors for proportionality guarantees over feasibility systems.

Every auditor in this module is an exact decision procedure: arithmetic is
integer/`Fraction` only, all searches are exhaustive over documented finite
domains, and every verdict comes with a re-checkable witness.

Claim semantics
---------------
A group ``S`` of voters *deserves* ``ell`` candidates when, against every
feasible counter-proposal ``T``, either ``S`` could extend ``T`` with ``ell``
commonly-approved candidates (``X`` drawn from the intersection of the
group's ballots, ``T ∪ X`` feasible), or ``T`` together with those ``ell``
seats would exceed the group's proportional share, i.e.
``|S| * (|T| + ell) > n * ell``.  Counter-proposals larger than
``floor(ell * (n - |S|) / |S|)`` satisfy the share inequality automatically,
so only the finitely many smaller ones are examined.

The weighted variant replaces cardinality by candidate weight: the extension
must satisfy ``weight(X) <= alpha`` and ``|X| >= beta``, and the share
inequality becomes ``|S| * (weight(T) + alpha) > n * alpha``.

A group is *(alpha, beta)-cohesive* (fixed mode) when for every feasible
counter-proposal ``T`` within the proportional bound there is a set ``X`` of
exactly ``alpha`` candidates giving every member utility at least ``beta``
with ``T ∪ X`` feasible.  Adaptive mode lets ``X`` choose its own size and
weighs the share inequality with ``|X|`` in place of ``alpha``: ``T`` is
answered if ``T ∪ X`` is feasible or ``|S| * (|T| + |X|) > n * |X|``.

Witness conventions
-------------------
Refutations report the first defeating counter-proposal found by a
deterministic scan: the empty set when the claim fails even against it,
otherwise the first counter-proposal in the documented scan order of the
chosen method (element scans go size-descending then lexicographic; count
scans go depth-first with per-class counts descending).  Audit reports carry
the first violating group in the documented enumeration order, together
with the parameters needed to re-run the underlying claim check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .constraints import (
    DEFAULT_CAP,
    BudgetSystem,
    FeasibilitySystem,
    _bits,
    _enumerate_masks,
    _popcount,
    enumerate_feasible_counts,
    refine_atoms,
    representative_mask,
)
from .errors import EnumerationCapExceeded, ValidationError
from .model import Election


# ---------------------------------------------------------------------------
# result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeservesResult:
    """Outcome of a deservedness check.

    ``ok`` is the verdict; on refutation ``refuter`` holds the defeating
    counter-proposal.  ``stats`` counts the counter-proposals examined.
    """

    ok: bool
    refuter: Optional[frozenset[str]]
    method: str
    stats: dict = field(compare=False, default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class CohesiveResult:
    """Outcome of a cohesiveness check (same witness conventions)."""

    ok: bool
    refuter: Optional[frozenset[str]]
    method: str
    stats: dict = field(compare=False, default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class AuditReport:
    """Verdict of a whole-outcome audit.

    ``witness`` is present exactly when ``satisfied`` is False and contains
    JSON-representable data sufficient to re-run the violated claim.
    """

    axiom: str
    satisfied: bool
    witness: Optional[dict]
    stats: dict = field(compare=False, default_factory=dict)
    mode: Optional[str] = None

    def __bool__(self) -> bool:
        return self.satisfied


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _group_indices(e: Election, group: Iterable[str]) -> list[int]:
    idx: list[int] = []
    seen: set[int] = set()
    for vid in group:
        i = e.voter_index.get(vid)
        if i is None:
            raise ValidationError("unknown-voter", f"unknown voter id {vid!r}")
        if i not in seen:
            seen.add(i)
            idx.append(i)
    if not idx:
        raise ValidationError("empty-group", "voter group must be nonempty")
    return sorted(idx)


def _pool_mask(e: Election, indices: Sequence[int]) -> int:
    pool = e.system.full_mask
    for i in indices:
        pool &= e.ballot_masks[i]
    return pool


def _masks_by_size_desc(system: FeasibilitySystem, masks: Iterable[int]) -> list[int]:
    return sorted(masks, key=lambda m: (-_popcount(m), system.sorted_ids(m)))


def _ballot_closure(e: Election) -> list[int]:
    """All intersections of one or more ballots, largest first.

    If a group of voters witnesses a violation, the intersection of their
    ballots appears in this closure, so scanning voter groups of the form
    ``{i : Y ⊆ A_i, <screen>}`` over closure members ``Y`` is exhaustive:
    with Y equal to the violating group's common pool the scan recovers a
    superset of the group whose common pool is exactly Y, and enlarging a
    violating group while preserving the screen preserves the violation.
    """

    masks = set(e.ballot_masks)
    frontier = set(masks)
    while frontier:
        new: set[int] = set()
        for y in frontier:
            for b in e.ballot_masks:
                z = y & b
                if z not in masks:
                    masks.add(z)
                    new.add(z)
        frontier = new
    return _masks_by_size_desc(e.system, masks)


def _subsets_lex(indices: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Nonempty subsets in lexicographic prefix order: (0,), (0,1), ..."""

    n = len(indices)

    def rec(start: int, cur: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        for j in range(start, n):
            nxt = cur + (indices[j],)
            yield nxt
            yield from rec(j + 1, nxt)

    yield from rec(0, ())


def _voter_type_key(e: Election, i: int):
    if e.mode == "approval":
        return ("a", e.ballot_masks[i])
    if e.mode == "additive":
        return ("v", tuple(sorted(e._additive[i].items())))
    return ("t", tuple(sorted(e._tables[i].items())))


def _voter_types(e: Election, indices: Sequence[int]) -> list[tuple[object, list[int]]]:
    """Group interchangeable voters; types ordered by first occurrence."""

    groups: dict[object, list[int]] = {}
    order: list[object] = []
    for i in indices:
        key = _voter_type_key(e, i)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(i)
    return [(k, groups[k]) for k in order]


def _typed_groups(e: Election, indices: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Canonical representatives of voter groups up to interchangeability.

    Voters with identical ballots (and utilities) are interchangeable in
    every audit, so only the number taken from each type matters.  Yields
    the group made of the first ``c_t`` voters of each type, for all count
    vectors in ascending lexicographic order, skipping the empty one.
    """

    types = _voter_types(e, indices)
    ranges = [range(len(members) + 1) for _, members in types]
    for counts in itertools.product(*ranges):
        if not any(counts):
            continue
        group: list[int] = []
        for (_, members), c in zip(types, counts):
            group.extend(members[:c])
        yield tuple(sorted(group))


def _require_outcome(e: Election, outcome: Iterable[str]) -> int:
    wmask = e.system.mask_of(outcome)
    if not e.system.contains_mask(wmask):
        raise ValidationError("infeasible-outcome", "outcome is not feasible")
    return wmask


def _fraction_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def _iter_counts_desc(
    checker: Callable[[Sequence[int]], bool],
    sizes: Sequence[int],
    max_total: Optional[int] = None,
) -> Iterator[tuple[int, ...]]:
    """Feasible count vectors, depth-first with per-class counts descending.

    Partial prefixes are tested with the remaining classes at zero; the
    checker is antitone, so an infeasible zero-padded prefix prunes soundly.
    The all-zero vector is yielded last.
    """

    k = len(sizes)
    vec = [0] * k

    def rec(pos: int, total: int) -> Iterator[tuple[int, ...]]:
        if pos == k:
            yield tuple(vec)
            return
        hi = sizes[pos] if max_total is None else min(sizes[pos], max_total - total)
        for c in range(hi, -1, -1):
            vec[pos] = c
            if c == 0 or checker(vec):
                yield from rec(pos + 1, total + c)
        vec[pos] = 0

    yield from rec(0, 0)


# ---------------------------------------------------------------------------
# deserves (unweighted)
# ---------------------------------------------------------------------------


def _extension_exists_elements(
    system: FeasibilitySystem, tmask: int, pool: int, ell: int
) -> bool:
    """Is there X ⊆ pool with |X| >= ell and T ∪ X feasible?

    Members of ``T ∩ pool`` count toward X for free, so only
    ``ell - |T ∩ pool|`` fresh candidates from ``pool \\ T`` are needed;
    any such X can be trimmed to exactly that many (downward closure).
    """

    need = ell - _popcount(tmask & pool)
    if need <= 0:
        return True
    fresh = list(_bits(pool & ~tmask))
    if len(fresh) < need:
        return False
    contains = system.contains_mask

    def rec(cur: int, start: int, left: int) -> bool:
        if left == 0:
            return True
        for j in range(start, len(fresh) - left + 1):
            nxt = cur | (1 << fresh[j])
            if contains(nxt) and rec(nxt, j + 1, left - 1):
                return True
        return False

    return rec(tmask, 0, need)


def _deserves_elements(e: Election, idx: list[int], ell: int, cap: int) -> DeservesResult:
    system = e.system
    n, s = e.n, len(idx)
    pool = _pool_mask(e, idx)
    stats = {"counter_proposals": 1}

    # Empty counter-proposal first: if the group cannot seat ell common
    # candidates at all, the empty set is the canonical refuter.
    if not _extension_exists_elements(system, 0, pool, ell):
        return DeservesResult(False, frozenset(), "elements", stats)

    bound = (ell * (n - s)) // s
    if bound > 0:
        masks = _masks_by_size_desc(system, _enumerate_masks(system, cap, max_size=bound))
        for tmask in masks:
            if tmask == 0:
                continue
            stats["counter_proposals"] += 1
            if not _extension_exists_elements(system, tmask, pool, ell):
                return DeservesResult(False, system.set_of(tmask), "elements", stats)
    return DeservesResult(True, None, "elements", stats)


def _extension_exists_counts(
    checker: Callable[[Sequence[int]], bool],
    sizes: Sequence[int],
    pool_positions: Sequence[int],
    tvec: Sequence[int],
    need: int,
) -> bool:
    """Count-space analogue of the extension search.

    ``vec`` carries T everywhere and T + Z on pool atom classes; partial
    assignments keep the remaining classes at their T counts, which is a
    pointwise-lower vector, so an infeasible partial prunes soundly.
    """

    if need <= 0:
        return True
    if sum(sizes[a] - tvec[a] for a in pool_positions) < need:
        return False
    vec = list(tvec)

    def rec(pos: int, left: int) -> bool:
        if left == 0:
            return checker(vec)
        if pos == len(pool_positions):
            return False
        a = pool_positions[pos]
        for z in range(min(sizes[a] - tvec[a], left), -1, -1):
            vec[a] = tvec[a] + z
            if z == 0 or checker(vec):
                if rec(pos + 1, left - z):
                    return True
        vec[a] = tvec[a]
        return False

    return rec(0, need)


def _deserves_counts(
    e: Election, idx: list[int], ell: int, cap: int
) -> Optional[DeservesResult]:
    system = e.system
    base = system.base_atoms()
    if base is None:
        return None
    n, s = e.n, len(idx)
    pool = _pool_mask(e, idx)
    atoms = refine_atoms(base, [pool])
    checker = system.counts_checker(atoms)
    sizes = [_popcount(a) for a in atoms]
    pool_positions = [j for j, a in enumerate(atoms) if a & pool == a]
    stats = {"counter_proposals": 1}

    zero = [0] * len(atoms)
    if not _extension_exists_counts(checker, sizes, pool_positions, zero, ell):
        return DeservesResult(False, frozenset(), "counts", stats)

    bound = (ell * (n - s)) // s
    if bound > 0:
        seen = 0
        for tvec in _iter_counts_desc(checker, sizes, max_total=bound):
            if not any(tvec):
                continue
            seen += 1
            if seen > cap:
                raise EnumerationCapExceeded(cap, "counter-proposal classes")
            stats["counter_proposals"] += 1
            free = sum(tvec[j] for j in pool_positions)
            if not _extension_exists_counts(
                checker, sizes, pool_positions, tvec, ell - free
            ):
                refuter = system.set_of(representative_mask(atoms, list(tvec)))
                return DeservesResult(False, refuter, "counts", stats)
    return DeservesResult(True, None, "counts", stats)


def deserves(
    e: Election,
    group: Iterable[str],
    ell: int,
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> DeservesResult:
    """Decide whether ``group`` deserves ``ell`` commonly-approved seats.

    ``method`` selects the counter-proposal enumeration: ``"elements"``
    walks feasible sets, ``"counts"`` walks feasible count classes over the
    system's symmetry atoms refined by the group's common pool, ``"auto"``
    prefers counts when the system supports them.  Both return identical
    verdicts; the count refuter is the class representative built from
    lowest candidate ids.
    """

    if ell < 1:
        raise ValidationError("bad-claim", "ell must be at least 1")
    idx = _group_indices(e, group)
    if method not in ("auto", "elements", "counts"):
        raise ValidationError("bad-method", f"unknown method {method!r}")
    if method in ("auto", "counts"):
        res = _deserves_counts(e, idx, ell, cap)
        if res is not None:
            return res
        if method == "counts":
            raise ValidationError(
                "no-count-support", "system has no count-class structure"
            )
    return _deserves_elements(e, idx, ell, cap)


# ---------------------------------------------------------------------------
# deserves (weighted)
# ---------------------------------------------------------------------------


def _weighted_extension_exists(
    e: Election, tmask: int, pool: int, alpha: Fraction, beta: int
) -> bool:
    """Is there X ⊆ pool, |X| >= beta, weight(X) <= alpha, T ∪ X feasible?

    Overlap with T adds no new members to T ∪ X but still pays its weight
    toward alpha, so X is simply a beta-subset of the pool (any larger X
    can be trimmed).  Members are scanned lightest first with a
    cheapest-completion weight bound.
    """

    if beta <= 0:
        return True
    system = e.system
    members = sorted(_bits(pool), key=lambda b: (system.weight(system.ids[b]), b))
    if len(members) < beta:
        return False
    weights = [system.weight(system.ids[b]) for b in members]
    contains = system.contains_mask

    def rec(cur: int, wsum: Fraction, start: int, left: int) -> bool:
        if left == 0:
            return True
        for j in range(start, len(members) - left + 1):
            w = wsum + weights[j]
            if w + sum(weights[j + 1 : j + left], Fraction(0)) > alpha:
                return False  # later picks are only heavier
            nxt = cur | (1 << members[j])
            if contains(nxt | tmask) and rec(nxt, w, j + 1, left - 1):
                return True
        return False

    return rec(0, Fraction(0), 0, beta)


def _enumerate_weight_capped(
    system: FeasibilitySystem, wcap: Fraction, cap: int
) -> list[int]:
    """Feasible sets with total weight <= wcap (weights are positive)."""

    out: list[int] = []
    contains = system.contains_mask
    weights = [system.weight(c) for c in system.ids]

    def rec(mask: int, wsum: Fraction, start: int) -> None:
        out.append(mask)
        if len(out) > cap:
            raise EnumerationCapExceeded(cap, "weighted counter-proposals")
        for j in range(start, len(system.ids)):
            w = wsum + weights[j]
            if w > wcap:
                continue
            nxt = mask | (1 << j)
            if contains(nxt):
                rec(nxt, w, j + 1)

    rec(0, Fraction(0), 0)
    return out


def _deserves_weighted_general(
    e: Election, idx: list[int], alpha: Fraction, beta: int, cap: int
) -> DeservesResult:
    system = e.system
    n, s = e.n, len(idx)
    pool = _pool_mask(e, idx)
    stats = {"counter_proposals": 1}
    if not _weighted_extension_exists(e, 0, pool, alpha, beta):
        return DeservesResult(False, frozenset(), "elements", stats)
    wbound = alpha * (n - s) / s
    masks = _enumerate_weight_capped(system, wbound, cap)
    masks.sort(
        key=lambda mk: (
            -system.weight_of_mask(mk),
            -_popcount(mk),
            system.sorted_ids(mk),
        )
    )
    for tmask in masks:
        if tmask == 0:
            continue
        stats["counter_proposals"] += 1
        if not _weighted_extension_exists(e, tmask, pool, alpha, beta):
            return DeservesResult(False, system.set_of(tmask), "elements", stats)
    return DeservesResult(True, None, "elements", stats)


class _GroupFrontier:
    """Counter-proposal configurations of one capped group, with frontiers.

    A refuter occupies a subset sigma of the group's members (respecting
    the cap); the claimants may then still take pool members of the group:
    occupied pool members cost their weight only, fresh pool members cost
    their weight and consume residual cap room.  ``frontier[c]`` is the
    minimum claimant weight for c pool members of this group — convex,
    because it is the lower envelope of sums of two sorted prefix
    sequences.  Configurations no cheaper and pointwise no more permissive
    than another are dropped (Pareto filter): substituting the dominating
    configuration into any refuting assignment keeps it refuting.
    """

    def __init__(
        self,
        system: BudgetSystem,
        member_bits: Sequence[int],
        cap: Optional[Fraction],
        pool: int,
    ) -> None:
        weights = {b: system.weight(system.ids[b]) for b in member_bits}
        if cap is None:
            # Uncapped group: occupation never constrains the claimants and
            # only spends refuter weight, so only the empty config survives.
            sigmas = [0]
        else:
            sigmas = []
            for r in range(len(member_bits) + 1):
                for combo in itertools.combinations(member_bits, r):
                    mask = 0
                    tot = Fraction(0)
                    for b in combo:
                        mask |= 1 << b
                        tot += weights[b]
                    if tot <= cap:
                        sigmas.append(mask)
        raw: list[tuple[Fraction, int, tuple[Fraction, ...]]] = []
        for sigma in sigmas:
            w_sigma = sum(
                (weights[b] for b in member_bits if sigma >> b & 1), Fraction(0)
            )
            overlap = sorted(
                weights[b] for b in member_bits if sigma >> b & 1 and pool >> b & 1
            )
            fresh = sorted(
                weights[b]
                for b in member_bits
                if not sigma >> b & 1 and pool >> b & 1
            )
            room = None if cap is None else cap - w_sigma
            fpre: list[Fraction] = [Fraction(0)]
            run = Fraction(0)
            for w in fresh:
                run += w
                if room is not None and run > room:
                    break
                fpre.append(run)
            opre: list[Fraction] = [Fraction(0)]
            run = Fraction(0)
            for w in overlap:
                run += w
                opre.append(run)
            frontier: list[Fraction] = []
            for c in range(len(fpre) + len(opre) - 1):
                best: Optional[Fraction] = None
                for o in range(min(c, len(opre) - 1) + 1):
                    f = c - o
                    if f >= len(fpre):
                        continue
                    v = opre[o] + fpre[f]
                    if best is None or v < best:
                        best = v
                if best is None:
                    break
                frontier.append(best)
            raw.append((w_sigma, sigma, tuple(frontier)))
        raw.sort(key=lambda t: (t[0], t[1]))
        kept: list[tuple[Fraction, int, tuple[Fraction, ...]]] = []
        for w_sigma, sigma, frontier in raw:
            dominated = False
            for kw, _, kf in kept:
                if (
                    kw <= w_sigma
                    and len(kf) <= len(frontier)
                    and all(kf[c] >= frontier[c] for c in range(len(kf)))
                ):
                    dominated = True
                    break
            if not dominated:
                kept.append((w_sigma, sigma, frontier))
        self.configs = kept

    def marginals(self, cfg_index: int) -> list[Fraction]:
        frontier = self.configs[cfg_index][2]
        return [frontier[c + 1] - frontier[c] for c in range(len(frontier) - 1)]


def _deserves_weighted_budget(
    e: Election, idx: list[int], alpha: Fraction, beta: int, cap: int
) -> Optional[DeservesResult]:
    """Grouped enumeration for per-group weight caps with no global cap.

    A counter-proposal is one configuration per group; groups with the same
    cap and (weight, in-pool) member profile are interchangeable, so only
    multiplicities over each type's Pareto configurations are enumerated.
    The claimants' best reply takes the globally cheapest marginal seats
    across all group frontiers — exact because each frontier is convex,
    hence so is their inf-convolution.
    """

    system = e.system
    if not isinstance(system, BudgetSystem) or system.limit is not None:
        return None
    if not system.group_defs:
        return None
    n, s = e.n, len(idx)
    pool = _pool_mask(e, idx)
    groups: list[tuple[list[int], Optional[Fraction]]] = []
    covered = 0
    for gmask, gcap in zip(system.group_masks, system.group_caps):
        groups.append((list(_bits(gmask)), gcap))
        covered |= gmask
    rest = system.full_mask & ~covered
    if rest:
        groups.append((list(_bits(rest)), None))
    if any(gcap is not None and len(bits) > 14 for bits, gcap in groups):
        return None  # configuration space too large; use the general path

    type_map: dict[object, list[int]] = {}
    type_order: list[object] = []
    frontiers: dict[object, _GroupFrontier] = {}
    for gi, (bits, gcap) in enumerate(groups):
        profile = tuple(
            sorted((system.weight(system.ids[b]), bool(pool >> b & 1)) for b in bits)
        )
        key = (gcap, profile)
        if key not in type_map:
            type_map[key] = []
            type_order.append(key)
            frontiers[key] = _GroupFrontier(system, bits, gcap, pool)
        type_map[key].append(gi)

    wbound = alpha * (n - s) / s
    stats = {"counter_proposals": 0}

    def reply_reaches_beta(marg_lists: list[list[Fraction]]) -> bool:
        merged: list[Fraction] = []
        for ml in marg_lists:
            merged.extend(ml[:beta])
        if len(merged) < beta:
            return False
        merged.sort()
        return sum(merged[:beta], Fraction(0)) <= alpha

    types = [(key, len(type_map[key]), frontiers[key]) for key in type_order]
    found: list[Optional[frozenset[str]]] = [None]

    def realize(sigma: int, target_bits: Sequence[int]) -> int:
        # sigma lives in the bit space of the group that built the frontier;
        # map it onto another group of the same type by matching each chosen
        # member's (weight, in-pool) profile.
        out = 0
        for b in _bits(sigma):
            w = system.weight(system.ids[b])
            flag = bool(pool >> b & 1)
            for a in sorted(target_bits):
                if (
                    not out >> a & 1
                    and system.weight(system.ids[a]) == w
                    and bool(pool >> a & 1) == flag
                ):
                    out |= 1 << a
                    break
        return out

    def assemble(assignment: list[tuple[int, ...]]) -> frozenset[str]:
        tmask = 0
        for ti, counts in enumerate(assignment):
            key, _, fr = types[ti]
            instances = type_map[key]
            at = 0
            for ci, c in enumerate(counts):
                for _ in range(c):
                    tmask |= realize(fr.configs[ci][1], groups[instances[at]][0])
                    at += 1
        return system.set_of(tmask)

    def rec(ti: int, wsum: Fraction, marg_acc: list[list[Fraction]],
            assignment: list[tuple[int, ...]]) -> bool:
        if ti == len(types):
            stats["counter_proposals"] += 1
            if not reply_reaches_beta(marg_acc):
                found[0] = assemble(assignment)
                return True
            return False
        key, count, fr = types[ti]
        ncfg = len(fr.configs)

        def split(rem: int, ci: int, counts: tuple[int, ...], w: Fraction) -> bool:
            if ci == ncfg - 1:
                cw = w + fr.configs[ci][0] * rem
                if cw > wbound:
                    return False
                full = counts + (rem,)
                marg = [fr.marginals(j) for j, c in enumerate(full) for _ in range(c)]
                assignment.append(full)
                if rec(ti + 1, cw, marg_acc + marg, assignment):
                    return True
                assignment.pop()
                return False
            for c in range(rem, -1, -1):
                cw = w + fr.configs[ci][0] * c
                if cw > wbound:
                    continue
                if split(rem - c, ci + 1, counts + (c,), cw):
                    return True
            return False

        return split(count, 0, (), wsum)

    if rec(0, Fraction(0), [], []):
        return DeservesResult(False, found[0], "budget-groups", stats)
    return DeservesResult(True, None, "budget-groups", stats)


def deserves_weighted(
    e: Election,
    group: Iterable[str],
    alpha,
    beta: int,
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> DeservesResult:
    """Weighted deservedness: X ⊆ common pool, weight(X) <= alpha, |X| >= beta.

    Against every feasible counter-proposal T with
    ``|S| * (weight(T) + alpha) <= n * alpha``, such an X with ``T ∪ X``
    feasible must exist.  ``"auto"`` uses a grouped enumeration when the
    system is per-group weight caps without a global cap; otherwise (or
    with ``method="elements"``) it walks feasible sets directly.
    """

    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValidationError("bad-claim", "alpha must be positive")
    if beta < 1:
        raise ValidationError("bad-claim", "beta must be at least 1")
    idx = _group_indices(e, group)
    if method not in ("auto", "elements", "budget-groups"):
        raise ValidationError("bad-method", f"unknown method {method!r}")
    if method in ("auto", "budget-groups"):
        res = _deserves_weighted_budget(e, idx, alpha, beta, cap)
        if res is not None:
            return res
        if method == "budget-groups":
            raise ValidationError(
                "no-count-support", "system is not per-group weight caps"
            )
    return _deserves_weighted_general(e, idx, alpha, beta, cap)


# ---------------------------------------------------------------------------
# cohesiveness (fixed and adaptive)
# ---------------------------------------------------------------------------


def _cohesive_x_exists_elements(
    e: Election,
    idx: list[int],
    thresholds: dict[int, Fraction],
    tmask: int,
    alpha: Optional[int],
    tsize: int,
) -> bool:
    """Element-space X search answering one counter-proposal.

    Fixed mode (``alpha`` given): X has exactly alpha members (arbitrary
    candidates — padding is allowed and only makes feasibility harder),
    gives every member utility >= threshold, and ``T ∪ X`` is feasible.
    Adaptive mode: X of any size; T is answered if ``T ∪ X`` is feasible
    or ``|S| * (|T| + |X|) > n * |X|``.
    """

    system = e.system
    contains = system.contains_mask
    m = e.m
    n, s = e.n, len(idx)

    def utilities_ok(xmask: int) -> bool:
        return all(e.u_mask(i, xmask) >= thresholds[i] for i in idx)

    if alpha is not None:
        for combo in itertools.combinations(range(m), alpha):
            xmask = 0
            for b in combo:
                xmask |= 1 << b
            if utilities_ok(xmask) and contains(tmask | xmask):
                return True
        return False
    for size in range(0, m + 1):
        share_ok = s * (tsize + size) > n * size if size > 0 else s * tsize > 0
        for combo in itertools.combinations(range(m), size):
            xmask = 0
            for b in combo:
                xmask |= 1 << b
            if not utilities_ok(xmask):
                continue
            if share_ok or contains(tmask | xmask):
                return True
    return False


def _cohesive_elements(
    e: Election,
    idx: list[int],
    thresholds: dict[int, Fraction],
    alpha: Optional[int],
    cap: int,
) -> CohesiveResult:
    system = e.system
    n, s = e.n, len(idx)
    stats = {"counter_proposals": 1}

    if not _cohesive_x_exists_elements(e, idx, thresholds, 0, alpha, 0):
        return CohesiveResult(False, frozenset(), "elements", stats)

    if alpha is not None:
        bound = (alpha * (n - s)) // s
    else:
        x_min = None
        for size in range(0, e.m + 1):
            for combo in itertools.combinations(range(e.m), size):
                xmask = 0
                for b in combo:
                    xmask |= 1 << b
                if all(e.u_mask(i, xmask) >= thresholds[i] for i in idx):
                    x_min = size
                    break
            if x_min is not None:
                break
        # T = empty passed above, so some satisfying X exists
        bound = (x_min * (n - s)) // s

    if bound > 0:
        masks = _masks_by_size_desc(system, _enumerate_masks(system, cap, max_size=bound))
        for tmask in masks:
            if tmask == 0:
                continue
            stats["counter_proposals"] += 1
            if not _cohesive_x_exists_elements(
                e, idx, thresholds, tmask, alpha, _popcount(tmask)
            ):
                return CohesiveResult(False, system.set_of(tmask), "elements", stats)
    return CohesiveResult(True, None, "elements", stats)


def _cohesive_counts(
    e: Election,
    idx: list[int],
    thresholds: dict[int, Fraction],
    alpha: Optional[int],
    cap: int,
) -> Optional[CohesiveResult]:
    """Count-space cohesiveness for approval utilities.

    Atoms refine the system's symmetry classes by the members' ballots, so
    ``u_i(X)`` depends only on per-atom counts.  For a counter-proposal
    class T the canonical placement of X on an atom reuses T's members
    first (union count = ``max(t_a, x_a)``), which is optimal: it achieves
    the same utilities with the pointwise-smallest union vector.
    """

    system = e.system
    if e.mode != "approval":
        return None
    base = system.base_atoms()
    if base is None:
        return None
    n, s = e.n, len(idx)
    ballots = [e.ballot_masks[i] for i in idx]
    atoms = refine_atoms(base, ballots)
    checker = system.counts_checker(atoms)
    sizes = [_popcount(a) for a in atoms]
    k_atoms = len(atoms)
    betas: list[int] = []
    for i in idx:
        t = thresholds[i]
        betas.append(int(t) if t == int(t) else int(t) + 1)
    member_of = [
        [p for p, i in enumerate(idx) if atoms[j] & e.ballot_masks[i] == atoms[j]]
        for j in range(k_atoms)
    ]
    max_beta = max(betas)

    suffix_pot = [[0] * (k_atoms + 1) for _ in range(len(idx))]
    for p, i in enumerate(idx):
        for j in range(k_atoms - 1, -1, -1):
            own = sizes[j] if atoms[j] & e.ballot_masks[i] == atoms[j] else 0
            suffix_pot[p][j] = suffix_pot[p][j + 1] + own

    def x_min_counts() -> Optional[int]:
        best: list[Optional[int]] = [None]

        def rec(j: int, got: list[int], total: int) -> None:
            if best[0] is not None and total >= best[0]:
                return
            if all(g >= b for g, b in zip(got, betas)):
                best[0] = total
                return
            if j == k_atoms:
                return
            if any(
                got[p] + suffix_pot[p][j] < betas[p] for p in range(len(idx))
            ):
                return
            hi = min(sizes[j], max_beta) if member_of[j] else 0
            for x in range(hi, -1, -1):
                for p in member_of[j]:
                    got[p] += x
                rec(j + 1, got, total + x)
                for p in member_of[j]:
                    got[p] -= x

        rec(0, [0] * len(idx), 0)
        return best[0]

    def x_exists(tvec: Sequence[int], tsize: int) -> bool:
        union = list(tvec)

        if alpha is not None:

            def rec_fixed(j: int, got: list[int], placed: int) -> bool:
                if j == k_atoms:
                    return (
                        placed == alpha
                        and all(g >= b for g, b in zip(got, betas))
                        and checker(union)
                    )
                if any(
                    got[p] + suffix_pot[p][j] < betas[p] for p in range(len(idx))
                ):
                    return False
                if placed + sum(sizes[r] for r in range(j, k_atoms)) < alpha:
                    return False
                hi = min(sizes[j], alpha - placed)
                for x in range(hi, -1, -1):
                    old = union[j]
                    union[j] = max(tvec[j], x)
                    if union[j] == old or checker(union):
                        for p in member_of[j]:
                            got[p] += x
                        if rec_fixed(j + 1, got, placed + x):
                            return True
                        for p in member_of[j]:
                            got[p] -= x
                    union[j] = old
                return False

            return rec_fixed(0, [0] * len(idx), 0)

        # Adaptive: once every member meets their threshold, extending X
        # only raises |X| (weakening the share inequality when s < n) and
        # grows the union (never restoring feasibility), so the current X
        # is decisive for its subtree.  The feasibility-pruned pass covers
        # the feasibility branch; a second, unpruned pass covers successes
        # via the share inequality alone (whose X may ride on an infeasible
        # union that the first pass pruned away).
        def rec_adaptive(j: int, got: list[int], placed: int) -> bool:
            if all(g >= b for g, b in zip(got, betas)):
                if placed > 0 and s * (tsize + placed) > n * placed:
                    return True
                return checker(union)
            if j == k_atoms:
                return False
            if any(
                got[p] + suffix_pot[p][j] < betas[p] for p in range(len(idx))
            ):
                return False
            hi = min(sizes[j], max_beta) if member_of[j] else 0
            for x in range(hi, -1, -1):
                old = union[j]
                union[j] = max(tvec[j], x)
                if union[j] == old or checker(union):
                    for p in member_of[j]:
                        got[p] += x
                    if rec_adaptive(j + 1, got, placed + x):
                        return True
                    for p in member_of[j]:
                        got[p] -= x
                union[j] = old
            return False

        if rec_adaptive(0, [0] * len(idx), 0):
            return True

        def rec_share(j: int, got: list[int], placed: int) -> bool:
            if all(g >= b for g, b in zip(got, betas)):
                return placed > 0 and s * (tsize + placed) > n * placed
            if j == k_atoms:
                return False
            if any(
                got[p] + suffix_pot[p][j] < betas[p] for p in range(len(idx))
            ):
                return False
            hi = min(sizes[j], max_beta) if member_of[j] else 0
            for x in range(hi, -1, -1):
                for p in member_of[j]:
                    got[p] += x
                if rec_share(j + 1, got, placed + x):
                    return True
                for p in member_of[j]:
                    got[p] -= x
            return False

        return rec_share(0, [0] * len(idx), 0)

    stats = {"counter_proposals": 1}
    zero = [0] * k_atoms
    if alpha is None:
        xm = x_min_counts()
        if xm is None:
            return CohesiveResult(False, frozenset(), "counts", stats)
        bound = (xm * (n - s)) // s
    else:
        bound = (alpha * (n - s)) // s
    if not x_exists(zero, 0):
        return CohesiveResult(False, frozenset(), "counts", stats)

    if bound > 0:
        seen = 0
        for tvec in _iter_counts_desc(checker, sizes, max_total=bound):
            if not any(tvec):
                continue
            seen += 1
            if seen > cap:
                raise EnumerationCapExceeded(cap, "counter-proposal classes")
            stats["counter_proposals"] += 1
            if not x_exists(tvec, sum(tvec)):
                refuter = system.set_of(representative_mask(atoms, list(tvec)))
                return CohesiveResult(False, refuter, "counts", stats)
    return CohesiveResult(True, None, "counts", stats)


def cohesive(
    e: Election,
    group: Iterable[str],
    alpha: Optional[int],
    beta=None,
    mode: str = "fixed",
    method: str = "auto",
    cap: int = DEFAULT_CAP,
    thresholds: Optional[dict[str, Fraction]] = None,
) -> CohesiveResult:
    """Decide (alpha, beta)-cohesiveness of ``group``.

    Fixed mode: against every feasible counter-proposal T with
    ``|S| * (|T| + alpha) <= n * alpha`` there must be X with exactly
    ``alpha`` members, ``u_i(X) >= beta`` for every member, and ``T ∪ X``
    feasible.  Adaptive mode drops alpha: X chooses its size, and T is
    answered if ``T ∪ X`` is feasible or ``|S| * (|T| + |X|) > n * |X|``.

    ``thresholds`` replaces the uniform beta with per-voter utility
    targets (used by the core audit).
    """

    if mode not in ("fixed", "adaptive"):
        raise ValidationError("bad-mode", f"unknown cohesiveness mode {mode!r}")
    if mode == "fixed":
        if alpha is None or alpha < 0:
            raise ValidationError("bad-claim", "alpha must be a nonnegative integer")
    else:
        alpha = None
    idx = _group_indices(e, group)
    if thresholds is None:
        if beta is None:
            raise ValidationError("bad-claim", "beta or thresholds required")
        th = {i: Fraction(beta) for i in idx}
    else:
        th = {}
        for i in idx:
            vid = e.voter_ids[i]
            if vid not in thresholds:
                raise ValidationError("bad-claim", f"missing threshold for {vid!r}")
            th[i] = Fraction(thresholds[vid])
    if any(t < 0 for t in th.values()):
        raise ValidationError("bad-claim", "beta must be nonnegative")
    if all(t <= 0 for t in th.values()) and (alpha is None or alpha == 0):
        # the empty X satisfies every member against every counter-proposal
        return CohesiveResult(True, None, "trivial", {"counter_proposals": 0})
    if method not in ("auto", "elements", "counts"):
        raise ValidationError("bad-method", f"unknown method {method!r}")
    if method in ("auto", "counts"):
        res = _cohesive_counts(e, idx, th, alpha, cap)
        if res is not None:
            return res
        if method == "counts":
            raise ValidationError(
                "no-count-support",
                "count method needs approval mode and count-class structure",
            )
    return _cohesive_elements(e, idx, th, alpha, cap)


# ---------------------------------------------------------------------------
# EJR / PJR audits
# ---------------------------------------------------------------------------


def _claim_witness(e: Election, members: Sequence[int], util: Sequence) -> dict:
    pool = _pool_mask(e, list(members))
    return {
        "group": [e.voter_ids[i] for i in members],
        "utilities": {e.voter_ids[i]: _fraction_str(util[i]) for i in members},
        "pool": list(e.system.sorted_ids(pool)),
    }


def audit_ejr(
    e: Election,
    outcome: Iterable[str],
    groups: str = "closure",
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> AuditReport:
    """Check: no group deserves ell while every member gets fewer than ell.

    ``groups="closure"`` scans, for each ell ascending, candidate groups
    ``{i : Y ⊆ A_i, u_i(W) < ell}`` with Y ranging over the intersection
    closure of the ballots (exhaustive; see `_ballot_closure`).
    ``groups="subsets"`` is the reference mode over all voter subsets,
    checking each at ``ell = max_i u_i(W) + 1`` — deservedness is downward
    monotone in ell, so that single ell decides the subset.
    """

    wmask = _require_outcome(e, outcome)
    util = [e.u_mask(i, wmask) for i in range(e.n)]
    stats = {"groups": 0, "oracle_calls": 0}
    if groups == "closure":
        closure = _ballot_closure(e)
        for ell in range(1, e.m + 1):
            for y in closure:
                members = [
                    i
                    for i in range(e.n)
                    if e.ballot_masks[i] & y == y and util[i] < ell
                ]
                if not members:
                    continue
                stats["groups"] += 1
                stats["oracle_calls"] += 1
                if deserves(e, [e.voter_ids[i] for i in members], ell, method, cap).ok:
                    w = _claim_witness(e, members, util)
                    w["ell"] = ell
                    return AuditReport("ejr", False, w, stats, mode=groups)
        return AuditReport("ejr", True, None, stats, mode=groups)
    if groups == "subsets":
        for combo in _subsets_lex(list(range(e.n))):
            members = list(combo)
            ell = int(max(util[i] for i in members)) + 1
            if ell > e.m:
                continue
            stats["groups"] += 1
            stats["oracle_calls"] += 1
            if deserves(e, [e.voter_ids[i] for i in members], ell, method, cap).ok:
                w = _claim_witness(e, members, util)
                w["ell"] = ell
                return AuditReport("ejr", False, w, stats, mode=groups)
        return AuditReport("ejr", True, None, stats, mode=groups)
    raise ValidationError("bad-mode", f"unknown group enumeration {groups!r}")


def _outcome_subsets(wmask: int) -> list[int]:
    bits = list(_bits(wmask))
    subs: list[int] = [0]
    for r in range(1, len(bits) + 1):
        for combo in itertools.combinations(bits, r):
            mk = 0
            for b in combo:
                mk |= 1 << b
            subs.append(mk)
    return subs


def audit_pjr(
    e: Election,
    outcome: Iterable[str],
    groups: str = "closure",
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> AuditReport:
    """Check: every group deserving ell collectively touches ell winners.

    A violation is a group S deserving ell with ``|W ∩ ∪A_S| < ell``.  The
    closure scan pairs each closure member Y with each subset V' of the
    outcome and examines ``{i : Y ⊆ A_i, A_i ∩ W ⊆ V'}``: for a true
    violator S, the pair (Y = its common pool, V' = its winner coverage)
    recovers a superset of S with no larger coverage, and deservedness only
    grows with the group.  Each candidate group is checked once, at
    ``ell = coverage + 1`` (downward monotonicity in ell).
    """

    wmask = _require_outcome(e, outcome)
    util = [e.u_mask(i, wmask) for i in range(e.n)]
    stats = {"groups": 0, "oracle_calls": 0}

    def coverage(members: Sequence[int]) -> int:
        u = 0
        for i in members:
            u |= e.ballot_masks[i]
        return _popcount(u & wmask)

    def run(member_sets: Iterator[list[int]]) -> AuditReport:
        for members in member_sets:
            cov = coverage(members)
            ell = cov + 1
            if ell > e.m:
                continue
            stats["groups"] += 1
            stats["oracle_calls"] += 1
            if deserves(e, [e.voter_ids[i] for i in members], ell, method, cap).ok:
                w = _claim_witness(e, members, util)
                w["ell"] = ell
                w["coverage"] = cov
                return AuditReport("pjr", False, w, stats, mode=groups)
        return AuditReport("pjr", True, None, stats, mode=groups)

    if groups == "closure":

        def gen() -> Iterator[list[int]]:
            seen: set[tuple[int, ...]] = set()
            wsubs = _outcome_subsets(wmask)
            for y in _ballot_closure(e):
                for vp in wsubs:
                    members = [
                        i
                        for i in range(e.n)
                        if e.ballot_masks[i] & y == y
                        and e.ballot_masks[i] & wmask & ~vp == 0
                    ]
                    if not members:
                        continue
                    key = tuple(members)
                    if key not in seen:
                        seen.add(key)
                        yield members

        return run(gen())
    if groups == "subsets":
        return run(list(c) for c in _subsets_lex(list(range(e.n))))
    raise ValidationError("bad-mode", f"unknown group enumeration {groups!r}")


# ---------------------------------------------------------------------------
# FJR / core audits
# ---------------------------------------------------------------------------


def _achievable_betas(e: Election) -> list[Fraction]:
    vals: set[Fraction] = set()
    for i in range(e.n):
        vals.update(Fraction(v) for v in e.achievable_utilities(i))
    return sorted((v for v in vals if v > 0), reverse=True)


def audit_fjr(
    e: Election,
    outcome: Iterable[str],
    mode: str = "fixed",
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> AuditReport:
    """Check: no (alpha, beta)-cohesive group has every member below beta.

    Candidate betas are the achievable positive utility values, scanned
    highest first; for each beta only voters with ``u_i(W) < beta`` and
    beta achievable can join a violating group.  Groups are enumerated up
    to voter interchangeability.  Fixed mode scans alpha upward from 0;
    adaptive mode needs no alpha.
    """

    if mode not in ("fixed", "adaptive"):
        raise ValidationError("bad-mode", f"unknown cohesiveness mode {mode!r}")
    wmask = _require_outcome(e, outcome)
    util = [e.u_mask(i, wmask) for i in range(e.n)]
    maxu = [e.u_mask(i, e.system.full_mask) for i in range(e.n)]
    stats = {"groups": 0, "oracle_calls": 0}
    for beta in _achievable_betas(e):
        eligible = [i for i in range(e.n) if util[i] < beta <= maxu[i]]
        if not eligible:
            continue
        for members in _typed_groups(e, eligible):
            stats["groups"] += 1
            ids = [e.voter_ids[i] for i in members]
            if mode == "fixed":
                for alpha in range(0, e.m + 1):
                    stats["oracle_calls"] += 1
                    if cohesive(e, ids, alpha, beta, "fixed", method, cap).ok:
                        w = _claim_witness(e, members, util)
                        w["alpha"] = alpha
                        w["beta"] = _fraction_str(beta)
                        return AuditReport("fjr", False, w, stats, mode=mode)
            else:
                stats["oracle_calls"] += 1
                if cohesive(e, ids, None, beta, "adaptive", method, cap).ok:
                    w = _claim_witness(e, members, util)
                    w["beta"] = _fraction_str(beta)
                    return AuditReport("fjr", False, w, stats, mode=mode)
    return AuditReport("fjr", True, None, stats, mode=mode)


def audit_core(
    e: Election,
    outcome: Iterable[str],
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> AuditReport:
    """Check core stability against integer-size deviations.

    A blocking group is cohesive — with per-voter utility targets — for
    some alpha in 0..m, every member strictly improving on the outcome.
    Only canonical targets need checking: each member's least achievable
    utility strictly above their outcome utility.  Any blocking deviation
    under higher targets still blocks under the canonical ones.
    """

    wmask = _require_outcome(e, outcome)
    util = [e.u_mask(i, wmask) for i in range(e.n)]
    stats = {"groups": 0, "oracle_calls": 0}
    beta_of: dict[int, Fraction] = {}
    for i in range(e.n):
        above = [
            Fraction(v) for v in e.achievable_utilities(i) if Fraction(v) > util[i]
        ]
        if above:
            beta_of[i] = min(above)
    eligible = sorted(beta_of)
    for members in _typed_groups(e, eligible):
        stats["groups"] += 1
        ids = [e.voter_ids[i] for i in members]
        thresholds = {e.voter_ids[i]: beta_of[i] for i in members}
        for alpha in range(0, e.m + 1):
            stats["oracle_calls"] += 1
            res = cohesive(
                e, ids, alpha, None, "fixed", method, cap, thresholds=thresholds
            )
            if res.ok:
                w = {
                    "group": ids,
                    "alpha": alpha,
                    "targets": {
                        e.voter_ids[i]: _fraction_str(beta_of[i]) for i in members
                    },
                    "utilities": {
                        e.voter_ids[i]: _fraction_str(util[i]) for i in members
                    },
                }
                return AuditReport("core", False, w, stats)
    return AuditReport("core", True, None, stats)


# ---------------------------------------------------------------------------
# restrained EJR
# ---------------------------------------------------------------------------


def audit_restrained_ejr(
    e: Election,
    outcome: Iterable[str],
    k: int,
    cap: int = DEFAULT_CAP,
) -> AuditReport:
    """Check that no group blocks the outcome under seat-restrained replies.

    A group S with reply budget ``k' = floor(|S| * k / n)`` blocks when for
    EVERY retained part ``Ŵ ⊆ W`` with ``|Ŵ| <= k - k'`` it has a reply
    ``W'`` (``|W'| <= k'``, ``Ŵ ∪ W'`` feasible) containing at least
    ``max_i u_i(W) + 1`` of its commonly-approved candidates.  Under
    downward-closed feasibility every retained part is itself feasible, so
    no separate completability screen applies.  A reply never needs
    candidates outside the common pool, and never more than the deficit.
    """

    if k < 1:
        raise ValidationError("bad-claim", "k must be at least 1")
    wmask = _require_outcome(e, outcome)
    util = [e.u_mask(i, wmask) for i in range(e.n)]
    system = e.system
    contains = system.contains_mask
    stats = {"groups": 0}
    wbits = list(_bits(wmask))
    for members in _typed_groups(e, list(range(e.n))):
        s = len(members)
        kp = (s * k) // e.n
        if kp == 0:
            continue  # no reply budget: the empty retained part defeats S
        pool = _pool_mask(e, list(members))
        ell = int(max(util[i] for i in members)) + 1
        if _popcount(pool) < ell:
            continue  # even the full pool cannot reach ell
        stats["groups"] += 1
        blocked = True
        for r in range(0, min(k - kp, len(wbits)) + 1):
            for combo in itertools.combinations(wbits, r):
                hatw = 0
                for b in combo:
                    hatw |= 1 << b
                need = ell - _popcount(hatw & pool)
                if need <= 0:
                    continue  # the retained part alone reaches ell
                if need > kp or not _reply_exists(contains, hatw, pool, need):
                    blocked = False
                    break
            if not blocked:
                break
        if blocked:
            w = _claim_witness(e, members, util)
            w["ell"] = ell
            w["k_prime"] = kp
            return AuditReport("restrained-ejr", False, w, stats)
    return AuditReport("restrained-ejr", True, None, stats)


def _reply_exists(
    contains: Callable[[int], bool], hatw: int, pool: int, need: int
) -> bool:
    fresh = list(_bits(pool & ~hatw))
    if len(fresh) < need:
        return False

    def rec(cur: int, start: int, left: int) -> bool:
        if left == 0:
            return True
        for j in range(start, len(fresh) - left + 1):
            nxt = cur | (1 << fresh[j])
            if contains(nxt) and rec(nxt, j + 1, left - 1):
                return True
        return False

    return rec(hatw, 0, need)


# ---------------------------------------------------------------------------
# weighted EJR / PJR audits
# ---------------------------------------------------------------------------


def _alpha_grid(e: Election, pool: int, beta: int) -> list[Fraction]:
    """Distinct total weights of exactly-beta subsets of the pool.

    These are the only alphas worth testing: lowering alpha to the largest
    achievable X-weight not exceeding it keeps the available X-sets
    unchanged while weakening the share inequality, so a violation at any
    alpha implies one at a grid point.
    """

    pairs: set[tuple[int, Fraction]] = {(0, Fraction(0))}
    for b in _bits(pool):
        w = e.system.weight(e.system.ids[b])
        pairs |= {(c + 1, t + w) for (c, t) in pairs if c < beta}
    return sorted(t for (c, t) in pairs if c == beta)


def audit_ejr_weighted(
    e: Election,
    outcome: Iterable[str],
    groups: str = "closure",
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> AuditReport:
    """Weighted EJR: no group with a valid (alpha, beta) claim leaves every
    member with fewer than beta approved winners (``|W ∩ A_i| < beta``)."""

    wmask = _require_outcome(e, outcome)
    util = [_popcount(e.ballot_masks[i] & wmask) for i in range(e.n)]
    stats = {"groups": 0, "oracle_calls": 0}

    def check(members: list[int], beta: int) -> Optional[Fraction]:
        pool = _pool_mask(e, members)
        if _popcount(pool) < beta:
            return None
        stats["groups"] += 1
        ids = [e.voter_ids[i] for i in members]
        for alpha in _alpha_grid(e, pool, beta):
            if alpha <= 0:
                continue
            stats["oracle_calls"] += 1
            if deserves_weighted(e, ids, alpha, beta, method, cap).ok:
                return alpha
        return None

    def witness(members: list[int], beta: int, alpha: Fraction) -> AuditReport:
        w = {
            "group": [e.voter_ids[i] for i in members],
            "beta": beta,
            "alpha": _fraction_str(alpha),
            "utilities": {e.voter_ids[i]: util[i] for i in members},
            "pool": list(e.system.sorted_ids(_pool_mask(e, members))),
        }
        return AuditReport("ejr-weighted", False, w, stats, mode=groups)

    if groups == "closure":
        closure = _ballot_closure(e)
        for beta in range(1, e.m + 1):
            for y in closure:
                members = [
                    i
                    for i in range(e.n)
                    if e.ballot_masks[i] & y == y and util[i] < beta
                ]
                if not members:
                    continue
                alpha = check(members, beta)
                if alpha is not None:
                    return witness(members, beta, alpha)
        return AuditReport("ejr-weighted", True, None, stats, mode=groups)
    if groups == "subsets":
        for combo in _subsets_lex(list(range(e.n))):
            members = list(combo)
            beta = max(util[i] for i in members) + 1
            if beta > e.m:
                continue
            alpha = check(members, beta)
            if alpha is not None:
                return witness(members, beta, alpha)
        return AuditReport("ejr-weighted", True, None, stats, mode=groups)
    raise ValidationError("bad-mode", f"unknown group enumeration {groups!r}")


def audit_pjr_weighted(
    e: Election,
    outcome: Iterable[str],
    groups: str = "closure",
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> AuditReport:
    """Weighted PJR: a group with a valid (alpha, beta) claim must touch at
    least beta winners collectively (``|W ∩ ∪A_S| >= beta``)."""

    wmask = _require_outcome(e, outcome)
    stats = {"groups": 0, "oracle_calls": 0}

    def coverage(members: Sequence[int]) -> int:
        u = 0
        for i in members:
            u |= e.ballot_masks[i]
        return _popcount(u & wmask)

    def check(members: list[int]) -> Optional[tuple[int, Fraction]]:
        cov = coverage(members)
        beta = cov + 1
        if beta > e.m:
            return None
        pool = _pool_mask(e, members)
        if _popcount(pool) < beta:
            return None
        stats["groups"] += 1
        ids = [e.voter_ids[i] for i in members]
        for alpha in _alpha_grid(e, pool, beta):
            if alpha <= 0:
                continue
            stats["oracle_calls"] += 1
            if deserves_weighted(e, ids, alpha, beta, method, cap).ok:
                return beta, alpha
        return None

    def witness(members: list[int], beta: int, alpha: Fraction) -> AuditReport:
        w = {
            "group": [e.voter_ids[i] for i in members],
            "beta": beta,
            "alpha": _fraction_str(alpha),
            "coverage": beta - 1,
            "pool": list(e.system.sorted_ids(_pool_mask(e, members))),
        }
        return AuditReport("pjr-weighted", False, w, stats, mode=groups)

    if groups == "closure":
        seen: set[tuple[int, ...]] = set()
        wsubs = _outcome_subsets(wmask)
        for y in _ballot_closure(e):
            for vp in wsubs:
                members = [
                    i
                    for i in range(e.n)
                    if e.ballot_masks[i] & y == y
                    and e.ballot_masks[i] & wmask & ~vp == 0
                ]
                if not members:
                    continue
                key = tuple(members)
                if key in seen:
                    continue
                seen.add(key)
                hit = check(members)
                if hit is not None:
                    return witness(members, *hit)
        return AuditReport("pjr-weighted", True, None, stats, mode=groups)
    if groups == "subsets":
        for combo in _subsets_lex(list(range(e.n))):
            members = list(combo)
            hit = check(members)
            if hit is not None:
                return witness(members, *hit)
        return AuditReport("pjr-weighted", True, None, stats, mode=groups)
    raise ValidationError("bad-mode", f"unknown group enumeration {groups!r}")


# ---------------------------------------------------------------------------
# derived guarantees
# ---------------------------------------------------------------------------


def check_avg_satisfaction(
    e: Election, outcome: Iterable[str], group: Iterable[str], ell: int
) -> bool:
    """Average member satisfaction is at least (ell - 1) / 2.

    Precondition (not re-checked): the group deserves ell.  Compared in
    integers: ``2 * sum_i |A_i ∩ W| >= |S| * (ell - 1)``.
    """

    wmask = _require_outcome(e, outcome)
    idx = _group_indices(e, group)
    total = sum(_popcount(e.ballot_masks[i] & wmask) for i in idx)
    return 2 * total >= len(idx) * (ell - 1)


def max_deserved(
    e: Election,
    group: Iterable[str],
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> int:
    """Largest ell the group deserves (0 when none).

    Deservedness is downward monotone in ell — an extension for ell
    restricts to any smaller ell — so the first failure ends the scan.
    """

    idx = _group_indices(e, group)
    ids = [e.voter_ids[i] for i in idx]
    pool = _pool_mask(e, idx)
    best = 0
    for ell in range(1, _popcount(pool) + 1):
        if deserves(e, ids, ell, method, cap).ok:
            best = ell
        else:
            break
    return best


def max_weighted_claim(
    e: Election,
    group: Iterable[str],
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> Optional[tuple[int, Fraction]]:
    """Largest beta with a valid weighted claim, with a witnessing alpha.

    Scans beta downward from the pool size; for each beta tries the alpha
    grid ascending.  Returns None when no (alpha, beta) claim is valid.
    """

    idx = _group_indices(e, group)
    ids = [e.voter_ids[i] for i in idx]
    pool = _pool_mask(e, idx)
    for beta in range(_popcount(pool), 0, -1):
        for alpha in _alpha_grid(e, pool, beta):
            if alpha <= 0:
                continue
            if deserves_weighted(e, ids, alpha, beta, method, cap).ok:
                return beta, alpha
    return None


def check_weighted_coverage_bound(
    e: Election,
    outcome: Iterable[str],
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> bool:
    """Coverage bound for weighted claims, over all voter groups.

    Every group with a valid (alpha, beta) claim must collectively touch
    at least ``floor(beta * (n - |S|) / n)`` winners.  The bound grows
    with beta, so only each group's largest claim is tested.
    """

    wmask = _require_outcome(e, outcome)
    n = e.n
    for members in _typed_groups(e, list(range(e.n))):
        ids = [e.voter_ids[i] for i in members]
        hit = max_weighted_claim(e, ids, method, cap)
        if hit is None:
            continue
        beta, _ = hit
        u = 0
        for i in members:
            u |= e.ballot_masks[i]
        if _popcount(u & wmask) < (beta * (n - len(members))) // n:
            return False
    return True
