"""Downward-closed feasibility systems over a finite candidate universe.

A feasibility system decides which candidate sets may be selected together.
All families here are downward closed: every subset of a feasible set is
feasible. Families that are naturally stated in equality form (a committee of
exactly ``k`` seats, exact per-group quotas, one choice per issue) are
normalized to their downward closures via completability: a partial selection
is feasible iff it extends to a full one. Systems built that way carry a
normalization note that reports echo.

Internally every system fixes the universe in sorted id order and works on
integer bitmasks; bit ``j`` is the ``j``-th id in that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import (
    EnumerationCapExceeded,
    NotAMatroidError,
    ValidationError,
)

DEFAULT_CAP = 1 << 20

NORMALIZATION_NOTE = "equality-form constraints normalized to downward closure"


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


class FeasibilitySystem:
    """Base class: a downward-closed family of candidate sets."""

    kind: str = "abstract"

    def __init__(self, ids: Iterable[str], notes: Sequence[str] = ()):
        ids = list(ids)
        if not ids:
            raise ValidationError("empty-universe", "a system needs at least one candidate")
        seen = set()
        for cid in ids:
            if not isinstance(cid, str) or not cid:
                raise ValidationError("bad-candidate-id", f"candidate id {cid!r} must be a non-empty string")
            if cid in seen:
                raise ValidationError("duplicate-id", f"duplicate candidate id {cid!r}")
            seen.add(cid)
        self.ids: tuple[str, ...] = tuple(sorted(ids))
        self.index: dict[str, int] = {cid: j for j, cid in enumerate(self.ids)}
        self.full_mask: int = (1 << len(self.ids)) - 1
        self.notes: tuple[str, ...] = tuple(notes)

    # -- id/mask plumbing ---------------------------------------------------

    def mask_of(self, candidates: Iterable[str]) -> int:
        mask = 0
        for cid in candidates:
            j = self.index.get(cid)
            if j is None:
                raise ValidationError("unknown-candidate", f"unknown candidate id {cid!r}")
            mask |= 1 << j
        return mask

    def set_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.ids[j] for j in _bits(mask))

    def sorted_ids(self, mask: int) -> tuple[str, ...]:
        return tuple(self.ids[j] for j in _bits(mask))

    def weight(self, cid: str) -> Fraction:
        return Fraction(1)

    def weight_of_mask(self, mask: int) -> Fraction:
        total = Fraction(0)
        for j in _bits(mask):
            total += self.weight(self.ids[j])
        return total

    # -- feasibility --------------------------------------------------------

    def is_feasible(self, candidates: Iterable[str]) -> bool:
        return self.contains_mask(self.mask_of(candidates))

    def contains_mask(self, mask: int) -> bool:
        raise NotImplementedError

    # -- count-vector support ------------------------------------------------

    def base_atoms(self) -> Optional[list[int]]:
        """Structural partition (as masks) that count feasibility respects.

        ``None`` means feasibility is not a function of per-class counts and
        only element-level enumeration is available.
        """
        return None

    def counts_checker(self, atoms: Sequence[int]) -> Callable[[Sequence[int]], bool]:
        """Return a predicate deciding feasibility from per-atom counts.

        ``atoms`` must refine :meth:`base_atoms`; each atom then lies inside
        exactly one structural class, so the counts determine feasibility.
        """
        raise ValidationError(
            "no-count-support", f"{self.kind} systems do not support count-based feasibility"
        )

    def _locate_atoms(self, atoms: Sequence[int]) -> list[int]:
        base = self.base_atoms()
        if base is None:
            raise ValidationError("no-count-support", f"{self.kind} systems have no structural partition")
        owners = []
        for a in atoms:
            owner = None
            for gi, g in enumerate(base):
                if a & g == a:
                    owner = gi
                    break
            if owner is None:
                raise ValidationError(
                    "bad-atoms", "atom crosses structural class boundaries; refine by base_atoms first"
                )
            owners.append(owner)
        return owners


class CommitteeSystem(FeasibilitySystem):
    """At most ``k`` candidates; the downward closure of committees of size k."""

    kind = "committee"

    def __init__(self, ids: Iterable[str], k: int):
        super().__init__(ids, notes=(NORMALIZATION_NOTE,))
        if not isinstance(k, int) or k < 1:
            raise ValidationError("non-positive-k", f"committee size must be a positive integer, got {k!r}")
        if k > len(self.ids):
            raise ValidationError(
                "unsatisfiable-quotas", f"committee size {k} exceeds universe size {len(self.ids)}"
            )
        self.k = k

    def contains_mask(self, mask: int) -> bool:
        return _popcount(mask) <= self.k

    def base_atoms(self) -> list[int]:
        return [self.full_mask]

    def counts_checker(self, atoms: Sequence[int]) -> Callable[[Sequence[int]], bool]:
        self._locate_atoms(atoms)
        k = self.k
        return lambda counts: sum(counts) <= k


class PublicDecisionsSystem(FeasibilitySystem):
    """One choice per issue: at most one of each (yes, no) candidate pair."""

    kind = "public-decisions"

    def __init__(self, issues: Sequence[tuple[str, str]]):
        flat: list[str] = []
        for pair in issues:
            if len(pair) != 2:
                raise ValidationError("bad-issue", f"issue {pair!r} must have exactly two alternatives")
            flat.extend(pair)
        super().__init__(flat, notes=(NORMALIZATION_NOTE,))
        self.issues = tuple((a, b) for a, b in issues)
        self.pair_masks = [self.mask_of(pair) for pair in self.issues]

    def contains_mask(self, mask: int) -> bool:
        for pm in self.pair_masks:
            if _popcount(mask & pm) > 1:
                return False
        return True

    def base_atoms(self) -> list[int]:
        return list(self.pair_masks)

    def counts_checker(self, atoms: Sequence[int]) -> Callable[[Sequence[int]], bool]:
        owners = self._locate_atoms(atoms)
        npairs = len(self.pair_masks)

        def check(counts: Sequence[int]) -> bool:
            per_pair = [0] * npairs
            for owner, c in zip(owners, counts):
                per_pair[owner] += c
            return all(c <= 1 for c in per_pair)

        return check


class DisjointAttributesSystem(FeasibilitySystem):
    """Per-group quotas on a partition of the universe, total size exactly k.

    A set is feasible iff it stays within every upper quota and can be
    completed to a set of size exactly ``k`` meeting every lower quota.
    """

    kind = "disjoint-attributes"

    def __init__(self, k: int, groups: Sequence[tuple[Iterable[str], int, int]]):
        members: list[str] = []
        claimed: set[str] = set()
        cleaned: list[tuple[tuple[str, ...], int, int]] = []
        for gids, lo, hi in groups:
            gtuple = tuple(gids)
            for cid in gtuple:
                if cid in claimed:
                    raise ValidationError("overlapping-groups", f"candidate {cid!r} appears in two groups")
                claimed.add(cid)
            members.extend(gtuple)
            if not (isinstance(lo, int) and isinstance(hi, int) and 0 <= lo <= hi):
                raise ValidationError("bad-quota", f"group quotas ({lo!r}, {hi!r}) must satisfy 0 <= lo <= hi")
            cleaned.append((gtuple, lo, hi))
        super().__init__(members, notes=(NORMALIZATION_NOTE,))
        if not isinstance(k, int) or k < 1:
            raise ValidationError("non-positive-k", f"total size must be a positive integer, got {k!r}")
        self.k = k
        self.groups = cleaned
        self.group_masks = [self.mask_of(g) for g, _, _ in cleaned]
        self.lowers = [lo for _, lo, _ in cleaned]
        self.uppers = [hi for _, _, hi in cleaned]
        self.capacities = [min(hi, len(g)) for (g, _, hi) in cleaned]
        if sum(self.lowers) > k or k > sum(self.capacities):
            raise ValidationError(
                "unsatisfiable-quotas",
                f"no set of size {k} meets quotas (lower total {sum(self.lowers)}, capacity {sum(self.capacities)})",
            )

    def _counts_ok(self, per_group: Sequence[int]) -> bool:
        total = 0
        need = 0
        room = 0
        for c, hi, cap, lo in zip(per_group, self.uppers, self.capacities, self.lowers):
            if c > hi:
                return False
            total += c
            if c < lo:
                need += lo - c
            room += cap - c
        remaining = self.k - total
        return need <= remaining <= room

    def contains_mask(self, mask: int) -> bool:
        return self._counts_ok([_popcount(mask & gm) for gm in self.group_masks])

    def base_atoms(self) -> list[int]:
        return list(self.group_masks)

    def counts_checker(self, atoms: Sequence[int]) -> Callable[[Sequence[int]], bool]:
        owners = self._locate_atoms(atoms)
        ngroups = len(self.group_masks)

        def check(counts: Sequence[int]) -> bool:
            per_group = [0] * ngroups
            for owner, c in zip(owners, counts):
                per_group[owner] += c
            return self._counts_ok(per_group)

        return check


class BudgetSystem(FeasibilitySystem):
    """Weight caps: optionally per disjoint group, optionally global."""

    kind = "budget"

    def __init__(
        self,
        ids: Iterable[str],
        weights: dict[str, Fraction],
        groups: Optional[Sequence[tuple[Iterable[str], Fraction]]] = None,
        limit: Optional[Fraction] = None,
    ):
        super().__init__(ids)
        if groups is None and limit is None:
            raise ValidationError("bad-budget", "a budget system needs a global limit or group caps")
        self.weights = {}
        for cid in self.ids:
            w = weights.get(cid, Fraction(1))
            w = Fraction(w)
            if w <= 0:
                raise ValidationError("bad-weight", f"candidate {cid!r} must have positive weight, got {w}")
            self.weights[cid] = w
        self.limit = Fraction(limit) if limit is not None else None
        claimed: set[str] = set()
        self.group_defs: list[tuple[tuple[str, ...], Fraction]] = []
        for gids, cap in groups or ():
            gtuple = tuple(gids)
            for cid in gtuple:
                if cid not in self.index:
                    raise ValidationError("unknown-candidate", f"unknown candidate id {cid!r} in budget group")
                if cid in claimed:
                    raise ValidationError("overlapping-groups", f"candidate {cid!r} appears in two budget groups")
                claimed.add(cid)
            cap = Fraction(cap)
            if cap < 0:
                raise ValidationError("bad-budget", f"group cap must be nonnegative, got {cap}")
            self.group_defs.append((gtuple, cap))
        self.group_masks = [self.mask_of(g) for g, _ in self.group_defs]
        self.group_caps = [cap for _, cap in self.group_defs]
        self.weight_vec = [self.weights[cid] for cid in self.ids]

    def weight(self, cid: str) -> Fraction:
        w = self.weights.get(cid)
        if w is None:
            raise ValidationError("unknown-candidate", f"unknown candidate id {cid!r}")
        return w

    def contains_mask(self, mask: int) -> bool:
        if self.limit is not None:
            total = Fraction(0)
            for j in _bits(mask):
                total += self.weight_vec[j]
                if total > self.limit:
                    return False
        for gm, cap in zip(self.group_masks, self.group_caps):
            sub = mask & gm
            total = Fraction(0)
            for j in _bits(sub):
                total += self.weight_vec[j]
                if total > cap:
                    return False
        return True

    def base_atoms(self) -> list[int]:
        # split each group (and the ungrouped remainder) by weight value so
        # counts determine group weight sums exactly
        atoms: list[int] = []
        covered = 0
        for gm in self.group_masks:
            covered |= gm
        regions = list(self.group_masks)
        rest = self.full_mask & ~covered
        if rest:
            regions.append(rest)
        for region in regions:
            by_weight: dict[Fraction, int] = {}
            for j in _bits(region):
                by_weight.setdefault(self.weight_vec[j], 0)
                by_weight[self.weight_vec[j]] |= 1 << j
            for w in sorted(by_weight):
                atoms.append(by_weight[w])
        return atoms

    def counts_checker(self, atoms: Sequence[int]) -> Callable[[Sequence[int]], bool]:
        self._locate_atoms(atoms)
        per_atom: list[tuple[int, Fraction]] = []  # (group index or -1, weight)
        for a in atoms:
            j = next(_bits(a))
            w = self.weight_vec[j]
            owner = -1
            for gi, gm in enumerate(self.group_masks):
                if a & gm == a:
                    owner = gi
                    break
            for k in _bits(a):
                if self.weight_vec[k] != w:
                    raise ValidationError("bad-atoms", "atom mixes candidate weights; refine by base_atoms first")
            per_atom.append((owner, w))
        limit = self.limit
        caps = self.group_caps
        ngroups = len(caps)

        def check(counts: Sequence[int]) -> bool:
            group_tot = [Fraction(0)] * ngroups
            grand = Fraction(0)
            for (owner, w), c in zip(per_atom, counts):
                add = w * c
                grand += add
                if owner >= 0:
                    group_tot[owner] += add
            if limit is not None and grand > limit:
                return False
            return all(t <= cap for t, cap in zip(group_tot, caps))

        return check


class ExplicitSystem(FeasibilitySystem):
    """The downward closure of an explicit list of feasible sets."""

    kind = "explicit"

    def __init__(self, feasible_sets: Sequence[Iterable[str]], ids: Optional[Iterable[str]] = None,
                 cap: int = DEFAULT_CAP):
        listed = [frozenset(s) for s in feasible_sets]
        universe = set() if ids is None else set(ids)
        for s in listed:
            universe |= s
        super().__init__(universe)
        masks = {0}
        frontier = {self.mask_of(s) for s in listed}
        while frontier:
            nxt = set()
            for mask in frontier:
                if mask in masks:
                    continue
                masks.add(mask)
                if len(masks) > cap:
                    raise EnumerationCapExceeded(cap, "building the downward closure of an explicit system")
                for j in _bits(mask):
                    sub = mask & ~(1 << j)
                    if sub not in masks:
                        nxt.add(sub)
            frontier = nxt
        self.masks = frozenset(masks)

    def contains_mask(self, mask: int) -> bool:
        return mask in self.masks


class RankingSystem(FeasibilitySystem):
    """Pairwise-choice candidates ``a>b`` completable to a strict total order.

    A set of choices is feasible iff it is asymmetric (never both ``a>b`` and
    ``b>a``) and acyclic, which is exactly when it extends to a complete
    transitive order on the items.
    """

    kind = "ranking"

    def __init__(self, items: Sequence[str]):
        items = list(items)
        if len(items) < 2:
            raise ValidationError("bad-items", "a ranking system needs at least two items")
        if len(set(items)) != len(items):
            raise ValidationError("duplicate-id", "ranking items must be distinct")
        ids = [f"{a}>{b}" for a in items for b in items if a != b]
        super().__init__(ids, notes=(NORMALIZATION_NOTE,))
        self.items = tuple(items)
        self._edges: list[tuple[int, int]] = []
        item_index = {x: i for i, x in enumerate(items)}
        for cid in self.ids:
            a, b = cid.split(">", 1)
            self._edges.append((item_index[a], item_index[b]))

    def contains_mask(self, mask: int) -> bool:
        succ: dict[int, list[int]] = {}
        seen_pairs = set()
        for j in _bits(mask):
            a, b = self._edges[j]
            if (b, a) in seen_pairs:
                return False
            seen_pairs.add((a, b))
            succ.setdefault(a, []).append(b)
        # cycle check over the chosen edges
        state: dict[int, int] = {}

        def dfs(u: int) -> bool:
            state[u] = 1
            for v in succ.get(u, ()):
                s = state.get(v, 0)
                if s == 1:
                    return False
                if s == 0 and not dfs(v):
                    return False
            state[u] = 2
            return True

        for u in list(succ):
            if state.get(u, 0) == 0 and not dfs(u):
                return False
        return True


class NegativeVotesSystem(FeasibilitySystem):
    """Base candidates plus explicit rejection markers ``~c``.

    Feasible sets never pair a candidate with its rejection, keep at most ``k``
    base candidates, and stay completable to exactly ``k`` selections (every
    rejection removes one base candidate from the pool).
    """

    kind = "negative-votes"

    def __init__(self, base: Sequence[str], k: int):
        base = list(base)
        if len(set(base)) != len(base):
            raise ValidationError("duplicate-id", "base candidates must be distinct")
        for cid in base:
            if cid.startswith("~"):
                raise ValidationError("bad-candidate-id", "base candidate ids must not start with '~'")
        ids = list(base) + [f"~{c}" for c in base]
        super().__init__(ids, notes=(NORMALIZATION_NOTE,))
        if not isinstance(k, int) or not (1 <= k <= len(base)):
            raise ValidationError("non-positive-k", f"need 1 <= k <= {len(base)}, got {k!r}")
        self.k = k
        self.base = tuple(base)
        self.base_mask = self.mask_of(base)
        self._partner = {}
        for c in base:
            self._partner[self.index[c]] = self.index[f"~{c}"]
            self._partner[self.index[f"~{c}"]] = self.index[c]

    def contains_mask(self, mask: int) -> bool:
        bars = 0
        for j in _bits(mask):
            if mask >> self._partner[j] & 1:
                return False
            if not (self.base_mask >> j & 1):
                bars += 1
        reals = _popcount(mask & self.base_mask)
        return reals <= self.k <= len(self.base) - bars


class JudgmentSystem(FeasibilitySystem):
    """Truth-value candidates ``x=T``/``x=F`` under propositional constraints.

    ``clauses`` is a CNF list of literal lists; a literal is a variable name,
    optionally prefixed with ``~`` for negation. A set of truth-value choices
    is feasible iff it assigns no variable twice and extends to a complete
    assignment satisfying every clause.
    """

    kind = "judgment"

    def __init__(self, variables: Sequence[str], clauses: Sequence[Sequence[str]]):
        variables = list(variables)
        if len(set(variables)) != len(variables):
            raise ValidationError("duplicate-id", "judgment variables must be distinct")
        if len(variables) > 20:
            raise ValidationError("too-many-variables", "judgment systems support at most 20 variables")
        ids = [f"{x}=T" for x in variables] + [f"{x}=F" for x in variables]
        super().__init__(ids, notes=(NORMALIZATION_NOTE,))
        self.variables = tuple(variables)
        var_index = {x: i for i, x in enumerate(variables)}
        self.clauses: list[tuple[tuple[int, bool], ...]] = []
        for clause in clauses:
            lits = []
            for lit in clause:
                neg = lit.startswith("~")
                name = lit[1:] if neg else lit
                if name not in var_index:
                    raise ValidationError("unknown-variable", f"clause uses undeclared variable {name!r}")
                lits.append((var_index[name], not neg))
            if not lits:
                raise ValidationError("bad-clause", "empty clause is unsatisfiable")
            self.clauses.append(tuple(lits))
        self._var_of = {}
        self._val_of = {}
        for x in variables:
            self._var_of[self.index[f"{x}=T"]] = var_index[x]
            self._val_of[self.index[f"{x}=T"]] = True
            self._var_of[self.index[f"{x}=F"]] = var_index[x]
            self._val_of[self.index[f"{x}=F"]] = False
        self._memo: dict[int, bool] = {}
        if not self.contains_mask(0):
            raise ValidationError("unsatisfiable-clauses", "the clause set has no satisfying assignment")

    def contains_mask(self, mask: int) -> bool:
        cached = self._memo.get(mask)
        if cached is not None:
            return cached
        assignment: dict[int, bool] = {}
        ok = True
        for j in _bits(mask):
            var = self._var_of[j]
            val = self._val_of[j]
            if assignment.get(var, val) != val:
                ok = False
                break
            assignment[var] = val
        if ok:
            free = [i for i in range(len(self.variables)) if i not in assignment]

            def satisfiable(pos: int) -> bool:
                if pos == len(free):
                    return all(
                        any(assignment[v] == want for v, want in clause) for clause in self.clauses
                    )
                for val in (False, True):
                    assignment[free[pos]] = val
                    if satisfiable(pos + 1):
                        del assignment[free[pos]]
                        return True
                del assignment[free[pos]]
                return False

            ok = satisfiable(0)
        self._memo[mask] = ok
        return ok


# -- factory -----------------------------------------------------------------


def build_system(
    spec: dict,
    weights: Optional[dict[str, Fraction]] = None,
    universe: Optional[Sequence[str]] = None,
) -> FeasibilitySystem:
    """Build a system from a plain-dict description (the file format's shape).

    Kinds whose candidate universe is not implied by their parameters
    (committee, budget, explicit) take it from the spec's ``candidates``
    field, falling back to ``universe`` (the election's candidate list).
    """

    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValidationError("bad-constraints", "constraints must be an object with a 'kind'")

    def _ids(key: str = "candidates") -> Sequence[str]:
        ids = spec.get(key, universe)
        if ids is None:
            raise ValidationError(
                "bad-constraints", f"constraint kind {kind!r} needs a candidate list"
            )
        return ids

    kind = spec["kind"]
    if kind == "committee":
        return CommitteeSystem(_ids(), spec["k"])
    if kind == "public-decisions":
        return PublicDecisionsSystem([tuple(p) for p in spec["issues"]])
    if kind == "disjoint-attributes":
        groups = [(g["ids"], g["lower"], g["upper"]) for g in spec["groups"]]
        return DisjointAttributesSystem(spec["k"], groups)
    if kind == "budget":
        groups = [(g["ids"], Fraction(g["cap"])) for g in spec.get("groups", [])] or None
        limit = spec.get("limit")
        return BudgetSystem(_ids(), weights or {}, groups=groups,
                            limit=Fraction(limit) if limit is not None else None)
    if kind == "explicit":
        ids = spec.get("candidates", universe)
        return ExplicitSystem(spec["feasible"], ids=ids)
    if kind == "ranking":
        return RankingSystem(spec["items"])
    if kind == "negative-votes":
        return NegativeVotesSystem(spec["candidates"], spec["k"])
    if kind == "judgment":
        return JudgmentSystem(spec["variables"], spec["clauses"])
    raise ValidationError("bad-constraints", f"unknown constraint kind {kind!r}")


# -- enumeration ---------------------------------------------------------------


def _enumerate_masks(system: FeasibilitySystem, cap: int, max_size: Optional[int] = None) -> list[int]:
    """All feasible masks, in lexicographic order of sorted id tuples."""

    out: list[int] = []
    m = len(system.ids)
    contains = system.contains_mask

    def rec(mask: int, start: int, size: int) -> None:
        out.append(mask)
        if len(out) > cap:
            raise EnumerationCapExceeded(cap, "enumerating feasible sets")
        if max_size is not None and size >= max_size:
            return
        for j in range(start, m):
            nm = mask | (1 << j)
            if contains(nm):
                rec(nm, j + 1, size + 1)

    rec(0, 0, 0)
    return out


def enumerate_feasible(system: FeasibilitySystem, cap: int = DEFAULT_CAP) -> Iterator[frozenset[str]]:
    """Yield every feasible set, lexicographically by sorted id tuple."""

    for mask in _enumerate_masks(system, cap):
        yield system.set_of(mask)


def _maximal_masks(system: FeasibilitySystem, cap: int = DEFAULT_CAP) -> list[int]:
    contains = system.contains_mask
    out = []
    for mask in _enumerate_masks(system, cap):
        free = system.full_mask & ~mask
        if all(not contains(mask | (1 << j)) for j in _bits(free)):
            out.append(mask)
    return out


def enumerate_maximal(system: FeasibilitySystem, cap: int = DEFAULT_CAP) -> Iterator[frozenset[str]]:
    """Yield the inclusion-maximal feasible sets, in the same order."""

    for mask in _maximal_masks(system, cap):
        yield system.set_of(mask)


def refine_atoms(base: Sequence[int], extras: Sequence[int]) -> list[int]:
    """Split each base class by each extra mask; drops empty pieces."""

    atoms = list(base)
    for extra in extras:
        nxt: list[int] = []
        for a in atoms:
            inside = a & extra
            outside = a & ~extra
            if inside:
                nxt.append(inside)
            if outside:
                nxt.append(outside)
        atoms = nxt
    return sorted(atoms, key=lambda a: (a & -a).bit_length())


def enumerate_feasible_counts(
    system: FeasibilitySystem,
    classes: Sequence[int],
    cap: int = DEFAULT_CAP,
    max_total: Optional[int] = None,
) -> list[tuple[int, ...]]:
    """Feasible per-class count vectors for a count-capable system.

    ``classes`` must refine the system's structural partition, so that any two
    sets with equal per-class counts are either both feasible or both not.
    Vectors come back sorted by (total descending, vector ascending).
    """

    check = system.counts_checker(classes)
    sizes = [_popcount(a) for a in classes]
    out: list[tuple[int, ...]] = []
    vec = [0] * len(classes)

    def rec(pos: int, total: int) -> None:
        if pos == len(classes):
            out.append(tuple(vec))
            if len(out) > cap:
                raise EnumerationCapExceeded(cap, "enumerating feasible count vectors")
            return
        for c in range(sizes[pos] + 1):
            if max_total is not None and total + c > max_total:
                break
            vec[pos] = c
            if check(vec[: pos + 1] + [0] * (len(classes) - pos - 1)):
                rec(pos + 1, total + c)
        vec[pos] = 0

    rec(0, 0)
    out.sort(key=lambda v: (-sum(v), v))
    return out


def representative_mask(classes: Sequence[int], counts: Sequence[int]) -> int:
    """Canonical member of a count class: lowest bits of each class."""

    mask = 0
    for a, c in zip(classes, counts):
        rem = a
        for _ in range(c):
            low = rem & -rem
            mask |= low
            rem ^= low
    return mask


# -- matroid structure --------------------------------------------------------


@dataclass(frozen=True)
class MatroidWitness:
    """Feasible X, Y with |X| < |Y| and no member of Y∖X addable to X."""

    smaller: frozenset[str]
    larger: frozenset[str]

    def holds_in(self, system: FeasibilitySystem) -> bool:
        x = system.mask_of(self.smaller)
        y = system.mask_of(self.larger)
        if not (system.contains_mask(x) and system.contains_mask(y)):
            return False
        if _popcount(x) >= _popcount(y):
            return False
        return all(not system.contains_mask(x | (1 << j)) for j in _bits(y & ~x))


def check_exchange_property(
    system: FeasibilitySystem, cap: int = DEFAULT_CAP
) -> Optional[MatroidWitness]:
    """Search for an exchange-property violation; ``None`` means matroid.

    The witness returned is the first under (|X| asc, X lex, |Y| asc, Y lex),
    with sets ordered lexicographically by their sorted id tuples.
    """

    masks = _enumerate_masks(system, cap)
    by_size: dict[int, list[int]] = {}
    for mask in masks:
        by_size.setdefault(_popcount(mask), []).append(mask)
    contains = system.contains_mask
    max_size = max(by_size)
    for sx in range(0, max_size):
        for x in by_size.get(sx, ()):
            for sy in range(sx + 1, max_size + 1):
                for y in by_size.get(sy, ()):
                    diff = y & ~x
                    if any(contains(x | (1 << j)) for j in _bits(diff)):
                        continue
                    return MatroidWitness(system.set_of(x), system.set_of(y))
    return None


def one_swap(
    system: FeasibilitySystem,
    selected: Iterable[str],
    removable: Iterable[str],
    incoming: str,
) -> str:
    """Single-candidate repair step available in matroidal systems.

    Given feasible ``selected``, a subset ``removable`` of it, and an outside
    candidate ``incoming`` such that dropping all of ``removable`` makes room
    for ``incoming``, return the first removable candidate (by id) whose lone
    removal already makes room. Raises if no such candidate exists, which
    certifies the system is not a matroid.
    """

    w = system.mask_of(selected)
    r = system.mask_of(removable)
    c = system.mask_of([incoming])
    if not system.contains_mask(w):
        raise ValidationError("infeasible-set", "selected set is not feasible")
    if r & ~w:
        raise ValidationError("bad-swap", "removable candidates must be selected")
    if c & w:
        raise ValidationError("bad-swap", "incoming candidate is already selected")
    if not system.contains_mask((w & ~r) | c):
        raise ValidationError("bad-swap", "dropping the removable set must make the incoming candidate fit")
    for j in _bits(r):
        if system.contains_mask((w & ~(1 << j)) | c):
            return system.ids[j]
    raise NotAMatroidError(
        "no single swap admits the incoming candidate; the system violates the exchange property"
    )
