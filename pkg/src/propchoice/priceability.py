"""Stable price systems: verification, exact payment solving, and search.

A price system endows every voter with one unit of virtual money, assigns
every candidate a positive price, and records per-voter payments.  An
outcome is stably priceable when payments go only to selected candidates
the payer approves (SP1) and cover each selected candidate's price exactly
(SP2), no outside candidate's supporters could jointly afford it using
each one's best alternative — her leftover money or her single largest
payment (SP3) — and the outcome maximizes total price among feasible sets
(SP4), or, in the exhaustive variant, simply admits no feasible addition.
The approval half of SP1 is load-bearing: without it a voter's budget can
leak to candidates she does not want, and the representation guarantees
below break down.  The SP3 sum ranges over supporters who could strictly
gain in some feasible set containing the candidate: under constraints a
voter's approvals can be saturated by every feasible set that includes it,
and such a voter has nothing to bid for.

Payment solving is an exact rational LP.  The SP3 maximum is encoded with
one auxiliary variable per voter bounding her leftover and all of her
payments from above; the encoding is exact because the auxiliary only
needs to be at least the true maximum and appears with nonnegative
coefficients on the small side of every remaining constraint.  Voters with
identical ballots and candidates that are interchangeable for pricing are
merged before solving; averaging any solution over such an orbit yields a
symmetric solution, so the merge loses nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .axioms import _typed_groups, max_weighted_claim
from .constraints import (
    DEFAULT_CAP,
    _bits,
    _maximal_masks,
    _popcount,
    enumerate_feasible_counts,
    refine_atoms,
)
from .errors import EnumerationCapExceeded, ValidationError
from .model import Election
from .simplex import LinearProgram, lp_solve

VERIFY_MODES = ("sp4-producer", "exhaustive")
PAYMENT_MODES = ("given", "uniform", "proportional")
SEARCH_MODES = ("uniform", "general", "exhaustive")


@dataclass(frozen=True)
class PriceSystem:
    """Positive per-candidate prices plus per-(voter, candidate) payments.

    ``payments`` may omit zero entries.  Every voter's payments must stay
    within her unit budget; the slack is her leftover money.
    """

    prices: dict[str, Fraction]
    payments: dict[tuple[str, str], Fraction]

    def spend(self, voter: str) -> Fraction:
        return sum(
            (v for (i, _c), v in self.payments.items() if i == voter), Fraction(0)
        )


@dataclass(frozen=True)
class SpReport:
    """Per-condition verdicts; ``sp4`` means exhaustiveness in that mode."""

    ok: bool
    mode: str
    conditions: dict[str, bool]
    details: dict[str, str] = field(default_factory=dict)
    stats: dict = field(compare=False, default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _validate_price_system(e: Election, ps: PriceSystem) -> None:
    known = set(e.system.ids)
    if set(ps.prices) != known:
        raise ValidationError("bad-prices", "prices must cover exactly the candidates")
    for cid, price in ps.prices.items():
        if price <= 0:
            raise ValidationError("bad-prices", f"price of {cid!r} is not positive")
    voters = set(e.voter_ids)
    spend = {vid: Fraction(0) for vid in voters}
    for (vid, cid), value in ps.payments.items():
        if vid not in voters:
            raise ValidationError("bad-payments", f"unknown voter {vid!r}")
        if cid not in known:
            raise ValidationError("bad-payments", f"unknown candidate {cid!r}")
        if value < 0:
            raise ValidationError("bad-payments", f"negative payment by {vid!r}")
        spend[vid] += value
    for vid, total in spend.items():
        if total > 1:
            raise ValidationError(
                "bad-payments", f"voter {vid!r} spends beyond the unit budget"
            )


def _sp4_best_total(
    e: Election, prices: dict[str, Fraction], cap: int
) -> tuple[Fraction, str]:
    """Largest total price over maximal feasible sets, with a witness."""

    system = e.system
    atoms = system.base_atoms()
    if atoms is not None:
        # split each structural class by price, so per-class counts
        # determine both feasibility and total price
        pieces: list[int] = []
        for a in atoms:
            by_price: dict[Fraction, int] = {}
            for j in _bits(a):
                p = prices[system.ids[j]]
                by_price[p] = by_price.get(p, 0) | (1 << j)
            pieces.extend(by_price.values())
        classes = sorted(pieces, key=lambda x: (x & -x).bit_length())
        unit = [prices[system.ids[next(_bits(c))]] for c in classes]
        checker = system.counts_checker(classes)
        sizes = [_popcount(c) for c in classes]
        best: Optional[Fraction] = None
        witness = ""
        for vec in enumerate_feasible_counts(system, classes, cap):
            maximal = True
            for pos in range(len(classes)):
                if vec[pos] < sizes[pos]:
                    bumped = list(vec)
                    bumped[pos] += 1
                    if checker(bumped):
                        maximal = False
                        break
            if not maximal:
                continue
            total = sum((c * unit[pos] for pos, c in enumerate(vec)), Fraction(0))
            if best is None or total > best:
                best, witness = total, f"count vector {vec}"
        if best is None:  # unreachable: the empty vector is feasible
            best, witness = Fraction(0), "empty set"
        return best, witness
    best = Fraction(0)
    witness = "empty set"
    for mask in _maximal_masks(system, cap):
        total = sum((prices[cid] for cid in system.sorted_ids(mask)), Fraction(0))
        if total > best:
            best, witness = total, f"set {sorted(system.sorted_ids(mask))}"
    return best, witness


def _best_utility_with(e: Election, ballot_mask: int, j: int, cap: int) -> Optional[int]:
    """Best approval coverage over feasible sets forced to contain candidate j.

    Returns None when no feasible set contains the candidate at all.  Used
    to decide whether a supporter of an unselected candidate could actually
    end up strictly better off in some feasible selection that includes it;
    a supporter who cannot has no reason to redirect money, so she does not
    count toward the SP3 affordability sum.
    """

    system = e.system
    bit = 1 << j
    if not system.contains_mask(bit):
        return None
    atoms = system.base_atoms()
    if atoms is not None:
        classes = refine_atoms(atoms, [ballot_mask, bit])
        check = system.counts_checker(classes)
        sizes = [_popcount(a) for a in classes]
        cpos = next(p for p, a in enumerate(classes) if a == bit)
        inball = [bool(a & ballot_mask) for a in classes]
        vec = [0] * len(classes)
        vec[cpos] = 1
        if not check(list(vec)):
            return None
        order = [p for p in range(len(classes)) if p != cpos]
        order.sort(key=lambda p: (not inball[p], -sizes[p]))
        suffix = [0] * (len(order) + 1)
        for x in range(len(order) - 1, -1, -1):
            p = order[x]
            suffix[x] = suffix[x + 1] + (sizes[p] if inball[p] else 0)
        best = -1

        def recc(x: int, val: int) -> None:
            nonlocal best
            if val > best:
                best = val
            if x == len(order) or val + suffix[x] <= best:
                return
            p = order[x]
            for c in range(sizes[p], -1, -1):
                vec[p] = c
                if check(list(vec)):
                    recc(x + 1, val + (c if inball[p] else 0))
            vec[p] = 0

        recc(0, 1 if inball[cpos] else 0)
        return best

    best = _popcount(bit & ballot_mask)
    visited = 0

    def rec(mask: int, start: int, val: int) -> None:
        nonlocal best, visited
        if val > best:
            best = val
        for nj in range(start, e.m):
            if mask >> nj & 1:
                continue
            nxt = mask | (1 << nj)
            if not system.contains_mask(nxt):
                continue
            visited += 1
            if visited > cap:
                raise EnumerationCapExceeded(
                    cap, "enumerating feasible sets around a candidate"
                )
            rec(nxt, nj + 1, val + (ballot_mask >> nj & 1))

    rec(bit, 0, best)
    return best


def verify_sp(
    e: Election,
    outcome: Iterable[str],
    ps: PriceSystem,
    mode: str = "sp4-producer",
    cap: int = DEFAULT_CAP,
) -> SpReport:
    """Check SP1-SP4 for a concrete price system.

    The SP3 sum counts only supporters of the unselected candidate who
    could strictly improve their coverage in some feasible set containing
    it; a voter whose approvals are already saturated by every such set
    would gain nothing from a deviation and exerts no pressure.  Payment
    solving (:func:`find_payments`, the searches) enforces the sum over
    all supporters, which is stricter, so everything it emits passes here.

    ``sp4-producer`` compares the selection's total price against every
    maximal feasible set (via count vectors when the constraint structure
    allows, else explicit enumeration); ``exhaustive`` instead demands
    that no single candidate can be added feasibly.
    """

    if mode not in VERIFY_MODES:
        raise ValidationError("bad-mode", f"unknown verify_sp mode {mode!r}")
    system = e.system
    wmask = system.mask_of(outcome)
    if not system.contains_mask(wmask):
        raise ValidationError("infeasible-outcome", "outcome is not feasible")
    _validate_price_system(e, ps)
    selected = set(system.sorted_ids(wmask))
    conditions: dict[str, bool] = {}
    details: dict[str, str] = {}

    sp1 = True
    for (vid, cid), value in sorted(ps.payments.items()):
        if value == 0:
            continue
        if cid not in selected:
            sp1 = False
            details["sp1"] = f"{vid!r} pays unselected {cid!r}"
            break
        i = e.voter_index[vid]
        if not e.ballot_masks[i] >> system.index[cid] & 1:
            sp1 = False
            details["sp1"] = f"{vid!r} pays unapproved {cid!r}"
            break
    conditions["sp1"] = sp1

    received: dict[str, Fraction] = {cid: Fraction(0) for cid in selected}
    for (_vid, cid), value in ps.payments.items():
        if cid in received:
            received[cid] += value
    sp2 = True
    for cid in sorted(selected):
        if received[cid] != ps.prices[cid]:
            sp2 = False
            details["sp2"] = (
                f"payments for {cid!r} total {received[cid]}, "
                f"price is {ps.prices[cid]}"
            )
            break
    conditions["sp2"] = sp2

    spend = {vid: Fraction(0) for vid in e.voter_ids}
    best_pay = {vid: Fraction(0) for vid in e.voter_ids}
    for (vid, cid), value in ps.payments.items():
        spend[vid] += value
        if cid in selected and value > best_pay[vid]:
            best_pay[vid] = value
    sp3 = True
    gains: dict[tuple[int, int], bool] = {}
    for j in range(e.m):
        cid = system.ids[j]
        if cid in selected:
            continue
        lhs = Fraction(0)
        for i in _bits(e.supporter_masks[j]):
            ballot = e.ballot_masks[i]
            key = (ballot, j)
            if key not in gains:
                top = _best_utility_with(e, ballot, j, cap)
                gains[key] = top is not None and top > _popcount(ballot & wmask)
            if not gains[key]:
                continue
            vid = e.voter_ids[i]
            lhs += max(Fraction(1) - spend[vid], best_pay[vid])
        if lhs > ps.prices[cid]:
            sp3 = False
            details["sp3"] = (
                f"supporters of {cid!r} can jointly raise {lhs} > {ps.prices[cid]}"
            )
            break
    conditions["sp3"] = sp3

    if mode == "exhaustive":
        sp4 = True
        for j in range(e.m):
            if not wmask >> j & 1 and system.contains_mask(wmask | (1 << j)):
                sp4 = False
                details["sp4"] = f"{system.ids[j]!r} can still be added"
                break
        stats = {"sp4": "exhaustiveness"}
    else:
        total = sum((ps.prices[cid] for cid in selected), Fraction(0))
        best, witness = _sp4_best_total(e, ps.prices, cap)
        sp4 = total >= best
        if not sp4:
            details["sp4"] = f"{witness} has total price {best} > {total}"
        stats = {"sp4": "producer", "best_total": best}
    conditions["sp4"] = sp4

    ok = all(conditions.values())
    return SpReport(ok, mode, conditions, details, stats)


def _voter_type_partition(e: Election) -> list[tuple[int, list[int]]]:
    """(ballot mask, voter indices) per type, by first occurrence."""

    order: list[int] = []
    members: dict[int, list[int]] = {}
    for i in range(e.n):
        b = e.ballot_masks[i]
        if b not in members:
            members[b] = []
            order.append(b)
        members[b].append(i)
    return [(b, members[b]) for b in order]


def _price_key(
    e: Election, j: int, mode: str, prices: Optional[dict[str, Fraction]]
) -> object:
    if mode == "given":
        return prices[e.system.ids[j]]
    if mode == "proportional":
        return e.system.weight(e.system.ids[j])
    return 0


def find_payments(
    e: Election,
    outcome: Iterable[str],
    mode: str = "uniform",
    prices: Optional[dict[str, Fraction]] = None,
    cap: int = DEFAULT_CAP,
) -> Optional[PriceSystem]:
    """Solve for payments satisfying SP1-SP3, or None when impossible.

    Payment variables exist only for selected candidates the voter
    approves (SP1).  ``given`` takes the full price map as-is; ``uniform``
    introduces one common price and maximizes it; ``proportional`` prices
    each candidate at a common multiple of its weight and maximizes the
    multiple.  SP4 is not encoded here; callers pick outcomes (and verify)
    accordingly.  A selected candidate nobody approves makes SP2
    unsatisfiable at any positive price, so the result is None.
    """

    if mode not in PAYMENT_MODES:
        raise ValidationError("bad-mode", f"unknown payment mode {mode!r}")
    system = e.system
    wmask = system.mask_of(outcome)
    if not system.contains_mask(wmask):
        raise ValidationError("infeasible-outcome", "outcome is not feasible")
    if mode == "given":
        if prices is None:
            raise ValidationError("bad-prices", "given mode needs a price map")
        probe = PriceSystem(dict(prices), {})
        _validate_price_system(e, probe)
    elif prices is not None:
        raise ValidationError("bad-prices", f"{mode} mode computes its own prices")

    types = _voter_type_partition(e)
    T = len(types)
    counts = [len(ms) for _b, ms in types]

    sel = [j for j in range(e.m) if wmask >> j & 1]
    classes: dict[object, list[int]] = {}
    for j in sel:
        approvers = tuple(t for t, (b, _ms) in enumerate(types) if b >> j & 1)
        key = (_price_key(e, j, mode, prices), approvers)
        classes.setdefault(key, []).append(j)
    class_list = list(classes.items())
    K = len(class_list)

    unsel: dict[object, tuple[list[int], tuple[int, ...]]] = {}
    for j in range(e.m):
        if wmask >> j & 1:
            continue
        approvers = tuple(t for t, (b, _ms) in enumerate(types) if b >> j & 1)
        key = (_price_key(e, j, mode, prices), approvers)
        unsel.setdefault(key, ([], approvers))[0].append(j)

    # variables: q[(t, k)] (payment of one type-t voter to one class-k
    # candidate she approves), then m[t], then the price variable
    q: dict[tuple[int, int], int] = {}
    for k, ((_pkey, approvers), _members) in enumerate(class_list):
        for t in approvers:
            q[(t, k)] = len(q)
    m_at = len(q)
    pv = m_at + T
    n_vars = pv + (0 if mode == "given" else 1)
    rows: list[tuple[dict[int, Fraction], str, Fraction]] = []

    for k, ((pkey, approvers), _members) in enumerate(class_list):
        coeffs = {q[(t, k)]: Fraction(counts[t]) for t in approvers}
        if mode == "given":
            rows.append((coeffs, "==", Fraction(pkey)))
        elif mode == "uniform":
            coeffs[pv] = Fraction(-1)
            rows.append((coeffs, "==", Fraction(0)))
        else:
            coeffs[pv] = -Fraction(pkey)
            rows.append((coeffs, "==", Fraction(0)))
    for t in range(T):
        sizes = {
            q[(t, k)]: Fraction(len(members))
            for k, (_key, members) in enumerate(class_list)
            if (t, k) in q
        }
        rows.append((dict(sizes), "<=", Fraction(1)))
        low = dict(sizes)
        low[m_at + t] = Fraction(1)
        rows.append((low, ">=", Fraction(1)))
        for k in range(K):
            if (t, k) in q:
                rows.append(
                    ({m_at + t: Fraction(1), q[(t, k)]: Fraction(-1)}, ">=", Fraction(0))
                )
    for (pkey, approvers), (_members, _a) in sorted(
        unsel.items(), key=lambda kv: str(kv[0])
    ):
        coeffs = {m_at + t: Fraction(counts[t]) for t in approvers}
        if mode == "given":
            rows.append((coeffs, "<=", Fraction(pkey)))
        elif mode == "uniform":
            coeffs[pv] = Fraction(-1)
            rows.append((coeffs, "<=", Fraction(0)))
        else:
            coeffs[pv] = -Fraction(pkey)
            rows.append((coeffs, "<=", Fraction(0)))
    objective = None
    if mode != "given":
        min_w = min(
            (system.weight(cid) for cid in system.ids), default=Fraction(1)
        )
        bound = Fraction(e.n + 1) if mode == "uniform" else Fraction(e.n + 1) / min_w
        rows.append(({pv: Fraction(1)}, "<=", bound))
        objective = {pv: Fraction(1)}

    result = lp_solve(LinearProgram(n_vars, tuple(rows), objective))
    if result.status == "infeasible":
        return None
    if result.status != "optimal":  # defensive: price variables are capped
        raise ValidationError("bad-lp", "payment program reported unbounded")
    point = result.point
    if mode == "uniform":
        scale = point[pv]
        if scale <= 0:
            return None
        price_map = {cid: scale for cid in system.ids}
    elif mode == "proportional":
        scale = point[pv]
        if scale <= 0:
            return None
        price_map = {cid: scale * system.weight(cid) for cid in system.ids}
    else:
        price_map = dict(prices)

    payments: dict[tuple[str, str], Fraction] = {}
    for k, (_key, members) in enumerate(class_list):
        for t in range(T):
            idx = q.get((t, k))
            if idx is None:
                continue
            value = point[idx]
            if value:
                for i in types[t][1]:
                    for j in members:
                        payments[(e.voter_ids[i], system.ids[j])] = value
    return PriceSystem(price_map, payments)


def _search_general(
    e: Election, wmask: int, maximal: list[int]
) -> Optional[PriceSystem]:
    """Per-candidate prices for one outcome, with explicit SP4 rows.

    Maximizes the smallest price; a positive optimum certifies a price
    system with all-positive prices (prices scale the whole family of
    SP4/SP3 constraints jointly, so positivity is a genuine feasibility
    question, settled exactly by the auxiliary lower-bound variable).
    """

    system = e.system
    types = _voter_type_partition(e)
    T = len(types)
    counts = [len(ms) for _b, ms in types]
    sel = [j for j in range(e.m) if wmask >> j & 1]

    q: dict[tuple[int, int], int] = {}
    for s, j in enumerate(sel):
        for t, (b, _ms) in enumerate(types):
            if b >> j & 1:
                q[(t, s)] = len(q)
    m_at = len(q)
    pi_at = m_at + T
    tv = pi_at + e.m
    n_vars = tv + 1
    rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for s, j in enumerate(sel):
        coeffs = {
            q[(t, s)]: Fraction(counts[t]) for t in range(T) if (t, s) in q
        }
        coeffs[pi_at + j] = Fraction(-1)
        rows.append((coeffs, "==", Fraction(0)))
    for t in range(T):
        spend = {q[(t, s)]: Fraction(1) for s in range(len(sel)) if (t, s) in q}
        rows.append((dict(spend), "<=", Fraction(1)))
        low = dict(spend)
        low[m_at + t] = Fraction(1)
        rows.append((low, ">=", Fraction(1)))
        for s in range(len(sel)):
            if (t, s) in q:
                rows.append(
                    ({m_at + t: Fraction(1), q[(t, s)]: Fraction(-1)}, ">=", Fraction(0))
                )
    for j in range(e.m):
        if wmask >> j & 1:
            continue
        coeffs = {
            m_at + t: Fraction(counts[t])
            for t, (b, _ms) in enumerate(types)
            if b >> j & 1
        }
        coeffs[pi_at + j] = coeffs.get(pi_at + j, Fraction(0)) - Fraction(1)
        rows.append((coeffs, "<=", Fraction(0)))
    for other in maximal:
        if other == wmask:
            continue
        coeffs: dict[int, Fraction] = {}
        for j in _bits(other & ~wmask):
            coeffs[pi_at + j] = Fraction(1)
        for j in _bits(wmask & ~other):
            coeffs[pi_at + j] = Fraction(-1)
        if coeffs:
            rows.append((coeffs, "<=", Fraction(0)))
    for j in range(e.m):
        rows.append(({pi_at + j: Fraction(1), tv: Fraction(-1)}, ">=", Fraction(0)))
    rows.append(({tv: Fraction(1)}, "<=", Fraction(1)))

    result = lp_solve(LinearProgram(n_vars, tuple(rows), {tv: Fraction(1)}))
    if result.status != "optimal" or result.point[tv] <= 0:
        return None
    point = result.point
    price_map = {system.ids[j]: point[pi_at + j] for j in range(e.m)}
    payments: dict[tuple[str, str], Fraction] = {}
    for s, j in enumerate(sel):
        for t in range(T):
            idx = q.get((t, s))
            if idx is None:
                continue
            value = point[idx]
            if value:
                for i in types[t][1]:
                    payments[(e.voter_ids[i], system.ids[j])] = value
    return PriceSystem(price_map, payments)


def search_stable_priceable(
    e: Election,
    mode: str = "uniform",
    cap: int = DEFAULT_CAP,
) -> list[tuple[frozenset[str], PriceSystem]]:
    """All stable-priceable outcomes under the given pricing discipline.

    Positive prices force any stably priced outcome to be inclusion-maximal
    (an addable candidate would raise the total price), so the search runs
    over maximal feasible sets: ``uniform`` restricts to maximum-cardinality
    ones (a common price makes SP4 a cardinality comparison), ``general``
    solves per-candidate prices with explicit total-price comparisons, and
    ``exhaustive`` replaces SP4 by exhaustiveness with weight-proportional
    prices.  Every returned pair re-passes :func:`verify_sp`.
    """

    if mode not in SEARCH_MODES:
        raise ValidationError("bad-mode", f"unknown search mode {mode!r}")
    system = e.system
    maximal = _maximal_masks(system, cap)
    out: list[tuple[frozenset[str], PriceSystem]] = []
    if mode == "uniform":
        best = max((_popcount(w) for w in maximal), default=0)
        for w in maximal:
            if _popcount(w) != best:
                continue
            wset = system.set_of(w)
            ps = find_payments(e, wset, "uniform", cap=cap)
            if ps is not None and verify_sp(e, wset, ps, "sp4-producer", cap).ok:
                out.append((wset, ps))
    elif mode == "general":
        for w in maximal:
            wset = system.set_of(w)
            ps = _search_general(e, w, maximal)
            if ps is not None and verify_sp(e, wset, ps, "sp4-producer", cap).ok:
                out.append((wset, ps))
    else:
        for w in maximal:
            wset = system.set_of(w)
            ps = find_payments(e, wset, "proportional", cap=cap)
            if ps is not None and verify_sp(e, wset, ps, "exhaustive", cap).ok:
                out.append((wset, ps))
    return out


@dataclass(frozen=True)
class WeightedSpBoundReport:
    """Outcome of the weighted stable-priceability coverage bound check."""

    ok: bool
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok


def check_weighted_sp_bound(
    e: Election,
    outcome: Iterable[str],
    ps: PriceSystem,
    method: str = "auto",
    cap: int = DEFAULT_CAP,
) -> WeightedSpBoundReport:
    """Per-member winner coverage implied by weighted stable priceability.

    For every voter group with a valid weighted claim (alpha, beta), some
    member must individually approve at least ``beta * (n - |S|) / n``
    winners (not floored).  Assumes the price system already passed
    :func:`verify_sp` in exhaustive mode with proportional prices; this
    only re-checks the group bound.
    """

    system = e.system
    wmask = system.mask_of(outcome)
    if not system.contains_mask(wmask):
        raise ValidationError("infeasible-outcome", "outcome is not feasible")
    _validate_price_system(e, ps)
    n = e.n
    for members in _typed_groups(e, list(range(e.n))):
        ids = [e.voter_ids[i] for i in members]
        hit = max_weighted_claim(e, ids, method, cap)
        if hit is None:
            continue
        beta, alpha = hit
        bound = Fraction(beta * (n - len(members)), n)
        best = max(_popcount(e.ballot_masks[i] & wmask) for i in members)
        if best < bound:
            return WeightedSpBoundReport(
                False,
                {
                    "group": tuple(ids),
                    "alpha": alpha,
                    "beta": beta,
                    "bound": bound,
                    "best_coverage": best,
                },
            )
    return WeightedSpBoundReport(True)
