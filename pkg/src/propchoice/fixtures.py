"""Deterministic generators for reference constructions and random instances.

Each generator assembles an election whose interesting behaviour is forced by
exact arithmetic, self-validates the construction before emitting, and returns
a :class:`Fixture` carrying the election, reference artifacts (expected
outcomes, price systems, deserving groups), and provenance metadata echoing
the parameters.  Generators raise :class:`GeneratorRefusal` when the requested
parameters cannot support the construction's guarantees — they never emit an
instance whose advertised property they could not confirm.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Union

from .constraints import (
    DisjointAttributesSystem,
    ExplicitSystem,
    FeasibilitySystem,
    JudgmentSystem,
    MatroidWitness,
    NegativeVotesSystem,
    RankingSystem,
)
from .errors import GeneratorRefusal, ValidationError
from .model import Election, build_election
from .pav import pav_score
from .priceability import PriceSystem

__all__ = [
    "Fixture",
    "WitnessPreset",
    "witness_presets",
    "gen_pav_ejr_counterexample",
    "gen_phragmen_pjr_counterexample",
    "gen_weighted_phragmen_failure",
    "gen_sp_not_fjr",
    "gen_random",
    "FIXTURE_IDS",
    "build_fixture",
]


@dataclass(frozen=True)
class Fixture:
    """A generated election plus its reference artifacts and provenance.

    ``reference`` holds Python objects (expected outcomes as sorted id lists,
    a :class:`PriceSystem` where applicable, deserving groups and claims);
    ``provenance`` echoes the generator id and parameters.
    """

    election: Election
    reference: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)


def _require_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ValidationError(
            "bad-parameters", f"{name} must be an integer >= {minimum}, got {value!r}"
        )
    return value


def _weighted_candidates(system: FeasibilitySystem) -> list[tuple[str, Fraction]]:
    return [(cid, system.weight(cid)) for cid in system.ids]


# -- encoding witnesses --------------------------------------------------------


@dataclass(frozen=True)
class WitnessPreset:
    """A feasibility system together with an exchange-property violation."""

    name: str
    system: FeasibilitySystem
    smaller: frozenset[str]
    larger: frozenset[str]
    default_n: int


def witness_presets() -> dict[str, WitnessPreset]:
    """Named non-matroid systems with their canonical witness pairs.

    Each witness is a pair of feasible sets (X, Y) with ``|X| < |Y|`` such
    that no member of ``Y \\ X`` can be added to X feasibly.  The presets
    cover the explicit two-against-one family and the three structural
    encodings (rankings, vetoable seats, constrained truth assignments).
    """

    presets = {}

    explicit = ExplicitSystem([["x1"], ["y1", "y2"]])
    presets["pairs"] = WitnessPreset(
        "pairs", explicit, frozenset({"x1"}), frozenset({"y1", "y2"}), 12
    )

    ranking = RankingSystem(["c1", "c2", "c3"])
    presets["ranking"] = WitnessPreset(
        "ranking",
        ranking,
        frozenset({"c1>c2", "c2>c3"}),
        frozenset({"c2>c1", "c3>c2", "c3>c1"}),
        15,
    )

    negative = NegativeVotesSystem(["c1", "c2"], 1)
    presets["negative-votes"] = WitnessPreset(
        "negative-votes", negative, frozenset({"c1"}), frozenset({"~c1", "c2"}), 12
    )

    judgment = JudgmentSystem(["x", "y"], [["~x", "~y"]])
    presets["judgment"] = WitnessPreset(
        "judgment", judgment, frozenset({"x=T"}), frozenset({"x=F", "y=T"}), 12
    )

    return presets


def _validated_witness(
    system: FeasibilitySystem, smaller, larger
) -> MatroidWitness:
    witness = MatroidWitness(frozenset(smaller), frozenset(larger))
    if not witness.holds_in(system):
        raise GeneratorRefusal(
            "invalid-witness",
            "the pair is not an exchange-property violation of this system "
            "(need feasible X, Y with |X| < |Y| and no member of Y\\X addable to X)",
        )
    return witness


# -- proportionality counterexamples -------------------------------------------


def gen_pav_ejr_counterexample(
    system: FeasibilitySystem, smaller, larger, n: int
) -> Fixture:
    """Election on which the harmonic-scoring rule must short a deserving group.

    Given an exchange-property violation (X, Y) with ``l = |X|``, a block of
    ``floor(l*n/(l+1)) + 1`` voters approves exactly X and the remaining
    voters approve ``Y \\ X``.  The large block deserves l candidates (X
    itself answers the empty feasible set, and every nonempty one is excused
    by the block's population share), yet swapping one X-candidate for two
    from ``Y \\ X`` raises the harmonic score, so no optimal outcome contains
    all of X.  The generator verifies the score gap exactly and refuses with
    ``n-too-small`` when the electorate cannot force it.
    """

    witness = _validated_witness(system, smaller, larger)
    n = _require_int(n, "n", 2)
    x = witness.smaller
    rest = witness.larger - x
    ell = len(x)
    s1 = ell * n // (ell + 1) + 1
    s2 = n - s1
    if s2 < 1:
        raise GeneratorRefusal(
            "n-too-small", f"n={n} leaves no voters for the second block"
        )
    if len(rest) < 2:
        raise GeneratorRefusal(
            "invalid-witness",
            "the witness needs at least two addable-set candidates outside X",
        )
    swap = None
    for removed in sorted(x):  # a witness X is nonempty: downward closure seats singletons
        kept = x - {removed}
        for c1, c2 in combinations(sorted(rest), 2):
            candidate_set = kept | {c1, c2}
            if system.is_feasible(candidate_set):
                swap = candidate_set
                break
        if swap is not None:
            break
    if swap is None:
        raise GeneratorRefusal(
            "invalid-witness", "no feasible one-for-two swap exists for this witness"
        )

    voters = [(f"v{i}", sorted(x)) for i in range(1, s1 + 1)]
    voters += [(f"v{i}", sorted(rest)) for i in range(s1 + 1, n + 1)]
    e = build_election(_weighted_candidates(system), voters, system)

    score_x = pav_score(e, x)
    score_swap = pav_score(e, swap)
    gap = score_swap - score_x
    if gap <= 0:
        raise GeneratorRefusal(
            "n-too-small",
            f"n={n} gives the swap no strict score advantage (gap {gap})",
        )
    return Fixture(
        election=e,
        reference={
            "deserving": [f"v{i}" for i in range(1, s1 + 1)],
            "ell": ell,
            "pool": sorted(x),
            "swap": sorted(swap),
            "score_gap": gap,
        },
        provenance={
            "fixture": "pav-ejr-cex",
            "parameters": {
                "smaller": sorted(x),
                "larger": sorted(witness.larger),
                "ell": ell,
                "n": n,
                "s1": s1,
                "s2": s2,
            },
        },
    )


def gen_phragmen_pjr_counterexample(
    system: FeasibilitySystem, smaller, larger, n: int
) -> Fixture:
    """Election where sequential spending must leave a deserving group uncovered.

    Given an exchange-property violation (X, Y) with ``l = |Y|``: every voter
    approves X, and a block S of ``floor(l*n/(l+1)) + 1`` voters additionally
    approves Y.  S deserves l candidates — Y itself answers the empty feasible
    set and S's share excuses every nonempty one — but the spending process
    buys X first (universal support) and the witness property blocks every
    Y-candidate afterwards.
    """

    witness = _validated_witness(system, smaller, larger)
    n = _require_int(n, "n", 2)
    x = witness.smaller
    y = witness.larger
    ell = len(y)
    s = ell * n // (ell + 1) + 1
    voters = [(f"v{i}", sorted(x | y)) for i in range(1, s + 1)]
    voters += [(f"v{i}", sorted(x)) for i in range(s + 1, n + 1)]
    e = build_election(_weighted_candidates(system), voters, system)
    return Fixture(
        election=e,
        reference={
            "deserving": [f"v{i}" for i in range(1, s + 1)],
            "ell": ell,
            "pool": sorted(y),
        },
        provenance={
            "fixture": "phragmen-pjr-cex",
            "parameters": {
                "smaller": sorted(x),
                "larger": sorted(y),
                "ell": ell,
                "n": n,
                "s": s,
            },
        },
    )


def gen_weighted_phragmen_failure(g: int, eps: Union[Fraction, str, int] = Fraction(1, 100)) -> Fixture:
    """Weighted election where sequential spending shorts a strongly cohesive bloc.

    ``g`` groups each hold one heavy candidate (weight ``2 + eps``) and three
    unit candidates, under a per-group weight cap of 3 — so a group yields
    either its heavy candidate or up to three units.  Everyone approves the
    heavy candidates; a bloc S of just under ``n/(2+eps)`` voters (the largest
    size that still buys every heavy candidate first) additionally approves
    all units.  The spending process picks exactly the ``g`` heavy candidates,
    blocking every unit, while S is (beta, beta)-strongly cohesive for the
    largest ``beta`` satisfying the population-share escape — certified
    exactly via the group-symmetry reduction: a feasible set admits a
    beta-unit answer iff at least ``ceil(beta/3)`` groups are free of heavy
    candidates, and the cheapest set denying that consists of
    ``g - ceil(beta/3) + 1`` heavy candidates.  The generator refuses unless
    ``beta > g``, i.e. unless the certified claim strictly exceeds the
    delivered coverage.
    """

    g = _require_int(g, "g", 1)
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValidationError("bad-parameters", f"eps must lie strictly in (0, 1), got {eps}")
    n = 10 * g
    heavy = 2 + eps
    s = int(Fraction(n) / heavy)
    if Fraction(s) * heavy == n:
        s -= 1  # the bloc must afford units strictly slower than the crowd affords heavies
    if s < 1:
        raise GeneratorRefusal("g-too-small", f"g={g} leaves no room for the bloc")

    beta_star: Optional[int] = None
    for beta in range(3 * g, g, -1):
        freed = -(-beta // 3)  # groups the unit answer needs untouched
        a_star = g - freed + 1
        if a_star < 1:
            continue
        if Fraction(s, n) > Fraction(beta, 1) / (a_star * heavy + beta):
            beta_star = beta
            break
    if beta_star is None:
        raise GeneratorRefusal(
            "g-too-small",
            f"g={g} certifies no strong-cohesiveness claim beyond the {g} delivered seats",
        )

    candidates: list[tuple[str, Fraction]] = []
    groups = []
    heavies = []
    units = []
    for i in range(1, g + 1):
        gids = [f"a{i}", f"b{i}", f"c{i}", f"d{i}"]
        candidates.append((f"a{i}", heavy))
        heavies.append(f"a{i}")
        for uid in gids[1:]:
            candidates.append((uid, Fraction(1)))
            units.append(uid)
        groups.append({"ids": gids, "cap": 3})
    everything = heavies + units
    voters = [(f"s{i}", everything) for i in range(1, s + 1)]
    voters += [(f"t{i}", list(heavies)) for i in range(1, n - s + 1)]
    e = build_election(
        candidates, voters, {"kind": "budget", "groups": groups}
    )
    return Fixture(
        election=e,
        reference={
            "expected_outcome": sorted(heavies),
            "deserving": [f"s{i}" for i in range(1, s + 1)],
            "claim": {"alpha": Fraction(beta_star), "beta": beta_star},
        },
        provenance={
            "fixture": "weighted-phragmen-failure",
            "parameters": {"g": g, "eps": str(eps), "n": n, "s": s, "beta": beta_star},
        },
    )


def gen_sp_not_fjr(n: int = 30) -> Fixture:
    """Stably priced committee that still shorts a cohesive two-voter bloc.

    Two attribute groups (41 and 50 candidates, at most 40 seats each, 80
    seats total).  A 3n/5 crowd approves all of group one, an n/3 crowd
    approves all of group two, and a small bloc of n/15 voters approves five
    group-one candidates ``a1..a5`` plus — half each — five group-two
    candidates ``b1..b5`` or ``e1..e5``.  The reference outcome seats four of
    the five a-candidates plus the crowds' filler candidates, priced n/60 in
    group one and n/120 in group two, with payments that balance every seated
    candidate's price exactly.  The bloc can jointly afford five candidates
    yet every member ends with four — the price system is stable while the
    adaptive cohesiveness audit reports the bloc with a five-candidate claim.
    """

    if not isinstance(n, int) or isinstance(n, bool) or n <= 0 or n % 30:
        raise GeneratorRefusal(
            "bad-n", f"n must be a positive multiple of 30, got {n!r}"
        )
    a = [f"a{j}" for j in range(1, 6)]
    o = [f"o{j}" for j in range(1, 37)]
    b = [f"b{j}" for j in range(1, 6)]
    ee = [f"e{j}" for j in range(1, 6)]
    cc = [f"c{j}" for j in range(1, 41)]
    group1 = a + o
    group2 = b + ee + cc
    system = DisjointAttributesSystem(
        80, [(group1, 0, 40), (group2, 0, 40)]
    )

    v1 = [f"x{i}" for i in range(1, 3 * n // 5 + 1)]
    v2 = [f"y{i}" for i in range(1, n // 3 + 1)]
    sb = [f"sb{i}" for i in range(1, n // 30 + 1)]
    se = [f"se{i}" for i in range(1, n // 30 + 1)]
    voters = [(vid, group1) for vid in v1]
    voters += [(vid, group2) for vid in v2]
    voters += [(vid, a + b) for vid in sb]
    voters += [(vid, a + ee) for vid in se]
    e = build_election(group1 + group2, voters, system)

    outcome = frozenset(a[:4] + o + cc)
    price1 = Fraction(n, 60)
    price2 = Fraction(n, 120)
    prices = {cid: price1 for cid in group1}
    prices.update({cid: price2 for cid in group2})
    payments: dict[tuple[str, str], Fraction] = {}
    for vid in v1:
        for cid in o:
            payments[(vid, cid)] = Fraction(1, 36)
    for vid in v2:
        for cid in cc:
            payments[(vid, cid)] = Fraction(1, 40)
    for vid in sb + se:
        for cid in a[:4]:
            payments[(vid, cid)] = Fraction(1, 4)
    ps = PriceSystem(prices=prices, payments=payments)

    # exact self-check: every seated candidate's price is covered to the penny
    # and no voter overspends her unit budget
    covered: dict[str, Fraction] = {}
    spent: dict[str, Fraction] = {}
    for (vid, cid), val in payments.items():
        covered[cid] = covered.get(cid, Fraction(0)) + val
        spent[vid] = spent.get(vid, Fraction(0)) + val
    assert all(covered.get(cid, Fraction(0)) == prices[cid] for cid in outcome if cid in covered)
    assert set(covered) <= set(outcome)
    assert all(v <= 1 for v in spent.values())
    assert e.system.is_feasible(outcome) and len(outcome) == 80

    return Fixture(
        election=e,
        reference={
            "outcome": outcome,
            "price_system": ps,
            "fjr_claim": {"group": sb + se, "beta": 5},
        },
        provenance={
            "fixture": "sp-not-fjr",
            "parameters": {
                "n": n,
                "crowd1": len(v1),
                "crowd2": len(v2),
                "bloc": len(sb) + len(se),
            },
        },
    )


# -- random instances ----------------------------------------------------------

RANDOM_FAMILIES = (
    "committee",
    "public-decisions",
    "disjoint-attributes",
    "budget",
    "explicit",
)


def gen_random(params: dict, seed: int) -> Fixture:
    """Seeded impartial-culture instance; the same seed reproduces it exactly.

    ``params`` carries ``family`` (one of :data:`RANDOM_FAMILIES`), ``n``,
    ``m`` (or ``issues`` for public decisions), optional ``k`` and ``density``
    (approval probability, default 1/2).  Quota and cap parameters not given
    are drawn from the seeded generator in ranges that keep the instance
    satisfiable by construction.
    """

    if not isinstance(params, dict):
        raise ValidationError("bad-parameters", "params must be a dict")
    family = params.get("family", "committee")
    if family not in RANDOM_FAMILIES:
        raise ValidationError(
            "bad-parameters", f"unknown family {family!r}; pick one of {RANDOM_FAMILIES}"
        )
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValidationError("bad-parameters", f"seed must be an integer, got {seed!r}")
    n = _require_int(params.get("n", 4), "n")
    density = params.get("density", Fraction(1, 2))
    if isinstance(density, float):
        raise ValidationError("bad-parameters", "density must be an exact rational, not a float")
    try:
        density = Fraction(density)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ValidationError("bad-parameters", f"cannot read density {density!r} as a rational") from None
    if not 0 < density <= 1:
        raise ValidationError("bad-parameters", f"density must lie in (0, 1], got {density}")
    rng = random.Random(seed)

    def ballots(cands: Sequence[str]) -> list[tuple[str, list[str]]]:
        return [
            (f"v{i}", [c for c in cands if rng.random() < density])
            for i in range(1, n + 1)
        ]

    weights: Optional[list[Fraction]] = None
    if family == "committee":
        m = _require_int(params.get("m", 4), "m")
        cands = [f"c{j}" for j in range(1, m + 1)]
        k = params.get("k")
        k = rng.randint(1, m) if k is None else _require_int(k, "k")
        if k > m:
            raise ValidationError("bad-parameters", f"k={k} exceeds m={m}")
        spec = {"kind": "committee", "k": k, "candidates": cands}
    elif family == "public-decisions":
        p = _require_int(params.get("issues", params.get("m", 2)), "issues")
        issues = [[f"i{t}y", f"i{t}n"] for t in range(1, p + 1)]
        cands = [c for pair in issues for c in pair]
        spec = {"kind": "public-decisions", "issues": issues}
    elif family == "disjoint-attributes":
        m = _require_int(params.get("m", 4), "m")
        if m < 2:
            raise ValidationError("bad-parameters", "disjoint-attributes needs m >= 2")
        cands = [f"c{j}" for j in range(1, m + 1)]
        m1 = rng.randint(1, m - 1)
        u1 = rng.randint(1, m1)
        u2 = rng.randint(1, m - m1)
        l1 = rng.randint(0, min(1, u1))
        l2 = rng.randint(0, min(1, u2))
        k = rng.randint(max(1, l1 + l2), u1 + u2)
        spec = {
            "kind": "disjoint-attributes",
            "k": k,
            "groups": [
                {"ids": cands[:m1], "lower": l1, "upper": u1},
                {"ids": cands[m1:], "lower": l2, "upper": u2},
            ],
        }
    elif family == "budget":
        m = _require_int(params.get("m", 4), "m")
        cands = [f"c{j}" for j in range(1, m + 1)]
        weights = [rng.choice([Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3)]) for _ in cands]
        total = sum(weights, Fraction(0))
        limit = max(min(weights), total / 2)
        spec = {"kind": "budget", "limit": str(limit), "candidates": cands}
    else:  # explicit
        m = _require_int(params.get("m", 4), "m")
        if m > 12:
            raise ValidationError("bad-parameters", "explicit family supports m <= 12")
        cands = [f"c{j}" for j in range(1, m + 1)]
        tops = []
        for _ in range(rng.randint(1, 3)):
            top = [c for c in cands if rng.random() < 0.5]
            if not top:
                top = [rng.choice(cands)]
            tops.append(top)
        spec = {"kind": "explicit", "feasible": tops, "candidates": cands}

    cand_arg: Sequence = cands if weights is None else list(zip(cands, weights))
    e = build_election(cand_arg, ballots(cands), spec)
    return Fixture(
        election=e,
        reference={},
        provenance={
            "fixture": "random",
            "parameters": {"family": family, "n": n, "density": density,
                           "seed": seed, "constraints": spec},
        },
    )


# -- catalog ---------------------------------------------------------------------

FIXTURE_IDS = (
    "pav-ejr-cex",
    "phragmen-pjr-cex",
    "weighted-phragmen-failure",
    "sp-not-fjr",
    "random",
)


def build_fixture(fixture_id: str, params: Optional[dict] = None) -> Fixture:
    """Build a catalog fixture by id with plain-typed parameters.

    The witness-based fixtures accept ``witness`` (a :func:`witness_presets`
    name, default ``pairs``) and ``n``; the weighted failure takes ``g`` and
    ``eps``; the priced committee takes ``n``; ``random`` forwards ``params``
    plus ``seed``.
    """

    params = dict(params or {})
    if fixture_id == "pav-ejr-cex":
        preset = _pick_preset(params)
        n = params.get("n", preset.default_n)
        return gen_pav_ejr_counterexample(preset.system, preset.smaller, preset.larger, n)
    if fixture_id == "phragmen-pjr-cex":
        preset = _pick_preset(params)
        n = params.get("n", 9 if preset.name == "pairs" else preset.default_n)
        return gen_phragmen_pjr_counterexample(preset.system, preset.smaller, preset.larger, n)
    if fixture_id == "weighted-phragmen-failure":
        return gen_weighted_phragmen_failure(
            params.get("g", 100), params.get("eps", Fraction(1, 100))
        )
    if fixture_id == "sp-not-fjr":
        return gen_sp_not_fjr(params.get("n", 30))
    if fixture_id == "random":
        seed = params.pop("seed", 1)
        return gen_random(params, seed)
    raise ValidationError(
        "unknown-fixture", f"unknown fixture id {fixture_id!r}; pick one of {FIXTURE_IDS}"
    )


def _pick_preset(params: dict) -> WitnessPreset:
    name = params.get("witness", "pairs")
    presets = witness_presets()
    if name not in presets:
        raise ValidationError(
            "bad-parameters", f"unknown witness preset {name!r}; pick one of {sorted(presets)}"
        )
    return presets[name]
