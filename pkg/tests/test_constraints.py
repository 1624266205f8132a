"""Feasibility systems: per-kind semantics, enumeration, and matroid checks."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from propchoice import (
    BudgetSystem,
    CommitteeSystem,
    DisjointAttributesSystem,
    EnumerationCapExceeded,
    ExplicitSystem,
    JudgmentSystem,
    MatroidWitness,
    NegativeVotesSystem,
    NotAMatroidError,
    PublicDecisionsSystem,
    RankingSystem,
    ValidationError,
    build_system,
    check_exchange_property,
    enumerate_feasible,
    enumerate_feasible_counts,
    enumerate_maximal,
    one_swap,
    refine_atoms,
    representative_mask,
    witness_presets,
)


def all_subsets(ids):
    for r in range(len(ids) + 1):
        yield from (frozenset(c) for c in itertools.combinations(ids, r))


# -- per-kind truth tables -----------------------------------------------------


class TestCommittee:
    system = CommitteeSystem(["a", "b", "c"], 2)

    @pytest.mark.parametrize(
        "subset, ok",
        [([], True), (["a"], True), (["a", "b"], True), (["a", "b", "c"], False)],
    )
    def test_cardinality_cap(self, subset, ok):
        assert self.system.is_feasible(subset) is ok

    def test_k_must_fit_universe(self):
        with pytest.raises(ValidationError):
            CommitteeSystem(["a"], 2)


class TestPublicDecisions:
    system = PublicDecisionsSystem([("a1", "b1"), ("a2", "b2")])

    @pytest.mark.parametrize(
        "subset, ok",
        [
            ([], True),
            (["a1"], True),
            (["a1", "b2"], True),
            (["a1", "b1"], False),
            (["a2", "b2"], False),
        ],
    )
    def test_one_per_issue(self, subset, ok):
        assert self.system.is_feasible(subset) is ok


class TestDisjointAttributes:
    system = DisjointAttributesSystem(2, [(["a", "b"], 1, 2), (["c", "d"], 0, 1)])

    @pytest.mark.parametrize(
        "subset, ok",
        [
            ([], True),
            (["c"], True),  # extendable: one slot left for the lower quota
            (["a", "b"], True),
            (["c", "d"], False),  # second group's upper quota is 1
            (["a", "b", "c"], False),  # exceeds total size
        ],
    )
    def test_quota_window(self, subset, ok):
        assert self.system.is_feasible(subset) is ok

    def test_unsatisfiable_quotas_rejected(self):
        with pytest.raises(ValidationError) as exc:
            DisjointAttributesSystem(1, [(["a"], 1, 1), (["b"], 1, 1)])
        assert exc.value.code == "unsatisfiable-quotas"


class TestBudget:
    weights = {"a": Fraction(2), "b": Fraction(1), "c": Fraction(1)}

    def test_global_limit(self):
        system = BudgetSystem(["a", "b", "c"], self.weights, limit=Fraction(3))
        assert system.is_feasible(["a", "b"])
        assert not system.is_feasible(["a", "b", "c"])

    def test_group_caps(self):
        system = BudgetSystem(
            ["a", "b", "c"], self.weights,
            groups=[(["a", "b"], Fraction(2))], limit=Fraction(10),
        )
        assert system.is_feasible(["a", "c"])
        assert not system.is_feasible(["a", "b"])

    def test_needs_some_constraint(self):
        with pytest.raises(ValidationError):
            BudgetSystem(["a"], {"a": Fraction(1)})


class TestExplicit:
    system = ExplicitSystem([["a", "b"], ["c"]])

    def test_closure_materialized(self):
        expect = {
            frozenset(), frozenset({"a"}), frozenset({"b"}),
            frozenset({"a", "b"}), frozenset({"c"}),
        }
        assert {s for s in all_subsets("abc") if self.system.is_feasible(s)} == expect


class TestRanking:
    system = RankingSystem(["x", "y", "z"])

    @pytest.mark.parametrize(
        "subset, ok",
        [
            ([], True),
            (["x>y", "y>z"], True),
            (["x>y", "y>x"], False),  # both directions of one comparison
            (["x>y", "y>z", "z>x"], False),  # cycle
        ],
    )
    def test_asymmetric_acyclic(self, subset, ok):
        assert self.system.is_feasible(subset) is ok

    def test_matches_permutation_oracle(self):
        perms = list(itertools.permutations(self.system.items))

        def consistent(subset):
            for order in perms:
                rank = {x: i for i, x in enumerate(order)}
                if all(rank[c.split(">")[0]] < rank[c.split(">")[1]] for c in subset):
                    return True
            return False

        for subset in all_subsets(self.system.ids):
            assert self.system.is_feasible(subset) is consistent(subset), subset


class TestNegativeVotes:
    system = NegativeVotesSystem(["c1", "c2", "c3"], 2)

    @pytest.mark.parametrize(
        "subset, ok",
        [
            ([], True),
            (["c1", "c2"], True),
            (["~c1"], True),
            (["c1", "~c1"], False),  # a candidate paired with its own rejection
            (["c1", "c2", "c3"], False),  # more selections than seats
            (["~c1", "~c2"], False),  # rejections leave fewer than k candidates
        ],
    )
    def test_completable_to_k(self, subset, ok):
        assert self.system.is_feasible(subset) is ok


class TestJudgment:
    system = JudgmentSystem(["x", "y"], [["~x", "~y"]])

    @pytest.mark.parametrize(
        "subset, ok",
        [
            ([], True),
            (["x=T"], True),
            (["x=T", "y=F"], True),
            (["x=T", "y=T"], False),  # violates the clause
            (["x=T", "x=F"], False),  # assigns one variable twice
        ],
    )
    def test_extendable_assignments(self, subset, ok):
        assert self.system.is_feasible(subset) is ok

    def test_matches_assignment_oracle(self):
        system = JudgmentSystem(["x", "y", "z"], [["x", "y"], ["~y", "z"]])
        names = system.variables

        def oracle(subset):
            partial = {}
            for cid in subset:
                var, val = cid.split("=")
                if partial.get(var, val) != val:
                    return False
                partial[var] = val
            for bits in itertools.product("TF", repeat=len(names)):
                full = dict(zip(names, bits))
                if any(full[v] != val for v, val in partial.items()):
                    continue
                if (full["x"] == "T" or full["y"] == "T") and (
                    full["y"] == "F" or full["z"] == "T"
                ):
                    return True
            return False

        for subset in all_subsets(system.ids):
            assert system.is_feasible(subset) is oracle(subset), subset

    def test_unsatisfiable_clauses_rejected(self):
        with pytest.raises(ValidationError) as exc:
            JudgmentSystem(["x"], [["x"], ["~x"]])
        assert exc.value.code == "unsatisfiable-clauses"


# -- shared structural properties ----------------------------------------------


def sample_systems():
    return [
        CommitteeSystem(["a", "b", "c", "d"], 2),
        PublicDecisionsSystem([("a1", "b1"), ("a2", "b2")]),
        DisjointAttributesSystem(2, [(["a", "b"], 1, 2), (["c", "d"], 0, 1)]),
        BudgetSystem(
            ["a", "b", "c", "d"],
            {"a": Fraction(2), "b": Fraction(1), "c": Fraction(1), "d": Fraction(3, 2)},
            groups=[(["a", "b"], Fraction(5, 2))],
            limit=Fraction(4),
        ),
        ExplicitSystem([["a", "b"], ["c", "d"], ["a", "d"]]),
        RankingSystem(["x", "y", "z"]),
        NegativeVotesSystem(["c1", "c2", "c3"], 2),
        JudgmentSystem(["x", "y", "z"], [["x", "y"], ["~y", "z"]]),
    ]


@pytest.mark.parametrize("system", sample_systems(), ids=lambda s: s.kind)
def test_downward_closure(system):
    rng = random.Random(7)
    full = system.full_mask
    for _ in range(200):
        mask = rng.getrandbits(len(system.ids)) & full
        if not system.contains_mask(mask):
            continue
        m = mask
        while m:
            low = m & -m
            assert system.contains_mask(mask ^ low), (system.kind, bin(mask))
            m ^= low


@pytest.mark.parametrize("system", sample_systems(), ids=lambda s: s.kind)
def test_empty_set_feasible(system):
    assert system.is_feasible([])


COUNTABLE = [s for s in sample_systems() if s.base_atoms() is not None]


@pytest.mark.parametrize("system", COUNTABLE, ids=lambda s: s.kind)
def test_counts_checker_matches_membership(system):
    atoms = system.base_atoms()
    check = system.counts_checker(atoms)
    rng = random.Random(11)
    for _ in range(300):
        mask = rng.getrandbits(len(system.ids)) & system.full_mask
        counts = [bin(mask & a).count("1") for a in atoms]
        assert check(counts) is system.contains_mask(mask), (system.kind, bin(mask))


@pytest.mark.parametrize("system", COUNTABLE, ids=lambda s: s.kind)
def test_count_vectors_match_element_enumeration(system):
    atoms = system.base_atoms()
    vectors = set(enumerate_feasible_counts(system, atoms))
    from_elements = set()
    for s in enumerate_feasible(system):
        mask = system.mask_of(s)
        from_elements.add(tuple(bin(mask & a).count("1") for a in atoms))
    assert vectors == from_elements

    for vec in vectors:
        assert system.contains_mask(representative_mask(atoms, vec))


# -- factory -------------------------------------------------------------------


class TestBuildSystem:
    def test_routing(self):
        cases = [
            ({"kind": "committee", "k": 1, "candidates": ["a"]}, CommitteeSystem),
            ({"kind": "public-decisions", "issues": [["a", "b"]]}, PublicDecisionsSystem),
            (
                {"kind": "disjoint-attributes", "k": 1,
                 "groups": [{"ids": ["a", "b"], "lower": 0, "upper": 1}]},
                DisjointAttributesSystem,
            ),
            ({"kind": "budget", "candidates": ["a"], "limit": "3/2"}, BudgetSystem),
            ({"kind": "explicit", "feasible": [["a"]]}, ExplicitSystem),
            ({"kind": "ranking", "items": ["x", "y"]}, RankingSystem),
            ({"kind": "negative-votes", "candidates": ["a", "b"], "k": 1}, NegativeVotesSystem),
            ({"kind": "judgment", "variables": ["x"], "clauses": [["x"]]}, JudgmentSystem),
        ]
        for spec, cls in cases:
            assert isinstance(build_system(spec), cls)

    def test_universe_fallback(self):
        system = build_system({"kind": "committee", "k": 1}, universe=["a", "b"])
        assert system.ids == ("a", "b")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            build_system({"kind": "lottery"})

    def test_missing_kind_rejected(self):
        with pytest.raises(ValidationError):
            build_system({"k": 2})


# -- enumeration ---------------------------------------------------------------


class TestEnumeration:
    def test_lexicographic_order(self):
        system = CommitteeSystem(["a", "b", "c"], 2)
        got = [tuple(sorted(s)) for s in enumerate_feasible(system)]
        assert got == [
            (), ("a",), ("a", "b"), ("a", "c"), ("b",), ("b", "c"), ("c",),
        ]

    def test_cap_raises(self):
        system = CommitteeSystem([f"c{i}" for i in range(10)], 5)
        with pytest.raises(EnumerationCapExceeded) as exc:
            list(enumerate_feasible(system, cap=10))
        assert exc.value.code == "enumeration-cap-exceeded"

    def test_maximal_sets(self):
        system = CommitteeSystem(["a", "b", "c"], 2)
        got = set(enumerate_maximal(system))
        assert got == {
            frozenset({"a", "b"}), frozenset({"a", "c"}), frozenset({"b", "c"}),
        }

    def test_maximal_sets_respect_quotas(self):
        system = DisjointAttributesSystem(2, [(["a", "b"], 1, 2), (["c", "d"], 0, 1)])
        for s in enumerate_maximal(system):
            assert len(s) == 2
            assert len(s & {"a", "b"}) >= 1

    def test_refine_atoms_splits_and_sorts(self):
        assert refine_atoms([0b1100, 0b0011], [0b1010]) == [0b0001, 0b0010, 0b0100, 0b1000]
        assert refine_atoms([0b11], []) == [0b11]


# -- exchange property ----------------------------------------------------------


MATROIDAL = sample_systems()[:4]  # committee, public-decisions, disjoint, budget is NOT


class TestExchangeProperty:
    @pytest.mark.parametrize(
        "system",
        [
            CommitteeSystem(["a", "b", "c", "d"], 2),
            PublicDecisionsSystem([("a1", "b1"), ("a2", "b2")]),
            DisjointAttributesSystem(2, [(["a", "b"], 1, 2), (["c", "d"], 0, 1)]),
        ],
        ids=lambda s: s.kind,
    )
    def test_matroidal_kinds_pass(self, system):
        assert check_exchange_property(system) is None

    @pytest.mark.parametrize("name", ["pairs", "ranking", "negative-votes", "judgment"])
    def test_preset_witnesses_hold(self, name):
        preset = witness_presets()[name]
        witness = MatroidWitness(preset.smaller, preset.larger)
        assert witness.holds_in(preset.system)
        found = check_exchange_property(preset.system)
        assert found is not None
        assert found.holds_in(preset.system)

    def test_two_against_one_witness_pinned(self):
        system = ExplicitSystem([["x1"], ["y1", "y2"]])
        found = check_exchange_property(system)
        assert found == MatroidWitness(frozenset({"x1"}), frozenset({"y1", "y2"}))

    def test_witness_rejected_by_matroid(self):
        witness = MatroidWitness(frozenset({"a"}), frozenset({"b", "c"}))
        assert not witness.holds_in(CommitteeSystem(["a", "b", "c"], 2))


class TestOneSwap:
    system = CommitteeSystem(["a", "b", "c"], 2)

    def test_returns_first_swap_by_id(self):
        assert one_swap(self.system, ["a", "b"], ["a", "b"], "c") == "a"

    def test_rejects_removable_outside_selection(self):
        with pytest.raises(ValidationError):
            one_swap(self.system, ["a"], ["b"], "c")

    def test_rejects_incoming_already_selected(self):
        with pytest.raises(ValidationError):
            one_swap(self.system, ["a", "b"], ["a"], "b")

    def test_non_matroid_raises_typed_error(self):
        system = ExplicitSystem([["x1"], ["y1", "y2"]])
        with pytest.raises(NotAMatroidError):
            one_swap(system, ["y1", "y2"], ["y1", "y2"], "x1")
