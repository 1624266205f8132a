"""Greedy cohesive-group extraction and claim-realizing assembly."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from propchoice import (
    CohesiveGroup,
    CohesivePartition,
    SearchExhaustedError,
    audit_fjr,
    build_election,
    build_fixture,
    construct_fjr_outcome,
    greedy_cohesive_partition,
)


def two_halves():
    """Six voters split over two disjoint triples, four seats."""

    a = ["a1", "a2", "a3"]
    b = ["b1", "b2", "b3"]
    voters = [(f"v{i}", a) for i in (1, 2, 3)] + [(f"v{i}", b) for i in (4, 5, 6)]
    return build_election(a + b, voters, {"kind": "committee", "k": 4})


class TestPartition:
    def test_single_voter(self):
        e = build_election(["a", "b"], [("v1", ["a"])], {"kind": "committee", "k": 1})
        part = greedy_cohesive_partition(e)
        assert part.groups == (CohesiveGroup(("v1",), 1, Fraction(1)),)

    def test_two_halves_extracts_symmetric_groups(self):
        part = greedy_cohesive_partition(two_halves())
        assert part.groups == (
            CohesiveGroup(("v1", "v2", "v3"), 2, Fraction(2)),
            CohesiveGroup(("v4", "v5", "v6"), 2, Fraction(2)),
        )

    def test_empty_ballots_yield_zero_claims(self):
        e = build_election(
            ["a", "b"], [("v1", []), ("v2", [])], {"kind": "committee", "k": 1}
        )
        part = greedy_cohesive_partition(e)
        assert part.groups == (
            CohesiveGroup(("v1",), 0, Fraction(0)),
            CohesiveGroup(("v2",), 0, Fraction(0)),
        )

    def test_shared_block_then_singletons(self):
        candidates = ["c1", "c2", "c3"] + [f"d{i}" for i in range(1, 13)]
        voters = [(f"g{i}", ["c1", "c2", "c3"]) for i in range(1, 4)]
        voters += [(f"s{i}", [f"d{i}"]) for i in range(1, 8)]
        e = build_election(candidates, voters, {"kind": "committee", "k": 10})
        part = greedy_cohesive_partition(e)
        assert part.groups[0] == CohesiveGroup(("g1", "g2", "g3"), 3, Fraction(3))
        assert part.groups[1:] == tuple(
            CohesiveGroup((f"s{i}",), 1, Fraction(1)) for i in range(1, 8)
        )

    def test_betas_non_increasing(self):
        part = greedy_cohesive_partition(two_halves())
        betas = [g.beta for g in part.groups]
        assert betas == sorted(betas, reverse=True)

    def test_partition_covers_each_voter_once(self):
        e = two_halves()
        part = greedy_cohesive_partition(e)
        seen = [v for g in part.groups for v in g.voters]
        assert sorted(seen) == sorted(e.voter_ids)
        assert len(seen) == len(set(seen))


class TestAssembly:
    def test_two_halves_outcome(self):
        res = construct_fjr_outcome(two_halves())
        assert res.slates == (frozenset({"a1", "a2"}), frozenset({"b1", "b2"}))
        assert res.outcome == frozenset({"a1", "a2", "b1", "b2"})

    def test_shared_block_outcome(self):
        candidates = ["c1", "c2", "c3"] + [f"d{i}" for i in range(1, 13)]
        voters = [(f"g{i}", ["c1", "c2", "c3"]) for i in range(1, 4)]
        voters += [(f"s{i}", [f"d{i}"]) for i in range(1, 8)]
        e = build_election(candidates, voters, {"kind": "committee", "k": 10})
        res = construct_fjr_outcome(e)
        assert res.outcome == frozenset(
            ["c1", "c2", "c3"] + [f"d{i}" for i in range(1, 8)]
        )

    def test_zero_claim_groups_still_fill_the_outcome(self):
        e = build_election(
            ["a", "b"], [("v1", []), ("v2", [])], {"kind": "committee", "k": 1}
        )
        res = construct_fjr_outcome(e)
        assert res.slates == (frozenset(), frozenset())
        assert res.outcome == frozenset({"a"})  # maximal extension in id order

    def test_additive_mode(self):
        e = build_election(
            ["a", "b", "c"],
            None,
            {"kind": "committee", "k": 2},
            mode="additive",
            utilities=[
                {"a": Fraction(2), "b": Fraction(1)},
                {"c": Fraction(3, 2)},
            ],
        )
        res = construct_fjr_outcome(e)
        assert res.outcome == frozenset({"a", "c"})
        groups = res.partition.groups
        assert groups[0] == CohesiveGroup(("v1",), 1, Fraction(2))
        assert groups[1] == CohesiveGroup(("v2",), 1, Fraction(3, 2))

    def test_impossible_partition_raises_typed_error(self):
        voters = [
            ("v1", ["a", "b"]), ("v2", ["a", "b"]),
            ("v3", ["c", "d"]), ("v4", ["c", "d"]),
        ]
        e = build_election(["a", "b", "c", "d"], voters, {"kind": "committee", "k": 2})
        fake = CohesivePartition(
            (CohesiveGroup(("v1", "v2", "v3", "v4"), 4, Fraction(2)),)
        )
        with pytest.raises(SearchExhaustedError):
            construct_fjr_outcome(e, partition=fake)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_outcomes_pass_fjr(self, seed):
        rng = random.Random(4300 + seed)
        family = rng.choice(
            ["committee", "public-decisions", "disjoint-attributes", "budget", "explicit"]
        )
        params = {"family": family, "n": rng.randint(2, 5), "seed": rng.randrange(10**6)}
        if family == "public-decisions":
            params["issues"] = rng.randint(1, 2)
        else:
            params["m"] = rng.randint(2, 5)
        e = build_fixture("random", params).election
        res = construct_fjr_outcome(e)
        claimed = {v for g in res.partition.groups for v in g.voters}
        assert claimed == set(e.voter_ids)
        for g, slate in zip(res.partition.groups, res.slates):
            assert len(slate) <= g.alpha or g.beta <= 0
            for vid in g.voters:
                if g.beta > 0:
                    assert e.utility(vid, slate) >= g.beta
        rep = audit_fjr(e, res.outcome, mode="fixed")
        assert rep.satisfied, (family, params, rep.witness)
