"""Election container: construction paths, validation, and utility modes."""

from __future__ import annotations

from fractions import Fraction

import pytest

from propchoice import (
    Candidate,
    CommitteeSystem,
    Election,
    ValidationError,
    Voter,
    build_election,
)


def committee(ids, k):
    return CommitteeSystem(ids, k)


class TestConstruction:
    def test_candidate_inputs_are_interchangeable(self):
        system = {"kind": "committee", "k": 1}
        for cands in (
            ["a", "b"],
            [("a", 1), ("b", Fraction(1))],
            [{"id": "a"}, {"id": "b", "weight": 1}],
            [Candidate("a"), Candidate("b")],
        ):
            e = build_election(cands, [("v1", ["a"])], system)
            assert e.cand_ids == ("a", "b")

    def test_voter_inputs_are_interchangeable(self):
        system = {"kind": "committee", "k": 1}
        for voters in (
            [("v1", ["a"]), ("v2", [])],
            [{"id": "v1", "approves": ["a"]}, {"id": "v2"}],
            [Voter("v1", frozenset({"a"})), Voter("v2")],
        ):
            e = build_election(["a"], voters, system)
            assert e.voter_ids == ("v1", "v2")
            assert e.ballot_masks == (1, 0)

    def test_bare_ballots_get_auto_ids(self):
        e = build_election(["a", "b"], [["a"], ["b"], []], {"kind": "committee", "k": 1})
        assert e.voter_ids == ("v1", "v2", "v3")

    def test_candidates_sorted_to_system_order(self):
        e = build_election(["b", "a"], [("v1", ["b"])], {"kind": "committee", "k": 1})
        assert e.cand_ids == ("a", "b")
        assert e.ballot_masks == (2,)

    def test_duplicate_candidate_id_rejected(self):
        with pytest.raises(ValidationError) as exc:
            build_election(["a", "a"], [("v1", [])], {"kind": "committee", "k": 1})
        assert exc.value.code == "duplicate-id"

    def test_duplicate_voter_id_rejected(self):
        with pytest.raises(ValidationError) as exc:
            build_election(["a"], [("v1", []), ("v1", [])], {"kind": "committee", "k": 1})
        assert exc.value.code == "duplicate-id"

    def test_universe_mismatch_rejected(self):
        system = committee(["a", "b"], 1)
        with pytest.raises(ValidationError) as exc:
            Election(system, [Candidate("a")], [Voter("v1")])
        assert exc.value.code == "universe-mismatch"

    def test_needs_at_least_one_voter(self):
        with pytest.raises(ValidationError) as exc:
            build_election(["a"], [], {"kind": "committee", "k": 1})
        assert exc.value.code == "no-voters"

    def test_unknown_ballot_candidate_rejected(self):
        with pytest.raises(ValidationError):
            build_election(["a"], [("v1", ["zz"])], {"kind": "committee", "k": 1})

    def test_budget_weight_mismatch_rejected(self):
        from propchoice import BudgetSystem

        system = BudgetSystem(["a"], {"a": Fraction(1)}, limit=Fraction(2))
        with pytest.raises(ValidationError) as exc:
            Election(system, [Candidate("a", Fraction(2))], [Voter("v1")])
        assert exc.value.code == "weight-mismatch"

    def test_nonpositive_candidate_weight_rejected(self):
        with pytest.raises(ValidationError) as exc:
            Candidate("a", Fraction(0))
        assert exc.value.code == "bad-weight"


class TestApprovalUtilities:
    def test_utility_counts_intersection(self):
        e = build_election(
            ["a", "b", "c"], [("v1", ["a", "b"])], {"kind": "committee", "k": 3}
        )
        assert e.utility("v1", ["a"]) == 1
        assert e.utility("v1", ["a", "b", "c"]) == 2
        assert e.utility("v1", []) == 0

    def test_max_utility_and_achievable(self):
        e = build_election(
            ["a", "b", "c"], [("v1", ["a", "b"])], {"kind": "committee", "k": 2}
        )
        assert e.max_utility(0) == 2
        assert e.achievable_utilities(0) == (0, 1, 2)

    def test_weight_of_sums_candidate_weights(self):
        e = build_election(
            [("a", Fraction(3, 2)), ("b", 1)],
            [("v1", ["a"])],
            {"kind": "budget", "limit": "5/2"},
        )
        assert e.weight_of(["a", "b"]) == Fraction(5, 2)

    def test_require_mode(self):
        e = build_election(["a"], [("v1", ["a"])], {"kind": "committee", "k": 1})
        e.require_mode("approval", context="test")
        with pytest.raises(ValidationError) as exc:
            e.require_mode("additive", context="test")
        assert exc.value.code == "mode-not-supported"


class TestAdditiveMode:
    def build(self):
        return build_election(
            ["a", "b", "c"],
            None,
            {"kind": "committee", "k": 2},
            mode="additive",
            utilities=[
                {"a": Fraction(3, 2), "b": Fraction(1)},
                {"c": Fraction(2)},
            ],
        )

    def test_ballots_derived_from_positive_values(self):
        e = self.build()
        assert e.voters[0].approves == frozenset({"a", "b"})
        assert e.voters[1].approves == frozenset({"c"})

    def test_utilities_sum_over_selection(self):
        e = self.build()
        assert e.utility("v1", ["a", "b"]) == Fraction(5, 2)
        assert e.utility("v1", ["c"]) == 0

    def test_declared_ballot_must_match_derivation(self):
        with pytest.raises(ValidationError) as exc:
            build_election(
                ["a", "b"],
                [("v1", ["b"])],
                {"kind": "committee", "k": 1},
                mode="additive",
                utilities=[{"a": Fraction(1)}],
            )
        assert exc.value.code == "ballot-utility-mismatch"

    def test_negative_value_rejected(self):
        with pytest.raises(ValidationError):
            build_election(
                ["a"], None, {"kind": "committee", "k": 1},
                mode="additive", utilities=[{"a": Fraction(-1)}],
            )

    def test_utilities_in_approval_mode_rejected(self):
        with pytest.raises(ValidationError):
            build_election(
                ["a"], [("v1", ["a"])], {"kind": "committee", "k": 1},
                utilities=[{"a": 1}],
            )


class TestTableMode:
    def build(self):
        return build_election(
            ["a", "b"],
            None,
            {"kind": "committee", "k": 2},
            mode="table",
            utilities=[
                {
                    frozenset(): Fraction(0),
                    frozenset({"a"}): Fraction(1),
                    frozenset({"a", "b"}): Fraction(3, 2),
                }
            ],
        )

    def test_value_is_best_dominated_entry(self):
        e = self.build()
        assert e.utility("v1", ["a"]) == 1
        assert e.utility("v1", ["b"]) == 0
        assert e.utility("v1", ["a", "b"]) == Fraction(3, 2)

    def test_monotonicity_enforced(self):
        with pytest.raises(ValidationError) as exc:
            build_election(
                ["a", "b"], None, {"kind": "committee", "k": 2},
                mode="table",
                utilities=[{frozenset({"a"}): Fraction(2), frozenset({"a", "b"}): Fraction(1)}],
            )
        assert exc.value.code == "non-monotone"

    def test_ballot_derived_from_marginal_gain(self):
        e = self.build()
        assert e.voters[0].approves == frozenset({"a"})
