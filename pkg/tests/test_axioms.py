"""Deservedness, cohesiveness, and the audit family on hand-checked instances."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from propchoice import (
    ValidationError,
    audit_core,
    audit_ejr,
    audit_ejr_weighted,
    audit_fjr,
    audit_pjr,
    audit_pjr_weighted,
    audit_restrained_ejr,
    build_election,
    build_fixture,
    check_avg_satisfaction,
    check_weighted_coverage_bound,
    cohesive,
    deserves,
    deserves_weighted,
    max_deserved,
    max_weighted_claim,
)


def committee_ten():
    """Fifteen candidates, ten seats; three voters share {c1,c2,c3}, seven
    others each approve a private d-candidate."""

    candidates = ["c1", "c2", "c3"] + [f"d{i}" for i in range(1, 13)]
    voters = [(f"g{i}", ["c1", "c2", "c3"]) for i in range(1, 4)]
    voters += [(f"s{i}", [f"d{i}"]) for i in range(1, 8)]
    return build_election(candidates, voters, {"kind": "committee", "k": 10})


def quota_hundred(extra_a: int = 0):
    """Two attribute classes with exact quotas (10 of 100 a's, 20 of 100 b's);
    41 voters approve b1..b11 (plus optionally a1..a{extra_a}), 59 abstain."""

    a_ids = [f"a{i}" for i in range(1, 101)]
    b_ids = [f"b{i}" for i in range(1, 101)]
    ballot = [f"b{i}" for i in range(1, 12)] + [f"a{i}" for i in range(1, extra_a + 1)]
    voters = [(f"s{i}", ballot) for i in range(1, 42)]
    voters += [(f"t{i}", []) for i in range(1, 60)]
    system = {
        "kind": "disjoint-attributes",
        "k": 30,
        "groups": [
            {"ids": a_ids, "lower": 10, "upper": 10},
            {"ids": b_ids, "lower": 20, "upper": 20},
        ],
    }
    return build_election(a_ids + b_ids, voters, system)


def blocked_pair():
    """Five voters, three candidates, two seats; v1,v2 share an unelected
    candidate but their reply budget rounds down to zero."""

    voters = [
        ("v1", ["x"]), ("v2", ["x"]), ("v3", ["a"]), ("v4", ["b"]), ("v5", ["a", "b"]),
    ]
    return build_election(["a", "b", "x"], voters, {"kind": "committee", "k": 2})


def two_blocks():
    """Four voters split over two disjoint pairs, two seats."""

    voters = [
        ("v1", ["a", "b"]), ("v2", ["a", "b"]), ("v3", ["c", "d"]), ("v4", ["c", "d"]),
    ]
    return build_election(["a", "b", "c", "d"], voters, {"kind": "committee", "k": 2})


def split_budget():
    """Two voters with disjoint pairs under a weight limit of 2 (all weights 1)."""

    voters = [("v1", ["a", "b"]), ("v2", ["c", "d"])]
    return build_election(
        ["a", "b", "c", "d"], voters, {"kind": "budget", "limit": 2}
    )


# -- deserves -------------------------------------------------------------------


class TestDeserves:
    def test_shared_ballot_supports_three_seats(self):
        e = committee_ten()
        group = ["g1", "g2", "g3"]
        assert deserves(e, group, 3).ok
        res = deserves(e, group, 4)
        assert not res.ok
        assert res.refuter is not None
        assert e.system.is_feasible(res.refuter)

    def test_methods_agree_on_shared_ballot(self):
        e = committee_ten()
        group = ["g1", "g2", "g3"]
        for ell in (1, 3, 4):
            by_counts = deserves(e, group, ell, method="counts")
            by_elements = deserves(e, group, ell, method="elements")
            assert by_counts.ok == by_elements.ok
            assert by_counts.method == "counts"
            assert by_elements.method == "elements"

    def test_quota_instance_supports_eight_not_nine(self):
        e = quota_hundred()
        group = [f"s{i}" for i in range(1, 42)]
        assert deserves(e, group, 8).ok
        assert not deserves(e, group, 9).ok

    def test_quota_instance_widened_pool_supports_ten(self):
        e = quota_hundred(extra_a=4)
        group = [f"s{i}" for i in range(1, 42)]
        assert deserves(e, group, 10).ok

    def test_empty_counter_proposal_can_refute(self):
        # a group whose common pool cannot even reach ell
        e = two_blocks()
        res = deserves(e, ["v1", "v2"], 3)
        assert not res.ok
        assert res.refuter == frozenset()

    def test_bad_inputs_rejected(self):
        e = two_blocks()
        with pytest.raises(ValidationError):
            deserves(e, ["v1"], 0)
        with pytest.raises(ValidationError):
            deserves(e, [], 1)
        with pytest.raises(ValidationError):
            deserves(e, ["nobody"], 1)
        with pytest.raises(ValidationError):
            deserves(e, ["v1"], 1, method="magic")

    @pytest.mark.parametrize("seed", range(6))
    def test_methods_agree_on_random_instances(self, seed):
        rng = random.Random(900 + seed)
        family = rng.choice(["committee", "disjoint-attributes", "public-decisions"])
        fx = build_fixture(
            "random",
            {
                "family": family,
                "n": rng.randint(2, 5),
                **({"issues": rng.randint(1, 3)} if family == "public-decisions" else {"m": rng.randint(2, 5)}),
                "seed": rng.randrange(10**6),
            },
        )
        e = fx.election
        for _ in range(8):
            size = rng.randint(1, e.n)
            group = rng.sample(list(e.voter_ids), size)
            ell = rng.randint(1, 3)
            a = deserves(e, group, ell, method="counts")
            b = deserves(e, group, ell, method="elements")
            assert a.ok == b.ok, (family, group, ell)


class TestDeservesWeighted:
    def test_light_claim_valid_heavy_claim_not(self):
        e = split_budget()
        assert deserves_weighted(e, ["v1"], Fraction(1), 1).ok
        assert not deserves_weighted(e, ["v1"], Fraction(2), 2).ok

    def test_methods_agree(self):
        e = split_budget()
        for alpha, beta in ((Fraction(1), 1), (Fraction(2), 2), (Fraction(2), 1)):
            a = deserves_weighted(e, ["v1"], alpha, beta, method="elements")
            b = deserves_weighted(e, ["v1"], alpha, beta)
            assert a.ok == b.ok

    def test_bad_inputs_rejected(self):
        e = split_budget()
        with pytest.raises(ValidationError):
            deserves_weighted(e, ["v1"], Fraction(0), 1)
        with pytest.raises(ValidationError):
            deserves_weighted(e, ["v1"], Fraction(1), 0)


# -- cohesiveness -----------------------------------------------------------------


class TestCohesive:
    def test_fixed_mode_small_claim_holds(self):
        e = two_blocks()
        assert cohesive(e, ["v1", "v2"], 1, 1).ok

    def test_fixed_mode_large_claim_fails(self):
        e = two_blocks()
        res = cohesive(e, ["v1", "v2"], 2, 2)
        assert not res.ok
        assert res.refuter is not None and len(res.refuter) == 2

    def test_adaptive_mode(self):
        e = two_blocks()
        assert cohesive(e, ["v1", "v2"], None, 1, mode="adaptive").ok
        assert not cohesive(e, ["v1", "v2"], None, 2, mode="adaptive").ok

    def test_methods_agree(self):
        e = two_blocks()
        for group in (["v1", "v2"], ["v1"], ["v1", "v3"]):
            for alpha, beta in ((1, 1), (2, 2), (2, 1)):
                a = cohesive(e, group, alpha, beta, method="counts")
                b = cohesive(e, group, alpha, beta, method="elements")
                assert a.ok == b.ok, (group, alpha, beta)
            for beta in (1, 2):
                a = cohesive(e, group, None, beta, mode="adaptive", method="counts")
                b = cohesive(e, group, None, beta, mode="adaptive", method="elements")
                assert a.ok == b.ok, (group, beta)

    def test_zero_thresholds_trivially_hold(self):
        e = two_blocks()
        res = cohesive(e, ["v1"], 0, 0)
        assert res.ok and res.method == "trivial"

    def test_bad_inputs_rejected(self):
        e = two_blocks()
        with pytest.raises(ValidationError):
            cohesive(e, ["v1"], None, 1, mode="sideways")
        with pytest.raises(ValidationError):
            cohesive(e, ["v1"], None, 1)  # fixed mode needs alpha
        with pytest.raises(ValidationError):
            cohesive(e, ["v1"], 1, None)  # beta or thresholds required


# -- EJR / PJR audits -------------------------------------------------------------


class TestEjrPjrAudits:
    def test_blocked_pair_fails_ejr(self):
        e = blocked_pair()
        rep = audit_ejr(e, ["a", "b"])
        assert not rep.satisfied
        assert rep.witness["group"] == ["v1", "v2"]
        assert rep.witness["ell"] == 1
        assert rep.witness["pool"] == ["x"]

    def test_blocked_pair_fails_pjr_with_coverage(self):
        e = blocked_pair()
        rep = audit_pjr(e, ["a", "b"])
        assert not rep.satisfied
        assert rep.witness["coverage"] == 0
        assert rep.witness["ell"] == 1

    def test_serving_the_pair_satisfies_both(self):
        e = blocked_pair()
        for outcome in (["a", "x"], ["b", "x"]):
            assert audit_ejr(e, outcome).satisfied
            assert audit_pjr(e, outcome).satisfied

    def test_closure_and_subsets_modes_agree(self):
        e = blocked_pair()
        for outcome in (["a", "b"], ["a", "x"], []):
            for auditor in (audit_ejr, audit_pjr):
                c = auditor(e, outcome, groups="closure")
                s = auditor(e, outcome, groups="subsets")
                assert c.satisfied == s.satisfied, (auditor.__name__, outcome)

    def test_infeasible_outcome_rejected(self):
        e = blocked_pair()
        with pytest.raises(ValidationError):
            audit_ejr(e, ["a", "b", "x"])


class TestRestrainedEjr:
    def test_zero_reply_budget_excuses_the_outcome(self):
        e = blocked_pair()
        assert not audit_ejr(e, ["a", "b"]).satisfied
        assert audit_restrained_ejr(e, ["a", "b"], 2).satisfied

    def test_violation_with_budget(self):
        # two of three voters share x; with k=3 their reply budget is 2
        voters = [("v1", ["x", "y"]), ("v2", ["x", "y"]), ("v3", ["a"])]
        e = build_election(["a", "b", "c", "x", "y"], voters, {"kind": "committee", "k": 3})
        rep = audit_restrained_ejr(e, ["a", "b", "c"], 3)
        assert not rep.satisfied
        assert set(rep.witness["group"]) <= {"v1", "v2"}
        assert rep.witness["k_prime"] == len(rep.witness["group"])
        assert rep.witness["ell"] == 1

    def test_k_required_positive(self):
        e = blocked_pair()
        with pytest.raises(ValidationError):
            audit_restrained_ejr(e, ["a", "b"], 0)


class TestFjrAudits:
    def test_blocked_pair_fails_fixed_and_adaptive(self):
        e = blocked_pair()
        fixed = audit_fjr(e, ["a", "b"], mode="fixed")
        assert not fixed.satisfied
        assert fixed.witness["group"] == ["v1", "v2"]
        assert fixed.witness["alpha"] == 1
        assert fixed.witness["beta"] == "1"
        adaptive = audit_fjr(e, ["a", "b"], mode="adaptive")
        assert not adaptive.satisfied
        assert adaptive.witness["group"] == ["v1", "v2"]
        assert "alpha" not in adaptive.witness

    def test_serving_the_pair_passes(self):
        e = blocked_pair()
        assert audit_fjr(e, ["a", "x"], mode="fixed").satisfied
        assert audit_fjr(e, ["a", "x"], mode="adaptive").satisfied


class TestCoreAudit:
    def test_balanced_outcome_in_core(self):
        e = two_blocks()
        assert audit_core(e, ["a", "c"]).satisfied

    def test_one_sided_outcome_blocked(self):
        e = two_blocks()
        rep = audit_core(e, ["c", "d"])
        assert not rep.satisfied
        assert set(rep.witness["group"]) <= {"v1", "v2"}
        assert rep.witness["alpha"] == 1


# -- weighted audits ---------------------------------------------------------------


class TestWeightedAudits:
    def test_starved_voter_fails_both(self):
        e = split_budget()
        ejr = audit_ejr_weighted(e, ["c", "d"])
        assert not ejr.satisfied
        assert ejr.witness["group"] == ["v1"]
        assert ejr.witness["beta"] == 1
        assert ejr.witness["alpha"] == "1"
        pjr = audit_pjr_weighted(e, ["c", "d"])
        assert not pjr.satisfied
        assert pjr.witness["coverage"] == 0

    def test_split_outcome_passes_both(self):
        e = split_budget()
        assert audit_ejr_weighted(e, ["a", "c"]).satisfied
        assert audit_pjr_weighted(e, ["a", "c"]).satisfied

    def test_coverage_bound(self):
        e = split_budget()
        assert check_weighted_coverage_bound(e, ["a", "c"])


# -- derived helpers ---------------------------------------------------------------


class TestDerivedHelpers:
    def test_avg_satisfaction_bound(self):
        e = committee_ten()
        group = ["g1", "g2", "g3"]
        serving = ["c1"] + [f"d{i}" for i in range(1, 10)]
        starving = [f"d{i}" for i in range(1, 11)]
        assert check_avg_satisfaction(e, serving, group, 3)
        assert not check_avg_satisfaction(e, starving, group, 3)

    def test_max_deserved(self):
        e = committee_ten()
        assert max_deserved(e, ["g1", "g2", "g3"]) == 3
        assert max_deserved(e, ["s1"]) == 1
        blocked = blocked_pair()
        assert max_deserved(blocked, ["v1", "v2"]) == 1

    def test_max_weighted_claim(self):
        e = split_budget()
        assert max_weighted_claim(e, ["v1"]) == (1, Fraction(1))
