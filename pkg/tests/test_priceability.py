"""Stable price systems: verification conditions, payment solving, search."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from propchoice import (
    PriceSystem,
    ValidationError,
    build_election,
    build_fixture,
    check_weighted_sp_bound,
    enumerate_maximal,
    find_payments,
    search_stable_priceable,
    verify_sp,
)


def two_blocks():
    voters = [
        ("v1", ["a", "b"]), ("v2", ["a", "b"]), ("v3", ["c", "d"]), ("v4", ["c", "d"]),
    ]
    return build_election(["a", "b", "c", "d"], voters, {"kind": "committee", "k": 2})


def split_budget():
    voters = [("v1", ["a", "b"]), ("v2", ["c", "d"])]
    return build_election(
        ["a", "b", "c", "d"], voters, {"kind": "budget", "limit": 2}
    )


class TestVerifySp:
    def test_balanced_outcome_verifies_in_both_modes(self):
        e = two_blocks()
        ps = find_payments(e, ["a", "c"], "uniform")
        assert ps is not None
        assert set(ps.prices.values()) == {Fraction(2)}
        for mode in ("sp4-producer", "exhaustive"):
            rep = verify_sp(e, ["a", "c"], ps, mode)
            assert rep.ok, (mode, rep.conditions, rep.details)
            assert all(rep.conditions.values())

    def test_sp1_catches_unapproved_payment(self):
        e = two_blocks()
        prices = {c: Fraction(2) for c in "abcd"}
        payments = {
            ("v1", "a"): Fraction(1), ("v2", "a"): Fraction(1),
            ("v3", "c"): Fraction(1), ("v4", "a"): Fraction(0),
            ("v4", "c"): Fraction(1),
        }
        rep = verify_sp(e, ["a", "c"], PriceSystem(prices, payments))
        assert rep.ok  # zero-value entries are ignored by SP1

        # v4 approves only c and d, so a nonzero payment toward a breaks SP1
        leaky = {
            ("v1", "a"): Fraction(1), ("v2", "a"): Fraction(1, 2),
            ("v4", "a"): Fraction(1, 2), ("v3", "c"): Fraction(1),
            ("v4", "c"): Fraction(1, 2),
        }
        bad_prices = {"a": Fraction(2), "b": Fraction(2), "c": Fraction(3, 2), "d": Fraction(2)}
        bad = verify_sp(e, ["a", "c"], PriceSystem(bad_prices, leaky))
        assert not bad.conditions["sp1"]

    def test_sp2_catches_uncovered_price(self):
        e = two_blocks()
        ps = find_payments(e, ["a", "c"], "uniform")
        trimmed = PriceSystem(
            ps.prices,
            {k: v for k, v in ps.payments.items() if k[0] != "v1"},
        )
        rep = verify_sp(e, ["a", "c"], trimmed)
        assert not rep.conditions["sp2"]
        assert "sp2" in rep.details

    def test_sp3_catches_affordable_outsider(self):
        e = two_blocks()
        # v3, v4 keep their full budgets, so they can afford c together
        prices = {c: Fraction(1) for c in "abcd"}
        payments = {("v1", "a"): Fraction(1), ("v2", "b"): Fraction(1)}
        rep = verify_sp(e, ["a", "b"], PriceSystem(prices, payments))
        assert rep.conditions["sp1"] and rep.conditions["sp2"]
        assert not rep.conditions["sp3"]

    def test_sp4_producer_vs_exhaustive(self):
        e = two_blocks()
        ps = find_payments(e, ["a", "c"], "uniform")
        pricier_b = PriceSystem({**ps.prices, "b": Fraction(3)}, ps.payments)
        producer = verify_sp(e, ["a", "c"], pricier_b, "sp4-producer")
        assert not producer.conditions["sp4"]
        exhaustive = verify_sp(e, ["a", "c"], pricier_b, "exhaustive")
        assert exhaustive.ok

    def test_rejects_bad_inputs(self):
        e = two_blocks()
        ps = find_payments(e, ["a", "c"], "uniform")
        with pytest.raises(ValidationError):
            verify_sp(e, ["a", "b", "c"], ps)  # infeasible outcome
        with pytest.raises(ValidationError):
            verify_sp(e, ["a", "c"], ps, mode="fast")
        with pytest.raises(ValidationError):
            verify_sp(e, ["a", "c"], PriceSystem({"a": Fraction(1)}, {}))
        with pytest.raises(ValidationError):
            verify_sp(
                e, ["a", "c"],
                PriceSystem({c: Fraction(1) for c in "abcd"}, {("v1", "a"): Fraction(2)}),
            )


class TestFindPayments:
    def test_unbalanced_outcome_has_no_stable_payments(self):
        e = two_blocks()
        assert find_payments(e, ["a", "b"], "uniform") is None

    def test_given_mode_accepts_solved_prices(self):
        e = two_blocks()
        solved = find_payments(e, ["a", "c"], "uniform")
        given = find_payments(e, ["a", "c"], "given", prices=solved.prices)
        assert given is not None
        assert given.prices == solved.prices

    def test_mode_validation(self):
        e = two_blocks()
        with pytest.raises(ValidationError):
            find_payments(e, ["a", "c"], "cheapest")
        with pytest.raises(ValidationError):
            find_payments(e, ["a", "c"], "given")  # needs a price map
        with pytest.raises(ValidationError):
            find_payments(e, ["a", "c"], "uniform", prices={"a": Fraction(1)})

    @pytest.mark.parametrize("seed", range(8))
    def test_solutions_satisfy_sp1_to_sp3(self, seed):
        rng = random.Random(3100 + seed)
        family = rng.choice(["committee", "public-decisions", "budget", "explicit"])
        params = {"family": family, "n": rng.randint(2, 5), "seed": rng.randrange(10**6)}
        if family == "public-decisions":
            params["issues"] = rng.randint(1, 3)
        else:
            params["m"] = rng.randint(2, 5)
        e = build_fixture("random", params).election
        mode = "proportional" if family == "budget" else "uniform"
        for outcome in enumerate_maximal(e.system):
            ps = find_payments(e, outcome, mode)
            if ps is None:
                continue
            rep = verify_sp(e, outcome, ps, "exhaustive")
            for cond in ("sp1", "sp2", "sp3"):
                assert rep.conditions[cond], (family, sorted(outcome), cond, rep.details)


class TestSearch:
    def test_all_modes_find_the_balanced_outcomes(self):
        e = two_blocks()
        expect = {
            frozenset({"a", "c"}), frozenset({"a", "d"}),
            frozenset({"b", "c"}), frozenset({"b", "d"}),
        }
        for mode in ("uniform", "general", "exhaustive"):
            found = search_stable_priceable(e, mode)
            assert {w for w, _ in found} == expect, mode
            verify_mode = "exhaustive" if mode == "exhaustive" else "sp4-producer"
            for w, ps in found:
                assert verify_sp(e, w, ps, verify_mode).ok

    def test_mode_validation(self):
        with pytest.raises(ValidationError):
            search_stable_priceable(two_blocks(), "greedy")


class TestPricedCommitteeFixture:
    def test_reference_price_system_is_stable(self):
        fx = build_fixture("sp-not-fjr")
        ref = fx.reference
        rep = verify_sp(fx.election, ref["outcome"], ref["price_system"], "exhaustive")
        assert rep.ok, (rep.conditions, rep.details)

    def test_underpricing_an_outsider_breaks_sp3(self):
        fx = build_fixture("sp-not-fjr")
        ref = fx.reference
        ps = ref["price_system"]
        cheap = PriceSystem({**ps.prices, "b5": Fraction(1, 5)}, ps.payments)
        rep = verify_sp(fx.election, ref["outcome"], cheap, "exhaustive")
        assert not rep.conditions["sp3"]


class TestWeightedBound:
    def test_bound_holds_for_balanced_outcome(self):
        e = split_budget()
        ps = find_payments(e, ["a", "c"], "proportional")
        assert ps is not None
        assert check_weighted_sp_bound(e, ["a", "c"], ps).ok

    def test_bound_fails_for_starved_voter(self):
        e = split_budget()
        idle = PriceSystem({c: Fraction(1) for c in "abcd"}, {})
        rep = check_weighted_sp_bound(e, ["c", "d"], idle)
        assert not rep.ok
        assert list(rep.witness["group"]) == ["v1"]
