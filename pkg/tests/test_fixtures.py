"""Fixture generators: self-consistency, refusals, and determinism."""

from __future__ import annotations

from fractions import Fraction

import pytest

from propchoice import (
    FIXTURE_IDS,
    GeneratorRefusal,
    MatroidWitness,
    PriceSystem,
    ValidationError,
    build_fixture,
    deserves,
    witness_presets,
)
from propchoice.fixtures import gen_pav_ejr_counterexample

PRESET_NAMES = ("pairs", "ranking", "negative-votes", "judgment")


class TestCatalog:
    def test_fixture_ids(self):
        assert FIXTURE_IDS == (
            "pav-ejr-cex",
            "phragmen-pjr-cex",
            "weighted-phragmen-failure",
            "sp-not-fjr",
            "random",
        )

    def test_unknown_fixture(self):
        with pytest.raises(ValidationError) as exc:
            build_fixture("mystery")
        assert exc.value.code == "unknown-fixture"

    def test_presets_carry_valid_witnesses(self):
        presets = witness_presets()
        assert sorted(presets) == sorted(PRESET_NAMES)
        for preset in presets.values():
            witness = MatroidWitness(preset.smaller, preset.larger)
            assert witness.holds_in(preset.system)
            assert preset.default_n >= 2

    def test_unknown_preset_name(self):
        with pytest.raises(ValidationError) as exc:
            build_fixture("pav-ejr-cex", {"witness": "nope"})
        assert exc.value.code == "bad-parameters"


class TestPavEjrCounterexample:
    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_reference_is_self_consistent(self, name):
        fx = build_fixture("pav-ejr-cex", {"witness": name})
        e = fx.election
        ref = fx.reference
        assert sorted(ref) == ["deserving", "ell", "pool", "score_gap", "swap"]
        assert e.system.is_feasible(ref["pool"])
        assert e.system.is_feasible(ref["swap"])
        assert len(ref["swap"]) > len(ref["pool"])
        assert ref["score_gap"] > 0
        assert deserves(e, ref["deserving"], ref["ell"]).ok

    def test_pairs_shape(self):
        fx = build_fixture("pav-ejr-cex", {})
        assert len(fx.election.voter_ids) == 12
        assert fx.reference["deserving"] == [f"v{i}" for i in range(1, 8)]
        assert fx.reference["ell"] == 1
        assert fx.reference["pool"] == ["x1"]
        assert fx.reference["swap"] == ["y1", "y2"]
        assert fx.reference["score_gap"] == Fraction(1, 2)

    def test_refuses_small_electorates(self):
        with pytest.raises(GeneratorRefusal) as exc:
            build_fixture("pav-ejr-cex", {"n": 6})
        assert exc.value.code == "n-too-small"

    def test_refuses_non_violating_witness(self):
        preset = witness_presets()["pairs"]
        with pytest.raises(GeneratorRefusal) as exc:
            gen_pav_ejr_counterexample(
                preset.system, frozenset({"y1"}), frozenset({"y1", "y2"}), 12
            )
        assert exc.value.code == "invalid-witness"


class TestPhragmenPjrCounterexample:
    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_reference_is_self_consistent(self, name):
        fx = build_fixture("phragmen-pjr-cex", {"witness": name})
        e = fx.election
        ref = fx.reference
        assert sorted(ref) == ["deserving", "ell", "pool"]
        assert e.system.is_feasible(ref["pool"])
        assert deserves(e, ref["deserving"], ref["ell"]).ok
        pool = set(ref["pool"])
        for vid in ref["deserving"]:
            vi = e.voter_ids.index(vid)
            assert pool <= e.voters[vi].approves

    def test_pairs_shape(self):
        fx = build_fixture("phragmen-pjr-cex", {})
        assert len(fx.election.voter_ids) == 9
        assert len(fx.reference["deserving"]) == 7
        assert fx.reference["ell"] == 2
        assert fx.reference["pool"] == ["y1", "y2"]

    def test_bad_n(self):
        with pytest.raises(ValidationError) as exc:
            build_fixture("phragmen-pjr-cex", {"n": 1})
        assert exc.value.code == "bad-parameters"


class TestWeightedPhragmenFailure:
    def test_reference_shape(self):
        fx = build_fixture("weighted-phragmen-failure", {"g": 4})
        ref = fx.reference
        assert sorted(ref) == ["claim", "deserving", "expected_outcome"]
        assert ref["expected_outcome"] == ["a1", "a2", "a3", "a4"]
        assert ref["claim"] == {"alpha": Fraction(5), "beta": 5}
        assert len(fx.election.voter_ids) == 40

    def test_refuses_when_claim_uncertifiable(self):
        with pytest.raises(GeneratorRefusal) as exc:
            build_fixture("weighted-phragmen-failure", {"g": 1})
        assert exc.value.code == "g-too-small"
        # a large eps erodes the bloc's budget advantage past certification
        with pytest.raises(GeneratorRefusal):
            build_fixture("weighted-phragmen-failure", {"g": 4, "eps": Fraction(1, 4)})

    def test_bad_eps(self):
        with pytest.raises(ValidationError) as exc:
            build_fixture("weighted-phragmen-failure", {"g": 4, "eps": Fraction(1)})
        assert exc.value.code == "bad-parameters"


class TestSpNotFjr:
    def test_reference_shape(self):
        fx = build_fixture("sp-not-fjr", {"n": 30})
        ref = fx.reference
        assert sorted(ref) == ["fjr_claim", "outcome", "price_system"]
        assert isinstance(ref["outcome"], frozenset)
        assert len(ref["outcome"]) == 80
        assert isinstance(ref["price_system"], PriceSystem)
        claim = ref["fjr_claim"]
        assert claim["beta"] == 5
        bloc = sorted(claim["group"])
        assert all(v.startswith(("sb", "se")) for v in bloc)
        assert len(bloc) == 2

    def test_scales_with_multiples(self):
        fx = build_fixture("sp-not-fjr", {"n": 60})
        assert len(fx.election.voter_ids) == 60
        assert len(fx.reference["fjr_claim"]["group"]) == 4

    @pytest.mark.parametrize("n", [31, 0, -30, True])
    def test_bad_n(self, n):
        with pytest.raises(GeneratorRefusal) as exc:
            build_fixture("sp-not-fjr", {"n": n})
        assert exc.value.code == "bad-n"


class TestRandom:
    def test_golden_seed_one(self):
        fx = build_fixture(
            "random", {"family": "committee", "n": 4, "m": 4, "k": 2, "seed": 1}
        )
        ballots = [sorted(v.approves) for v in fx.election.voters]
        assert ballots == [
            ["c1", "c4"],
            ["c1", "c2"],
            ["c1", "c2", "c4"],
            ["c2", "c3"],
        ]

    def test_same_seed_same_instance(self):
        params = {"family": "budget", "n": 5, "m": 5, "seed": 99}
        a = build_fixture("random", dict(params))
        b = build_fixture("random", dict(params))
        assert a.election.ballot_masks == b.election.ballot_masks
        assert a.provenance == b.provenance
        assert [a.election.system.weight(c) for c in a.election.system.ids] == [
            b.election.system.weight(c) for c in b.election.system.ids
        ]

    @pytest.mark.parametrize(
        "family", ["committee", "public-decisions", "disjoint-attributes", "budget", "explicit"]
    )
    def test_families_build_valid_systems(self, family):
        params = {"family": family, "n": 4, "seed": 17}
        if family == "public-decisions":
            params["issues"] = 2
        else:
            params["m"] = 4
        fx = build_fixture("random", params)
        system = fx.election.system
        assert system.contains_mask(0)
        assert fx.provenance["parameters"]["constraints"]["kind"] == family

    def test_density_must_be_exact(self):
        with pytest.raises(ValidationError) as exc:
            build_fixture("random", {"family": "committee", "density": 0.5})
        assert exc.value.code == "bad-parameters"

    def test_density_accepts_rational_spellings(self):
        base = {"family": "committee", "n": 3, "m": 3, "seed": 5}
        a = build_fixture("random", {**base, "density": Fraction(1, 3)})
        b = build_fixture("random", {**base, "density": "1/3"})
        assert a.election.ballot_masks == b.election.ballot_masks

    @pytest.mark.parametrize("density", [Fraction(2), Fraction(0), Fraction(-1, 2)])
    def test_density_out_of_range(self, density):
        with pytest.raises(ValidationError) as exc:
            build_fixture("random", {"family": "committee", "density": density})
        assert exc.value.code == "bad-parameters"

    def test_unknown_family(self):
        with pytest.raises(ValidationError) as exc:
            build_fixture("random", {"family": "galaxy"})
        assert exc.value.code == "bad-parameters"
