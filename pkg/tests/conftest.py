"""Shared instance corpora: deterministic, seeded, reused across test modules."""

from __future__ import annotations

import random

import pytest

from propchoice import Election, build_fixture

MATROID_FAMILIES = ("committee", "public-decisions", "disjoint-attributes")
ALL_FAMILIES = MATROID_FAMILIES + ("budget", "explicit")


def random_elections(
    family: str, count: int, seed: int, max_n: int = 8, max_m: int = 8
) -> list[Election]:
    """A deterministic stream of random instances for one constraint family."""

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        params: dict = {
            "family": family,
            "n": rng.randint(2, max_n),
            "seed": rng.randrange(10**9),
        }
        if family == "public-decisions":
            params["issues"] = rng.randint(1, max(1, max_m // 2))
        else:
            params["m"] = rng.randint(2, max_m)
        out.append(build_fixture("random", params).election)
    return out


@pytest.fixture(scope="session")
def matroid_corpus() -> dict[str, list[Election]]:
    """200 instances per matroid family, n <= 8, m <= 8."""

    return {
        family: random_elections(family, 200, seed=101 + i)
        for i, family in enumerate(MATROID_FAMILIES)
    }


@pytest.fixture(scope="session")
def mixed_corpus() -> list[Election]:
    """200 instances across all five families, n <= 6, m <= 6."""

    out: list[Election] = []
    for i, family in enumerate(ALL_FAMILIES):
        out.extend(random_elections(family, 40, seed=201 + i, max_n=6, max_m=6))
    return out


@pytest.fixture(scope="session")
def weighted_corpus() -> list[Election]:
    """100 budget-weighted instances, n <= 6, m <= 6."""

    return random_elections("budget", 100, seed=301, max_n=6, max_m=6)
