"""JSON interchange: election files, price systems, fixture bundles, reports.

All rational numbers cross the boundary as strings ``"p/q"`` in lowest terms
(bare ``"p"`` when the denominator is 1); floats are rejected outright.  The
emitters are canonical — :func:`canonical_dumps` output re-parses to an equal
object and re-emits byte-identically.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Mapping, Optional

from .constraints import (
    BudgetSystem,
    CommitteeSystem,
    DisjointAttributesSystem,
    ExplicitSystem,
    FeasibilitySystem,
    JudgmentSystem,
    NegativeVotesSystem,
    PublicDecisionsSystem,
    RankingSystem,
    _maximal_masks,
)
from .errors import ParseError, ValidationError
from .model import Election, build_election
from .priceability import PriceSystem

SCHEMA_VERSION = 1

_FRACTION_RE = re.compile(r"^-?\d+(/\d+)?$")


# ---------------------------------------------------------------------------
# rationals
# ---------------------------------------------------------------------------


def fraction_to_str(value: Fraction) -> str:
    """Lowest-terms string form: ``"3/2"``, or ``"7"`` for integers."""

    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(value: Any, where: str = "value") -> Fraction:
    """Parse ``"p/q"`` strings or exact JSON integers; anything else fails."""

    if isinstance(value, bool):
        raise ParseError("bad-rational", f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ParseError("float-forbidden", f"{where}: floats are not accepted, use \"p/q\" strings")
    if isinstance(value, str):
        if not _FRACTION_RE.match(value):
            raise ParseError("bad-rational", f"{where}: {value!r} is not a \"p/q\" rational")
        try:
            return Fraction(value)
        except ZeroDivisionError:
            raise ParseError("bad-rational", f"{where}: zero denominator in {value!r}") from None
    raise ParseError("bad-rational", f"{where}: cannot read {value!r} as a rational")


def _require_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("bad-integer", f"{where}: expected an integer, got {value!r}")
    return value


def _require_str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise ParseError("bad-string", f"{where}: expected a string, got {value!r}")
    return value


def _require_list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError("bad-list", f"{where}: expected a list, got {value!r}")
    return value


def _require_dict(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError("bad-object", f"{where}: expected an object, got {value!r}")
    return value


def _str_list(value: Any, where: str) -> list[str]:
    return [_require_str(x, where) for x in _require_list(value, where)]


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------


def _refuse_float(text: str) -> Fraction:
    raise ParseError("float-forbidden", f"floats are not accepted in input files (saw {text})")


def loads(text: str, where: str = "input") -> Any:
    """``json.loads`` with positioned errors and a hard float rejection."""

    try:
        return json.loads(text, parse_float=_refuse_float)
    except json.JSONDecodeError as exc:
        raise ParseError(
            "malformed-json", f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


def canonical_dumps(payload: Any) -> str:
    """Stable serialization: sorted keys, two-space indent, trailing newline."""

    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _check_schema(data: Mapping, where: str) -> None:
    version = data.get("schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError("bad-schema", f"{where}: unsupported schema version {version!r}")


# ---------------------------------------------------------------------------
# feasibility systems
# ---------------------------------------------------------------------------


def system_to_spec(system: FeasibilitySystem) -> dict:
    """Canonical plain-dict description, invertible via ``build_system``."""

    if isinstance(system, CommitteeSystem):
        return {"kind": "committee", "k": system.k, "candidates": list(system.ids)}
    if isinstance(system, PublicDecisionsSystem):
        return {"kind": "public-decisions", "issues": [list(pair) for pair in system.issues]}
    if isinstance(system, DisjointAttributesSystem):
        return {
            "kind": "disjoint-attributes",
            "k": system.k,
            "groups": [
                {"ids": list(gids), "lower": lo, "upper": hi}
                for gids, lo, hi in system.groups
            ],
        }
    if isinstance(system, BudgetSystem):
        spec: dict = {"kind": "budget", "candidates": list(system.ids)}
        if system.limit is not None:
            spec["limit"] = fraction_to_str(system.limit)
        if system.group_defs:
            spec["groups"] = [
                {"ids": list(gids), "cap": fraction_to_str(cap)}
                for gids, cap in system.group_defs
            ]
        return spec
    if isinstance(system, ExplicitSystem):
        maximal = [
            sorted(system.set_of(mask)) for mask in _maximal_masks(system, len(system.masks) + 1)
        ]
        return {"kind": "explicit", "candidates": list(system.ids), "feasible": sorted(maximal)}
    if isinstance(system, RankingSystem):
        return {"kind": "ranking", "items": list(system.items)}
    if isinstance(system, NegativeVotesSystem):
        return {"kind": "negative-votes", "candidates": list(system.base), "k": system.k}
    if isinstance(system, JudgmentSystem):
        clauses = [
            [system.variables[var] if positive else f"~{system.variables[var]}" for var, positive in clause]
            for clause in system.clauses
        ]
        return {"kind": "judgment", "variables": list(system.variables), "clauses": clauses}
    raise ValidationError("unknown-system", f"cannot serialize a {type(system).__name__}")


def _spec_from_data(data: Any) -> dict:
    """Validate the raw constraints object: shapes, integers, rationals."""

    spec = dict(_require_dict(data, "constraints"))
    kind = _require_str(spec.get("kind"), "constraints.kind")
    if kind == "committee":
        spec["k"] = _require_int(spec.get("k"), "committee k")
        if "candidates" in spec:
            spec["candidates"] = _str_list(spec["candidates"], "committee candidates")
    elif kind == "public-decisions":
        issues = _require_list(spec.get("issues"), "issues")
        spec["issues"] = [_str_list(pair, "issue") for pair in issues]
    elif kind == "disjoint-attributes":
        spec["k"] = _require_int(spec.get("k"), "disjoint-attributes k")
        groups = []
        for raw in _require_list(spec.get("groups"), "groups"):
            g = _require_dict(raw, "group")
            groups.append(
                {
                    "ids": _str_list(g.get("ids"), "group ids"),
                    "lower": _require_int(g.get("lower", 0), "group lower"),
                    "upper": _require_int(g.get("upper"), "group upper"),
                }
            )
        spec["groups"] = groups
    elif kind == "budget":
        if "limit" in spec and spec["limit"] is not None:
            spec["limit"] = parse_fraction(spec["limit"], "budget limit")
        if "groups" in spec:
            groups = []
            for raw in _require_list(spec["groups"], "budget groups"):
                g = _require_dict(raw, "budget group")
                groups.append(
                    {
                        "ids": _str_list(g.get("ids"), "budget group ids"),
                        "cap": parse_fraction(g.get("cap"), "budget group cap"),
                    }
                )
            spec["groups"] = groups
        if "candidates" in spec:
            spec["candidates"] = _str_list(spec["candidates"], "budget candidates")
    elif kind == "explicit":
        feasible = _require_list(spec.get("feasible"), "feasible sets")
        spec["feasible"] = [_str_list(s, "feasible set") for s in feasible]
        if "candidates" in spec:
            spec["candidates"] = _str_list(spec["candidates"], "explicit candidates")
    elif kind == "ranking":
        spec["items"] = _str_list(spec.get("items"), "ranking items")
    elif kind == "negative-votes":
        spec["candidates"] = _str_list(spec.get("candidates"), "base candidates")
        spec["k"] = _require_int(spec.get("k"), "negative-votes k")
    elif kind == "judgment":
        spec["variables"] = _str_list(spec.get("variables"), "variables")
        clauses = _require_list(spec.get("clauses"), "clauses")
        spec["clauses"] = [_str_list(c, "clause") for c in clauses]
    else:
        raise ParseError("bad-constraints", f"unknown constraint kind {kind!r}")
    return spec


# ---------------------------------------------------------------------------
# elections
# ---------------------------------------------------------------------------


def election_to_dict(e: Election) -> dict:
    """Lossless, canonical document; see :func:`election_from_dict`."""

    candidates = []
    for cand in e.candidates:
        entry: dict = {"id": cand.id}
        if cand.weight != 1:
            entry["weight"] = fraction_to_str(cand.weight)
        candidates.append(entry)

    voters = []
    if e.mode == "approval":
        for voter in e.voters:
            voters.append({"id": voter.id, "approves": sorted(voter.approves)})
    elif e.mode == "additive":
        for voter, row in zip(e.voters, e._additive):
            values = {e.cand_ids[j]: fraction_to_str(v) for j, v in row.items()}
            voters.append({"id": voter.id, "utilities": values})
    else:  # table
        for voter, rows in zip(e.voters, e._tables):
            entries = [
                {"set": sorted(e.system.set_of(mask)), "value": fraction_to_str(v)}
                for mask, v in rows
            ]
            voters.append({"id": voter.id, "utilities": entries})

    doc = {
        "schema": SCHEMA_VERSION,
        "candidates": candidates,
        "voters": voters,
        "constraints": system_to_spec(e.system),
    }
    if e.mode != "approval":
        doc["utility_mode"] = e.mode
    return doc


def election_from_dict(data: Any) -> Election:
    """Parse an election document (inverse of :func:`election_to_dict`)."""

    data = _require_dict(data, "election")
    _check_schema(data, "election")
    mode = data.get("utility_mode", "approval")
    if mode not in ("approval", "additive", "table"):
        raise ParseError("bad-mode", f"unknown utility_mode {mode!r}")

    candidates = []
    for raw in _require_list(data.get("candidates"), "candidates"):
        c = _require_dict(raw, "candidate")
        cid = _require_str(c.get("id"), "candidate id")
        weight = parse_fraction(c.get("weight", 1), f"candidate {cid!r} weight")
        candidates.append((cid, weight))

    voter_rows = _require_list(data.get("voters"), "voters")
    voters: list = []
    utilities: Optional[list] = None
    if mode == "approval":
        for raw in voter_rows:
            v = _require_dict(raw, "voter")
            vid = _require_str(v.get("id"), "voter id")
            voters.append((vid, _str_list(v.get("approves", []), f"voter {vid!r} approves")))
    elif mode == "additive":
        utilities = []
        for raw in voter_rows:
            v = _require_dict(raw, "voter")
            vid = _require_str(v.get("id"), "voter id")
            values = _require_dict(v.get("utilities"), f"voter {vid!r} utilities")
            voters.append({"id": vid})
            utilities.append(
                {cid: parse_fraction(val, f"utility of {cid!r}") for cid, val in values.items()}
            )
    else:
        utilities = []
        for raw in voter_rows:
            v = _require_dict(raw, "voter")
            vid = _require_str(v.get("id"), "voter id")
            table: dict = {}
            for entry in _require_list(v.get("utilities"), f"voter {vid!r} utilities"):
                entry = _require_dict(entry, "table entry")
                key = frozenset(_str_list(entry.get("set"), "table entry set"))
                if key in table:
                    raise ParseError(
                        "duplicate-table-entry", f"voter {vid!r} values {sorted(key)} twice"
                    )
                table[key] = parse_fraction(entry.get("value"), "table entry value")
            voters.append({"id": vid})
            utilities.append(table)

    constraints = _spec_from_data(data.get("constraints"))
    return build_election(candidates, voters, constraints, mode=mode, utilities=utilities)


# ---------------------------------------------------------------------------
# price systems
# ---------------------------------------------------------------------------


def price_system_to_dict(ps: PriceSystem) -> dict:
    payments = [
        {"voter": vid, "candidate": cid, "amount": fraction_to_str(value)}
        for (vid, cid), value in sorted(ps.payments.items())
        if value != 0
    ]
    return {
        "schema": SCHEMA_VERSION,
        "prices": {cid: fraction_to_str(p) for cid, p in ps.prices.items()},
        "payments": payments,
    }


def price_system_from_dict(data: Any) -> PriceSystem:
    data = _require_dict(data, "price system")
    _check_schema(data, "price system")
    prices = {
        _require_str(cid, "candidate id"): parse_fraction(p, f"price of {cid!r}")
        for cid, p in _require_dict(data.get("prices"), "prices").items()
    }
    payments: dict[tuple[str, str], Fraction] = {}
    for raw in _require_list(data.get("payments", []), "payments"):
        row = _require_dict(raw, "payment")
        key = (_require_str(row.get("voter"), "payment voter"),
               _require_str(row.get("candidate"), "payment candidate"))
        if key in payments:
            raise ParseError("duplicate-payment", f"payment {key} appears twice")
        payments[key] = parse_fraction(row.get("amount"), "payment amount")
    return PriceSystem(prices, payments)


# ---------------------------------------------------------------------------
# generic conversion (report payloads, fixture references)
# ---------------------------------------------------------------------------


def to_jsonable(obj: Any) -> Any:
    """Convert library values to JSON-ready data (exact rationals as strings)."""

    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fraction_to_str(obj)
    if isinstance(obj, float):
        raise ValidationError("float-forbidden", f"refusing to serialize float {obj!r}")
    if isinstance(obj, PriceSystem):
        return price_system_to_dict(obj)
    if isinstance(obj, Election):
        return election_to_dict(obj)
    if isinstance(obj, (frozenset, set)):
        return sorted(to_jsonable(x) for x in obj)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, Mapping):
        out = {}
        for key, value in obj.items():
            if not isinstance(key, str):
                raise ValidationError("bad-key", f"cannot serialize non-string key {key!r}")
            out[key] = to_jsonable(value)
        return out
    raise ValidationError("unserializable", f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# fixture bundles
# ---------------------------------------------------------------------------


def fixture_to_bundle(fixture) -> dict:
    """Self-contained document: election + reference artifacts + provenance."""

    return {
        "schema": SCHEMA_VERSION,
        "election": election_to_dict(fixture.election),
        "reference": to_jsonable(fixture.reference),
        "provenance": to_jsonable(fixture.provenance),
    }


def is_bundle(data: Any) -> bool:
    return isinstance(data, dict) and "election" in data


def election_from_any(data: Any) -> Election:
    """Accept either a bare election document or a fixture bundle."""

    if is_bundle(data):
        return election_from_dict(_require_dict(data, "bundle")["election"])
    return election_from_dict(data)
