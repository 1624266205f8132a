"""Election data model: candidates, voters, utilities, and one feasibility system.

An election bundles a candidate universe, a voter list, a utility mode and a
downward-closed feasibility system over the same universe. Three utility modes
are supported:

- ``approval`` (default): each voter has an approval ballot and values a set
  by how many approved candidates it contains.
- ``additive``: each voter assigns a nonnegative value to some candidates and
  values a set by the total value of its members. The ballot is the set of
  candidates with positive value.
- ``table``: each voter lists values for explicit candidate subsets (at most
  16 candidates overall). The value of a set is the largest listed value of
  any listed subset it contains (zero if none), which is monotone by
  construction; listed entries must already be monotone. The ballot is the
  set of candidates whose singleton value exceeds the empty set's value.

Internally the universe is kept in sorted id order and voter ballots are
bitmasks over that order, matching the feasibility system's representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .constraints import FeasibilitySystem, build_system, _bits, _popcount
from .errors import ValidationError

MODES = ("approval", "additive", "table")
TABLE_MODE_MAX_CANDIDATES = 16

RationalLike = Union[int, str, Fraction]


@dataclass(frozen=True)
class Candidate:
    """A candidate; ``weight`` is its cost/size in weighted settings."""

    id: str
    weight: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError("bad-candidate-id", f"candidate id {self.id!r} must be a non-empty string")
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.weight <= 0:
            raise ValidationError("bad-weight", f"candidate {self.id!r} needs positive weight, got {self.weight}")


@dataclass(frozen=True)
class Voter:
    """A voter and their approval ballot (possibly derived from utilities)."""

    id: str
    approves: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError("bad-voter-id", f"voter id {self.id!r} must be a non-empty string")
        object.__setattr__(self, "approves", frozenset(self.approves))


class Election:
    """Immutable-by-convention container tying the pieces together."""

    def __init__(
        self,
        system: FeasibilitySystem,
        candidates: Sequence[Candidate],
        voters: Sequence[Voter],
        mode: str = "approval",
        additive_values: Optional[Sequence[Mapping[str, Fraction]]] = None,
        table_entries: Optional[Sequence[Mapping[frozenset[str], Fraction]]] = None,
    ):
        if mode not in MODES:
            raise ValidationError("bad-mode", f"utility mode must be one of {MODES}, got {mode!r}")
        self.system = system
        self.mode = mode
        by_id: dict[str, Candidate] = {}
        for cand in candidates:
            if cand.id in by_id:
                raise ValidationError("duplicate-id", f"duplicate candidate id {cand.id!r}")
            by_id[cand.id] = cand
        if set(by_id) != set(system.ids):
            raise ValidationError(
                "universe-mismatch", "the candidate list and the feasibility system universe differ"
            )
        self.candidates: tuple[Candidate, ...] = tuple(by_id[cid] for cid in system.ids)
        self.cand_ids: tuple[str, ...] = system.ids
        self.cand_index = system.index
        self.weights: tuple[Fraction, ...] = tuple(c.weight for c in self.candidates)
        if system.kind == "budget":
            for cand in self.candidates:
                if system.weight(cand.id) != cand.weight:
                    raise ValidationError(
                        "weight-mismatch",
                        f"candidate {cand.id!r} has weight {cand.weight} but the budget system says "
                        f"{system.weight(cand.id)}",
                    )
        if not voters:
            raise ValidationError("no-voters", "an election needs at least one voter")
        seen_voters: set[str] = set()
        for voter in voters:
            if voter.id in seen_voters:
                raise ValidationError("duplicate-id", f"duplicate voter id {voter.id!r}")
            seen_voters.add(voter.id)
        self.voters: tuple[Voter, ...] = tuple(voters)
        self.voter_ids: tuple[str, ...] = tuple(v.id for v in voters)
        self.voter_index: dict[str, int] = {v.id: i for i, v in enumerate(voters)}
        self.ballot_masks: tuple[int, ...] = tuple(system.mask_of(v.approves) for v in voters)

        self._additive: Optional[tuple[dict[int, Fraction], ...]] = None
        self._tables: Optional[tuple[tuple[tuple[int, Fraction], ...], ...]] = None
        if mode == "additive":
            if additive_values is None or len(additive_values) != len(voters):
                raise ValidationError("utilities-required", "additive mode needs one value map per voter")
            packed = []
            for values in additive_values:
                row: dict[int, Fraction] = {}
                for cid, val in values.items():
                    j = system.index.get(cid)
                    if j is None:
                        raise ValidationError("unknown-candidate", f"unknown candidate id {cid!r} in utilities")
                    val = Fraction(val)
                    if val < 0:
                        raise ValidationError("bad-utility", f"value for {cid!r} must be nonnegative, got {val}")
                    if val > 0:
                        row[j] = val
                packed.append(row)
            self._additive = tuple(packed)
        elif additive_values is not None:
            raise ValidationError("unexpected-utilities", "additive values only make sense in additive mode")
        if mode == "table":
            if table_entries is None or len(table_entries) != len(voters):
                raise ValidationError("utilities-required", "table mode needs one entry table per voter")
            if len(system.ids) > TABLE_MODE_MAX_CANDIDATES:
                raise ValidationError(
                    "table-too-large",
                    f"table mode supports at most {TABLE_MODE_MAX_CANDIDATES} candidates, got {len(system.ids)}",
                )
            packed_tables = []
            for entries in table_entries:
                rows: list[tuple[int, Fraction]] = []
                for subset, val in entries.items():
                    mask = system.mask_of(subset)
                    val = Fraction(val)
                    if val < 0:
                        raise ValidationError("bad-utility", f"table value must be nonnegative, got {val}")
                    rows.append((mask, val))
                rows.sort(key=lambda mv: (_popcount(mv[0]), mv[0]))
                for a, (ma, va) in enumerate(rows):
                    for mb, vb in rows[a + 1:]:
                        if ma & mb == ma and vb < va:
                            raise ValidationError(
                                "non-monotone",
                                "table entries must not value a superset below a subset "
                                f"({sorted(system.set_of(mb))} below {sorted(system.set_of(ma))})",
                            )
                packed_tables.append(tuple(rows))
            self._tables = tuple(packed_tables)
        elif table_entries is not None:
            raise ValidationError("unexpected-utilities", "table entries only make sense in table mode")

        if mode == "additive":
            derived = [self._mask_from_bits(row.keys()) for row in self._additive]
        elif mode == "table":
            derived = []
            for vi in range(len(voters)):
                empty_val = self._table_value(vi, 0)
                ballot = 0
                for j in range(len(system.ids)):
                    if self._table_value(vi, 1 << j) > empty_val:
                        ballot |= 1 << j
                derived.append(ballot)
        else:
            derived = None
        if derived is not None:
            for voter, given, want in zip(self.voters, self.ballot_masks, derived):
                if given and given != want:
                    raise ValidationError(
                        "ballot-utility-mismatch",
                        f"voter {voter.id!r} declares a ballot that disagrees with their utilities",
                    )
            self.ballot_masks = tuple(derived)
            self.voters = tuple(
                Voter(v.id, system.set_of(mask)) for v, mask in zip(self.voters, derived)
            )

        self.supporter_masks: tuple[int, ...] = tuple(
            self._supporter_mask(j) for j in range(len(system.ids))
        )

    # -- helpers --------------------------------------------------------------

    @staticmethod
    def _mask_from_bits(bits: Iterable[int]) -> int:
        mask = 0
        for j in bits:
            mask |= 1 << j
        return mask

    def _supporter_mask(self, j: int) -> int:
        mask = 0
        for vi, ballot in enumerate(self.ballot_masks):
            if ballot >> j & 1:
                mask |= 1 << vi
        return mask

    def _table_value(self, vi: int, wmask: int) -> Fraction:
        best = Fraction(0)
        for mask, val in self._tables[vi]:
            if mask & wmask == mask and val > best:
                best = val
        return best

    # -- sizes ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.voters)

    @property
    def m(self) -> int:
        return len(self.cand_ids)

    # -- utilities -------------------------------------------------------------

    def u_mask(self, vi: int, wmask: int) -> Fraction:
        """Utility of voter index ``vi`` for the candidate-mask ``wmask``."""

        if self.mode == "approval":
            return _popcount(self.ballot_masks[vi] & wmask)
        if self.mode == "additive":
            row = self._additive[vi]
            total = Fraction(0)
            for j in _bits(wmask & self.ballot_masks[vi]):
                total += row[j]
            return total
        return self._table_value(vi, wmask)

    def utility(self, voter_id: str, selection: Iterable[str]) -> Fraction:
        """Utility of the named voter for a candidate-id collection."""

        vi = self.voter_index.get(voter_id)
        if vi is None:
            raise ValidationError("unknown-voter", f"unknown voter id {voter_id!r}")
        return self.u_mask(vi, self.system.mask_of(selection))

    def max_utility(self, vi: int) -> Fraction:
        return self.u_mask(vi, self.system.full_mask)

    def achievable_utilities(self, vi: int) -> tuple[Fraction, ...]:
        """All values ``u_i(X)`` over subsets X of the universe, ascending."""

        if self.mode == "approval":
            return tuple(range(_popcount(self.ballot_masks[vi]) + 1))
        if self.mode == "additive":
            vals = sorted(self._additive[vi].values())
            sums = {Fraction(0)}
            for v in vals:
                sums |= {s + v for s in sums}
            return tuple(sorted(sums))
        vals = {Fraction(0)}
        vals.update(v for _, v in self._tables[vi])
        return tuple(sorted(vals))

    # -- supporters ------------------------------------------------------------

    def supporters(self, candidate_id: str) -> frozenset[str]:
        """Voters whose ballot contains the candidate."""

        j = self.cand_index.get(candidate_id)
        if j is None:
            raise ValidationError("unknown-candidate", f"unknown candidate id {candidate_id!r}")
        return frozenset(self.voter_ids[vi] for vi in _bits(self.supporter_masks[j]))

    # -- weights ---------------------------------------------------------------

    def weight_of(self, selection: Iterable[str]) -> Fraction:
        total = Fraction(0)
        for cid in selection:
            j = self.cand_index.get(cid)
            if j is None:
                raise ValidationError("unknown-candidate", f"unknown candidate id {cid!r}")
            total += self.weights[j]
        return total

    def weight_of_mask(self, wmask: int) -> Fraction:
        total = Fraction(0)
        for j in _bits(wmask):
            total += self.weights[j]
        return total

    def require_mode(self, *modes: str, context: str) -> None:
        if self.mode not in modes:
            raise ValidationError(
                "mode-not-supported", f"{context} requires utility mode in {modes}, election uses {self.mode!r}"
            )


CandidateLike = Union[str, tuple, dict, Candidate]
VoterLike = Union[str, tuple, dict, Voter, Iterable[str]]


def _as_candidate(spec: CandidateLike) -> Candidate:
    if isinstance(spec, Candidate):
        return spec
    if isinstance(spec, str):
        return Candidate(spec)
    if isinstance(spec, dict):
        return Candidate(spec["id"], Fraction(spec.get("weight", 1)))
    if isinstance(spec, tuple) and len(spec) == 2:
        return Candidate(spec[0], Fraction(spec[1]))
    raise ValidationError("bad-candidate", f"cannot interpret {spec!r} as a candidate")


def _as_voter(spec: VoterLike, auto_id: str) -> Voter:
    if isinstance(spec, Voter):
        return spec
    if isinstance(spec, str):
        return Voter(spec)
    if isinstance(spec, dict):
        return Voter(spec.get("id", auto_id), frozenset(spec.get("approves", ())))
    if isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[0], str) and not isinstance(spec[1], str):
        return Voter(spec[0], frozenset(spec[1]))
    try:
        ballot = frozenset(spec)
    except TypeError:
        raise ValidationError("bad-voter", f"cannot interpret {spec!r} as a voter") from None
    if not all(isinstance(c, str) for c in ballot):
        raise ValidationError("bad-voter", f"cannot interpret {spec!r} as a voter")
    return Voter(auto_id, ballot)


def build_election(
    candidates: Iterable[CandidateLike],
    voters: Optional[Iterable[VoterLike]],
    constraints: Union[FeasibilitySystem, dict],
    mode: str = "approval",
    utilities: Optional[Sequence] = None,
) -> Election:
    """Assemble an election from loosely-typed pieces.

    ``candidates`` entries may be ids, ``(id, weight)`` pairs, dicts or
    :class:`Candidate` objects. ``voters`` entries may be :class:`Voter`
    objects, ``(id, ballot)`` pairs, dicts with ``id``/``approves``, or bare
    ballots (iterables of candidate ids) which get auto ids ``v1, v2, ...``.
    In additive/table mode, ``voters`` may be ``None`` (ids are generated) and
    ``utilities`` must give one value map / entry table per voter; entry-table
    keys may be any iterable of candidate ids.

    ``constraints`` is either a prebuilt system or a dict description of one.
    """

    cand_objs = [_as_candidate(c) for c in candidates]
    weights = {c.id: c.weight for c in cand_objs}
    if isinstance(constraints, FeasibilitySystem):
        system = constraints
    else:
        system = build_system(
            constraints, weights=weights, universe=[c.id for c in cand_objs]
        )
    if voters is None:
        if utilities is None:
            raise ValidationError("no-voters", "need voters or utilities")
        voter_objs = [Voter(f"v{i + 1}") for i in range(len(utilities))]
    else:
        voter_objs = [_as_voter(v, f"v{i + 1}") for i, v in enumerate(voters)]
    additive = None
    tables = None
    if mode == "additive":
        if utilities is None:
            raise ValidationError("utilities-required", "additive mode needs a utilities argument")
        additive = [dict(row) for row in utilities]
    elif mode == "table":
        if utilities is None:
            raise ValidationError("utilities-required", "table mode needs a utilities argument")
        tables = [
            {frozenset(key): val for key, val in row.items()} for row in utilities
        ]
    elif utilities is not None:
        raise ValidationError("unexpected-utilities", "approval mode takes no utilities argument")
    return Election(
        system,
        cand_objs,
        voter_objs,
        mode=mode,
        additive_values=additive,
        table_entries=tables,
    )
