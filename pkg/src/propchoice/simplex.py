"""Exact rational linear programming (two-phase simplex, Bland's rule).

Small, deterministic, and tolerance-free: all arithmetic is on
``fractions.Fraction``, pivoting follows Bland's rule (smallest eligible
index enters; ties in the ratio test break toward the smallest basic
index), which guarantees termination.  Variables are nonnegative; rows may
use ``<=``, ``>=``, or ``==``.  Problems here are tiny (tens of variables),
so a dense tableau is plenty.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ValidationError

RELATIONS = ("<=", ">=", "==")


@dataclass(frozen=True)
class LinearProgram:
    """``maximize objective · x  subject to rows, x >= 0``.

    Each row is ``(coeffs, relation, rhs)`` with sparse ``coeffs`` mapping
    variable index to coefficient.  A ``None`` objective asks only for a
    feasible point.
    """

    n_vars: int
    rows: tuple[tuple[dict[int, Fraction], str, Fraction], ...]
    objective: Optional[dict[int, Fraction]] = None
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.n_vars < 0:
            raise ValidationError("bad-lp", "negative variable count")
        if self.names is not None and len(self.names) != self.n_vars:
            raise ValidationError("bad-lp", "names do not match the variable count")
        for coeffs, rel, _rhs in self.rows:
            if rel not in RELATIONS:
                raise ValidationError("bad-lp", f"unknown relation {rel!r}")
            for j in coeffs:
                if not 0 <= j < self.n_vars:
                    raise ValidationError("bad-lp", f"variable index {j} out of range")
        if self.objective is not None:
            for j in self.objective:
                if not 0 <= j < self.n_vars:
                    raise ValidationError("bad-lp", f"objective index {j} out of range")


@dataclass(frozen=True)
class LpResult:
    """Solve outcome.

    ``status`` is ``optimal``, ``infeasible``, or ``unbounded``.  For
    ``optimal``: ``point`` holds the variable values and ``value`` the
    objective (0 for pure feasibility).  For ``infeasible``: ``value``
    holds the positive phase-1 residue, a certificate that no assignment
    satisfies the rows.
    """

    status: str
    point: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    stats: dict = field(compare=False, default_factory=dict)

    def __bool__(self) -> bool:
        return self.status == "optimal"


def _pivot(
    tableau: list[list[Fraction]],
    rhs: list[Fraction],
    objs: list[tuple[list[Fraction], list[Fraction]]],
    basis: list[int],
    row: int,
    col: int,
) -> None:
    piv = tableau[row][col]
    inv = 1 / piv
    tableau[row] = [v * inv for v in tableau[row]]
    rhs[row] *= inv
    prow = tableau[row]
    pb = rhs[row]
    for r, arow in enumerate(tableau):
        if r == row:
            continue
        f = arow[col]
        if f:
            tableau[r] = [a - f * p for a, p in zip(arow, prow)]
            rhs[r] -= f * pb
    for orow, oval in objs:
        f = orow[col]
        if f:
            for j, p in enumerate(prow):
                if p:
                    orow[j] -= f * p
            oval[0] += f * pb
    basis[row] = col


def _optimize(
    tableau: list[list[Fraction]],
    rhs: list[Fraction],
    obj: list[Fraction],
    obj_val: list[Fraction],
    shadow: Optional[tuple[list[Fraction], list[Fraction]]],
    basis: list[int],
    allowed: int,
    pivots: list[int],
) -> str:
    """Bland-rule maximization over columns < ``allowed``; mutates in place."""

    objs = [(obj, obj_val)]
    if shadow is not None:
        objs.append(shadow)
    while True:
        col = next((j for j in range(allowed) if obj[j] > 0), None)
        if col is None:
            return "optimal"
        row = None
        best: Optional[Fraction] = None
        for r, arow in enumerate(tableau):
            a = arow[col]
            if a > 0:
                ratio = rhs[r] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[row]):
                    best, row = ratio, r
        if row is None:
            return "unbounded"
        _pivot(tableau, rhs, objs, basis, row, col)
        pivots[0] += 1


def lp_solve(program: LinearProgram) -> LpResult:
    """Maximize the objective (or find any feasible point) exactly."""

    n = program.n_vars
    rows = list(program.rows)
    n_slack = sum(1 for _, rel, _ in rows if rel != "==")
    total = n + n_slack + len(rows)  # structural + slack/surplus + artificial
    art_start = n + n_slack
    tableau: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    slack_at = n
    for r, (coeffs, rel, b) in enumerate(rows):
        line = [Fraction(0)] * total
        for j, v in coeffs.items():
            line[j] = Fraction(v)
        b = Fraction(b)
        if b < 0:
            line = [-v for v in line]
            b = -b
            rel = {"<=": ">=", ">=": "<=", "==": "=="}[rel]
        if rel == "<=":
            line[slack_at] = Fraction(1)
            slack_col = slack_at
            slack_at += 1
        elif rel == ">=":
            line[slack_at] = Fraction(-1)
            slack_col = None
            slack_at += 1
        else:
            slack_col = None
        if rel == "<=":
            basis.append(slack_col)
        else:
            line[art_start + r] = Fraction(1)
            basis.append(art_start + r)
        tableau.append(line)
        rhs.append(b)

    pivots = [0]
    # Phase 1: maximize minus the artificial sum, i.e. drive it to zero.
    obj1 = [Fraction(0)] * total
    val1 = [Fraction(0)]
    phase2_obj = [Fraction(0)] * total
    val2 = [Fraction(0)]
    if program.objective:
        for j, v in program.objective.items():
            phase2_obj[j] = Fraction(v)
    need_phase1 = False
    for r in range(len(rows)):
        if basis[r] >= art_start:
            need_phase1 = True
            for j in range(total):
                if j < art_start:
                    obj1[j] += tableau[r][j]
            val1[0] -= rhs[r]
    if need_phase1:
        status = _optimize(
            tableau, rhs, obj1, val1, (phase2_obj, val2), basis, art_start, pivots
        )
        if status == "unbounded":  # cannot happen: phase-1 objective <= 0
            raise ValidationError("bad-lp", "phase 1 reported unbounded")
        if val1[0] != 0:
            return LpResult("infeasible", value=-val1[0], stats={"pivots": pivots[0]})
        # Drive leftover artificials out of the basis (degenerate rows).
        for r in range(len(tableau)):
            if basis[r] >= art_start:
                col = next(
                    (j for j in range(art_start) if tableau[r][j] != 0), None
                )
                if col is not None:
                    _pivot(tableau, rhs, [(phase2_obj, val2)], basis, r, col)
                    pivots[0] += 1
        keep = [r for r in range(len(tableau)) if basis[r] < art_start]
        tableau = [tableau[r] for r in keep]
        rhs = [rhs[r] for r in keep]
        basis = [basis[r] for r in keep]

    # Phase 2 (basic columns already eliminated from the shadow objective).
    if program.objective:
        status = _optimize(
            tableau, rhs, phase2_obj, val2, None, basis, art_start, pivots
        )
        if status == "unbounded":
            return LpResult("unbounded", stats={"pivots": pivots[0]})
    point = [Fraction(0)] * n
    for r, bcol in enumerate(basis):
        if bcol < n:
            point[bcol] = rhs[r]
    value = Fraction(0)
    if program.objective:
        value = sum(
            (Fraction(v) * point[j] for j, v in program.objective.items()),
            Fraction(0),
        )
    return LpResult("optimal", tuple(point), value, stats={"pivots": pivots[0]})


def lp_feasible(program: LinearProgram) -> LpResult:
    """Find any exact feasible point, ignoring the objective."""

    if program.objective is None:
        return lp_solve(program)
    stripped = LinearProgram(program.n_vars, program.rows, None, program.names)
    return lp_solve(stripped)
