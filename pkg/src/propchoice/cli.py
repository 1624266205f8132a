"""Command-line interface: run rules, audit axioms, check claims, emit fixtures.

Every command reads JSON documents (election files or fixture bundles, ``-``
for stdin) and writes a JSON report to stdout (``--format text`` for a plain
rendering).  Audit verdicts are data, not errors: a failed audit still exits
0.  Exit codes signal operational problems only: 2 for unparseable input,
3 for violated preconditions, 4 for generator refusals, 5 for enumeration
cap overruns.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

import click

from .axioms import (
    AuditReport,
    audit_core,
    audit_ejr,
    audit_ejr_weighted,
    audit_fjr,
    audit_pjr,
    audit_pjr_weighted,
    audit_restrained_ejr,
    cohesive,
    deserves,
    deserves_weighted,
)
from .constraints import DEFAULT_CAP, CommitteeSystem, check_exchange_property
from .errors import (
    EnumerationCapExceeded,
    GeneratorRefusal,
    ParseError,
    PropChoiceError,
    ValidationError,
)
from .fixtures import FIXTURE_IDS, build_fixture, witness_presets
from .greedy_cohesive import construct_fjr_outcome
from .jsonio import (
    canonical_dumps,
    election_from_any,
    fraction_to_str,
    fixture_to_bundle,
    is_bundle,
    loads,
    parse_fraction,
    price_system_from_dict,
    to_jsonable,
)
from .pav import solve_pav_exact
from .phragmen import PhragmenTrace, run_phragmen, run_phragmen_weighted
from .priceability import verify_sp

RULES = ("pav", "phragmen", "phragmen-weighted", "greedy-cohesive")
AXIOMS = ("ejr", "pjr", "fjr", "fjr-adaptive", "core", "restrained-ejr",
          "ejr-weighted", "pjr-weighted")

EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_REFUSAL = 4
EXIT_CAP = 5


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise ParseError("unreadable-file", f"cannot read {path}: {exc}") from None


def _read_json(path: str) -> Any:
    return loads(_read_text(path), where=path)


def _parse_ids(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _emit(ctx: click.Context, report: dict, lines: Sequence[str]) -> None:
    if ctx.obj.get("format") == "text":
        for line in lines:
            click.echo(line)
    else:
        click.echo(canonical_dumps(report), nl=False)


def _report(command: Sequence[str], **fields: Any) -> dict:
    doc = {"schema": 1, "command": list(command)}
    doc.update(fields)
    return doc


def _trace_payload(trace: PhragmenTrace) -> dict:
    return {
        "weighted": trace.weighted,
        "final_time": fraction_to_str(trace.final_time),
        "events": [
            {
                "time": fraction_to_str(ev.time),
                "candidate": ev.candidate,
                "payments": {vid: fraction_to_str(x) for vid, x in ev.payments.items()},
                "reset": sorted(ev.reset),
            }
            for ev in trace.events
        ],
        "removals": [
            {"time": fraction_to_str(t), "candidate": cid, "reason": reason}
            for t, cid, reason in trace.removals
        ],
        "unsupported": sorted(trace.unsupported),
    }


def _audit_payload(rep: AuditReport) -> dict:
    payload = {
        "axiom": rep.axiom,
        "satisfied": rep.satisfied,
        "witness": to_jsonable(rep.witness),
    }
    if rep.mode is not None:
        payload["mode"] = rep.mode
    return payload


def _compact(value: Any) -> str:
    return json.dumps(to_jsonable(value), sort_keys=True)


# ---------------------------------------------------------------------------
# command group
# ---------------------------------------------------------------------------


@click.group(name="propchoice")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json",
              help="Report rendering (default: json).")
@click.pass_context
def cli(ctx: click.Context, fmt: str) -> None:
    """Proportional social choice under feasibility constraints."""

    ctx.ensure_object(dict)
    ctx.obj["format"] = fmt


@cli.command("rule")
@click.argument("rule_name", metavar="RULE", type=click.Choice(RULES))
@click.argument("file", metavar="FILE")
@click.option("--cap", type=int, default=DEFAULT_CAP, help="Enumeration size cap.")
@click.option("--method", type=click.Choice(["auto", "elements", "counts"]), default="auto",
              help="Cohesiveness oracle for greedy-cohesive.")
@click.pass_context
def cmd_rule(ctx: click.Context, rule_name: str, file: str, cap: int, method: str) -> None:
    """Run a voting rule on an election file (or fixture bundle)."""

    e = election_from_any(_read_json(file))
    report = _report(["rule", rule_name, file], rule=rule_name)
    lines = [f"rule: {rule_name}"]
    if rule_name == "pav":
        res = solve_pav_exact(e, cap=cap)
        report["score"] = fraction_to_str(res.score)
        report["outcomes"] = [sorted(w) for w in res.winners]
        lines.append(f"score: {report['score']}")
        for w in report["outcomes"]:
            lines.append("outcome: " + " ".join(w))
    elif rule_name in ("phragmen", "phragmen-weighted"):
        runner = run_phragmen if rule_name == "phragmen" else run_phragmen_weighted
        trace = runner(e)
        report["outcomes"] = [sorted(trace.outcome)]
        report["trace"] = _trace_payload(trace)
        lines.append("outcome: " + " ".join(report["outcomes"][0]))
        for ev in trace.events:
            lines.append(f"  t={fraction_to_str(ev.time)} buy {ev.candidate}")
    else:
        res = construct_fjr_outcome(e, method=method, cap=cap)
        report["outcomes"] = [sorted(res.outcome)]
        report["slates"] = [sorted(s) for s in res.slates]
        report["partition"] = [
            {
                "voters": sorted(g.voters),
                "alpha": g.alpha,
                "beta": fraction_to_str(g.beta),
            }
            for g in res.partition.groups
        ]
        lines.append("outcome: " + " ".join(report["outcomes"][0]))
        for part in report["partition"]:
            lines.append(
                f"  group [{' '.join(part['voters'])}] claims "
                f"alpha={part['alpha']} beta={part['beta']}"
            )
    _emit(ctx, report, lines)


@cli.command("audit")
@click.argument("axiom", metavar="AXIOM", type=click.Choice(AXIOMS))
@click.argument("file", metavar="FILE")
@click.option("--outcome", "outcome_text", required=True,
              help="Comma-separated winning candidate ids (may be empty).")
@click.option("--groups", type=click.Choice(["closure", "subsets"]), default="closure",
              help="Group enumeration strategy.")
@click.option("--method", type=click.Choice(["auto", "elements", "counts"]), default="auto",
              help="Counter-proposal enumeration.")
@click.option("--cap", type=int, default=DEFAULT_CAP, help="Enumeration size cap.")
@click.option("--k", type=int, default=None,
              help="Seat budget for restrained-ejr (default: the committee size).")
@click.pass_context
def cmd_audit(ctx: click.Context, axiom: str, file: str, outcome_text: str,
              groups: str, method: str, cap: int, k: Optional[int]) -> None:
    """Audit an outcome against a proportionality axiom."""

    e = election_from_any(_read_json(file))
    outcome = _parse_ids(outcome_text)
    if axiom == "ejr":
        rep = audit_ejr(e, outcome, groups=groups, method=method, cap=cap)
    elif axiom == "pjr":
        rep = audit_pjr(e, outcome, groups=groups, method=method, cap=cap)
    elif axiom == "fjr":
        rep = audit_fjr(e, outcome, mode="fixed", method=method, cap=cap)
    elif axiom == "fjr-adaptive":
        rep = audit_fjr(e, outcome, mode="adaptive", method=method, cap=cap)
    elif axiom == "core":
        rep = audit_core(e, outcome, method=method, cap=cap)
    elif axiom == "restrained-ejr":
        if k is None:
            if isinstance(e.system, CommitteeSystem):
                k = e.system.k
            else:
                raise ValidationError(
                    "k-required", "restrained-ejr needs --k outside committee systems"
                )
        rep = audit_restrained_ejr(e, outcome, k, cap=cap)
    elif axiom == "ejr-weighted":
        rep = audit_ejr_weighted(e, outcome, groups=groups, method=method, cap=cap)
    else:
        rep = audit_pjr_weighted(e, outcome, groups=groups, method=method, cap=cap)

    report = _report(
        ["audit", axiom, file, "--outcome", outcome_text],
        outcome=sorted(outcome),
        audit=_audit_payload(rep),
    )
    lines = [
        f"axiom: {axiom}",
        "outcome: " + " ".join(sorted(outcome)),
        f"satisfied: {'yes' if rep.satisfied else 'no'}",
    ]
    if rep.witness is not None:
        lines.append("witness: " + _compact(rep.witness))
    _emit(ctx, report, lines)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


@cli.group("check")
def cmd_check() -> None:
    """Verify structural properties and explicit claims."""


@cmd_check.command("matroid")
@click.argument("file", metavar="FILE")
@click.option("--cap", type=int, default=DEFAULT_CAP, help="Enumeration size cap.")
@click.pass_context
def check_matroid(ctx: click.Context, file: str, cap: int) -> None:
    """Search the constraint structure for an exchange-property violation."""

    e = election_from_any(_read_json(file))
    witness = check_exchange_property(e.system, cap=cap)
    payload = None
    if witness is not None:
        payload = {"smaller": sorted(witness.smaller), "larger": sorted(witness.larger)}
    report = _report(["check", "matroid", file], is_matroid=witness is None, witness=payload)
    lines = [f"matroid: {'yes' if witness is None else 'no'}"]
    if payload is not None:
        lines.append("smaller: " + " ".join(payload["smaller"]))
        lines.append("larger:  " + " ".join(payload["larger"]))
    _emit(ctx, report, lines)


@cmd_check.command("feasible")
@click.argument("file", metavar="FILE")
@click.option("--set", "set_text", required=True, help="Comma-separated candidate ids.")
@click.pass_context
def check_feasible(ctx: click.Context, file: str, set_text: str) -> None:
    """Decide whether a candidate set is feasible."""

    e = election_from_any(_read_json(file))
    selection = _parse_ids(set_text)
    verdict = e.system.is_feasible(selection)
    report = _report(["check", "feasible", file, "--set", set_text],
                     set=sorted(selection), feasible=verdict)
    _emit(ctx, report, [f"feasible: {'yes' if verdict else 'no'}"])


@cmd_check.command("sp")
@click.argument("file", metavar="FILE")
@click.option("--prices", "prices_file", default=None,
              help="Price-system file (defaults to the bundle's reference).")
@click.option("--outcome", "outcome_text", default=None,
              help="Comma-separated outcome (defaults to the bundle's reference).")
@click.option("--mode", type=click.Choice(["sp4-producer", "exhaustive"]),
              default="sp4-producer", help="SP4 interpretation.")
@click.option("--cap", type=int, default=DEFAULT_CAP, help="Enumeration size cap.")
@click.pass_context
def check_sp(ctx: click.Context, file: str, prices_file: Optional[str],
             outcome_text: Optional[str], mode: str, cap: int) -> None:
    """Verify a concrete price system against the SP1-SP4 conditions.

    FILE may be an election file plus --prices/--outcome, or a fixture
    bundle whose reference carries both (e.g. piped from
    ``propchoice fixture sp-not-fjr``).
    """

    data = _read_json(file)
    e = election_from_any(data)
    reference = data.get("reference", {}) if is_bundle(data) else {}
    if prices_file is not None:
        ps = price_system_from_dict(_read_json(prices_file))
    elif isinstance(reference.get("price_system"), dict):
        ps = price_system_from_dict(reference["price_system"])
    else:
        raise ParseError("missing-prices", "no --prices file and no reference price system")
    if outcome_text is not None:
        outcome = _parse_ids(outcome_text)
    elif isinstance(reference.get("outcome"), list):
        outcome = list(reference["outcome"])
    else:
        raise ParseError("missing-outcome", "no --outcome and no reference outcome")

    rep = verify_sp(e, outcome, ps, mode=mode, cap=cap)
    report = _report(
        ["check", "sp", file],
        outcome=sorted(outcome),
        stable_priceable=rep.ok,
        mode=rep.mode,
        conditions=dict(rep.conditions),
        details=dict(rep.details),
    )
    lines = [f"stable-priceable: {'yes' if rep.ok else 'no'}"]
    for name in sorted(rep.conditions):
        verdict = "pass" if rep.conditions[name] else "FAIL"
        note = rep.details.get(name)
        lines.append(f"  {name}: {verdict}" + (f" ({note})" if note else ""))
    _emit(ctx, report, lines)


@cmd_check.command("deserves")
@click.argument("file", metavar="FILE")
@click.option("--group", "group_text", required=True, help="Comma-separated voter ids.")
@click.option("--ell", type=int, default=None, help="Claimed seat count (unweighted).")
@click.option("--alpha", default=None, help="Claimed weight budget (weighted, \"p/q\").")
@click.option("--beta", type=int, default=None, help="Claimed winner count (weighted).")
@click.option("--method", default="auto", help="Counter-proposal enumeration.")
@click.option("--cap", type=int, default=DEFAULT_CAP, help="Enumeration size cap.")
@click.pass_context
def check_deserves(ctx: click.Context, file: str, group_text: str, ell: Optional[int],
                   alpha: Optional[str], beta: Optional[int], method: str, cap: int) -> None:
    """Re-check a deservedness claim (--ell, or --alpha with --beta)."""

    e = election_from_any(_read_json(file))
    group = _parse_ids(group_text)
    if (alpha is None) != (beta is None):
        raise ValidationError("bad-claim", "weighted claims need both --alpha and --beta")
    if alpha is not None:
        if ell is not None:
            raise ValidationError("bad-claim", "give either --ell or --alpha/--beta, not both")
        res = deserves_weighted(e, group, parse_fraction(alpha, "--alpha"), beta,
                                method=method, cap=cap)
        claim: dict = {"alpha": alpha, "beta": beta}
    else:
        if ell is None:
            raise ValidationError("bad-claim", "an unweighted claim needs --ell")
        res = deserves(e, group, ell, method=method, cap=cap)
        claim = {"ell": ell}
    report = _report(
        ["check", "deserves", file, "--group", group_text],
        group=sorted(group),
        claim=claim,
        deserves=res.ok,
        refuter=to_jsonable(res.refuter),
        method=res.method,
    )
    lines = [f"deserves: {'yes' if res.ok else 'no'}"]
    if res.refuter is not None:
        lines.append("refuter: " + " ".join(sorted(res.refuter)))
    _emit(ctx, report, lines)


@cmd_check.command("cohesive")
@click.argument("file", metavar="FILE")
@click.option("--group", "group_text", required=True, help="Comma-separated voter ids.")
@click.option("--alpha", type=int, default=None, help="Slate size (fixed mode).")
@click.option("--beta", required=True, help="Per-member utility target (\"p/q\").")
@click.option("--mode", type=click.Choice(["fixed", "adaptive"]), default="fixed")
@click.option("--method", default="auto", help="Counter-proposal enumeration.")
@click.option("--cap", type=int, default=DEFAULT_CAP, help="Enumeration size cap.")
@click.pass_context
def check_cohesive(ctx: click.Context, file: str, group_text: str, alpha: Optional[int],
                   beta: str, mode: str, method: str, cap: int) -> None:
    """Re-check an (alpha, beta)-cohesiveness claim."""

    e = election_from_any(_read_json(file))
    group = _parse_ids(group_text)
    res = cohesive(e, group, alpha, parse_fraction(beta, "--beta"),
                   mode=mode, method=method, cap=cap)
    report = _report(
        ["check", "cohesive", file, "--group", group_text],
        group=sorted(group),
        claim={"alpha": alpha, "beta": beta, "mode": mode},
        cohesive=res.ok,
        refuter=to_jsonable(res.refuter),
        method=res.method,
    )
    lines = [f"cohesive: {'yes' if res.ok else 'no'}"]
    if res.refuter is not None:
        lines.append("refuter: " + " ".join(sorted(res.refuter)))
    _emit(ctx, report, lines)


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


@cli.command("fixture")
@click.argument("fixture_id", metavar="ID")
@click.option("--n", type=int, default=None, help="Voter count.")
@click.option("--g", type=int, default=None, help="Group count (weighted failure).")
@click.option("--eps", default=None, help="Rational epsilon, e.g. 1/100.")
@click.option("--seed", type=int, default=None, help="Random seed.")
@click.option("--witness", default=None,
              help=f"Encoding preset ({', '.join(witness_presets())}).")
@click.option("--family", default=None, help="Random family.")
@click.option("--m", type=int, default=None, help="Candidate count (random).")
@click.option("--issues", type=int, default=None, help="Issue count (random).")
@click.option("--k", type=int, default=None, help="Committee size (random).")
@click.option("--density", default=None, help="Approval probability, e.g. 1/2.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the bundle here instead of stdout.")
def cmd_fixture(fixture_id: str, n: Optional[int], g: Optional[int], eps: Optional[str],
                seed: Optional[int], witness: Optional[str], family: Optional[str],
                m: Optional[int], issues: Optional[int], k: Optional[int],
                density: Optional[str], out_path: Optional[str]) -> None:
    """Emit a named fixture as a self-contained JSON bundle.

    The bundle holds the election, reference artifacts (expected outcomes,
    claims, price systems), and provenance; it parses anywhere an election
    file does.  Known ids: pav-ejr-cex, phragmen-pjr-cex,
    weighted-phragmen-failure, sp-not-fjr, random.
    """

    params: dict[str, Any] = {}
    for name, value in (("n", n), ("g", g), ("seed", seed), ("witness", witness),
                        ("family", family), ("m", m), ("issues", issues), ("k", k)):
        if value is not None:
            params[name] = value
    if eps is not None:
        params["eps"] = parse_fraction(eps, "--eps")
    if density is not None:
        params["density"] = parse_fraction(density, "--density")
    bundle = fixture_to_bundle(build_fixture(fixture_id, params))
    text = canonical_dumps(bundle)
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point with the documented exit-code mapping."""

    try:
        cli.main(args=argv, prog_name="propchoice", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 130
    except click.UsageError as exc:
        click.echo(f"error[usage]: {exc.format_message()}", err=True)
        return EXIT_PARSE
    except ParseError as exc:
        click.echo(f"error[{exc.code}]: {exc.message}", err=True)
        return EXIT_PARSE
    except GeneratorRefusal as exc:
        click.echo(f"error[{exc.code}]: {exc.message}", err=True)
        return EXIT_REFUSAL
    except EnumerationCapExceeded as exc:
        click.echo(f"error[{exc.code}]: {exc.message}", err=True)
        return EXIT_CAP
    except ValidationError as exc:
        click.echo(f"error[{exc.code}]: {exc.message}", err=True)
        return EXIT_PRECONDITION
    except PropChoiceError as exc:
        click.echo(f"error[{exc.code}]: {exc.message}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
