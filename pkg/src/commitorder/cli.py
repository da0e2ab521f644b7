"""Command-line front end.

Exit status: 0 on success, 1 when a scenario fails validation (or a
verification/check comes out negative), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .conditions import (
    SufficientSearchConfig,
    check_claim4,
    check_necessary,
    check_proposition,
    check_sufficient,
    collaborative_states,
)
from .equilibrium import (
    RELABEL_MODES,
    GridConfig,
    GridError,
    expected_utilities,
    order_matters,
    reference_notes,
    solve_s1_first,
    solve_s2_first,
    transfer_range,
    verify_equilibrium,
)
from .model import ScenarioError, load_scenario, validate_scenario
from .montecarlo import simulate
from .numerics import EpsError, decimal_string, format_rational, parse_rational
from .receiver import UnreachableSignal
from .strategy import Commitment1, Commitment2, CommitmentError, commitment_from_dict

__all__ = ["main", "build_parser", "fixture_path"]

ORDERS = ("s1_first", "s2_first")
CHECKS = ("collaborative", "proposition", "claim", "sufficient", "necessary", "all")


class UsageError(Exception):
    """Bad arguments or unreadable input; exit status 2."""


def fixture_path(name: str) -> Path:
    """Path of a bundled scenario or commitment file."""
    return Path(str(resources.files("commitorder") / "fixtures" / name))


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = fixture_path(p.name)
    if bundled.exists():
        return bundled
    raise UsageError(f"file not found: {path}")


def _read_json(path: str):
    p = _resolve(path)
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _scenario(path: str, validate: bool = True):
    try:
        s = load_scenario(_resolve(path))
    except (ScenarioError, EpsError) as exc:
        raise UsageError(f"malformed scenario: {exc}") from exc
    if validate:
        report = validate_scenario(s)
        if not report.valid:
            return s, report
    return s, None


def _commitments(args, s):
    """(g1, g2) from --g1/--g2 files or from a solve report given by --pair."""
    try:
        if args.pair:
            doc = _read_json(args.pair)
            if not isinstance(doc, dict) or "g1" not in doc or "g2" not in doc:
                raise UsageError(f"{args.pair}: expected a solve report with 'g1' and 'g2'")
            g1, g2 = commitment_from_dict(doc["g1"]), commitment_from_dict(doc["g2"])
        elif args.g1 and args.g2:
            g1 = commitment_from_dict(_read_json(args.g1))
            g2 = commitment_from_dict(_read_json(args.g2))
        else:
            raise UsageError("give --g1 and --g2, or --pair")
    except (CommitmentError, EpsError) as exc:
        raise UsageError(f"malformed commitment: {exc}") from exc
    if not isinstance(g1, Commitment1) or not isinstance(g2, Commitment2):
        raise UsageError("--g1 must hold a sender-1 commitment and --g2 a sender-2 commitment")
    problems = g1.problems(s) + g2.problems(s, g1.signals)
    if problems:
        raise UsageError("invalid commitment: " + "; ".join(problems))
    return g1, g2


def _grid(args) -> GridConfig:
    try:
        kw = {"step": parse_rational(args.step)}
        if getattr(args, "candidate_step", None):
            kw["candidate_step"] = parse_rational(args.candidate_step)
        return GridConfig(**kw)
    except (EpsError, GridError) as exc:
        raise UsageError(str(exc)) from exc


def _threads(args) -> int:
    env = os.environ.get("PERSUASION_THREADS")
    raw = env if env else args.threads
    if raw in (None, ""):
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"thread count must be an integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError("thread count must be at least 1")
    return n


def _num(v) -> str:
    return f"{format_rational(v)} ({decimal_string(v)})"


def _triple_row(label, u) -> str:
    return f"{label:<12} {_num(u.s1):>28} {_num(u.s2):>28} {_num(u.receiver):>28}"


def _header() -> str:
    return f"{'':<12} {'S1':>28} {'S2':>28} {'receiver':>28}"


# -- verbs ----------------------------------------------------------------


def cmd_validate(args):
    s, _ = _scenario(args.scenario, validate=False)
    report = validate_scenario(s)
    text = "valid" if report.valid else "\n".join(
        ["invalid:"] + [f"  {a}: {d}" for a, d in report.violations]
    )
    return (0 if report.valid else 1), report.to_dict(), text


def _invalid(report):
    text = "\n".join(["invalid scenario:"] + [f"  {a}: {d}" for a, d in report.violations])
    return 1, report.to_dict(), text


def cmd_evaluate(args):
    s, bad = _scenario(args.scenario)
    if bad:
        return _invalid(bad)
    g1, g2 = _commitments(args, s)
    u = expected_utilities(s, g1, g2)
    notes = reference_notes(s, args.reference, u) if args.reference else []
    doc = {"utilities": u.to_dict(), "notes": notes}
    text = "\n".join([_header(), _triple_row("expected", u)] + notes)
    return 0, doc, text


def _solve(s, order, grid, args):
    if order == "s1_first":
        return solve_s1_first(s, grid)
    return solve_s2_first(
        s, grid, enforce_permutation=not args.no_enforce, relabel=args.relabel
    )


def cmd_solve(args):
    s, bad = _scenario(args.scenario)
    if bad:
        return _invalid(bad)
    r = _solve(s, args.order, _grid(args), args)
    doc = r.to_dict()
    lines = [f"order: {r.order}", _header(), _triple_row("equilibrium", r.utilities)]
    lines.append("g1: " + json.dumps(doc["g1"]["kernel"]))
    lines.append("g2: " + json.dumps(doc["g2"]["kernel"]))
    lines.extend(f"note: {n}" for n in r.notes)
    return 0, doc, "\n".join(lines)


def cmd_compare(args):
    s, bad = _scenario(args.scenario)
    if bad:
        return _invalid(bad)
    grid = _grid(args)
    r1 = solve_s1_first(s, grid)
    r2 = _solve(s, "s2_first", grid, args)
    verdict = order_matters(r1, r2, Fraction(args.tol))
    tr = transfer_range(r1, r2)
    doc = {
        "s1_first": r1.to_dict(),
        "s2_first": r2.to_dict(),
        "verdict": verdict.to_dict(),
        "transfer_range": tr.to_dict(),
    }
    lines = [
        _header(),
        _triple_row("s1_first", r1.utilities),
        _triple_row("s2_first", r2.utilities),
        "verdict: "
        + ("order matters" if verdict.matters else "order does not matter")
        + (" for the senders (receiver's value differs)" if verdict.receiver_only else ""),
        "preferred order: " + ", ".join(f"{k} {v}" for k, v in verdict.preference.items()),
        "transfer range (S2 pays S1): "
        + ("empty" if tr.empty else f"({format_rational(tr.lower)}, {format_rational(tr.upper)})"),
    ]
    lines.extend(f"note: {n}" for n in r1.notes + r2.notes)
    return 0, doc, "\n".join(lines)


def cmd_verify(args):
    s, bad = _scenario(args.scenario)
    if bad:
        return _invalid(bad)
    g1, g2 = _commitments(args, s)
    rep = verify_equilibrium(s, args.order, g1, g2, _grid(args), relabel=args.relabel)
    doc = rep.to_dict()
    lines = [_header(), _triple_row("pair", rep.utilities)]
    for label, part in (("late committer", rep.late), ("early committer", rep.early)):
        status = "ok" if part.get("passed") else "profitable deviation"
        best = part.get("best_deviation_value", {}).get("exact", "-")
        lines.append(f"{label} ({part.get('agent')}): {status}; best deviation {best}; {part.get('method')}")
    lines.append("equilibrium: " + ("yes" if rep.passed else "no"))
    return (0 if rep.passed else 1), doc, "\n".join(lines)


def _text_block(title, d):
    return title + ":\n" + json.dumps(d, indent=2)


def cmd_check(args):
    s, bad = _scenario(args.scenario)
    if bad:
        return _invalid(bad)
    which = CHECKS[:-1] if args.which == "all" else (args.which,)
    grid = _grid(args)
    doc, lines = {}, []
    for w in which:
        if w == "collaborative":
            doc[w] = list(collaborative_states(s))
            lines.append("collaborative states: " + (", ".join(doc[w]) or "none"))
        elif w == "proposition":
            rep = check_proposition(s, grid, strict_polar=args.strict_polar)
            doc[w] = rep.to_dict()
            head = "proposition: " + ("satisfied" if rep.satisfied else "not satisfied")
            if rep.witness_info_set is not None:
                head += f" (I1 = {rep.witness_info_set}, collaborative state {rep.witness_collab_state})"
            lines.append(head)
            for name, v in rep.inequality_values.items():
                lines.append(f"  {name}: {v['lhs']['exact']} vs {v['rhs']['exact']}")
        elif w == "claim":
            doc[w] = {}
            for order in ORDERS:
                try:
                    r = _solve(s, order, grid, args)
                except GridError as exc:
                    doc[w][order] = {"error": str(exc)}
                    lines.append(f"claim ({order}): solver unavailable: {exc}")
                    continue
                rep = check_claim4(s, r)
                doc[w][order] = rep.to_dict()
                lines.append(f"claim ({order}): disjunct {rep.disjunct}; {rep.reason}")
        elif w == "sufficient":
            wit = check_sufficient(s, SufficientSearchConfig(max_den=args.max_den, grid=grid))
            doc[w] = wit.to_dict() if wit else None
            if wit is None:
                lines.append("sufficient conditions: no witness")
            else:
                lines.append(
                    f"sufficient conditions: witness pair ({wit.pair[0]}, {wit.pair[1]}), "
                    f"alpha {format_rational(wit.alpha)}, beta {format_rational(wit.beta)}"
                )
                lines.append(_text_block("  values", wit.inequality_values))
        elif w == "necessary":
            rep = check_necessary(s)
            doc[w] = rep.to_dict()
            lines.append("necessary conditions: order " + ("may matter" if rep.order_may_matter else "does not matter"))
            for wit in rep.witnesses:
                vals = ", ".join(f"{k} = {format_rational(v)}" for k, v in wit.values.items())
                lines.append(f"  triple ({', '.join(wit.triple)}) [{wit.variant}]: {vals}")
            if rep.tie_break_flag:
                lines.append("  receiver tie-breaking depends on beliefs")
            if not rep.applicable:
                lines.append("  state-dependent utilities: no certificate that the order does not matter")
    return 0, doc, "\n".join(lines)


def cmd_simulate(args):
    s, bad = _scenario(args.scenario)
    if bad:
        return _invalid(bad)
    g1, g2 = _commitments(args, s)
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    est = simulate(s, g1, g2, args.samples, args.seed, threads=_threads(args))
    exact = expected_utilities(s, g1, g2)
    doc = {"estimate": est.to_dict(), "exact": exact.to_dict(), "within_3_se": est.within(exact.as_tuple())}
    lines = [f"{'':<12} {'mean':>14} {'std error':>14} {'exact':>14}"]
    for name, m, se, e in zip(("S1", "S2", "receiver"), est.mean, est.std_error, exact.as_tuple()):
        lines.append(f"{name:<12} {m:>14.6f} {se:>14.6f} {decimal_string(e):>14}")
    lines.append(f"samples {est.samples}, seed {est.seed}")
    return 0, doc, "\n".join(lines)


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="commitorder",
        description="Exact solver and condition checker for two-sender sequential persuasion.",
    )
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--threads", default=None, help="worker threads (env PERSUASION_THREADS overrides)")
    sub = p.add_subparsers(dest="verb", required=True)

    def scen(sp):
        sp.add_argument("scenario", help="scenario JSON (bundled fixture names also work)")

    def pair(sp):
        sp.add_argument("--g1", help="sender-1 commitment JSON")
        sp.add_argument("--g2", help="sender-2 commitment JSON")
        sp.add_argument("--pair", help="solve report JSON holding g1 and g2")

    def grid(sp):
        sp.add_argument("--step", default="1/60", help="grid step 1/N")
        sp.add_argument("--candidate-step", default=None, help="S2 candidate step 1/N")

    def s2opts(sp):
        sp.add_argument("--relabel", choices=RELABEL_MODES, default="posterior_rank")
        sp.add_argument("--no-enforce", action="store_true", help="S2 kernels constant in S1's signal")

    sp = sub.add_parser("validate", help="check the scenario assumptions")
    scen(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("evaluate", help="exact expected utilities of a commitment pair")
    scen(sp)
    pair(sp)
    sp.add_argument("--reference", choices=tuple(ORDERS) + ("s2_first_constant",), default=None,
                    help="compare against the scenario's reference values for this key")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("solve", help="equilibrium for one commitment order")
    scen(sp)
    sp.add_argument("--order", choices=ORDERS, required=True)
    grid(sp)
    s2opts(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("compare-orders", help="solve both orders and compare")
    scen(sp)
    grid(sp)
    s2opts(sp)
    sp.add_argument("--tol", default="0", type=Fraction)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("verify", help="search for profitable deviations from a pair")
    scen(sp)
    sp.add_argument("--order", choices=ORDERS, required=True)
    pair(sp)
    grid(sp)
    sp.add_argument("--relabel", choices=RELABEL_MODES, default="posterior_rank")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("check", help="run the order-matters condition checkers")
    scen(sp)
    sp.add_argument("--which", choices=CHECKS, default="all")
    grid(sp)
    s2opts(sp)
    sp.add_argument("--strict-polar", action="store_true")
    sp.add_argument("--max-den", type=int, default=24, help="mixing-ratio denominator bound")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("simulate", help="Monte-Carlo estimate of a pair's utilities")
    scen(sp)
    pair(sp)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _threads(args)
        status, doc, text = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnreachableSignal as exc:
        print(f"error: unreachable signal pair: {exc}", file=sys.stderr)
        return 2
    except GridError as exc:
        print(f"error: grid: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
