"""Command-line front end.

One subcommand per library operation, machine-readable output (JSON or CSV),
and strict exit codes: 0 success, 2 validation problem, 3 a guard or search
budget tripped. Every stochastic command requires an explicit --seed; there
is no wall-clock default, so published numbers are reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .ambient import (
    AmbientGenerator,
    ball_of_set,
    ball_representatives,
    embeds_in_ambient,
    make_generator,
    patch_to_json,
    sigma_axioms,
)
from .asymptotics import (
    FixpointParams,
    descending_path_mc,
    forest_count_table,
    infinite_path_prob,
)
from .errors import EvaluationError, GuardError, ParseError, ValidationError
from .formulas import Formula, eval_formula, format_formula, parse
from .morphisms import ef_equivalent
from .stochastics import (
    closed_copy_prob,
    fraction_exact,
    fraction_mc,
    generic_density_check,
    sample_substructure,
    trajectory,
)
from .strategy import play_game
from .structures import Structure, load_structure, structure_to_json


class _CliFailure(Exception):
    """Message already formatted for stderr, with the exit code attached."""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.message = message
        self.code = code


def _gen(selector: str) -> AmbientGenerator:
    try:
        return make_generator(selector)
    except ValidationError as e:
        raise _CliFailure(f"generator error: {e}", 2) from None


def _structure(path: str) -> Structure:
    try:
        return load_structure(path)
    except (ValidationError, ValueError, OSError) as e:
        raise _CliFailure(f"structure error: {path}: {e}", 2) from None


def _phi(text: str) -> Formula:
    if text.startswith("@"):
        try:
            with open(text[1:], "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise _CliFailure(f"formula error: {e}", 2) from None
    try:
        return parse(text)
    except ParseError as e:
        raise _CliFailure(f"formula error: {e}", 2) from None


def _prob(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad probability {text!r}") from None


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _num(x) -> str:
    # CSV cell: plain repr for floats, empty for missing
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return repr(x) if isinstance(x, float) else str(x)


def _fraction_payload(res, extra: Dict) -> Dict:
    payload = {
        "satisfied": res.satisfied,
        "total": res.total,
        "fraction": str(res.fraction),
        "value": res.value,
        "mode": res.mode,
        "halfwidth": res.halfwidth,
        "seed": res.seed,
    }
    payload.update(extra)
    return payload


# --- subcommand handlers --------------------------------------------------------


def _cmd_ball(args) -> str:
    g = _gen(args.gen)
    patch = ball_of_set(g, args.center, args.n)
    return _json_text(patch_to_json(patch))


def _cmd_representatives(args) -> str:
    g = _gen(args.gen)
    reps = ball_representatives(g, args.n)
    return _json_text(
        {
            "generator": args.gen,
            "radius": args.n,
            "count": len(reps),
            "representatives": [patch_to_json(p) for p in reps],
        }
    )


def _cmd_eval(args) -> str:
    s = _structure(args.structure)
    f = _phi(args.phi)
    assignment: Dict[str, int] = {}
    if args.assign:
        for part in args.assign.split(","):
            var, _, val = part.partition("=")
            try:
                assignment[var.strip()] = int(val)
            except ValueError:
                raise _CliFailure(f"error: bad assignment part {part!r}", 2) from None
    try:
        value = eval_formula(s, f, assignment)
    except (ValidationError, EvaluationError) as e:
        raise _CliFailure(f"formula error: {e}", 2) from None
    return _json_text({"formula": format_formula(f), "value": value})


def _cmd_fraction(args) -> str:
    g = _gen(args.gen)
    f = _phi(args.phi)
    patch = ball_of_set(g, [args.center], args.n)
    if args.mode == "exact":
        res = fraction_exact(patch.structure, f)
    else:
        if args.samples is None or args.seed is None:
            raise _CliFailure("error: --mode mc needs --samples and --seed", 2)
        res = fraction_mc(patch.structure, f, args.samples, args.seed)
    return _json_text(
        _fraction_payload(
            res,
            {
                "generator": args.gen,
                "center": args.center,
                "n": args.n,
                "ball_size": patch.structure.size,
            },
        )
    )


def _cmd_trajectory(args) -> str:
    g = _gen(args.gen)
    f = _phi(args.phi)
    mode = "mc" if args.mode == "mc" else "exact"
    if mode == "mc" and (args.samples is None or args.seed is None):
        raise _CliFailure("error: --mode mc needs --samples and --seed", 2)
    results = [
        (c, trajectory(g, c, f, args.n_max, mode, args.samples, args.seed))
        for c in args.center
    ]
    if args.format == "json":
        return _json_text(
            {
                "generator": args.gen,
                "n_max": args.n_max,
                "centers": [
                    {
                        "center": c,
                        "verdict": t.verdict,
                        "rows": [r.as_row(n) for n, r in t.rows],
                    }
                    for c, t in results
                ],
            }
        )
    lines: List[str] = []
    for c, t in results:
        lines.append(f"# center: {c}")
        lines.append("n,total,satisfied,fraction,halfwidth,mode")
        for n, r in t.rows:
            lines.append(
                ",".join(
                    [
                        str(n),
                        str(r.total),
                        str(r.satisfied),
                        _num(r.value),
                        _num(r.halfwidth),
                        r.mode,
                    ]
                )
            )
        lines.append(f"# verdict: {t.verdict}")
    return "\n".join(lines) + "\n"


def _cmd_ef(args) -> str:
    a = _structure(args.a)
    b = _structure(args.b)
    eq = ef_equivalent(a, b, args.n)
    return f"equivalent: {'true' if eq else 'false'}\n"


def _parse_script(text: str) -> List[Tuple[str, str]]:
    moves = []
    for part in text.split(";"):
        side, sep, vertex = part.partition(":")
        if not sep:
            raise _CliFailure(
                f"error: bad script move {part!r} (expected side:vertex)", 2
            )
        moves.append((side.strip(), vertex.strip()))
    return moves


def _cmd_strategy_demo(args) -> str:
    left = _gen(args.left)
    right = _gen(args.right)
    script = _parse_script(args.script)
    transcript = play_game(left, right, args.rounds, script, args.scan_cap)
    return _json_text(transcript)


def _cmd_embed(args) -> str:
    g = _gen(args.gen)
    pattern = _structure(args.pattern)
    return _json_text(
        {"generator": args.gen, "embeds": embeds_in_ambient(g, pattern)}
    )


def _cmd_sigma_axioms(args) -> str:
    g = _gen(args.gen)
    axioms = sigma_axioms(g, args.max_size)
    return _json_text(
        {
            "generator": args.gen,
            "max_size": args.max_size,
            "count": len(axioms),
            "axioms": [
                {"pattern": structure_to_json(a.pattern), "in_class": a.in_class}
                for a in axioms
            ],
        }
    )


def _cmd_closed_copy(args) -> str:
    g = _gen(args.gen)
    pattern = _structure(args.pattern)
    est = closed_copy_prob(
        g, pattern, args.window_radius, args.p, args.samples, args.seed
    )
    return _json_text(
        {
            "generator": args.gen,
            "estimate": est.estimate,
            "fraction": str(est.fraction),
            "samples": est.samples,
            "seed": est.seed,
            "window_radius": est.window_radius,
            "window_size": est.window_size,
        }
    )


def _cmd_percolate(args) -> str:
    g = _gen(args.gen)
    patch = ball_of_set(g, [args.center], args.n)
    mask = sample_substructure(patch.structure, args.p, args.seed)
    return _json_text(
        {
            "generator": args.gen,
            "center": args.center,
            "n": args.n,
            "p": str(args.p),
            "seed": args.seed,
            "ball_size": patch.structure.size,
            "kept": [patch.ids[i] for i in mask.sorted_members()],
        }
    )


def _cmd_density_check(args) -> str:
    g = _gen(args.gen)
    pattern = _structure(args.pattern)
    report = generic_density_check(g, pattern, args.m)
    return _json_text(
        {
            "generator": args.gen,
            "k": report.k,
            "m": report.m,
            "fraction": str(report.fraction),
            "bound": str(report.bound),
            "ok": report.ok,
            "patch_radius": report.patch_radius,
            "windows": [list(w) for w in report.windows],
        }
    )


def _cmd_tree_fixpoint(args) -> str:
    params = FixpointParams(args.k, args.p)
    res = infinite_path_prob(params, args.tol)
    return _json_text(
        {
            "lfp": res.lfp,
            "infinite_path_prob": res.prob,
            "iterations": res.iterations,
        }
    )


def _cmd_tree_mc(args) -> str:
    params = FixpointParams(args.k, args.p)
    est = descending_path_mc(params, args.depth, args.samples, args.seed)
    return _json_text(
        {
            "estimate": est.estimate,
            "hits": est.hits,
            "samples": est.samples,
            "seed": est.seed,
            "depth": est.depth,
        }
    )


def _cmd_forest_count(args) -> str:
    rows = forest_count_table(args.n_max)
    lines = ["n,a_n,b_n,lower_b,upper_b,ok"]
    for row in rows:
        lines.append(
            ",".join(
                _num(row[k]) for k in ("n", "a_n", "b_n", "lower_b", "upper_b", "ok")
            )
        )
    return "\n".join(lines) + "\n"


# --- parser wiring ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="zol",
        description="Geometric zero-one law toolkit: balls, formulas, games, "
        "percolation, and tree/forest asymptotics.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def out_flag(p):
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("ball", help="cut a finite ball out of an ambient structure")
    p.add_argument("--gen", required=True, help="z, grid2, tree:k, monoid:k, uutree")
    p.add_argument(
        "--center", action="append", required=True, help="center id (repeatable)"
    )
    p.add_argument("--n", type=int, required=True, help="ball radius")
    out_flag(p)
    p.set_defaults(func=_cmd_ball)

    p = sub.add_parser(
        "representatives", help="isomorphism-class representatives of radius-n balls"
    )
    p.add_argument("--gen", required=True)
    p.add_argument("--n", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=_cmd_representatives)

    p = sub.add_parser("eval", help="evaluate a formula on a structure file")
    p.add_argument("--structure", required=True, help="structure JSON file")
    p.add_argument("--phi", required=True, help="formula text or @file")
    p.add_argument("--assign", help="free-variable assignment, e.g. 'x=0,y=3'")
    out_flag(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser(
        "fraction", help="fraction of substructures of a ball satisfying a sentence"
    )
    p.add_argument("--gen", required=True)
    p.add_argument("--center", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    out_flag(p)
    p.set_defaults(func=_cmd_fraction)

    p = sub.add_parser(
        "trajectory", help="satisfaction fractions for radii 1..n-max plus a verdict"
    )
    p.add_argument("--gen", required=True)
    p.add_argument(
        "--center", action="append", required=True, help="center id (repeatable)"
    )
    p.add_argument("--phi", required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    out_flag(p)
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("ef", help="n-round Ehrenfeucht-Fraisse equivalence")
    p.add_argument("--a", required=True, help="structure JSON file")
    p.add_argument("--b", required=True, help="structure JSON file")
    p.add_argument("--n", type=int, required=True, help="number of rounds")
    out_flag(p)
    p.set_defaults(func=_cmd_ef)

    p = sub.add_parser(
        "strategy-demo",
        help="play a scripted game with the 5^(n-i)-radius duplicator strategy",
    )
    p.add_argument("--left", required=True, help="generator selector")
    p.add_argument("--right", required=True, help="generator selector")
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument(
        "--script",
        required=True,
        help="spoiler picks 'side:vertex;side:vertex;...' (sides: left, right)",
    )
    p.add_argument("--scan-cap", type=int, help="override the 4*5^n sphere-scan cap")
    out_flag(p)
    p.set_defaults(func=_cmd_strategy_demo)

    p = sub.add_parser(
        "embed", help="decide whether a finite structure embeds in the ambient"
    )
    p.add_argument("--gen", required=True)
    p.add_argument("--pattern", required=True, help="structure JSON file")
    out_flag(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser(
        "sigma-axioms", help="extension-axiom scheme up to a pattern size"
    )
    p.add_argument("--gen", required=True)
    p.add_argument("--max-size", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=_cmd_sigma_axioms)

    p = sub.add_parser(
        "closed-copy",
        help="Monte Carlo probability that a random substructure has a closed copy",
    )
    p.add_argument("--gen", required=True)
    p.add_argument("--pattern", required=True, help="structure JSON file")
    p.add_argument("--window-radius", type=int, required=True)
    p.add_argument("--p", type=_prob, required=True, help="e.g. 0.5 or 1/2")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=_cmd_closed_copy)

    p = sub.add_parser("percolate", help="sample one random substructure of a ball")
    p.add_argument("--gen", required=True)
    p.add_argument("--center", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--seed", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=_cmd_percolate)

    p = sub.add_parser(
        "density-check",
        help="verify the 1-(1-2^-k)^m closed-copy density bound by exact counting",
    )
    p.add_argument("--gen", required=True)
    p.add_argument("--pattern", required=True, help="structure JSON file")
    p.add_argument("--m", type=int, required=True, help="number of disjoint windows")
    out_flag(p)
    p.set_defaults(func=_cmd_density_check)

    p = sub.add_parser(
        "tree-fixpoint",
        help="least fixed point of q + p x^k and the infinite-path probability",
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    out_flag(p)
    p.set_defaults(func=_cmd_tree_fixpoint)

    p = sub.add_parser(
        "tree-mc", help="Monte Carlo estimate of the depth-n descending-path probability"
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=_cmd_tree_mc)

    p = sub.add_parser(
        "forest-count", help="labeled/unlabeled unary-forest counts with bound checks"
    )
    p.add_argument("--n-max", type=int, required=True)
    out_flag(p)
    p.set_defaults(func=_cmd_forest_count)

    return top


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except _CliFailure as e:
        print(e.message, file=sys.stderr)
        return e.code
    except GuardError as e:  # includes BudgetError
        print(f"guard error: {e}", file=sys.stderr)
        return 3
    except (ValidationError, EvaluationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
