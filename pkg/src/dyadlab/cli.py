"""Command-line front end.

Every subcommand writes CSV (or a DYCS file for ``gen``) to ``--out`` or to
standard output. Human-readable summaries go to standard output when
``--out`` is given and to standard error otherwise, so piped CSV stays clean.

Exit codes: 0 success, 1 counterexample found, 2 bad flags, 3 I/O failure,
4 violated precondition.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys
import tempfile

from . import __version__
from .complexity import dimension_estimate, profile
from .dyadic import Direction
from .errors import DomainError, PrecisionError, PreconditionError, RegressionError
from .experiments import (
    bound_curves,
    csv_text,
    fig1_csv,
    fig1_grid,
    half_information_check,
    lemma_stress,
    pinned_distance_study,
    projection_sweep,
    strictly_dominates,
)
from .fractals import CellSet, FractalSpec, generate, read_cellset, write_cellset
from .geometry import Annulus, annulus_intersection_cover, annulus_arc_bound
from .selection import dumps_instance

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_IO, EXIT_PRECONDITION = 0, 1, 2, 3, 4

_KIND_NAMES = {
    "cantor": "digit_cantor",
    "product": "product",
    "randomtree": "random_tree",
    "square": "full_square",
    "segment": "segment",
}

# flags that do not change results and stay out of the echoed config
_NOT_ECHOED = {"threads", "out", "echo_config", "command"}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# flag parsing helpers


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}") from None
    return (x, y)


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"window {text!r} has lo > hi")
    return (lo, hi)


def _seed(text: str) -> int:
    try:
        s = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return s


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=_seed, default=0, help="64-bit unsigned seed (default 0)")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--threads", type=_positive, default=1, help="worker threads; results do not depend on it")
    p.add_argument("--depth", type=int, help="maximal precision r (bits)")
    p.add_argument("--window", type=_window, help="regression window lo:hi")
    p.add_argument("--echo-config", action="store_true", help="print a replayable command line")
    return p


def _set_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("set selection")
    g.add_argument("--kind", choices=sorted(_KIND_NAMES), help="generated set kind")
    g.add_argument("--base", type=int, default=4, help="digit base, a power of two (default 4)")
    g.add_argument("--digits", type=_int_list, default=(0, 3), help="allowed digits (default 0,3)")
    g.add_argument("--digits-y", type=_int_list, help="digits of the second product factor")
    g.add_argument("--dim", type=float, help="target dimension of a random tree")
    g.add_argument("--in", dest="input", help="read the set from a DYCS file instead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyadlab", description="Dyadic fractal geometry experiments.")
    parser.add_argument("--version", action="version", version=f"dyadlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = [_shared()]

    p = sub.add_parser("gen", parents=shared, help="generate a set and write it as DYCS")
    _set_flags(p)

    p = sub.add_parser("dims", parents=shared, help="cell-count profile and dimension estimate")
    _set_flags(p)
    p.add_argument("--s0", type=int, help="conditioning precision for the cond_bits column")

    p = sub.add_parser("pindist", parents=shared, help="pinned distance dimension study (heuristic)")
    _set_flags(p)
    p.add_argument("--pins", type=_positive, default=64, help="number of pins sampled from the set")

    p = sub.add_parser("project", parents=shared, help="projection dimension sweep (heuristic)")
    _set_flags(p)
    p.add_argument("--directions", type=_positive, default=256, help="number of angles in [0, 1) turns")
    p.add_argument("--jitter", action="store_true", help="seeded offsets within each angle bin")
    p.add_argument("--margin", type=float, default=0.02, help="flag estimates below dim/2 - margin")

    p = sub.add_parser("fig1", parents=shared, help="pinned distance lower-bound curves")
    p.add_argument("--samples", type=_positive, default=512, help="grid points k/n for s in (0, 1]")

    p = sub.add_parser("lemma", parents=shared, help="stress-test the selection lemma")
    p.add_argument("--trials", type=int, default=10_000, help="random instances after the exhaustive pass")
    p.add_argument("--max-x", type=_positive, default=50, help="largest |X| of a random instance")
    p.add_argument("--max-v", type=_positive, default=50, help="largest |V| of a random instance")

    p = sub.add_parser("annulus", parents=shared, help="cover an annulus intersection by sectors")
    p.add_argument("--c1", type=_point, required=True, help="first center x,y")
    p.add_argument("--r1", type=float, required=True, help="first radius")
    p.add_argument("--c2", type=_point, required=True, help="second center x,y")
    p.add_argument("--r2", type=float, required=True, help="second radius")
    p.add_argument("--eps", type=float, required=True, help="common thickness")

    p = sub.add_parser("halfinfo", parents=shared, help="image bits against half the set's bits")
    _set_flags(p)
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--pin", type=_point, help="pin for the distance image")
    target.add_argument("--angle", type=float, help="direction in turns for the projection")
    p.add_argument("--r", type=int, help="fine precision (default: --depth)")
    p.add_argument("--s", type=int, required=True, help="coarse precision")
    return parser


# ---------------------------------------------------------------------------
# config and output


def echo_config(args: argparse.Namespace) -> str:
    """Replayable command line for the result-affecting flags."""
    parts = ["dyadlab", args.command]
    for key, value in sorted(vars(args).items()):
        if key in _NOT_ECHOED or value is None or value is False:
            continue
        flag = "--" + ("in" if key == "input" else key.replace("_", "-"))
        if value is True:
            parts.append(flag)
            continue
        if isinstance(value, tuple):
            sep = ":" if key == "window" else ","
            value = sep.join(str(v) for v in value)
        parts += [flag, str(value)]
    return shlex.join(parts)


def _metadata(args) -> dict:
    return {"version": __version__, "config": echo_config(args), "seed": args.seed}


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path = os.fspath(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=".dyadlab-", dir=os.path.dirname(os.path.abspath(path)))
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _say(args, text: str) -> None:
    print(text, file=sys.stdout if args.out else sys.stderr)


def _spec(args) -> FractalSpec:
    if args.kind is None:
        raise UsageError("one of --kind or --in is required")
    base = args.base
    if base < 2 or base & (base - 1):
        raise UsageError(f"--base must be a power of two >= 2, got {base}")
    try:
        return FractalSpec(
            _KIND_NAMES[args.kind],
            base_exp=base.bit_length() - 1,
            digits=args.digits,
            digits_y=args.digits_y,
            dim=args.dim,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load_set(args) -> tuple[CellSet, FractalSpec | None]:
    """The set named by ``--in`` or by the generation flags, at precision ``--depth``."""
    if args.input is not None:
        if args.kind is not None:
            raise UsageError("--in and --kind are mutually exclusive")
        try:
            cells = read_cellset(args.input)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from exc
        if args.depth is not None:
            if args.depth > cells.precision:
                raise UsageError(f"--depth {args.depth} exceeds the file's precision {cells.precision}")
            cells = cells.coarsen(args.depth)
        return cells, None
    spec = _spec(args)
    if args.depth is None:
        raise UsageError("--depth is required when generating a set")
    try:
        return generate(spec, args.depth), spec
    except PrecisionError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    cells, spec = _load_set(args)
    declared = spec.declared_dimension if spec is not None else float("nan")
    if args.out:
        try:
            write_cellset(args.out, cells)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc}") from exc
    print(f"cells={len(cells)} precision={cells.precision} dim={cells.dim} declared_dimension={declared:.12g}")
    return EXIT_OK


def cmd_dims(args) -> int:
    cells, _ = _load_set(args)
    prof = profile(cells, s0=args.s0)
    window = args.window or (cells.precision // 2, cells.precision)
    est = dimension_estimate(prof, window)
    meta = _metadata(args)
    meta.update({"slope": f"{est.slope:.12g}", "stderr": f"{est.stderr:.12g}", "window": f"{window[0]}:{window[1]}"})
    _write_text(args.out, prof.to_csv(meta))
    _say(args, f"dimension estimate {est.slope:.6f} +- {est.stderr:.6f} over [{window[0]}, {window[1]}]")
    return EXIT_OK


def _study_source(args):
    if args.input is not None:
        cells, _ = _load_set(args)
        return cells
    spec = _spec(args)
    if args.depth is None:
        raise UsageError("--depth is required when generating a set")
    return spec


def cmd_pindist(args) -> int:
    source = _study_source(args)
    rep = pinned_distance_study(
        source, args.pins, r_max=args.depth, window=args.window, seed=args.seed, threads=args.threads
    )
    meta = _metadata(args)
    meta.update(rep.metadata())
    _write_text(args.out, csv_text(rep.columns, rep.rows, meta))
    s = rep.summary
    _say(args, f"HEURISTIC max estimate {s['max_estimate']:.6f} over {s['pins']} pins; bound_ours 0.75*s = {s['bound_ours']:.6f}")
    return EXIT_OK


def cmd_project(args) -> int:
    source = _study_source(args)
    rep = projection_sweep(
        source,
        args.directions,
        r_max=args.depth,
        window=args.window,
        seed=args.seed,
        jitter=args.jitter,
        threads=args.threads,
        margin=args.margin,
    )
    meta = _metadata(args)
    meta.update(rep.metadata())
    _write_text(args.out, csv_text(rep.columns, rep.rows, meta))
    s = rep.summary
    _say(args, f"HEURISTIC flagged {s['flagged_count']} of {s['directions']} directions below dim/2 = {s['half_dim']:.6f}")
    return EXIT_OK


def cmd_fig1(args) -> int:
    points = bound_curves(fig1_grid(args.samples))
    _write_text(args.out, fig1_csv(points, _metadata(args)))
    verdict = "holds" if strictly_dominates(points) else "FAILS"
    _say(args, f"strict dominance of 3s/4 on {len(points)} grid points: {verdict}")
    return EXIT_OK


def cmd_lemma(args) -> int:
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    summary = lemma_stress(args.trials, seed=args.seed, max_x=args.max_x, max_v=args.max_v)
    rows = [(summary.tried, summary.passed, summary.skipped, len(summary.counterexamples))]
    _write_text(args.out, csv_text(("tried", "passed", "skipped", "counterexamples"), rows, _metadata(args)))
    _say(args, f"{len(summary.counterexamples)} counterexamples ({summary.passed} passed, {summary.skipped} skipped)")
    if summary.counterexamples:
        sys.stderr.write(dumps_instance(summary.counterexamples[0]))
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def cmd_annulus(args) -> int:
    try:
        a1 = Annulus(args.c1, args.r1, args.eps)
        a2 = Annulus(args.c2, args.r2, args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sectors = annulus_intersection_cover(a1, a2)
    bound = annulus_arc_bound(a1, a2)
    rows = [(s.start, s.length, s.arc_length, bound, s.arc_length <= bound * (1 + 1e-9)) for s in sectors]
    _write_text(args.out, csv_text(("start", "length", "arc_length", "arc_bound", "within_bound"), rows, _metadata(args)))
    _say(args, f"{len(sectors)} sectors; arc bound {bound:.12g}")
    return EXIT_OK


def cmd_halfinfo(args) -> int:
    cells, _ = _load_set(args)
    r = args.r if args.r is not None else cells.precision
    target = Direction(args.angle) if args.angle is not None else args.pin
    try:
        row = half_information_check(cells, target, r, args.s)
    except PrecisionError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = [(row.kind, row.r, row.s, row.lhs, row.rhs, row.slack)]
    _write_text(args.out, csv_text(("kind", "r", "s", "lhs", "rhs", "slack"), rows, _metadata(args)))
    _say(args, f"lhs {row.lhs:.6f} bits, rhs {row.rhs:.6f} bits, slack {row.slack:.6f}")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "dims": cmd_dims,
    "pindist": cmd_pindist,
    "project": cmd_project,
    "fig1": cmd_fig1,
    "lemma": cmd_lemma,
    "annulus": cmd_annulus,
    "halfinfo": cmd_halfinfo,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with code 2 on malformed flags
    if args.echo_config:
        print(echo_config(args), file=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dyadlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"dyadlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PreconditionError, DomainError, PrecisionError, RegressionError) as exc:
        print(f"dyadlab {args.command}: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    raise SystemExit(main())
