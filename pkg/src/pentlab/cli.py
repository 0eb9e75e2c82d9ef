"""Command line front end.

Exit codes: 0 success or satisfied, 1 a checked property was violated,
2 unknown or budget-truncated, 64 usage error, 65 bad input, 70 internal.
Every artifact carries a provenance record (seed, config, code and cache
versions); no timestamps, so equal inputs give byte-identical outputs.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from typing import Optional, Sequence

from . import __version__

EXIT_OK, EXIT_VIOLATED, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 64, 65, 70

log = logging.getLogger("pentlab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _clean(x):
    """JSON-safe copy: non-finite floats become strings, numpy scalars plain."""
    import numpy as np
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def provenance(args) -> dict:
    from .cache import CACHE_VERSION
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "workers")}
    return {"seed": getattr(args, "seed", None), "config": _clean(cfg),
            "code_version": __version__, "cache_version": CACHE_VERSION}


def _dump(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_with_header(args, body: str) -> str:
    return "# provenance: " + json.dumps(_clean(provenance(args)), sort_keys=True) + "\n" + body


# -- subcommands ---------------------------------------------------------------

def cmd_lengths(args) -> int:
    from .pentagon import LT
    table = {"a": LT.a, "b": LT.b, "c": LT.c, "d": LT.d, "e": LT.e, "f": LT.f,
             "two_g": 2 * LT.g, "lambda": LT.lam}
    if args.format == "csv":
        body = "name,value\n" + "".join(f"{k},{v:.12g}\n" for k, v in table.items())
        _emit(args, _csv_with_header(args, body))
    elif args.format == "table":
        _emit(args, "".join(f"{k:>7}  {v:.7f}\n" for k, v in table.items()))
    else:
        _emit(args, _dump({"provenance": provenance(args), "lengths": table}))
    return EXIT_OK


def cmd_qi_verify(args) -> int:
    from . import qi
    from .cache import load_catalog
    cert = qi.tiling_certificates(args.cert_radius)
    two = qi.verify_two_sided(args.ball_radius)
    cat = load_catalog(args.n_max, args.cache_dir)
    sh = qi.sharpness(args.n_max, cat)
    claims = qi.claims_check(args.samples, args.seed)
    LT = qi.LT
    cert_ok = max(cert["right_angle_max"], cert["side_length_err"], cert["dual_edge_err"]) <= 1e-9
    sharp_ok = (LT.c - 1e-9 <= sh.inf_ratio and sh.sup_ratio <= LT.d + 1e-9)
    ok = cert_ok and two.violations == 0 and sharp_ok and claims["ok"]
    out = {"provenance": provenance(args),
           "certificates": {**cert, "ok": cert_ok},
           "two_sided": {**two.__dict__, "ok": two.violations == 0},
           "sharpness": {**sh.__dict__, "ok": sharp_ok},
           "claims": claims, "ok": ok}
    _emit(args, _dump(out))
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_growth(args) -> int:
    from .growth import fit_exponent, growth, nonprimitive_fraction
    t = growth(args.subject, args.metric, args.n_max, cache_dir=args.cache_dir)
    fit = fit_exponent(t, args.window) if args.window else None
    if args.format == "csv":
        _emit(args, _csv_with_header(args, t.to_csv()))
        return EXIT_OK
    out = {"provenance": provenance(args), "table": t.to_dict(),
           "fit": fit.to_dict() if fit else None}
    if args.subject in ("conjugacy", "primitive-conjugacy"):
        out["nonprimitive_fraction"] = nonprimitive_fraction(
            int(args.n_max) if args.metric == "cube" else args.n_max, metric=args.metric,
            cache_dir=args.cache_dir)
    _emit(args, _dump(out))
    return EXIT_OK


def cmd_pieces(args) -> int:
    from .cache import load_catalog
    from .census import cube_cap_for
    from .pieces import pair_diameters, sample_pairs, survival
    cat = load_catalog(cube_cap_for(args.ell), args.cache_dir)
    pairs = sample_pairs(cat, args.pairs, args.ell, args.seed)
    diams = pair_diameters(cat, pairs, args.J, workers=args.workers)
    if args.histogram:
        s = survival(diams)
        body = f"# slope {s.slope:.9g} on [{s.section[0]}, {s.section[1]}] over {s.samples} pairs\n"
        _emit(args, _csv_with_header(args, body + s.to_csv()))
        return EXIT_OK
    lines = [json.dumps({"provenance": provenance(args)}, sort_keys=True)]
    for (i, j), d in zip(pairs, diams):
        lines.append(json.dumps({"g": cat.words[i], "g2": cat.words[j],
                                 "len_hyp": [round(float(cat.len_hyp[i]), 12),
                                             round(float(cat.len_hyp[j]), 12)],
                                 "max_diameter": round(float(d), 12)}, sort_keys=True))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _parse_grid(text: Optional[str], conv):
    if not text:
        return None
    return [conv(x) for x in text.split(",") if x.strip()]


def cmd_quotient(args) -> int:
    from .quotient import DensityParams, rows_to_csv, run_trials, threshold_experiment
    ell_grid = _parse_grid(args.ell_grid, float)
    c_grid = _parse_grid(args.c_grid, str)
    if ell_grid or c_grid:
        rows = threshold_experiment(ell_grid or [args.ell], c_grid or [args.c], args.trials,
                                    args.seed, args.metric, args.alpha, args.workers)
        _emit(args, _csv_with_header(args, rows_to_csv(rows)))
        return EXIT_UNKNOWN if any(r.unknown for r in rows) else EXIT_OK
    params = DensityParams(args.ell, args.c, args.metric)
    runs = run_trials(params, args.trials, args.seed, args.alpha, args.workers)
    lines = [json.dumps({"provenance": provenance(args)}, sort_keys=True)]
    lines += [r.to_json() for r in runs]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_UNKNOWN if any(r.status == "unknown" for r in runs) else EXIT_OK


def cmd_render(args) -> int:
    from .render import render_svg
    prov = provenance(args)
    flat = {"seed": prov["seed"], "code_version": prov["code_version"],
            "cache_version": prov["cache_version"],
            "config": json.dumps(prov["config"], sort_keys=True)}
    _emit(args, render_svg(args.radius, args.geodesic or (), args.size, provenance=flat) + "\n")
    return EXIT_OK


def cmd_cache(args) -> int:
    from . import cache
    if args.action == "build":
        cat = cache.load_catalog(args.cap, args.cache_dir)
        path = cache.entry_path("catalog", args.cap, args.cache_dir)
        out = {"provenance": provenance(args), "built": str(path), "classes": len(cat)}
    else:
        out = {"provenance": provenance(args), "directory": str(cache.cache_dir(args.cache_dir)),
               "entries": cache.inspect(args.cache_dir)}
    _emit(args, _dump(out))
    if args.action == "inspect" and any(not e["ok"] for e in out["entries"]):
        return EXIT_VIOLATED
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--cache-dir", default=None,
                        help="cache directory (default $PENTLAB_CACHE_DIR or ~/.cache/pentlab)")
    p = _Parser(prog="pentlab", description="Pentagon group geometry experiments.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("lengths", parents=[common], help="pentagon length table")
    s.add_argument("--format", choices=("json", "csv", "table"), default="json")
    s.set_defaults(func=cmd_lengths)

    s = sub.add_parser("qi-verify", parents=[common], help="two-sided comparison, sharpness, claims")
    s.add_argument("--ball-radius", type=int, default=10)
    s.add_argument("--cert-radius", type=int, default=6)
    s.add_argument("--n-max", type=int, default=12)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--format", choices=("json",), default="json")
    s.set_defaults(func=cmd_qi_verify)

    s = sub.add_parser("growth", parents=[common], help="growth tables and exponent fits")
    s.add_argument("--subject", default="group",
                   choices=("group", "wall-stabilizer", "conjugacy", "primitive-conjugacy"))
    s.add_argument("--metric", choices=("cube", "hyp"), default="cube")
    s.add_argument("--n-max", type=float, default=10)
    s.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_growth)

    s = sub.add_parser("pieces", parents=[common], help="max cone-piece census over sampled pairs")
    s.add_argument("--ell", type=float, default=12.0, help="hyperbolic length cap")
    s.add_argument("--pairs", type=int, default=2000)
    s.add_argument("--J", type=float, default=2 * math.log(1 + math.sqrt(2)))
    s.add_argument("--histogram", action="store_true", help="emit the survival curve as CSV")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_pieces)

    s = sub.add_parser("quotient", parents=[common], help="random presentations")
    s.add_argument("--ell", type=float, default=10.0)
    s.add_argument("--c", default="0.015", help="density exponent, e.g. 0.015 or 1/63.51")
    s.add_argument("--alpha", type=float, default=1 / 20)
    s.add_argument("--metric", choices=("cube", "hyp"), default="hyp")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--ell-grid", default=None, help="comma list; switches to the CSV experiment")
    s.add_argument("--c-grid", default=None, help="comma list of c values")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("render", parents=[common], help="SVG of the tiling in the Poincare disk")
    s.add_argument("--radius", type=int, default=3)
    s.add_argument("--geodesic", action="append", help="draw the axis of this word")
    s.add_argument("--size", type=int, default=600)
    s.add_argument("--format", choices=("svg",), default="svg")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("cache", parents=[common], help="build or inspect the census cache")
    s.add_argument("action", choices=("build", "inspect"))
    s.add_argument("--cap", type=int, default=12)
    s.add_argument("--format", choices=("json",), default="json")
    s.set_defaults(func=cmd_cache)
    return p


def _validate(args) -> None:
    for k in ("workers", "trials", "pairs", "size"):
        v = getattr(args, k, None)
        if v is not None and v < (0 if k == "trials" else 1):
            raise UsageError(f"--{k} must be positive")
    for k in ("ball_radius", "radius", "cap", "cert_radius", "n_max", "ell"):
        v = getattr(args, k, None)
        if v is not None and v < 0:
            raise UsageError(f"--{k.replace('_', '-')} must be non-negative")


def main(argv: Optional[Sequence[str]] = None) -> int:
    from .coxeter import WordError
    from .growth import InputError
    from .tables import ResourceError
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _validate(args)
        return args.func(args)
    except UsageError as exc:
        print(f"pentlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"pentlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (WordError, InputError, ValueError) as exc:
        print(f"pentlab: bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - last resort
        log.exception("internal error")
        print(f"pentlab: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
