"""Command-line interface: configure a computation, run the formula and/or
Monte Carlo routes, and write JSON records or CSV grids.

Exit codes: 0 success, 2 usage error, 3 numeric domain error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import platform
import re
import sys

import numpy as np

from . import __version__, ensembles, formulas, montecarlo, verify
from .errors import DimensionError, DomainError, SingularityError

_COMPLEX_RE = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"([+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' / 'a-bi' with both parts mandatory."""
    m = _COMPLEX_RE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(
            f"invalid complex literal {text!r}; expected 'a+bi' with both parts"
        )
    return complex(float(m.group(1)), float(m.group(2)))


def parse_complex_list(text: str) -> list[complex]:
    return [parse_complex(part) for part in text.split(",")]


def parse_real_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid real list {text!r}") from exc
    if not all(np.isfinite(values)):
        raise argparse.ArgumentTypeError("real list entries must be finite")
    return values


def parse_grid(text: str) -> np.ndarray:
    """Parse 'start:stop:count' into a linspace."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}; expected start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}") from exc
    if count < 1:
        raise argparse.ArgumentTypeError("grid count must be >= 1")
    return np.linspace(start, stop, count)


def load_matrix(text: str, n: int) -> np.ndarray:
    """Matrix from an inline row-major complex list or an '@file.json' path.

    JSON files hold a nested list of entries, each either an 'a+bi' string or
    an [re, im] pair.
    """
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            data = json.load(fh)
        rows = []
        for row in data:
            rows.append([parse_complex(e) if isinstance(e, str) else complex(e[0], e[1])
                         for e in row])
        mat = np.asarray(rows, dtype=np.complex128)
    else:
        flat = parse_complex_list(text)
        if len(flat) != n * n:
            raise argparse.ArgumentTypeError(
                f"inline matrix needs {n * n} entries for n={n}, got {len(flat)}"
            )
        mat = np.asarray(flat, dtype=np.complex128).reshape(n, n)
    if mat.shape != (n, n):
        raise argparse.ArgumentTypeError(f"matrix must be {n}x{n}, got {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise argparse.ArgumentTypeError("matrix entries must be finite")
    return mat


def _versions() -> dict:
    import scipy

    return {
        "rmtdiff": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _c(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmtdiff",
        description="Averages of characteristic polynomials of diffusing random "
                    "matrices: quadrature formulas, Monte Carlo, and cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, n_default=None):
        p.add_argument("--n", type=int, default=n_default, required=n_default is None,
                       help="matrix size")
        p.add_argument("--tau", type=float, default=1.0, help="diffusion time (variance scale)")
        p.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
        p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
        p.add_argument("--streams", type=int, default=4, help="independent MC streams")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("ratio", help="averaged ratio of characteristic polynomials")
    add_common(p)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--w", type=parse_complex, required=True)
    p.add_argument("--source", type=parse_real_list, default=None,
                   help="comma-separated real source eigenvalues (default zeros)")
    p.add_argument("--quad-order", type=int, default=None,
                   help="fix the quadrature order instead of adapting")

    p = sub.add_parser("duality", help="product-average duality (matrix vs parameter side)")
    add_common(p)
    p.add_argument("--zs", type=parse_complex_list, required=True,
                   help="comma-separated complex points z1,z2,...")
    p.add_argument("--x0", default=None, help="source matrix (inline list or @file.json)")

    p = sub.add_parser("correlated", help="correlation-deformed characteristic polynomial")
    add_common(p)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--gamma", type=parse_real_list, required=True)
    p.add_argument("--omega", type=parse_real_list, required=True)
    p.add_argument("--x0", default=None)

    p = sub.add_parser("product2", help="two-matrix product characteristic polynomial")
    add_common(p)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--x1", default=None)
    p.add_argument("--x2", default=None)
    p.add_argument("--method", choices=("mc", "quad"), default=None)

    p = sub.add_parser("crossover", help="real/complex crossover characteristic polynomial")
    add_common(p)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--x0", default=None)
    p.add_argument("--prefactor", choices=("normalized", "fixed-2n"), default="normalized")

    p = sub.add_parser("bump", help="near-axis bump: finite-size vs asymptotic profile")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--eta", type=parse_grid, required=True, help="grid start:stop:count")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("sample", help="draw matrices from one of the ensembles")
    add_common(p)
    p.add_argument("--kind", choices=ensembles.KINDS, required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--source", default=None)
    p.add_argument("--source2", default=None)
    p.add_argument("--count", type=int, default=1)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--suite", choices=("default", "deterministic", "quick"), default="default")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=20250801)
    p.add_argument("--streams", type=int, default=4)
    p.add_argument("--out", default=None)

    p = sub.add_parser("scan", help="evaluate a formula on a z grid, CSV output")
    p.add_argument("--scan-command", "--command", dest="scan_command",
                   choices=("ratio", "correlated", "crossover", "duality"), required=True)
    p.add_argument("--grid-re", type=parse_grid, required=True)
    p.add_argument("--grid-im", type=parse_grid, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--w", type=parse_complex, default=None)
    p.add_argument("--source", type=parse_real_list, default=None)
    p.add_argument("--gamma", type=parse_real_list, default=None)
    p.add_argument("--omega", type=parse_real_list, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--x0", default=None)
    p.add_argument("--out", default=None)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    # command-specific semantic validation: usage errors exit 2
    if getattr(args, "tau", 1.0) is not None and getattr(args, "tau", 1.0) <= 0:
        parser.error("tau must be > 0")
    if args.command == "ratio" and args.w.imag == 0:
        parser.error("Im(w) must be nonzero")
    if args.command in ("crossover",) and not 0.0 <= args.alpha <= 1.0:
        parser.error("alpha must lie in [0, 1]")
    if args.command == "sample":
        if args.kind == "crossover":
            if args.alpha is None or not 0.0 <= args.alpha <= 1.0:
                parser.error("crossover sampling requires alpha in [0, 1]")
        elif args.alpha is not None:
            parser.error("alpha is only valid for the crossover kind")
    if args.command == "duality" and len(args.zs) > 1 and args.samples is None:
        parser.error("k >= 2 requires --samples for the parameter-side Monte Carlo")
    if args.command == "scan":
        if args.scan_command == "ratio" and (args.w is None or args.w.imag == 0):
            parser.error("scan ratio requires --w with Im(w) nonzero")
        if args.scan_command == "correlated" and (args.gamma is None or args.omega is None):
            parser.error("scan correlated requires --gamma and --omega")
        if args.scan_command == "crossover" and (
                args.alpha is None or not 0.0 <= args.alpha <= 1.0):
            parser.error("scan crossover requires alpha in [0, 1]")
    return args


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _write_json(path: str | None, record: dict) -> None:
    _write_text(path, json.dumps(record, indent=2))


def _record(args, inputs: dict, formula_value=None, mc: montecarlo.McEstimate | None = None,
            check: verify.CheckReport | None = None, extra: dict | None = None) -> dict:
    rec = {
        "command": args.command,
        "inputs": inputs,
        "formula_value": _c(formula_value) if formula_value is not None else None,
        "mc_estimate": mc.as_dict() if mc is not None else None,
        "check_report": check.as_dict() if check is not None else None,
        "seeds": {"seed": getattr(args, "seed", None),
                  "streams": getattr(args, "streams", None)},
        "versions": _versions(),
    }
    if extra:
        rec.update(extra)
    return rec


def _maybe_matrix(text, n) -> np.ndarray:
    return np.zeros((n, n), dtype=np.complex128) if text is None else load_matrix(text, n)


def _run_ratio(args) -> dict:
    sources = args.source if args.source is not None else [0.0] * args.n
    if len(sources) != args.n:
        raise DomainError(f"--source needs {args.n} entries, got {len(sources)}")
    result = formulas.ratio_average(args.z, args.w, sources, args.tau,
                                    quad_order=args.quad_order)
    inputs = {"n": args.n, "tau": args.tau, "z": _c(args.z), "w": _c(args.w),
              "source": list(sources), "quad_order_used": result.quad_order,
              "samples": args.samples}
    mc = check = None
    if args.samples:
        spec = ensembles.EnsembleSpec("gue", args.n, args.tau, source=np.diag(sources))
        from . import observables

        mc = montecarlo.estimate(lambda h: observables.ratio_det(args.z, args.w, h),
                                 spec, args.samples, args.seed, streams=args.streams)
        check = verify.crosscheck(result.value, mc, name="ratio-two-route")
    return _record(args, inputs, result.value, mc, check)


def _run_duality(args) -> dict:
    x0 = _maybe_matrix(args.x0, args.n)
    inputs = {"n": args.n, "tau": args.tau, "zs": [_c(z) for z in args.zs],
              "x0": [[_c(v) for v in row] for row in x0.tolist()],
              "samples": args.samples}
    if args.samples:
        rep = formulas.duality_check(args.zs, x0, args.tau, args.samples, args.seed,
                                     streams=args.streams)
        rhs_is_mc = isinstance(rep.rhs, montecarlo.McEstimate)
        extra = {
            "duality": {
                "lhs": rep.lhs.as_dict(),
                "rhs": rep.rhs.as_dict() if rhs_is_mc else _c(rep.rhs),
                "z_score": rep.z_score,
                "analytic": _c(rep.analytic) if rep.analytic is not None else None,
            }
        }
        formula = None if rhs_is_mc else rep.rhs
        return _record(args, inputs, formula, rep.lhs, None, extra)
    value = formulas.duality_rhs(args.zs, x0, args.tau)
    return _record(args, inputs, value)


def _run_correlated(args) -> dict:
    x0 = _maybe_matrix(args.x0, args.n)
    if len(args.gamma) != args.n or len(args.omega) != args.n:
        raise DomainError("--gamma/--omega must have n entries")
    value = formulas.correlated_average(args.z, x0, args.gamma, args.omega, args.tau)
    inputs = {"n": args.n, "tau": args.tau, "z": _c(args.z), "gamma": args.gamma,
              "omega": args.omega, "samples": args.samples}
    mc = check = None
    if args.samples:
        spec = ensembles.EnsembleSpec("ginibre", args.n, args.tau, source=x0)
        gamma = np.asarray(args.gamma)
        omega = np.asarray(args.omega)
        eye = np.eye(args.n)

        def observable(x):
            core = (1.0 / gamma)[:, None] * x * (1.0 / omega)[None, :]
            d = np.linalg.det(args.z * eye - core)
            return d * np.conj(d)

        mc = montecarlo.estimate(observable, spec, args.samples, args.seed,
                                 streams=args.streams)
        check = verify.crosscheck(value, mc, name="correlated-two-route")
    return _record(args, inputs, value, mc, check)


def _run_product2(args) -> dict:
    x1 = _maybe_matrix(args.x1, args.n)
    x2 = _maybe_matrix(args.x2, args.n)
    inputs = {"n": args.n, "tau": args.tau, "z": _c(args.z), "samples": args.samples,
              "method": args.method}
    extra: dict = {}
    sources_zero = not (np.any(x1) or np.any(x2))
    if sources_zero:
        extra["reduced"] = {
            "hyp2f1_2d": formulas.product2_reduced(args.z, args.n, args.tau, "hyp2f1-2d"),
            "besselk0_1d": formulas.product2_reduced(args.z, args.n, args.tau, "besselk0-1d"),
        }
    method = args.method or ("mc" if args.samples else "quad")
    if method == "mc":
        if not args.samples:
            raise DomainError("method 'mc' requires --samples")
        mc = formulas.product2_average(args.z, x1, x2, args.tau, samples=args.samples,
                                       seed=args.seed, streams=args.streams, method="mc")
        return _record(args, inputs, None, mc, None, extra)
    value = formulas.product2_average(args.z, x1, x2, args.tau, method="quad")
    return _record(args, inputs, value, None, None, extra)


def _run_crossover(args) -> dict:
    x0 = _maybe_matrix(args.x0, args.n)
    value = formulas.crossover_average(args.z, x0, args.alpha, args.tau,
                                       prefactor=args.prefactor)
    inputs = {"n": args.n, "tau": args.tau, "z": _c(args.z), "alpha": args.alpha,
              "prefactor": args.prefactor, "samples": args.samples}
    mc = check = None
    if args.samples:
        spec = ensembles.EnsembleSpec("crossover", args.n, args.tau, source=x0,
                                      alpha=args.alpha)
        eye = np.eye(args.n)

        def observable(x):
            d = np.linalg.det(args.z * eye - x)
            return d * np.conj(d)

        mc = montecarlo.estimate(observable, spec, args.samples, args.seed,
                                 streams=args.streams)
        check = verify.crosscheck(value, mc, name="crossover-two-route")
    return _record(args, inputs, complex(value), mc, check)


def _run_bump(args) -> str:
    etas = args.eta
    finite = formulas.crossover_finite_curve(etas, args.a, args.tau, args.n)
    asym = formulas.crossover_bump_curve(etas, args.a, args.tau)
    rows = [["eta", "finite_n", "asymptotic"]]
    for e, f, s in zip(etas, finite, asym):
        rows.append([f"{e:.17g}", f"{f:.17g}", f"{s:.17g}"])
    return "\r\n".join(",".join(r) for r in rows) + "\r\n"


def _run_sample(args) -> dict:
    n = args.n
    spec = ensembles.EnsembleSpec(
        args.kind, n, args.tau,
        source=None if args.source is None else load_matrix(args.source, n),
        source2=(None if args.source2 is None else load_matrix(args.source2, n))
        if args.kind == "two-ginibre" else None,
        alpha=args.alpha if args.kind == "crossover" else None,
    )

    def encode(m):
        return [[_c(v) for v in row] for row in np.asarray(m).tolist()]

    draws = []
    for i in range(args.count):
        d = ensembles.sample(spec, ensembles.RngStream(args.seed, i))
        draws.append([encode(d[0]), encode(d[1])] if isinstance(d, tuple) else encode(d))
    inputs = {"kind": args.kind, "n": n, "tau": args.tau, "alpha": args.alpha,
              "count": args.count}
    return _record(args, inputs, None, None, None, {"draws": draws})


def _run_verify(args) -> dict:
    cfg = verify.SuiteConfig(samples=args.samples, seed=args.seed, streams=args.streams,
                             deterministic_only=args.suite == "deterministic")
    if args.suite == "quick":
        cfg = dataclasses.replace(cfg, samples=min(args.samples, 50_000))
    reports = verify.run_suite(cfg)
    return {
        "command": "verify",
        "suite": args.suite,
        "inputs": {"samples": cfg.samples, "seed": cfg.seed, "streams": cfg.streams},
        "reports": [r.as_dict() for r in reports],
        "all_pass": all(r.passed for r in reports),
        "versions": _versions(),
    }


def _run_scan(args) -> str:
    x0 = None if args.x0 is None else load_matrix(args.x0, args.n)
    rows = [["re_z", "im_z", "value_re", "value_im", "stderr_re", "stderr_im", "method"]]
    for im in args.grid_im:
        for re_ in args.grid_re:
            z = complex(re_, im)
            if args.scan_command == "ratio":
                sources = args.source if args.source is not None else [0.0] * args.n
                val = formulas.ratio_average(z, args.w, sources, args.tau).value
            elif args.scan_command == "correlated":
                val = formulas.correlated_average(
                    z, x0 if x0 is not None else np.zeros((args.n, args.n)),
                    args.gamma, args.omega, args.tau)
            elif args.scan_command == "crossover":
                val = complex(formulas.crossover_average(
                    z, x0 if x0 is not None else np.zeros((args.n, args.n)),
                    args.alpha, args.tau))
            else:  # duality, k = 1
                val = formulas.duality_rhs(
                    [z], x0 if x0 is not None else np.zeros((args.n, args.n)), args.tau)
            val = complex(val)
            rows.append([f"{re_:.17g}", f"{im:.17g}", f"{val.real:.17g}",
                         f"{val.imag:.17g}", "0", "0", "quadrature"])
    return "\r\n".join(",".join(r) for r in rows) + "\r\n"


def run(args: argparse.Namespace) -> int:
    """Execute a parsed command; returns the process exit status."""
    try:
        if args.command == "bump":
            _write_text(args.out, _run_bump(args))
        elif args.command == "scan":
            _write_text(args.out, _run_scan(args))
        elif args.command == "verify":
            _write_json(args.out, _run_verify(args))
        else:
            runner = {
                "ratio": _run_ratio,
                "duality": _run_duality,
                "correlated": _run_correlated,
                "product2": _run_product2,
                "crossover": _run_crossover,
                "sample": _run_sample,
            }[args.command]
            _write_json(args.out, runner(args))
    except (DomainError, DimensionError, SingularityError, FloatingPointError) as exc:
        print(f"numeric domain error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


def main(argv=None) -> None:
    sys.exit(run(parse_args(argv)))
