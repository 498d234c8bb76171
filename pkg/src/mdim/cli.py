"""``mdim`` command line.

Every output carries the resolved job description and the library version.
Exit codes: 0 success, 2 invariant failure, 3 resource budget exceeded,
4 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .approx import TARGETS, as_fraction, minimax_fit, radius_squared
from .errors import InputError, MdimError
from .graph import Graph, LatticeSpec
from .saw import DEFAULT_NODE_BUDGET, MomentSequence, lattice_moments

log = logging.getLogger("mdim")

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_RESOURCE = 3
EXIT_INPUT = 4


@dataclass
class JobSpec:
    """Fully resolved description of one invocation."""

    subcommand: str
    source: str | None = None
    K: int | None = None
    targets: dict = field(default_factory=dict)
    degree: int | None = None
    threads: int = 1
    precision_bits: int = 256
    node_budget: int = DEFAULT_NODE_BUDGET
    out: str | None = None
    params: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return asdict(self)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for invariant failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ output


def _envelope(job: JobSpec, payload: dict) -> dict:
    return {"version": __version__, "job": job.to_json_obj(), **payload}


def _write(job: JobSpec, text: str) -> None:
    if job.out:
        Path(job.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(job: JobSpec, payload: dict) -> None:
    _write(job, json.dumps(_envelope(job, payload), indent=2) + "\n")


def _header_lines(job: JobSpec) -> str:
    return f"# mdim {__version__}\n# job: {json.dumps(job.to_json_obj(), sort_keys=True)}\n"


# ------------------------------------------------------------------ inputs


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_graph(path: str) -> Graph:
    try:
        return Graph.from_json(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_moments(path: str) -> MomentSequence:
    return MomentSequence.from_json_obj(_read_json(path))


def ingest_mayer(path: str | Path, D: int, halved: bool = False) -> MomentSequence:
    """Moments from a CSV of ``n,value`` Mayer rows (n = 1, 2, ... in order).

    Blank lines, ``#`` comments and a non-numeric header row are skipped.
    ``halved`` marks d_n = a_n / 2 inputs.
    """
    from .thermo import mayer_to_moments

    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    values = []
    seen_header = False
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise InputError(f"{path}:{lineno}: expected 'n,value', got {row!r}")
        try:
            n = int(row[0])
        except ValueError:
            if not values and not seen_header:
                seen_header = True
                continue
            raise InputError(f"{path}:{lineno}: bad index {row[0]!r}") from None
        if n != len(values) + 1:
            raise InputError(f"{path}:{lineno}: expected n = {len(values) + 1}, got {n}")
        try:
            values.append(Fraction(row[1].strip()))
        except ValueError:
            raise InputError(f"{path}:{lineno}: bad value {row[1]!r}") from None
    if not values:
        raise InputError(f"{path}: no Mayer coefficients found")
    form = "d_n = a_n/2" if halved else "a_n"
    return mayer_to_moments(values, D, halved=halved, source=f"mayer:{Path(path).name} ({form})")


# ---------------------------------------------------------------- commands


def cmd_moments(args, job: JobSpec) -> int:
    from .reference import reference_moments

    given = [x is not None for x in (args.lattice, args.reference, args.mayer_csv)]
    if sum(given) != 1:
        raise InputError("give exactly one of --lattice, --reference, --mayer-csv")
    if args.lattice:
        if args.max_order is None:
            raise InputError("--lattice needs --max-order")
        spec = LatticeSpec.parse(args.lattice)
        job.source = f"lattice:{spec.name}"
        job.K = args.max_order
        t0 = time.perf_counter()
        mu = lattice_moments(spec, args.max_order, node_budget=job.node_budget, threads=job.threads)
        log.info("moments of %s to order %d in %.2fs", spec.name, args.max_order, time.perf_counter() - t0)
    elif args.reference:
        mu = reference_moments(args.reference, args.max_order)
        job.source = mu.source
        job.K = mu.K
    else:
        if args.degree is None:
            raise InputError("--mayer-csv needs --degree D (the lattice coordination number)")
        mu = ingest_mayer(args.mayer_csv, args.degree, args.halved)
        if args.max_order is not None:
            mu = mu.truncate(args.max_order)
        job.source = mu.source
        job.K = mu.K
        job.params["halved"] = args.halved
    _emit_json(job, mu.to_json_obj())
    return EXIT_OK


def cmd_finite(args, job: JobSpec) -> int:
    from .matching import finite_moments, isolate_roots, matching_counts

    g = load_graph(args.graph)
    job.source = f"graph:{args.graph}"
    job.K = args.moments
    p = matching_counts(g)
    payload: dict = {"n": p.n, "m": [str(x) for x in p.m]}
    if args.roots:
        precision = Fraction(args.root_precision)
        job.params["root_precision"] = str(precision)
        payload["roots"] = isolate_roots(p, precision).to_json_obj()
    if args.moments is not None:
        payload["moments"] = [str(x) for x in finite_moments(p, args.moments).mu]
    _emit_json(job, payload)
    return EXIT_OK


def _thermo_context(args, job: JobSpec):
    from .thermo import ThermoContext

    if (args.moments is None) == (args.graph is None):
        raise InputError("give exactly one of --moments or --graph")
    if args.graph:
        job.source = f"graph:{args.graph}"
        return ThermoContext.finite(load_graph(args.graph), prec_bits=job.precision_bits)
    mu = load_moments(args.moments)
    job.source = f"moments:{args.moments} ({mu.source})"
    job.K = mu.K
    ctx = ThermoContext.lattice(mu, args.degree, prec_bits=job.precision_bits)
    job.degree = ctx.N
    return ctx


def cmd_thermo(args, job: JobSpec) -> int:
    from . import thermo

    ctx = _thermo_context(args, job)
    if (args.t is None) == (args.p is None):
        raise InputError("give exactly one of --t or --p")
    if args.t is not None:
        t = as_fraction(args.t)
        job.targets = {"t": str(t)}
        quantity = args.quantity
        fn = {"F": thermo.F, "pressure": thermo.pressure, "lnM": thermo.log_partition_density}[quantity]
        cv = fn(ctx, t)
        payload = {"quantity": quantity}
    else:
        p = as_fraction(args.p)
        job.targets = {"p": str(p)}
        cv = thermo.lambda_of_p(ctx, p)
        payload = {"quantity": "lambda"}
        if p < ctx.pstar and p > 0:
            inv = thermo.invert_pressure(ctx, p)
            payload["t_of_p"] = {"value": float(inv.t), "lo": float(inv.lo), "hi": float(inv.hi)}
    job.params["quantity"] = payload["quantity"]
    payload.update(cv.to_json_obj())
    payload["value"] = cv.value
    payload["eps"] = cv.eps if math.isfinite(cv.eps) else "inf"
    _emit_json(job, payload)
    return EXIT_OK


def cmd_approx(args, job: JobSpec) -> int:
    if args.target not in TARGETS:
        raise InputError(f"target must be one of {TARGETS}")
    if args.degree is None:
        raise InputError("--degree is required")
    if (args.radius_from_degree is None) == (args.radius_squared is None):
        raise InputError("give exactly one of --radius-from-degree or --radius-squared")
    R2 = radius_squared(args.radius_from_degree) if args.radius_from_degree else as_fraction(args.radius_squared)
    t = as_fraction(args.t)
    job.source = f"target:{args.target}"
    job.degree = args.degree
    job.targets = {"t": str(t)}
    job.params.update({"R2": str(R2), "emit": args.emit})
    pa = minimax_fit(args.target, t, args.degree, R2=R2, prec_bits=job.precision_bits)
    obj = pa.to_json_obj()
    if args.emit:
        Path(args.emit).write_text(json.dumps(_envelope(job, obj), indent=2) + "\n")
    _emit_json(job, obj)
    return EXIT_OK


def cmd_density(args, job: JobSpec) -> int:
    from . import density
    from .matching import isolate_roots, matching_counts, strip_matching_counts, torus_matching_counts

    job.params.update({"mode": args.mode, "grid_size": args.grid_size})
    if args.mode == "kernel":
        sources = [args.graph is not None, args.strip is not None, args.torus is not None]
        if sum(sources) != 1:
            raise InputError("kernel mode needs exactly one of --graph, --strip W,L, --torus W,L")
        if args.graph:
            p = matching_counts(load_graph(args.graph))
            job.source = f"graph:{args.graph}"
        else:
            w, l = _pair(args.strip or args.torus)
            build = strip_matching_counts if args.strip else torus_matching_counts
            p = build(w, l)
            job.source = f"{'strip' if args.strip else 'torus'}:{w}x{l}"
        rm = isolate_roots(p)
        ds = density.kernel_smooth(rm, args.bandwidth, args.grid_size)
    else:
        if (args.moments is None) == (args.lattice is None):
            raise InputError("l2 mode needs exactly one of --moments or --lattice")
        if args.degree is None:
            raise InputError("l2 mode needs --degree N")
        if args.moments:
            mu = load_moments(args.moments)
            job.source = f"moments:{args.moments}"
        else:
            spec = LatticeSpec.parse(args.lattice)
            mu = lattice_moments(spec, args.degree, node_budget=job.node_budget, threads=job.threads)
            job.source = f"lattice:{spec.name}"
        job.K = mu.K
        job.degree = args.degree
        ds = density.l2_projection(mu, args.degree, args.radius, args.grid_size)
    job.params.update({k: v for k, v in ds.params.items()})
    log.info("density mass %.12g, negative values: %s", ds.mass, ds.has_negative)
    _write(job, _header_lines(job) + f"# mass: {ds.mass!r}\n" + ds.to_dat())
    return EXIT_OK


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"expected W,L, got {text!r}") from None
    return a, b


def run_table1(lattices: list[str], moments_dir: str | Path | None, *, degree: int | None = None,
               prec_bits: int = 256) -> list[dict]:
    """One row per lattice: free energy and pressure at t = 1 against the published values."""
    from .reference import TABLE1
    from .thermo import ThermoContext, free_energy, pressure

    rows = []
    for name in lattices:
        spec = LatticeSpec.parse(name)
        ref = TABLE1.get(spec.name)
        row = {"lattice": spec.name, "status": "unavailable", "free_energy": None, "pressure": None,
               "K": None, "reference": ref}
        path = Path(moments_dir) / f"{spec.name}.json" if moments_dir else None
        if path is None or not path.exists():
            rows.append(row)
            continue
        mu = load_moments(str(path))
        if mu.D != spec.coordination:
            raise InputError(f"{path}: D = {mu.D} but {spec.name} has coordination {spec.coordination}")
        ctx = ThermoContext.lattice(mu, degree, prec_bits=prec_bits)
        fe, pr = free_energy(ctx), pressure(ctx, 1)
        row.update(free_energy=fe, pressure=pr, K=mu.K)
        if ref is None:
            row["status"] = "no-reference"
        else:
            ok = fe.contains(Fraction(ref.free_energy)) and pr.contains(Fraction(ref.pressure))
            row["status"] = "in-interval" if ok else "OUTSIDE"
        rows.append(row)
    return rows


def format_table(rows: list[dict]) -> str:
    out = ["lattice\tfree_energy\teps\tpressure\teps\tK\tstatus"]
    for r in rows:
        fe, pr = r["free_energy"], r["pressure"]
        if fe is None:
            out.append(f"{r['lattice']}\tNA\tNA\tNA\tNA\tNA\t{r['status']}")
        else:
            out.append(f"{r['lattice']}\t{fe.value:.12f}\t{fe.eps:.3e}\t{pr.value:.12f}\t{pr.eps:.3e}"
                       f"\t{r['K']}\t{r['status']}")
    return "\n".join(out) + "\n"


def cmd_table(args, job: JobSpec) -> int:
    lattices = [x.strip() for x in args.lattices.split(",") if x.strip()] if args.lattices else []
    job.source = f"moments-dir:{args.moments_dir}"
    job.targets = {"t": "1"}
    job.params.update({"lattices": lattices, "strict": args.strict})
    rows = run_table1(lattices, args.moments_dir, degree=args.degree, prec_bits=job.precision_bits)
    _write(job, _header_lines(job) + format_table(rows))
    if args.strict:
        if any(r["status"] == "unavailable" for r in rows):
            return EXIT_INPUT
        if any(r["status"] == "OUTSIDE" for r in rows):
            return EXIT_INVARIANT
    return EXIT_OK


def cmd_selftest(args, job: JobSpec) -> int:
    from .selftest import run_selftest

    report = run_selftest(quick=args.quick)
    text = _header_lines(job) + report.format()
    _write(job, text)
    return EXIT_OK if report.ok else EXIT_INVARIANT


# ------------------------------------------------------------------ parser


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    # on subcommands the defaults are suppressed so they don't overwrite flags given before the subcommand
    def d(x):
        return argparse.SUPPRESS if suppress else x

    p.add_argument("--threads", type=int, default=d(1), help="worker threads for the walk enumeration")
    p.add_argument("--precision-bits", type=int, default=d(256), help="working precision of interval steps")
    p.add_argument("--node-budget", type=int, default=d(DEFAULT_NODE_BUDGET), help="max walk-tree nodes")
    p.add_argument("--out", default=d(None), help="write the result here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mdim", description="Monomer-dimer free energies from matching measures.")
    _global_flags(ap, suppress=False)
    ap.add_argument("--version", action="version", version=f"mdim {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)

    p = sub.add_parser("moments", parents=[common], help="moment sequence of a lattice")
    p.add_argument("--lattice", help="z2..z7, hex or bethe:d")
    p.add_argument("--max-order", type=int)
    p.add_argument("--reference", choices=["hex"], help="ship the stored published list instead")
    p.add_argument("--mayer-csv", help="CSV of n,a_n Mayer coefficients")
    p.add_argument("--halved", action="store_true", help="CSV holds d_n = a_n/2")
    p.add_argument("--degree", type=int, help="coordination number D for --mayer-csv")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("finite", parents=[common], help="matching polynomial of a graph")
    p.add_argument("--graph", required=True, help="graph JSON {n, edges}")
    p.add_argument("--roots", action="store_true")
    p.add_argument("--root-precision", default="1/1000000")
    p.add_argument("--moments", type=int, metavar="K")
    p.set_defaults(func=cmd_finite)

    p = sub.add_parser("thermo", parents=[common], help="pressure, free energy, entropy")
    p.add_argument("--moments", help="moment JSON of a lattice")
    p.add_argument("--graph", help="graph JSON (exact finite computation)")
    p.add_argument("--t", help="activity")
    p.add_argument("--p", help="dimer density; reports lambda(p)")
    p.add_argument("--quantity", choices=["F", "pressure", "lnM"], default="F")
    p.add_argument("--degree", type=int, help="polynomial degree N (default: all moments)")
    p.set_defaults(func=cmd_thermo)

    p = sub.add_parser("approx", parents=[common], help="certified minimax polynomial")
    p.add_argument("--target", required=True, choices=TARGETS)
    p.add_argument("--t", default="1")
    p.add_argument("--radius-from-degree", type=int, metavar="D")
    p.add_argument("--radius-squared", help="R^2 directly")
    p.add_argument("--degree", type=int, metavar="N")
    p.add_argument("--emit", help="also write the PolyApprox JSON here")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("density", parents=[common], help="density picture as .dat rows")
    p.add_argument("--mode", choices=["kernel", "l2"], required=True)
    p.add_argument("--graph")
    p.add_argument("--strip", metavar="W,L")
    p.add_argument("--torus", metavar="W,L")
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--moments")
    p.add_argument("--lattice")
    p.add_argument("--degree", type=int, metavar="N")
    p.add_argument("--radius", type=float)
    p.add_argument("--grid-size", type=int, default=2001)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("table", parents=[common], help="free energy and pressure table")
    p.add_argument("--lattices", default="z2,z3,z4,z5,z6,z7,hex")
    p.add_argument("--moments-dir")
    p.add_argument("--degree", type=int, metavar="N")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    job = JobSpec(args.subcommand, threads=args.threads, precision_bits=args.precision_bits,
                  node_budget=args.node_budget, out=args.out)
    try:
        if args.threads < 1 or args.precision_bits < 53 or args.node_budget < 1:
            raise InputError("--threads, --node-budget must be >= 1 and --precision-bits >= 53")
        return args.func(args, job)
    except MdimError as exc:
        print(f"mdim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
