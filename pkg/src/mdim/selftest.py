"""Invariant suites over the built-in corpus, run by ``mdim selftest``."""

from __future__ import annotations

import math
import time
import traceback
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .approx import minimax_fit, target_float
from .corpus import circulant_corpus, corpus, pyramid
from .density import kernel_smooth
from .graph import Graph, LatticeSpec, build_honeycomb_patch, cycle_graph, cylinder_graph, path_graph
from .matching import (
    _EdgeRecursion,
    finite_moments,
    godsil_ratio_check,
    heilmann_lieb_check,
    isolate_roots,
    matching_counts,
    root_bound_squared,
    strip_matching_counts,
)
from .reference import reference_moments
from .roots import is_squarefree
from .saw import average_finite_moments, lattice_moments
from .thermo import ThermoContext, darroch_bounds_check, free_energy, pressure


@dataclass
class CheckResult:
    module: str
    invariant: str
    ok: bool
    seconds: float
    detail: str = ""


@dataclass
class SelftestReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def format(self) -> str:
        lines = []
        for r in self.results:
            tag = "PASS" if r.ok else "FAIL"
            extra = f"  {r.detail}" if r.detail else ""
            lines.append(f"{tag}  {r.module}/{r.invariant}  ({r.seconds:.2f}s){extra}")
        failed = sum(not r.ok for r in self.results)
        lines.append(f"{len(self.results) - failed} passed, {failed} failed")
        return "\n".join(lines) + "\n"


# each check returns True, or raises / returns False with the failure visible in the report


def _graph_json_roundtrip() -> bool:
    return all(Graph.from_json(g.to_json()) == g for g in corpus().values())


def _honeycomb_patch() -> bool:
    g = build_honeycomb_patch(2, 2)
    return g.n == 16 and g.num_edges == 19 and g.max_degree == 3


def _counts_agree() -> bool:
    # the two counting routes agree
    return all(
        matching_counts(g).m == tuple(_EdgeRecursion(10**6).count(frozenset(g.edges)))
        for g in corpus().values()
    )


def _heilmann_lieb() -> bool:
    for g in corpus().values():
        if g.n == 0:
            continue
        p = matching_counts(g)
        rm = isolate_roots(p)
        if sum(k for *_, k in rm.roots) != g.n or not heilmann_lieb_check(p, g.max_degree):
            return False
        # every isolating interval reaches into the allowed range
        if any(lo * lo > root_bound_squared(g.max_degree) for lo, hi, _ in rm.roots if lo > 0):
            return False
    return True


def _godsil_pyramid() -> bool:
    g = pyramid()
    return all(godsil_ratio_check(g, v, 10) for v in range(g.n))


def _strip_transfer() -> bool:
    return all(strip_matching_counts(w, l) == matching_counts(cylinder_graph(w, l)) for w, l in [(3, 3), (3, 5), (4, 4)])


def _circulants_squarefree() -> bool:
    return all(is_squarefree(matching_counts(g).x_coefficients()) for g in circulant_corpus(10).values())


def _hex_reference() -> bool:
    return lattice_moments(LatticeSpec.parse("hex"), 12).mu == reference_moments("hex", 12).mu


def _bethe_values() -> bool:
    mu = lattice_moments(LatticeSpec.parse("bethe:4"), 6).mu
    return mu[4] == 28 and mu[6] == 232


def _saw_average_equals_roots() -> bool:
    names = ["pyramid", "petersen", "C5", "K4", "cube"]
    c = corpus()
    return all(average_finite_moments(c[k], 10).mu == finite_moments(matching_counts(c[k]), 10).mu for k in names)


def _k2_closed_forms() -> bool:
    ctx = ThermoContext.finite(path_graph(2))
    fe = free_energy(ctx)
    return pressure(ctx, 1).exact == Fraction(1, 2) and abs(fe.value - math.log(2) / 2) <= fe.eps + 1e-15


def _disjoint_union() -> bool:
    g = cycle_graph(5)
    base = ThermoContext.finite(g)
    ok = True
    for k in (2, 3):
        ctx = ThermoContext.finite(g.copies(k))
        ok &= pressure(ctx, Fraction(1, 3)).exact == pressure(base, Fraction(1, 3)).exact
    return ok


def _darroch_pyramid() -> bool:
    return all(darroch_bounds_check(pyramid(), k) for k in (1, 2))


def _approx_sound() -> bool:
    pa = minimax_fit("halflog", 1, 8, D=3)
    z = np.linspace(-pa.R, pa.R, 2001)
    err = np.abs(pa.evaluate(z) - target_float("halflog", 1.0, z * z))
    return bool(err.max() <= pa.eps)


def _kernel_mass() -> bool:
    rm = isolate_roots(matching_counts(pyramid()))
    return abs(kernel_smooth(rm, 0.3).mass - 1) <= 1e-6


CHECKS: list[tuple[str, str, Callable[[], bool], bool]] = [
    # (module, invariant, check, part of the quick run)
    ("graph-core", "json-roundtrip", _graph_json_roundtrip, True),
    ("graph-core", "honeycomb-patch", _honeycomb_patch, True),
    ("matching-engine", "count-routes-agree", _counts_agree, True),
    ("matching-engine", "heilmann-lieb", _heilmann_lieb, True),
    ("matching-engine", "godsil-pyramid-order10", _godsil_pyramid, True),
    ("matching-engine", "strip-transfer", _strip_transfer, True),
    ("matching-engine", "circulant-squarefree", _circulants_squarefree, False),
    ("saw-walker", "hex-K12-reference", _hex_reference, True),
    ("saw-walker", "bethe4-a4-a6", _bethe_values, True),
    ("saw-walker", "saw-average-equals-roots", _saw_average_equals_roots, False),
    ("measure-calculus", "k2-closed-forms", _k2_closed_forms, True),
    ("measure-calculus", "disjoint-union", _disjoint_union, True),
    ("measure-calculus", "darroch-pyramid", _darroch_pyramid, True),
    ("approximator", "fit-sound", _approx_sound, True),
    ("density-tools", "kernel-mass", _kernel_mass, True),
]


def run_selftest(quick: bool = False) -> SelftestReport:
    report = SelftestReport()
    for module, name, fn, in_quick in CHECKS:
        if quick and not in_quick:
            continue
        t0 = time.perf_counter()
        detail = ""
        try:
            ok = bool(fn())
        except Exception as exc:  # a crash is a failed invariant, reported and not raised
            ok = False
            detail = f"{type(exc).__name__}: {exc}"
            tb = traceback.extract_tb(exc.__traceback__)
            if tb:
                detail += f" at {tb[-1].filename.rsplit('/', 1)[-1]}:{tb[-1].lineno}"
        report.results.append(CheckResult(module, name, ok, time.perf_counter() - t0, detail))
    return report
