"""Command-line front end: reflect / turning-points / sweep / localize / validate.

Every numeric record carries its method tag and status.  Exit codes:
0 success, 1 domain errors (bad delta/eps/flags), 2 numeric failures
(below-floor results or failed validation), 64 usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import born as born_mod
from . import exact as exact_mod
from . import localization as loc_mod
from . import regime_map as map_mod
from . import wkb as wkb_mod
from .errors import DomainError, EnsembleConfigurationError
from .potentials import (
    Family,
    PotentialSpec,
    eval_shape,
    fourier_spec_from_json,
    load_tabulated,
)
from .random_potential import GaussianCorrelation

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_NUMERIC = 2
EXIT_USAGE = 64

_FAMILIES = {
    "fermi": Family.FERMI_STEP,
    "sech2": Family.SECH_SQUARED,
    "gauss": Family.GAUSSIAN_BUMP,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> _Parser:
    p = _Parser(prog="overbarrier",
                description="Above-barrier 1D reflection (exact / born / wkb) "
                            "and localization in smooth random potentials")
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file whose keys mirror the flags of the subcommand")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for sweeps/ensembles (0 = auto)")
    sub = p.add_subparsers(dest="command", required=True)

    def add_potential_flags(sp):
        sp.add_argument("--family", choices=sorted(_FAMILIES), default=None)
        sp.add_argument("--fourier-json", type=Path, default=None,
                        help="load a fourier-family spec from JSON")
        sp.add_argument("--tabulated", type=Path, default=None,
                        help="load a tabulated shape from two-column text")
        sp.add_argument("--delta", type=float, default=None)
        sp.add_argument("--eps", type=float, default=None)

    sp = sub.add_parser("reflect", help="reflectance of one potential")
    add_potential_flags(sp)
    sp.add_argument("--method", choices=["exact", "closed-form", "born", "wkb"],
                    default="exact")
    sp.add_argument("--backend", choices=["ie", "tm"], default="ie",
                    help="exact backend: invariant embedding or transfer matrix")
    sp.add_argument("--out", type=Path, default=None)
    sp.add_argument("--dump-shape", type=Path, default=None,
                    help="also write a CSV of z, U over the solve window")

    sp = sub.add_parser("turning-points", help="complex turning points of a potential")
    add_potential_flags(sp)
    sp.add_argument("--strip-depth", type=float, default=None)
    sp.add_argument("--out", type=Path, default=None)

    sp = sub.add_parser(
        "sweep", help="grid sweep of the (delta, eps) plane",
        epilog="cells CSV columns: delta, eps, R_exact (empty when not "
               "resolvable), R_born, R_wkb, S, regime; "
               "line CSV columns: ln_inv_eps, ln_inv_delta")
    sp.add_argument("--family", choices=sorted(_FAMILIES), required=True)
    sp.add_argument("--delta-min", type=float, default=1e-4)
    sp.add_argument("--delta-max", type=float, default=0.9)
    sp.add_argument("--delta-points", type=int, default=32)
    sp.add_argument("--eps-min", type=float, default=0.05)
    sp.add_argument("--eps-max", type=float, default=2.0)
    sp.add_argument("--eps-points", type=int, default=24)
    sp.add_argument("--out", type=Path, required=True, help="cells CSV path")
    sp.add_argument("--line", type=Path, default=None, help="dividing-line CSV path")

    sp = sub.add_parser(
        "localize", help="localization length of a random ensemble",
        epilog="--dump-lnt CSV columns: index, ln_T (one row per realization)")
    sp.add_argument("--correlation", choices=["gaussian"], default="gaussian")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--L0", type=float, required=True)
    sp.add_argument("--n", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--method", choices=["ensemble", "born", "wkb-hist"],
                    default="ensemble")
    sp.add_argument("--out", type=Path, default=None)
    sp.add_argument("--dump-lnt", type=Path, default=None,
                    help="CSV of per-realization ln T (ensemble method)")

    sp = sub.add_parser("validate", help="regression of solvers against closed forms")
    sp.add_argument("--family", choices=sorted(_FAMILIES) + ["all"], default="all")
    return p


def _merge_config(args: argparse.Namespace, parser: _Parser) -> argparse.Namespace:
    if args.config is None:
        return args
    try:
        doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {args.config}: {exc}")
    for key, val in doc.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise DomainError(f"config key {key!r} does not match any flag")
        if parser.get_default(attr) == getattr(args, attr):
            setattr(args, attr, Path(val) if isinstance(getattr(args, attr), Path)
                    else val)
    return args


def _spec_from_args(args) -> PotentialSpec:
    chosen = [x for x in (args.family, args.fourier_json, args.tabulated)
              if x is not None]
    if len(chosen) != 1:
        raise DomainError("choose exactly one of --family / --fourier-json / --tabulated")
    if args.fourier_json is not None:
        return fourier_spec_from_json(Path(args.fourier_json).read_text())
    if args.tabulated is not None:
        if args.delta is None or args.eps is None:
            raise DomainError("--tabulated needs --delta and --eps")
        return load_tabulated(args.tabulated, args.delta, args.eps)
    if args.delta is None or args.eps is None:
        raise DomainError("--family needs --delta and --eps")
    return PotentialSpec(_FAMILIES[args.family], args.delta, args.eps)


def _emit(doc: dict, out: Path | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n")


def _family_tag(spec: PotentialSpec) -> str:
    return spec.family.value


def _cmd_reflect(args) -> int:
    spec = _spec_from_args(args)
    if args.method == "wkb" and spec.family is Family.TABULATED:
        raise DomainError("wkb reflectance needs an analytic family, not tabulated data")
    if args.dump_shape is not None:
        z_l, z_r = exact_mod.solve_domain(spec)
        z = np.linspace(z_l, z_r, 2001)
        u = eval_shape(spec, z).real
        with open(args.dump_shape, "w") as fh:
            fh.write("z,U\n")
            for zi, ui in zip(z, u):
                fh.write(f"{zi:.17g},{ui:.17g}\n")

    doc = {"family": _family_tag(spec), "delta": spec.delta, "eps": spec.eps,
           "method": args.method}
    if args.method == "exact":
        backend = (exact_mod.BACKEND_INVARIANT_EMBEDDING if args.backend == "ie"
                   else exact_mod.BACKEND_TRANSFER_MATRIX)
        res = exact_mod.reflectance_exact(spec, exact_mod.SolveOptions(backend=backend))
        doc.update(_scatter_doc(res))
        _emit(doc, args.out)
        return EXIT_OK if res.status == exact_mod.STATUS_OK else EXIT_NUMERIC
    if args.method == "closed-form":
        res = exact_mod.closed_form_result(spec)
        doc.update(_scatter_doc(res))
        _emit(doc, args.out)
        return EXIT_OK
    if args.method == "born":
        amp = born_mod.born_amplitude(spec)
        r = 0.25 * spec.delta**2 * abs(amp.value) ** 2
        doc.update({"R": r, "T": 1.0 - r, "status": amp.status,
                    "regularized": amp.regularized, "abserr": amp.abserr,
                    "r": None, "t": None})
        _emit(doc, args.out)
        return EXIT_OK if amp.status == born_mod.STATUS_OK else EXIT_NUMERIC
    res = wkb_mod.reflectance_wkb(spec)
    tp = res.turning_point
    doc.update({
        "R": res.reflectance, "ln_R": res.ln_reflectance, "T": 1.0 - res.reflectance,
        "r": None, "t": None, "status": "ok",
        "turning_point": {"re": tp.z0.real, "im": tp.z0.imag},
        "gamma": tp.gamma, "smoothness": tp.smoothness,
        "validity_warning": res.validity_warning,
    })
    _emit(doc, args.out)
    return EXIT_OK


def _scatter_doc(res: exact_mod.ScatterResult) -> dict:
    return {
        "r": None if res.r is None else [res.r.real, res.r.imag],
        "t": None if res.t is None else [res.t.real, res.t.imag],
        "R": res.R, "T": res.T, "ln_R": res.ln_R,
        "k_minus": res.k_minus, "k_plus": res.k_plus,
        "backend": res.backend, "status": res.status,
    }


def _cmd_turning_points(args) -> int:
    spec = _spec_from_args(args)
    opts = wkb_mod.WkbOptions(strip_depth=args.strip_depth)
    pts = wkb_mod.find_turning_points(spec, opts)
    doc = {
        "family": _family_tag(spec), "delta": spec.delta, "eps": spec.eps,
        "method": "wkb", "status": "ok" if pts else "empty",
        "turning_points": [
            {"re": p.z0.real, "im": p.z0.imag, "gamma": p.gamma,
             "smoothness": p.smoothness, "residual": p.residual,
             "singularity_distance": p.singularity_distance}
            for p in pts
        ],
    }
    _emit(doc, args.out)
    return EXIT_OK if pts else EXIT_NUMERIC


def _cmd_sweep(args, threads: int) -> int:
    family = _FAMILIES[args.family]
    deltas = np.geomspace(args.delta_min, args.delta_max, args.delta_points)
    epss = np.geomspace(args.eps_min, args.eps_max, args.eps_points)
    cells = map_mod.sweep(family, deltas, epss, max_workers=threads)
    map_mod.write_cells_csv(cells, args.out)
    if args.line is not None:
        line = map_mod.crossover_line(cells)
        map_mod.write_line_csv(line, args.line)
    n_err = sum(1 for c in cells if c.error)
    print(json.dumps({"cells": len(cells), "errors": n_err,
                      "out": str(args.out),
                      "line": None if args.line is None else str(args.line)}))
    return EXIT_OK


def _cmd_localize(args) -> int:
    corr = GaussianCorrelation(args.eps)
    if args.method == "born":
        cfg = loc_mod.EnsembleConfig(corr, args.delta, args.L0, 2, args.seed)
        doc = {"method": "born", "status": "ok", "delta": args.delta,
               "eps": args.eps, "lloc_inv": loc_mod.born_lloc(cfg)}
        _emit(doc, args.out)
        return EXIT_OK
    cfg = loc_mod.EnsembleConfig(corr, args.delta, args.L0, args.n, args.seed)
    if args.method == "wkb-hist":
        hist = loc_mod.turning_point_histogram(cfg)
        est = loc_mod.wkb_lloc_estimate(hist)
        doc = {
            "method": "wkb-hist", "status": "ok", "delta": args.delta,
            "eps": args.eps, "L0": args.L0, "n": args.n, "seed": args.seed,
            "lloc_inv": est.value, "up_to_constant": est.up_to_constant,
            "lambda": hist.lambda_spacing, "gamma_min": hist.gamma_min,
            "n_points": hist.n_points, "n_empty": hist.n_empty,
            "bin_edges": hist.bin_edges.tolist(),
            "counts_per_length": hist.counts_per_length.tolist(),
        }
        _emit(doc, args.out)
        return EXIT_OK
    est = loc_mod.estimate_lloc(cfg)
    if args.dump_lnt is not None:
        ln_t = loc_mod.ln_transmission_samples(cfg)
        with open(args.dump_lnt, "w") as fh:
            fh.write("index,ln_T\n")
            for i, v in enumerate(ln_t):
                fh.write(f"{i},{v:.17g}\n")
    doc = {
        "method": "ensemble", "status": "ok", "delta": args.delta, "eps": args.eps,
        "L0": args.L0, "n": est.n, "seed": args.seed,
        "lloc_inv": est.lloc_inv, "stderr": est.stderr,
        "born_pred": est.born_pred, "lnT_mean": est.lnT_mean, "lnT_var": est.lnT_var,
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    fams = sorted(_FAMILIES) if args.family == "all" else [args.family]
    all_ok = True
    rows = []
    for name in fams:
        family = _FAMILIES[name]
        if family in (Family.FERMI_STEP, Family.SECH_SQUARED):
            for delta in (0.1, 0.3, 0.5, 0.7, 0.9):
                for eps in (0.5, 1.0, 2.0):
                    spec = PotentialSpec(family, delta, eps)
                    ref = exact_mod.reflectance_closed_form(spec)
                    res = exact_mod.reflectance_exact(spec)
                    if res.status != exact_mod.STATUS_OK:
                        ok, err = False, math.inf
                    else:
                        err = abs(res.R / ref - 1.0)
                        ok = err <= 1e-6
                    all_ok &= ok
                    rows.append((name, "exact-vs-closed", delta, eps, err, ok))
        else:
            for delta in (1e-3, 1e-2):
                for eps in (0.5, 1.0, 2.0):
                    spec = PotentialSpec(family, delta, eps)
                    ref = born_mod.born_closed_form(spec)
                    err = abs(born_mod.reflectance_born(spec) / ref - 1.0)
                    ok = err <= 1e-8
                    all_ok &= ok
                    rows.append((name, "born-vs-closed", delta, eps, err, ok))
            for delta in (0.1, 0.5, 0.9):
                spec = PotentialSpec(family, delta, 0.7)
                pts = wkb_mod.find_turning_points(spec)
                want = 1j * math.sqrt(math.log(1.0 / delta)) / 0.7
                err = abs(pts[0].z0 - want)
                ok = err <= 1e-10
                all_ok &= ok
                rows.append((name, "turning-point", delta, 0.7, err, ok))
    wid = "family check          delta    eps      error       verdict"
    print(wid)
    for name, check, delta, eps, err, ok in rows:
        print(f"{name:<6} {check:<15} {delta:<8g} {eps:<8g} {err:<11.3e} "
              f"{'PASS' if ok else 'FAIL'}")
    print(f"overall: {'PASS' if all_ok else 'FAIL'}")
    return EXIT_OK if all_ok else EXIT_NUMERIC


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        args = _merge_config(args, parser)
        threads = args.threads if args.threads > 0 else None
        import os

        threads = threads or os.cpu_count() or 1
        if args.command == "reflect":
            return _cmd_reflect(args)
        if args.command == "turning-points":
            return _cmd_turning_points(args)
        if args.command == "sweep":
            return _cmd_sweep(args, threads)
        if args.command == "localize":
            return _cmd_localize(args)
        if args.command == "validate":
            return _cmd_validate(args)
        raise DomainError(f"unknown command {args.command!r}")
    except (DomainError, EnsembleConfigurationError) as exc:
        print(json.dumps({"status": "error", "error": str(exc)}), file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as exc:
        print(json.dumps({"status": "numeric-failure", "error": str(exc)}),
              file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
