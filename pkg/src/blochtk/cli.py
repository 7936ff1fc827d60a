"""Command-line front end.

Subcommands: analyze, bands, bloch, nd, transform, verify, catalog.
Problem files are JSON with schema version "fb/1".  Exit codes: 0 all checks
pass, 1 check failure, 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import verify as verify_mod
from .catalog import CATALOG, get_problem, intro_fixture_report
from .coeffs import coefficient_from_json, zero_coefficient
from .errors import (AccuracyError, BlochtkError, FormExtractionError,
                     IntegrationError)
from .floquet import (boundedness, classify, shifted_operator_residual,
                      verify_sum_rule)
from .lattice import Lattice1D
from .multidim import combination_expand, hartree_example, residual_nd
from .propagate import Problem1D
from .spectrum import locate_bands, union_check
from .transform import (bloch_floquet, check_properties, from_callable,
                        invert, parseval_deviation)

SCHEMA_VERSION = "fb/1"

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


class InputError(Exception):
    pass


def load_problem_file(path: str) -> dict:
    if path in CATALOG and not os.path.exists(path):
        return {"version": SCHEMA_VERSION, "mode": "1d", "catalog": path}
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read problem file: {exc}") from exc
    if not isinstance(spec, dict) or spec.get("version") != SCHEMA_VERSION:
        raise InputError(f'problem file must declare "version": "{SCHEMA_VERSION}"')
    if spec.get("mode") not in ("1d", "nd", "transform"):
        raise InputError('problem file "mode" must be one of 1d, nd, transform')
    return spec


def problem_from_spec(spec: dict) -> Problem1D:
    if spec.get("mode") != "1d":
        raise InputError("this command needs a mode-1d problem file")
    if "catalog" in spec:
        name = spec["catalog"]
        if name not in CATALOG:
            raise InputError(f"unknown catalog problem {name!r}")
        return get_problem(name)
    try:
        gamma = float(spec["lattice"]["gamma"])
        lat = Lattice1D(gamma)
        v = coefficient_from_json(spec["v"])
        w = coefficient_from_json(spec["w"]) if "w" in spec else zero_coefficient(gamma)
        return Problem1D(lat, w, v)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid problem specification: {exc}") from exc


def _emit(payload, out_path: str | None, fmt: str, csv_rows=None,
          csv_header=None):
    if fmt == "csv":
        if csv_rows is None:
            raise InputError("csv output is not available for this command")
        buf = io.StringIO()
        wr = csv.writer(buf)
        if csv_header:
            wr.writerow(csv_header)
        wr.writerows(csv_rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _c2pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def cmd_analyze(args) -> int:
    spec = load_problem_file(args.file)
    p = problem_from_spec(spec)
    lam = args.lam
    res = classify(p, lam, grid_n=args.grid, rtol=args.rtol, atol=args.atol,
                   tau_eig=args.tau_eig, tau_scalar=args.tau_scalar)
    residuals = shifted_operator_residual(p, lam, res.form) if res.form else []
    gamma = p.lattice.gamma
    wbar = p.w.mean()
    det_dev = abs(res.monodromy.determinant - cmath.exp(gamma * wbar))
    sr = verify_sum_rule(p, lam, res)
    classes = res.qmap.classes
    sym_ok = True
    if p.v.real_flag:
        from .lattice import class_distance, reduce_quasimomentum
        neg = {reduce_quasimomentum(-c.representative, p.lattice) for c in classes}
        sym_ok = all(min(class_distance(c, n) for n in neg) <= 1e-8 for c in classes)
    payload = {
        "version": SCHEMA_VERSION,
        "lambda": lam,
        "sigma_tag": res.qmap.sigma_tag,
        "jordan": res.data.jordan,
        "classes": [_c2pair(c.representative) for c in classes],
        "multipliers": [_c2pair(m) for m in res.data.multipliers],
        "residuals": residuals,
        "checks": {
            "det_rule": bool(det_dev <= 10.0 * res.monodromy.error_estimate),
            "sum_rule": bool(sr["ok"]),
            "symmetry": bool(sym_ok),
            "boundedness": bool(boundedness(res.form)) if res.form else None,
        },
        "work": {"integration_steps": res.monodromy.steps},
    }
    if spec.get("catalog") == "intro_counterexample":
        payload["fixture_report"] = intro_fixture_report(args.rtol, args.atol)
    _emit(payload, args.out, args.format)
    return EXIT_OK if all(v for v in payload["checks"].values()
                          if v is not None) else EXIT_CHECK_FAILURE


def cmd_bands(args) -> int:
    spec = load_problem_file(args.file)
    p = problem_from_spec(spec)
    bands = locate_bands(p, args.lmin, args.lmax, args.coarse_n,
                         args.rtol, args.atol)
    rows = [[b.lo, b.hi, b.edge_kind_lo, b.edge_kind_hi,
             b.touching_lo or b.touching_hi] for b in bands.bands]
    payload = {"version": SCHEMA_VERSION, "bands": [{"lo": b.lo, "hi": b.hi, "edge_kind_lo": b.edge_kind_lo,
                          "edge_kind_hi": b.edge_kind_hi,
                          "touching": b.touching_lo or b.touching_hi}
                         for b in bands.bands]}
    code = EXIT_OK
    if args.oracle:
        rep = union_check(p, args.k_grid, args.mpw, args.lmax, bands,
                          rtol=args.rtol, atol=args.atol)
        payload["union_check"] = rep
        if rep["max_edge_discrepancy"] > 1e-5 or not rep["counts_agree"]:
            code = EXIT_CHECK_FAILURE
    _emit(payload, args.out, args.format, rows,
          ["lambda_lo", "lambda_hi", "edge_kind_lo", "edge_kind_hi", "touching"])
    return code


def cmd_bloch(args) -> int:
    spec = load_problem_file(args.file)
    p = problem_from_spec(spec)
    res = classify(p, args.lam, grid_n=args.grid, rtol=args.rtol,
                   atol=args.atol, tau_eig=args.tau_eig,
                   tau_scalar=args.tau_scalar)
    form = res.form
    xs = form.grid
    header = ["x"]
    cols = [xs]
    for i, (part, c) in enumerate(zip(form.parts,
                                      form.classes * (2 if len(form.classes) == 1 else 1))):
        k = c.representative
        psi = np.exp(1j * k * xs) * part
        if form.kind == "form2" and i == 0:
            psi = np.exp(1j * k * xs) * (form.parts[0] + xs * form.parts[1])
        header += [f"re_psi{i + 1}", f"im_psi{i + 1}", f"re_p{i + 1}", f"im_p{i + 1}"]
        cols += [psi.real, psi.imag, part.real, part.imag]
    rows = list(zip(*[np.asarray(c, dtype=float) for c in cols]))
    payload = {"version": SCHEMA_VERSION, "kind": form.kind,
               "classes": [_c2pair(c.representative) for c in form.classes],
               "columns": header, "rows": [[float(v) for v in r] for r in rows]}
    _emit(payload, args.out, args.format if args.format else "csv", rows, header)
    return EXIT_OK


def cmd_nd(args) -> int:
    spec = load_problem_file(args.file)
    if spec.get("mode") != "nd":
        raise InputError("this command needs a mode-nd problem file")
    def one_potential(s):
        if isinstance(s, dict) and "catalog" in s:
            name = s["catalog"]
            if name not in CATALOG:
                raise InputError(f"unknown catalog problem {name!r}")
            return get_problem(name).v
        return coefficient_from_json(s)

    try:
        pots = [one_potential(s) for s in spec["potentials"]]
        lams = [float(x) for x in spec["lambdas"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid nd specification: {exc}") from exc
    sol = hartree_example(pots, lams, grid_n=args.grid or 256,
                          rtol=args.rtol, atol=args.atol)
    res = residual_nd(sol.problem, sol, grid_per_dim=64)
    payload = {
        "version": SCHEMA_VERSION,
        "energy": sol.energy,
        "factor_energies": list(sol.energies),
        "energy_is_sum": sol.energy == math.fsum(sol.energies),
        "bounded": sol.bounded,
        "factor_kinds": [f.kind for f in sol.factors],
        "residual": res,
    }
    code = EXIT_OK if res <= 5e-5 else EXIT_CHECK_FAILURE
    if sol.bounded:
        terms = combination_expand(sol)
        payload["bloch_terms"] = [{"k_vector": list(map(float, t.k_vector)),
                                   "parts": list(t.part_indices)} for t in terms]
    _emit(payload, args.out, args.format)
    return code


def cmd_transform(args) -> int:
    spec = load_problem_file(args.file)
    if spec.get("mode") != "transform":
        raise InputError("this command needs a mode-transform problem file")
    try:
        gamma = float(spec["lattice"]["gamma"])
        g = spec["gaussian"]
        center, width = float(g["center"]), float(g["width"])
        cells = int(spec.get("cells", 3))
        per_cell = int(spec.get("per_cell", 64))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid transform specification: {exc}") from exc
    lat = Lattice1D(gamma)
    f = from_callable(lambda x: np.exp(-((x - center) / width) ** 2),
                      lat, cells, per_cell)
    ks = np.linspace(-math.pi / gamma, math.pi / gamma, int(spec.get("k_points", 17)))
    field = bloch_floquet(f, ks)
    props = check_properties(field)
    _, err = invert(field, args.grid or 64)
    pv = parseval_deviation(field, args.grid or 64)
    payload = {"version": SCHEMA_VERSION, "properties": props, "roundtrip_error": err, "parseval": pv}
    ok = max(props.values()) <= 1e-10 and err <= 1e-10 and pv <= 1e-8
    _emit(payload, args.out, args.format)
    return EXIT_OK if ok else EXIT_CHECK_FAILURE


def cmd_verify(args) -> int:
    checks = verify_mod.run_suites(args.suite)
    payload = verify_mod.run_report("verify", {"suite": args.suite}, None, checks)
    _emit(payload, args.out, args.format,
          [[c["suite"], c["name"], c["ok"], c.get("deviation", "")] for c in checks],
          ["suite", "check", "ok", "deviation"])
    return EXIT_OK if all(c["ok"] for c in checks) else EXIT_CHECK_FAILURE


def cmd_catalog(args) -> int:
    payload = {name: CATALOG[name].note for name in sorted(CATALOG)}
    _emit(payload, args.out, args.format,
          [[n, CATALOG[n].note] for n in sorted(CATALOG)], ["name", "note"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blochtk",
                                 description="periodic Sturm-Liouville toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_lambda=False):
        sp.add_argument("--rtol", type=float, default=1e-10)
        sp.add_argument("--atol", type=float, default=1e-12)
        sp.add_argument("--tau-eig", dest="tau_eig", type=float, default=1e-4)
        sp.add_argument("--tau-scalar", dest="tau_scalar", type=float, default=1e-8)
        sp.add_argument("--grid", type=int, default=None)
        sp.add_argument("--seed", type=int, default=20240901)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        if with_lambda:
            sp.add_argument("--lambda", dest="lam", type=float, required=True)

    s = sub.add_parser("analyze", help="classify one lambda")
    s.add_argument("file")
    common(s, with_lambda=True)
    s.set_defaults(func=cmd_analyze, grid=512)

    s = sub.add_parser("bands", help="band structure on a lambda range")
    s.add_argument("file")
    s.add_argument("--lmin", type=float, required=True)
    s.add_argument("--lmax", type=float, required=True)
    s.add_argument("--coarse-n", dest="coarse_n", type=int, default=400)
    s.add_argument("--oracle", action="store_true",
                   help="append the plane-wave union check")
    s.add_argument("--mpw", type=int, default=64)
    s.add_argument("--k-grid", dest="k_grid", type=int, default=201)
    common(s)
    s.set_defaults(func=cmd_bands)

    s = sub.add_parser("bloch", help="sample the canonical solutions")
    s.add_argument("file")
    common(s, with_lambda=True)
    s.set_defaults(func=cmd_bloch, grid=512)

    s = sub.add_parser("nd", help="separable multidimensional assembly")
    s.add_argument("file")
    common(s)
    s.set_defaults(func=cmd_nd)

    s = sub.add_parser("transform", help="lattice-sum transform checks")
    s.add_argument("file")
    common(s)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("verify", help="run theorem-check suites")
    s.add_argument("suite", nargs="?", default="all",
                   choices=("all", "floquet", "spectrum", "nd", "transform"))
    s.add_argument("--mpw", type=int, default=64)
    common(s)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("catalog", help="list built-in problems")
    common(s)
    s.set_defaults(func=cmd_catalog)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except KeyError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (IntegrationError, AccuracyError, FormExtractionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except BlochtkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
