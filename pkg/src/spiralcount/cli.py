"""Command line entry point.  Exit status: 0 on success, 2 when an envelope fit fails, 1 on error."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .approximates import enumerate_approximates
from .experiment import EnvelopeSpec, emit_report, fit_envelope, read_series_csv
from .geometry import PRegion, SphericalCap, cap_measure
from .harness import ConfigError, SweepConfig, run_sweep

S = argparse.SUPPRESS

DEFAULTS = {
    "seed": 0, "threads": 1, "out": None, "format": "csv",
    "x": None, "c": 1.0, "T": [10.0, 100.0, 1000.0, 10000.0], "coprime": False,
    "cap_axis": None, "cap_angle": math.pi / 2, "kind": "count", "d": 2, "m": 1, "n": 1,
    "replications": 10, "primitive": False, "envelope": None, "epsilon": 0.1, "absolute": False,
    "samples": 10000, "region": None, "moment": None, "mc_check": False, "N": None, "series_n": [10, 20, 50, 100], "quadrature_check": False, "which": None, "K": 3, "input": None,
}


def _add_globals(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--threads", type=int, default=S)
    p.add_argument("--out", default=S, help="output file (stdout when absent)")
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--config", default=S, help="JSON file; explicit flags win")


def _add_sweep(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=S)
    p.add_argument("--m", type=int, default=S)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--T", type=float, nargs="+", default=S, help="T grid")
    p.add_argument("--x", type=float, nargs="+", default=S, help="fix x (or M) instead of sampling it")
    p.add_argument("--replications", type=int, default=S)
    p.add_argument("--envelope", choices=("gaposhkin", "backbone"), default=S,
                   help="fit an envelope to the averaged series")
    p.add_argument("--epsilon", type=float, default=S)
    p.add_argument("--absolute", action="store_true", default=S, help="fit absolute residuals")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spiralcount", description=__doc__)
    _add_globals(ap)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="list Dirichlet approximates of x")
    _add_globals(p)
    p.add_argument("--x", type=float, nargs="+", default=S)
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--T", type=float, nargs="+", default=S)
    p.add_argument("--coprime", action="store_true", default=S)
    p.add_argument("--cap-axis", type=float, nargs="+", default=S)
    p.add_argument("--cap-angle", type=float, default=S)

    p = sub.add_parser("spiral", help="spiralling ratio sweep over random x")
    _add_globals(p)
    _add_sweep(p)
    p.add_argument("--cap-axis", type=float, nargs="+", default=S)
    p.add_argument("--cap-angle", type=float, default=S)

    p = sub.add_parser("count", help="lattice counting sweep")
    _add_globals(p)
    _add_sweep(p)
    p.add_argument("--kind", choices=("count", "approx", "linear", "affine"), default=S)
    p.add_argument("--primitive", action="store_true", default=S)

    p = sub.add_parser("haar-mc", help="Haar Monte Carlo moments over planar lattices, region P_{T,c}")
    _add_globals(p)
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--T", type=float, nargs="+", default=S)
    p.add_argument("--samples", type=int, default=S)
    p.add_argument("--region", default=S, help='JSON region, e.g. {"kind": "P", "d": 2, "T": 10, "c": 1}')
    p.add_argument("--moment", type=int, choices=(1, 2), default=S)
    p.add_argument("--primitive", action="store_true", default=S)

    p = sub.add_parser("moment2d", help="closed-form second moment with per-n breakdown")
    _add_globals(p)
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--T", type=float, nargs="+", default=S)
    p.add_argument("--quadrature-check", action="store_true", default=S)
    p.add_argument("--mc-check", action="store_true", default=S)
    p.add_argument("--samples", type=int, default=S)

    p = sub.add_parser("verify-series", help="large-n expansions against direct evaluation")
    _add_globals(p)
    p.add_argument("--n", dest="series_n", type=float, nargs="+", default=S)
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--K", type=int, default=S)
    p.add_argument("--which", nargs="+", default=S)

    p = sub.add_parser("phi-sum", help="partial sums of phi(n)/n, or the weighted sum by two routes")
    _add_globals(p)
    p.add_argument("--N", type=int, nargs="+", default=S, help="Walfisz table at these N")
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--T", type=float, nargs="+", default=S, help="weighted sum at these T")

    p = sub.add_parser("fit", help="fit an error envelope to a CSV series")
    _add_globals(p)
    p.add_argument("input")
    p.add_argument("--envelope", choices=("gaposhkin", "backbone"), default=S)
    p.add_argument("--epsilon", type=float, default=S)
    p.add_argument("--absolute", action="store_true", default=S)
    return ap


def _resolve(ns: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags."""
    opts = dict(DEFAULTS)
    given = vars(ns)
    explicit: set = set()
    if "config" in given:
        data = json.loads(Path(given["config"]).read_text())
        if "meta" in data and isinstance(data["meta"], dict) and "config" in data["meta"]:
            data = data["meta"]["config"]
        elif "config" in data and isinstance(data["config"], dict):
            data = data["config"]
        if "T_grid" in data:
            data = {**data, "T": data.pop("T_grid")}
        opts.update(data)
        explicit = set(data)
    opts.update(given)
    opts["_explicit"] = explicit | set(given)
    if isinstance(opts["T"], (int, float)):
        opts["T"] = [float(opts["T"])]
    return opts


def _single_T(o: dict) -> float:
    if len(o["T"]) != 1:
        raise ConfigError("T", "this command takes a single T")
    return float(o["T"][0])


def _write(text: str, o: dict) -> None:
    if o["out"]:
        Path(o["out"]).write_text(text)
    else:
        sys.stdout.write(text)


def _table(rows: list[dict], o: dict, extra: dict | None = None) -> str:
    if o["format"] == "json":
        doc = {"rows": rows, **(extra or {})}
        return json.dumps(doc, indent=2, sort_keys=True, default=float) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _cap(o: dict, dim: int) -> SphericalCap:
    axis = o["cap_axis"] if o["cap_axis"] is not None else list(np.eye(dim)[0])
    if dim == 1:
        return SphericalCap.hemisphere(axis)
    return SphericalCap(dim - 1, tuple(axis), float(o["cap_angle"]))


def cmd_approx(o: dict) -> int:
    if o["x"] is None:
        raise ConfigError("x", "approx needs --x")
    x = np.asarray(o["x"], dtype=float)
    cap = _cap(o, x.size)
    pairs = enumerate_approximates(x, o["c"], _single_T(o), coprime=o["coprime"])
    rows = []
    for pr in pairs:
        row = {"q": pr.q}
        row.update({f"p{i}": int(v) for i, v in enumerate(np.atleast_1d(pr.p))})
        row["err_norm"] = repr(float(pr.err_norm))
        d = pr.dir if pr.dir is not None else [math.nan] * x.size
        row.update({f"dir{i}": repr(float(v)) for i, v in enumerate(np.atleast_1d(d))})
        row["in_cap"] = "" if pr.dir is None else int(bool(cap.contains(np.atleast_1d(pr.dir))))
        rows.append(row)
    if not rows:
        _write("q,err_norm,in_cap\n" if o["format"] == "csv" else '{"rows": []}\n', o)
        return 0
    _write(_table(rows, o), o)
    return 0


def _sweep(o: dict, kind: str) -> int:
    cfg = SweepConfig(kind=kind, d=o["d"], m=o["m"], n=o["n"], c=o["c"],
                      T_grid=[float(t) for t in o["T"]], replications=o["replications"],
                      seed=o["seed"], primitive=bool(o["primitive"]), x=o["x"], threads=o["threads"])
    if kind == "spiral":
        cfg.cap = _cap(o, cfg.d - 1).to_dict()
    res = run_sweep(cfg)
    fit = None
    if o["envelope"]:
        fit = fit_envelope(res.average, EnvelopeSpec(o["envelope"], o["epsilon"], relative=not o["absolute"]))
    _write(emit_report(res.average, o["format"], None, fit), o)
    return 2 if fit is not None and not fit.passed else 0


def cmd_haar(o: dict) -> int:
    from .geometry import region_from_dict
    from .haar import mc_all_moments
    if o["region"] is not None:
        spec = json.loads(o["region"]) if isinstance(o["region"], str) else o["region"]
        region = region_from_dict(spec)
    else:
        region = PRegion(2, T=_single_T(o), c=o["c"])
    est = mc_all_moments(region, o["samples"], o["seed"], o["threads"])
    if o["moment"] is not None:
        key = ("mean" if o["moment"] == 1 else "second") + ("_primitive" if o["primitive"] else "")
        e = est[key]
        doc = {"estimate": e.estimate, "target": e.target, "se": e.std_error, "z": e.z,
               "n_samples": e.n_samples, "seed": o["seed"], "moment": o["moment"],
               "primitive": bool(o["primitive"]), "region": region.to_dict()}
        _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", o)
        return 0
    rows = [{"statistic": k, "estimate": v.estimate, "std_error": v.std_error,
             "target": v.target, "z": v.z, "n_samples": v.n_samples} for k, v in est.items()]
    _write(_table(rows, o, {"seed": o["seed"]}), o)
    return 0


def cmd_moment2d(o: dict) -> int:
    from .moment2d import ky_report
    rep = ky_report(o["c"], _single_T(o), quadrature_check=bool(o["quadrature_check"]))
    mc = None
    if o["mc_check"]:
        from .haar import mc_second_moment
        mc = mc_second_moment(PRegion(2, T=rep.T, c=rep.c), True, o["samples"], o["seed"], o["threads"])
    if o["format"] == "json":
        doc = rep.to_dict()
        if mc is not None:
            doc["mc_check"] = {"estimate": mc.estimate, "se": mc.std_error, "z": mc.z,
                               "n_samples": mc.n_samples, "seed": o["seed"]}
        _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", o)
        return 0
    rows = []
    for b in rep.breakdowns:
        row = {"n": b.n, "total": b.total, "eps_y4": b.eps_y4}
        row.update({f"A_{k}": v for k, v in b.parts.items()})
        rows.append(row)
    text = _table(rows, o) if rows else "n,total\n"
    text += (f"# ky_second_norm={rep.value!r} centered={rep.centered!r} "
             f"centered_over_logT={rep.centered / math.log(rep.T)!r}\n")
    if mc is not None:
        text += f"# mc_second_moment={mc.estimate!r} se={mc.std_error!r} z={mc.z!r}\n"
    _write(text, o)
    return 0


def cmd_series(o: dict) -> int:
    from .moment2d import LISTED, SeriesSpec, series_eval
    ns = o["series_n"] if isinstance(o["series_n"], list) else [o["series_n"]]
    which = o["which"] or list(LISTED)
    rows = []
    for w in which:
        for n in ns:
            r = series_eval(SeriesSpec(w, float(n), o["c"], o["K"]))
            rows.append({"which": w, "n": n, "c": o["c"], "K": o["K"],
                         "truncated": repr(r.truncated), "direct": repr(r.direct), "abs_diff": repr(r.abs_diff)})
    _write(_table(rows, o), o)
    return 0


def cmd_phi(o: dict) -> int:
    from .moment2d import phi_weighted_sum
    from .numtheory import phi_ratio_cumsum, walfisz_envelope, zeta
    rows = []
    if o["N"] is not None:
        Ns = [int(v) for v in (o["N"] if isinstance(o["N"], list) else [o["N"]])]
        if min(Ns) < 1:
            raise ConfigError("N", "entries must be >= 1")
        S = phi_ratio_cumsum(max(Ns))
        for N in Ns:
            target = N / zeta(2.0)
            env = float(walfisz_envelope(N)) if N >= 3 else math.nan
            rows.append({"N": N, "sum": repr(float(S[N])), "target": repr(target),
                         "residual": repr(float(S[N]) - target), "envelope": repr(env)})
        _write(_table(rows, o), o)
        return 0
    for T in o["T"]:
        r = phi_weighted_sum(o["c"], float(T))
        rows.append({"T": T, "direct": repr(r.direct), "abel": repr(r.abel), "leading": repr(float(r.leading)),
                     "ratio": repr(r.direct / float(r.leading))})
    _write(_table(rows, o), o)
    return 0


def cmd_fit(o: dict) -> int:
    series = read_series_csv(o["input"])
    fit = fit_envelope(series, EnvelopeSpec(o["envelope"] or "backbone", o["epsilon"], relative=not o["absolute"]))
    _write(emit_report(series, o["format"], None, fit), o)
    print(f"C={fit.C!r} passed={fit.passed} per_decade={fit.per_decade}", file=sys.stderr)
    return 0 if fit.passed else 2


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        o = _resolve(ns)
        cmd = ns.command
        if cmd == "approx":
            return cmd_approx(o)
        if cmd == "spiral":
            if "d" not in o["_explicit"]:
                o["d"] = 3 if o["x"] is None else len(o["x"]) + 1
            return _sweep(o, "spiral")
        if cmd == "count":
            return _sweep(o, o["kind"])
        if cmd == "haar-mc":
            return cmd_haar(o)
        if cmd == "moment2d":
            return cmd_moment2d(o)
        if cmd == "verify-series":
            return cmd_series(o)
        if cmd == "phi-sum":
            return cmd_phi(o)
        if cmd == "fit":
            return cmd_fit(o)
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
