"""Batch command line: convolutions, transform evaluation, verification.

Subcommands: convolve-add | convolve-mult | eval | verify.  Structured
inputs (measures, covariance maps, matrices) come from a JSON config
file; flags cover scalars only.  Unknown config fields are rejected.
Artifacts are written atomically (temp file + rename) and contain no
timestamps, so identical config + seed reproduce them byte for byte;
wall-clock metadata goes to a separate meta.json sidecar.

Exit codes: 0 pass, 1 residual/verdict failure, 2 config error,
3 numerical non-convergence.
"""

import argparse
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import measures as _measures
from .additive import convolve_cauchy, subordination_pair
from .errors import FreesubError, NoConvergence
from .matrixmodels import (_haar, _rng, experiment_lemma34, experiment_prop32,
                           experiment_prop33, experiment_thm31_block,
                           experiment_thm36)
from .multiplicative import free_mult_convolve_unitary
from .opvalued import CovarianceMap
from .transforms import (cauchy_transform, circle_cauchy, eta_transform,
                         h_transform, psi_transform, reciprocal_cauchy,
                         stieltjes_invert)

OUT_DIR_ENV = "FREESUB_OUT_DIR"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NOCONV = 3


class ConfigError(Exception):
    pass


def _fmt(x):
    return format(float(x), ".17g")


def _write_atomic(path, text):
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(path, obj):
    _write_atomic(path, json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _check_keys(cfg, allowed, command):
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown config fields for {command}: {unknown}")
    if cfg.get("command") not in (None, command):
        raise ConfigError(f"config command {cfg['command']!r} != {command!r}")


def _parse_measure(spec, kind=None):
    """Measure from a family spec, an inline dict, or a file path."""
    if isinstance(spec, str):
        try:
            with open(spec) as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read measure file: {exc}") from None
    if not isinstance(spec, dict):
        raise ConfigError("measure spec must be an object or a file path")
    if "family" not in spec and "type" not in spec:
        raise ConfigError("measure spec needs a 'family' (standard family)"
                          " or a 'type' (serialized measure)")
    try:
        if "family" in spec:
            extra = set(spec) - {"family", "params", "n"}
            if extra:
                raise ConfigError(f"unknown measure fields: {sorted(extra)}")
            kwargs = {"n": int(spec["n"])} if "n" in spec else {}
            params = spec.get("params", [])
            if spec["family"] in ("atomic", "circle_atoms"):
                params = [[tuple(p) for p in params]]
            if spec["family"] in ("bernoulli_pm1", "haar_circle"):
                if spec["family"] == "bernoulli_pm1":
                    kwargs = {}
            m = _measures.make_standard(spec["family"], *params, **kwargs)
        else:
            m = _measures.from_json(json.dumps(spec))
    except FreesubError as exc:
        raise ConfigError(str(exc)) from None
    if kind is not None and not isinstance(m, kind):
        raise ConfigError(f"expected a {kind.__name__}")
    return m


def _parse_grid(text):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ConfigError(f"bad --grid {text!r}; expected lo:hi:n") from None
    if n < 2 or not hi > lo:
        raise ConfigError("grid needs hi > lo and n >= 2")
    return np.linspace(lo, hi, n)


def _parse_im(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad --im {text!r}; expected a,b,c") from None
    if not vals:
        raise ConfigError("--im needs at least one value")
    return vals


def _complex_entry(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    raise ConfigError("matrix entries must be numbers or [re, im] pairs")


def _parse_matrix(rows):
    try:
        return np.array([[_complex_entry(v) for v in row] for row in rows])
    except (TypeError, ConfigError):
        raise ConfigError("bad matrix literal") from None


def _out_dir(args):
    d = args.out or os.environ.get(OUT_DIR_ENV) or "."
    os.makedirs(d, exist_ok=True)
    return d


def _write_meta(out, command):
    _dump_json(os.path.join(out, "meta.json"),
               {"command": command, "written_unix": time.time()})


# ---------------------------------------------------------------------------
# convolve-add
# ---------------------------------------------------------------------------

def cmd_convolve_add(args):
    cfg = _load_config(args.config)
    _check_keys(cfg, {"command", "mu", "nu", "eta_sequence", "seed", "tol",
                      "grid", "im", "max_iter"}, "convolve-add")
    if "mu" not in cfg or "nu" not in cfg:
        raise ConfigError("convolve-add needs measures 'mu' and 'nu'")
    mu = _parse_measure(cfg["mu"], _measures.LineMeasure)
    nu = _parse_measure(cfg["nu"], _measures.LineMeasure)
    tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-12))
    max_iter = int(cfg.get("max_iter", 500))
    if max_iter < 1:
        raise ConfigError("max_iter must be positive")
    etas = tuple(cfg.get("eta_sequence", (1e-1, 3e-2, 1e-2)))
    im_parts = _parse_im(args.im) if args.im else [0.5, 1.0, 2.0]
    if args.grid:
        grid = _parse_grid(args.grid)
        table_re = grid
    else:
        lo = mu.support()[0] + nu.support()[0] - 0.5
        hi = mu.support()[1] + nu.support()[1] + 0.5
        grid = np.linspace(lo, hi, 801)
        table_re = np.linspace(lo, hi, 33)
    out = _out_dir(args)

    rows = []
    worst = 0.0
    for im in im_parts:
        if im <= 0:
            raise ConfigError("--im values must be positive")
        for re in table_re:
            ev = subordination_pair(mu, nu, complex(re, im), tol=max(tol, 1e-14),
                                    max_iter=max_iter)
            worst = max(worst, ev.residual)
            rows.append({
                "z": [ev.z.real, ev.z.imag],
                "omega1": [ev.omega1.real, ev.omega1.imag],
                "omega2": [ev.omega2.real, ev.omega2.imag],
                "g": [ev.g_conv.real, ev.g_conv.imag],
                "residual": ev.residual,
                "iterations": ev.iterations,
            })
    dens, renorm = stieltjes_invert(
        lambda zs: convolve_cauchy(mu, nu, zs, tol=max(tol, 1e-14),
                                   max_iter=max_iter),
        grid, eta_sequence=etas)

    _dump_json(os.path.join(out, "measure.json"), dens.to_dict())
    if args.format == "csv":
        header = ("z_re,z_im,omega1_re,omega1_im,omega2_re,omega2_im,"
                  "g_re,g_im,residual,iterations")
        lines = [header]
        for r in rows:
            lines.append(",".join(
                [_fmt(r["z"][0]), _fmt(r["z"][1]), _fmt(r["omega1"][0]),
                 _fmt(r["omega1"][1]), _fmt(r["omega2"][0]), _fmt(r["omega2"][1]),
                 _fmt(r["g"][0]), _fmt(r["g"][1]), _fmt(r["residual"]),
                 str(r["iterations"])]))
        _write_atomic(os.path.join(out, "subordination.csv"),
                      "\n".join(lines) + "\n")
    else:
        _dump_json(os.path.join(out, "subordination.json"), rows)
    summary = {
        "command": "convolve-add",
        "support_estimate": list(dens.support()),
        "renorm": renorm,
        "max_residual": worst,
        "tol": tol,
        "eta_sequence": list(etas),
        "points": len(rows),
        "pass": worst <= tol,
    }
    _dump_json(os.path.join(out, "summary.json"), summary)
    _write_meta(out, "convolve-add")
    return EXIT_PASS if summary["pass"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# convolve-mult
# ---------------------------------------------------------------------------

def cmd_convolve_mult(args):
    cfg = _load_config(args.config)
    _check_keys(cfg, {"command", "mu", "nu", "order", "seed", "tol"},
                "convolve-mult")
    if "mu" not in cfg or "nu" not in cfg:
        raise ConfigError("convolve-mult needs measures 'mu' and 'nu'")
    mu = _parse_measure(cfg["mu"], _measures.CircleMeasure)
    nu = _parse_measure(cfg["nu"], _measures.CircleMeasure)
    order = int(cfg.get("order", 8))
    tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-8))
    out = _out_dir(args)
    result = free_mult_convolve_unitary(mu, nu, order=order)
    worst = max(max(result.certificates), result.fixed_point_residual)
    _dump_json(os.path.join(out, "moments.json"), {
        "moments": [[m.real, m.imag] for m in result.moments],
        "certificates": list(result.certificates),
        "fixed_point_residual": result.fixed_point_residual,
    })
    _dump_json(os.path.join(out, "measure.json"), result.measure().to_dict())
    summary = {
        "command": "convolve-mult",
        "order": order,
        "max_residual": worst,
        "tol": tol,
        "pass": worst <= tol,
    }
    _dump_json(os.path.join(out, "summary.json"), summary)
    _write_meta(out, "convolve-mult")
    return EXIT_PASS if summary["pass"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

_LINE_TRANSFORMS = {
    "cauchy": cauchy_transform,
    "f": reciprocal_cauchy,
    "h": h_transform,
}
_CIRCLE_TRANSFORMS = {
    "circle-cauchy": circle_cauchy,
    "psi": psi_transform,
    "eta": eta_transform,
}


def cmd_eval(args):
    cfg = _load_config(args.config)
    _check_keys(cfg, {"command", "measure", "points", "seed", "tol"}, "eval")
    if "measure" not in cfg:
        raise ConfigError("eval needs a 'measure'")
    name = args.transform
    on_line = name in _LINE_TRANSFORMS
    if not on_line and name not in _CIRCLE_TRANSFORMS:
        raise ConfigError(f"unknown transform {name!r}")
    kind = _measures.LineMeasure if on_line else _measures.CircleMeasure
    measure = _parse_measure(cfg["measure"], kind)
    if "points" in cfg:
        pts = [complex(p[0], p[1]) for p in cfg["points"]]
    else:
        grid = _parse_grid(args.grid) if args.grid else np.linspace(-2, 2, 9)
        ims = _parse_im(args.im) if args.im else [1.0]
        pts = [complex(re, im) for im in ims for re in grid]
    if on_line and any(p.imag <= 0 for p in pts):
        raise ConfigError("line transforms need Im z > 0")
    if not on_line and any(abs(abs(p) - 1.0) < 1e-12 for p in pts):
        raise ConfigError("circle transforms are undefined on |z| = 1")
    fn = _LINE_TRANSFORMS.get(name) or _CIRCLE_TRANSFORMS[name]
    rows = []
    for p in pts:
        v = complex(fn(measure, p))
        margin = p.imag if on_line else 1.0 - abs(p)
        rows.append({"point": [p.real, p.imag], "value": [v.real, v.imag],
                     "margin": margin})
    out = _out_dir(args)
    if args.format == "csv":
        lines = ["point_re,point_im,value_re,value_im,margin"]
        for r in rows:
            lines.append(",".join(map(_fmt, r["point"] + r["value"] + [r["margin"]])))
        _write_atomic(os.path.join(out, "eval.csv"), "\n".join(lines) + "\n")
    else:
        _dump_json(os.path.join(out, "eval.json"),
                   {"transform": name, "rows": rows})
    _write_meta(out, "eval")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _balanced_pm1(N):
    v = np.ones(N)
    v[N // 2:] = -1.0
    return v


def _run_verify(identity, cfg, args):
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    n_size = args.N if args.N is not None else int(cfg.get("N", 600))
    trials = args.trials if args.trials is not None else int(cfg.get("trials", 200))
    if identity == "prop32":
        lam = np.asarray(cfg["lam"], float) if "lam" in cfg else _balanced_pm1(n_size)
        a0 = _parse_matrix(cfg["a0"]) if "a0" in cfg else np.diag(_balanced_pm1(lam.size))
        return experiment_prop32(lam, a0, eps=float(cfg.get("eps", 1.0)),
                                 trials=trials, seed=seed)
    if identity == "prop33":
        A0 = _parse_matrix(cfg["A0"]) if "A0" in cfg else np.diag(_balanced_pm1(n_size))
        C0 = _parse_matrix(cfg["C0"]) if "C0" in cfg else np.diag(_balanced_pm1(n_size))
        return experiment_prop33(A0, C0, eps=float(cfg.get("eps", 1.0)),
                                 trials=trials, seed=seed)
    if identity == "thm36":
        law = _parse_measure(cfg["theta_law"], _measures.CircleMeasure) \
            if "theta_law" in cfg else _measures.haar_circle()
        if "c0" in cfg:
            c0 = _parse_matrix(cfg["c0"])
        else:
            c0 = 0.7 * _haar(_rng(seed, 999), n_size)
        trials = args.trials if args.trials is not None else int(cfg.get("trials", 100))
        return experiment_thm36(law, c0, N=n_size, trials=trials, seed=seed)
    if identity == "thm31_block":
        ex = CovarianceMap.from_dict(cfg["eta_x"]) if "eta_x" in cfg else \
            CovarianceMap((np.array([[0.9, 0.3], [0.0, 0.6]]),))
        ey = CovarianceMap.from_dict(cfg["eta_y"]) if "eta_y" in cfg else \
            CovarianceMap((np.array([[0.5, -0.2], [0.1, 0.7]]),))
        b = _parse_matrix(cfg["b"]) if "b" in cfg else 1j * np.eye(ex.n)
        n_size = args.N if args.N is not None else int(cfg.get("N", 512))
        trials = args.trials if args.trials is not None else int(cfg.get("trials", 100))
        return experiment_thm31_block(ex, ey, b, N=n_size, trials=trials,
                                      seed=seed)
    samples = args.samples if args.samples is not None else int(cfg.get("samples", 10000))
    dims = tuple(cfg.get("dims", (2, 3, 4, 5, 6)))
    return experiment_lemma34(dims=dims, samples=samples, seed=seed)


_VERIFY_KEYS = {
    "prop32": {"command", "seed", "N", "trials", "eps", "lam", "a0"},
    "prop33": {"command", "seed", "N", "trials", "eps", "A0", "C0"},
    "thm36": {"command", "seed", "N", "trials", "theta_law", "c0"},
    "thm31_block": {"command", "seed", "N", "trials", "eta_x", "eta_y", "b"},
    "lemma34": {"command", "seed", "samples", "dims"},
}


def cmd_verify(args):
    identity = args.identity.replace("-", "_")
    if identity not in _VERIFY_KEYS:
        raise ConfigError(f"unknown identity {args.identity!r}")
    cfg = _load_config(args.config)
    _check_keys(cfg, _VERIFY_KEYS[identity], "verify")
    try:
        report = _run_verify(identity, cfg, args)
    except KeyError as exc:
        raise ConfigError(f"missing config field {exc}") from None
    out = _out_dir(args)
    _dump_json(os.path.join(out, "report.json"), report.to_dict())
    _write_atomic(os.path.join(out, "report.csv"),
                  report.csv_header() + "\n" + report.csv_row() + "\n")
    _write_meta(out, "verify")
    print(f"{identity}: {report.verdict}")
    for k in sorted(report.residuals):
        print(f"  residual {k} = {report.residuals[k]:.6g}"
              f" (tol {report.tolerances[k]:g})")
    return EXIT_PASS if report.verdict == "pass" else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="JSON config path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or .)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--grid", help="lo:hi:n")
    p.add_argument("--im", help="comma separated positive imaginary parts")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="freesub",
        description="free convolution, subordination and verification runs")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("convolve-add", help="free additive convolution")
    _add_common(p)
    p.set_defaults(fn=cmd_convolve_add)
    p = sub.add_parser("convolve-mult",
                       help="free multiplicative convolution on the circle")
    _add_common(p)
    p.set_defaults(fn=cmd_convolve_mult)
    p = sub.add_parser("eval", help="pointwise transform evaluation")
    p.add_argument("transform",
                   choices=sorted(_LINE_TRANSFORMS) + sorted(_CIRCLE_TRANSFORMS))
    _add_common(p)
    p.set_defaults(fn=cmd_eval)
    p = sub.add_parser("verify", help="run a verification experiment")
    p.add_argument("identity",
                   choices=("prop32", "prop33", "thm36", "thm31-block",
                            "thm31_block", "lemma34"))
    _add_common(p)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergence as exc:
        point = f" at {exc.point}" if getattr(exc, "point", None) is not None else ""
        print(f"non-convergence{point}: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except FreesubError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
