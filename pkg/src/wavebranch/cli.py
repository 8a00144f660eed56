"""wavebranch command-line front end.

Exit status: 0 success, 1 invalid input or configuration, 2 numerical failure.
Reports go to ``--out DIR`` as ``<command>.csv`` / ``<command>.json``, or to
stdout when no directory is given.
"""
import argparse
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config as cfg
from . import continuation as co
from . import dispersion as dp
from . import expansion as ex
from . import frechet as fr
from . import spectra as spc
from . import stream as st
from . import verify as vf
from .errors import ConfigError, NonConvergenceError, WaveBranchError
from .report import csv_text, dumps
from .vorticity import VorticityModel, builtin_models

N_SWEEP = 64


class Output:
    def __init__(self, directory, command):
        self.dir = directory
        self.command = command
        self.files = []

    def emit(self, text, ext, suffix=""):
        if not text.endswith("\n"):
            text += "\n"
        if self.dir is None:
            sys.stdout.write(text)
            return
        os.makedirs(self.dir, exist_ok=True)
        path = os.path.join(self.dir, f"{self.command}{suffix}.{ext}")
        with open(path, "w", newline="") as fh:
            fh.write(text)
        self.files.append(path)


def _model(conf):
    return VorticityModel(tuple(conf.omega))


def _row(sol):
    return [sol.s, sol.d, sol.R, sol.F, sol.kappa, sol.rho0]


def _map(fn, items):
    n = cfg.threads()
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _subcritical(model, conf):
    """Subcritical stream at Bernoulli constant R, or at s when given."""
    if conf.s is not None:
        return st.solve_stream(model, conf.s, conf.n_samples, tol=conf.tol_quad)
    if conf.R is None:
        raise ConfigError("give R (or s) for this command")
    s_plus, _ = st.invert_bernoulli(model, conf.R, xtol=conf.tol_root)
    if s_plus is None:
        raise ConfigError(f"R = {conf.R!r} has no subcritical stream")
    return st.solve_stream(model, s_plus, conf.n_samples, tol=conf.tol_quad)


def cmd_stream(conf, out):
    model = _model(conf)
    solve = lambda s: st.solve_stream(model, s, conf.n_samples, tol=conf.tol_quad)
    if conf.s is not None:
        ss = [conf.s]
    elif conf.F is not None:
        ss = [st.s_for_froude(model, conf.F, xtol=conf.tol_root)]
    elif conf.R is not None:
        ss = [s for s in st.invert_bernoulli(model, conf.R, xtol=conf.tol_root) if s is not None]
        ss = sorted(set(ss))
    else:
        s_c = st.critical_s(model, conf.tol_root)
        ss = list(model.s0 + (s_c - model.s0) * np.linspace(0.2, 3.0, N_SWEEP))
    rows = [_row(sol) for sol in _map(solve, ss)]
    out.emit(csv_text(["s", "d", "R", "F", "kappa", "rho0"], rows), "csv")


def cmd_dispersion(conf, out):
    sol = _subcritical(_model(conf), conf)
    prof = dp.dispersion_profile(sol, conf.tau_max, conf.n_tau)
    out.emit(csv_text(["tau", "sigma"], zip(prof.tau_grid, prof.sigma_values)), "csv")
    summary = {"tau_star": prof.tau_star, "Lambda0": prof.Lambda0, "sigma0": float(prof.sigma_values[0])}
    out.emit(dumps(summary), "json", "_summary")


def cmd_spectrum1d(conf, out):
    model = _model(conf)
    if conf.s is not None:
        sol = st.solve_stream(model, conf.s, conf.n_samples, tol=conf.tol_quad)
    elif conf.F is not None:
        sol = st.solve_stream(model, st.s_for_froude(model, conf.F, xtol=conf.tol_root), conf.n_samples)
    elif conf.R is not None:
        _, s_minus = st.invert_bernoulli(model, conf.R, xtol=conf.tol_root)
        sol = st.solve_stream(model, s_minus, conf.n_samples, tol=conf.tol_quad)
    else:
        raise ConfigError("give s, R or F for spectrum1d")
    rep = spc.interval_spectrum(sol, conf.k, conf.n_interval)
    d = {"s": sol.s, "F": sol.F, "R": sol.R, "d": sol.d, "rho0": sol.rho0}
    d.update(rep.to_dict())
    d["coercive"] = bool(spc.coercivity_check(sol))
    out.emit(dumps(d), "json")


def cmd_spectrum2d(conf, out):
    if not conf.wave:
        raise ConfigError("spectrum2d needs --wave FILE")
    if not os.path.exists(conf.wave):
        raise ConfigError(f"wave file not found: {conf.wave}")
    with open(conf.wave) as fh:
        wave = fr.wave_from_json(fh.read())
    fr.validate_wave(wave)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = fr.physical_spectrum(wave, conf.k, n_x=conf.n_x, n_y=conf.n_y)
    d = rep.to_dict()
    d["warnings"] = sorted({f"{type(w.message).__name__}: {w.message}" for w in caught})
    out.emit(dumps(d), "json")


def cmd_branch(conf, out):
    if conf.R is None:
        raise ConfigError("branch needs --R")
    sol = _subcritical(_model(conf), conf)
    state = co.start_branch(sol, conf.n_q, conf.n_p, conf.R)
    co.branch_extend(state, conf.damp * sol.d, conf.steps)
    if len(state.points) == 1:
        raise NonConvergenceError("; ".join(state.flags) or "no branch point converged")
    out.emit(co.branch_to_json(state), "json")


def cmd_expansion(conf, out):
    if conf.R is None and conf.s is None:
        raise ConfigError("expansion needs --R")
    res = ex.expand(_subcritical(_model(conf), conf))
    out.emit(dumps(res.to_dict()), "json")


def cmd_reconstruct(conf, out):
    if not conf.branch_file:
        raise ConfigError("reconstruct needs --branch-file FILE")
    if not os.path.exists(conf.branch_file):
        raise ConfigError(f"branch file not found: {conf.branch_file}")
    with open(conf.branch_file) as fh:
        state = co.branch_from_json(fh.read())
    try:
        pt = state.points[conf.index]
    except IndexError as exc:
        raise ConfigError(f"index {conf.index} outside the branch of {len(state.points)} points") from exc
    wave = co.reconstruct_physical(pt.field, n_x=conf.n_x, n_y=min(conf.n_y, 64))
    out.emit(fr.wave_to_json(wave), "json")


def cmd_verify(conf, out):
    if conf.models:
        known = builtin_models()
        unknown = [m for m in conf.models if m not in known]
        if unknown:
            raise ConfigError(f"unknown models {unknown}; choose from {sorted(known)}")
        models = {m: known[m] for m in conf.models}
    else:
        models = builtin_models()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = vf.run(models, cfg.threads())
    table = [
        [r["model"], r["invariant"], r["status"], r["value"], r["detail"].replace(",", ";")]
        for r in rows if r["invariant"] != "runtime_seconds"
    ]
    out.emit(csv_text(["model", "invariant", "status", "value", "detail"], table), "csv")
    failed = [r for r in rows if r["status"] == "fail"]
    for r in failed:
        print(f"FAIL {r['model']} {r['invariant']} {r['detail']}", file=sys.stderr)
    return 2 if failed else 0


COMMANDS = {
    "stream": cmd_stream,
    "dispersion": cmd_dispersion,
    "spectrum1d": cmd_spectrum1d,
    "spectrum2d": cmd_spectrum2d,
    "branch": cmd_branch,
    "expansion": cmd_expansion,
    "verify": cmd_verify,
    "reconstruct": cmd_reconstruct,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--omega", help="vorticity coefficients, e.g. '[1, -2]'")
    common.add_argument("--out", help="directory for report files (default: stdout)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key")
    ap = argparse.ArgumentParser(prog="wavebranch", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("stream", parents=[common], help="uniform streams as CSV")
    for k in ("s", "R", "F"):
        p.add_argument(f"--{k}", type=float)
    p = sub.add_parser("dispersion", parents=[common], help="sigma(tau) as CSV plus a JSON summary")
    p.add_argument("--s", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--tau-max", dest="tau_max", type=float)
    p = sub.add_parser("spectrum1d", parents=[common], help="interval eigenvalues as JSON")
    for k in ("s", "R", "F"):
        p.add_argument(f"--{k}", type=float)
    p.add_argument("--k", type=int)
    p = sub.add_parser("spectrum2d", parents=[common], help="physical-domain eigenvalues of a wave file")
    p.add_argument("--wave")
    p.add_argument("--k", type=int)
    p = sub.add_parser("branch", parents=[common], help="Stokes branch continuation as JSON")
    p.add_argument("--R", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--damp", type=float, help="amplitude step as a fraction of the depth")
    p = sub.add_parser("expansion", parents=[common], help="small-amplitude coefficients as JSON")
    p.add_argument("--R", type=float)
    p = sub.add_parser("verify", parents=[common], help="invariant suite over built-in vorticities")
    p.add_argument("--models", help="subset, e.g. '[zero, ramp]'")
    p = sub.add_parser("reconstruct", parents=[common], help="physical wave JSON from a branch file")
    p.add_argument("--branch-file", dest="branch_file")
    p.add_argument("--index", type=int)
    return ap


def _overrides(ns):
    over = {}
    for item in ns.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        over[k.strip()] = v
    for k, v in vars(ns).items():
        if k in ("config", "set", "command") or v is None:
            continue
        over[k] = v
    over["command"] = ns.command
    return over


def main(argv=None):
    ap = build_parser()
    ns = ap.parse_args(argv)
    out = Output(ns.out, ns.command)
    try:
        conf = cfg.load(ns.config, _overrides(ns))
        out.dir = conf.out
        status = COMMANDS[conf.command](conf, out)
        return status or 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except WaveBranchError as exc:
        name = type(exc).__name__
        print(f"error: {name}: {exc}", file=sys.stderr)
        if out.dir is not None:
            out.emit(dumps({"command": ns.command, "error": name, "message": str(exc)}), "json", "_error")
        return 2


if __name__ == "__main__":
    sys.exit(main())
