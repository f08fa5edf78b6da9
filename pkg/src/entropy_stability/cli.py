"""Command-line front end: ``defects``, ``fit``, ``verify`` and ``proofchain``.

Exit codes: 0 success / withinBound, 1 exceedsBound, 2 config error,
3 numeric or domain error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, report
from .config import ConfigError, RunConfig, load, from_mapping
from .defects import COCYCLE, sup_defect
from .domain import (
    DomainError,
    NumericError,
    SampleSet,
    TernaryFunction,
    make_sample_set,
    projection_x,
    read_table,
)
from .fitting import fit_regime
from .harness import (
    EXCEEDS,
    SEMANTICS_NOTE,
    check_regime,
    measure_defects,
    perturb,
    regime_coboundary,
    run_property_suite,
    verify_theorem,
)
from .proofchain import (
    HomogenizationSchedule,
    average_correct_cocycle,
    homogenize,
    reconstruct_potential,
    restrict_to_F,
    skew_bound_check,
)

EXIT_OK, EXIT_EXCEEDS, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("defects", "fit", "verify", "proofchain")


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# inputs


def _function_and_samples(cfg: RunConfig) -> tuple[TernaryFunction, SampleSet]:
    src = cfg["input.source"]
    if src == "table":
        H = read_table(cfg.table_path())
        S = make_sample_set(cfg.sample_spec(), cfg.seed)
        pts = H.interior_points()
        if len(pts) == 0:
            raise DomainError("table has no interior rows to sample")
        S = SampleSet(pts, S.scale_factors, cfg.seed, S.spec)
        return H, S
    S = make_sample_set(cfg.sample_spec(), cfg.seed)
    if src == "projection_x":
        return projection_x(), S
    return perturb(cfg.family(), cfg.perturbation()), S


def _validate(command: str, cfg: RunConfig) -> None:
    """Config-level checks; DomainError here maps to exit 2."""
    cfg.sample_spec()
    cfg.perturbation()
    if cfg["input.source"] == "family" or command == "verify":
        fam = cfg.family()
    if command == "verify":
        if cfg["input.source"] != "family":
            raise ConfigError("verify perturbs an exact family: input.source must be family")
        check_regime(fam, cfg["alpha"])
    if command == "proofchain" and "homogenize" in cfg["proofchain.steps"]:
        ts = cfg["proofchain.t_values"]
        if ts:
            HomogenizationSchedule(cfg["alpha"], tuple(ts))
        else:
            HomogenizationSchedule.geometric(cfg["alpha"])
    if cfg["fit.metric"] not in ("supNorm", "leastSquares"):
        raise ConfigError("fit.metric must be supNorm or leastSquares")


# --------------------------------------------------------------------------
# commands


def _residual_rows(reports) -> list:
    rows = []
    for rep in reports:
        for (x, y, z), r in rep.residuals or ():
            rows.append((x, y, z, rep.kind, r))
    return rows


def _fit_rows(H, S, fit) -> list:
    x, y, z = S.triples.T
    fam = fit.family
    r = np.abs(H(x, y, z) - fam(x, y, z))
    return [(a, b, c, "fit", v) for a, b, c, v in zip(x.tolist(), y.tolist(), z.tolist(), r.tolist())]


def cmd_defects(cfg: RunConfig, want_rows: bool):
    H, S = _function_and_samples(cfg)
    reps = measure_defects(H, cfg["alpha"], S, keep_residuals=want_rows)
    results = {
        "eps_hat": {"eps1": reps["symmetry"].sup, "eps2": reps["entropy"].sup,
                    "eps3": reps["homogeneity"].sup},
        "defects": {k: v.to_dict() for k, v in reps.items()},
        "sample_size": len(S),
    }
    return EXIT_OK, results, _residual_rows(reps.values())


def cmd_fit(cfg: RunConfig, want_rows: bool):
    H, S = _function_and_samples(cfg)
    fit = fit_regime(H, cfg["alpha"], S, cfg["fit.metric"])
    results = {"fit": fit.to_dict(), "alpha": cfg["alpha"], "sample_size": len(S)}
    return EXIT_OK, results, _fit_rows(H, S, fit) if want_rows else []


def cmd_verify(cfg: RunConfig, want_rows: bool):
    rep = verify_theorem(
        cfg.family(), cfg["alpha"], cfg.perturbation(), cfg.sample_spec(), cfg.seed,
        metric=cfg["fit.metric"], atol=cfg["tolerance.atol"], rtol=cfg["tolerance.rtol"],
        keep_residuals=want_rows,
    )
    rows = []
    if want_rows:
        H = perturb(cfg.family(), cfg.perturbation())
        S = make_sample_set(cfg.sample_spec(), cfg.seed)
        rows = _residual_rows(rep.defects.values()) + _fit_rows(H, S, rep.fit)
    code = EXIT_EXCEEDS if rep.verdict == EXCEEDS else EXIT_OK
    return code, rep.to_dict(), rows


def cmd_proofchain(cfg: RunConfig, want_rows: bool):
    H, S = _function_and_samples(cfg)
    F = restrict_to_F(H)
    alpha = cfg["alpha"]
    x, y = cfg["proofchain.x"], cfg["proofchain.y"]
    results = {}
    code = EXIT_OK
    steps = cfg["proofchain.steps"]
    if "homogenize" in steps:
        ts = cfg["proofchain.t_values"]
        sched = (HomogenizationSchedule(alpha, tuple(ts)) if ts
                 else HomogenizationSchedule.geometric(alpha))
        hr = homogenize(F, sched, x, y)
        results["homogenize"] = {
            "x": x, "y": y, "alpha": alpha, "direction": sched.direction,
            "t_values": list(hr.t_values), "trace": list(hr.trace), "value": hr.value,
            "F_xy": float(F(x, y)),
        }
    if "skew" in steps:
        G = regime_coboundary(fit_regime(H, alpha, S))
        results["skew"] = skew_bound_check(H, S, G).to_dict()
    if "potential" in steps:
        results["potential"] = reconstruct_potential(F, cfg["proofchain.h"], cfg["proofchain.n"]).to_dict()
    if "average" in steps:
        psi = average_correct_cocycle(F, cfg["proofchain.window"], cfg["proofchain.count"], x, y)
        results["average"] = {
            "x": x, "y": y, "window": cfg["proofchain.window"], "count": cfg["proofchain.count"],
            "psi_hat": psi, "F_xy": float(F(x, y)),
        }
    if "property_suite" in steps:
        lines = run_property_suite(H, S, alpha)
        results["property_suite"] = [ln.to_dict() for ln in lines]
        if not all(ln.passed for ln in lines):
            raise NumericError("property suite falsified: " + "; ".join(
                ln.render() for ln in lines if not ln.passed))
    rows = []
    if want_rows:
        rows = _residual_rows([sup_defect(COCYCLE, F, S, keep_residuals=True)])
    return code, results, rows


_DISPATCH = {"defects": cmd_defects, "fit": cmd_fit, "verify": cmd_verify, "proofchain": cmd_proofchain}


# --------------------------------------------------------------------------
# entry point


def _write_csv(path, rows) -> None:
    with open(path, "w") as fh:
        fh.write("x,y,z,kind,residual\n")
        for x, y, z, kind, r in rows:
            fh.write(f"{x!r},{y!r},{z!r},{kind},{r!r}\n")


def run(command: str, cfg: RunConfig, want_rows: bool = False):
    """Run one command; returns (exit code, report dict, csv rows)."""
    start = time.perf_counter()
    try:
        _validate(command, cfg)
    except (ConfigError, DomainError) as exc:
        raise _Fail(EXIT_CONFIG, str(exc)) from None
    try:
        code, results, rows = _DISPATCH[command](cfg, want_rows)
    except (DomainError, NumericError, FloatingPointError, OverflowError) as exc:
        raise _Fail(EXIT_NUMERIC, str(exc)) from None
    elapsed = (time.perf_counter() - start) * 1e3
    doc = {
        "tool_version": __version__,
        "command": command,
        "config_echo": cfg.echo(),
        "results": results,
        "semantics_note": SEMANTICS_NOTE,
        "timing_ms": elapsed if cfg["output.timing"] else None,
    }
    return code, doc, rows


def _summary(command, code, doc) -> str:
    res = doc["results"]
    if command == "verify":
        return (f"verify: {res['verdict']} residual={res['fit']['residual_sup']:.6g} "
                f"bound={res['bound']:.6g}")
    if command == "defects":
        e = res["eps_hat"]
        return f"defects: eps1={e['eps1']:.6g} eps2={e['eps2']:.6g} eps3={e['eps3']:.6g}"
    if command == "fit":
        return f"fit: {res['fit']['family']} residual_sup={res['fit']['residual_sup']:.6g}"
    out = [f"proofchain: {', '.join(k for k in res)}"]
    for ln in res.get("property_suite", []):
        out.append(f"  {'PASS' if ln['passed'] else 'FAIL'} {ln['name']}: "
                   f"{ln['lhs']:.6g} <= {ln['rhs']:.6g}")
    return "\n".join(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entropy-stability", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="TOML config with dotted keys (defaults if omitted)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="write per-point residuals (x,y,z,kind,residual)")
    p.add_argument("--quiet", action="store_true", help="no summary on stderr")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        try:
            cfg = load(args.config) if args.config else from_mapping({})
        except ConfigError as exc:
            raise _Fail(EXIT_CONFIG, str(exc)) from None
        code, doc, rows = run(args.command, cfg, want_rows=bool(args.csv))
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    text = report.dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        _write_csv(args.csv, rows)
    if not args.quiet:
        print(_summary(args.command, code, doc), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
