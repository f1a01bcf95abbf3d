"""Command-line front end: ``qsearch analyze|evolve|sweep-gamma|scaling|two-stage``.

Every JSON document carries the tool version and the full run configuration;
``--config FILE`` replays an embedded configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .criterion import (
    CriterionError,
    NoSpectralGapError,
    SearchAnalysis,
    analyze,
    gamma_sensitivity_band,
    select_m,
)
from .evolution import success_curve, two_stage_sc
from .graphs import (
    SearchOperator,
    complete_graph,
    cubic_lattice,
    erdos_renyi,
    hypercube,
    joined_complete,
    laplacian,
    latin_square_graph,
    load_edgelist,
    paley,
    shift_operator,
    shifted_adjacency,
    simplex_complete_operator,
)
from .spectral import (
    DEFAULT_DEGENERACY_TOL,
    EigenSolverError,
    OverlapProfile,
    eig_sym,
    ground_shift,
    target_overlaps,
)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_ASSUMPTION = 0, 2, 3, 4
FAMILIES = ("complete", "jc", "sc", "hypercube", "lattice", "er", "paley", "latin", "file")
# families whose spectra have near-degenerate clusters that must stay split
_NO_MERGE = ("er", "jc", "file")
# parameter varied by ``scaling --sizes``
SIZE_PARAM = {
    "complete": "n", "jc": "n", "er": "n", "sc": "r", "hypercube": "nbits",
    "lattice": "side", "paley": "q", "latin": "t",
}


class AssumptionFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str = "analyze"
    family: str = "complete"
    n: int | None = None
    a: int = 0
    b: int | None = None
    r: int | None = None
    w: float = 1.0
    nbits: int | None = None
    d: int | None = None
    side: int | None = None
    p: float | None = None
    seed: int = 0
    q: int | None = None
    t: int | None = None
    dsquares: int = 3
    path: str | None = None
    operator: str = "auto"
    target: int = 0
    gamma: str = "critical"
    m: str = "auto"
    chi_min: float = 10.0
    tol_degeneracy: str = "auto"
    initial: str = "uniform"
    steps: int = 1001
    tau_max: float | None = None
    gammas: list[float] | None = None
    span: float = 10.0
    num: int = 21
    sizes: list[int] | None = None
    gamma_mode: str = "critical"
    strict: bool = False
    with_sigma: bool = False
    format: str = "json"
    output: str | None = None
    dump_spectrum: str | None = None
    jobs: int = 1

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        # reproducibility fields only; where results are written is not part of them
        for k in ("output", "dump_spectrum", "jobs"):
            out.pop(k)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)


# --------------------------------------------------------------------------- pipeline


def _need(cfg: RunConfig, name: str):
    v = getattr(cfg, name)
    if v is None:
        raise ValueError(f"family {cfg.family!r} needs --{name.replace('_', '-')}")
    return v


def build_operator(cfg: RunConfig) -> SearchOperator:
    fam = cfg.family
    if fam == "sc":
        return simplex_complete_operator(_need(cfg, "r"), cfg.w)
    if fam == "complete":
        g = complete_graph(_need(cfg, "n"))
    elif fam == "jc":
        g = joined_complete(_need(cfg, "n"), cfg.a, cfg.b)
    elif fam == "hypercube":
        g = hypercube(_need(cfg, "nbits"))
    elif fam == "lattice":
        g = cubic_lattice(_need(cfg, "d"), _need(cfg, "side"))
    elif fam == "er":
        g = erdos_renyi(_need(cfg, "n"), _need(cfg, "p"), cfg.seed)
    elif fam == "paley":
        g = paley(_need(cfg, "q"))
    elif fam == "latin":
        g = latin_square_graph(_need(cfg, "t"), cfg.dsquares)
    elif fam == "file":
        with open(_need(cfg, "path"), encoding="utf-8") as fh:
            g = load_edgelist(fh.read())
    else:
        raise ValueError(f"unknown family {fam!r}")
    kind = cfg.operator
    if kind == "auto":
        kind = "adjacency" if fam == "er" else "laplacian"
    if kind == "adjacency":
        return shifted_adjacency(g)
    if kind == "laplacian":
        return laplacian(g)
    raise ValueError(f"unknown operator {cfg.operator!r}")


def _tol(cfg: RunConfig) -> float:
    if cfg.tol_degeneracy == "auto":
        return 0.0 if cfg.family in _NO_MERGE else DEFAULT_DEGENERACY_TOL
    return float(cfg.tol_degeneracy)


def _gamma(cfg: RunConfig):
    return "critical" if cfg.gamma == "critical" else float(cfg.gamma)


@dataclass
class Pipeline:
    op: SearchOperator
    profile: OverlapProfile
    analysis: SearchAnalysis
    selection: dict
    warnings: list[str]


def run_pipeline(cfg: RunConfig) -> Pipeline:
    """operator -> ground shift -> eigendecomposition -> overlaps -> m selection -> analysis."""
    raw = build_operator(cfg)
    spectrum = ground_shift(eig_sym(raw))
    op = shift_operator(raw, spectrum.shift_applied - raw.shift_applied)
    profile = target_overlaps(spectrum, cfg.target, _tol(cfg))
    if cfg.dump_spectrum:
        with open(cfg.dump_spectrum, "w", encoding="utf-8") as fh:
            json.dump(spectrum.to_dict(), fh)
    warnings = []
    if cfg.m == "auto":
        try:
            sel = select_m(profile, cfg.chi_min)
            m, selection = sel.m, sel.to_dict()
        except NoSpectralGapError as exc:
            if exc.best is None:
                raise AssumptionFailure(str(exc)) from exc
            m = exc.best.m
            selection = {
                "m": m,
                "chi_eff": exc.best.chi_eff,
                "rejected": [{"m": k, "chi_eff": c} for k, c in exc.rejected],
                "fallback": "best candidate",
            }
    else:
        m = int(cfg.m)
        selection = {"m": m, "rejected": [], "fallback": "fixed"}
    a = analyze(profile, m, _gamma(cfg), cfg.chi_min)
    if a.flagged:
        msg = f"chi_eff={a.chi_eff:.4g} below chi_min={cfg.chi_min}: two-level predictions are rough"
        if cfg.strict:
            raise AssumptionFailure(msg)
        warnings.append(msg)
    return Pipeline(op, profile, a, selection, warnings)


def _initial(cfg: RunConfig, p: Pipeline):
    if cfg.initial == "sigma":
        return p.analysis.sigma.astype(complex)
    if cfg.initial == "uniform":
        return None
    raise ValueError(f"unknown initial state {cfg.initial!r}")


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _header(cfg: RunConfig) -> dict:
    return {"tool": "qsearch", "version": __version__, "command": cfg.command,
            "config": cfg.to_dict()}


def cmd_analyze(cfg: RunConfig) -> dict:
    p = run_pipeline(cfg)
    out = _header(cfg)
    out.update(
        n=p.op.n,
        operator_kind=p.op.kind,
        shift_applied=p.op.shift_applied,
        analysis=p.analysis.to_dict(include_sigma=cfg.with_sigma),
        sensitivity_band=gamma_sensitivity_band(p.analysis),
        selection=p.selection,
        warnings=p.warnings,
    )
    return out


def cmd_evolve(cfg: RunConfig) -> dict:
    p = run_pipeline(cfg)
    a = p.analysis
    tau_max = cfg.tau_max if cfg.tau_max is not None else 2 * a.T
    trace = success_curve(p.op, a.gamma, cfg.target, _initial(cfg, p), tau_max, cfg.steps)
    predicted = a.peak_probability
    out = _header(cfg)
    out.update(
        n=p.op.n,
        analysis=a.to_dict(include_sigma=cfg.with_sigma),
        trace=trace.to_dict(),
        summary={
            "T_pred": a.T,
            "peak_tau": trace.refined_peak_tau,
            "predicted_peak_prob": predicted,
            "peak_prob": trace.refined_peak_prob,
            "tau_rel_error": _rel(trace.refined_peak_tau, a.T),
            "prob_rel_error": _rel(trace.refined_peak_prob, predicted),
        },
        warnings=p.warnings,
    )
    return out


def _sweep_row(args) -> dict:
    op, profile, m, gamma, chi_min, target, tau_max, steps, gamma_c, band = args
    a = analyze(profile, m, gamma, chi_min)
    trace = success_curve(op, gamma, target, None, tau_max, steps)
    return {
        "gamma": gamma,
        "detuning_bands": (gamma - gamma_c) / band,
        "predicted_peak_prob": a.peak_probability,
        "predicted_T": a.T,
        "peak_prob": trace.refined_peak_prob,
        "peak_tau": trace.refined_peak_tau,
    }


def cmd_sweep_gamma(cfg: RunConfig) -> dict:
    p = run_pipeline(cfg)
    a = p.analysis
    band = gamma_sensitivity_band(a)
    if cfg.gammas:
        gammas = [float(g) for g in cfg.gammas]
    else:
        gammas = np.linspace(a.gamma_c - cfg.span * band, a.gamma_c + cfg.span * band, cfg.num)
        gammas = [float(g) for g in gammas if g > 0]
    if any(not g > 0 for g in gammas):
        raise ValueError("all sweep gammas must be positive")
    tau_max = cfg.tau_max if cfg.tau_max is not None else 2 * a.T
    jobs = [(p.op, p.profile, a.m, g, cfg.chi_min, cfg.target, tau_max, cfg.steps, a.gamma_c, band)
            for g in gammas]
    with ThreadPoolExecutor(max_workers=max(1, cfg.jobs)) as pool:
        rows = list(pool.map(_sweep_row, jobs))
    out = _header(cfg)
    out.update(n=p.op.n, gamma_c=a.gamma_c, sensitivity_band=band, T_critical=a.T,
               rows=rows, warnings=p.warnings)
    return out


def _scaling_point(cfg: RunConfig) -> dict:
    p = run_pipeline(cfg)
    a = p.analysis
    trace = success_curve(p.op, a.gamma, cfg.target, None, 2 * a.T, cfg.steps)
    return {"N": p.op.n, "predicted_T": a.T, "peak_tau": trace.refined_peak_tau,
            "peak_prob": trace.refined_peak_prob, "predicted_peak_prob": a.peak_probability,
            "chi_eff": a.chi_eff}


def fit_power_law(sizes, times) -> dict:
    """Least squares of ``log T = log a + b log N``."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(times, dtype=float))
    if x.size < 3:
        raise ValueError("a scaling fit needs at least 3 sizes")
    b, loga = np.polyfit(x, y, 1)
    resid = y - (loga + b * x)
    return {"exponent": float(b), "prefactor": float(math.exp(loga)),
            "residual": float(np.sqrt(np.mean(resid**2)))}


def cmd_scaling(cfg: RunConfig) -> dict:
    if not cfg.sizes or len(cfg.sizes) < 3:
        raise ValueError("scaling needs --sizes with at least 3 values")
    key = SIZE_PARAM.get(cfg.family)
    if key is None:
        raise ValueError(f"family {cfg.family!r} has no size parameter")
    cfgs = [dataclasses.replace(cfg, **{key: int(s)}) for s in cfg.sizes]
    with ThreadPoolExecutor(max_workers=max(1, cfg.jobs)) as pool:
        points = list(pool.map(_scaling_point, cfgs))
    Ns = [pt["N"] for pt in points]
    out = _header(cfg)
    out.update(
        points=points,
        fit=fit_power_law(Ns, [pt["peak_tau"] for pt in points]),
        predicted_fit=fit_power_law(Ns, [pt["predicted_T"] for pt in points]),
    )
    return out


def cmd_two_stage(cfg: RunConfig) -> dict:
    res = two_stage_sc(_need(cfg, "r"), cfg.w, cfg.steps, cfg.gamma_mode, cfg.chi_min)
    out = _header(cfg)
    out["result"] = res.to_dict()
    return out


COMMANDS = {
    "analyze": cmd_analyze,
    "evolve": cmd_evolve,
    "sweep-gamma": cmd_sweep_gamma,
    "scaling": cmd_scaling,
    "two-stage": cmd_two_stage,
}


# --------------------------------------------------------------------------- output


def _csv_lines(doc: dict) -> list[list]:
    cmd = doc["command"]
    if cmd == "evolve":
        tr = doc["trace"]
        return [["tau", "prob"]] + [[t, p] for t, p in zip(tr["taus"], tr["probs"])]
    if cmd == "sweep-gamma":
        keys = list(doc["rows"][0]) if doc["rows"] else ["gamma"]
        return [keys] + [[row[k] for k in keys] for row in doc["rows"]]
    if cmd == "scaling":
        keys = list(doc["points"][0])
        return [keys] + [[pt[k] for k in keys] for pt in doc["points"]]
    flat = doc.get("analysis") or doc.get("result") or {}
    return [list(flat), [flat[k] for k in flat]]


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower() if v is not None else ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    meta = {k: v for k, v in doc.items() if k in ("tool", "version", "command", "config")}
    lines = [f"# {json.dumps(meta, sort_keys=True)}"]
    for key in ("summary", "fit"):
        if key in doc:
            lines.append(f"# {key} {json.dumps(doc[key], sort_keys=True)}")
    lines += [",".join(_fmt(v) for v in row) for row in _csv_lines(doc)]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- argparse


def _csv_floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _csv_ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _add_common(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("graph family")
    g.add_argument("--family", choices=FAMILIES, default=argparse.SUPPRESS)
    for name, typ in (("n", int), ("a", int), ("b", int), ("r", int), ("w", float),
                      ("nbits", int), ("d", int), ("side", int), ("p", float), ("seed", int),
                      ("q", int), ("t", int), ("dsquares", int), ("path", str)):
        g.add_argument(f"--{name}", type=typ, default=argparse.SUPPRESS)
    g.add_argument("--operator", choices=("auto", "laplacian", "adjacency"),
                   default=argparse.SUPPRESS)
    s = sp.add_argument_group("search")
    s.add_argument("--target", type=int, default=argparse.SUPPRESS)
    s.add_argument("--gamma", default=argparse.SUPPRESS, help="'critical' or a positive number")
    s.add_argument("--m", default=argparse.SUPPRESS, help="'auto' or an eigenstate count")
    s.add_argument("--chi-min", dest="chi_min", type=float, default=argparse.SUPPRESS)
    s.add_argument("--tol-degeneracy", dest="tol_degeneracy", default=argparse.SUPPRESS)
    s.add_argument("--initial", choices=("uniform", "sigma"), default=argparse.SUPPRESS)
    s.add_argument("--steps", type=int, default=argparse.SUPPRESS)
    s.add_argument("--tau-max", dest="tau_max", type=float, default=argparse.SUPPRESS)
    s.add_argument("--strict", action="store_true", default=argparse.SUPPRESS)
    s.add_argument("--with-sigma", dest="with_sigma", action="store_true",
                   default=argparse.SUPPRESS)
    o = sp.add_argument_group("output")
    o.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    o.add_argument("--output", "-o", default=argparse.SUPPRESS)
    o.add_argument("--dump-spectrum", dest="dump_spectrum", default=argparse.SUPPRESS)
    o.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                   help="parallel jobs (default: $QSEARCH_JOBS or 1)")
    o.add_argument("--config", dest="config_file", default=None,
                   help="replay the 'config' object of an earlier output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsearch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qsearch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "evolve"):
        _add_common(sub.add_parser(name))
    sp = sub.add_parser("sweep-gamma")
    _add_common(sp)
    sp.add_argument("--gammas", type=_csv_floats, default=argparse.SUPPRESS)
    sp.add_argument("--span", type=float, default=argparse.SUPPRESS,
                    help="half-width in sensitivity bands around gamma_c")
    sp.add_argument("--num", type=int, default=argparse.SUPPRESS)
    sp = sub.add_parser("scaling")
    _add_common(sp)
    sp.add_argument("--sizes", type=_csv_ints, default=argparse.SUPPRESS)
    sp = sub.add_parser("two-stage")
    _add_common(sp)
    sp.add_argument("--gamma-mode", dest="gamma_mode", choices=("critical", "closed_form"),
                    default=argparse.SUPPRESS)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if ns.config_file:
        with open(ns.config_file, encoding="utf-8") as fh:
            data = json.load(fh)
        values.update(data.get("config", data))
    values.update({k: v for k, v in vars(ns).items() if k != "config_file"})
    if "jobs" not in values:
        values["jobs"] = int(os.environ.get("QSEARCH_JOBS", "1"))
    for key in ("gamma", "m", "tol_degeneracy"):
        if key in values:
            values[key] = str(values[key])
    return RunConfig.from_dict(values)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = None
    try:
        cfg = config_from_args(ns)
        doc = COMMANDS[cfg.command](cfg)
        _emit(render(doc, cfg.format), cfg.output)
        for w in doc.get("warnings", []):
            print(f"warning: {w}", file=sys.stderr)
        return EXIT_OK
    except AssumptionFailure as exc:
        code, err = EXIT_ASSUMPTION, exc
    except (EigenSolverError, np.linalg.LinAlgError, FloatingPointError) as exc:
        code, err = EXIT_NUMERICAL, exc
    except (CriterionError, ValueError, TypeError, KeyError, OSError) as exc:
        code, err = EXIT_VALIDATION, exc
    doc = {
        "tool": "qsearch",
        "version": __version__,
        "command": getattr(ns, "command", None),
        "error": {"type": type(err).__name__, "message": str(err), "exit_code": code},
        "config": cfg.to_dict() if cfg is not None else None,
    }
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
