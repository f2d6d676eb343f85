"""Command-line orchestration of the named experiments.

Every run resolves its configuration (file values overridden by flags),
validates it before any computation, writes its outputs into a single
directory and finishes with a manifest recording the resolved config, the
package version and a checksum per output file.  Outputs are bit-identical
for identical configs and seeds on one platform.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure (an
error record is written to the output directory).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__

MANIFEST_SCHEMA = 1

_SCHEMAS = {
    "fig2": {
        "xi": (float, 5.0),
        "gamma": (float, 1.0),
        "sigma": (float, 0.4),
        "l_max": (int, 12),
    },
    "fig3": {
        "xi": (float, 20.0),
        "gamma": (float, 1.0 / np.pi),
        "m0": (int, 25),
        "sigma": (float, 0.2),
        "m_max": (int, 60),
    },
    "stationary-linear": {
        "xi": (float, 5.0),
        "gamma": (float, 1.0),
        "l_max": (int, 12),
    },
    "stationary-planar": {
        "xi": (float, 20.0),
        "gamma": (float, 1.0),
        "m_max": (int, 45),
        "variant": (str, "full"),
    },
    "classical-linear": {
        "xi": (float, 40.0),
        "gamma": (float, 1.0),
        "trajectories": (int, 10000),
        "j0": (float, 3.4641016151377544),
        "seed": (int, 2024),
        "t_final": (float, 3.0),
        "dt": (float, 1e-3),
        "n_times": (int, 13),
    },
    "gibbs-scaling": {
        "xi_list": (str, "10,20,40"),
        "gamma": (float, 1.0),
        "l_max": (int, 0),  # 0 selects the automatic cutoff
    },
    "custom": {
        "rotor": (str, "linear"),
        "xi": (float, 5.0),
        "gamma": (float, 1.0),
        "l_max": (int, 12),
        "m_max": (int, 30),
        "include_1overT_terms": (bool, True),
        "inversion_symmetric": (bool, False),
        "initial": (str, "updown"),
        "sigma": (float, 0.4),
        "m0": (int, 8),
        "l0": (float, 4.0),
        "t_final": (float, 5.0),
        "n_times": (int, 26),
    },
}

EXPERIMENTS = tuple(_SCHEMAS)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated experiment configuration: name, parameters, output directory."""

    experiment: str
    params: dict
    outdir: Path


def _coerce(key, value, target_type):
    if isinstance(value, target_type) and not (target_type is int and isinstance(value, bool)):
        return value
    text = str(value).strip()
    try:
        if target_type is bool:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        return target_type(text)
    except ValueError as exc:
        raise ConfigError(f"parameter {key!r}: cannot parse {value!r} as {target_type.__name__}") from exc


def resolve_config(experiment: str, outdir, file_values=None, overrides=None) -> RunConfig:
    """Merge defaults, config-file values and flag overrides; reject unknown keys."""
    if experiment not in _SCHEMAS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    schema = _SCHEMAS[experiment]
    params = {k: default for k, (_, default) in schema.items()}
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if key not in schema:
                raise ConfigError(f"unknown parameter {key!r} for experiment {experiment!r}")
            params[key] = _coerce(key, value, schema[key][0])
    _validate_ranges(experiment, params)
    return RunConfig(experiment, params, Path(outdir))


def _validate_ranges(experiment, p):
    if "xi" in p and p["xi"] <= 0:
        raise ConfigError("xi must be positive")
    if "gamma" in p and p["gamma"] < 0:
        raise ConfigError("gamma must be nonnegative")
    if p.get("l_max", 2) < 0:
        raise ConfigError("l_max must be nonnegative")
    if experiment == "fig2" and p["l_max"] < 12:
        raise ConfigError("fig2 requires l_max >= 12")
    if experiment == "fig3" and p["m_max"] < 40:
        raise ConfigError("fig3 requires m_max >= 40")
    if experiment == "stationary-planar" and p["variant"] not in ("full", "high_T"):
        raise ConfigError("variant must be 'full' or 'high_T'")
    if experiment == "custom" and p["rotor"] not in ("linear", "planar"):
        raise ConfigError("rotor must be 'linear' or 'planar'")
    if experiment == "gibbs-scaling":
        values = _parse_list(p["xi_list"])
        if not values:
            raise ConfigError("xi_list must not be empty")
        if sorted(values) != values or min(values) < 5:
            raise ConfigError("xi_list must be ascending and >= 5")


def _parse_list(text) -> list:
    items = [s for s in str(text).replace(";", ",").split(",") if s.strip()]
    try:
        return [float(s) for s in items]
    except ValueError as exc:
        raise ConfigError(f"cannot parse list {text!r}") from exc


def read_config_file(path) -> dict:
    """Flat key = value lines; '#' starts a comment."""
    values = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


# -- experiment drivers ---------------------------------------------------------


def _run_fig2(cfg: RunConfig):
    from .linear import LinearRotorParams, fig2_experiment

    params = LinearRotorParams(xi=cfg.params["xi"], gamma=cfg.params["gamma"],
                               l_max=cfg.params["l_max"])
    result = fig2_experiment(params, sigma=cfg.params["sigma"])
    result.write(cfg.outdir)
    final = result.series.records[-1]
    return {"headline": {"name": "final_energy", "value": final.energy},
            "final_entropy": final.entropy, "final_purity": final.purity}


def _run_fig3(cfg: RunConfig):
    from .planar import BoundaryMassWarning, fig3_experiment

    captured = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always", BoundaryMassWarning)
        result = fig3_experiment(xi=cfg.params["xi"], gamma=cfg.params["gamma"],
                                 m0=cfg.params["m0"], sigma=cfg.params["sigma"],
                                 m_max=cfg.params["m_max"])
        captured = [str(w.message) for w in wlist if issubclass(w.category, BoundaryMassWarning)]
    result.write(cfg.outdir)
    final = result.series.records[-1]
    fringes = result.fringe_amplitudes()
    return {"headline": {"name": "final_m2", "value": float(np.trace(final.j_second).real)},
            "fringe_amplitudes": fringes,
            "boundary_mass": result.boundary_mass,
            "warnings": captured}


def _run_stationary_linear(cfg: RunConfig):
    from .lindblad import stationary_nullspace
    from .linear import (LinearRotorParams, build_linear_generator,
                         stationary_closed_form, stationary_iterative)
    from .operators import trace_distance

    params = LinearRotorParams(xi=cfg.params["xi"], gamma=cfg.params["gamma"],
                               l_max=cfg.params["l_max"])
    closed = stationary_closed_form(params)
    iterative = stationary_iterative(params)
    nullspace = stationary_nullspace(build_linear_generator(params))
    basis = params.basis()
    lv = basis.l_values()
    lines = ["l,p_closed,p_iterative,p_nullspace"]
    for l in range(params.l_max + 1):
        sel = lv == l
        lines.append(",".join([str(l)] + [
            repr(float(np.diag(s.entries).real[sel].sum()))
            for s in (closed, iterative, nullspace)
        ]))
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    (cfg.outdir / "stationary_pl.csv").write_text("\n".join(lines) + "\n")
    dists = {
        "closed_vs_iterative": trace_distance(closed, iterative),
        "closed_vs_nullspace": trace_distance(closed, nullspace),
        "iterative_vs_nullspace": trace_distance(iterative, nullspace),
    }
    return {"headline": {"name": "max_pairwise_trace_distance",
                         "value": max(dists.values())},
            "trace_distances": dists}


def _run_stationary_planar(cfg: RunConfig):
    from .lindblad import stationary_nullspace
    from .operators import trace_distance
    from .planar import PlanarBasis, build_planar_generator, stationary_planar

    xi, m_max, variant = cfg.params["xi"], cfg.params["m_max"], cfg.params["variant"]
    closed = stationary_planar(xi, m_max, variant)
    gen = build_planar_generator(xi, cfg.params["gamma"], m_max,
                                 include_1overT_terms=(variant == "full"))
    nullspace = stationary_nullspace(gen)
    mv = PlanarBasis(m_max).m_values()
    diag = np.diag(closed.entries).real
    diag_ns = np.diag(nullspace.entries).real
    lines = ["m,p,p_nullspace"]
    for i, m in enumerate(mv):
        lines.append(f"{m},{float(diag[i])!r},{float(diag_ns[i])!r}")
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    (cfg.outdir / "stationary_pm.csv").write_text("\n".join(lines) + "\n")
    dist = trace_distance(closed, nullspace)
    return {"headline": {"name": "trace_distance_to_nullspace", "value": dist},
            "rho0": float(diag[m_max])}


def _run_classical_linear(cfg: RunConfig):
    from .classical import linear_rotor_ensemble, simulate_ensemble

    p = cfg.params
    ens = linear_rotor_ensemble(p["trajectories"], p["j0"], seed=p["seed"])
    times = np.linspace(0.0, p["t_final"], p["n_times"])
    series = simulate_ensemble(ens, p["xi"], p["gamma"], p["dt"], times)
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    series.to_csv(cfg.outdir / "moments.csv")
    final = series.records[-1]
    return {"headline": {"name": "final_J2", "value": final.j_squared},
            "final_J2_se": final.j_squared_se,
            "equipartition_target": p["xi"]}


def _run_gibbs_scaling(cfg: RunConfig):
    from .linear import gibbs_residual_scaling

    xis = _parse_list(cfg.params["xi_list"])
    l_max = cfg.params["l_max"] or None
    result = gibbs_residual_scaling(cfg.params["gamma"], xis, l_max=l_max)
    lines = ["xi,residual"]
    for x, r in zip(result.xi_values, result.residuals):
        lines.append(f"{float(x)!r},{float(r)!r}")
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    (cfg.outdir / "gibbs_residuals.csv").write_text("\n".join(lines) + "\n")
    return {"headline": {"name": "loglog_slope", "value": result.slope},
            "residuals": dict(zip(map(repr, result.xi_values), result.residuals))}


def _run_custom(cfg: RunConfig):
    from .lindblad import ObservableSeries, propagate, save_snapshot
    from .operators import OperatorMatrix

    p = cfg.params
    if p["rotor"] == "linear":
        from .linear import (LinearRotorParams, build_linear_generator, gibbs_state,
                             initial_updown_state, rotating_wavepacket)

        lp = LinearRotorParams(xi=p["xi"], gamma=p["gamma"], l_max=p["l_max"],
                               include_1overT_terms=p["include_1overT_terms"],
                               inversion_symmetric=p["inversion_symmetric"])
        gen = build_linear_generator(lp)
        basis = lp.basis()
        if p["initial"] == "updown":
            rho0 = initial_updown_state(basis, p["sigma"])
        elif p["initial"] == "wavepacket":
            rho0 = rotating_wavepacket(basis, p["l0"], 1.5)
        else:
            raise ConfigError(f"unknown linear initial state {p['initial']!r}")
        lv = basis.l_values()
        ham = OperatorMatrix(basis, np.diag(0.5 * lv * (lv + 1.0)).astype(complex))
        reference = gibbs_state(basis, p["xi"])
    else:
        from .planar import (PlanarBasis, build_planar_generator, planar_gibbs_state,
                             planar_superposition_state)

        gen = build_planar_generator(p["xi"], p["gamma"], p["m_max"],
                                     include_1overT_terms=p["include_1overT_terms"],
                                     inversion_symmetric=p["inversion_symmetric"])
        basis = PlanarBasis(p["m_max"])
        if p["initial"] != "superposition":
            raise ConfigError(f"unknown planar initial state {p['initial']!r}")
        rho0 = planar_superposition_state(basis, p["m0"], p["sigma"])
        mv = basis.m_values()
        ham = OperatorMatrix(basis, np.diag(0.5 * mv.astype(complex) ** 2))
        reference = planar_gibbs_state(basis, p["xi"])
    times = np.linspace(0.0, p["t_final"], p["n_times"])
    states = propagate(gen, rho0, p["t_final"], times)
    series = ObservableSeries.from_states(times, states, ham, rho_ref=reference)
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    series.to_csv(cfg.outdir / "observables.csv")
    save_snapshot(cfg.outdir / "final_state.rbsnap", states[-1])
    final = series.records[-1]
    return {"headline": {"name": "final_energy", "value": final.energy}}


_DRIVERS = {
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "stationary-linear": _run_stationary_linear,
    "stationary-planar": _run_stationary_planar,
    "classical-linear": _run_classical_linear,
    "gibbs-scaling": _run_gibbs_scaling,
    "custom": _run_custom,
}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_manifest(cfg: RunConfig, results: dict) -> Path:
    outputs = {
        p.name: _sha256(p)
        for p in sorted(cfg.outdir.iterdir())
        if p.is_file() and p.name not in ("manifest.json", "error.json")
    }
    manifest = {
        "schema_version": MANIFEST_SCHEMA,
        "experiment": cfg.experiment,
        "config": dict(sorted(cfg.params.items())),
        "version": __version__,
        "units": "hbar = I = k_B = 1; xi = 2*I*kT/hbar^2; rates in hbar/I",
        "outputs": outputs,
        "results": results,
    }
    path = cfg.outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=float) + "\n")
    return path


def run(cfg: RunConfig) -> dict:
    """Execute one experiment; returns the manifest dictionary."""
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    results = _DRIVERS[cfg.experiment](cfg)
    _write_manifest(cfg, results)
    return results


def run_sweep(experiment: str, parameter: str, values, outdir, base_overrides=None,
              jobs: int = 1) -> Path:
    """Run the experiment once per parameter value; one CSV row per value."""
    if not values:
        raise ConfigError("sweep needs a nonempty value list")
    outdir = Path(outdir)
    configs = []
    for v in values:
        overrides = dict(base_overrides or {})
        overrides[parameter] = v
        configs.append(resolve_config(experiment, outdir / f"{parameter}_{v}", overrides=overrides))

    def entry(cfg):
        return run(cfg)["headline"]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            headlines = list(pool.map(entry, configs))
    else:
        headlines = [entry(c) for c in configs]
    lines = [f"{parameter},headline,value"]
    for v, h in zip(values, headlines):
        lines.append(f"{v},{h['name']},{h['value']!r}")
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "sweep.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    manifest = {
        "schema_version": MANIFEST_SCHEMA,
        "experiment": experiment,
        "sweep": {"parameter": parameter, "values": list(values), "jobs": jobs},
        "version": __version__,
        "outputs": {"sweep.csv": _sha256(csv_path)},
        "results": {"headlines": [h["value"] for h in headlines]},
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True, default=float) + "\n")
    return csv_path


# -- argument parsing -------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorbath",
        description="Dissipative rotor dynamics: named experiments with reproducible outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--config", default=None, help="key = value config file")

    flag_names = {
        "xi": "--xi", "gamma": "--gamma", "sigma": "--sigma", "l_max": "--lmax",
        "m_max": "--mmax", "m0": "--m0", "variant": "--variant",
        "trajectories": "--trajectories", "j0": "--j0", "seed": "--seed",
        "t_final": "--t-final", "dt": "--dt", "n_times": "--n-times",
        "xi_list": "--xi-list", "rotor": "--rotor", "initial": "--initial",
        "l0": "--l0", "include_1overT_terms": "--include-1overT",
        "inversion_symmetric": "--inversion-symmetric",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        add_common(p)
        for key in _SCHEMAS[name]:
            p.add_argument(flag_names[key], dest=key, default=None)

    p = sub.add_parser("sweep", help="run one experiment over a list of parameter values")
    add_common(p)
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--param", required=True, help="parameter to sweep")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="fixed parameter override (repeatable)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            file_values = read_config_file(args.config) if args.config else {}
            overrides = dict(file_values)
            for item in args.set:
                if "=" not in item:
                    raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
                key, _, value = item.partition("=")
                overrides[key.strip()] = value.strip()
            values = [s.strip() for s in args.values.split(",") if s.strip()]
            if not values:
                raise ConfigError("sweep needs a nonempty value list")
            outdir = Path(args.out or f"rotorbath-sweep-{args.experiment}")
            run_sweep(args.experiment, args.param, values, outdir,
                      base_overrides=overrides, jobs=args.jobs)
            return 0
        file_values = read_config_file(args.config) if args.config else {}
        overrides = {
            key: getattr(args, key)
            for key in _SCHEMAS[args.command]
            if getattr(args, key) is not None
        }
        outdir = args.out or f"rotorbath-{args.command}"
        cfg = resolve_config(args.command, outdir, file_values, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical failure: machine-readable record
        cfg.outdir.mkdir(parents=True, exist_ok=True)
        record = {"error": type(exc).__name__, "message": str(exc),
                  "experiment": cfg.experiment,
                  "config": dict(sorted(cfg.params.items()))}
        (cfg.outdir / "error.json").write_text(json.dumps(record, indent=2, default=float) + "\n")
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
