"""Command-line driver: ``mqkg <command> --config run.json``.

Exit codes: 0 success, 1 oracle failure, 2 configuration or parse error,
3 numerical-domain error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import fluctuations as fl
from . import oracles
from . import spin
from .config import SCHEMA_VERSION, RunConfig, _num, build_state, load_config
from .errors import ConfigError, DomainError
from .io import read_field_modes, write_csv, write_json
from .lattice import build_shell_lattice
from .states import FieldModes, chi, scan_negativity, smearing_functions

EXIT_OK, EXIT_ORACLE, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3

FLUCTUATION_TASKS = ("sampling", "locality", "ratio", "bessel")
SAMPLE_BUDGET = 50_000_000


class Run:
    """Resolved config plus the output directory and the files written so far."""

    def __init__(self, cfg: RunConfig, args: argparse.Namespace, command: str):
        self.cfg = cfg
        self.command = command
        self.seed = cfg.seed if args.seed is None else args.seed
        out = args.out if args.out is not None else cfg.output.directory
        out = Path(out)
        self.out = out if out.is_absolute() or args.out is not None else cfg.base_dir / out
        self.tasks = None if args.task is None else [t.strip() for t in args.task.split(",") if t.strip()]
        self.files: list[str] = []

    def csv(self, name: str, header, rows):
        write_csv(self.out / name, header, rows)
        self.files.append(name)

    def json(self, name: str, doc: dict):
        write_json(self.out / name, {"schemaVersion": SCHEMA_VERSION, **doc})
        self.files.append(name)

    def manifest(self, extra: dict | None = None):
        doc = {"schemaVersion": SCHEMA_VERSION, "command": self.command, "seed": self.seed,
               "version": __version__, "files": sorted(self.files)}
        doc.update(extra or {})
        write_json(self.out / "manifest.json", doc)


# --- eval -------------------------------------------------------------------------

def cmd_eval(run: Run, field_files: list[str]) -> int:
    if run.tasks is not None:
        raise ConfigError("eval takes no --task")
    lat = build_shell_lattice(run.cfg.lattice_config())
    state = build_state(run.cfg, lat)
    inputs = [(f, read_field_modes(f, lat)) for f in field_files] or [("zero", FieldModes.zeros(lat))]
    records = []
    for source, w in inputs:
        v = chi(state, w)
        records.append({"source": str(source), "prefactor": v.prefactor, "exponent": v.exponent,
                        "value": v.value, "sign": v.sign, "logAbs": v.log_abs})
    keys = ["source", "prefactor", "exponent", "value", "sign", "logAbs"]
    if run.cfg.output.format == "csv":
        run.csv("eval.csv", keys, [[r[k] for k in keys] for r in records])
    else:
        run.json("eval.json", {"state": run.cfg.state["type"], "latticePoints": len(lat),
                               "records": records})
    run.manifest()
    return EXIT_OK


# --- negativity scan ----------------------------------------------------------------

def cmd_scan_negativity(run: Run) -> int:
    if run.tasks is not None:
        raise ConfigError("scan-negativity takes no --task")
    node = run.cfg.task("scan")
    points = _num(node, "points", "tasks.scan", 41, positive=True, integer=True)
    span = _num(node, "span", "tasks.scan", 4.0, positive=True)
    phases = node.get("phases", [0.0, math.pi / 2])
    if not (isinstance(phases, list) and phases and all(isinstance(p, (int, float)) for p in phases)):
        raise ConfigError("tasks.scan.phases must be a non-empty list of numbers")
    if points < 2:
        raise ConfigError("tasks.scan.points must be at least 2")
    lat = build_shell_lattice(run.cfg.lattice_config())
    state = build_state(run.cfg, lat)
    smearing_functions(state)
    rep = scan_negativity(state, lat, points, span, tuple(float(p) for p in phases))
    doc = {"state": run.cfg.state["type"], "verdict": rep.verdict,
           "minPrefactor": rep.min_prefactor,
           "witness": {"alpha": rep.witness[0], "beta": rep.witness[1]},
           "analyticWitness": rep.analytic_witness, "gridPoints": rep.grid_points,
           "sliceUnits": rep.slice_units, "scan": {"points": points, "span": span, "phases": phases}}
    run.json("negativity.json", doc)
    if run.cfg.output.format == "csv":
        run.csv("negativity.csv", ["verdict", "minPrefactor", "alphaRe", "alphaIm", "betaRe", "betaIm"],
                [[rep.verdict, rep.min_prefactor, rep.witness[0].real, rep.witness[0].imag,
                  rep.witness[1].real, rep.witness[1].imag]])
    run.manifest()
    return EXIT_OK


# --- fluctuations -------------------------------------------------------------------

def cmd_compare_fluctuations(run: Run) -> int:
    cfg = run.cfg
    node = cfg.task("fluctuations")
    bessel_node = node.get("bessel", {})
    if not isinstance(bessel_node, dict):
        raise ConfigError("tasks.fluctuations.bessel must be an object")
    tasks = run.tasks
    if tasks is None:
        tasks = ["sampling", "locality", "ratio"]
        if bessel_node.get("enabled", False):
            tasks.append("bessel")
    for t in tasks:
        if t not in FLUCTUATION_TASKS:
            raise ConfigError(f"unknown fluctuation task {t!r}; choose from {', '.join(FLUCTUATION_TASKS)}")

    m, hbar = cfg.physics.mass, cfg.physics.hbar
    kT = _num(node, "kT", "tasks.fluctuations", 1.0, positive=True)
    samples = _num(node, "samples", "tasks.fluctuations", 20000, positive=True, integer=True)
    chunk = _num(node, "chunkSize", "tasks.fluctuations", 1024, positive=True, integer=True)
    spatial = fl.SpatialLattice(cfg.lattice.dimension, cfg.lattice.sites, cfg.lattice.site_spacing)
    loc = node.get("locality", {})
    if not isinstance(loc, dict):
        raise ConfigError("tasks.fluctuations.locality must be an object")
    loc_sites = _num(loc, "sites", "tasks.fluctuations.locality", 256, positive=True, integer=True)
    loc_spacing = _num(loc, "spacing", "tasks.fluctuations.locality", 0.2, positive=True)
    fit = loc.get("fitRange", [5, 40])
    if not (isinstance(fit, list) and len(fit) == 2 and all(isinstance(x, int) for x in fit)
            and 1 <= fit[0] < fit[1] <= loc_sites // 2):
        raise ConfigError("tasks.fluctuations.locality.fitRange must be [lo, hi] with 1 <= lo < hi <= sites/2")
    r_values = bessel_node.get("r", [0.5, 1.0, 2.0, 3.0])
    if not (isinstance(r_values, list) and r_values
            and all(isinstance(r, (int, float)) and r > 0 for r in r_values)):
        raise ConfigError("tasks.fluctuations.bessel.r must be a non-empty list of positive numbers")
    if "sampling" in tasks and samples * int(np.prod(spatial.shape)) > SAMPLE_BUDGET:
        raise ConfigError(f"samples x sites^d exceeds the budget of {SAMPLE_BUDGET} values")

    summary: dict = {"mass": m, "hbar": hbar, "kT": kT, "tasks": tasks}
    if "sampling" in tasks:
        summary["sampling"] = {}
        for label, kernel, amp in (("quantum", fl.quantum_vacuum_kernel(spatial, m), hbar),
                                   ("classical", fl.classical_thermal_kernel(spatial, m), kT)):
            s = fl.sample_fields(spatial, kernel, amp, samples, run.seed, chunk)
            audit = fl.sampling_audit(spatial, kernel, s)
            run.csv(f"sampling_{label}.csv", ["mode", "sampleVariance", "analyticVariance"],
                    zip(audit.mode_index, audit.sample_variance, audit.analytic_variance))
            summary["sampling"][label] = {"maxRelativeError": audit.max_relative_error,
                                          "samples": samples, "sites": spatial.sites}
    if "locality" in tasks:
        summary["locality"] = {}
        loc_lat = fl.SpatialLattice(1, loc_sites, loc_spacing)
        for label, kernel in (("classical", fl.classical_thermal_kernel(loc_lat, m, fl.LATTICE)),
                              ("quantum", fl.quantum_vacuum_kernel(loc_lat, m, fl.LATTICE))):
            rep = fl.locality_diagnostic(kernel, loc_lat, tuple(fit))
            run.csv(f"locality_{label}.csv", ["separation", "inverseCovarianceEntry"],
                    zip(rep.separations * loc_spacing, rep.row))
            summary["locality"][label] = {
                "verdict": rep.verdict, "bandRatio": rep.band_ratio, "decayRate": rep.decay_rate,
                "powerLawExponent": rep.power, "pureExponentialRate": rep.pure_exponential_rate,
                "rateOverMass": None if rep.decay_rate is None else rep.decay_rate / m,
                "fitRange": list(fit), "dispersion": fl.LATTICE}
    if "ratio" in tasks:
        k2 = spatial.k_squared().ravel()
        q = fl.quantum_symbol(k2, m) / hbar
        c = fl.classical_symbol(k2, m) / (2.0 * kT)
        run.csv("kernel_ratio.csv", ["mode", "kSquared", "quantumCoefficient", "classicalCoefficient",
                                     "classicalOverQuantum"],
                zip(range(len(k2)), k2, q, c, c / q))
    if "bessel" in tasks:
        rows = fl.bessel_kernel_check(m, [float(r) for r in r_values])
        run.csv("bessel.csv", ["r", "numeric", "analytic", "relativeError"],
                [(b.r, b.numeric, b.analytic, b.relative_error) for b in rows])
        summary["bessel"] = {"maxRelativeError": max(b.relative_error for b in rows),
                             "comparison": "magnitude"}
    run.json("fluctuations_summary.json", summary)
    run.manifest()
    return EXIT_OK


# --- oracles ------------------------------------------------------------------------

def cmd_oracles(run: Run) -> int:
    node = run.cfg.task("oracles")
    overrides = node.get("tolerance_overrides", {})
    if not isinstance(overrides, dict) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in overrides.values()):
        raise ConfigError("tasks.oracles.tolerance_overrides must map check names to numbers")
    count = _num(node, "randomForms", "tasks.oracles", 50, positive=True, integer=True)
    suites = run.tasks or list(oracles.SUITES)
    for s in suites:
        if s not in oracles.SUITES:
            raise ConfigError(f"unknown oracle suite {s!r}; choose from {', '.join(oracles.SUITES)}")
    lat_cfg = run.cfg.lattice_config()
    checks, meta = oracles.run_suites(lat_cfg, suites, count, run.seed)
    checks = oracles.apply_overrides(checks, overrides)
    if "dirac" in suites:
        meta["spin1_sign"] = spin.resolve_spin1_sign(build_shell_lattice(lat_cfg), seed=run.seed)
    failed = [c for c in checks if not c.passed]
    run.json("oracles.json", {"checks": [c.as_dict() for c in checks], "passed": not failed,
                              "failures": len(failed), **meta})
    run.manifest()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.suite}.{c.name}: "
              f"{c.measured:.3e} {c.comparison} {c.tolerance:.1e}")
    if "thermal_matching_candidate" in meta:
        print(f"thermal closed form matching the trace: {meta['thermal_matching_candidate']}")
    return EXIT_ORACLE if failed else EXIT_OK


# --- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mqkg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override tasks.seed")
        p.add_argument("--out", default=None, help="override output.directory")
        p.add_argument("--task", default=None, help="comma-separated task subset")
        return p

    p = common(sub.add_parser("eval", help="evaluate chi for the configured state"))
    p.add_argument("--fields", action="append", default=[],
                   help="field-mode CSV (k0,k1,k2,k3,re,im); repeatable; default w = 0")
    common(sub.add_parser("scan-negativity", help="grid scan for negative prefactors"))
    common(sub.add_parser("compare-fluctuations", help="quantum vs classical hyperplane fluctuations"))
    common(sub.add_parser("oracles", help="run the numerical oracle suites"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        run = Run(cfg, args, args.command)
        if args.command == "eval":
            return cmd_eval(run, args.fields)
        if args.command == "scan-negativity":
            return cmd_scan_negativity(run)
        if args.command == "compare-fluctuations":
            return cmd_compare_fluctuations(run)
        return cmd_oracles(run)
    except ConfigError as exc:
        print(f"mqkg: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"mqkg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
