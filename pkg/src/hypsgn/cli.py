"""Command-line entry point.

Subcommands: run, convergence, compare-models, export-soliton,
list-scenarios. Settings come from a flat key=value config file with
bracketed section headers and/or flags; flags override file values, file
values override scenario defaults. Every resolved value is echoed into a
run manifest that can be fed back via --config to reproduce a run
bit-identically. The HYPSGN_OUTPUT_DIR environment variable sets the
default output directory.
"""

from __future__ import annotations

import argparse
import configparser
import difflib
import os
import sys
from dataclasses import dataclass, field as dfield
from pathlib import Path

from . import output as out
from . import scenarios as scn_mod
from .ader import SchemeConfig
from .scenarios import (RunOptions, builtin_scenario, compare_models,
                        convergence_study, list_scenarios, run)
from .soliton import SolitonParams, integrate_profile

_OVERRIDE_KEYS = ("nx", "ny", "degree", "c", "cfl", "t_end", "gauge_shift",
                  "inflow")
_OUTPUT_KEYS = ("dir", "snapshots", "plot_points", "gauges", "energy")
_INT_KEYS = {"nx", "ny", "degree", "plot_points"}
_BOOL_KEYS = {"gauges", "energy"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Resolved run settings: scenario, override map and output toggles."""

    scenario: str
    overrides: dict = dfield(default_factory=dict)
    output: dict = dfield(default_factory=dict)

    def resolved_scenario(self):
        scn = builtin_scenario(self.scenario)
        ov = self.overrides
        kw = {}
        if "nx" in ov:
            ncells = list(scn.ncells)
            ncells[0] = ov["nx"]
            if scn.dim == 2:
                ncells[1] = ov.get("ny", ov["nx"])
            kw["ncells"] = tuple(ncells)
        elif "ny" in ov and scn.dim == 2:
            kw["ncells"] = (scn.ncells[0], ov["ny"])
        for key, attr in (("degree", "degree"), ("c", "c"), ("cfl", "cfl"),
                          ("t_end", "t_end")):
            if key in ov:
                kw[attr] = ov[key]
        if "inflow" in ov and scn.relaxation is not None:
            kw["relaxation"] = scn_mod.RelaxationSpec(
                interior=scn.relaxation.interior, length=scn.relaxation.length,
                inflow=ov["inflow"])
        return scn.replace(**kw)


def _reject_unknown(given, allowed, where: str):
    for key in given:
        if key not in allowed:
            hint = difflib.get_close_matches(key, allowed, n=1)
            extra = f"; did you mean {hint[0]!r}?" if hint else ""
            raise ConfigError(f"unknown key {key!r} in {where} "
                              f"(allowed: {', '.join(allowed)}){extra}")


def _convert(key: str, value: str):
    if key in _INT_KEYS:
        return int(value)
    if key in _BOOL_KEYS:
        if value.lower() in ("true", "1", "yes", "on"):
            return True
        if value.lower() in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"key {key!r} expects a boolean, got {value!r}")
    if key == "snapshots":
        return tuple(float(v) for v in value.split(",") if v.strip())
    if key in ("inflow", "dir"):
        return value
    return float(value)


def parse_config(path=None, flag_overrides=None, flag_output=None,
                 scenario=None) -> RunConfig:
    """Build a RunConfig from a config file and/or flag mappings.

    Precedence: flags over file values over scenario defaults. Unknown keys
    and unknown scenarios are rejected with suggestions.
    """
    overrides, output = {}, {}
    file_scenario = None
    if path is not None:
        cp = configparser.ConfigParser()
        read = cp.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        _reject_unknown([s for s in cp.sections()], ("run", "overrides", "output"),
                        f"config {path}")
        if cp.has_section("run"):
            _reject_unknown(cp.options("run"), ("scenario",), "[run]")
            file_scenario = cp.get("run", "scenario", fallback=None)
        if cp.has_section("overrides"):
            _reject_unknown(cp.options("overrides"), _OVERRIDE_KEYS, "[overrides]")
            for key in cp.options("overrides"):
                overrides[key] = _convert(key, cp.get("overrides", key))
        if cp.has_section("output"):
            _reject_unknown(cp.options("output"), _OUTPUT_KEYS, "[output]")
            for key in cp.options("output"):
                output[key] = _convert(key, cp.get("output", key))
    if flag_overrides:
        _reject_unknown(flag_overrides, _OVERRIDE_KEYS, "flags")
        overrides.update(flag_overrides)
    if flag_output:
        _reject_unknown(flag_output, _OUTPUT_KEYS, "output flags")
        output.update(flag_output)
    name = scenario or file_scenario
    if name is None:
        raise ConfigError("no scenario given (flag --scenario or [run] scenario)")
    if name not in list_scenarios():
        hint = difflib.get_close_matches(name, list_scenarios(), n=1)
        extra = f"; did you mean {hint[0]!r}?" if hint else ""
        raise ConfigError(
            f"unknown scenario {name!r} (available: {', '.join(list_scenarios())}){extra}")
    return RunConfig(name, overrides, output)


def write_manifest(path, cfg: RunConfig, scn) -> None:
    """Echo every resolved value; feeding this file back reproduces the run."""
    cp = configparser.ConfigParser()
    cp["run"] = {"scenario": cfg.scenario}
    resolved = {
        "nx": str(scn.ncells[0]),
        "degree": str(scn.degree),
        "c": out.fmt(scn.c),
        "cfl": out.fmt(scn.cfl),
        "t_end": out.fmt(scn.t_end),
        "gauge_shift": out.fmt(cfg.overrides.get("gauge_shift", 0.0)),
    }
    if scn.dim == 2:
        resolved["ny"] = str(scn.ncells[1])
    if "inflow" in cfg.overrides:
        resolved["inflow"] = cfg.overrides["inflow"]
    cp["overrides"] = resolved
    cp["output"] = {
        "dir": str(cfg.output.get("dir", ".")),
        "snapshots": ",".join(out.fmt(t) for t in cfg.output.get("snapshots", ())),
        "plot_points": str(cfg.output.get("plot_points", 5)),
        "gauges": str(cfg.output.get("gauges", True)).lower(),
        "energy": str(cfg.output.get("energy", True)).lower(),
    }
    with open(path, "w") as f:
        cp.write(f)


def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.output.get("dir") or os.environ.get("HYPSGN_OUTPUT_DIR", "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _cmd_run(args) -> int:
    cfg = parse_config(args.config, _collect_overrides(args),
                       _collect_output(args), args.scenario)
    scn = cfg.resolved_scenario()
    outdir = _out_dir(cfg)
    snaps = cfg.output.get("snapshots", ())
    opts = RunOptions(snapshot_times=snaps)
    if args.progress:
        opts.progress = _progress_printer(scn)
    report = run(scn, opts)
    write_manifest(outdir / "manifest.ini", cfg, scn)
    if cfg.output.get("gauges", True) and report.gauges:
        out.write_gauges(outdir / "gauges.csv", report.gauges,
                         cfg.overrides.get("gauge_shift", 0.0))
    if cfg.output.get("energy", True):
        out.write_energy(outdir / "energy.csv", report.times, report.energy,
                         report.mass)
    ppc = cfg.output.get("plot_points", 5)
    model = scn_mod.make_model(scn.variant, scn.dim)
    for t, sol in report.snapshots:
        out.write_snapshot(outdir / f"snapshot_t{t:g}.csv", sol, report.field,
                           model, ppc)
    out.write_snapshot(outdir / "snapshot_final.csv", report.solution,
                       report.field, model, ppc)
    print(f"{scn.name}: {report.steps} steps to t={report.t_final:g} "
          f"in {report.wall_time:.1f}s; mass drift {report.mass_drift:.2e}")
    return 0


def _cmd_convergence(args) -> int:
    cfg = parse_config(args.config, _collect_overrides(args),
                       _collect_output(args), args.scenario or "soliton-flat")
    scn = cfg.resolved_scenario()
    meshes = [int(v) for v in args.meshes.split(",")]
    table = convergence_study(scn, args.degree if args.degree is not None
                              else scn.degree, meshes)
    outdir = _out_dir(cfg)
    write_manifest(outdir / "manifest.ini", cfg, scn)
    out.write_convergence(outdir / "convergence.csv", table)
    for row in table.rows():
        print(f"N={row['N']} Nx={row['Nx']:5d}  err(h)={row['err_h']:.3e} "
              f"err(u)={row['err_u']:.3e} err(p)={row['err_p']:.3e}  "
              f"ord(h)={row['ord_h']:.2f} ord(u)={row['ord_u']:.2f} "
              f"ord(p)={row['ord_p']:.2f}")
    return 0


def _cmd_compare(args) -> int:
    cfg = parse_config(args.config, _collect_overrides(args),
                       _collect_output(args), args.scenario or "soliton-step")
    scn = cfg.resolved_scenario()
    window = tuple(float(v) for v in args.window.split(","))
    t_end = args.t_end if args.t_end is not None else 10.0
    cmp = compare_models(scn, window=window, t_end=t_end)
    outdir = _out_dir(cfg)
    write_manifest(outdir / "manifest.ini", cfg, scn)
    out.write_comparison(outdir / "comparison.csv", cmp)
    print(f"TV_full={cmp.tv_full:.4e} TV_mild={cmp.tv_mild:.4e} "
          f"ratio={cmp.ratio:.3f}" + (" (degenerate)" if cmp.degenerate else ""))
    return 0


def _cmd_export_soliton(args) -> int:
    params = SolitonParams(H0=args.H0, A=args.A, g=args.g, c=args.c,
                           epsilon=args.epsilon)
    profile = integrate_profile(params)
    profile.export_csv(args.output, num=args.samples)
    print(f"profile amplitude {profile.amplitude:.6f}, half width "
          f"{profile.half_width:.3f}, written to {args.output}")
    return 0


def _cmd_list(args) -> int:
    for name in list_scenarios():
        print(name)
    return 0


def _collect_overrides(args) -> dict:
    ov = {}
    for key in _OVERRIDE_KEYS:
        attr = key if key != "t_end" else "t_end"
        val = getattr(args, attr, None)
        if val is not None:
            ov[key] = val
    return ov


def _collect_output(args) -> dict:
    o = {}
    if getattr(args, "output_dir", None) is not None:
        o["dir"] = args.output_dir
    if getattr(args, "snapshot_times", None):
        o["snapshots"] = tuple(float(v) for v in args.snapshot_times.split(","))
    if getattr(args, "plot_points", None) is not None:
        o["plot_points"] = args.plot_points
    if getattr(args, "no_gauges", False):
        o["gauges"] = False
    if getattr(args, "no_energy", False):
        o["energy"] = False
    return o


def _progress_printer(scn):
    def cb(step, t, t_end):
        if step % 500 == 0:
            print(f"  step {step}: t = {t:.3f} / {t_end:g}", flush=True)
    return cb


def _add_common(p):
    p.add_argument("--scenario")
    p.add_argument("--config")
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--degree", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--gauge-shift", dest="gauge_shift", type=float)
    p.add_argument("--inflow", help="inflow gauge CSV for the wavemaker")
    p.add_argument("--output-dir")
    p.add_argument("--plot-points", dest="plot_points", type=int)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hypsgn",
        description="Hyperbolic Serre-Green-Naghdi solver benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a benchmark scenario")
    _add_common(p)
    p.add_argument("--snapshot-times", help="comma-separated snapshot times")
    p.add_argument("--no-gauges", action="store_true")
    p.add_argument("--no-energy", action="store_true")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("convergence", help="mesh-refinement error table")
    _add_common(p)
    p.add_argument("--meshes", required=True, help="comma-separated cell counts")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("compare-models", help="full vs mild-bottom comparison")
    _add_common(p)
    p.add_argument("--window", default="-1,1")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("export-soliton", help="write the traveling-wave profile")
    p.add_argument("--H0", type=float, default=1.0)
    p.add_argument("--A", type=float, default=0.2)
    p.add_argument("--g", type=float, default=9.81)
    p.add_argument("--c", type=float, default=20.0)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--output", default="soliton_profile.csv")
    p.set_defaults(func=_cmd_export_soliton)

    p = sub.add_parser("list-scenarios", help="list built-in scenarios")
    p.set_defaults(func=_cmd_list)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
