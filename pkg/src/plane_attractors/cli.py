"""Command-line interface: ``plane-attractors <command> [options]``.

Exit codes: 0 success (or consistent verdict), 1 theorem hypothesis unmet or
inconclusive evidence, 2 usage or configuration error, 3 numeric failure
(non-convergence, escape, lost block), 4 dichotomy violation.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from typing import Optional

from . import __version__
from .config import ConfigError, load, parse_continuation, parse_hopf, parse_ifs
from .errors import AttractorError
from .grid import Disk, downsample, new_grid
from .pgm import read_pgm, write_pgm

EXIT_OK, EXIT_UNMET, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VIOLATION = 0, 1, 2, 3, 4


class _Run:
    """Collects artifacts for one command and writes the manifest."""

    def __init__(self, out: str, command: str):
        self.out = out
        self.command = command
        self.files = []
        os.makedirs(out, exist_ok=True)

    def _path(self, name):
        return os.path.join(self.out, name)

    def _record(self, name):
        with open(self._path(name), "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        self.files.append({"path": name, "sha256": digest})

    def pgm(self, name, g):
        write_pgm(g, self._path(name))
        self._record(name)

    def json(self, name, obj):
        _atomic_write(self._path(name), _dumps(obj))
        self._record(name)

    def finish(self, status: int, summary: Optional[dict] = None) -> int:
        manifest = {"command": self.command, "exit_status": status,
                    "artifacts": self.files, "summary": summary or {}}
        _atomic_write(self._path("manifest.json"), _dumps(manifest))
        print(json.dumps({"manifest": self._path("manifest.json"), "exit_status": status}))
        return status


def _dumps(obj) -> bytes:
    return (json.dumps(obj, indent=2, default=_jsonable) + "\n").encode()


def _jsonable(v):
    if hasattr(v, "item"):
        return v.item()
    if hasattr(v, "to_dict"):
        return v.to_dict()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _atomic_write(path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _floats(text: str, flag: str):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {text!r}", key=flag) from None
    return vals


def _ifs_source(args):
    """``(system, bounds, seed_region, resolution, tol)`` from --builtin or --config."""
    from .ifs import BUILTIN_FRAMES, builtin_ifs

    if bool(args.builtin) == bool(args.config):
        raise ConfigError("give exactly one of --builtin or --config", key="--builtin")
    if args.builtin:
        try:
            F = builtin_ifs(args.builtin)
        except KeyError:
            raise ConfigError(f"unknown built-in {args.builtin!r} (choose from "
                              f"{', '.join(BUILTIN_FRAMES)})", key="--builtin") from None
        bounds, seed = BUILTIN_FRAMES[args.builtin]
        return F, bounds, seed, args.res or 1024.0, args.tol
    cfg = parse_ifs(load(args.config), os.path.dirname(os.path.abspath(args.config)))
    if cfg.bounds is None:
        raise ConfigError("IFS config needs 'bounds' for rendering", key="bounds")
    return cfg.system, cfg.bounds, cfg.seed_region, args.res or cfg.resolution or 512.0, \
        args.tol if args.tol is not None else cfg.tol


def cmd_render_ifs(args) -> int:
    from .ifs import annotate, attractor_chaos_game, render_attractor
    from .hyperspace import hausdorff_distance
    from .raster import map_image

    F, bounds, seed, res, tol = _ifs_source(args)
    F.require_contractive()
    rep = annotate(render_attractor(F, bounds, res, seed, tol))
    run = _Run(args.out, "render-ifs")
    run.pgm("attractor.pgm", rep.attractor)
    for i, m in enumerate(F.maps, 1):
        run.pgm(f"map_{i}.pgm", map_image(rep.attractor, m))
    report = {"system": F.name, "maps": [m.to_dict() for m in F.maps], "bounds": list(bounds),
              "resolution": res, "tol": tol if tol is not None else 2.0 / res}
    report.update(rep.to_dict())
    if args.chaos_points:
        cg = attractor_chaos_game(F, args.chaos_points, 100, args.seed, rep.attractor.empty_like())
        run.pgm("chaos_game.pgm", cg)
        report["chaos_game"] = {"points": args.chaos_points, "rng_seed": args.seed,
                                "hausdorff_to_deterministic": hausdorff_distance(cg, rep.attractor)}
    run.json("trace.json", report)
    return run.finish(EXIT_OK, {"iterations": rep.iterations, "converged": rep.trace.converged})


def cmd_classify(args) -> int:
    from .shape import (CONSISTENT, HYPOTHESIS_UNMET, INCONCLUSIVE, VIOLATION, cech_h1_rank,
                        check_theorem_41, classify_grids, Verdict)
    from .grid import interior_nonempty

    run_out = {}
    if args.input:
        if args.builtin or args.config:
            raise ConfigError("--input excludes --builtin and --config", key="--input")
        try:
            g = read_pgm(args.input)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read {args.input}: {exc}", key="--input") from None
        factors = [f for f in (4, 2, 1) if g.shape[0] % f == 0 and g.shape[1] % f == 0]
        if len(factors) < 3:
            raise ConfigError("input image sides must be divisible by 4", key="--input")
        shape = classify_grids([downsample(g, f) for f in factors])
        run_out = {"source": os.path.basename(args.input), "shape": shape.to_dict(),
                   "interior_nonempty": interior_nonempty(g, 4 * g.pixel)}
        if shape.verdict is not Verdict.INCONCLUSIVE:
            run_out["h1_rank"] = cech_h1_rank(shape).to_dict()
        status = EXIT_OK if shape.verdict is not Verdict.INCONCLUSIVE else EXIT_UNMET
        run = _Run(args.out, "classify")
        run.json("classification.json", run_out)
        return run.finish(status, {"verdict": str(shape)})
    F, bounds, seed, res, tol = _ifs_source(args)
    resolutions = [res / 4, res / 2, res]
    rep = check_theorem_41(F, resolutions, bounds, seed, tol)
    run = _Run(args.out, "classify")
    out = {"system": F.name, "bounds": list(bounds)}
    out.update(rep.to_dict())
    run.json("classification.json", out)
    run.pgm("attractor.pgm", rep.renders[res])
    status = {CONSISTENT: EXIT_OK, HYPOTHESIS_UNMET: EXIT_UNMET, INCONCLUSIVE: EXIT_UNMET,
              VIOLATION: EXIT_VIOLATION}[rep.status]
    return run.finish(status, {"verdict": str(rep.shape) if rep.shape else None,
                               "status": rep.status})


def cmd_hopf_scan(args) -> int:
    from .homeo import BUILTIN_FAMILIES, OK, hopf_scan, robustness_check
    from .config import HopfConfig

    cfg = parse_hopf(load(args.config)) if args.config else HopfConfig()
    if args.family:
        if args.family not in BUILTIN_FAMILIES:
            raise ConfigError(f"unknown family {args.family!r}", key="--family")
        cfg.family = args.family
    if args.lambdas is not None:
        cfg.lambdas = _floats(args.lambdas, "--lambdas")
    if not cfg.lambdas:
        raise ConfigError("need at least one parameter value", key="--lambdas")
    if sorted(cfg.lambdas) != cfg.lambdas:
        raise ConfigError("parameter values must be ascending", key="--lambdas")
    if args.res:
        cfg.resolution = args.res
    if args.tol is not None:
        cfg.tol = args.tol
    if args.perturb is not None:
        cfg.perturb = _floats(args.perturb, "--perturb")
    lo = min(cfg.lambdas + [0.0])
    family = BUILTIN_FAMILIES[cfg.family](lam_range=(lo, max(cfg.lambdas + [0.0])), **cfg.params)
    D = new_grid(cfg.bounds, cfg.resolution, Disk(0.0, 0.0, cfg.disk_radius))
    report = hopf_scan(family, cfg.lambdas, D, cfg.tol)
    run = _Run(args.out, "hopf-scan")
    for e in report.entries:
        for tag, g in (("A", e.A), ("R", e.R), ("K", e.K)):
            if g is not None:
                run.pgm(f"{tag}_lambda_{e.lam:g}.pgm", g)
    if cfg.perturb:
        positive = [lam for lam in cfg.lambdas if lam > 0]
        if not positive:
            raise ConfigError("robustness needs a positive parameter value", key="--perturb")
        base = 0.09 if 0.09 in positive else positive[-1]
        report.robustness = robustness_check(family, base, cfg.perturb, D, cfg.tol)
        for e in report.robustness.entries:
            if e.K is not None:
                run.pgm(f"K_lambda_{base:g}_perturb_{e.amplitude:g}.pgm", e.K)
    body = {"family": cfg.family, "params": family.params, "bounds": list(cfg.bounds),
            "resolution": cfg.resolution, "disk_radius": cfg.disk_radius}
    body.update(report.to_dict())
    run.json("hopf_report.json", body)
    failed = [e.lam for e in report.entries if e.status not in (OK, "pre-bifurcation") or e.error]
    return run.finish(EXIT_NUMERIC if failed else EXIT_OK, {"failed_lambdas": failed})


def cmd_conley_continue(args) -> int:
    from .conley import BLOCK_LOST, continuation

    if not args.config:
        raise ConfigError("conley-continue needs --config", key="--config")
    cfg = parse_continuation(load(args.config), os.path.dirname(os.path.abspath(args.config)))
    if args.lambdas is not None:
        cfg.lambdas = _floats(args.lambdas, "--lambdas")
        if not cfg.lambdas or sorted(cfg.lambdas) != cfg.lambdas:
            raise ConfigError("need ascending parameter values", key="--lambdas")
    if args.tol is not None:
        cfg.tol = args.tol
    Q = cfg.block_grid()
    report = continuation(cfg.family, Q, cfg.lambdas, cfg.tol, cfg.eps, cfg.margin,
                          base_lambda=cfg.base_lambda, contractive=cfg.contractive)
    run = _Run(args.out, "conley-continue")
    run.pgm("block.pgm", Q)
    for e in report.entries:
        if e.attractor is not None:
            run.pgm(f"K_lambda_{e.lam:g}.pgm", e.attractor)
    run.json("continuation.json", report.to_dict())
    status = EXIT_OK if report.base_verified else EXIT_NUMERIC
    summary = {"base_verified": report.base_verified, "block_lost_at": report.range_end,
               "all_contained": report.all_contained}
    if not report.base_verified:
        print(f"{BLOCK_LOST} at lambda={report.range_end:g}", file=sys.stderr)
    return run.finish(status, summary)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plane-attractors",
                                description="Attractors of plane IFS and homeomorphisms, with shape checks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, ifs=True):
        if ifs:
            sp.add_argument("--builtin", help="built-in system: example41, example41-first3, "
                                              "example41-last3, koch")
        sp.add_argument("--config", help="JSON configuration document")
        sp.add_argument("--res", type=float, help="resolution in pixels per unit length")
        sp.add_argument("--tol", type=float, help="convergence tolerance in physical units "
                                                  "(default two pixel widths)")
        sp.add_argument("--out", default="out", help="output directory (created if missing)")
        sp.add_argument("--seed", type=int, default=0, help="random seed for stochastic steps")

    sp = sub.add_parser("render-ifs", help="render an IFS attractor and its map images")
    common(sp)
    sp.add_argument("--chaos-points", type=int, default=0,
                    help="also run the chaos game with this many points")
    sp.set_defaults(func=cmd_render_ifs)

    sp = sub.add_parser("classify", help="shape verdict and empty-interior dichotomy check")
    common(sp)
    sp.add_argument("--input", help="classify a PGM image instead of an IFS")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("hopf-scan", help="annular attractors across the Hopf parameter")
    common(sp, ifs=False)
    sp.add_argument("--family", help="built-in map family (neimark-sacker)")
    sp.add_argument("--lambdas", help="comma-separated ascending parameter values")
    sp.add_argument("--perturb", help="comma-separated perturbation amplitudes for the robustness check")
    sp.set_defaults(func=cmd_hopf_scan)

    sp = sub.add_parser("conley-continue", help="continue a Conley attractor through a fixed block")
    common(sp, ifs=False)
    sp.add_argument("--lambdas", help="comma-separated ascending parameter values (overrides config)")
    sp.set_defaults(func=cmd_conley_continue)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.res is not None and not args.res > 0:
        parser.error("--res must be positive")
    if args.tol is not None and not args.tol > 0:
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AttractorError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
