"""Command-line front end: ``python -m recipmod <command> [flags]``.

Exit status is 0 when every check passes, 1 when a hard assertion fails and
2 for usage or configuration errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import zoo
from .analysis import ring_modulus
from .meshio import MeshFormatError, read_mesh, write_mesh
from .modulus import certify, is_infinite, solve_modulus
from .potential import build_potential, level_csv, level_set, potential_csv
from .runner import (Case, ConfigError, ExperimentConfig, SuiteOutput, coarea_suite, fmt,
                     read_config, reciprocality_suite, run, write_csv)
from .surface import FamilySpec, nearest_vertex

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _csv_ints(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _csv_floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key-value experiment configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=_u64)
    common.add_argument("--eps-adm", type=float)
    common.add_argument("--eps-gap", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--levels", type=int)
    common.add_argument("--resolutions", type=_csv_ints)
    common.add_argument("--surface", help="zoo surface or builder name")
    common.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="builder parameter (repeatable)")
    common.add_argument("--mesh", help="mesh file to use instead of a built surface")

    p = argparse.ArgumentParser(prog="recipmod", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="write mesh files")
    m = sub.add_parser("modulus", parents=[common], help="solve both conjugate families")
    m.add_argument("--family", choices=("gamma1", "gamma2", "both"), default="both")
    sub.add_parser("potential", parents=[common], help="per-vertex potential CSV")
    sub.add_parser("levelsets", parents=[common], help="level curves of the potential")
    sub.add_parser("coarea", parents=[common], help="coarea checks")
    r = sub.add_parser("ring", parents=[common], help="ring moduli at one center")
    r.add_argument("--center", type=_csv_floats, help="reference point x,y (default: centroid)")
    r.add_argument("--radii", type=_csv_floats, required=True, help="inner radii r1,r2,...")
    r.add_argument("--outer", type=float, required=True, help="outer radius R")
    sub.add_parser("reciprocality", parents=[common], help="product bounds and proof chain")
    sub.add_parser("suite", parents=[common], help="every configured suite")
    return p


def _config(args) -> ExperimentConfig:
    cfg = read_config(args.config) if args.config else ExperimentConfig()
    kw = {}
    if args.surface:
        names = tuple(s.strip() for s in args.surface.split(",") if s.strip())
        if len(names) == 1 and names[0] in zoo.BUILDERS:
            kw.update(builder=names[0], surfaces=())
        else:
            kw.update(builder=None, surfaces=names, params={})
    if args.param:
        params = dict(cfg.params)
        for item in args.param:
            if "=" not in item:
                raise ConfigError(f"--param {item!r}: expected KEY=VALUE")
            k, v = item.split("=", 1)
            try:
                params[k.strip()] = float(v)
            except ValueError:
                params[k.strip()] = v.strip()
        kw["params"] = params
    for name in ("seed", "eps_adm", "eps_gap", "max_iter", "levels", "resolutions", "out"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = v
    return replace(cfg, **kw) if kw else cfg


def _cases(cfg: ExperimentConfig, args):
    if args.mesh:
        try:
            mesh, frame = read_mesh(args.mesh)
        except OSError as exc:
            raise ConfigError(f"{args.mesh}: {exc.strerror}") from None
        yield Case(Path(args.mesh).stem, 0, mesh, frame, cfg.options)
        return
    for name in cfg.surface_names():
        for n in cfg.resolutions:
            mesh, frame = cfg.build(name, n)
            yield Case(name, n, mesh, frame, cfg.options)


def _out(cfg: ExperimentConfig) -> Path:
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_build(cfg, args) -> int:
    out = _out(cfg)
    for case in _cases(cfg, args):
        path = out / f"{case.name}_n{case.n}.json"
        write_mesh(path, case.mesh, case.frame)
        print(f"{path}: {case.mesh.n_vertices} vertices, {case.mesh.n_edges} edges, "
              f"{case.mesh.n_faces} faces")
    return EXIT_OK


def cmd_modulus(cfg, args) -> int:
    out = _out(cfg)
    status = EXIT_OK
    fams = ("gamma1", "gamma2") if args.family == "both" else (args.family,)
    for case in _cases(cfg, args):
        for fam_name in fams:
            fam = getattr(FamilySpec, fam_name)(case.frame)
            res = solve_modulus(case.mesh, fam, cfg.options)
            cert = certify(res, case.mesh, fam, cfg.options)
            (out / f"{case.name}_n{case.n}_{fam_name}.json").write_text(res.to_json() + "\n")
            ok = res.certified and cert.passed
            print(f"{case.name} n={case.n} {fam_name}: {fmt(res.value)} gap={fmt(res.gap)} "
                  f"iterations={res.iterations} certified={'yes' if ok else 'no'}")
            if not ok:
                status = EXIT_FAIL
    return status


def cmd_potential(cfg, args) -> int:
    out = _out(cfg)
    status = EXIT_OK
    for case in _cases(cfg, args):
        res = case.result(1)
        if is_infinite(res.value):
            print(f"{case.name} n={case.n}: first family has infinite modulus; no potential")
            continue
        field = build_potential(case.mesh, case.frame, res.density)
        (out / f"{case.name}_n{case.n}_potential.csv").write_text(potential_csv(case.mesh, field))
        bad = len(field.upper_gradient_violations(case.mesh))
        print(f"{case.name} n={case.n}: upper-gradient violations {bad}")
        if bad:
            status = EXIT_FAIL
    return status


def cmd_levelsets(cfg, args) -> int:
    out = _out(cfg)
    count = args.levels if args.levels is not None else 9
    for case in _cases(cfg, args):
        res = case.result(1)
        if is_infinite(res.value):
            continue
        field = build_potential(case.mesh, case.frame, res.density)
        parts = []
        for k in range(1, count + 1):
            curve = level_set(case.mesh, case.frame, field, k / (count + 1))
            text = level_csv(case.mesh, field, curve)
            parts.append(text if not parts else text.split("\n", 1)[1])
            print(f"{case.name} n={case.n} t={fmt(curve.level)}: {len(curve.components)} component(s), "
                  f"arcs {list(curve.arcs_met)}, length {fmt(curve.length)}")
        (out / f"{case.name}_n{case.n}_levels.csv").write_text("".join(parts))
    return EXIT_OK


def _suite_cmd(fn, name):
    def cmd(cfg, args) -> int:
        out = _out(cfg)
        result = SuiteOutput()
        for case in _cases(cfg, args):
            fn(case, result, cfg.seed, cfg.levels)
        write_csv(out / f"{name}.csv", result.rows)
        failed = [r for r in result.rows if r[-1] is not True]
        print(f"{name}: {len(result.rows) - len(failed)}/{len(result.rows)} rows pass")
        for msg in result.hard_failures:
            print(f"hard failure: {msg}")
        return EXIT_FAIL if result.hard_failures else EXIT_OK
    return cmd


def cmd_ring(cfg, args) -> int:
    out = _out(cfg)
    rows = []
    for case in _cases(cfg, args):
        xy = args.center if args.center else case.mesh.points.mean(axis=0)
        if len(xy) != 2:
            raise ConfigError("--center: expected x,y")
        x = nearest_vertex(case.mesh, xy)
        for r in args.radii:
            res = ring_modulus(case.mesh, x, r, args.outer, cfg.options)
            planar = 2 * math.pi / math.log(args.outer / r)
            rows.append((case.name, case.n, f"ring_r{r:g}_R{args.outer:g}", res.value, planar,
                         x, res.certified))
            print(f"{case.name} n={case.n} r={r:g} R={args.outer:g}: {fmt(res.value)} "
                  f"(planar {fmt(planar)})")
    write_csv(out / "ring.csv", rows)
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_FAIL


def cmd_suite(cfg, args) -> int:
    status, written = run(cfg)
    for p in written:
        print(p)
    return status


COMMANDS = {
    "build": cmd_build,
    "modulus": cmd_modulus,
    "potential": cmd_potential,
    "levelsets": cmd_levelsets,
    "coarea": _suite_cmd(coarea_suite, "coarea"),
    "ring": cmd_ring,
    "reciprocality": _suite_cmd(reciprocality_suite, "reciprocality"),
    "suite": cmd_suite,
}


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, MeshFormatError, zoo.UnknownBuilder, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"recipmod {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
