"""Experiment configuration, suites and report files.

Every suite returns CSV rows ``surface, n, quantity, lhs, rhs, constant,
pass`` together with the hard failures it found. Hard failures are a
violated product lower bound, an inexact upper-gradient inequality, and a
failed modulus certificate.
"""
from __future__ import annotations

import csv
import io
import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import zoo
from .analysis import (INDETERMINATE, KAPPAS, arc_diameter, coarea_check, coarea_u_check,
                       mesh_tolerance, modulus_product, oscillation_check,
                       random_lipschitz_field, reciprocality_report)
from .modulus import ModulusOptions, ModulusResult, certify, is_infinite, solve_modulus
from .potential import build_potential, level_set, max_principle_check, random_region
from .surface import FamilySpec, MetricMesh, QuadFrame, nearest_vertex

SUITES = ("modulus", "potential", "coarea", "reciprocality")
HEADER = ("surface", "n", "quantity", "lhs", "rhs", "constant", "pass")


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """12 significant digits; the infinite sentinel and non-numbers as words."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if is_infinite(x):
        return "inf"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


@dataclass(frozen=True)
class ExperimentConfig:
    surfaces: tuple = ("square",)
    builder: str | None = None
    params: dict = field(default_factory=dict)
    resolutions: tuple = (16, 32)
    suites: tuple = SUITES
    eps_adm: float = 1e-6
    eps_gap: float = 1e-6
    max_iter: int | None = None
    levels: int = 64
    seed: int = 0
    out: str = "reports"

    def __post_init__(self):
        res = tuple(self.resolutions)
        if not res:
            raise ConfigError("resolutions: at least one value required")
        if any(b <= a for a, b in zip(res, res[1:])):
            raise ConfigError("resolutions: values must be strictly increasing")
        if any(n < 2 for n in res):
            raise ConfigError("resolutions: values must be at least 2")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"suites: unknown {', '.join(bad)}; available: {', '.join(SUITES)}")
        for name in ("eps_adm", "eps_gap"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigError(f"{name}: must lie in (0, 1)")
        if self.levels < 2:
            raise ConfigError("levels: need at least 2")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError("seed: must be an unsigned 64-bit integer")
        if self.builder is None:
            for s in self.surfaces:
                if s not in zoo.ZOO:
                    raise ConfigError(f"surface: unknown {s!r}; zoo surfaces: {', '.join(zoo.ZOO)}; "
                                      f"builders: {', '.join(sorted(zoo.BUILDERS))}")
        elif self.builder not in zoo.BUILDERS:
            raise ConfigError(f"unknown builder {self.builder!r}; available: {', '.join(sorted(zoo.BUILDERS))}")
        else:
            extra = set(self.params) - set(zoo.BUILDERS[self.builder][1])
            if extra:
                raise ConfigError(f"unknown parameters for {self.builder}: {', '.join(sorted(extra))}")

    @property
    def options(self) -> ModulusOptions:
        return ModulusOptions(eps_adm=self.eps_adm, eps_gap=self.eps_gap, max_iter=self.max_iter)

    def surface_names(self) -> tuple:
        return (self.builder,) if self.builder else tuple(self.surfaces)

    def build(self, name: str, n: int):
        if self.builder:
            return zoo.build(self.builder, n, **self.params)
        return zoo.zoo_surface(name, n)


def _split(value: str) -> list:
    return [v.strip() for v in value.split(",") if v.strip()]


def _value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Known keys: surface, resolutions, suites, eps_adm, eps_gap, max_iter,
    levels, seed, out. With ``surface`` naming a builder rather than a zoo
    surface, every other key is a builder parameter.
    """
    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
        lines[key] = lineno
    kw = {}
    try:
        for key, value in raw.items():
            where = f"line {lines[key]}"
            if key == "surface":
                names = _split(value)
                if len(names) == 1 and names[0] in zoo.BUILDERS:
                    kw["builder"] = names[0]
                else:
                    kw["surfaces"] = tuple(names)
            elif key == "resolutions":
                kw["resolutions"] = tuple(int(v) for v in _split(value))
            elif key == "suites":
                names = _split(value)
                kw["suites"] = SUITES if names == ["all"] else tuple(names)
            elif key in ("eps_adm", "eps_gap"):
                kw[key] = float(value)
            elif key in ("levels", "seed"):
                kw[key] = int(value)
            elif key == "max_iter":
                kw[key] = None if value.lower() == "none" else int(value)
            elif key == "out":
                kw[key] = value
            else:
                kw.setdefault("params", {})[key] = _value(value)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r} ({exc})") from None
    if "params" in kw and "builder" not in kw:
        key = sorted(kw["params"])[0]
        raise ConfigError(f"line {lines[key]}: unknown key {key!r}")
    return ExperimentConfig(**kw)


def read_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(text)


def write_csv(path, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    Path(path).write_text(buf.getvalue())


def rng_for(seed: int, *labels) -> np.random.Generator:
    """Generator keyed by the seed and the labels, independent of run order."""
    keys = [int(seed)] + [zlib.crc32(str(x).encode()) for x in labels]
    return np.random.default_rng(keys)


# -- suites -----------------------------------------------------------------

@dataclass
class Case:
    """One surface at one resolution, with its moduli computed once."""

    name: str
    n: int
    mesh: MetricMesh
    frame: QuadFrame
    options: ModulusOptions
    _results: dict = field(default_factory=dict)

    def result(self, k: int) -> ModulusResult:
        if k not in self._results:
            fam = FamilySpec.gamma1(self.frame) if k == 1 else FamilySpec.gamma2(self.frame)
            self._results[k] = solve_modulus(self.mesh, fam, self.options)
        return self._results[k]


@dataclass
class SuiteOutput:
    rows: list = field(default_factory=list)
    hard_failures: list = field(default_factory=list)

    def add(self, case: Case, quantity: str, lhs, rhs, constant, passed) -> None:
        # the pass column is true, false or the word "indeterminate"
        state = passed if isinstance(passed, str) else bool(passed)
        self.rows.append((case.name, case.n, quantity, lhs, rhs, constant, state))


def modulus_suite(case: Case, out: SuiteOutput, seed: int, levels: int) -> None:
    for k in (1, 2):
        res = case.result(k)
        fam = FamilySpec.gamma1(case.frame) if k == 1 else FamilySpec.gamma2(case.frame)
        cert = certify(res, case.mesh, fam, case.options)
        ok = res.certified and cert.passed
        out.add(case, f"mod_gamma{k}", res.value, res.primal_value, res.dual_value, ok)
        out.add(case, f"gap_gamma{k}", res.gap, case.options.eps_gap, res.iterations, cert.gap_ok)
        out.add(case, f"admissibility_gamma{k}", cert.min_length, 1 - case.options.eps_adm,
                len(res.active_paths), cert.admissible)
        if not ok:
            out.hard_failures.append(f"{case.name} n={case.n}: certificate failed for gamma{k}")


def potential_suite(case: Case, out: SuiteOutput, seed: int, levels: int) -> None:
    mesh, frame = case.mesh, case.frame
    res = case.result(1)
    if is_infinite(res.value):
        out.add(case, "potential", "skipped", "", "", True)
        return
    field_ = build_potential(mesh, frame, res.density)
    bad = len(field_.upper_gradient_violations(mesh))
    out.add(case, "upper_gradient_violations", bad, 0, field_.scale, bad == 0)
    if bad:
        out.hard_failures.append(f"{case.name} n={case.n}: {bad} upper-gradient violations")
    u = field_.values
    z1 = float(np.abs(u[list(frame.arc(1))]).max())
    z3 = float(u[list(frame.arc(3))].min())
    out.add(case, "u_on_zeta1", z1, 0, "", z1 == 0)
    out.add(case, "u_on_zeta3", z3, 1, "", z3 == 1)
    rng = rng_for(seed, case.name, case.n, "potential")
    fails = 0
    for _ in range(50):
        size = int(rng.integers(1, max(2, mesh.n_vertices // 8)))
        rep = max_principle_check(mesh, frame, field_, random_region(mesh, rng, size))
        fails += not rep.passed
    out.add(case, "max_principle_failures", fails, 0, 50, fails == 0)
    for k in range(1, 10):
        t = k / 10
        curve = level_set(mesh, frame, field_, t)
        spans = len(curve.spanning_components())
        out.add(case, f"level_{t:.1f}_components", len(curve.components), spans, curve.length,
                len(curve.components) == 1 and spans == 1)
    x = nearest_vertex(mesh, mesh.points.mean(axis=0))
    r0 = min(arc_diameter(mesh, frame, 1), arc_diameter(mesh, frame, 3)) / 4
    radii = [r0 * s for s in (0.25, 0.5, 0.9)]
    side = frame.arc(2)[len(frame.arc(2)) // 2]
    tol = mesh_tolerance(case.n)
    for row in oscillation_check(mesh, frame, field_, res.density, [x, side], radii, tol):
        out.add(case, f"oscillation_v{row.center}_r{row.radius:.6g}", row.radius * row.osc,
                row.rhs, 4 / math.pi, row.passed)


def coarea_suite(case: Case, out: SuiteOutput, seed: int, levels: int) -> None:
    mesh, frame = case.mesh, case.frame
    rng = rng_for(seed, case.name, case.n, "coarea")
    tol = mesh_tolerance(case.n)
    for k in range(20):
        L = float(rng.uniform(0.5, 2.0))
        m = random_lipschitz_field(mesh, rng, L)
        g = rng.uniform(0.0, 1.0, mesh.n_edges)
        rep = coarea_check(mesh, m, L, g, levels, tol)
        out.add(case, f"coarea_lipschitz_{k}", rep.lhs, rep.rhs, rep.constant, rep.passed)
    res = case.result(1)
    if is_infinite(res.value):
        return
    field_ = build_potential(mesh, frame, res.density)
    rho = field_.scale * res.density
    for label, g in (("one", np.ones(mesh.n_edges)), ("right_half", (mesh.points[mesh.edges].mean(axis=1)[:, 0]
                                                                  > np.median(mesh.points[:, 0])).astype(float))):
        rep = coarea_u_check(mesh, frame, field_, rho, g, levels, tol)
        slack = rep.rhs / rep.lhs if rep.lhs > 0 else math.inf
        out.add(case, f"coarea_u_{label}", rep.lhs, rep.rhs, rep.constant, rep.passed and slack >= 100)
        out.add(case, f"coarea_u_{label}_empirical_constant", rep.empirical_constant, 4 / math.pi,
                slack, rep.empirical_constant <= 4 / math.pi * 1.1)


def reciprocality_suite(case: Case, out: SuiteOutput, seed: int, levels: int,
                        summary: dict | None = None) -> None:
    rep = reciprocality_report(case.mesh, case.frame, case.options, levels=levels,
                               tol=mesh_tolerance(case.n), results=(case.result(1), case.result(2)))
    out.add(case, "product", rep.product, 1.0, "", True)
    for key, kappa in KAPPAS.items():
        out.add(case, f"lower_{key}", rep.product, 1 / kappa, kappa, rep.lower[key] == "pass")
        out.add(case, f"upper_{key}", rep.product, kappa, kappa, rep.upper[key] == "pass")
    ring = rep.ring if rep.ring == INDETERMINATE else rep.ring == "pass"
    out.add(case, "ring_condition", rep.ring_values[1], rep.ring_values[0], "", ring)
    if rep.stronger_empirical is not None:
        out.add(case, "product_vs_pi_over_4_squared", rep.product, (math.pi / 4) ** 2, "",
                rep.stronger_empirical)
    if rep.chain is not None:
        c = rep.chain
        out.add(case, "chain_lower", c.strip_integral, 1.0, "", c.lower_ok)
        out.add(case, "chain_coarea", c.strip_integral, 8000 / math.pi * c.pairing, 8000 / math.pi, c.coarea_ok)
        out.add(case, "chain_holder", c.pairing, math.sqrt(c.energy_g * c.energy_rho), "", c.holder_ok)
        out.add(case, "chain_implied_bound", rep.product, c.implied_bound, c.empirical_constant, c.implied_ok)
    if not rep.lower_bound_holds:
        out.hard_failures.append(f"{case.name} n={case.n}: product below 1/kappa")
    if summary is not None:
        summary.update({
            "mod_gamma1": fmt(rep.mod_gamma1), "mod_gamma2": fmt(rep.mod_gamma2),
            "product": fmt(rep.product), "lower": rep.lower, "upper": rep.upper, "ring": rep.ring,
        })


SUITE_FUNCS = {
    "modulus": modulus_suite,
    "potential": potential_suite,
    "coarea": coarea_suite,
}


def run(config: ExperimentConfig, out_dir=None) -> tuple[int, list]:
    """Run every configured suite; returns ``(exit_status, written_paths)``."""
    out_path = Path(out_dir if out_dir is not None else config.out)
    out_path.mkdir(parents=True, exist_ok=True)
    outputs = {s: SuiteOutput() for s in config.suites}
    summary = {
        "kappas": {k: fmt(v) for k, v in KAPPAS.items()},
        "seed": config.seed,
        "resolutions": list(config.resolutions),
        "surfaces": {},
    }
    for name in config.surface_names():
        for n in config.resolutions:
            mesh, frame = config.build(name, n)
            case = Case(name, n, mesh, frame, config.options)
            entry = {}
            for suite in config.suites:
                if suite == "reciprocality":
                    reciprocality_suite(case, outputs[suite], config.seed, config.levels, entry)
                else:
                    SUITE_FUNCS[suite](case, outputs[suite], config.seed, config.levels)
            if "mod_gamma1" not in entry:
                r1, r2 = case.result(1), case.result(2)
                entry.update({"mod_gamma1": fmt(r1.value), "mod_gamma2": fmt(r2.value)})
                entry["product"] = fmt(modulus_product(r1.value, r2.value))
            summary["surfaces"].setdefault(name, {})[str(n)] = entry
    written, failures = [], []
    for suite in config.suites:
        p = out_path / f"{suite}.csv"
        write_csv(p, outputs[suite].rows)
        written.append(p)
        failures += outputs[suite].hard_failures
        summary.setdefault("suites", {})[suite] = {
            "rows": len(outputs[suite].rows),
            "passed": sum(1 for r in outputs[suite].rows if r[-1] is True),
        }
    summary["hard_failures"] = failures
    summary["status"] = "fail" if failures else "pass"
    p = out_path / "summary.json"
    p.write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    written.append(p)
    return (1 if failures else 0), written
