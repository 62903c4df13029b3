"""Batch scenario runner.

Usage:
    folioid run <config.json> [--out report.json] [--seed N] [--samples N]
    folioid list-checks
    folioid describe-family <name>

A config names a builtin family, its parameters, numeric overrides and an
ordered pipeline of checks.  Reports are deterministic given the seed:
every check draws from its own PCG64 generator seeded by
SeedSequence([seed, check_index]).  Exit code 0 means every check passed,
1 means a check failed, 2 means the config did not validate.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
import numpy as np

from . import dirac as dr
from . import fingroupoid as fin
from . import leafspace as ls
from . import liegroupoid as lg
from . import multdist as md
from .errors import HypothesisViolation
from .params import DEFAULT_PARAMS, NumericParams
from .report import CheckReport
from .scenarios import FAMILIES, FAMILY_DESCRIPTIONS, Scenario, build_scenario

SCHEMA_VERSION = 1

NUMERIC_KEYS = {
    "h_fd", "rk4_steps_per_unit", "tol_rank", "tol_member", "tol_leaf",
    "tol_axiom", "tol_comp", "tol_tangent_comp", "tol_cot", "tol_jac",
    "tol_desc", "tol_target", "tol_fi", "tol_lift", "tol_dirac", "tol_lag",
    "tol_jac_poisson", "flow_time",
}


class ConfigError(Exception):
    pass


@dataclass
class ScenarioConfig:
    family: str
    params: dict
    numeric: NumericParams
    samples: int
    seed: int
    pipeline: list

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        family = data.get("family")
        if family not in FAMILIES:
            raise ConfigError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
        params = data.get("params", {})
        numeric_in = dict(data.get("numeric", {}))
        samples = int(numeric_in.pop("samples", 50))
        seed = int(numeric_in.pop("seed", 0))
        unknown = set(numeric_in) - NUMERIC_KEYS
        if unknown:
            raise ConfigError(f"unknown numeric keys: {sorted(unknown)}")
        for key, value in numeric_in.items():
            if key == "rk4_steps_per_unit":
                if int(value) < 1:
                    raise ConfigError("rk4_steps_per_unit must be >= 1")
            elif not float(value) > 0:
                raise ConfigError(f"numeric parameter {key} must be positive")
        if samples < 1:
            raise ConfigError("samples must be >= 1")
        numeric = DEFAULT_PARAMS.override(
            **{k: (int(v) if k == "rk4_steps_per_unit" else float(v))
               for k, v in numeric_in.items()})
        pipeline = data.get("pipeline")
        if not isinstance(pipeline, list) or not pipeline:
            raise ConfigError("pipeline must be a non-empty list of check names")
        for name in pipeline:
            if name not in CHECKS:
                raise ConfigError(f"unknown check {name!r}; see `folioid list-checks`")
        return cls(family, params, numeric, samples, seed, pipeline)

    def echo(self) -> dict:
        numeric = {k: getattr(self.numeric, k) for k in sorted(NUMERIC_KEYS)}
        numeric["samples"] = self.samples
        numeric["seed"] = self.seed
        return {"family": self.family, "params": self.params,
                "numeric": numeric, "pipeline": list(self.pipeline)}


# ---------------------------------------------------------------------------
# check registry: name -> (runner, one-line description)

def _need(scenario: Scenario, attr: str, check: str):
    value = getattr(scenario, attr)
    if value is None:
        raise ConfigError(f"check {check} needs a scenario with {attr}")
    return value


def _points(scenario: Scenario, n: int, rng) -> list:
    gd = _need(scenario, "groupoid", "sampling")
    return [gd.sample_arrow(rng) for _ in range(n)]


def _run_validate_groupoid(s: Scenario, cfg: ScenarioConfig, rng) -> CheckReport:
    if s.finite is not None:
        report = fin.validate_groupoid(s.finite.groupoid)
        return CheckReport("validate_groupoid", report.valid,
                           0.0 if report.valid else 1.0,
                           witness=[v.to_json() for v in report.violations[:3]] or None,
                           details={"arrows": len(s.finite.groupoid.arrows)})
    return lg.validate_smooth_groupoid(s.groupoid, cfg.samples, rng, cfg.numeric)


def _run_validate_nss(s: Scenario, cfg: ScenarioConfig, rng) -> CheckReport:
    inst = _need(s, "finite", "validate_nss")
    report = fin.validate_nss(inst.groupoid, inst.nss)
    return CheckReport("validate_nss", report.valid, 0.0 if report.valid else 1.0,
                       witness=[v.to_json() for v in report.violations[:3]] or None)


def _run_quotient_normal(s: Scenario, cfg: ScenarioConfig, rng) -> CheckReport:
    inst = _need(s, "finite", "quotient_by_normal_subgroupoid")
    q = fin.quotient_by_normal_subgroupoid(inst.groupoid, inst.normal)
    return CheckReport("quotient_by_normal_subgroupoid", True, 0.0,
                       details={"objects": len(q.objects), "arrows": len(q.arrows)})


def _run_quotient_nss(s: Scenario, cfg: ScenarioConfig, rng) -> CheckReport:
    inst = _need(s, "finite", "quotient_by_nss")
    q_n = fin.quotient_by_normal_subgroupoid(inst.groupoid, inst.normal)
    q_s, _ = fin.quotient_by_nss(inst.groupoid, inst.nss)
    isomorphic = fin.find_isomorphism(q_n, q_s) is not None
    expected = inst.expected_duality == "isomorphic"
    return CheckReport("quotient_by_nss", isomorphic == expected, 0.0,
                       details={"objects": len(q_s.objects), "arrows": len(q_s.arrows),
                                "agrees_with_normal_quotient": isomorphic})


def _run_check_multiplicative(s, cfg, rng):
    return md.check_multiplicative(s.groupoid, _need(s, "dist", "check_multiplicative"),
                                   cfg.samples, rng, cfg.numeric)


def _run_check_rank_structure(s, cfg, rng):
    return md.check_rank_structure(s.groupoid, s.dist, cfg.samples, rng, cfg.numeric)


def _run_check_ts_surjectivity(s, cfg, rng):
    return md.check_ts_surjectivity(s.groupoid, s.dist, cfg.samples, rng, cfg.numeric)


def _run_check_involutive(s, cfg, rng):
    return md.check_involutive(s.dist, _points(s, cfg.samples, rng), cfg.numeric)


def _run_lift_section(s, cfg, rng):
    gd, dist = s.groupoid, _need(s, "dist", "lift_section")
    points = _points(s, max(5, cfg.samples // 4), rng)
    worst = 0.0
    for base_field in s.base_fields:
        for mode in ("s", "t"):
            section = md.lift_section(gd, dist, base_field, mode, cfg.numeric,
                                      complete=s.complete)
            worst = max(worst, md.descent_residual(gd, section, points))
            for g in points[:3]:
                vec = section.x_field(g)
                worst = max(worst, float(
                    np.linalg.norm(vec - dist.fiber_basis(g) @ (dist.fiber_basis(g).T @ vec))))
    passed = worst <= cfg.numeric.tol_desc
    return CheckReport("lift_section", passed, worst,
                       details={"fields": len(s.base_fields)})


def _run_spot_check_completeness(s, cfg, rng):
    points = _points(s, 5, rng)
    sections = [md.lift_section(s.groupoid, s.dist, f, "t", cfg.numeric, complete=True)
                for f in s.base_fields]
    fields = [sec.x_field for sec in sections]
    report = md.spot_check_completeness(fields, points, cfg.numeric.flow_time, cfg.numeric)
    report.details["declared_complete"] = s.complete
    return report


def _run_check_leaf_chart(s, cfg, rng):
    return ls.check_leaf_chart(s.groupoid, s.dist, _need(s, "chart", "check_leaf_chart"),
                               cfg.samples, rng, cfg.numeric)


def _run_transport(s, cfg, rng):
    gd, dist, chart = s.groupoid, s.dist, _need(s, "chart", "transport_to_target")
    worst = 0.0
    for _ in range(max(5, cfg.samples // 4)):
        g = gd.sample_arrow(rng)
        target = ls.random_leaf_point(gd, dist, gd.unit(gd.tgt(g)), rng, cfg.numeric,
                                      hops=2)
        p = gd.tgt(target)
        h = ls.transport_to_target(gd, dist, chart, g, p, cfg.numeric)
        worst = max(worst,
                    float(np.max(np.abs(gd.tgt(h) - p))),
                    float(np.max(np.abs(chart.lambda_g(h) - chart.lambda_g(g)))))
    return CheckReport("transport_to_target", worst <= cfg.numeric.tol_target, worst)


def _run_check_condition6(s, cfg, rng):
    return ls.check_condition6(s.groupoid, s.dist, _need(s, "chart", "check_condition6"),
                               cfg.samples, rng, cfg.numeric)


def _run_validate_quotient(s, cfg, rng):
    return ls.validate_quotient_groupoid(s.groupoid, s.dist, s.chart,
                                         cfg.samples, rng, cfg.numeric)


def _run_check_lifted_structures(s, cfg, rng):
    return ls.check_lifted_structures(s.groupoid, s.dist, s.chart,
                                      _need(s, "quotient", "check_lifted_structures"),
                                      cfg.samples, rng, cfg.numeric)


def _run_check_ideal_system(s, cfg, rng):
    return ls.check_ideal_system(s.groupoid, s.dist, s.chart, cfg.samples, rng,
                                 cfg.numeric)


def _run_check_lagrangian(s, cfg, rng):
    return dr.check_lagrangian(_need(s, "dirac", "check_lagrangian"),
                               _points(s, cfg.samples, rng), cfg.numeric)


def _run_check_integrable(s, cfg, rng):
    return dr.check_integrable(_need(s, "dirac", "check_integrable"),
                               _points(s, cfg.samples, rng), cfg.numeric)


def _run_check_multiplicative_dirac(s, cfg, rng):
    return dr.check_multiplicative_dirac(s.groupoid, _need(s, "dirac",
                                                           "check_multiplicative_dirac"),
                                         max(2, cfg.samples // 8), rng, cfg.numeric)


def _run_pushforward_dirac(s, cfg, rng):
    result = dr.pushforward_dirac(s.groupoid, _need(s, "dirac", "pushforward_dirac"),
                                  s.chart.lambda_g, s.quotient_section,
                                  s.chart.lambda_g.codomain,
                                  max(4, cfg.samples // 4), rng, cfg.numeric)
    return result.report


def _run_is_forward_dirac(s, cfg, rng):
    result = dr.pushforward_dirac(s.groupoid, s.dirac, s.chart.lambda_g,
                                  s.quotient_section, s.chart.lambda_g.codomain,
                                  max(4, cfg.samples // 8), rng, cfg.numeric)
    if result.dirac is None:
        return result.report
    return dr.is_forward_dirac(s.chart.lambda_g, s.dirac, result.dirac,
                               _points(s, max(4, cfg.samples // 8), rng), cfg.numeric)


CHECKS: dict = {
    "validate_groupoid": (_run_validate_groupoid,
                          "five groupoid axioms (exhaustive or sampled)"),
    "validate_nss": (_run_validate_nss,
                     "normal subgroupoid system conditions 1-3 and action axioms"),
    "quotient_by_normal_subgroupoid": (_run_quotient_normal,
                                       "exact quotient by a normal subgroupoid"),
    "quotient_by_nss": (_run_quotient_nss,
                        "exact quotient by the system; compares with the N-quotient"),
    "check_multiplicative": (_run_check_multiplicative,
                             "distribution is a subgroupoid of the tangent prolongation"),
    "check_rank_structure": (_run_check_rank_structure,
                             "constant ranks, unit splitting, translation invariance"),
    "check_ts_surjectivity": (_run_check_ts_surjectivity,
                              "projected differentials surject onto S on TP"),
    "check_involutive": (_run_check_involutive,
                         "generator brackets stay inside the span"),
    "lift_section": (_run_lift_section,
                     "min-norm descending lifts hit their base fields"),
    "spot_check_completeness": (_run_spot_check_completeness,
                                "flagged lifts integrate for |T| <= flow_time"),
    "check_leaf_chart": (_run_check_leaf_chart,
                         "first integrals annihilate the distribution"),
    "transport_to_target": (_run_transport,
                            "leafwise transport reaches prescribed targets"),
    "check_condition6": (_run_check_condition6,
                         "left translates of unit-leaf fibers fill target-fiber leaves"),
    "validate_quotient_groupoid": (_run_validate_quotient,
                                   "label algebra satisfies the groupoid axioms"),
    "check_lifted_structures": (_run_check_lifted_structures,
                                "tangent/cotangent products project correctly"),
    "check_ideal_system": (_run_check_ideal_system,
                           "induced algebroid data satisfies the ideal conditions"),
    "check_lagrangian": (_run_check_lagrangian,
                         "pairing vanishes and fibers have full rank"),
    "check_integrable": (_run_check_integrable,
                         "sections close under the Courant-Dorfman bracket"),
    "check_multiplicative_dirac": (_run_check_multiplicative_dirac,
                                   "Dirac structure is a subgroupoid of the "
                                   "Pontryagin groupoid"),
    "pushforward_dirac": (_run_pushforward_dirac,
                          "project to the quotient and extract the Poisson bivector"),
    "is_forward_dirac": (_run_is_forward_dirac,
                         "labeling map is a forward Dirac map onto the pushforward"),
}


# ---------------------------------------------------------------------------
# runner

def run_pipeline(cfg: ScenarioConfig) -> dict:
    scenario = build_scenario(cfg.family, cfg.params)
    results = []
    all_passed = True
    for index, name in enumerate(cfg.pipeline):
        runner, _ = CHECKS[name]
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([cfg.seed, index])))
        started = time.perf_counter()
        short_circuit = False
        try:
            report = runner(scenario, cfg, rng)
        except HypothesisViolation as exc:
            report = CheckReport(name, False, 1.0,
                                 witness={"error": type(exc).__name__,
                                          "message": str(exc)})
            short_circuit = True
        elapsed = time.perf_counter() - started
        entry = report.to_json()
        entry["wall_time_s"] = elapsed
        results.append(entry)
        if not report.passed:
            all_passed = False
        if short_circuit:
            entry["short_circuited_pipeline"] = True
            break
    return {
        "schema": SCHEMA_VERSION,
        "scenario": scenario.name,
        "config": cfg.echo(),
        "results": results,
        "passed": all_passed and len(results) == len(cfg.pipeline),
    }


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        data["numeric"] = dict(data.get("numeric", {}), seed=args.seed)
    if args.samples is not None:
        data["numeric"] = dict(data.get("numeric", {}), samples=args.samples)
    try:
        cfg = ScenarioConfig.from_dict(data)
        report = run_pipeline(cfg)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for entry in report["results"]:
        status = "pass" if entry["pass"] else "FAIL"
        print(f"[{status}] {entry['name']}  max_residual={entry['max_residual']:.3e}",
              file=sys.stderr)
    return 0 if report["passed"] else 1


def _cmd_list_checks(_args) -> int:
    width = max(len(name) for name in CHECKS)
    for name in sorted(CHECKS):
        print(f"{name:{width}s}  {CHECKS[name][1]}")
    return 0


def _cmd_describe_family(args) -> int:
    name = args.name
    if name not in FAMILY_DESCRIPTIONS:
        print(f"error: unknown family {name!r}; known: {sorted(FAMILY_DESCRIPTIONS)}",
              file=sys.stderr)
        return 2
    print(f"{name}: {FAMILY_DESCRIPTIONS[name]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folioid",
        description="Run structural checks for multiplicative foliations on groupoids.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config", help="path to a scenario config JSON")
    p_run.add_argument("--out", help="write the report JSON here instead of stdout")
    p_run.add_argument("--seed", type=int, default=None, help="override the seed")
    p_run.add_argument("--samples", type=int, default=None, help="override sample count")
    p_run.set_defaults(fn=_cmd_run)

    p_list = sub.add_parser("list-checks", help="list available pipeline checks")
    p_list.set_defaults(fn=_cmd_list_checks)

    p_desc = sub.add_parser("describe-family", help="describe a scenario family")
    p_desc.add_argument("name")
    p_desc.set_defaults(fn=_cmd_describe_family)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
