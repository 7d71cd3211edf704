"""Scenario-driven batch runner with machine-readable reports.

Scenarios are JSON documents validated against a fail-closed schema
(unknown fields are rejected).  Each kind dispatches to one module surface
and produces a RunReport: named checks with residuals and verdicts, plus
kind-specific outputs.  Reports are deterministic for a fixed scenario and
seed, up to the separate timing block.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import sympy as sp
from jsonschema import Draft202012Validator

from . import __version__
from .charts import Chart
from .fields import parse_scalar
from .semiflat import (
    BetaStructure,
    closedness_residuals,
    pointwise_checks,
    structure_equations,
)

SCHEMA_VERSION = "1"

_COMPLEX_VALUE = {
    "oneOf": [
        {"type": "string"},
        {"type": "number"},
        {
            "type": "object",
            "properties": {
                "re": {"oneOf": [{"type": "string"}, {"type": "number"}]},
                "im": {"oneOf": [{"type": "string"}, {"type": "number"}]},
            },
            "additionalProperties": False,
        },
    ]
}

_MATRIX = {"type": "array", "items": {"type": "array", "items": _COMPLEX_VALUE}}
_INT_MATRIX = {"type": "array",
               "items": {"type": "array", "items": {"type": "integer"}}}
_RATIONAL_VECTOR = {"type": "array",
                    "items": {"oneOf": [{"type": "string"}, {"type": "number"}]}}

_BETA_FRAGMENT = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 3},
        "box": {"type": "array",
                "items": {"type": "array", "items": {"type": "number"},
                          "minItems": 2, "maxItems": 2}},
        "beta": _MATRIX,
        "flags": {
            "type": "object",
            "properties": {"compatible": {"type": "boolean"}},
            "additionalProperties": False,
        },
    },
    "required": ["n", "box", "beta"],
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "kind": {"enum": ["semiflat-check", "dualize", "hitchin", "yukawa",
                          "fibre", "sheaf", "k3"]},
        "settings": {
            "type": "object",
            "properties": {
                "grid": {"type": "integer", "minimum": 2},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "seed": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "payload": {"type": "object"},
    },
    "required": ["version", "kind", "payload"],
    "additionalProperties": False,
}

PAYLOAD_SCHEMAS = {
    "semiflat-check": _BETA_FRAGMENT,
    "dualize": _BETA_FRAGMENT,
    "hitchin": {
        "type": "object",
        "properties": {
            "n": {"type": "integer", "minimum": 1, "maximum": 3},
            "box": _BETA_FRAGMENT["properties"]["box"],
            "potential": {"type": "string"},
            "twist_potential": {"type": "string"},
        },
        "required": ["n", "box", "potential"],
        "additionalProperties": False,
    },
    "yukawa": {
        "type": "object",
        "properties": {
            "n": {"type": "integer", "minimum": 2, "maximum": 3},
            "box": _BETA_FRAGMENT["properties"]["box"],
            "beta": _MATRIX,
            "directions": {"type": "array", "items": _MATRIX},
        },
        "required": ["n", "box", "beta", "directions"],
        "additionalProperties": False,
    },
    "fibre": {
        "type": "object",
        "properties": {
            "models": {
                "oneOf": [
                    {"const": "all"},
                    {"type": "array", "items": {"type": "string"}},
                ]
            },
            "grid": {"type": "integer", "minimum": 1, "maximum": 3},
        },
        "required": ["models"],
        "additionalProperties": False,
    },
    "sheaf": {
        "type": "object",
        "properties": {
            "rank": {"type": "integer", "minimum": 1},
            "monodromy": {"type": "array", "items": _INT_MATRIX},
            "expected_ranks": {"type": "array", "items": {"type": "integer"},
                               "minItems": 3, "maxItems": 3},
        },
        "required": ["rank", "monodromy"],
        "additionalProperties": False,
    },
    "k3": {
        "type": "object",
        "properties": {
            "lattice": {"oneOf": [{"type": "string"}, _INT_MATRIX]},
            "E": {"type": "array", "items": {"type": "integer"}},
            "sigma0": {"type": "array", "items": {"type": "integer"}},
            "omega": _RATIONAL_VECTOR,
            "B": _RATIONAL_VECTOR,
            "re_omega": _RATIONAL_VECTOR,
            "im_omega": _RATIONAL_VECTOR,
            "double_mirror": {"type": "boolean"},
            "algebraic_classes": {"type": "array", "items": {
                "type": "array", "items": {"type": "integer"}}},
        },
        "required": ["lattice", "E", "sigma0", "omega"],
        "additionalProperties": False,
    },
}


class ScenarioError(ValueError):
    """Schema violations and unparseable scenario files."""


@dataclass
class RunReport:
    scenario: dict
    checks: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def add_check(self, name, passed, value=None, tol=None):
        entry = {"name": name, "passed": bool(passed)}
        if value is not None:
            entry["value"] = float(value)
        if tol is not None:
            entry["tol"] = float(tol)
        self.checks.append(entry)

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def as_dict(self):
        return {
            "scenario": self.scenario,
            "tool": {"name": "syzlab", "version": __version__},
            "checks": sorted(self.checks, key=lambda c: c["name"]),
            "outputs": self.outputs,
            "passed": self.passed,
            "timings": self.timings,
        }

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, default=str)

    def to_text(self):
        lines = [f"scenario: {self.scenario.get('kind')}"]
        width = max((len(c["name"]) for c in self.checks), default=10)
        for c in sorted(self.checks, key=lambda c: c["name"]):
            value = f"{c.get('value', float('nan')):.3e}" if "value" in c else "-"
            tol = f"{c.get('tol', float('nan')):.1e}" if "tol" in c else "-"
            status = "pass" if c["passed"] else "FAIL"
            lines.append(f"  {c['name']:<{width}}  value={value:>10}  tol={tol:>8}  {status}")
        lines.append(f"result: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def validate_scenario(doc):
    validator = Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        raise ScenarioError("; ".join(e.message for e in errors))
    payload_schema = PAYLOAD_SCHEMAS[doc["kind"]]
    errors = sorted(Draft202012Validator(payload_schema).iter_errors(doc["payload"]),
                    key=lambda e: list(e.path))
    if errors:
        raise ScenarioError("; ".join(e.message for e in errors))
    return doc


def load_scenario(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario: {exc}")
    return validate_scenario(doc)


def _settings(doc):
    s = dict(doc.get("settings", {}))
    return {
        "grid": int(s.get("grid", 16)),
        "tol": float(s.get("tol", 1e-8)),
        "seed": int(s.get("seed", 0)),
    }


def _decode_beta(payload):
    chart = Chart(payload["n"], tuple(tuple(iv) for iv in payload["box"]))
    n = chart.n
    beta = [[parse_scalar(payload["beta"][i][j], n) for j in range(n)]
            for i in range(n)]
    compatible = payload.get("flags", {}).get("compatible", True)
    return BetaStructure(chart, beta, compatible=compatible)


def max_workers():
    try:
        return max(1, int(os.environ.get("SYZLAB_THREADS", "1")))
    except ValueError:
        return 1


def _map_checks(fn, items):
    workers = max_workers()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------------------
# dispatchers
# ---------------------------------------------------------------------------

def _run_semiflat(doc, report):
    cfg = _settings(doc)
    bs = _decode_beta(doc["payload"])
    tol = cfg["tol"]
    pw = pointwise_checks(bs, tol=tol)
    for name, check in pw.checks.items():
        report.add_check(f"pointwise.{name}", check.passed, check.value, check.tol)
    closed = closedness_residuals(bs, tol=tol)
    for name, check in closed.checks.items():
        report.add_check(f"closedness.{name}", check.passed, check.value, check.tol)
    report.add_check("closedness.equivalence", closed.notes["equivalence_consistent"])
    struct = structure_equations(bs, tol=tol)
    for name, check in struct.checks.items():
        report.add_check(f"structure.{name}", check.passed, check.value, check.tol)


def _run_dualize(doc, report):
    from .duality import dual_structure_check

    cfg = _settings(doc)
    bs = _decode_beta(doc["payload"])
    rep = dual_structure_check(bs, resolution=cfg["grid"], tol=cfg["tol"])
    for name, check in rep.checks.items():
        report.add_check(f"dual.{name}", check.passed, check.value, check.tol)
    report.outputs["vol_samples"] = rep.notes["vol_samples"]
    report.outputs["dual_vol_samples"] = rep.notes["dual_vol_samples"]


def _run_hitchin(doc, report):
    from .duality import HitchinPotential, SymTensorField, hitchin

    cfg = _settings(doc)
    payload = doc["payload"]
    chart = Chart(payload["n"], tuple(tuple(iv) for iv in payload["box"]))
    pot = HitchinPotential(chart, parse_scalar(payload["potential"], chart.n))
    twist = None
    if "twist_potential" in payload:
        f = parse_scalar(payload["twist_potential"], chart.n)
        ys = chart.ys
        twist = SymTensorField(chart, [[sp.diff(f, a, b) for b in ys] for a in ys])
    bs, info = hitchin(pot, twist, tol=cfg["tol"])
    closed = info["closedness"]
    for name, check in closed.checks.items():
        report.add_check(f"closedness.{name}", check.passed, check.value, check.tol)
    report.add_check("determinant_criterion_consistent", info["criterion_consistent"])
    report.outputs["hessian_determinant_residual"] = info["determinant_residual"]
    report.outputs["hessian_determinant_value"] = sp.sstr(info["determinant_value"])


def _run_yukawa(doc, report):
    from .duality import YukawaFamily, yukawa

    cfg = _settings(doc)
    payload = doc["payload"]
    chart = Chart(payload["n"], tuple(tuple(iv) for iv in payload["box"]))
    n = chart.n
    beta = [[parse_scalar(payload["beta"][i][j], n) for j in range(n)] for i in range(n)]
    base = BetaStructure(chart, beta)
    dirs = [
        [[parse_scalar(d[i][j], n) for j in range(n)] for i in range(n)]
        for d in payload["directions"]
    ]
    fam = YukawaFamily(base, dirs)
    value, oracle = yukawa(fam, resolution=cfg["grid"])
    report.outputs["coupling"] = {"re": value.real, "im": value.imag}
    if oracle is not None:
        rel = abs(value - oracle) / max(abs(oracle), 1.0)
        report.add_check("matches_constant_integrand", rel < cfg["tol"], rel, cfg["tol"])
        report.outputs["closed_form"] = {"re": oracle.real, "im": oracle.imag}
    else:
        report.add_check("evaluated", True)


def _run_fibre(doc, report):
    from .fibre_models import MODEL_NAMES, fibre_type_report, model_cohomology

    payload = doc["payload"]
    grid = int(payload.get("grid", 1))
    names = payload["models"]
    if names == "all":
        names = list(MODEL_NAMES)
    results = dict(zip(names, _map_checks(
        lambda name: model_cohomology(name, grid), names)))
    rep = fibre_type_report(results)
    for row in rep["rows"]:
        report.add_check(f"model.{row['model']}", row["matches"])
    if set(names) == set(MODEL_NAMES):
        report.add_check("pairing_audit", rep["pairing_ok"])
    report.outputs["table"] = [
        {k: (list(v) if isinstance(v, tuple) else v) for k, v in row.items()}
        for row in rep["rows"]
    ]


def _run_sheaf(doc, report):
    from .sheaf import (
        LocalSystemOnSphere,
        e2_assemble,
        euler_characteristic,
        pushforward_cohomology,
    )

    payload = doc["payload"]
    system = LocalSystemOnSphere(payload["rank"], payload["monodromy"])
    push = pushforward_cohomology(system)
    chi = euler_characteristic(system)
    ranks = [r for r, _ in push.groups]
    report.add_check("euler_identity", ranks[0] - ranks[1] + ranks[2] == chi)
    if "expected_ranks" in payload:
        report.add_check("expected_ranks", ranks == list(payload["expected_ranks"]))
    report.outputs["cohomology"] = push.as_dict()
    report.outputs["euler_characteristic"] = chi
    if system.rank == 2:
        # surface-style degenerate table with Z in the corners
        report.outputs["e2_table"] = e2_assemble("S2", system).as_json_grid()


def _run_k3(doc, report):
    from .k3 import (
        GramLattice,
        K3MirrorInput,
        double_mirror_check,
        kahler_obstructions,
        mirror_classes,
        validate_and_align,
    )

    payload = doc["payload"]
    lat = payload["lattice"]
    lattice = (GramLattice.from_name(lat) if isinstance(lat, str)
               else GramLattice(tuple(map(tuple, lat))))
    inp = K3MirrorInput(
        lattice,
        E=payload["E"],
        sigma0=payload["sigma0"],
        omega=payload["omega"],
        B=payload.get("B"),
        re_omega=payload.get("re_omega"),
        im_omega=payload.get("im_omega"),
    )
    aligned = validate_and_align(inp)
    classes = mirror_classes(aligned)
    for name, ok in classes.identities.items():
        report.add_check(f"identity.{name}", ok)
    report.outputs["classes"] = classes.as_dict()
    if "algebraic_classes" in payload:
        bad = kahler_obstructions(aligned, payload["algebraic_classes"])
        report.add_check("no_declared_kaehler_obstruction", not bad)
        report.outputs["kaehler_obstructions"] = [list(v) for v in bad]
    if payload.get("double_mirror") and aligned.has_holomorphic_data:
        rep = double_mirror_check(aligned)
        for key in ("omega_recovered", "re_omega_recovered", "im_omega_recovered",
                    "twist_recovered", "negation_involutive"):
            report.add_check(f"double_mirror.{key}", rep[key])


_DISPATCH = {
    "semiflat-check": _run_semiflat,
    "dualize": _run_dualize,
    "hitchin": _run_hitchin,
    "yukawa": _run_yukawa,
    "fibre": _run_fibre,
    "sheaf": _run_sheaf,
    "k3": _run_k3,
}


def run_scenario_doc(doc) -> RunReport:
    doc = validate_scenario(doc)
    report = RunReport(scenario=doc)
    start = time.monotonic()
    _DISPATCH[doc["kind"]](doc, report)
    report.timings["total_s"] = time.monotonic() - start
    return report


def run_scenario(path) -> RunReport:
    return run_scenario_doc(load_scenario(path))
