"""JSON documents and CSV tables emitted by the command line.

Floats are written with ``repr`` (shortest round-tripping form, at most 17
significant digits), so every document reloads to identical values.
"""
from __future__ import annotations

import csv
import io
import json

from .bounds import BandEstimate
from .mc import SimulationReport
from .rules import TestReport

SCHEMA_VERSION = "1.0"

_NUM = {"type": "number"}
_BOOL = {"type": "boolean"}
_INT = {"type": "integer"}

TEST_REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "schema_version", "type", "kind", "mu0", "alpha", "n", "statistic",
        "threshold_robust", "threshold_classical", "reject_robust",
        "reject_classical", "robust_p_value", "band",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "type": {"const": "test_report"},
        "kind": {"enum": ["I", "II", "III"]},
        "mu0": _NUM,
        "alpha": _NUM,
        "n": _INT,
        "statistic": _NUM,
        "threshold_robust": _NUM,
        "threshold_classical": _NUM,
        "reject_robust": _BOOL,
        "reject_classical": _BOOL,
        "robust_p_value": {"type": "number", "minimum": 0, "maximum": 1},
        "robust_p_value_note": {"type": "string"},
        "band": {
            "type": "object",
            "required": ["sigma_lower", "sigma_upper", "estimated"],
            "properties": {
                "sigma_lower": _NUM,
                "sigma_upper": _NUM,
                "estimated": _BOOL,
                "block_length": {"type": ["integer", "null"]},
                "degenerate": _BOOL,
                "sigma_lower_sq_hat": _NUM,
                "sigma_upper_sq_hat": _NUM,
            },
        },
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}

BAND_ESTIMATE_SCHEMA = {
    "type": "object",
    "required": [
        "schema_version", "type", "method", "sigma_lower_sq_hat",
        "sigma_upper_sq_hat", "k_or_L", "block_length", "degenerate",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "type": {"const": "band_estimate"},
        "method": {"enum": ["subsample", "moving-block"]},
        "n": _INT,
        "sigma_lower_sq_hat": {"type": "number", "minimum": 0},
        "sigma_upper_sq_hat": {"type": "number", "minimum": 0},
        "k_or_L": _INT,
        "block_length": _INT,
        "degenerate": _BOOL,
    },
}

_CELL = {
    "type": "object",
    "required": [
        "n", "mu", "reps", "reject_count_robust", "reject_count_classical",
        "rate_robust", "rate_classical", "se_robust", "se_classical",
    ],
    "properties": {
        "n": _INT, "mu": _NUM, "reps": _INT,
        "reject_count_robust": _INT, "reject_count_classical": _INT,
        "rate_robust": _NUM, "rate_classical": _NUM,
        "se_robust": _NUM, "se_classical": _NUM,
        "s_above_upper": _INT, "dominance_violations": _INT,
    },
}

SIMULATION_REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "type", "config", "cells"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "type": {"const": "simulation_report"},
        "config": {
            "type": "object",
            "required": ["scenario", "sigma_lower", "sigma_upper", "mu0", "alpha",
                         "reps", "seed", "adversary_c", "robust_threshold", "noise"],
        },
        "cells": {"type": "array", "items": _CELL},
    },
}

SCHEMAS = {
    "test_report": TEST_REPORT_SCHEMA,
    "band_estimate": BAND_ESTIMATE_SCHEMA,
    "simulation_report": SIMULATION_REPORT_SCHEMA,
}


def test_report_doc(rep: TestReport) -> dict:
    band = {
        "sigma_lower": rep.band_used.sigma_lower,
        "sigma_upper": rep.band_used.sigma_upper,
        "estimated": rep.band_estimated,
        "block_length": rep.block_length,
        "degenerate": rep.degenerate_band or rep.band_used.degenerate,
    }
    if rep.band_estimate is not None:
        band["sigma_lower_sq_hat"] = rep.band_estimate.sigma_lower_sq_hat
        band["sigma_upper_sq_hat"] = rep.band_estimate.sigma_upper_sq_hat
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "test_report",
        "kind": rep.spec.kind.value,
        "mu0": rep.spec.mu0,
        "alpha": rep.spec.alpha,
        "n": rep.n,
        "statistic": rep.statistic,
        "threshold_robust": rep.threshold_robust,
        "threshold_classical": rep.threshold_classical,
        "reject_robust": bool(rep.reject_robust),
        "reject_classical": bool(rep.reject_classical),
        "robust_p_value": rep.robust_p_value,
        "robust_p_value_note": (
            "extension: maximal asymptotic false-rejection probability "
            "evaluated at the observed statistic"
        ),
        "band": band,
        "notes": list(rep.notes),
    }


test_report_doc.__test__ = False


def band_estimate_doc(est: BandEstimate, n: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "band_estimate",
        "method": est.method,
        "n": int(n),
        "sigma_lower_sq_hat": est.sigma_lower_sq_hat,
        "sigma_upper_sq_hat": est.sigma_upper_sq_hat,
        "k_or_L": int(est.k_or_L),
        "block_length": int(est.block_length),
        "degenerate": bool(est.degenerate),
    }


def simulation_doc(rep: SimulationReport) -> dict:
    cfg = rep.config
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "simulation_report",
        "config": {
            "scenario": cfg.scenario,
            "sigma_lower": cfg.band.sigma_lower,
            "sigma_upper": cfg.band.sigma_upper,
            "mu0": cfg.mu0,
            "alpha": cfg.alpha,
            "n_list": list(cfg.n_list),
            "reps": cfg.reps,
            "seed": int(cfg.seed),
            "adversary_c": cfg.adversary_target,
            "robust_threshold": cfg.robust_threshold,
            "noise": cfg.noise.value,
        },
        "cells": [
            {
                "n": c.n, "mu": c.mu, "reps": c.reps,
                "reject_count_robust": c.reject_count_robust,
                "reject_count_classical": c.reject_count_classical,
                "rate_robust": c.rate_robust, "rate_classical": c.rate_classical,
                "se_robust": c.se_robust, "se_classical": c.se_classical,
                "s_above_upper": c.s_above_upper,
                "dominance_violations": c.dominance_violations,
            }
            for c in rep.cells
        ],
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def validate(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` does not match its schema."""
    import jsonschema

    jsonschema.validate(doc, SCHEMAS[doc["type"]])


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def type1_csv(rep: SimulationReport) -> str:
    return csv_text(
        ["n", "robust_rate", "classical_rate", "robust_se", "classical_se"],
        [(c.n, c.rate_robust, c.rate_classical, c.se_robust, c.se_classical) for c in rep.cells],
    )


def power_csv(points, axis: str) -> str:
    return csv_text(
        [axis, "robust", "classical", "approx"],
        [(p.value, p.robust, p.classical, p.approx) for p in points],
    )
