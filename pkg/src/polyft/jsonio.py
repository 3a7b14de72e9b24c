"""Deterministic JSON serialization and scene parsing.

Floats are clipped to 12 significant digits and keys are emitted sorted, so
identical inputs produce byte-identical output.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .consistency import ConsistentFaceSet, UniquenessReport
from .errors import InvalidInput
from .geometry import DEFAULT_TOLERANCE, Face, PolytopeBall, build_ball
from .scenarios import CaseReport, builtin_ball
from .solver import FTCertificate, FTSet, Instance, Refutation

SIG_DIGITS = 12


def _num(x) -> float | int:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    return float(f"{float(x):.{SIG_DIGITS}g}")


def canonical(obj: Any) -> Any:
    """Recursively convert arrays/dataclasses-ish values to plain JSON types."""
    if obj is None or isinstance(obj, (str, bool)):
        return obj
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return _num(obj)
    if isinstance(obj, np.ndarray):
        return [canonical(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (dict,)):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, frozenset):
        return sorted(int(v) for v in obj)
    raise InvalidInput(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(canonical(obj), indent=2, sort_keys=True) + "\n"


# -- writers -------------------------------------------------------------------


def ball_to_json(ball: PolytopeBall) -> dict:
    out = {"dim": ball.dim, "vertices": ball.vertices}
    if ball.name:
        out["name"] = ball.name
    return out


def instance_to_json(inst: Instance) -> dict:
    ball = inst.ball.name if inst.ball.name else ball_to_json(inst.ball)
    return {"ball": ball, "sites": inst.sites}


def face_to_json(face: Face) -> dict:
    return {"vertex_ids": list(face.vertex_ids), "dim": face.dim}


def certificate_to_json(cert: FTCertificate) -> dict:
    return {
        "base_point": cert.base_point,
        "site_indices": list(cert.site_indices),
        "functionals": cert.functionals,
        "coincident_sites": list(cert.coincident),
        "residual": cert.residual,
        "slack": cert.slack,
        "mode": cert.mode,
    }


def refutation_to_json(ref: Refutation) -> dict:
    return {"base_point": ref.base_point, "margin": ref.margin, "optimal": False}


def ftset_to_json(fts: FTSet) -> dict:
    out = {
        "tag": fts.tag,
        "affine_dim": fts.affine_dim,
        "vertices": fts.vertices,
        "objective": fts.objective_value,
    }
    if fts.certificate is not None:
        out["certificate"] = certificate_to_json(fts.certificate)
    return out


def consistent_set_to_json(cs: ConsistentFaceSet) -> dict:
    return {
        "faces": [face_to_json(f) for f in cs.faces],
        "functionals": cs.witnesses,
        "min_interior_slack": cs.min_interior_slack,
    }


def report_to_json(report: UniquenessReport) -> dict:
    out = {
        "ball": report.ball_name,
        "n": report.n,
        "verdict": report.verdict,
        "trace": list(report.criterion_trace),
        "witness": None,
    }
    if report.witness is not None:
        w = report.witness
        out["witness"] = {
            "faces": [face_to_json(f) for f in w.face_set.faces]
            if w.face_set
            else None,
            "functionals": w.face_set.witnesses if w.face_set else None,
            "instance": instance_to_json(w.instance),
            "ft_set": ftset_to_json(w.ft_set),
        }
    return out


def case_report_to_json(report: CaseReport) -> dict:
    details = {}
    for key, value in report.details.items():
        if isinstance(value, Instance):
            details[key] = instance_to_json(value)
        elif isinstance(value, FTSet):
            details[key] = ftset_to_json(value)
        elif isinstance(value, ConsistentFaceSet):
            details[key] = consistent_set_to_json(value)
        elif isinstance(value, (int, float, str, list, tuple, np.ndarray)):
            details[key] = value
        else:
            details[key] = str(value)
    return {"case": report.name, "passed": report.passed, "details": details}


# -- readers -------------------------------------------------------------------


def parse_ball(obj: Any, tolerance: float = DEFAULT_TOLERANCE) -> PolytopeBall:
    """Accept a builtin name or a {dim, vertices} mapping."""
    if isinstance(obj, str):
        return builtin_ball(obj, tolerance=tolerance)
    if isinstance(obj, dict):
        if "vertices" not in obj:
            raise InvalidInput("ball object needs a 'vertices' field")
        V = np.asarray(obj["vertices"], dtype=float)
        if "dim" in obj and int(obj["dim"]) != V.shape[1]:
            raise InvalidInput("ball 'dim' disagrees with vertex width")
        return build_ball(V, tolerance=tolerance, name=obj.get("name"))
    raise InvalidInput("ball must be a name or an object with vertices")


def parse_instance(obj: Any, tolerance: float = DEFAULT_TOLERANCE) -> Instance:
    if not isinstance(obj, dict) or "ball" not in obj or "sites" not in obj:
        raise InvalidInput("instance needs 'ball' and 'sites'")
    ball = parse_ball(obj["ball"], tolerance=tolerance)
    sites = np.asarray(obj["sites"], dtype=float)
    return Instance(ball, sites)
