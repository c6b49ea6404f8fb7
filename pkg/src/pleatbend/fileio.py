"""Text formats for laminations, arcs, pleating specs, tracks, and reports.

All inputs are JSON; reports are emitted as deterministic JSON (sorted keys,
fixed separators) plus flat CSV rows so golden files diff cleanly.

Formats
-------
lamination      {"leaves": [{"id", "theta1", "theta2", "weight"}, ...]}
                endpoint angles are taken modulo 2*pi into [0, 2*pi)
arc             {"p1": <point>, "p2": <point>} where a point is either
                {"coords": [t, x, y, z]} on the hyperboloid or polar
                {"r": r, "phi": phi} mapped to
                (cosh r, sinh r cos phi, sinh r sin phi, 0)
pleating spec   {"lamination": <inline lamination or file path>, "side": +-1}
approx request  {"arc": <arc>, "delta": d, "epsilon": e}
abstract lam.   {"leaves": [{"id", "weight", "closed"}, ...]}
arc pool        {"arcs": [{"crossings": [[leaf_id, multiplicity], ...]}, ...]}
train track     {"branches": [...],
                 "switches": [{"side_a": [...], "side_b": [...]}, ...],
                 "measures": [{branch: weight, ...}, ...]}
                weights given as strings are parsed as exact fractions
family spec     {"geometry": [[id, theta1, theta2], ...],
                 "paths": {id: {"kind", "target", "start", "ratio"}},
                 "indices": [n, ...] or {"start", "stop"}, "side": +-1}
periodic levels {"levels": [{"epsilon": e, "instances": [
                   {"period": T, "seed_leaves": <lamination leaves>,
                    "side": +-1}, ...]}, ...]}
"""

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import experiments as exp
from . import laminations as lam
from . import rclasses as rq
from . import surfaces as surf
from . import traintracks as tt

TWO_PI = 2.0 * math.pi


class FormatError(Exception):
    """Input file fails to parse or violates its schema."""


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    return obj[key]


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc


# -- laminations and arcs ---------------------------------------------------


def parse_lamination(obj):
    leaves = []
    for rec in _require(obj, "leaves", "lamination"):
        leaves.append(
            lam.Leaf(
                str(_require(rec, "id", "leaf")),
                float(_require(rec, "theta1", "leaf")) % TWO_PI,
                float(_require(rec, "theta2", "leaf")) % TWO_PI,
                float(_require(rec, "weight", "leaf")),
            )
        )
    try:
        return lam.FiniteLamination(tuple(leaves))
    except lam.LaminationError as exc:
        raise FormatError(f"lamination: {exc}") from exc


def lamination_to_obj(lamination):
    return {
        "leaves": [
            {"id": lf.id, "theta1": lf.theta1, "theta2": lf.theta2, "weight": lf.weight}
            for lf in lamination.leaves
        ]
    }


def parse_point(obj):
    """Hyperboloid coords or polar (r, phi) in the z = 0 slice."""
    if "coords" in obj:
        coords = [float(c) for c in obj["coords"]]
        if len(coords) != 4:
            raise FormatError(f"point coords must have 4 entries, got {len(coords)}")
        return np.array(coords)
    if "r" in obj and "phi" in obj:
        r, phi = float(obj["r"]), float(obj["phi"])
        return np.array(
            [math.cosh(r), math.sinh(r) * math.cos(phi), math.sinh(r) * math.sin(phi), 0.0]
        )
    raise FormatError("point needs either 'coords' or polar 'r'/'phi'")


def parse_arc(obj):
    try:
        return lam.Arc(parse_point(_require(obj, "p1", "arc")), parse_point(_require(obj, "p2", "arc")))
    except lam.LaminationError as exc:
        raise FormatError(f"arc: {exc}") from exc


def parse_pleating_spec(obj, base_dir="."):
    raw = _require(obj, "lamination", "pleating spec")
    if isinstance(raw, str):
        raw = load_json(Path(base_dir) / raw)
    lamination = parse_lamination(raw)
    side = int(obj.get("side", 1))
    try:
        return surf.BendingData(lamination, side)
    except surf.PleatingError as exc:
        raise FormatError(f"pleating spec: {exc}") from exc


# -- abstract laminations, arcs pools, tracks -------------------------------


def parse_abstract_lamination(obj):
    leaves = []
    for rec in _require(obj, "leaves", "abstract lamination"):
        leaves.append(
            rq.AbstractLeaf(
                str(_require(rec, "id", "abstract leaf")),
                float(_require(rec, "weight", "abstract leaf")),
                bool(rec.get("closed", True)),
            )
        )
    try:
        return rq.AbstractLamination(tuple(leaves))
    except rq.RQuotientError as exc:
        raise FormatError(f"abstract lamination: {exc}") from exc


def parse_arc_pool(obj):
    arcs = []
    for rec in _require(obj, "arcs", "arc pool"):
        try:
            arcs.append(rq.TestArc(tuple((str(i), int(m)) for i, m in _require(rec, "crossings", "test arc"))))
        except (rq.RQuotientError, ValueError, TypeError) as exc:
            raise FormatError(f"test arc: {exc}") from exc
    return arcs


def _parse_weight(v):
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError as exc:
            raise FormatError(f"weight {v!r} is not a fraction") from exc
    if isinstance(v, bool):
        raise FormatError("weight cannot be a boolean")
    if isinstance(v, int):
        return v
    return float(v)


def parse_train_track(obj):
    branches = [str(b) for b in _require(obj, "branches", "train track")]
    switches = []
    for rec in _require(obj, "switches", "train track"):
        switches.append(
            tt.Switch(
                tuple(str(b) for b in _require(rec, "side_a", "switch")),
                tuple(str(b) for b in _require(rec, "side_b", "switch")),
            )
        )
    try:
        track = tt.TrainTrack(branches, switches)
    except tt.TrainTrackError as exc:
        raise FormatError(f"train track: {exc}") from exc
    measures = [
        {str(b): _parse_weight(w) for b, w in rec.items()}
        for rec in obj.get("measures", [])
    ]
    return track, measures


# -- experiment specs -------------------------------------------------------


def _parse_indices(raw):
    if isinstance(raw, dict):
        return tuple(range(int(_require(raw, "start", "indices")), int(_require(raw, "stop", "indices"))))
    return tuple(int(n) for n in raw)


def parse_family_spec(obj):
    geometry = tuple(
        (str(i), float(t1) % TWO_PI, float(t2) % TWO_PI)
        for i, t1, t2 in _require(obj, "geometry", "family spec")
    )
    paths = {}
    for i, rec in _require(obj, "paths", "family spec").items():
        paths[str(i)] = exp.WeightPath(
            str(_require(rec, "kind", "weight path")),
            float(_require(rec, "target", "weight path")),
            None if rec.get("start") is None else float(rec["start"]),
            float(rec.get("ratio", 0.5)),
        )
    try:
        return exp.FamilySpec(
            geometry, paths, _parse_indices(_require(obj, "indices", "family spec")),
            int(obj.get("side", 1)),
        )
    except exp.ExperimentError as exc:
        raise FormatError(f"family spec: {exc}") from exc


def parse_periodic_levels(obj):
    levels = {}
    for rec in _require(obj, "levels", "periodic spec"):
        eps = float(_require(rec, "epsilon", "level"))
        instances = []
        for inst in _require(rec, "instances", "level"):
            leaves = tuple(
                lam.Leaf(
                    str(_require(r, "id", "seed leaf")),
                    float(_require(r, "theta1", "seed leaf")) % TWO_PI,
                    float(_require(r, "theta2", "seed leaf")) % TWO_PI,
                    float(_require(r, "weight", "seed leaf")),
                )
                for r in _require(inst, "seed_leaves", "periodic instance")
            )
            try:
                instances.append(
                    exp.PeriodicPleating(
                        period=float(_require(inst, "period", "periodic instance")),
                        seed_leaves=leaves,
                        side=int(inst.get("side", 1)),
                    )
                )
            except exp.ExperimentError as exc:
                raise FormatError(f"periodic instance: {exc}") from exc
        levels[eps] = instances
    return levels


# -- report writing ---------------------------------------------------------


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [float(v) for v in value.ravel()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        seq = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in seq]
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def write_json_report(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, sort_keys=True, indent=2, separators=(",", ": "))
        fh.write("\n")
    return path


def write_csv_report(path, rows, fieldnames=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [{k: _jsonable(v) for k, v in row.items()} for row in rows]
    if fieldnames is None:
        fieldnames = sorted({k for row in rows for k in row})
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def write_surface_mesh(path, surface, radius=3.0, per_component=60):
    """CSV of sampled image points in H^3 with their component ids."""
    rows = []
    for node in surface.component_maps:
        name = str(node)
        for point in surface.interior_samples(node, count=per_component, radius=radius):
            image = surface.evaluate(point)
            rows.append(
                {
                    "component": name,
                    "t": image[0],
                    "x": image[1],
                    "y": image[2],
                    "z": image[3],
                }
            )
    rows.sort(key=lambda r: (r["component"], r["x"], r["y"]))
    return write_csv_report(path, rows, fieldnames=["component", "t", "x", "y", "z"])


def read_surface_mesh(path):
    with open(path, newline="") as fh:
        return [
            (row["component"], np.array([float(row[c]) for c in ("t", "x", "y", "z")]))
            for row in csv.DictReader(fh)
        ]
