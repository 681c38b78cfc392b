"""Scenario files: JSON parsing, validation, and the bundled instances.

A scenario file carries a power box, a cost, and one interference model.
Affine (ratio-target) scenarios keep the canonical keys ``gains``,
``tau``, ``eta``; other model families add an ``interference`` object.  All
validation failures raise :class:`ScenarioFormatError` naming the
offending key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .interference import (
    AffineModel,
    ConstantModel,
    InterferenceModel,
    MonomialModel,
    OpportunisticModel,
)
from .model import CostModel, NetworkScenario, PowerBox
from .smoothing import ExponentialFading, FadingModel, RayleighFading, SmoothedModel

__all__ = [
    "ScenarioFormatError",
    "LoadedScenario",
    "load_scenario",
    "save_scenario",
    "bundled_scenarios",
    "load_bundled",
]

_DATA_DIR = Path(__file__).parent / "data"


class ScenarioFormatError(ValueError):
    """A scenario file is syntactically or semantically invalid."""


@dataclass
class LoadedScenario:
    """A parsed scenario: model, cost and box, plus the affine network
    parameters when the file carried them."""

    name: str
    model: InterferenceModel
    cost: CostModel
    box: PowerBox
    scenario: NetworkScenario | None = None
    path: Path | None = None


def _need(data: dict, key: str, where: str):
    if key not in data:
        raise ScenarioFormatError(f"{where}: missing key {key!r}")
    return data[key]


def _parse_cost(data: dict, where: str) -> CostModel:
    kind = _need(data, "kind", where)
    try:
        if kind in ("identity-vector", "sum"):
            return CostModel(kind=kind)
        if kind == "weighted-log-sum":
            return CostModel(kind=kind, s=np.asarray(_need(data, "s", where), dtype=float))
        if kind == "weighted-power-product":
            return CostModel(kind=kind, s=np.asarray(_need(data, "s", where), dtype=float),
                             h=data.get("h", "identity"))
    except ScenarioFormatError:
        raise
    except ValueError as exc:
        raise ScenarioFormatError(f"{where}: {exc}") from exc
    raise ScenarioFormatError(f"{where}: unsupported cost kind {kind!r}")


def _parse_fading(data: dict, where: str) -> FadingModel:
    kind = _need(data, "kind", where)
    lam = float(_need(data, "lam", where))
    try:
        if kind == "rayleigh":
            return RayleighFading(lam=lam)
        if kind == "exponential":
            return ExponentialFading(lam=lam)
    except ValueError as exc:
        raise ScenarioFormatError(f"{where}: {exc}") from exc
    raise ScenarioFormatError(f"{where}: unsupported fading kind {kind!r}")


def _parse_model(raw: dict, box: PowerBox, where: str) -> tuple[InterferenceModel,
                                                                NetworkScenario | None]:
    block = raw.get("interference", {"kind": "affine"})
    kind = block.get("kind", "affine")
    try:
        if kind == "affine":
            scn = NetworkScenario(
                gains=np.asarray(_need(raw, "gains", where), dtype=float),
                tau=np.asarray(_need(raw, "tau", where), dtype=float),
                eta=np.asarray(_need(raw, "eta", where), dtype=float),
                box=box, name=raw.get("name", ""))
            return AffineModel(scn), scn
        if kind == "opportunistic":
            return OpportunisticModel(
                gains=np.asarray(_need(raw, "gains", where), dtype=float),
                eta=np.asarray(_need(raw, "eta", where), dtype=float),
                c=np.asarray(_need(block, "c", f"{where}.interference"), dtype=float)), None
        if kind == "monomial":
            return MonomialModel(
                A=np.asarray(_need(block, "A", f"{where}.interference"), dtype=float),
                b=np.asarray(_need(block, "b", f"{where}.interference"), dtype=float)), None
        if kind == "constant":
            return ConstantModel(np.asarray(_need(block, "k", f"{where}.interference"),
                                            dtype=float)), None
        if kind == "smoothed":
            inner = _need(block, "base", f"{where}.interference")
            base, scn = _parse_model({**raw, "interference": inner}, box, where)
            fad = block.get("fading")
            if fad is None:
                raise ScenarioFormatError(f"{where}.interference: missing key 'fading'")
            if isinstance(fad, list):
                fadings = [_parse_fading(f, f"{where}.interference.fading[{i}]")
                           for i, f in enumerate(fad)]
            else:
                fadings = _parse_fading(fad, f"{where}.interference.fading")
            return SmoothedModel(
                base, fadings, b=np.asarray(_need(block, "b", f"{where}.interference"), dtype=float),
                z_floor=float(block.get("z_floor", 1e-3))), scn
    except ScenarioFormatError:
        raise
    except ValueError as exc:
        raise ScenarioFormatError(f"{where}: {exc}") from exc
    raise ScenarioFormatError(f"{where}: unsupported interference kind {kind!r}")


def load_scenario(path: str | Path) -> LoadedScenario:
    """Parse and validate a scenario file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ScenarioFormatError(f"{path}: top level must be an object")
    where = str(path)
    try:
        box = PowerBox(p_min=np.asarray(_need(raw, "p_min", where), dtype=float),
                       p_max=np.asarray(_need(raw, "p_max", where), dtype=float))
    except ScenarioFormatError:
        raise
    except ValueError as exc:
        raise ScenarioFormatError(f"{where}: {exc}") from exc
    cost = _parse_cost(_need(raw, "cost", where), f"{where}.cost")
    model, scn = _parse_model(raw, box, where)
    if model.n != box.n:
        raise ScenarioFormatError(f"{where}: model dimension {model.n} does not match box")
    return LoadedScenario(name=raw.get("name", path.stem), model=model, cost=cost,
                          box=box, scenario=scn, path=path)


def _cost_dict(cost: CostModel) -> dict:
    if cost.kind in ("identity-vector", "sum"):
        return {"kind": cost.kind}
    if cost.kind == "weighted-log-sum":
        return {"kind": cost.kind, "s": [float(v) for v in cost.s]}
    if cost.kind == "weighted-power-product":
        return {"kind": cost.kind, "s": [float(v) for v in cost.s], "h": cost.h}
    raise ValueError(f"cost kind {cost.kind!r} has no file representation")


def _fading_dict(fad: FadingModel) -> dict:
    if isinstance(fad, (RayleighFading, ExponentialFading)):
        return {"kind": fad.kind, "lam": float(fad.lam)}
    raise ValueError("only rayleigh/exponential fadings have a file representation")


def _model_dict(model: InterferenceModel, out: dict) -> None:
    if isinstance(model, AffineModel):
        scn = model.scenario
        out["gains"] = [[float(v) for v in row] for row in scn.gains]
        out["tau"] = [float(v) for v in scn.tau]
        out["eta"] = [float(v) for v in scn.eta]
        out["interference"] = {"kind": "affine"}
    elif isinstance(model, OpportunisticModel):
        out["gains"] = [[float(v) for v in row] for row in model.cross]
        out["eta"] = [float(v) for v in model.eta]
        out["interference"] = {"kind": "opportunistic", "c": [float(v) for v in model.c]}
    elif isinstance(model, MonomialModel):
        out["interference"] = {"kind": "monomial",
                        "A": [[float(v) for v in row] for row in model.A],
                        "b": [float(v) for v in model.b]}
    elif isinstance(model, ConstantModel):
        out["interference"] = {"kind": "constant", "k": [float(v) for v in model.k]}
    elif isinstance(model, SmoothedModel):
        inner: dict = {}
        _model_dict(model.base, inner)
        out.update({k: v for k, v in inner.items() if k != "interference"})
        out["interference"] = {"kind": "smoothed", "base": inner["interference"],
                        "fading": [_fading_dict(f) for f in model.fadings],
                        "b": [float(v) for v in model.b],
                        "z_floor": model.z_floor}
    else:
        raise ValueError(f"model type {type(model).__name__} has no file representation")


def save_scenario(loaded: LoadedScenario, path: str | Path) -> None:
    """Write a scenario back to disk (canonical key order, LF endings)."""
    out: dict = {"name": loaded.name,
                 "p_min": [float(v) for v in loaded.box.p_min],
                 "p_max": [float(v) for v in loaded.box.p_max],
                 "cost": _cost_dict(loaded.cost)}
    _model_dict(loaded.model, out)
    if isinstance(loaded.model, OpportunisticModel):
        # cross gains have a zero diagonal; keep the file loadable as-is
        g = np.asarray(out["gains"], dtype=float)
        np.fill_diagonal(g, 1.0)
        out["gains"] = [[float(v) for v in row] for row in g]
    Path(path).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")


def bundled_scenarios() -> dict[str, Path]:
    """Name -> path of the instances shipped with the package."""
    return {p.stem: p for p in sorted(_DATA_DIR.glob("*.json"))}


def load_bundled(name: str) -> LoadedScenario:
    paths = bundled_scenarios()
    if name not in paths:
        raise KeyError(f"no bundled scenario {name!r}; available: {sorted(paths)}")
    return load_scenario(paths[name])
