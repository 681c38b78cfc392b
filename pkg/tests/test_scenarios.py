"""Scenario file loading, validation messages, and save round-trips."""

import json

import numpy as np
import pytest

from flpower import (
    AffineModel,
    ConstantModel,
    MonomialModel,
    OpportunisticModel,
    ScenarioFormatError,
    SmoothedModel,
    bundled_scenarios,
    load_bundled,
    load_scenario,
    save_scenario,
)

BUNDLED = {
    "affine2": (AffineModel, "sum", 2),
    "affine3": (AffineModel, "sum", 3),
    "constant2": (ConstantModel, "sum", 2),
    "monomial_t2": (MonomialModel, "weighted-log-sum", 2),
    "opportunistic2": (OpportunisticModel, "weighted-log-sum", 2),
    "smoothed_rayleigh2": (SmoothedModel, "sum", 2),
}


def test_bundled_names():
    assert sorted(bundled_scenarios()) == sorted(BUNDLED)


def test_bundled_contents():
    for name, (model_type, cost_kind, n) in BUNDLED.items():
        sc = load_bundled(name)
        assert sc.name == name
        assert isinstance(sc.model, model_type)
        assert sc.cost.kind == cost_kind
        assert sc.model.n == n
        assert sc.box.n == n
        # affine files carry the ratio-target network parameters
        assert (sc.scenario is not None) == isinstance(
            sc.model, (AffineModel, SmoothedModel)
        )


def test_load_bundled_unknown_name():
    with pytest.raises(KeyError, match="no_such"):
        load_bundled("no_such")


def test_smoothed_scenario_structure():
    sc = load_bundled("smoothed_rayleigh2")
    assert isinstance(sc.model.base, AffineModel)
    assert [f.kind for f in sc.model.fadings] == ["rayleigh", "rayleigh"]
    assert sc.model.z_floor == pytest.approx(1e-3)


def _affine2_raw():
    return json.loads(bundled_scenarios()["affine2"].read_text())


def _write(tmp_path, obj):
    path = tmp_path / "case.json"
    if isinstance(obj, str):
        path.write_text(obj)
    else:
        path.write_text(json.dumps(obj))
    return path


def test_missing_top_level_key_is_named(tmp_path):
    for key in ("p_min", "p_max", "cost", "tau"):
        raw = _affine2_raw()
        del raw[key]
        path = _write(tmp_path, raw)
        with pytest.raises(ScenarioFormatError, match=f"missing key '{key}'"):
            load_scenario(path)


def test_missing_key_message_has_single_path_prefix(tmp_path):
    raw = _affine2_raw()
    del raw["p_max"]
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError) as err:
        load_scenario(path)
    assert str(err.value).count(str(path)) == 1


def test_invalid_json_reports_line(tmp_path):
    path = _write(tmp_path, "{\n  broken\n}")
    with pytest.raises(ScenarioFormatError, match="invalid JSON at line 2"):
        load_scenario(path)


def test_top_level_must_be_object(tmp_path):
    path = _write(tmp_path, "[1, 2]")
    with pytest.raises(ScenarioFormatError, match="top level"):
        load_scenario(path)


def test_unsupported_interference_kind(tmp_path):
    raw = _affine2_raw()
    raw["interference"]["kind"] = "quantum"
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError,
                       match="unsupported interference kind 'quantum'"):
        load_scenario(path)


def test_unsupported_cost_kind(tmp_path):
    raw = _affine2_raw()
    raw["cost"]["kind"] = "maximum"
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError,
                       match="unsupported cost kind 'maximum'") as err:
        load_scenario(path)
    assert "case.json.cost" in str(err.value)


def test_cost_errors_point_into_cost_block(tmp_path):
    raw = _affine2_raw()
    raw["cost"] = {"kind": "weighted-log-sum"}
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError, match=r"\.cost: missing key 's'"):
        load_scenario(path)


def test_model_errors_point_into_interference_block(tmp_path):
    raw = {"name": "m", "p_min": [0.1, 0.1], "p_max": [1.0, 1.0],
           "cost": {"kind": "sum"},
           "interference": {"kind": "monomial", "b": [0.0, 0.0]}}
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError,
                       match=r"\.interference: missing key 'A'"):
        load_scenario(path)


def test_fading_errors_point_at_list_entry(tmp_path):
    raw = json.loads(bundled_scenarios()["smoothed_rayleigh2"].read_text())
    raw["interference"]["fading"][1]["kind"] = "nakagami"
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError,
                       match=r"fading\[1\]: unsupported fading kind 'nakagami'"):
        load_scenario(path)


def test_dimension_mismatch_between_model_and_box(tmp_path):
    raw = _affine2_raw()
    raw["p_max"] = [10.0, 10.0, 10.0]
    raw["p_min"] = [0.001, 0.001, 0.001]
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError, match="does not match gains"):
        load_scenario(path)

    raw = {"name": "m", "p_min": [0.1] * 3, "p_max": [1.0] * 3,
           "cost": {"kind": "sum"},
           "interference": {"kind": "constant", "k": [0.5, 0.5]}}
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError, match="does not match box"):
        load_scenario(path)


def test_box_validation_is_wrapped(tmp_path):
    raw = _affine2_raw()
    raw["p_min"] = [-1.0, 0.001]
    path = _write(tmp_path, raw)
    with pytest.raises(ScenarioFormatError, match="nonnegative"):
        load_scenario(path)


def test_missing_interference_defaults_to_affine(tmp_path):
    raw = _affine2_raw()
    del raw["interference"]
    path = _write(tmp_path, raw)
    sc = load_scenario(path)
    assert isinstance(sc.model, AffineModel)


def test_name_defaults_to_file_stem(tmp_path):
    raw = _affine2_raw()
    del raw["name"]
    path = _write(tmp_path, raw)
    assert load_scenario(path).name == "case"


def test_round_trip_preserves_structure(tmp_path):
    for name in BUNDLED:
        sc = load_bundled(name)
        path = tmp_path / f"{name}.json"
        save_scenario(sc, path)
        back = load_scenario(path)
        assert back.name == sc.name
        assert type(back.model) is type(sc.model)
        assert back.cost.kind == sc.cost.kind
        np.testing.assert_array_equal(back.box.p_min, sc.box.p_min)
        np.testing.assert_array_equal(back.box.p_max, sc.box.p_max)
        x = sc.box.p_min * 1.7
        np.testing.assert_allclose(back.model.evaluate(x), sc.model.evaluate(x),
                                   rtol=0, atol=0)


def test_round_trip_preserves_model_parameters(tmp_path):
    sc = load_bundled("monomial_t2")
    path = tmp_path / "m.json"
    save_scenario(sc, path)
    back = load_scenario(path)
    np.testing.assert_array_equal(back.model.A, sc.model.A)
    np.testing.assert_array_equal(back.model.b, sc.model.b)
    np.testing.assert_array_equal(back.cost.s, sc.cost.s)

    op = load_bundled("opportunistic2")
    save_scenario(op, path)
    back = load_scenario(path)
    np.testing.assert_array_equal(back.model.cross, op.model.cross)
    np.testing.assert_array_equal(back.model.c, op.model.c)
    np.testing.assert_array_equal(back.model.eta, op.model.eta)


def test_save_is_idempotent_and_lf_only(tmp_path):
    for name in BUNDLED:
        first = tmp_path / f"{name}_1.json"
        second = tmp_path / f"{name}_2.json"
        save_scenario(load_bundled(name), first)
        save_scenario(load_scenario(first), second)
        data = first.read_bytes()
        assert data == second.read_bytes()
        assert b"\r" not in data
        assert data.endswith(b"\n")
