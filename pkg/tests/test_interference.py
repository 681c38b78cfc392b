"""Interference maps and the sampled classifiers."""

import numpy as np
import pytest

from flpower import (
    AffineModel,
    ConstantModel,
    CustomModel,
    MonomialModel,
    NetworkScenario,
    OpportunisticModel,
    PowerBox,
    classify_standard,
    classify_two_sided,
    classify_type2,
    interference_gradient,
    load_bundled,
)
from flpower.oracle import fd_gradient

from conftest import affine2_scenario, random_affine_scenario

BUNDLED_TAGS = {
    "affine2": "standard",
    "affine3": "standard",
    "constant2": "standard",
    "monomial_t2": "type-II",
    "opportunistic2": "type-II",
    "smoothed_rayleigh2": "smoothed",
}


def test_affine_model_evaluate_and_gradient():
    model = AffineModel(affine2_scenario())
    np.testing.assert_allclose(model.evaluate([1.0, 1.0]), [0.2, 0.2])
    # gradient rows are d I_j / d p_i, so the affine case is F transposed
    F = affine2_scenario().coupling_matrix()
    np.testing.assert_allclose(model.gradient([1.0, 1.0]), F.T)
    np.testing.assert_allclose(model.gradient([3.0, 0.5]), F.T)


def test_evaluate_many_matches_loop():
    rng = np.random.default_rng(2)
    for name in BUNDLED_TAGS:
        if name == "smoothed_rayleigh2":
            continue
        loaded = load_bundled(name)
        pts = loaded.box.sample_log_uniform(rng, size=40)
        batch = loaded.model.evaluate_many(pts)
        rows = np.array([loaded.model.evaluate(p) for p in pts])
        np.testing.assert_allclose(batch, rows, rtol=1e-12)


def test_bundled_class_tags():
    for name, tag in BUNDLED_TAGS.items():
        assert load_bundled(name).model.class_tag == tag


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(4)
    for name in BUNDLED_TAGS:
        loaded = load_bundled(name)
        for _ in range(20):
            p = loaded.box.sample_log_uniform(rng)
            got = interference_gradient(loaded.model, p)
            want = fd_gradient(loaded.model.evaluate, p)
            np.testing.assert_allclose(got, want, rtol=1e-4, atol=1e-6,
                                       err_msg=name)


def test_custom_model_gradient_falls_back_to_differences():
    model = CustomModel(n=2, func=lambda p: np.array([p[0] * p[1], p[0] + 1.0]))
    p = np.array([2.0, 3.0])
    want = np.array([[3.0, 1.0], [2.0, 0.0]])
    np.testing.assert_allclose(model.gradient(p), want, rtol=1e-6, atol=1e-6)
    np.testing.assert_allclose(interference_gradient(model, p), want,
                               rtol=1e-6, atol=1e-6)


def test_monomial_log_gradient_constant():
    model = load_bundled("monomial_t2").model
    np.testing.assert_allclose(model.log_gradient(),
                               [[0.0, -0.3], [-0.3, 0.0]], atol=1e-15)


def test_monomial_tags_follow_exponent_signs():
    b = np.zeros(2)
    assert MonomialModel(A=np.array([[0.0, 0.2], [0.2, 0.0]]), b=b).class_tag == "standard"
    assert MonomialModel(A=np.array([[0.0, -0.2], [-0.2, 0.0]]), b=b).class_tag == "type-II"
    assert MonomialModel(A=np.array([[0.0, 0.2], [-0.2, 0.0]]), b=b).class_tag == "custom"


def test_classify_bundled_standard_and_type2():
    for name, tag in BUNDLED_TAGS.items():
        if tag == "smoothed":
            continue
        loaded = load_bundled(name)
        std = classify_standard(loaded.model, loaded.box, samples=500, seed=0)
        t2 = classify_type2(loaded.model, loaded.box, samples=500, seed=0)
        assert std.holds == (tag == "standard"), name
        if tag == "type-II":
            assert t2.holds, name


def test_constant_model_is_both_standard_and_type2():
    model = ConstantModel(np.array([0.3, 0.4]))
    box = PowerBox(np.array([0.01, 0.01]), np.array([10.0, 10.0]))
    assert classify_standard(model, box, samples=300, seed=0).holds
    assert classify_type2(model, box, samples=300, seed=0).holds
    assert classify_two_sided(model, box, samples=300, seed=0).holds


def test_zero_noise_affine_loses_standard_scalability():
    """With no noise offset the map is homogeneous, so scaling gives equality."""
    scenario = affine2_scenario()
    flat = NetworkScenario(scenario.gains, scenario.tau, np.zeros(2), scenario.box)
    model = AffineModel(flat)
    assert model.class_tag == "custom"
    verdict = classify_standard(model, flat.box, samples=300, seed=0)
    assert not verdict.holds
    assert verdict.property == "scalability"
    assert verdict.witness is not None


def test_opportunistic_fails_standard_monotonicity():
    loaded = load_bundled("opportunistic2")
    verdict = classify_standard(loaded.model, loaded.box, samples=300, seed=0)
    assert not verdict.holds
    assert verdict.property == "monotonicity"


def test_square_map_fails_two_sided():
    # I(p) = p^2 doubles its log-slope, violating both sandwich sides
    model = CustomModel(n=1, func=lambda p: p ** 2)
    box = PowerBox(np.array([0.5]), np.array([2.0]))
    verdict = classify_two_sided(model, box, samples=300, seed=0)
    assert not verdict.holds


def test_square_root_map_holds_two_sided():
    # I(p) = sqrt(p) halves the log-slope, sitting strictly inside the sandwich
    model = CustomModel(n=1, func=lambda p: np.sqrt(p))
    box = PowerBox(np.array([0.5]), np.array([2.0]))
    assert classify_two_sided(model, box, samples=300, seed=0).holds


def test_standard_or_type2_implies_two_sided():
    """Sampled containment of the one-sided classes in the two-sided one."""
    members = [n for n, t in BUNDLED_TAGS.items() if t in ("standard", "type-II")]
    for name in members:
        loaded = load_bundled(name)
        for seed in range(10):
            one_sided = (classify_standard(loaded.model, loaded.box, 1000, seed).holds
                         or classify_type2(loaded.model, loaded.box, 1000, seed).holds)
            assert one_sided, (name, seed)
            both = classify_two_sided(loaded.model, loaded.box, 1000, seed)
            assert both.holds, (name, seed, both.witness)


def test_two_sided_holding_implies_positive_values():
    rng = np.random.default_rng(6)
    for name in ("affine2", "monomial_t2", "opportunistic2"):
        loaded = load_bundled(name)
        assert classify_two_sided(loaded.model, loaded.box, 500, seed=0).holds
        pts = loaded.box.sample_log_uniform(rng, size=200)
        assert np.all(loaded.model.evaluate_many(pts) > 0.0)


def test_smoothed_bundle_is_not_two_sided():
    """The fading-averaged sample problem has decreasing stretches too steep
    for the sandwich, and a thorough sample finds them."""
    loaded = load_bundled("smoothed_rayleigh2")
    verdict = classify_two_sided(loaded.model, loaded.box, samples=1000, seed=1)
    assert not verdict.holds
    assert verdict.property == "upper-sandwich"
    w = verdict.witness
    assert w is not None
    assert loaded.box.contains(np.asarray(w["p"]), slack=1e-9)


def test_classifier_witness_is_deterministic():
    loaded = load_bundled("smoothed_rayleigh2")
    a = classify_two_sided(loaded.model, loaded.box, samples=1000, seed=1)
    b = classify_two_sided(loaded.model, loaded.box, samples=1000, seed=1)
    assert a.holds == b.holds and a.property == b.property
    np.testing.assert_array_equal(a.witness["p"], b.witness["p"])


def test_random_affine_scenarios_classify_standard():
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        scenario, _ = random_affine_scenario(rng, n=3)
        model = AffineModel(scenario)
        assert model.class_tag == "standard"
        assert classify_standard(model, scenario.box, samples=400, seed=seed).holds
