"""Smoke tests for the python bindings."""

import math

import rino


def test_presets_and_derived_properties():
    cfg = rino.chirp_preset("rc1")
    assert cfg.name == "rc1"
    props = rino.derive_properties(cfg)
    assert math.isclose(props.bin_width_range_m / math.sqrt(12.0), 0.0225, abs_tol=5e-4)
    assert math.isclose(props.bin_width_doppler_mps / math.sqrt(12.0), 0.0360, abs_tol=5e-4)


def test_quantize_and_alias():
    assert rino.quantize_to_bin(1.04, 0.1, 0.0) == 1.0
    v, aliased = rino.alias_wrap(5.0, 3.995)
    assert aliased
    assert -3.995 <= v < 3.995
    v, aliased = rino.alias_wrap(1.0, 3.995)
    assert not aliased
    assert v == 1.0


def test_bearing_round_trip():
    w_y, w_z = rino.angles_to_phases(0.3, -0.2)
    mu = rino.phases_to_bearing(w_y, w_z)
    expected = [
        math.cos(0.3) * math.cos(-0.2),
        math.sin(0.3) * math.cos(-0.2),
        math.sin(-0.2),
    ]
    for a, b in zip(mu, expected):
        assert math.isclose(a, b, abs_tol=1e-12)


def test_noise_model_helpers():
    cfg = rino.chirp_preset("rc1")
    sigma_vr = rino.derive_properties(cfg).bin_width_doppler_mps / math.sqrt(12.0)
    cov = rino.bearing_covariance(0.0, 0.0, 0.01)
    assert cov.shape == (3, 3)
    assert cov[1, 1] > 0.0
    # state-dependent std grows with speed and never drops below the floor
    slow = rino.doppler_residual_std(cfg, 0.2, 0.1, [0.5, 0.0, 0.0])
    fast = rino.doppler_residual_std(cfg, 0.2, 0.1, [3.9, 0.0, 0.0])
    assert sigma_vr <= slow < fast


def test_noise_sim_and_grids():
    cfg = rino.chirp_preset("rc1")
    result = rino.noise_sim(cfg, [3.995, 0.0, 0.0], 20000, 7)
    assert math.isclose(result.sample_std, result.predicted_std, rel_tol=0.15)

    grid = rino.contour_grid(cfg, [1.0, 0.0, 0.0], 5.0, 60.0)
    finite = [v for v in grid.values if not math.isnan(v)]
    assert finite and min(finite) >= 0.0

    alias = rino.alias_region_grid(cfg, [11.0, 0.0, 0.0], 5.0)
    assert rino.aliased_fraction(alias, cfg.max_doppler_mps) > 0.5

    mc = rino.mc_measurement_oracle(rino.chirp_preset("rc3"), samples=100000, seed=1)
    assert math.isclose(mc.doppler_error_std, 0.0175, rel_tol=0.10)


def test_synth_and_odometry(tmp_path):
    synth_yaml = tmp_path / "synth.yaml"
    synth_yaml.write_text(
        "trajectory:\n"
        "  kind: static\n"
        "  duration_s: 8.0\n"
        "chirp: rc1\n"
        "environment:\n"
        "  targets:\n"
        "    count: 150\n"
        "    box_min: [-15, -15, -5]\n"
        "    box_max: [15, 15, 8]\n"
    )
    dataset = tmp_path / "smoke.jsonl"
    scans = rino.synthesize_dataset(str(synth_yaml), 3, str(dataset))
    assert scans > 0

    out = rino.run_odometry(str(dataset), rino.EstimatorConfig())
    poses = out["poses"]
    assert poses
    final = poses[-1]["position"]
    assert sum(x * x for x in final) ** 0.5 <= 0.05
    assert out["map_points"] > 0
