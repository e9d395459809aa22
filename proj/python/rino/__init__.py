"""Python bindings for the 4D radar-inertial odometry core."""

from _rino import (  # noqa: F401
    ChirpConfig,
    DerivedRadarProperties,
    ErrorStats,
    EstimatorConfig,
    GridResult,
    McStatistics,
    NoiseSimResult,
    alias_region_grid,
    alias_wrap,
    aliased_fraction,
    angles_to_phases,
    approx_error_grid,
    bearing_covariance,
    chirp_preset,
    contour_grid,
    derive_properties,
    doppler_residual_std,
    evaluate_trajectories,
    load_chirp_config,
    load_estimator_config,
    mc_measurement_oracle,
    noise_sim,
    phases_to_bearing,
    quantize_to_bin,
    run_odometry,
    synthesize_dataset,
)

__all__ = [
    "ChirpConfig",
    "DerivedRadarProperties",
    "ErrorStats",
    "EstimatorConfig",
    "GridResult",
    "McStatistics",
    "NoiseSimResult",
    "alias_region_grid",
    "alias_wrap",
    "aliased_fraction",
    "angles_to_phases",
    "approx_error_grid",
    "bearing_covariance",
    "chirp_preset",
    "contour_grid",
    "derive_properties",
    "doppler_residual_std",
    "evaluate_trajectories",
    "load_chirp_config",
    "load_estimator_config",
    "mc_measurement_oracle",
    "noise_sim",
    "phases_to_bearing",
    "quantize_to_bin",
    "run_odometry",
    "synthesize_dataset",
]
