#pragma once

#include "rino/simulator.hpp"

#include <string>

namespace rino {

/// Everything cmd-synth needs: trajectory, scatterer field, chirp config, rig.
struct SynthConfig {
  TrajectorySpec trajectory;
  Environment environment;
  ChirpConfig chirp = chirp_preset("rc1");
  RigSpec rig;

  // scatterer field generated when environment.targets is empty
  int target_count = 200;
  Vec3 target_box_min = Vec3(-20.0, -20.0, -5.0);
  Vec3 target_box_max = Vec3(20.0, 20.0, 10.0);
};

SynthConfig load_synth_config(const std::string& path);

/// Generates targets (when needed) and synthesizes the dataset.
SimDataset run_synth(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace rino
