#pragma once

#include "rino/simulator.hpp"

#include <iosfwd>
#include <string>

namespace rino {

/// Line-delimited records, one JSON object per line, in timestamp order.
/// Record types: imu {t, w, f}, radar {t, points: [[range, doppler, w_y,
/// w_z, aliased], ...]}, baro {t, p}, truth {t, p, q (xyzw), v}.
void write_dataset(const SimDataset& ds, std::ostream& os);
void write_dataset(const SimDataset& ds, const std::string& path);

/// Throws std::runtime_error naming the offending line number.
SimDataset read_dataset(std::istream& is);
SimDataset read_dataset(const std::string& path);

}  // namespace rino
