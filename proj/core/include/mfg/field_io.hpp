#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "mfg/field.hpp"

namespace mfg {

// Binary field dump, little-endian:
//   "MFGF" | version u32 | dim u32 | n u32 | L f64 | count u32 | count * n^d f64
inline constexpr std::uint32_t kFieldDumpVersion = 1;

void write_fields(std::ostream& out, std::span<const Field> fields);
void write_fields(const std::filesystem::path& path, std::span<const Field> fields);
std::vector<Field> read_fields(std::istream& in);
std::vector<Field> read_fields(const std::filesystem::path& path);

/// One row per node: x1[,x2],value
void write_csv(std::ostream& out, const Field& f);
void write_csv(const std::filesystem::path& path, const Field& f);

// Trajectory dump, little-endian:
//   "MFGT" | N u32 | steps u32 | dim u32 | N*(steps+1)*dim f64 (particle-major)
struct TrajectoryDump {
  std::uint32_t particles = 0;
  std::uint32_t steps = 0;
  std::uint32_t dim = 0;
  std::vector<double> positions;
};

void write_trajectories(std::ostream& out, const TrajectoryDump& dump);
void write_trajectories(const std::filesystem::path& path, const TrajectoryDump& dump);
TrajectoryDump read_trajectories(std::istream& in);

}  // namespace mfg
