#include "mfg/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "mfg/errors.hpp"

namespace mfg {

static_assert(std::endian::native == std::endian::little,
              "dump formats are written with native little-endian layout");

namespace {

template <class T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw ConfigError("dump truncated");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

void expect_magic(std::istream& in, const char* magic) {
  char buf[4];
  if (!in.read(buf, 4) || std::memcmp(buf, magic, 4) != 0) {
    throw ConfigError(std::string("bad magic, expected ") + magic);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_fields(std::ostream& out, std::span<const Field> fields) {
  if (fields.empty()) throw ConfigError("write_fields: nothing to write");
  const Grid& g = fields.front().grid();
  out.write("MFGF", 4);
  put<std::uint32_t>(out, kFieldDumpVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
  put<double>(out, g.half_width());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  for (const Field& f : fields) {
    require_same_grid(f.grid(), g, "write_fields");
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
  }
}

void write_fields(const std::filesystem::path& path, std::span<const Field> fields) {
  auto out = open_out(path);
  write_fields(out, fields);
}

std::vector<Field> read_fields(std::istream& in) {
  expect_magic(in, "MFGF");
  const auto version = get<std::uint32_t>(in);
  if (version != kFieldDumpVersion) throw ConfigError("unsupported field dump version");
  const auto dim = get<std::uint32_t>(in);
  const auto n = get<std::uint32_t>(in);
  const auto L = get<double>(in);
  const auto count = get<std::uint32_t>(in);
  const Grid grid(static_cast<int>(dim), L, static_cast<int>(n));
  std::vector<Field> fields;
  fields.reserve(count);
  for (std::uint32_t c = 0; c < count; ++c) {
    std::vector<double> values(grid.size());
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(double)))) {
      throw ConfigError("field dump truncated");
    }
    fields.emplace_back(grid, std::move(values));
  }
  return fields;
}

std::vector<Field> read_fields(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_fields(in);
}

void write_csv(std::ostream& out, const Field& f) {
  const Grid& g = f.grid();
  out << (g.dim() == 1 ? "x1,value\n" : "x1,x2,value\n");
  out << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = g.point(i);
    out << x[0] << ',';
    if (g.dim() == 2) out << x[1] << ',';
    out << f[i] << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_csv(out, f);
}

void write_trajectories(std::ostream& out, const TrajectoryDump& dump) {
  const std::size_t expected =
      static_cast<std::size_t>(dump.particles) * (dump.steps + 1) * dump.dim;
  if (dump.positions.size() != expected) throw ConfigError("trajectory dump size mismatch");
  out.write("MFGT", 4);
  put<std::uint32_t>(out, dump.particles);
  put<std::uint32_t>(out, dump.steps);
  put<std::uint32_t>(out, dump.dim);
  out.write(reinterpret_cast<const char*>(dump.positions.data()),
            static_cast<std::streamsize>(expected * sizeof(double)));
}

void write_trajectories(const std::filesystem::path& path, const TrajectoryDump& dump) {
  auto out = open_out(path);
  write_trajectories(out, dump);
}

TrajectoryDump read_trajectories(std::istream& in) {
  expect_magic(in, "MFGT");
  TrajectoryDump d;
  d.particles = get<std::uint32_t>(in);
  d.steps = get<std::uint32_t>(in);
  d.dim = get<std::uint32_t>(in);
  d.positions.resize(static_cast<std::size_t>(d.particles) * (d.steps + 1) * d.dim);
  if (!in.read(reinterpret_cast<char*>(d.positions.data()),
               static_cast<std::streamsize>(d.positions.size() * sizeof(double)))) {
    throw ConfigError("trajectory dump truncated");
  }
  return d;
}

}  // namespace mfg
