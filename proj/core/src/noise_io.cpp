#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "kpz/errors.hpp"
#include "kpz/noise.hpp"

namespace kpz::noise {
namespace {

static_assert(std::endian::native == std::endian::little, "binary replay format assumes little endian");

constexpr char kMagic[4] = {'K', 'P', 'Z', 'N'};

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path, std::size_t lineno) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
  }
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const NoiseRealization& r) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.precision(17);
  os << "dt,modes,n_time\n" << r.dt << ',' << r.modes() << ',' << r.n_time() << '\n';
  for (std::size_t n = 0; n < r.n_time(); ++n) {
    auto row = r.step(n);
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

NoiseRealization read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("dt,modes,n_time", 0) != 0)
    throw std::runtime_error(path.string() + ": missing replay header");
  if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": missing shape line");
  const auto shape = parse_row(line, path, 2);
  if (shape.size() != 3 || shape[1] < 1 || shape[2] < 1)
    throw std::runtime_error(path.string() + ": bad shape line");
  const auto modes = static_cast<std::size_t>(shape[1]);
  const auto n_time = static_cast<std::size_t>(shape[2]);
  NoiseRealization r{shape[0], Matrix(n_time, modes)};
  for (std::size_t n = 0; n < n_time; ++n) {
    if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": truncated replay file");
    const auto row = parse_row(line, path, n + 3);
    if (row.size() != modes) throw std::runtime_error(path.string() + ": row " + std::to_string(n) + " has wrong width");
    std::memcpy(r.increments.row(n).data(), row.data(), modes * sizeof(double));
  }
  return r;
}

void write_binary(const std::filesystem::path& path, const NoiseRealization& r) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::uint64_t n_time = r.n_time(), modes = r.modes();
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&n_time), 8);
  os.write(reinterpret_cast<const char*>(&modes), 8);
  os.write(reinterpret_cast<const char*>(&r.dt), 8);
  os.write(reinterpret_cast<const char*>(r.increments.data().data()),
           static_cast<std::streamsize>(n_time * modes * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

NoiseRealization read_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  std::uint64_t n_time = 0, modes = 0;
  double dt = 0;
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(path.string() + ": not a replay file");
  is.read(reinterpret_cast<char*>(&n_time), 8);
  is.read(reinterpret_cast<char*>(&modes), 8);
  is.read(reinterpret_cast<char*>(&dt), 8);
  if (!is || n_time == 0 || modes == 0) throw std::runtime_error(path.string() + ": bad replay header");
  NoiseRealization r{dt, Matrix(n_time, modes)};
  is.read(reinterpret_cast<char*>(r.increments.data().data()), static_cast<std::streamsize>(n_time * modes * sizeof(double)));
  if (!is) throw std::runtime_error(path.string() + ": truncated replay file");
  return r;
}

NoiseRealization read_replay(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? read_csv(path) : read_binary(path);
}

}  // namespace kpz::noise
