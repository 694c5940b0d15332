#include "io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kpzrun {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Csv::Csv(std::initializer_list<std::string_view> header) {
  for (auto h : header) cell(h);
  end_row();
}

void Csv::separator() {
  if (!row_start_) text_ += ',';
  row_start_ = false;
}

Csv& Csv::cell(double v) {
  separator();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  text_ += buf;
  return *this;
}

Csv& Csv::cell(std::size_t v) {
  separator();
  text_ += std::to_string(v);
  return *this;
}

Csv& Csv::cell(std::string_view v) {
  separator();
  text_ += v;
  return *this;
}

Csv& Csv::end_row() {
  text_ += '\n';
  row_start_ = true;
  return *this;
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("CSV has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  const auto& s = rows.at(row).at(column(name));
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw IoError("CSV cell '" + s + "' in column '" + std::string(name) + "' is not a number");
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    return cells;
  };
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) throw IoError(path.string() + ": row width differs from the header");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

OutputSink::OutputSink(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) throw IoError("cannot create output directory " + dir_.string());
}

void OutputSink::write(const std::string& name, std::string_view bytes) {
  const auto path = dir_ / name;
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
  }
  auto it = std::find_if(files_.begin(), files_.end(), [&](const OutputFile& f) { return f.name == name; });
  OutputFile rec{name, bytes.size(), sha256_hex(bytes)};
  if (it == files_.end()) files_.push_back(std::move(rec));
  else *it = std::move(rec);
}

}  // namespace kpzrun
