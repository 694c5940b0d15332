#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kpzrun {

/// Missing, unreadable or unwritable files.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// CSV text with a fixed header. Numbers are printed with 17 significant
/// digits so files reproduce bit for bit.
class Csv {
public:
  explicit Csv(std::initializer_list<std::string_view> header);

  Csv& cell(double v);
  Csv& cell(std::size_t v);
  Csv& cell(std::string_view v);
  Csv& end_row();
  const std::string& text() const noexcept { return text_; }

private:
  void separator();
  std::string text_;
  bool row_start_ = true;
};

/// Parsed CSV: header names and rows of string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

struct OutputFile {
  std::string name;
  std::size_t bytes = 0;
  std::string sha256;
};

/// The only place run outputs are written. Every file lands in `dir` and is
/// recorded with its hash for the manifest.
class OutputSink {
public:
  explicit OutputSink(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  void write(const std::string& name, std::string_view bytes);
  const std::vector<OutputFile>& files() const noexcept { return files_; }

private:
  std::filesystem::path dir_;
  std::vector<OutputFile> files_;
};

}  // namespace kpzrun
