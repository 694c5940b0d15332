#pragma once

#include <filesystem>

#include "io.hpp"

namespace kpzrun {

/// Turns the CSV outputs found in `dir` into whitespace separated plot_*.dat
/// files. Each file starts with comment lines naming the axes and whether
/// they are meant for a log scale. Throws IoError when `dir` holds no
/// recognised CSV file.
void emit_plotdata(const std::filesystem::path& dir, OutputSink& sink);

}  // namespace kpzrun
