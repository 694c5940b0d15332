#include "plotdata.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace kpzrun {

namespace {

struct Rule {
  std::string pattern;  ///< regex on the CSV file name
  std::string plot;     ///< output stem; "{group}" and "{1}" are substituted
  std::optional<std::string> group;
  std::string x;
  std::vector<std::string> y;
  bool log_x = false, log_y = false;
};

const std::vector<Rule>& rules() {
  static const std::vector<Rule> r = {
      {"refinement\\.csv", "refinement_{group}", "scheme", "j_fine", {"error"}, true, true},
      {"roughness\\.csv", "roughness", std::nullopt, "t", {"w"}, true, true},
      {"roughness_L(\\d+)\\.csv", "roughness_L{1}", std::nullopt, "t", {"w", "mean_height"}, true, true},
      {"collapse\\.csv", "collapse_L{group}", "L", "u", {"y"}, true, true},
      {"table\\.csv", "convergence", std::nullopt, "dx", {"error"}, true, true},
      {"errors\\.csv", "stromatolite_error", std::nullopt, "t", {"max_abs", "l2_abs"}, false, true},
      {"(ladder|comparison)\\.csv", "{1}_{group}", "mollifier", "kappa",
       {"C1", "C_total", "C_hat_empirical", "residual_error", "mean_plain", "mean_renorm"}, true, false},
      {"ladder_errors\\.csv", "ladder_errors_{group}", "mollifier", "kappa_fine", {"error"}, true, true},
      {"cross_mollifier\\.csv", "cross_mollifier", std::nullopt, "kappa", {"distance"}, true, true},
      {"summary\\.csv", "summary", std::nullopt, "realization", {"mean_height", "roughness"}, false, false},
  };
  return r;
}

std::string substitute(std::string s, const std::string& key, const std::string& value) {
  for (auto p = s.find(key); p != std::string::npos; p = s.find(key)) s.replace(p, key.size(), value);
  return s;
}

}  // namespace

void emit_plotdata(const std::filesystem::path& dir, OutputSink& sink) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::size_t emitted = 0;
  for (const auto& path : files) {
    const auto name = path.filename().string();
    for (const auto& rule : rules()) {
      std::smatch m;
      if (!std::regex_match(name, m, std::regex(rule.pattern))) continue;
      const auto table = read_csv(path);
      const std::size_t xc = table.column(rule.x);
      std::vector<std::size_t> yc;
      for (const auto& y : rule.y) yc.push_back(table.column(y));
      std::map<std::string, std::string> groups;
      const std::optional<std::size_t> gc = rule.group ? std::optional(table.column(*rule.group)) : std::nullopt;
      for (const auto& row : table.rows) {
        const std::string g = gc ? row[*gc] : "";
        auto& text = groups[g];
        if (text.empty()) {
          text = "# source: " + name + "\n# x: " + rule.x + (rule.log_x ? " (log)" : "") + "\n# y:";
          for (const auto& y : rule.y) text += " " + y;
          text += rule.log_y ? " (log)\n" : "\n";
          text += "# " + rule.x;
          for (const auto& y : rule.y) text += " " + y;
          text += "\n";
        }
        text += row[xc];
        for (auto c : yc) text += " " + row[c];
        text += "\n";
      }
      for (const auto& [g, text] : groups) {
        auto stem = substitute(rule.plot, "{group}", g);
        if (m.size() > 1) stem = substitute(stem, "{1}", m[1].str());
        sink.write("plot_" + stem + ".dat", text);
        ++emitted;
      }
      break;
    }
  }
  if (emitted == 0) throw IoError("no plottable CSV files in " + dir.string());
}

}  // namespace kpzrun
