#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sigraph/search.hpp"

namespace sigraph::tools {

// One line of a pattern report. `round` is set in iterate mode, `measure` and
// `score` by the baseline command.
nlohmann::ordered_json pattern_record(const RankedPattern& r, std::size_t rank, std::optional<int> round = std::nullopt,
                              std::optional<Measure> measure = std::nullopt);

struct ReportLine {
  std::size_t rank = 0;
  std::optional<int> round;
  std::string w1;
  std::optional<std::string> w2;
  std::size_t size1 = 0, size2 = 0;
  int direction = 0;
  std::size_t k_w = 0, n_w = 0;
  double expected = 0, ic = 0, dl = 0, si = 0;
  std::string convention;
  std::optional<std::string> measure;
  std::optional<double> score;
};

// Throws std::invalid_argument on malformed lines.
ReportLine parse_report_line(std::string_view line);

// Aligned human-readable rendering of report records.
std::string render_table(const std::vector<nlohmann::ordered_json>& records);

}  // namespace sigraph::tools
