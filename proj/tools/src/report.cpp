#include "sigraph_tools/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "sigraph/text.hpp"

namespace sigraph::tools {

namespace {

nlohmann::ordered_json number_or_text(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

double read_number(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw std::invalid_argument("expected a number in report line");
}

std::size_t display_width(std::string_view s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80 ? 1 : 0;
  return w;
}

std::string cell_text(const nlohmann::ordered_json& j) {
  if (j.is_null()) return "-";
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", j.get<double>());
    return buf;
  }
  return j.dump();
}

}  // namespace

nlohmann::ordered_json pattern_record(const RankedPattern& r, std::size_t rank, std::optional<int> round,
                              std::optional<Measure> measure) {
  const Pattern& p = r.pattern;
  nlohmann::ordered_json j;
  j["rank"] = rank;
  if (round) j["round"] = *round;
  j["w1"] = p.w1.render();
  j["w2"] = p.w2 ? nlohmann::ordered_json(p.w2->render()) : nlohmann::ordered_json(nullptr);
  j["size1"] = p.size1;
  j["size2"] = p.w2 ? nlohmann::ordered_json(p.size2) : nlohmann::ordered_json(nullptr);
  j["I"] = static_cast<int>(p.direction);
  j["k_w"] = p.k_w;
  j["n_w"] = p.n_w;
  j["expected"] = p.expected();
  j["ic"] = p.ic;
  j["dl"] = p.dl;
  j["si"] = p.si;
  j["convention"] = to_string(p.counting);
  if (measure) {
    j["measure"] = std::string(measure_name(*measure));
    j["score"] = number_or_text(r.score);
  }
  return j;
}

ReportLine parse_report_line(std::string_view line) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report line: ") + e.what());
  }
  try {
    ReportLine r;
    r.rank = j.at("rank").get<std::size_t>();
    if (j.contains("round")) r.round = j.at("round").get<int>();
    r.w1 = j.at("w1").get<std::string>();
    if (!j.at("w2").is_null()) r.w2 = j.at("w2").get<std::string>();
    r.size1 = j.at("size1").get<std::size_t>();
    if (!j.at("size2").is_null()) r.size2 = j.at("size2").get<std::size_t>();
    r.direction = j.at("I").get<int>();
    r.k_w = j.at("k_w").get<std::size_t>();
    r.n_w = j.at("n_w").get<std::size_t>();
    r.expected = read_number(j.at("expected"));
    r.ic = read_number(j.at("ic"));
    r.dl = read_number(j.at("dl"));
    r.si = read_number(j.at("si"));
    r.convention = j.at("convention").get<std::string>();
    if (j.contains("measure")) r.measure = j.at("measure").get<std::string>();
    if (j.contains("score")) r.score = read_number(j.at("score"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("incomplete report line: ") + e.what());
  }
}

std::string render_table(const std::vector<nlohmann::ordered_json>& records) {
  static const std::vector<std::pair<std::string, std::string>> columns{
      {"round", "Round"}, {"measure", "Measure"}, {"rank", "Rank"},  {"w1", "W1"},
      {"w2", "W2"},       {"size1", "|ε(W1)|"},  {"size2", "|ε(W2)|"}, {"I", "I"},
      {"k_w", "k_W"},     {"expected", "p_W·n_W"}, {"score", "Score"}, {"si", "SI"}};
  std::vector<std::pair<std::string, std::string>> used;
  for (const auto& col : columns) {
    const bool present = std::any_of(records.begin(), records.end(), [&](const nlohmann::ordered_json& r) {
      return r.contains(col.first) && !r.at(col.first).is_null();
    });
    if (present) used.push_back(col);
  }
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width;
  for (const auto& col : used) width.push_back(display_width(col.second));
  for (const auto& r : records) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < used.size(); ++c) {
      row.push_back(r.contains(used[c].first) ? cell_text(r.at(used[c].first)) : "-");
      width[c] = std::max(width[c], display_width(row.back()));
    }
    cells.push_back(std::move(row));
  }
  std::string out;
  const auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += "  ";
      out += row[c];
      if (c + 1 < row.size()) out.append(width[c] - display_width(row[c]), ' ');
    }
    out += '\n';
  };
  std::vector<std::string> header;
  for (const auto& col : used) header.push_back(col.second);
  emit(header);
  for (const auto& row : cells) emit(row);
  return out;
}

}  // namespace sigraph::tools
