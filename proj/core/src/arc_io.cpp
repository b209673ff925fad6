#include "hysup/arc_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace hysup {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_arc_csv(const HybridArc& arc, std::ostream& os,
                   const std::vector<std::string>& state_columns) {
  const int dim = arc.empty() ? 0 : static_cast<int>(arc.first_sample().x.size());
  os << "t,j";
  if (!state_columns.empty()) {
    for (const auto& c : state_columns) os << ',' << c;
  } else {
    for (int i = 0; i < dim; ++i) os << ",x" << i;
  }
  os << '\n';
  for (const auto& iv : arc.intervals) {
    for (const auto& s : iv.samples) {
      os << format_double(s.t) << ',' << iv.j;
      for (double v : s.x) os << ',' << format_double(v);
      os << '\n';
    }
  }
}

std::string arc_to_csv(const HybridArc& arc, const std::vector<std::string>& state_columns) {
  std::ostringstream os;
  write_arc_csv(arc, os, state_columns);
  return os.str();
}

CsvArc read_arc_csv(std::istream& is) {
  CsvArc out;
  std::string line;
  if (!std::getline(is, line)) return out;

  {
    std::stringstream header(line);
    std::string col;
    int idx = 0;
    while (std::getline(header, col, ',')) {
      if (idx >= 2) out.columns.push_back(col);
      ++idx;
    }
  }

  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    const double t = std::strtod(cell.c_str(), nullptr);
    std::getline(row, cell, ',');
    const int j = static_cast<int>(std::strtol(cell.c_str(), nullptr, 10));
    State x;
    while (std::getline(row, cell, ',')) x.push_back(std::strtod(cell.c_str(), nullptr));

    if (out.arc.intervals.empty() || out.arc.intervals.back().j != j) {
      out.arc.intervals.push_back({j, {}});
    }
    out.arc.intervals.back().samples.push_back({t, std::move(x)});
  }
  return out;
}

nlohmann::json arc_to_json(const HybridArc& arc, bool with_samples) {
  nlohmann::json out;
  out["termination"] = to_string(arc.termination);
  auto dom = arc.domain();
  auto intervals = nlohmann::json::array();
  for (const auto& iv : dom.intervals) {
    intervals.push_back({{"t_start", iv.t_start}, {"t_end", iv.t_end}, {"j", iv.j}});
  }
  out["domain"] = std::move(intervals);
  if (with_samples) {
    auto samples = nlohmann::json::array();
    for (const auto& iv : arc.intervals) {
      for (const auto& s : iv.samples) {
        samples.push_back({{"t", s.t}, {"j", iv.j}, {"x", s.x}});
      }
    }
    out["samples"] = std::move(samples);
  }
  return out;
}

}  // namespace hysup
