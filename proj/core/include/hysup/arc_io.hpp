#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hysup/hybrid.hpp"

namespace hysup {

/// CSV header is `t,j,x0,...,x{n-1}` unless column names are supplied.
/// Jump instants appear as two consecutive rows with equal t and j differing
/// by one. Floats are printed with 17 significant digits.
void write_arc_csv(const HybridArc& arc, std::ostream& os,
                   const std::vector<std::string>& state_columns = {});

std::string arc_to_csv(const HybridArc& arc,
                       const std::vector<std::string>& state_columns = {});

struct CsvArc {
  std::vector<std::string> columns;  // state column names (t, j stripped)
  HybridArc arc;
};

/// Parses CSV in the format written by write_arc_csv.
CsvArc read_arc_csv(std::istream& is);

/// JSON form carrying the hybrid time domain and the termination reason;
/// samples included when with_samples is set.
nlohmann::json arc_to_json(const HybridArc& arc, bool with_samples = false);

std::string format_double(double v);  // %.17g

}  // namespace hysup
