#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcnav/sim.hpp"

namespace rcnav {

inline constexpr const char* kCsvHeader =
    "t,x,y,theta,u1,u2,delta_d,delta_theta,min_h,qp_status,solve_ms";

/// Full-precision decimal text; %.17g round-trips every double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline void write_csv(const TrajectoryLog& log, std::ostream& os) {
  os << kCsvHeader << "\n";
  for (const StepRecord& r : log.steps) {
    os << format_double(r.t) << ',' << format_double(r.x) << ',' << format_double(r.y)
       << ',' << format_double(r.theta) << ',' << format_double(r.u.x()) << ','
       << format_double(r.u.y()) << ',' << format_double(r.delta_d) << ','
       << format_double(r.delta_theta) << ',' << format_double(r.min_h) << ','
       << to_string(r.qp_status) << ',' << format_double(r.solve_ms) << "\n";
  }
}

inline std::string to_csv(const TrajectoryLog& log) {
  std::ostringstream oss;
  write_csv(log, oss);
  return oss.str();
}

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline StepStatus parse_status(const std::string& text) {
  if (text == "optimal") return StepStatus::Optimal;
  if (text == "infeasible") return StepStatus::Infeasible;
  if (text == "max_iter") return StepStatus::MaxIter;
  if (text == "none") return StepStatus::None;
  throw CsvError("unknown qp_status '" + text + "'");
}

/// Parse a CSV produced by write_csv. Errors name the offending 1-based row.
inline std::vector<StepRecord> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) {
    throw CsvError("row 1: missing header");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != kCsvHeader) {
    throw CsvError("row 1: unexpected header '" + line + "'");
  }

  std::vector<StepRecord> records;
  long row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) {
        break;
      }
      start = comma + 1;
    }
    if (fields.size() != 11) {
      throw CsvError("row " + std::to_string(row) + ": expected 11 fields, got " +
                     std::to_string(fields.size()));
    }
    auto num = [&](int idx) {
      const std::string& f = fields[static_cast<std::size_t>(idx)];
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0') {
        throw CsvError("row " + std::to_string(row) + ": bad number '" + f + "'");
      }
      return v;
    };

    StepRecord r;
    r.t = num(0);
    r.x = num(1);
    r.y = num(2);
    r.theta = num(3);
    r.u.x() = num(4);
    r.u.y() = num(5);
    r.delta_d = num(6);
    r.delta_theta = num(7);
    r.min_h = num(8);
    try {
      r.qp_status = parse_status(fields[9]);
    } catch (const CsvError& e) {
      throw CsvError("row " + std::to_string(row) + ": " + e.what());
    }
    r.solve_ms = num(10);
    records.push_back(r);
  }
  if (records.empty()) {
    throw CsvError("row 2: no records");
  }
  return records;
}

}  // namespace rcnav
