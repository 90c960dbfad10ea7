#include "bql/run_record.hpp"

#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace bql {

void RunRecord::add(std::size_t step, double ret, double normalized) {
  if (!points.empty() && step <= points.back().step)
    throw std::logic_error("RunRecord: evaluation steps must be strictly increasing");
  points.push_back({step, ret, normalized});
}

const EvalPoint& RunRecord::final() const {
  if (points.empty()) throw std::logic_error("RunRecord: no evaluation points");
  return points.back();
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_run_csv(std::ostream& os, const RunRecord& record) {
  os << "step,seed,learner,return,normalized_return\n";
  for (const auto& p : record.points)
    os << p.step << ',' << record.seed << ',' << record.learner << ',' << format_double(p.ret)
       << ',' << format_double(p.normalized) << '\n';
}

std::string run_csv(const RunRecord& record) {
  std::ostringstream os;
  write_run_csv(os, record);
  return os.str();
}

RunRecord read_run_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "step,seed,learner,return,normalized_return")
    throw std::invalid_argument("run csv: missing or unexpected header");
  RunRecord rec;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 5) throw std::invalid_argument("run csv: expected 5 columns: " + line);
    const auto seed = std::stoull(cols[1]);
    if (first) {
      rec.learner = cols[2];
      rec.seed = seed;
      first = false;
    } else if (cols[2] != rec.learner || seed != rec.seed) {
      throw std::invalid_argument("run csv: mixed learners or seeds in one file");
    }
    rec.add(std::stoull(cols[0]), std::stod(cols[3]), std::stod(cols[4]));
  }
  return rec;
}

}  // namespace bql
