#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace bql {

struct EvalPoint {
  std::size_t step = 0;  // environment steps consumed so far
  double ret = 0.0;
  double normalized = 0.0;

  friend bool operator==(const EvalPoint&, const EvalPoint&) = default;
};

/// Seeded trace of one learner run on one game.
struct RunRecord {
  std::string learner;
  std::uint64_t seed = 0;
  std::size_t game_id = 0;
  std::string fingerprint;
  std::vector<EvalPoint> points;

  void add(std::size_t step, double ret, double normalized);
  const EvalPoint& final() const;
};

/// Header `step,seed,learner,return,normalized_return`, one row per point.
void write_run_csv(std::ostream& os, const RunRecord& record);
std::string run_csv(const RunRecord& record);

/// Parses a run CSV. Every row must share the learner and seed.
RunRecord read_run_csv(std::istream& is);

/// Decimal rendering used by every CSV writer (round-trips doubles).
std::string format_double(double v);

}  // namespace bql
