#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "tucb/engine.hpp"
#include "tucb/objectives.hpp"

namespace tucb {

inline constexpr int kTraceFormatVersion = 1;

nlohmann::json decision_to_json(const Decision& d);
Decision decision_from_json(const nlohmann::json& j);

/// Streaming JSONL trace: a header line with the resolved config and the
/// format version, then one decision object per round.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(&out) {}
  void write_header(const nlohmann::json& config);
  void write(const Decision& d);
  void flush();

 private:
  std::ostream* out_;
};

struct Trace {
  nlohmann::json header;
  std::vector<Decision> decisions;
};

Trace read_trace(std::istream& in);

void write_regret_csv(std::ostream& out, const std::vector<RegretRow>& rows);

}  // namespace tucb
