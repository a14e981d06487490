#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tucb/engine.hpp"
#include "tucb/geometry.hpp"
#include "tucb/observation.hpp"

namespace tucb {

/// One audited round: the partition and counts as they stood when the point
/// was chosen (the counts never include the point itself).
struct AuditRecord {
  std::int64_t t = 0;
  std::int64_t partition_size = 1;  // |P_{t-1}|
  std::int64_t n_pre = 1;           // n_{t-1}(a_t)
  std::int64_t n0_pre = 0;          // n0_{t-1}(a_t)
};

struct AlphaTerm {
  double alpha = 0.5;
  double sum = 0.0;    // sum of (1/(1+n0))^alpha
  double bound = 0.0;  // |P_T|^alpha T^(1-alpha) / (1-alpha)
  bool pass = false;
};

struct AuditReport {
  std::int64_t rounds = 0;                // T
  std::int64_t final_partition_size = 1;  // |P_T|
  double sum1 = 0.0;                      // sum of 1/n
  double bound1 = 0.0;                    // e k log(1 + (e-1) T/k)
  double sum2 = 0.0;                      // sum of 1/(1+n0)
  double bound2 = 0.0;                    // k (1 + log(T/k))
  std::vector<AlphaTerm> alpha_terms;
  bool pass = false;
};

/// Checks the three point-scattering inequalities on a trace. Validates the
/// record stream first: n_pre = max(1, n0_pre), rounds 1..T with no gaps,
/// nondecreasing partition sizes, alphas in (0,1). Throws DataError naming
/// the offending round on bad data.
AuditReport audit(std::span<const AuditRecord> records,
                  std::span<const double> alphas);

/// Builds the audit quantities for one round independently of the engine's
/// statistics cache: counts prior log points co-binned with `chosen` under
/// the current partition.
AuditRecord record_from_log(const Partition& current, const ObservationLog& prior,
                            const Eigen::VectorXd& chosen);

/// Lifts a decision trace into audit records.
std::vector<AuditRecord> records_from_decisions(std::span<const Decision> decisions);

}  // namespace tucb
