#include "tucb/audit.hpp"

#include <cmath>
#include <numbers>

namespace tucb {

AuditReport audit(std::span<const AuditRecord> records,
                  std::span<const double> alphas) {
  if (records.empty()) throw DataError("audit: empty record stream");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw DataError("audit: alpha must lie strictly in (0,1)");
    }
  }

  AuditReport report;
  report.rounds = static_cast<std::int64_t>(records.size());
  std::int64_t prev_size = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AuditRecord& r = records[i];
    if (r.t != static_cast<std::int64_t>(i + 1)) {
      throw DataError("audit: round indices must be 1..T with no gaps (got t=" +
                      std::to_string(r.t) + " at position " + std::to_string(i) + ")");
    }
    if (r.n_pre != std::max<std::int64_t>(1, r.n0_pre)) {
      throw DataError("audit: inconsistent counts at t=" + std::to_string(r.t) +
                      " (n=" + std::to_string(r.n_pre) +
                      ", n0=" + std::to_string(r.n0_pre) + ")");
    }
    if (r.partition_size < prev_size) {
      throw DataError("audit: partition sizes must be nondecreasing (t=" +
                      std::to_string(r.t) + ")");
    }
    prev_size = r.partition_size;
    report.sum1 += 1.0 / static_cast<double>(r.n_pre);
    report.sum2 += 1.0 / static_cast<double>(1 + r.n0_pre);
  }
  report.final_partition_size = records.back().partition_size;

  const double T = static_cast<double>(report.rounds);
  const double k = static_cast<double>(report.final_partition_size);
  const double e = std::numbers::e;
  report.bound1 = e * k * std::log(1.0 + (e - 1.0) * T / k);
  report.bound2 = k * (1.0 + std::log(T / k));

  report.pass = report.sum1 <= report.bound1 && report.sum2 <= report.bound2;
  for (double a : alphas) {
    AlphaTerm term;
    term.alpha = a;
    for (const AuditRecord& r : records) {
      term.sum += std::pow(1.0 / static_cast<double>(1 + r.n0_pre), a);
    }
    term.bound = std::pow(k, a) * std::pow(T, 1.0 - a) / (1.0 - a);
    term.pass = term.sum <= term.bound;
    report.pass = report.pass && term.pass;
    report.alpha_terms.push_back(term);
  }
  return report;
}

AuditRecord record_from_log(const Partition& current, const ObservationLog& prior,
                            const Eigen::VectorXd& chosen) {
  const Region& home = region_of(current, chosen);
  std::int64_t n0 = 0;
  for (const Observation& obs : prior.entries()) {
    if (region_of(current, obs.point).id == home.id) ++n0;
  }
  AuditRecord rec;
  rec.t = prior.size() + 1;
  rec.partition_size = static_cast<std::int64_t>(current.size());
  rec.n0_pre = n0;
  rec.n_pre = std::max<std::int64_t>(1, n0);
  return rec;
}

std::vector<AuditRecord> records_from_decisions(std::span<const Decision> decisions) {
  std::vector<AuditRecord> out;
  out.reserve(decisions.size());
  for (const Decision& d : decisions) {
    AuditRecord rec;
    rec.t = d.t;
    rec.partition_size = d.partition_size;
    rec.n_pre = d.n;
    rec.n0_pre = d.n0;
    out.push_back(rec);
  }
  return out;
}

}  // namespace tucb
