#include "tucb/trace.hpp"

#include <istream>
#include <ostream>

namespace tucb {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.begin(), v.end());
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json decision_to_json(const Decision& d) {
  nlohmann::json j;
  j["t"] = d.t;
  j["region_id"] = d.region_id;
  j["arm"] = to_std(d.arm);
  if (d.context) j["context"] = to_std(*d.context);
  j["reward"] = d.reward;
  j["ucb"] = d.ucb;
  j["m"] = d.m;
  j["n"] = d.n;
  j["n0"] = d.n0;
  j["diameter"] = d.diameter;
  if (d.regret) j["regret"] = *d.regret;
  j["p_size"] = d.partition_size;
  return j;
}

Decision decision_from_json(const nlohmann::json& j) {
  Decision d;
  d.t = j.at("t").get<std::int64_t>();
  d.region_id = j.at("region_id").get<std::int64_t>();
  d.arm = to_eigen(j.at("arm").get<std::vector<double>>());
  if (j.contains("context")) {
    d.context = to_eigen(j.at("context").get<std::vector<double>>());
  }
  d.reward = j.at("reward").get<double>();
  d.ucb = j.at("ucb").get<double>();
  d.m = j.at("m").get<double>();
  d.n = j.at("n").get<std::int64_t>();
  d.n0 = j.at("n0").get<std::int64_t>();
  d.diameter = j.at("diameter").get<double>();
  if (j.contains("regret")) d.regret = j.at("regret").get<double>();
  d.partition_size = j.at("p_size").get<std::int64_t>();
  return d;
}

void TraceWriter::write_header(const nlohmann::json& config) {
  nlohmann::json header;
  header["format_version"] = kTraceFormatVersion;
  header["config"] = config;
  (*out_) << header.dump() << "\n";
}

void TraceWriter::write(const Decision& d) {
  (*out_) << decision_to_json(d).dump() << "\n";
}

void TraceWriter::flush() { out_->flush(); }

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (!have_header) {
      if (!j.contains("format_version")) {
        throw DataError("trace: first line must be a header with format_version");
      }
      if (j.at("format_version").get<int>() != kTraceFormatVersion) {
        throw DataError("trace: unsupported format_version");
      }
      trace.header = std::move(j);
      have_header = true;
      continue;
    }
    trace.decisions.push_back(decision_from_json(j));
  }
  if (!have_header) throw DataError("trace: missing header line");
  return trace;
}

void write_regret_csv(std::ostream& out, const std::vector<RegretRow>& rows) {
  out << "t,inst_regret,cum_regret,avg_regret,best_so_far\n";
  for (const RegretRow& r : rows) {
    nlohmann::json nums = {r.inst, r.cum, r.avg, r.best_so_far};
    out << r.t << "," << nums[0].dump() << "," << nums[1].dump() << ","
        << nums[2].dump() << "," << nums[3].dump() << "\n";
  }
}

}  // namespace tucb
