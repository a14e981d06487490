#include "tucb/run.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "tucb/audit.hpp"
#include "tucb/kernels.hpp"
#include "tucb/rng.hpp"
#include "tucb/trace.hpp"

namespace tucb {

namespace {

Variant parse_algo(const std::string& algo) {
  if (algo == "tucb") return Variant::Tucb;
  if (algo == "ctucb") return Variant::Ctucb;
  if (algo == "uniformmesh") return Variant::UniformMesh;
  if (algo == "ucb1") return Variant::Ucb1;
  throw ConfigError("unknown algorithm '" + algo + "'");
}

RefinementRule default_refinement(Variant variant) {
  switch (variant) {
    case Variant::Tucb:
    case Variant::Ctucb:
      return RefinementRule::Tree;
    case Variant::UniformMesh:
      return RefinementRule::Mesh;
    case Variant::Ucb1:
      return RefinementRule::Fixed;
  }
  return RefinementRule::Tree;
}

RefinementRule parse_refinement(const std::string& name) {
  if (name == "tree") return RefinementRule::Tree;
  if (name == "mesh") return RefinementRule::Mesh;
  if (name == "zooming") return RefinementRule::Zooming;
  if (name == "fixed") return RefinementRule::Fixed;
  throw ConfigError("unknown refinement rule '" + name + "'");
}

ExplorationForm parse_exploration(const std::string& name) {
  if (name == "paper") return ExplorationForm::PaperForm;
  if (name == "v") return ExplorationForm::VSchedule;
  if (name == "ctx") return ExplorationForm::ContextualSchedule;
  if (name == "ucb1-horizon") return ExplorationForm::Ucb1Horizon;
  throw ConfigError("unknown exploration schedule '" + name + "'");
}

bool is_contextual_objective(const std::string& name) {
  return name == "himmelblau-ctx" || name == "goldstein-ctx";
}

constexpr std::int64_t kUnlimited = std::numeric_limits<std::int64_t>::max();

}  // namespace

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["algo"] = algo;
  j["objective"] = objective;
  j["T"] = rounds;
  j["seed"] = seed;
  j["noise_seed"] = noise_seed ? *noise_seed : seed;
  j["context_seed"] = context_seed ? *context_seed : seed;
  j["noise"] = noise;
  j["refinement"] = refinement.empty() ? "(variant default)" : refinement;
  j["exploration"] = exploration;
  j["v"] = v;
  j["v1"] = v1;
  j["v2"] = v2;
  j["v3"] = v3;
  j["C"] = concentration;
  j["M"] = lipschitz_scale;
  j["eta"] = eta;
  j["max_leaves"] = max_leaves;
  j["max_depth"] = max_depth;
  j["min_leaf_diameter"] = min_leaf_diameter;
  j["feature_policy"] = feature_policy;
  j["leaf_cap_exponent"] = leaf_cap_exponent;
  j["metric"] = metric;
  j["arms"] = arms;
  j["grid_n"] = grid_n;
  if (!domain_lo.empty()) {
    j["domain_lo"] = domain_lo;
    j["domain_hi"] = domain_hi;
  }
  j["out"] = out_prefix;
  return j;
}

EngineConfig RunConfig::engine_config() const {
  EngineConfig cfg;
  cfg.variant = parse_algo(algo);
  cfg.refinement = refinement.empty() ? default_refinement(cfg.variant)
                                      : parse_refinement(refinement);
  cfg.exploration.form = parse_exploration(exploration);
  cfg.exploration.v = v;
  cfg.exploration.v1 = v1;
  cfg.exploration.v2 = v2;
  cfg.exploration.v3 = v3;
  cfg.concentration = concentration;
  cfg.lipschitz_scale = lipschitz_scale;
  cfg.horizon = rounds;
  cfg.fit.eta = eta;
  cfg.fit.max_leaves = max_leaves > 0 ? max_leaves : kUnlimited;
  cfg.fit.max_depth = max_depth > 0 ? max_depth : kUnlimited;
  cfg.fit.min_leaf_diameter = min_leaf_diameter;
  if (feature_policy == "all-features") {
    cfg.fit.feature_policy = FeaturePolicy::AllFeatures;
  } else if (feature_policy == "round-robin") {
    cfg.fit.feature_policy = FeaturePolicy::RoundRobin;
  } else {
    throw ConfigError("unknown feature policy '" + feature_policy + "'");
  }
  cfg.leaf_cap_exponent = leaf_cap_exponent;
  if (metric == "linf") {
    cfg.metric = Metric::Linf;
  } else if (metric == "l2") {
    cfg.metric = Metric::L2;
  } else {
    throw ConfigError("unknown metric '" + metric + "'");
  }
  cfg.context_dims = cfg.variant == Variant::Ctucb ? 1 : 0;
  cfg.discrete_arms = arms;
  cfg.seed = seed;
  return cfg;
}

namespace {

struct Session {
  RunConfig cfg;
  EngineConfig engine_cfg;
  // Shared ownership keeps objective addresses stable for the evaluator
  // closures while Session itself stays movable.
  std::shared_ptr<const Objective> plain;
  std::shared_ptr<const ContextualObjective> contextual;
  bool external = false;
  std::optional<Engine> engine;
  std::optional<NoisyEvaluator> noisy;
  std::mt19937_64 context_rng;
};

Session build_session(const RunConfig& cfg, bool serving) {
  Session s;
  s.cfg = cfg;
  if (cfg.rounds < 1) throw ConfigError("T must be >= 1");
  s.engine_cfg = cfg.engine_config();

  if (cfg.objective == "external") {
    if (!serving) {
      throw ConfigError("objective 'external' runs over the ask/tell protocol: use the serve subcommand");
    }
    s.external = true;
  } else if (is_contextual_objective(cfg.objective)) {
    const std::string base = cfg.objective.substr(0, cfg.objective.size() - 4);
    s.contextual = std::make_shared<const ContextualObjective>(
        Objective::rescaled(base, cfg.grid_n));
  } else {
    s.plain = std::make_shared<const Objective>(Objective::rescaled(cfg.objective, cfg.grid_n));
  }

  const Variant variant = s.engine_cfg.variant;
  if (variant == Variant::Ucb1 && cfg.arms < 1) {
    throw ConfigError(
        "ucb1 needs a discrete arm set and a horizon: pass --arms K for the arm "
        "set; the horizon is T (--T, currently " +
        std::to_string(cfg.rounds) + ")");
  }
  if (variant == Variant::Ctucb && !s.contextual && !s.external) {
    throw ConfigError("ctucb needs a contextual objective (himmelblau-ctx, goldstein-ctx) or external");
  }
  if (variant == Variant::UniformMesh && s.contextual) {
    throw ConfigError("uniformmesh does not support contextual objectives");
  }

  Domain domain = [&]() {
    if (s.external) {
      if (cfg.domain_lo.empty()) {
        return Domain(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
      }
      if (cfg.domain_lo.size() != cfg.domain_hi.size()) {
        throw ConfigError("--lo and --hi need the same number of coordinates");
      }
      return Domain(
          Eigen::Map<const Eigen::VectorXd>(cfg.domain_lo.data(),
                                            static_cast<Eigen::Index>(cfg.domain_lo.size())),
          Eigen::Map<const Eigen::VectorXd>(cfg.domain_hi.data(),
                                            static_cast<Eigen::Index>(cfg.domain_hi.size())));
    }
    if (s.contextual) {
      if (variant == Variant::Ctucb) return s.contextual->joint_domain();
      // Context-ignoring variants act on the arm interval only.
      Eigen::VectorXd lo(1), hi(1);
      lo[0] = s.contextual->joint_domain().lower()[1];
      hi[0] = s.contextual->joint_domain().upper()[1];
      return Domain(lo, hi);
    }
    return s.plain->domain();
  }();

  s.engine.emplace(Engine::make(domain, s.engine_cfg));
  if (!s.external) {
    const NoiseSpec noise = NoiseSpec::parse(cfg.noise);
    const std::uint64_t noise_seed = cfg.noise_seed ? *cfg.noise_seed : cfg.seed;
    if (s.contextual) {
      s.noisy.emplace(
          [ctx = s.contextual](const Eigen::VectorXd& joint) { return ctx->value(joint); },
          noise, noise_seed);
    } else {
      s.noisy.emplace(
          [obj = s.plain](const Eigen::VectorXd& x) { return obj->value(x); }, noise,
          noise_seed);
    }
  }
  s.context_rng =
      seeded_stream(cfg.context_seed ? *cfg.context_seed : cfg.seed, stream_tag::kContext);
  return s;
}

void attach_regret(Session& s, Decision& d) {
  if (s.external) return;
  if (s.contextual) {
    const double z = (*d.context)[0];
    d.regret = s.contextual->optimum_for(z) - s.contextual->value(z, d.arm[0]);
  } else if (s.engine_cfg.variant == Variant::Ucb1) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Eigen::VectorXd& a : s.engine->discrete_arm_points()) {
      best = std::max(best, s.plain->value(a));
    }
    d.regret = best - s.plain->value(d.arm);
  } else {
    d.regret = s.plain->optimum() - s.plain->value(d.arm);
  }
}

/// One round against an arbitrary reward callback; handles the contextual
/// plumbing shared by run and serve.
Decision session_step(Session& s,
                      const std::function<double(const Eigen::VectorXd&)>& reward_of) {
  if (s.engine_cfg.variant == Variant::Ctucb) {
    Eigen::VectorXd z(1);
    if (s.contextual) {
      z = s.contextual->draw_context(s.context_rng);
    } else {
      const auto& dom = s.engine->partition().domain();
      std::uniform_real_distribution<double> u(dom.lower()[0], dom.upper()[0]);
      z[0] = u(s.context_rng);
    }
    Decision d = s.engine->step_with_context(z, reward_of);
    attach_regret(s, d);
    return d;
  }
  if (s.contextual) {
    // Context-ignoring baseline on a contextual task: the context still
    // drives the payoff, the engine never sees it.
    Eigen::VectorXd z = s.contextual->draw_context(s.context_rng);
    Decision d = s.engine->step([&](const Eigen::VectorXd& arm) {
      Eigen::VectorXd joint(2);
      joint << z[0], arm[0];
      return reward_of(joint);
    });
    d.context = z;
    attach_regret(s, d);
    return d;
  }
  Decision d = s.engine->step(reward_of);
  attach_regret(s, d);
  return d;
}

int finish_session(Session& s, const std::vector<Decision>& decisions,
                   std::ostream& diag) {
  // Regret CSV only when the optimum is known.
  if (!s.external) {
    std::vector<RegretRow> rows;
    if (s.contextual) {
      rows = regret_accumulate(decisions, *s.contextual);
    } else if (s.engine_cfg.variant == Variant::Ucb1) {
      rows = regret_accumulate(decisions, *s.plain, s.engine->discrete_arm_points());
    } else {
      rows = regret_accumulate(decisions, *s.plain);
    }
    std::ofstream csv(s.cfg.out_prefix + "_regret.csv");
    write_regret_csv(csv, rows);
  }

  // Post-run gate: the point-scattering inequalities must hold on the trace.
  const std::vector<AuditRecord> records = records_from_decisions(decisions);
  const std::vector<double> alphas{0.3, 0.5, 0.9};
  const AuditReport report = audit(records, alphas);
  std::ofstream summary(s.cfg.out_prefix + "_audit.txt");
  auto line = [&](const std::string& text) {
    summary << text << "\n";
    diag << text << "\n";
  };
  std::ostringstream head;
  head << "audit: T=" << report.rounds << " |P_T|=" << report.final_partition_size;
  line(head.str());
  std::ostringstream l1, l2;
  l1 << "  sum1=" << report.sum1 << " bound1=" << report.bound1
     << (report.sum1 <= report.bound1 ? "  ok" : "  VIOLATED");
  line(l1.str());
  l2 << "  sum2=" << report.sum2 << " bound2=" << report.bound2
     << (report.sum2 <= report.bound2 ? "  ok" : "  VIOLATED");
  line(l2.str());
  for (const AlphaTerm& term : report.alpha_terms) {
    std::ostringstream l3;
    l3 << "  alpha=" << term.alpha << " sum3=" << term.sum << " bound3=" << term.bound
       << (term.pass ? "  ok" : "  VIOLATED");
    line(l3.str());
  }
  line(report.pass ? "audit: PASS" : "audit: FAIL");
  return report.pass ? 0 : 1;
}

}  // namespace

RunResult run_session(const RunConfig& config, std::ostream& diag) {
  RunResult result;
  std::optional<Session> session;
  try {
    session.emplace(build_session(config, /*serving=*/false));
  } catch (const ConfigError& err) {
    diag << "config error: " << err.what() << "\n";
    result.exit_code = 2;
    return result;
  }

  result.trace_path = config.out_prefix + ".jsonl";
  std::ofstream trace_file(result.trace_path);
  if (!trace_file) {
    diag << "cannot open " << result.trace_path << " for writing\n";
    result.exit_code = 2;
    return result;
  }
  TraceWriter writer(trace_file);
  writer.write_header(config.to_json());

  try {
    for (std::int64_t t = 1; t <= config.rounds; ++t) {
      Decision d = session_step(*session, std::ref(*session->noisy));
      writer.write(d);
      result.decisions.push_back(std::move(d));
    }
  } catch (const std::exception& err) {
    writer.flush();
    diag << "run failed at round " << session->engine->round() << ": " << err.what()
         << "\n";
    result.exit_code = 3;
    return result;
  }
  writer.flush();

  result.exit_code = finish_session(*session, result.decisions, diag);
  return result;
}

RunResult serve_session(const RunConfig& config, std::istream& in,
                        std::ostream& protocol_out, std::ostream& diag) {
  RunResult result;
  std::optional<Session> session;
  try {
    session.emplace(build_session(config, /*serving=*/true));
    if (!session->external) {
      throw ConfigError("serve needs --objective external");
    }
  } catch (const ConfigError& err) {
    diag << "config error: " << err.what() << "\n";
    result.exit_code = 2;
    return result;
  }

  result.trace_path = config.out_prefix + ".jsonl";
  std::ofstream trace_file(result.trace_path);
  TraceWriter writer(trace_file);
  writer.write_header(config.to_json());

  const Eigen::Index context_dims = session->engine_cfg.context_dims;
  auto exchange = [&](const Eigen::VectorXd& point) -> double {
    const std::int64_t t = session->engine->round();
    nlohmann::json ask;
    ask["type"] = "ask";
    ask["t"] = t;
    const Eigen::VectorXd arm = point.tail(point.size() - context_dims);
    ask["arm"] = std::vector<double>(arm.begin(), arm.end());
    if (context_dims > 0) {
      const Eigen::VectorXd z = point.head(context_dims);
      ask["context"] = std::vector<double>(z.begin(), z.end());
    }
    protocol_out << ask.dump() << "\n";
    protocol_out.flush();

    std::string line;
    if (!std::getline(in, line)) {
      throw ProtocolError("input closed before the tell for t=" + std::to_string(t));
    }
    nlohmann::json tell;
    try {
      tell = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError("malformed tell line for t=" + std::to_string(t));
    }
    if (!tell.contains("type") || tell["type"] != "tell" || !tell.contains("t") ||
        !tell.contains("reward") || !tell["reward"].is_number()) {
      throw ProtocolError("expected {\"type\":\"tell\",\"t\":" + std::to_string(t) +
                          ",\"reward\":...}");
    }
    if (tell["t"].get<std::int64_t>() != t) {
      throw ProtocolError("tell for wrong round: expected t=" + std::to_string(t) +
                          ", got t=" + tell["t"].dump());
    }
    return tell["reward"].get<double>();
  };

  try {
    for (std::int64_t t = 1; t <= config.rounds; ++t) {
      Decision d = session_step(*session, exchange);
      writer.write(d);
      result.decisions.push_back(std::move(d));
    }
  } catch (const std::exception& err) {
    writer.flush();
    nlohmann::json error_line;
    error_line["type"] = "error";
    error_line["reason"] = err.what();
    protocol_out << error_line.dump() << "\n";
    protocol_out.flush();
    diag << "protocol failure: " << err.what() << "\n";
    result.exit_code = 3;
    return result;
  }
  writer.flush();

  nlohmann::json done;
  done["type"] = "done";
  done["t"] = config.rounds;
  protocol_out << done.dump() << "\n";
  protocol_out.flush();

  result.exit_code = finish_session(*session, result.decisions, diag);
  return result;
}

int sweep_sessions(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                   int jobs, std::ostream& diag) {
  if (seeds.empty()) throw ConfigError("sweep: empty seed list");
  jobs = std::max(1, jobs);
  std::mutex diag_mutex;
  std::vector<int> codes(seeds.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      RunConfig cfg = base;
      cfg.seed = seeds[i];
      cfg.out_prefix = base.out_prefix + "_s" + std::to_string(seeds[i]);
      std::ostringstream local;
      const RunResult res = run_session(cfg, local);
      codes[i] = res.exit_code;
      std::lock_guard<std::mutex> lock(diag_mutex);
      diag << "seed " << seeds[i] << ": exit " << res.exit_code << "\n" << local.str();
    }
  };

  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return *std::max_element(codes.begin(), codes.end());
}

int audit_trace_file(const std::string& trace_path, const std::vector<double>& alphas,
                     std::ostream& out) {
  std::ifstream in(trace_path);
  if (!in) {
    out << "cannot open trace " << trace_path << "\n";
    return 2;
  }
  const Trace trace = read_trace(in);
  const std::vector<AuditRecord> records = records_from_decisions(trace.decisions);
  const AuditReport report = audit(records, alphas);
  out << "T=" << report.rounds << " |P_T|=" << report.final_partition_size << "\n";
  out << "sum1=" << report.sum1 << " bound1=" << report.bound1 << "\n";
  out << "sum2=" << report.sum2 << " bound2=" << report.bound2 << "\n";
  for (const AlphaTerm& term : report.alpha_terms) {
    out << "alpha=" << term.alpha << " sum3=" << term.sum << " bound3=" << term.bound
        << "\n";
  }
  out << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass ? 0 : 1;
}

int gp_demo_file(const std::string& partition_path, const std::string& data_path,
                 const std::vector<double>& alphas, double noise_var, int grid_n,
                 const std::string& out_path, std::ostream& diag) {
  std::ifstream pin(partition_path);
  if (!pin) {
    diag << "cannot open partition " << partition_path << "\n";
    return 2;
  }
  const Partition partition = partition_from_json(nlohmann::json::parse(pin));
  if (partition.domain().dims() != 1) {
    diag << "gp-demo needs a 1-D partition\n";
    return 2;
  }

  std::ifstream din(data_path);
  if (!din) {
    diag << "cannot open data " << data_path << "\n";
    return 2;
  }
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(din, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) continue;
    try {
      const double x = std::stod(a);
      const double y = std::stod(b);
      xs.push_back(x);
      ys.push_back(y);
    } catch (const std::exception&) {
      continue;  // header or comment line
    }
  }
  if (xs.empty()) {
    diag << "no data rows in " << data_path << "\n";
    return 2;
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    X(static_cast<Eigen::Index>(i), 0) = xs[i];
    y[static_cast<Eigen::Index>(i)] = ys[i];
  }

  // Empirical PSD gate on the soft grams before solving.
  for (double alpha : alphas) {
    const auto check = psd_check(gram(SoftBoxKernel(partition, alpha), X), 1e-8);
    if (!check.psd) {
      diag << "warning: soft gram at alpha=" << alpha
           << " has min eigenvalue " << check.min_eigenvalue
           << "; relying on the diagonal jitter fallback\n";
    }
  }

  const DemoCurves curves = demo_curves(partition, X, y, noise_var, grid_n, alphas);
  std::ofstream out(out_path);
  if (!out) {
    diag << "cannot open " << out_path << " for writing\n";
    return 2;
  }
  out << "x,tree_mean,gp_hard";
  for (double alpha : alphas) out << ",gp_soft@" << alpha;
  out << "\n";
  for (Eigen::Index i = 0; i < curves.x.size(); ++i) {
    out << curves.x[i] << "," << curves.tree_mean[i] << "," << curves.gp_hard[i];
    for (Eigen::Index a = 0; a < curves.gp_soft.cols(); ++a) {
      out << "," << curves.gp_soft(i, a);
    }
    out << "\n";
  }
  diag << "wrote " << out_path << "\n";
  return 0;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    const std::uint64_t first = std::stoull(text.substr(0, range_pos));
    const std::uint64_t last = std::stoull(text.substr(range_pos + 2));
    if (last < first) throw ConfigError("seed range must be ascending");
    for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
  }
  if (seeds.empty()) throw ConfigError("empty seed list '" + text + "'");
  return seeds;
}

}  // namespace tucb
