#include "tucb/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tucb/rng.hpp"

namespace tucb {

double himmelblau_raw(double x1, double x2) {
  const double g1 = x1 * x1 + x2 - 11.0;
  const double g2 = x1 + x2 * x2 - 7.0;
  return -(g1 * g1 + g2 * g2);
}

double goldstein_raw(double x1, double x2) {
  const double s = x1 + x2 + 1.0;
  const double f1 =
      1.0 + s * s * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 +
                     6.0 * x1 * x2 + 3.0 * x2 * x2);
  const double u = 2.0 * x1 - 3.0 * x2;
  const double f2 =
      30.0 + u * u * (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 -
                      36.0 * x1 * x2 + 27.0 * x2 * x2);
  return -(f1 * f2);
}

Objective Objective::rescaled(const std::string& name, int grid_n) {
  if (grid_n < 256) throw ConfigError("Objective: grid_n must be >= 256");
  Objective obj;
  obj.name_ = name;
  if (name == "himmelblau") {
    obj.raw_ = &himmelblau_raw;
    obj.native_scale_ = 10.0;  // [-0.5,0.5] -> [-5,5]
    obj.f_max_ = 0.0;          // attained at (3,2) among others
    obj.optimum_arm_ = Eigen::Vector2d(0.3, 0.2);
  } else if (name == "goldstein") {
    obj.raw_ = &goldstein_raw;
    obj.native_scale_ = 4.0;  // [-0.5,0.5] -> [-2,2]
    obj.f_max_ = -3.0;        // attained at (0,-1)
    obj.optimum_arm_ = Eigen::Vector2d(0.0, -0.25);
  } else {
    throw ConfigError("Objective: unknown benchmark '" + name + "'");
  }

  // Range minimum from an inclusive grid scan of the native domain. The
  // maxima are analytic, so the rescaled optimum is exactly 1.
  const double half = obj.native_scale_ / 2.0;
  double f_min = obj.f_max_;
  for (int i = 0; i < grid_n; ++i) {
    const double x1 = -half + (2.0 * half) * static_cast<double>(i) /
                                  static_cast<double>(grid_n - 1);
    for (int j = 0; j < grid_n; ++j) {
      const double x2 = -half + (2.0 * half) * static_cast<double>(j) /
                                    static_cast<double>(grid_n - 1);
      f_min = std::min(f_min, obj.raw_(x1, x2));
    }
  }
  obj.f_min_ = f_min;
  return obj;
}

double Objective::value(const Eigen::VectorXd& x) const {
  domain_.require_inside(x);
  const double raw = raw_(native_scale_ * x[0], native_scale_ * x[1]);
  return (raw - f_min_) / (f_max_ - f_min_);
}

NoiseSpec NoiseSpec::parse(const std::string& text) {
  NoiseSpec spec;
  std::stringstream ss(text);
  std::string kind;
  std::getline(ss, kind, ':');
  auto next_number = [&](double fallback, bool required) {
    std::string tok;
    if (!std::getline(ss, tok, ':') || tok.empty()) {
      if (required) throw ConfigError("noise spec '" + text + "' is missing sigma");
      return fallback;
    }
    return std::stod(tok);
  };
  if (kind == "none") {
    spec.kind = NoiseKind::None;
    spec.sigma = 0.0;
    spec.clip = 0.0;
  } else if (kind == "uniform") {
    spec.kind = NoiseKind::Uniform;
    spec.sigma = next_number(0.0, true);
    spec.clip = spec.sigma;
  } else if (kind == "tgauss" || kind == "truncated-gaussian") {
    spec.kind = NoiseKind::TruncatedGaussian;
    spec.sigma = next_number(0.0, true);
    spec.clip = next_number(3.0 * spec.sigma, false);
  } else {
    throw ConfigError("unknown noise kind '" + kind + "'");
  }
  if (spec.sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
  return spec;
}

std::string NoiseSpec::str() const {
  std::ostringstream os;
  switch (kind) {
    case NoiseKind::None:
      return "none";
    case NoiseKind::Uniform:
      os << "uniform:" << sigma;
      return os.str();
    case NoiseKind::TruncatedGaussian:
      os << "tgauss:" << sigma << ":" << clip;
      return os.str();
  }
  return "none";
}

NoisyEvaluator::NoisyEvaluator(std::function<double(const Eigen::VectorXd&)> f,
                               NoiseSpec spec, std::uint64_t noise_seed)
    : f_(std::move(f)), spec_(spec), rng_(seeded_stream(noise_seed, stream_tag::kNoise)) {}

double NoisyEvaluator::operator()(const Eigen::VectorXd& x) {
  double eps = 0.0;
  switch (spec_.kind) {
    case NoiseKind::None:
      break;
    case NoiseKind::Uniform:
      if (spec_.sigma > 0.0) {
        std::uniform_real_distribution<double> u(-spec_.sigma, spec_.sigma);
        eps = u(rng_);
      }
      break;
    case NoiseKind::TruncatedGaussian:
      if (spec_.sigma > 0.0) {
        std::normal_distribution<double> g(0.0, spec_.sigma);
        do {
          eps = g(rng_);
        } while (std::abs(eps) > spec_.clip);
      }
      break;
  }
  return f_(x) + eps;
}

ContextualObjective::ContextualObjective(Objective base, int opt_grid)
    : base_(std::move(base)), opt_grid_(opt_grid) {
  if (base_.domain().dims() != 2) {
    throw ConfigError("contextual_wrap: needs a 2-D objective");
  }
  if (opt_grid_ < 2) throw ConfigError("contextual_wrap: opt_grid must be >= 2");
}

double ContextualObjective::value(double z, double a) const {
  return base_.value(Eigen::Vector2d(z, a));
}

double ContextualObjective::optimum_for(double z) const {
  const double lo = base_.domain().lower()[1];
  const double hi = base_.domain().upper()[1];
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < opt_grid_; ++i) {
    const double a = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(opt_grid_ - 1);
    best = std::max(best, value(z, a));
  }
  return best;
}

Eigen::VectorXd ContextualObjective::draw_context(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(base_.domain().lower()[0],
                                           base_.domain().upper()[0]);
  Eigen::VectorXd z(1);
  z[0] = u(rng);
  return z;
}

namespace {

std::vector<RegretRow> accumulate(std::span<const Decision> decisions,
                                  const std::function<double(const Decision&)>& opt_of,
                                  const std::function<double(const Decision&)>& val_of) {
  std::vector<RegretRow> rows;
  rows.reserve(decisions.size());
  double cum = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const Decision& d : decisions) {
    const double value = val_of(d);
    RegretRow row;
    row.t = d.t;
    row.inst = opt_of(d) - value;
    cum += row.inst;
    best = std::max(best, value);
    row.cum = cum;
    row.avg = cum / static_cast<double>(rows.size() + 1);
    row.best_so_far = best;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<RegretRow> regret_accumulate(std::span<const Decision> decisions,
                                         const Objective& objective) {
  return accumulate(
      decisions, [&](const Decision&) { return objective.optimum(); },
      [&](const Decision& d) { return objective.value(d.arm); });
}

std::vector<RegretRow> regret_accumulate(std::span<const Decision> decisions,
                                         const ContextualObjective& objective) {
  return accumulate(
      decisions,
      [&](const Decision& d) {
        if (!d.context) throw DataError("contextual regret needs context fields");
        return objective.optimum_for((*d.context)[0]);
      },
      [&](const Decision& d) { return objective.value((*d.context)[0], d.arm[0]); });
}

std::vector<RegretRow> regret_accumulate(std::span<const Decision> decisions,
                                         const Objective& objective,
                                         std::span<const Eigen::VectorXd> arms) {
  double best_arm = -std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& a : arms) best_arm = std::max(best_arm, objective.value(a));
  return accumulate(
      decisions, [=](const Decision&) { return best_arm; },
      [&](const Decision& d) { return objective.value(d.arm); });
}

}  // namespace tucb
