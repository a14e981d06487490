#include "tucb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tucb {

namespace {

std::string point_str(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

Domain::Domain(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.size() < 1) {
    throw std::invalid_argument("Domain: bounds must be nonempty and of equal size");
  }
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] < hi_[i])) {
      throw std::invalid_argument("Domain: requires lo < hi in every dimension");
    }
  }
}

bool Domain::contains(const Eigen::VectorXd& x) const {
  if (x.size() != lo_.size()) return false;
  return (x.array() >= lo_.array()).all() && (x.array() <= hi_.array()).all();
}

void Domain::require_inside(const Eigen::VectorXd& x) const {
  if (x.size() != lo_.size()) {
    throw DomainViolation("point has " + std::to_string(x.size()) +
                              " coordinates, domain has " +
                              std::to_string(lo_.size()),
                          -1);
  }
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (x[i] < lo_[i] || x[i] > hi_[i]) {
      std::ostringstream os;
      os << "point " << point_str(x) << " outside domain in dimension " << i
         << ": " << x[i] << " not in [" << lo_[i] << ", " << hi_[i] << "]";
      throw DomainViolation(os.str(), static_cast<int>(i));
    }
  }
}

bool Region::contains(const Eigen::VectorXd& x, const Domain& domain) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (x[i] < lo[i]) return false;
    if (x[i] >= hi[i]) {
      // Closed upper face only where the region touches the domain's top.
      if (!(x[i] == hi[i] && hi[i] == domain.upper()[i])) return false;
    }
  }
  return true;
}

double diameter(const Region& region, Metric metric) {
  const Eigen::ArrayXd edges = (region.hi - region.lo).array();
  switch (metric) {
    case Metric::Linf:
      return edges.maxCoeff();
    case Metric::L2:
      return std::sqrt((edges * edges).sum());
  }
  return 0.0;  // unreachable
}

Partition::Partition(Domain domain) : domain_(std::move(domain)) {
  regions_.push_back(Region{0, domain_.lower(), domain_.upper()});
  next_id_ = 1;
}

Partition::Partition(Domain domain, std::vector<Region> regions)
    : domain_(std::move(domain)), regions_(std::move(regions)) {
  if (regions_.empty()) {
    throw std::invalid_argument("Partition: needs at least one region");
  }
  std::sort(regions_.begin(), regions_.end(),
            [](const Region& a, const Region& b) { return a.id < b.id; });
  double volume = 0.0;
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    const Region& r = regions_[i];
    if (r.lo.size() != domain_.dims() || r.hi.size() != domain_.dims()) {
      throw std::invalid_argument("Partition: region dimensionality mismatch");
    }
    if (i > 0 && regions_[i - 1].id == r.id) {
      throw std::invalid_argument("Partition: duplicate region id " +
                                  std::to_string(r.id));
    }
    for (Eigen::Index k = 0; k < domain_.dims(); ++k) {
      if (!(r.lo[k] < r.hi[k])) {
        throw std::invalid_argument("Partition: empty region " +
                                    std::to_string(r.id));
      }
      if (r.lo[k] < domain_.lower()[k] || r.hi[k] > domain_.upper()[k]) {
        throw std::invalid_argument("Partition: region " + std::to_string(r.id) +
                                    " exceeds domain bounds");
      }
    }
    volume += (r.hi - r.lo).prod();
    // Pairwise disjointness: boxes overlap iff they overlap in every dim.
    for (std::size_t j = 0; j < i; ++j) {
      const Region& o = regions_[j];
      bool overlap = true;
      for (Eigen::Index k = 0; k < domain_.dims(); ++k) {
        if (r.hi[k] <= o.lo[k] || o.hi[k] <= r.lo[k]) {
          overlap = false;
          break;
        }
      }
      if (overlap) {
        throw std::invalid_argument("Partition: regions " + std::to_string(o.id) +
                                    " and " + std::to_string(r.id) + " overlap");
      }
    }
    next_id_ = std::max(next_id_, r.id + 1);
  }
  const double domain_volume =
      (domain_.upper() - domain_.lower()).prod();
  if (std::abs(volume - domain_volume) > 1e-9 * std::abs(domain_volume)) {
    throw std::invalid_argument("Partition: regions do not cover the domain");
  }
}

const Region& Partition::region(std::int64_t id) const {
  auto it = std::lower_bound(
      regions_.begin(), regions_.end(), id,
      [](const Region& r, std::int64_t key) { return r.id < key; });
  if (it == regions_.end() || it->id != id) {
    throw std::out_of_range("Partition: no region with id " + std::to_string(id));
  }
  return *it;
}

bool Partition::has_region(std::int64_t id) const {
  auto it = std::lower_bound(
      regions_.begin(), regions_.end(), id,
      [](const Region& r, std::int64_t key) { return r.id < key; });
  return it != regions_.end() && it->id == id;
}

const Region& region_of(const Partition& partition, const Eigen::VectorXd& x) {
  partition.domain().require_inside(x);
  for (const Region& r : partition.regions()) {
    if (r.contains(x, partition.domain())) return r;
  }
  // Unreachable for a valid partition: the regions cover the domain.
  throw DataError("region_of: no region contains the point " + point_str(x));
}

NestedResult verify_nested(const Partition& coarse, const Partition& fine) {
  if (!(coarse.domain() == fine.domain())) {
    throw DataError("verify_nested: partitions cover different domains");
  }
  for (const Region& f : fine.regions()) {
    // Fast path: refinement preserves ids and boxes of untouched regions.
    if (coarse.has_region(f.id)) {
      const Region& same = coarse.region(f.id);
      if (exact_equal(same.lo, f.lo) && exact_equal(same.hi, f.hi)) continue;
    }
    const Region& c = region_of(coarse, f.center());
    if (!f.box_subset_of(c)) {
      return NestedResult{false, NestedWitness{f, c}};
    }
  }
  return NestedResult{true, std::nullopt};
}

Partition split_region(const Partition& partition, std::int64_t region_id,
                       Eigen::Index dim, double threshold) {
  if (dim < 0 || dim >= partition.domain().dims()) {
    throw std::invalid_argument("split_region: dimension out of range");
  }
  const Region& parent = partition.region(region_id);
  if (!(threshold > parent.lo[dim] && threshold < parent.hi[dim])) {
    std::ostringstream os;
    os << "split_region: threshold " << threshold
       << " not strictly inside [" << parent.lo[dim] << ", " << parent.hi[dim]
       << ") of region " << region_id << " on dim " << dim;
    throw std::invalid_argument(os.str());
  }

  Partition out = partition;
  Region low = parent;
  Region high = parent;
  low.id = out.next_id_;
  low.hi[dim] = threshold;
  high.id = out.next_id_ + 1;
  high.lo[dim] = threshold;
  out.next_id_ += 2;
  out.generation_ += 1;

  auto it = std::lower_bound(
      out.regions_.begin(), out.regions_.end(), region_id,
      [](const Region& r, std::int64_t key) { return r.id < key; });
  out.regions_.erase(it);
  out.regions_.push_back(std::move(low));
  out.regions_.push_back(std::move(high));
  return out;
}

nlohmann::json to_json(const Partition& partition) {
  nlohmann::json j;
  j["dims"] = partition.domain().dims();
  nlohmann::json bounds = nlohmann::json::array();
  for (Eigen::Index i = 0; i < partition.domain().dims(); ++i) {
    bounds.push_back({partition.domain().lower()[i], partition.domain().upper()[i]});
  }
  j["bounds"] = std::move(bounds);
  nlohmann::json regions = nlohmann::json::array();
  for (const Region& r : partition.regions()) {
    nlohmann::json jr;
    jr["id"] = r.id;
    jr["lo"] = std::vector<double>(r.lo.begin(), r.lo.end());
    jr["hi"] = std::vector<double>(r.hi.begin(), r.hi.end());
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);
  return j;
}

Partition partition_from_json(const nlohmann::json& j) {
  const auto dims = j.at("dims").get<Eigen::Index>();
  Eigen::VectorXd lo(dims), hi(dims);
  const auto& bounds = j.at("bounds");
  if (static_cast<Eigen::Index>(bounds.size()) != dims) {
    throw DataError("partition_from_json: bounds size mismatch");
  }
  for (Eigen::Index i = 0; i < dims; ++i) {
    lo[i] = bounds[i].at(0).get<double>();
    hi[i] = bounds[i].at(1).get<double>();
  }
  std::vector<Region> regions;
  for (const auto& jr : j.at("regions")) {
    Region r;
    r.id = jr.at("id").get<std::int64_t>();
    const auto rl = jr.at("lo").get<std::vector<double>>();
    const auto rh = jr.at("hi").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(rl.size()) != dims ||
        static_cast<Eigen::Index>(rh.size()) != dims) {
      throw DataError("partition_from_json: region dimensionality mismatch");
    }
    r.lo = Eigen::Map<const Eigen::VectorXd>(rl.data(), dims);
    r.hi = Eigen::Map<const Eigen::VectorXd>(rh.data(), dims);
    regions.push_back(std::move(r));
  }
  return Partition(Domain(std::move(lo), std::move(hi)), std::move(regions));
}

Partition uniform_slabs(const Domain& domain, std::int64_t count) {
  if (count < 1) throw std::invalid_argument("uniform_slabs: count must be >= 1");
  const double lo = domain.lower()[0];
  const double hi = domain.upper()[0];
  std::vector<Region> regions;
  regions.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    Region r;
    r.id = k;
    r.lo = domain.lower();
    r.hi = domain.upper();
    // Endpoints computed identically for neighbours so the cover is exact.
    r.lo[0] = k == 0 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count);
    r.hi[0] = k == count - 1
                  ? hi
                  : lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(count);
    regions.push_back(std::move(r));
  }
  return Partition(domain, std::move(regions));
}

}  // namespace tucb
