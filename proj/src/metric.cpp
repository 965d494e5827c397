#include "dynspanner/metric.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dynspanner {

namespace {

// Guards id-indexed arrays against absurd ids in input files.
constexpr std::uint32_t kMaxId = 1u << 26;

bool is_power_of_two(double x) {
  if (!(x >= 1.0) || !std::isfinite(x)) return false;
  int exp = 0;
  return std::frexp(x, &exp) == 0.5;
}

}  // namespace

int scale_of(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("scale_of: distance must be positive and finite");
  }
  return std::ilogb(d) + 1;
}

double pow2(int i) { return std::ldexp(1.0, i); }

MetricSpace::MetricSpace(std::size_t dim, double phi) : dim_(dim), phi_(phi) {
  if (dim == 0) throw std::invalid_argument("MetricSpace: dimension must be positive");
  if (!is_power_of_two(phi)) {
    throw std::invalid_argument("MetricSpace: phi must be a power of two >= 1");
  }
  log2_phi_ = std::ilogb(phi);
}

MetricSpace MetricSpace::from_distance_matrix(std::vector<std::vector<double>> matrix,
                                              double phi) {
  MetricSpace space(1, phi);
  const std::size_t m = matrix.size();
  for (std::size_t a = 0; a < m; ++a) {
    if (matrix[a].size() != m) {
      throw std::invalid_argument("distance matrix must be square");
    }
    for (std::size_t b = 0; b < m; ++b) {
      const double d = matrix[a][b];
      if (!(d >= 0.0) || !std::isfinite(d)) {
        throw std::invalid_argument("distance matrix entries must be finite and >= 0");
      }
      if (d != matrix[b][a]) throw std::invalid_argument("distance matrix must be symmetric");
      if ((a == b) != (d == 0.0)) {
        throw std::invalid_argument("distance matrix: zero exactly on the diagonal");
      }
    }
  }
  space.matrix_ = std::move(matrix);
  space.dim_ = 0;
  space.known_.assign(m, 1);
  space.active_.assign(m, 0);
  return space;
}

PointId MetricSpace::add_point(std::span<const double> coords) {
  return add_point(PointId{static_cast<std::uint32_t>(known_.size())}, coords);
}

PointId MetricSpace::add_point(PointId id, std::span<const double> coords) {
  if (is_matrix_backed()) {
    throw std::logic_error("add_point: matrix-backed spaces have a fixed point set");
  }
  if (coords.size() != dim_) {
    throw std::invalid_argument("add_point: expected " + std::to_string(dim_) +
                                " coordinates, got " + std::to_string(coords.size()));
  }
  for (double c : coords) {
    if (!std::isfinite(c)) throw std::invalid_argument("add_point: non-finite coordinate");
  }
  if (id.value >= kMaxId) throw std::invalid_argument("add_point: id too large");
  if (id.value < known_.size() && known_[id.value]) {
    throw std::invalid_argument("add_point: id " + to_string(id) + " already used");
  }
  if (id.value >= known_.size()) {
    known_.resize(id.value + 1, 0);
    active_.resize(id.value + 1, 0);
    coords_.resize(static_cast<std::size_t>(id.value + 1) * dim_, 0.0);
  }
  known_[id.value] = 1;
  std::copy(coords.begin(), coords.end(), coords_.begin() + id.value * dim_);
  return id;
}

bool MetricSpace::contains(PointId p) const {
  return p.value < known_.size() && known_[p.value];
}

void MetricSpace::check_known(PointId p) const {
  if (!contains(p)) throw std::out_of_range("unknown point id " + to_string(p));
}

std::span<const double> MetricSpace::coords(PointId p) const {
  check_known(p);
  return {coords_.data() + p.value * dim_, dim_};
}

double MetricSpace::distance(PointId u, PointId v) const {
  check_known(u);
  check_known(v);
  if (u == v) return 0.0;
  if (is_matrix_backed()) return matrix_[u.value][v.value];
  const double* a = coords_.data() + u.value * dim_;
  const double* b = coords_.data() + v.value * dim_;
  double sum = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

void MetricSpace::activate(PointId p) {
  check_known(p);
  if (active_[p.value]) throw std::logic_error("point " + to_string(p) + " already active");
  active_[p.value] = 1;
  ++active_count_;
}

void MetricSpace::deactivate(PointId p) {
  check_known(p);
  if (!active_[p.value]) throw std::logic_error("point " + to_string(p) + " is not active");
  active_[p.value] = 0;
  --active_count_;
}

bool MetricSpace::is_active(PointId p) const {
  return contains(p) && active_[p.value];
}

std::vector<PointId> MetricSpace::active_points() const {
  std::vector<PointId> out;
  out.reserve(active_count_);
  for (std::uint32_t i = 0; i < active_.size(); ++i) {
    if (active_[i]) out.push_back(PointId{i});
  }
  return out;
}

BoundednessReport validate_bounded(const MetricSpace& space) {
  BoundednessReport report;
  const auto pts = space.active_points();
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double d = space.distance(pts[a], pts[b]);
      if (d < 1.0 || d > space.phi()) {
        report.ok = false;
        report.violations.push_back({pts[a], pts[b], d});
      }
    }
  }
  return report;
}

std::vector<PointRecord> read_point_file(std::istream& in) {
  std::vector<PointRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long id = -1;
    if (!(fields >> id) || id < 0 || id >= kMaxId) {
      throw std::runtime_error("point file line " + std::to_string(line_no) +
                               ": bad id");
    }
    PointRecord rec{PointId{static_cast<std::uint32_t>(id)}, {}};
    double x = 0.0;
    while (fields >> x) rec.coords.push_back(x);
    if (!fields.eof()) {
      throw std::runtime_error("point file line " + std::to_string(line_no) +
                               ": bad coordinate");
    }
    if (rec.coords.empty()) {
      throw std::runtime_error("point file line " + std::to_string(line_no) +
                               ": no coordinates");
    }
    if (dim == 0) dim = rec.coords.size();
    if (rec.coords.size() != dim) {
      throw std::runtime_error("point file line " + std::to_string(line_no) +
                               ": dimension mismatch");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string to_string(PointId p) { return std::to_string(p.value); }

}  // namespace dynspanner
