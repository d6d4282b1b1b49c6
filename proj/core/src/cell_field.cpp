#include "gradphi/cell_field.hpp"

#include <algorithm>
#include <cmath>

#include "gradphi/errors.hpp"

namespace gradphi {

CellField::CellField(int dim, Point lower, double spacing, std::array<int, kMaxDim> counts,
                     double fill)
    : dim_(dim), lower_(lower), spacing_(spacing), counts_(counts) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("cell field dimension out of range");
  if (!(spacing > 0.0)) throw InvalidArgument("cell spacing must be positive");
  std::size_t total = 1;
  for (int i = 0; i < kMaxDim; ++i) {
    if (i >= dim) counts_[i] = 1;
    if (counts_[i] < 1) throw InvalidArgument("cell counts must be positive");
    total *= static_cast<std::size_t>(counts_[i]);
  }
  values_.assign(total, fill);
}

std::size_t CellField::flat(const std::array<int, kMaxDim>& j) const noexcept {
  std::size_t k = 0;
  for (int i = 0; i < dim_; ++i) k = k * counts_[i] + static_cast<std::size_t>(j[i]);
  return k;
}

std::array<int, kMaxDim> CellField::multi(std::size_t k) const noexcept {
  std::array<int, kMaxDim> j{};
  for (int i = dim_ - 1; i >= 0; --i) {
    j[i] = static_cast<int>(k % counts_[i]);
    k /= counts_[i];
  }
  return j;
}

Point CellField::center(std::size_t k) const noexcept {
  const auto j = multi(k);
  Point p{};
  for (int i = 0; i < dim_; ++i) p[i] = lower_[i] + (j[i] + 0.5) * spacing_;
  return p;
}

bool CellField::locate(const Point& theta, std::array<int, kMaxDim>& j) const noexcept {
  j = {};
  for (int i = 0; i < dim_; ++i) {
    const double s = (theta[i] - lower_[i]) / spacing_;
    const double f = std::floor(s);
    if (!(f >= 0.0) || f >= counts_[i]) return false;
    j[i] = static_cast<int>(f);
  }
  return true;
}

double CellField::operator()(const Point& theta) const {
  std::array<int, kMaxDim> j;
  if (!locate(theta, j)) throw InvalidArgument("point outside the cell grid");
  return values_[flat(j)];
}

namespace {

std::vector<double> breakpoints(const CellField& f, int axis, double lo, double hi) {
  std::vector<double> pts;
  const double h = f.spacing();
  const double first = f.lower()[axis];
  for (int j = 0; j <= f.counts()[axis]; ++j) {
    const double x = first + j * h;
    if (x > lo && x < hi) pts.push_back(x);
  }
  return pts;
}

}  // namespace

double l2_distance_squared(const CellField& a, const CellField& b, const DomainSpec& domain) {
  if (a.dim() != b.dim() || a.dim() != domain.dim()) {
    throw InvalidArgument("dimension mismatch in L2 comparison");
  }
  const int d = a.dim();
  const BoxShape bb = domain.bounding_box();
  std::array<std::vector<double>, kMaxDim> edges;
  for (int i = 0; i < d; ++i) {
    auto& e = edges[i];
    e.push_back(bb.lower[i]);
    e.push_back(bb.upper[i]);
    for (const auto* f : {&a, &b}) {
      const auto pts = breakpoints(*f, i, bb.lower[i], bb.upper[i]);
      e.insert(e.end(), pts.begin(), pts.end());
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }

  std::array<std::size_t, kMaxDim> n{1, 1, 1};
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    n[i] = edges[i].size() - 1;
    total *= n[i];
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    Point mid{};
    double vol = 1.0;
    for (int i = d - 1; i >= 0; --i) {
      const std::size_t j = rest % n[i];
      rest /= n[i];
      mid[i] = 0.5 * (edges[i][j] + edges[i][j + 1]);
      vol *= edges[i][j + 1] - edges[i][j];
    }
    if (!domain.contains(mid)) continue;
    const double diff = a(mid) - b(mid);
    acc += vol * diff * diff;
  }
  return acc;
}

double l2_norm_squared(const CellField& a, const DomainSpec& domain) {
  const CellField zero(a.dim(), a.lower(), a.spacing(), a.counts(), 0.0);
  return l2_distance_squared(a, zero, domain);
}

}  // namespace gradphi
