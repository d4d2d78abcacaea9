#include "hitchin/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace hitchin {

CVector PhaseConfiguration::xs() const {
  CVector v(size());
  for (int i = 0; i < size(); ++i) v[i] = points[i].x;
  return v;
}

CVector PhaseConfiguration::lambdas() const {
  CVector v(size());
  for (int i = 0; i < size(); ++i) v[i] = points[i].lambda;
  return v;
}

void write_csv(std::ostream& os, const TrajectoryRecord& rec) {
  os << "t,i,x_re,x_im,y_re,y_im,lambda_re,lambda_im,provenance\n";
  os << std::setprecision(17);
  for (std::size_t s = 0; s < rec.times.size(); ++s) {
    const auto& c = rec.configs[s];
    for (int i = 0; i < c.size(); ++i) {
      const auto& p = c.points[i];
      os << rec.times[s] << ',' << i << ',' << p.x.real() << ',' << p.x.imag() << ',' << p.y.real() << ','
         << p.y.imag() << ',' << p.lambda.real() << ',' << p.lambda.imag() << ',' << rec.provenance << '\n';
    }
  }
}

namespace {

template <class Dist>
double hausdorff_impl(int na, int nb, Dist d) {
  double h = 0.0;
  for (int i = 0; i < na; ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < nb; ++j) m = std::min(m, d(i, j));
    h = std::max(h, m);
  }
  for (int j = 0; j < nb; ++j) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < na; ++i) m = std::min(m, d(i, j));
    h = std::max(h, m);
  }
  return h;
}

}  // namespace

double hausdorff(const CVector& a, const CVector& b) {
  return hausdorff_impl(static_cast<int>(a.size()), static_cast<int>(b.size()),
                        [&](int i, int j) { return std::abs(a[i] - b[j]); });
}

double hausdorff_points(const PhaseConfiguration& a, const PhaseConfiguration& b) {
  return hausdorff_impl(a.size(), b.size(), [&](int i, int j) {
    const auto &p = a.points[i], &q = b.points[j];
    return std::max({std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.lambda - q.lambda)});
  });
}

}  // namespace hitchin
