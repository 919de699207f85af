#pragma once

// Charts are open boxes in R^n with declared bounds; every scenario works in
// explicitly named charts and all sampling happens inside a shrunken sub-box
// to stay away from the boundary.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dirac {

struct Chart {
  std::string name;
  Eigen::VectorXd lo, hi;

  Chart() = default;
  Chart(std::string n, Eigen::VectorXd l, Eigen::VectorXd h)
      : name(std::move(n)), lo(std::move(l)), hi(std::move(h)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("chart bounds length mismatch");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (!(lo(i) <= hi(i))) throw std::invalid_argument("chart bounds out of order");
  }

  static Chart box(std::string n, int dim, double l, double h) {
    return Chart(std::move(n), Eigen::VectorXd::Constant(dim, l),
                 Eigen::VectorXd::Constant(dim, h));
  }

  int dim() const { return static_cast<int>(lo.size()); }

  // Sub-box obtained by pulling both bounds toward the center; factor in
  // (0, 1], with 1 the full box.
  Chart shrunk(double factor) const {
    Eigen::VectorXd c = 0.5 * (lo + hi);
    Eigen::VectorXd r = 0.5 * factor * (hi - lo);
    return Chart(name, c - r, c + r);
  }

  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }

  bool contains(const Eigen::VectorXd& x) const {
    if (x.size() != lo.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x(i) < lo(i) || x(i) > hi(i)) return false;
    return true;
  }
};

struct ChartPoint {
  std::string chart;
  Eigen::VectorXd x;
};

}  // namespace dirac
