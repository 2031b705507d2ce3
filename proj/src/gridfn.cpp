#include "ifeq/gridfn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ifeq/expr.hpp"  // format_double

namespace ifeq {

GridFunction::GridFunction(std::shared_ptr<const std::vector<double>> nodes,
                           std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (!nodes_ || nodes_->size() < 2) throw ConfigError("grid needs at least 2 nodes");
  if (nodes_->size() != values_.size())
    throw ConfigError("grid has " + std::to_string(nodes_->size()) + " nodes but " +
                      std::to_string(values_.size()) + " values");
  const auto& xs = *nodes_;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) throw ConfigError("grid node is not finite");
    if (i > 0 && !(xs[i - 1] < xs[i])) throw ConfigError("grid nodes must be strictly increasing");
    if (!std::isfinite(values_[i]))
      throw ConfigError("non-finite sample at x = " + format_double(xs[i]));
  }
}

double GridFunction::operator()(double x) const {
  const auto& xs = *nodes_;
  if (x <= xs.front()) return values_.front();
  if (x >= xs.back()) return values_.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;  // xs[i] <= x < xs[i+1]
  double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return std::lerp(values_[i], values_[i + 1], t);
}

std::shared_ptr<const std::vector<double>> uniform_nodes(double halfwidth, int n) {
  if (!(halfwidth > 0) || !std::isfinite(halfwidth))
    throw ConfigError("interval halfwidth must be positive and finite");
  if (n < 2) throw ConfigError("grid needs at least 2 nodes");
  auto xs = std::make_shared<std::vector<double>>();
  xs->reserve(static_cast<std::size_t>(n));
  const double lo = -halfwidth, hi = halfwidth;
  const double denom = static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) {
    // affine blend keeps the endpoints exact
    xs->push_back((lo * (denom - i) + hi * i) / denom);
  }
  return xs;
}

GridFunction make_grid(double halfwidth, int n, const std::function<double(double)>& sampler) {
  auto xs = uniform_nodes(halfwidth, n);
  std::vector<double> vs(xs->size());
  for (std::size_t i = 0; i < xs->size(); ++i) vs[i] = sampler((*xs)[i]);
  return GridFunction(std::move(xs), std::move(vs));
}

double sup_dist(const GridFunction& a, const GridFunction& b) {
  const bool shared = a.node_handle() == b.node_handle() || a.nodes() == b.nodes();
  double m = 0.0;
  if (shared) {
    for (std::size_t i = 0; i < a.size(); ++i)
      m = std::max(m, std::fabs(a.values()[i] - b.values()[i]));
    return m;
  }
  // Different node sets: the difference is piecewise linear between union
  // nodes, so its maximum is attained at a node of one of the grids.
  for (double x : a.nodes()) m = std::max(m, std::fabs(a(x) - b(x)));
  for (double x : b.nodes()) m = std::max(m, std::fabs(a(x) - b(x)));
  return m;
}

double lipschitz_estimate(const GridFunction& g) {
  const auto& xs = g.nodes();
  const auto& vs = g.values();
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    m = std::max(m, std::fabs((vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i])));
  return m;
}

double bound_estimate(const GridFunction& g) {
  double m = 0.0;
  for (double v : g.values()) m = std::max(m, std::fabs(v));
  return m;
}

void write_csv(const GridFunction& g, std::ostream& out) {
  out << "x,value\n";
  for (std::size_t i = 0; i < g.size(); ++i)
    out << format_double(g.nodes()[i]) << ',' << format_double(g.values()[i]) << '\n';
}

}  // namespace ifeq
