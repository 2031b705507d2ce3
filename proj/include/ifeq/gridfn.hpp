#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "ifeq/errors.hpp"

namespace ifeq {

/// A bounded continuous function represented by values on a strictly
/// increasing node set spanning [-A, A], interpolated piecewise linearly
/// between nodes and extended by its endpoint values outside. Constant
/// extension keeps both the bound and the Lipschitz constant of the
/// interpolant, so grid functions stay inside the function classes the
/// iteration works on.
///
/// Immutable after construction; evaluation is pure.
class GridFunction {
 public:
  GridFunction(std::shared_ptr<const std::vector<double>> nodes, std::vector<double> values);

  /// Piecewise-linear evaluation with constant extension.
  double operator()(double x) const;

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& nodes() const { return *nodes_; }
  const std::vector<double>& values() const { return values_; }
  const std::shared_ptr<const std::vector<double>>& node_handle() const { return nodes_; }
  double lo() const { return nodes_->front(); }
  double hi() const { return nodes_->back(); }

 private:
  std::shared_ptr<const std::vector<double>> nodes_;
  std::vector<double> values_;
};

/// n uniformly spaced nodes on [-halfwidth, halfwidth], endpoints exact.
std::shared_ptr<const std::vector<double>> uniform_nodes(double halfwidth, int n);

/// Samples `sampler` on a uniform grid. Throws ConfigError on a non-finite
/// sample.
GridFunction make_grid(double halfwidth, int n, const std::function<double(double)>& sampler);

/// Supremum distance. Exact for this representation: on a shared node set it
/// is the node-wise maximum; otherwise both functions are evaluated on the
/// union of the node sets, where the difference is still piecewise linear.
double sup_dist(const GridFunction& a, const GridFunction& b);

/// Largest slope between adjacent nodes; equals the Lipschitz constant of
/// the interpolant with constant extension.
double lipschitz_estimate(const GridFunction& g);

/// Largest absolute node value; equals the sup norm of the interpolant.
double bound_estimate(const GridFunction& g);

/// CSV with header `x,value`, '.' decimal separator, '\n' line endings.
void write_csv(const GridFunction& g, std::ostream& out);

}  // namespace ifeq
