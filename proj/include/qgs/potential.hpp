#pragma once

#include <cstddef>
#include <vector>

namespace qgs {

/// Piecewise-constant edge potential on [0, 1].
///
/// Segment j covers (x_j, x_{j+1}) and carries value u_j. The same potential
/// is placed on every edge of the graph, oriented from the initial vertex.
class Potential {
 public:
  /// Throws Error(InvalidPotential) unless breakpoints run strictly upward
  /// from 0 to 1 and there is one finite value per segment.
  Potential(std::vector<double> breakpoints, std::vector<double> values);

  static Potential zero() { return constant(0.0); }
  static Potential constant(double u) { return Potential({0.0, 1.0}, {u}); }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t segment_count() const { return values_.size(); }
  double segment_length(std::size_t j) const { return breakpoints_[j + 1] - breakpoints_[j]; }

  double min() const;
  double max() const;
  /// Integral over [0, 1].
  double mean() const;
  /// Value at x; at a breakpoint the right-hand segment wins (x = 1 takes the last one).
  double operator()(double x) const;

  /// U(x) = U(1 - x), compared on the canonical form (adjacent equal
  /// segments merged) with tolerance 1e-12.
  bool is_even() const;

  /// Same partition, every value shifted by c.
  Potential shifted(double c) const;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

}  // namespace qgs
