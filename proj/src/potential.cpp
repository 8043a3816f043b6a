#include "qgs/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qgs/error.hpp"

namespace qgs {

namespace {

constexpr double kEvenTolerance = 1e-12;

struct Canonical {
  std::vector<double> breakpoints;
  std::vector<double> values;
};

Canonical merge_equal_neighbours(const std::vector<double>& bp, const std::vector<double>& vals) {
  Canonical out;
  out.breakpoints.push_back(bp.front());
  for (std::size_t j = 0; j < vals.size(); ++j) {
    if (!out.values.empty() && std::abs(out.values.back() - vals[j]) <= kEvenTolerance) {
      out.breakpoints.back() = bp[j + 1];
      continue;
    }
    out.values.push_back(vals[j]);
    out.breakpoints.push_back(bp[j + 1]);
  }
  return out;
}

}  // namespace

Potential::Potential(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2) {
    throw Error(ErrorCode::InvalidPotential, "potential.breakpoints needs at least [0, 1]");
  }
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
    throw Error(ErrorCode::InvalidPotential, "potential.breakpoints must start at 0 and end at 1");
  }
  for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
    if (!(breakpoints_[j] < breakpoints_[j + 1])) {
      throw Error(ErrorCode::InvalidPotential,
                  "potential.breakpoints not strictly increasing at index " + std::to_string(j + 1));
    }
  }
  if (values_.size() + 1 != breakpoints_.size()) {
    throw Error(ErrorCode::InvalidPotential, "potential.values must have one entry per segment");
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j])) {
      throw Error(ErrorCode::InvalidPotential, "potential.values[" + std::to_string(j) + "] not finite");
    }
  }
}

double Potential::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Potential::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Potential::mean() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) acc += values_[j] * segment_length(j);
  return acc;
}

double Potential::operator()(double x) const {
  auto it = std::upper_bound(breakpoints_.begin() + 1, breakpoints_.end() - 1, x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

bool Potential::is_even() const {
  const Canonical c = merge_equal_neighbours(breakpoints_, values_);
  const std::size_t m = c.values.size();
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(c.values[j] - c.values[m - 1 - j]) > kEvenTolerance) return false;
  }
  for (std::size_t j = 0; j <= m; ++j) {
    if (std::abs(c.breakpoints[j] - (1.0 - c.breakpoints[m - j])) > kEvenTolerance) return false;
  }
  return true;
}

Potential Potential::shifted(double c) const {
  std::vector<double> v = values_;
  for (double& u : v) u += c;
  return Potential(breakpoints_, std::move(v));
}

}  // namespace qgs
