#include "conflow/grid.hpp"

#include "conflow/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace conflow {

SphericalGrid::SphericalGrid(const GridSpec& spec, std::vector<std::uint8_t> mask)
    : spec_(spec), mask_(std::move(mask)) {
  if (spec_.n_theta < 3 || spec_.n_phi < 3) {
    throw GridError("grid too small: n_theta and n_phi must be at least 3");
  }
  if (!(spec_.theta_min > 0.0 && spec_.theta_min < spec_.theta_max &&
        spec_.theta_max < std::numbers::pi)) {
    throw GridError("grid: require 0 < theta_min < theta_max < pi");
  }
  if (!(spec_.phi_min < spec_.phi_max)) {
    throw GridError("grid: require phi_min < phi_max");
  }
  if (!(spec_.sin_floor > 0.0)) {
    throw GridError("grid: sin_floor must be positive");
  }
  if (spec_.phi_periodic &&
      std::abs(spec_.phi_max - spec_.phi_min - 2.0 * std::numbers::pi) > 1e-12) {
    throw GridError("grid: phi_periodic requires phi_max - phi_min == 2 pi");
  }
  if (!mask_.empty() && mask_.size() != size()) {
    throw GridError("grid: mask size does not match n_theta * n_phi");
  }

  h_theta_ = (spec_.theta_max - spec_.theta_min) / static_cast<double>(spec_.n_theta - 1);
  h_phi_ = spec_.phi_periodic
               ? (spec_.phi_max - spec_.phi_min) / static_cast<double>(spec_.n_phi)
               : (spec_.phi_max - spec_.phi_min) / static_cast<double>(spec_.n_phi - 1);

  sin_theta_.resize(spec_.n_theta);
  for (std::size_t i = 0; i < spec_.n_theta; ++i) {
    sin_theta_[i] = std::sin(theta(i));
    if (sin_theta_[i] < spec_.sin_floor) {
      std::ostringstream os;
      os << "pole proximity: sin(theta) = " << sin_theta_[i] << " < sin_floor at theta index "
         << i;
      throw GridError(os.str());
    }
  }

  kind_.assign(size(), NodeKind::Outside);
  for (std::size_t k = 0; k < size(); ++k) {
    if (mask_.empty() || mask_[k] != 0) {
      kind_[k] = NodeKind::Boundary;
    }
  }
  for (std::size_t k = 0; k < size(); ++k) {
    if (kind_[k] == NodeKind::Outside) {
      continue;
    }
    masked_.push_back(k);
    const bool all = neighbor(k, Axis::Theta, 1) && neighbor(k, Axis::Theta, -1) &&
                     neighbor(k, Axis::Phi, 1) && neighbor(k, Axis::Phi, -1);
    if (all) {
      interior_.push_back(k);
    } else {
      boundary_.push_back(k);
    }
  }
  for (std::size_t k : interior_) {
    kind_[k] = NodeKind::Interior;
  }
}

double SphericalGrid::sin_theta_half_up(std::size_t i) const {
  return std::sin(theta(i) + 0.5 * h_theta_);
}

std::optional<std::size_t> SphericalGrid::neighbor(std::size_t k, Axis axis, int step) const {
  const Node n = node(k);
  std::size_t i = n.i;
  std::size_t j = n.j;
  if (axis == Axis::Theta) {
    if (step > 0) {
      if (i + 1 >= spec_.n_theta) return std::nullopt;
      ++i;
    } else {
      if (i == 0) return std::nullopt;
      --i;
    }
  } else if (step > 0) {
    if (j + 1 >= spec_.n_phi) {
      if (!spec_.phi_periodic) return std::nullopt;
      j = 0;
    } else {
      ++j;
    }
  } else {
    if (j == 0) {
      if (!spec_.phi_periodic) return std::nullopt;
      j = spec_.n_phi - 1;
    } else {
      --j;
    }
  }
  const std::size_t m = index(i, j);
  if (kind_[m] == NodeKind::Outside) {
    return std::nullopt;
  }
  return m;
}

bool SphericalGrid::interior_connected() const {
  if (interior_.empty()) {
    return true;
  }
  std::vector<std::uint8_t> seen(size(), 0);
  std::vector<std::size_t> stack{interior_.front()};
  seen[interior_.front()] = 1;
  std::size_t count = 0;
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    ++count;
    for (Axis axis : {Axis::Theta, Axis::Phi}) {
      for (int step : {-1, 1}) {
        const auto m = neighbor(k, axis, step);
        if (m && interior(*m) && !seen[*m]) {
          seen[*m] = 1;
          stack.push_back(*m);
        }
      }
    }
  }
  return count == interior_.size();
}

bool SphericalGrid::operator==(const SphericalGrid& other) const {
  return spec_ == other.spec_ && kind_ == other.kind_;
}

GridPtr make_grid(const GridSpec& spec, std::vector<std::uint8_t> mask) {
  return std::make_shared<const SphericalGrid>(spec, std::move(mask));
}

void require_same_grid(const SphericalGrid& a, const SphericalGrid& b, const char* context) {
  if (&a != &b && !(a == b)) {
    throw GridMismatchError(std::string(context) + ": fields live on different grids");
  }
}

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->size(), fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw GridError("scalar field: value count does not match the grid");
  }
}

VectorField::VectorField(GridPtr grid)
    : v_theta(grid->size(), 0.0), v_phi(grid->size(), 0.0), grid_(std::move(grid)) {}

} // namespace conflow
