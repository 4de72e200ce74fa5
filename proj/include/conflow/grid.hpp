#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace conflow {

/// Geometry of a rectangular (theta, phi) patch of the unit sphere.
struct GridSpec {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  std::size_t n_theta = 0;
  std::size_t n_phi = 0;
  /// Wrap phi; requires phi_max - phi_min == 2 pi. Nodes are then spaced
  /// 2 pi / n_phi apart and phi_max itself is not a node.
  bool phi_periodic = false;
  double sin_floor = 1e-3;

  bool operator==(const GridSpec&) const = default;
};

struct Node {
  std::size_t i = 0;
  std::size_t j = 0;

  bool operator==(const Node&) const = default;
};

enum class Axis { Theta, Phi };

enum class NodeKind : std::uint8_t { Outside, Interior, Boundary };

/// Uniform tensor grid on a spherical patch with an optional node mask that
/// selects the closure of the domain. Nodes are stored row-major with the
/// theta index outer.
///
/// Interior nodes are masked nodes whose four neighbours are all masked;
/// every other masked node belongs to the discrete boundary.
class SphericalGrid {
public:
  explicit SphericalGrid(const GridSpec& spec, std::vector<std::uint8_t> mask = {});

  const GridSpec& spec() const { return spec_; }
  std::size_t n_theta() const { return spec_.n_theta; }
  std::size_t n_phi() const { return spec_.n_phi; }
  std::size_t size() const { return spec_.n_theta * spec_.n_phi; }
  double h_theta() const { return h_theta_; }
  double h_phi() const { return h_phi_; }
  bool has_mask() const { return !mask_.empty(); }

  std::size_t index(std::size_t i, std::size_t j) const { return i * spec_.n_phi + j; }
  std::size_t index(Node n) const { return index(n.i, n.j); }
  Node node(std::size_t k) const { return {k / spec_.n_phi, k % spec_.n_phi}; }

  double theta(std::size_t i) const { return spec_.theta_min + static_cast<double>(i) * h_theta_; }
  double phi(std::size_t j) const { return spec_.phi_min + static_cast<double>(j) * h_phi_; }
  double sin_theta(std::size_t i) const { return sin_theta_[i]; }
  /// sin(theta_i + h/2).
  double sin_theta_half_up(std::size_t i) const;

  bool masked(std::size_t k) const { return kind_[k] != NodeKind::Outside; }
  bool masked(std::size_t i, std::size_t j) const { return masked(index(i, j)); }
  NodeKind kind(std::size_t k) const { return kind_[k]; }
  bool interior(std::size_t k) const { return kind_[k] == NodeKind::Interior; }
  bool boundary(std::size_t k) const { return kind_[k] == NodeKind::Boundary; }

  /// Masked neighbour one step along `axis` in direction `step` (+1 or -1).
  std::optional<std::size_t> neighbor(std::size_t k, Axis axis, int step) const;

  const std::vector<std::size_t>& interior_nodes() const { return interior_; }
  const std::vector<std::size_t>& boundary_nodes() const { return boundary_; }
  const std::vector<std::size_t>& masked_nodes() const { return masked_; }

  /// True when the interior nodes form a single 4-connected component.
  bool interior_connected() const;

  bool operator==(const SphericalGrid& other) const;

private:
  GridSpec spec_;
  std::vector<std::uint8_t> mask_;
  double h_theta_ = 0.0;
  double h_phi_ = 0.0;
  std::vector<double> sin_theta_;
  std::vector<NodeKind> kind_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> masked_;
};

using GridPtr = std::shared_ptr<const SphericalGrid>;

GridPtr make_grid(const GridSpec& spec, std::vector<std::uint8_t> mask = {});

/// Throws GridMismatchError unless both grids describe the same nodes.
void require_same_grid(const SphericalGrid& a, const SphericalGrid& b, const char* context);

/// One real value per node.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  const SphericalGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(std::size_t i, std::size_t j) { return values_[grid_->index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return values_[grid_->index(i, j)]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Per-node pair (v_theta, v_phi) in the orthonormal spherical frame.
class VectorField {
public:
  VectorField() = default;
  explicit VectorField(GridPtr grid);

  const SphericalGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  std::vector<double> v_theta;
  std::vector<double> v_phi;

private:
  GridPtr grid_;
};

} // namespace conflow
