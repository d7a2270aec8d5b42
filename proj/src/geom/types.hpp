#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace parkour::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Semantic tags carried by labeled point clouds.
enum class PointLabel : std::uint8_t { Ground = 0, Platform = 1, Other = 2 };

struct PointCloud {
  std::vector<Vec3> points;
  std::optional<std::vector<std::uint8_t>> labels;  // same length as points when present

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  void check() const {
    for (const auto& p : points)
      if (!p.allFinite()) throw std::invalid_argument("point cloud contains non-finite point");
    if (labels && labels->size() != points.size())
      throw std::invalid_argument("label count does not match point count");
  }
};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::int32_t, 3>> triangles;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
};

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
  }

  /// this ∘ other: apply `other` first, then this.
  RigidTransform compose(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation * other.translation + translation;
    return out;
  }
};

struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// ‖RᵀR − I‖ and det checked against `tol` (default matches the registration contract).
inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  const Mat3 err = r.transpose() * r - Mat3::Identity();
  return err.cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

struct CameraIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;

  void check() const {
    if (fx <= 0 || fy <= 0) throw std::invalid_argument("intrinsics: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw std::invalid_argument("intrinsics: non-positive image size");
    if (cx < 0 || cx >= width || cy < 0 || cy >= height)
      throw std::invalid_argument("intrinsics: principal point outside image");
  }
};

/// Row-major depth map in meters. 0 and NaN both mean "no measurement".
struct DepthImage {
  int width = 0, height = 0;
  std::vector<float> values;

  static bool valid_depth(float d) { return std::isfinite(d) && d > 0.0f; }

  float at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
  float& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }

  void check() const {
    if (width <= 0 || height <= 0) throw std::invalid_argument("depth image: non-positive size");
    if (values.size() != static_cast<std::size_t>(width) * height)
      throw std::invalid_argument("depth image: value count does not match dimensions");
  }
};

inline Mat3 rotation_about_z(double yaw) {
  Mat3 r;
  r << std::cos(yaw), -std::sin(yaw), 0, std::sin(yaw), std::cos(yaw), 0, 0, 0, 1;
  return r;
}

/// Minimal rotation carrying unit vector `from` onto unit vector `to`.
/// The anti-parallel case falls back to a 180° turn about the axis given by `fallback_axis`.
Mat3 rotation_between(const Vec3& from, const Vec3& to, const Vec3& fallback_axis = Vec3::UnitX());

}  // namespace parkour::geom
