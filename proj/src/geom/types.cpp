#include "geom/types.hpp"

namespace parkour::geom {

Mat3 rotation_between(const Vec3& from, const Vec3& to, const Vec3& fallback_axis) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const double c = a.dot(b);
  if (c < -1.0 + 1e-12) {
    // anti-parallel: rotate half a turn about any axis orthogonal to `a`
    Vec3 axis = fallback_axis - fallback_axis.dot(a) * a;
    if (axis.squaredNorm() < 1e-20) axis = a.unitOrthogonal();
    axis.normalize();
    return Eigen::AngleAxisd(M_PI, axis).toRotationMatrix();
  }
  const Vec3 v = a.cross(b);
  const double s2 = v.squaredNorm();
  if (s2 < 1e-30) return Mat3::Identity();
  // Rodrigues with the 1/(1+c) stabilization
  Mat3 vx;
  vx << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return Mat3::Identity() + vx + vx * vx * (1.0 / (1.0 + c));
}

}  // namespace parkour::geom
