#include "geom/camera.hpp"

namespace parkour::geom {

PointCloud unproject(const DepthImage& depth, const CameraIntrinsics& intr,
                     const RigidTransform& pose) {
  intr.check();
  depth.check();
  if (depth.width != intr.width || depth.height != intr.height)
    throw std::invalid_argument("unproject: depth dimensions do not match intrinsics");

  PointCloud cloud;
  cloud.points.reserve(depth.values.size());
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const float d = depth.at(v, u);
      if (!DepthImage::valid_depth(d)) continue;
      const double z = static_cast<double>(d);
      const Vec3 cam{(u - intr.cx) / intr.fx * z, (v - intr.cy) / intr.fy * z, z};
      cloud.points.push_back(pose.apply(cam));
    }
  }
  return cloud;
}

Vec3 project(const Vec3& world_point, const CameraIntrinsics& intr, const RigidTransform& pose) {
  const Vec3 cam = pose.inverse().apply(world_point);
  if (cam.z() <= 0) return {0, 0, cam.z()};
  return {intr.fx * cam.x() / cam.z() + intr.cx, intr.fy * cam.y() / cam.z() + intr.cy, cam.z()};
}

}  // namespace parkour::geom
