#pragma once

#include "geom/types.hpp"

namespace parkour::geom {

/// Pinhole unprojection: one point per valid depth pixel, expressed in the
/// frame given by `pose` (camera-to-world). Invalid pixels (0/NaN) are skipped.
PointCloud unproject(const DepthImage& depth, const CameraIntrinsics& intr,
                     const RigidTransform& pose = RigidTransform{});

/// Perspective projection of a world point back to pixel coordinates.
/// Returns (u, v, z_cam); z_cam <= 0 means the point is behind the camera.
Vec3 project(const Vec3& world_point, const CameraIntrinsics& intr,
             const RigidTransform& pose = RigidTransform{});

}  // namespace parkour::geom
