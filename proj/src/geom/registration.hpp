#pragma once

#include "geom/types.hpp"

namespace parkour::geom {

/// p' = s·R·p + t for every point; labels carried through unchanged.
PointCloud apply_similarity(const PointCloud& cloud, const SimilarityTransform& t);

PointCloud apply_rigid(const PointCloud& cloud, const RigidTransform& t);

/// Closed-form least-squares similarity fit (Umeyama) between clouds with
/// positional correspondence: minimizes Σ‖dst_i − (s·R·src_i + t)‖².
/// Requires at least 3 non-collinear correspondences; the recovered scale is
/// always positive.
SimilarityTransform estimate_similarity(const PointCloud& src, const PointCloud& dst);

/// Absolute relative scale error |s − 1| of the test→reference similarity fit.
/// The fit direction (test onto reference) is part of the metric's definition.
double scale_error(const PointCloud& test, const PointCloud& reference);

/// RMS residual of dst_i − T(src_i); diagnostic, not thresholded anywhere.
double registration_residual(const PointCloud& src, const PointCloud& dst,
                             const SimilarityTransform& t);

}  // namespace parkour::geom
