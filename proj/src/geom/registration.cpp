#include "geom/registration.hpp"

#include <Eigen/SVD>

namespace parkour::geom {

PointCloud apply_similarity(const PointCloud& cloud, const SimilarityTransform& t) {
  if (t.scale <= 0) throw std::invalid_argument("similarity transform: scale must be positive");
  if (!is_rotation(t.rotation)) throw std::invalid_argument("similarity transform: invalid rotation");
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
  out.labels = cloud.labels;
  return out;
}

PointCloud apply_rigid(const PointCloud& cloud, const RigidTransform& t) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
  out.labels = cloud.labels;
  return out;
}

SimilarityTransform estimate_similarity(const PointCloud& src, const PointCloud& dst) {
  const std::size_t n = src.size();
  if (n != dst.size()) throw std::invalid_argument("estimate_similarity: size mismatch");
  if (n < 3) throw std::invalid_argument("estimate_similarity: need at least 3 correspondences");

  Vec3 mu_src = Vec3::Zero(), mu_dst = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_src += src.points[i];
    mu_dst += dst.points[i];
  }
  mu_src /= static_cast<double>(n);
  mu_dst /= static_cast<double>(n);

  Mat3 cov = Mat3::Zero();
  double var_src = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = src.points[i] - mu_src;
    const Vec3 b = dst.points[i] - mu_dst;
    cov += b * a.transpose();
    var_src += a.squaredNorm();
  }
  cov /= static_cast<double>(n);
  var_src /= static_cast<double>(n);
  if (var_src < 1e-24) throw std::invalid_argument("estimate_similarity: degenerate source cloud");

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // rank < 2 means all points collinear: rotation about the line is unobservable
  if (svd.singularValues()(1) <= svd.singularValues()(0) * 1e-12)
    throw std::invalid_argument("estimate_similarity: collinear or degenerate configuration");

  Vec3 sgn = Vec3::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0) sgn(2) = -1.0;

  SimilarityTransform t;
  t.rotation = svd.matrixU() * sgn.asDiagonal() * svd.matrixV().transpose();
  t.scale = svd.singularValues().dot(sgn) / var_src;
  if (t.scale <= 0) throw std::invalid_argument("estimate_similarity: non-positive recovered scale");
  t.translation = mu_dst - t.scale * (t.rotation * mu_src);
  return t;
}

double scale_error(const PointCloud& test, const PointCloud& reference) {
  return std::abs(estimate_similarity(test, reference).scale - 1.0);
}

double registration_residual(const PointCloud& src, const PointCloud& dst,
                             const SimilarityTransform& t) {
  if (src.size() != dst.size() || src.empty()) return 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) ss += (dst.points[i] - t.apply(src.points[i])).squaredNorm();
  return std::sqrt(ss / static_cast<double>(src.size()));
}

}  // namespace parkour::geom
