#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "geom/camera.hpp"
#include "geom/heightfield.hpp"
#include "geom/mesh_query.hpp"
#include "geom/obj.hpp"
#include "geom/ply.hpp"
#include "geom/registration.hpp"
#include "geom/types.hpp"

using namespace parkour::geom;

namespace {

PointCloud random_cloud(std::mt19937_64& rng, int n, double extent = 1.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  PointCloud c;
  c.points.reserve(n);
  for (int i = 0; i < n; ++i) c.points.push_back(Vec3(u(rng), u(rng), u(rng)));
  return c;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 axis;
  do {
    axis = Vec3(u(rng), u(rng), u(rng));
  } while (axis.norm() < 1e-6);
  axis.normalize();
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  return Eigen::AngleAxisd(ang(rng), axis).toRotationMatrix();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("parkour_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("unproject: principal-point ray") {
  CameraIntrinsics intr{100.0, 100.0, 32.0, 24.0, 64, 48};
  DepthImage d;
  d.width = 64;
  d.height = 48;
  d.values.assign(64 * 48, 0.0f);
  d.at(24, 32) = 2.0f;  // pixel exactly at (cx, cy)
  const PointCloud c = unproject(d, intr);
  REQUIRE(c.size() == 1);
  CHECK(c.points[0].isApprox(Vec3(0, 0, 2.0), 1e-12));
}

TEST_CASE("unproject: invalid depths are skipped") {
  CameraIntrinsics intr{10.0, 10.0, 1.0, 1.0, 3, 3};
  DepthImage d;
  d.width = 3;
  d.height = 3;
  d.values.assign(9, 0.0f);
  d.at(0, 0) = std::numeric_limits<float>::quiet_NaN();
  d.at(1, 1) = 1.5f;
  d.at(2, 2) = -1.0f;  // negative is not a measurement either
  const PointCloud c = unproject(d, intr);
  CHECK(c.size() == 1);
}

TEST_CASE("unproject: 2x2 hand pinhole") {
  // fx=fy=1, cx=cy=0.5, all depths 1: x=(u-0.5), y=(v-0.5), z=1.
  CameraIntrinsics intr{1.0, 1.0, 0.5, 0.5, 2, 2};
  DepthImage d;
  d.width = 2;
  d.height = 2;
  d.values.assign(4, 1.0f);
  const PointCloud c = unproject(d, intr);
  REQUIRE(c.size() == 4);
  CHECK(c.points[0].isApprox(Vec3(-0.5, -0.5, 1.0), 1e-12));
  CHECK(c.points[1].isApprox(Vec3(0.5, -0.5, 1.0), 1e-12));
  CHECK(c.points[2].isApprox(Vec3(-0.5, 0.5, 1.0), 1e-12));
  CHECK(c.points[3].isApprox(Vec3(0.5, 0.5, 1.0), 1e-12));
}

TEST_CASE("unproject: dimension mismatch throws") {
  CameraIntrinsics intr{1.0, 1.0, 0.5, 0.5, 2, 2};
  DepthImage d;
  d.width = 3;
  d.height = 2;
  d.values.assign(6, 1.0f);
  CHECK_THROWS_AS(unproject(d, intr), std::invalid_argument);
}

TEST_CASE("unproject then project reproduces pixel coordinates within 1e-6 px") {
  CameraIntrinsics intr{320.5, 318.2, 160.25, 120.75, 320, 240};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> zdist(0.3f, 6.0f);
  DepthImage d;
  d.width = 320;
  d.height = 240;
  d.values.assign(static_cast<std::size_t>(320) * 240, 0.0f);
  // sparse pattern so the point order is easy to track
  std::vector<std::pair<int, int>> pix;
  for (int r = 3; r < 240; r += 37)
    for (int col = 5; col < 320; col += 41) {
      d.at(r, col) = zdist(rng);
      pix.emplace_back(r, col);
    }
  RigidTransform pose;
  pose.rotation = random_rotation(rng);
  pose.translation = Vec3(0.3, -1.2, 0.8);
  const PointCloud c = unproject(d, intr, pose);
  REQUIRE(c.size() == pix.size());
  for (std::size_t i = 0; i < pix.size(); ++i) {
    const Vec3 uvz = project(c.points[i], intr, pose);
    CHECK(std::abs(uvz.x() - pix[i].second) < 1e-6);
    CHECK(std::abs(uvz.y() - pix[i].first) < 1e-6);
    CHECK(uvz.z() == doctest::Approx(d.at(pix[i].first, pix[i].second)).epsilon(1e-6));
  }
}

TEST_CASE("apply_similarity: identity, pure scale, yaw") {
  PointCloud c;
  c.points = {Vec3(1, 1, 1), Vec3(1, 0, 0)};
  c.labels = std::vector<std::uint8_t>{0, 1};

  SUBCASE("identity") {
    const PointCloud out = apply_similarity(c, SimilarityTransform{});
    CHECK(out.points[0].isApprox(c.points[0], 0.0));
    CHECK(out.points[1].isApprox(c.points[1], 0.0));
    REQUIRE(out.labels.has_value());
    CHECK(*out.labels == *c.labels);
  }
  SUBCASE("pure scale 2") {
    SimilarityTransform t;
    t.scale = 2.0;
    const PointCloud out = apply_similarity(c, t);
    CHECK(out.points[0].isApprox(Vec3(2, 2, 2), 1e-15));
  }
  SUBCASE("90 degree yaw") {
    SimilarityTransform t;
    t.rotation = rotation_about_z(M_PI / 2);
    const PointCloud out = apply_similarity(c, t);
    CHECK((out.points[1] - Vec3(0, 1, 0)).norm() < 1e-12);
  }
  SUBCASE("invalid scale rejected") {
    SimilarityTransform t;
    t.scale = -1.0;
    CHECK_THROWS_AS(apply_similarity(c, t), std::invalid_argument);
  }
}

TEST_CASE("estimate_similarity: self-registration") {
  std::mt19937_64 rng(11);
  const PointCloud c = random_cloud(rng, 20);
  const SimilarityTransform t = estimate_similarity(c, c);
  CHECK(std::abs(t.scale - 1.0) < 1e-12);
  CHECK(t.rotation.isApprox(Mat3::Identity(), 1e-12));
  CHECK(t.translation.norm() < 1e-12);
}

TEST_CASE("estimate_similarity: pure scale 1.5") {
  std::mt19937_64 rng(13);
  const PointCloud src = random_cloud(rng, 15);
  SimilarityTransform s;
  s.scale = 1.5;
  const PointCloud dst = apply_similarity(src, s);
  const SimilarityTransform t = estimate_similarity(src, dst);
  CHECK(std::abs(t.scale - 1.5) < 1e-9);
}

TEST_CASE("estimate_similarity: full ground-truth round trip on 100 points") {
  std::mt19937_64 rng(17);
  const PointCloud src = random_cloud(rng, 100, 2.0);
  SimilarityTransform gt;
  gt.scale = 0.7;
  gt.rotation = random_rotation(rng);
  gt.translation = Vec3(0.4, -2.0, 1.1);
  const PointCloud dst = apply_similarity(src, gt);
  const SimilarityTransform t = estimate_similarity(src, dst);
  CHECK(std::abs(t.scale - gt.scale) < 1e-6);
  CHECK((t.rotation - gt.rotation).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((t.translation - gt.translation).norm() < 1e-6);
  CHECK(registration_residual(src, dst, t) < 1e-9);
}

TEST_CASE("estimate_similarity: error cases") {
  PointCloud two;
  two.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  CHECK_THROWS_AS(estimate_similarity(two, two), std::invalid_argument);

  PointCloud line;
  for (int i = 0; i < 10; ++i) line.points.push_back(Vec3(i, 2 * i, -i));
  CHECK_THROWS_AS(estimate_similarity(line, line), std::invalid_argument);

  PointCloud degenerate;
  degenerate.points.assign(5, Vec3(1, 2, 3));
  CHECK_THROWS_AS(estimate_similarity(degenerate, degenerate), std::invalid_argument);
}

TEST_CASE("property: round-trip recovers inverse scale for random clouds") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> sdist(0.2, 5.0);
  for (int trial = 0; trial < 25; ++trial) {
    const PointCloud c = random_cloud(rng, 10 + static_cast<int>(rng() % 40));
    SimilarityTransform t;
    t.scale = sdist(rng);
    t.rotation = random_rotation(rng);
    t.translation = random_cloud(rng, 1, 3.0).points[0];
    const PointCloud moved = apply_similarity(c, t);
    const SimilarityTransform back = estimate_similarity(moved, c);
    CHECK(std::abs(back.scale - 1.0 / t.scale) < 1e-6);
    CHECK(is_rotation(back.rotation, 1e-9));
  }
}

TEST_CASE("property: estimated rotations are orthonormal det +1") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud src = random_cloud(rng, 12);
    SimilarityTransform t;
    t.scale = 1.3;
    t.rotation = random_rotation(rng);
    const PointCloud dst = apply_similarity(src, t);
    const SimilarityTransform est = estimate_similarity(src, dst);
    CHECK(is_rotation(est.rotation, 1e-9));
  }
}

TEST_CASE("scale_error: identical clouds give zero") {
  std::mt19937_64 rng(31);
  const PointCloud c = random_cloud(rng, 30);
  CHECK(scale_error(c, c) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scale_error: 1.1x reference gives 0.1 in the fit direction") {
  std::mt19937_64 rng(37);
  const PointCloud ref = random_cloud(rng, 50);
  SimilarityTransform t;
  t.scale = 1.1;
  const PointCloud test = apply_similarity(ref, t);
  // the metric fits test→reference, so a test cloud 1.1× the reference
  // registers with s = 1/1.1
  const double err = scale_error(test, ref);
  CHECK(err == doctest::Approx(std::abs(1.0 / 1.1 - 1.0)).epsilon(1e-9));
  // accounting for fit direction: a cloud that registers at s = 1.1 errs 0.1
  SimilarityTransform t2;
  t2.scale = 1.0 / 1.1;
  const PointCloud test2 = apply_similarity(ref, t2);
  CHECK(scale_error(test2, ref) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("property: scale_error invariant to rigid motion of the test cloud") {
  std::mt19937_64 rng(41);
  const PointCloud ref = random_cloud(rng, 40);
  SimilarityTransform s;
  s.scale = 1.07;
  const PointCloud test = apply_similarity(ref, s);
  const double base = scale_error(test, ref);
  for (int trial = 0; trial < 10; ++trial) {
    RigidTransform rt;
    rt.rotation = random_rotation(rng);
    rt.translation = random_cloud(rng, 1, 4.0).points[0];
    const PointCloud moved = apply_rigid(test, rt);
    CHECK(std::abs(scale_error(moved, ref) - base) < 1e-9);
  }
}

TEST_CASE("rotation_between: generic, parallel, anti-parallel") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    Vec3 a = random_cloud(rng, 1).points[0].normalized();
    Vec3 b = random_cloud(rng, 1).points[0].normalized();
    const Mat3 r = rotation_between(a, b);
    CHECK(is_rotation(r, 1e-9));
    CHECK((r * a - b).norm() < 1e-9);
  }
  const Mat3 id = rotation_between(Vec3::UnitZ(), Vec3::UnitZ());
  CHECK(id.isApprox(Mat3::Identity(), 1e-12));
  const Mat3 flip = rotation_between(Vec3::UnitZ(), -Vec3::UnitZ());
  CHECK(is_rotation(flip, 1e-9));
  CHECK((flip * Vec3::UnitZ() + Vec3::UnitZ()).norm() < 1e-9);
}

TEST_CASE("heightfield meshing: flat grid produces 2(nx-1)(ny-1) top triangles") {
  const HeightField hf = HeightField::filled(0, 0, 0.5, 4, 3, 0.0);
  const TriMesh top = mesh_heightfield(hf, 0.0, /*skirts=*/false);
  CHECK(top.triangle_count() == 2 * (4 - 1) * (3 - 1));
  CHECK(top.vertex_count() == 4 * 3);
  // winding up: every top normal has positive z
  for (const auto& tri : top.triangles) {
    const Vec3 n = (top.vertices[tri[1]] - top.vertices[tri[0]])
                       .cross(top.vertices[tri[2]] - top.vertices[tri[0]]);
    CHECK(n.z() > 0.0);
  }
  CHECK(count_degenerate_triangles(top) == 0);
}

TEST_CASE("heightfield meshing: skirts close the perimeter of a raised field") {
  HeightField hf = HeightField::filled(0, 0, 0.25, 5, 4, 0.3);
  const TriMesh m = mesh_heightfield(hf, 0.0, /*skirts=*/true);
  const std::size_t top = 2 * (5 - 1) * (4 - 1);
  const std::size_t skirt = 2 * (2 * (5 - 1) + 2 * (4 - 1));
  CHECK(m.triangle_count() == top + skirt);
  CHECK(count_degenerate_triangles(m) == 0);
  const MeshBounds b = mesh_bounds(m);
  CHECK(b.lo.z() == doctest::Approx(0.0));
  CHECK(b.hi.z() == doctest::Approx(0.3));
}

TEST_CASE("heightfield meshing: downward rays land on the surface") {
  HeightField hf = HeightField::filled(-0.5, -0.5, 0.1, 11, 11, 0.0);
  // raise a central plateau
  for (int iy = 3; iy <= 7; ++iy)
    for (int ix = 3; ix <= 7; ++ix) hf.at(ix, iy) = 0.2;
  const TriMesh m = mesh_heightfield(hf, -0.1, true);
  const auto t_plateau = ray_mesh(m, Vec3(0, 0, 1.0), Vec3(0, 0, -1));
  REQUIRE(t_plateau.has_value());
  CHECK(*t_plateau == doctest::Approx(0.8).epsilon(1e-9));
  const auto t_ground = ray_mesh(m, Vec3(-0.45, -0.45, 1.0), Vec3(0, 0, -1));
  REQUIRE(t_ground.has_value());
  CHECK(*t_ground == doctest::Approx(1.0).epsilon(1e-9));
  const auto miss = ray_mesh(m, Vec3(5.0, 5.0, 1.0), Vec3(0, 0, -1));
  CHECK(!miss.has_value());
}

TEST_CASE("ray_triangle basics") {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  const auto hit = ray_triangle(Vec3(0.25, 0.25, 1.0), Vec3(0, 0, -1), a, b, c);
  REQUIRE(hit.has_value());
  CHECK(*hit == doctest::Approx(1.0));
  CHECK(!ray_triangle(Vec3(0.9, 0.9, 1.0), Vec3(0, 0, -1), a, b, c).has_value());
  CHECK(!ray_triangle(Vec3(0.25, 0.25, -1.0), Vec3(0, 0, -1), a, b, c).has_value());
  // degenerate triangle never hits
  CHECK(!ray_triangle(Vec3(0, 0, 1), Vec3(0, 0, -1), a, a, b).has_value());
}

TEST_CASE("PLY round-trip: ascii and binary, with and without labels") {
  TempDir dir;
  std::mt19937_64 rng(47);
  PointCloud c = random_cloud(rng, 64, 3.0);
  SUBCASE("binary without labels") {
    write_ply(dir.file("c.ply"), c, true);
    const PointCloud back = read_ply_cloud(dir.file("c.ply"));
    REQUIRE(back.size() == c.size());
    CHECK(!back.labels.has_value());
    for (std::size_t i = 0; i < c.size(); ++i)
      CHECK((back.points[i] - c.points[i]).norm() < 1e-6);  // float32 storage
  }
  SUBCASE("ascii with labels") {
    c.labels = std::vector<std::uint8_t>(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) (*c.labels)[i] = static_cast<std::uint8_t>(i % 3);
    write_ply(dir.file("c.ply"), c, false);
    const PointCloud back = read_ply_cloud(dir.file("c.ply"));
    REQUIRE(back.labels.has_value());
    CHECK(*back.labels == *c.labels);
    for (std::size_t i = 0; i < c.size(); ++i)
      CHECK((back.points[i] - c.points[i]).norm() < 1e-5);
  }
  SUBCASE("binary with labels") {
    c.labels = std::vector<std::uint8_t>(c.size(), 1);
    write_ply(dir.file("c.ply"), c, true);
    const PointCloud back = read_ply_cloud(dir.file("c.ply"));
    REQUIRE(back.labels.has_value());
    CHECK(*back.labels == *c.labels);
  }
}

TEST_CASE("PLY mesh round-trip") {
  TempDir dir;
  const HeightField hf = HeightField::filled(0, 0, 0.2, 3, 3, 0.1);
  const TriMesh m = mesh_heightfield(hf, 0.0, true);
  for (bool binary : {false, true}) {
    write_ply(dir.file("m.ply"), m, binary);
    const TriMesh back = read_ply_mesh(dir.file("m.ply"));
    REQUIRE(back.vertex_count() == m.vertex_count());
    REQUIRE(back.triangle_count() == m.triangle_count());
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
      CHECK((back.vertices[i] - m.vertices[i]).norm() < 1e-6);
    CHECK(back.triangles == m.triangles);
  }
}

TEST_CASE("OBJ round-trip") {
  TempDir dir;
  HeightField hf = HeightField::filled(-1, 2, 0.5, 4, 4, 0.0);
  hf.at(1, 1) = 0.35;
  hf.at(2, 2) = 0.15;
  const TriMesh m = mesh_heightfield(hf, -0.05, true);
  write_obj(dir.file("m.obj"), m);
  const TriMesh back = read_obj(dir.file("m.obj"));
  REQUIRE(back.vertex_count() == m.vertex_count());
  REQUIRE(back.triangle_count() == m.triangle_count());
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    CHECK((back.vertices[i] - m.vertices[i]).norm() < 1e-7);
  CHECK(back.triangles == m.triangles);
}

TEST_CASE("mesh bounds and degenerate counting") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(2, 2, 2)};
  m.triangles = {{0, 1, 2}, {0, 1, 1}};
  CHECK(count_degenerate_triangles(m) == 1);
  const MeshBounds b = mesh_bounds(m);
  CHECK(b.lo.isApprox(Vec3(0, 0, 0)));
  CHECK(b.hi.isApprox(Vec3(2, 2, 2)));
}
