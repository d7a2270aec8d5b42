#include "geom/obj.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace parkour::geom {

void write_obj(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("obj: cannot open for writing: " + path);
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  if (!out) throw std::runtime_error("obj: write failed: " + path);
}

TriMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("obj: cannot open: " + path);
  TriMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() < 2) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      double x, y, z;
      ls >> x >> y >> z;
      mesh.vertices.push_back(Vec3(x, y, z));
    } else if (tag == "f") {
      std::array<std::int32_t, 3> t{};
      for (int k = 0; k < 3; ++k) {
        std::string fv;
        ls >> fv;
        // tolerate v/vt/vn references; only the vertex index is used
        t[k] = std::stoi(fv.substr(0, fv.find('/'))) - 1;
      }
      mesh.triangles.push_back(t);
    }
  }
  return mesh;
}

}  // namespace parkour::geom
