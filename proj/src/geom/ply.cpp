#include "geom/ply.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace parkour::geom {

namespace {

struct PlyHeader {
  bool binary = false;
  std::size_t vertex_count = 0;
  std::size_t face_count = 0;
  bool has_label = false;
  // only the layouts this project writes are accepted: x,y,z float32 [+ uchar label]
  std::vector<std::string> vertex_props;
};

PlyHeader parse_header(std::istream& in, const std::string& path) {
  PlyHeader h;
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
    throw std::runtime_error("ply: not a PLY file: " + path);
  std::string element;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") h.binary = false;
      else if (fmt == "binary_little_endian") h.binary = true;
      else throw std::runtime_error("ply: unsupported format '" + fmt + "' in " + path);
    } else if (tok == "element") {
      std::size_t count = 0;
      ls >> element >> count;
      if (element == "vertex") h.vertex_count = count;
      else if (element == "face") h.face_count = count;
      else throw std::runtime_error("ply: unsupported element '" + element + "' in " + path);
    } else if (tok == "property" && element == "vertex") {
      std::string type, name;
      ls >> type >> name;
      h.vertex_props.push_back(name);
      if (name == "label") {
        if (type != "uchar" && type != "uint8")
          throw std::runtime_error("ply: label property must be uchar in " + path);
        h.has_label = true;
      } else if (type != "float" && type != "float32") {
        throw std::runtime_error("ply: vertex property '" + name + "' must be float32 in " + path);
      }
    } else if (tok == "end_header") {
      return h;
    }
  }
  throw std::runtime_error("ply: missing end_header in " + path);
}

void write_header(std::ostream& out, bool binary, std::size_t nverts, bool with_label,
                  std::size_t nfaces) {
  out << "ply\n"
      << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n")
      << "element vertex " << nverts << "\n"
      << "property float x\nproperty float y\nproperty float z\n";
  if (with_label) out << "property uchar label\n";
  if (nfaces > 0) out << "element face " << nfaces << "\nproperty list uchar int vertex_indices\n";
  out << "end_header\n";
}

}  // namespace

void write_ply(const std::string& path, const PointCloud& cloud, bool binary) {
  cloud.check();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("ply: cannot open for writing: " + path);
  const bool with_label = cloud.labels.has_value();
  write_header(out, binary, cloud.size(), with_label, 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const float xyz[3] = {static_cast<float>(cloud.points[i].x()),
                          static_cast<float>(cloud.points[i].y()),
                          static_cast<float>(cloud.points[i].z())};
    if (binary) {
      out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
      if (with_label) {
        const std::uint8_t l = (*cloud.labels)[i];
        out.write(reinterpret_cast<const char*>(&l), 1);
      }
    } else {
      out << xyz[0] << ' ' << xyz[1] << ' ' << xyz[2];
      if (with_label) out << ' ' << static_cast<int>((*cloud.labels)[i]);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("ply: write failed: " + path);
}

void write_ply(const std::string& path, const TriMesh& mesh, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("ply: cannot open for writing: " + path);
  write_header(out, binary, mesh.vertex_count(), false, mesh.triangle_count());
  for (const auto& v : mesh.vertices) {
    const float xyz[3] = {static_cast<float>(v.x()), static_cast<float>(v.y()),
                          static_cast<float>(v.z())};
    if (binary) out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    else out << xyz[0] << ' ' << xyz[1] << ' ' << xyz[2] << '\n';
  }
  for (const auto& t : mesh.triangles) {
    if (binary) {
      const std::uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      out.write(reinterpret_cast<const char*>(t.data()), 3 * sizeof(std::int32_t));
    } else {
      out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
  }
  if (!out) throw std::runtime_error("ply: write failed: " + path);
}

namespace {

// reads vertices and optional labels + faces from an already-parsed header
void read_body(std::istream& in, const PlyHeader& h, const std::string& path,
               std::vector<Vec3>& verts, std::vector<std::uint8_t>* labels,
               std::vector<std::array<std::int32_t, 3>>* faces) {
  verts.resize(h.vertex_count);
  if (labels && h.has_label) labels->resize(h.vertex_count);
  if (h.binary) {
    for (std::size_t i = 0; i < h.vertex_count; ++i) {
      float xyz[3];
      in.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
      if (h.has_label) {
        std::uint8_t l;
        in.read(reinterpret_cast<char*>(&l), 1);
        if (labels) (*labels)[i] = l;
      }
      verts[i] = Vec3(xyz[0], xyz[1], xyz[2]);
    }
    if (faces) {
      faces->resize(h.face_count);
      for (std::size_t i = 0; i < h.face_count; ++i) {
        std::uint8_t n;
        in.read(reinterpret_cast<char*>(&n), 1);
        if (n != 3) throw std::runtime_error("ply: only triangle faces supported: " + path);
        in.read(reinterpret_cast<char*>((*faces)[i].data()), 3 * sizeof(std::int32_t));
      }
    }
  } else {
    for (std::size_t i = 0; i < h.vertex_count; ++i) {
      float x, y, z;
      in >> x >> y >> z;
      if (h.has_label) {
        int l;
        in >> l;
        if (labels) (*labels)[i] = static_cast<std::uint8_t>(l);
      }
      verts[i] = Vec3(x, y, z);
    }
    if (faces) {
      faces->resize(h.face_count);
      for (std::size_t i = 0; i < h.face_count; ++i) {
        int n;
        in >> n;
        if (n != 3) throw std::runtime_error("ply: only triangle faces supported: " + path);
        in >> (*faces)[i][0] >> (*faces)[i][1] >> (*faces)[i][2];
      }
    }
  }
  if (!in) throw std::runtime_error("ply: truncated file: " + path);
}

}  // namespace

PointCloud read_ply_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ply: cannot open: " + path);
  const PlyHeader h = parse_header(in, path);
  PointCloud cloud;
  std::vector<std::uint8_t> labels;
  read_body(in, h, path, cloud.points, &labels, nullptr);
  if (h.has_label) cloud.labels = std::move(labels);
  return cloud;
}

TriMesh read_ply_mesh(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ply: cannot open: " + path);
  const PlyHeader h = parse_header(in, path);
  TriMesh mesh;
  read_body(in, h, path, mesh.vertices, nullptr, &mesh.triangles);
  return mesh;
}

}  // namespace parkour::geom
