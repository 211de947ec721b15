#include "binpick/geometry/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "binpick/errors.hpp"

namespace binpick::geometry {

static_assert(std::endian::native == std::endian::little, "binary IO assumes a little-endian host");

namespace {

std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

/// Merges bitwise-identical vertex positions.
class VertexWelder {
 public:
  std::uint32_t add(const Vec3& v) {
    const std::array<double, 3> key{v.x(), v.y(), v.z()};
    auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(vertices_.size()));
    if (inserted) vertices_.push_back(v);
    return it->second;
  }
  std::vector<Vec3> take() { return std::move(vertices_); }

 private:
  std::map<std::array<double, 3>, std::uint32_t> index_;
  std::vector<Vec3> vertices_;
};

TriangleMesh parse_stl_binary(const std::vector<char>& data, const std::string& name) {
  std::uint32_t count = 0;
  std::memcpy(&count, data.data() + 80, 4);
  if (data.size() < 84 + static_cast<std::size_t>(count) * 50) {
    throw ParseError(name, 0, "binary STL truncated: expected " + std::to_string(count) + " facets");
  }
  VertexWelder welder;
  TriangleMesh mesh;
  mesh.triangles.reserve(count);
  for (std::uint32_t f = 0; f < count; ++f) {
    const char* rec = data.data() + 84 + static_cast<std::size_t>(f) * 50;
    Triangle tri{};
    for (int v = 0; v < 3; ++v) {
      float xyz[3];
      std::memcpy(xyz, rec + 12 + v * 12, 12);
      tri[v] = welder.add(Vec3(xyz[0], xyz[1], xyz[2]));
    }
    mesh.triangles.push_back(tri);
  }
  mesh.vertices = welder.take();
  return mesh;
}

TriangleMesh parse_stl_ascii(const std::vector<char>& data, const std::string& name) {
  std::istringstream in(std::string(data.begin(), data.end()));
  std::string line;
  std::size_t line_no = 0;
  VertexWelder welder;
  TriangleMesh mesh;
  std::vector<std::uint32_t> pending;
  bool saw_solid = false;
  bool saw_end = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    word = lower(word);
    if (word == "solid") {
      saw_solid = true;
    } else if (word == "vertex") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError(name, line_no, "vertex needs three coordinates");
      pending.push_back(welder.add(Vec3(x, y, z)));
    } else if (word == "endloop") {
      if (pending.size() != 3) {
        throw ParseError(name, line_no, "facet loop has " + std::to_string(pending.size()) +
                                            " vertices, expected 3");
      }
      mesh.triangles.push_back({pending[0], pending[1], pending[2]});
      pending.clear();
    } else if (word == "endsolid") {
      saw_end = true;
      break;
    } else if (word != "facet" && word != "outer" && word != "endfacet") {
      throw ParseError(name, line_no, "unexpected keyword '" + word + "'");
    }
  }
  if (!saw_solid) throw ParseError(name, 1, "missing 'solid' header");
  if (!saw_end || !pending.empty()) throw ParseError(name, line_no, "truncated ASCII STL");
  mesh.vertices = welder.take();
  return mesh;
}

// ---- PLY ----

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

ScalarType parse_scalar(const std::string& t, const std::string& name, std::size_t line) {
  static const std::map<std::string, ScalarType> kTypes = {
      {"char", ScalarType::Int8},     {"int8", ScalarType::Int8},
      {"uchar", ScalarType::UInt8},   {"uint8", ScalarType::UInt8},
      {"short", ScalarType::Int16},   {"int16", ScalarType::Int16},
      {"ushort", ScalarType::UInt16}, {"uint16", ScalarType::UInt16},
      {"int", ScalarType::Int32},     {"int32", ScalarType::Int32},
      {"uint", ScalarType::UInt32},   {"uint32", ScalarType::UInt32},
      {"float", ScalarType::Float32}, {"float32", ScalarType::Float32},
      {"double", ScalarType::Float64}, {"float64", ScalarType::Float64}};
  auto it = kTypes.find(t);
  if (it == kTypes.end()) throw ParseError(name, line, "unknown PLY scalar type '" + t + "'");
  return it->second;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::Int8:
    case ScalarType::UInt8:
      return 1;
    case ScalarType::Int16:
    case ScalarType::UInt16:
      return 2;
    case ScalarType::Int32:
    case ScalarType::UInt32:
    case ScalarType::Float32:
      return 4;
    case ScalarType::Float64:
      return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  ScalarType type = ScalarType::Float32;
  bool is_list = false;
  ScalarType count_type = ScalarType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  bool binary = false;
  std::vector<PlyElement> elements;
  std::size_t body_offset = 0;
  std::size_t header_lines = 0;
};

PlyHeader parse_ply_header(const std::vector<char>& data, const std::string& name) {
  PlyHeader h;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::optional<std::string> {
    if (pos >= data.size()) return std::nullopt;
    std::size_t end = pos;
    while (end < data.size() && data[end] != '\n') ++end;
    std::string line(data.begin() + static_cast<std::ptrdiff_t>(pos),
                     data.begin() + static_cast<std::ptrdiff_t>(end));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = std::min(end + 1, data.size());
    ++line_no;
    return line;
  };
  auto first = next_line();
  if (!first || *first != "ply") throw ParseError(name, 1, "missing 'ply' magic");
  bool saw_format = false;
  while (true) {
    auto line = next_line();
    if (!line) throw ParseError(name, line_no, "header not terminated by end_header");
    std::istringstream ls(*line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        h.binary = false;
      } else if (fmt == "binary_little_endian") {
        h.binary = true;
      } else {
        throw ParseError(name, line_no, "unsupported PLY format '" + fmt + "'");
      }
      saw_format = true;
    } else if (word == "element") {
      PlyElement e;
      if (!(ls >> e.name >> e.count)) throw ParseError(name, line_no, "malformed element line");
      h.elements.push_back(e);
    } else if (word == "property") {
      if (h.elements.empty()) throw ParseError(name, line_no, "property before any element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        p.is_list = true;
        p.count_type = parse_scalar(ct, name, line_no);
        p.type = parse_scalar(it, name, line_no);
      } else {
        p.type = parse_scalar(type, name, line_no);
        ls >> p.name;
      }
      if (p.name.empty()) throw ParseError(name, line_no, "property without a name");
      h.elements.back().properties.push_back(p);
    } else if (word == "end_header") {
      break;
    } else if (word != "comment" && word != "obj_info") {
      throw ParseError(name, line_no, "unexpected header keyword '" + word + "'");
    }
  }
  if (!saw_format) throw ParseError(name, line_no, "missing format line");
  h.body_offset = pos;
  h.header_lines = line_no;
  return h;
}

/// Reads PLY element data, handing each record's scalar values to a visitor.
class PlyBodyReader {
 public:
  PlyBodyReader(const std::vector<char>& data, const PlyHeader& header, std::string name)
      : data_(data), header_(header), name_(std::move(name)), pos_(header.body_offset),
        line_(header.header_lines) {
    if (!header_.binary) {
      text_.str(std::string(data.begin() + static_cast<std::ptrdiff_t>(pos_), data.end()));
    }
  }

  double read_scalar(ScalarType t) {
    if (!header_.binary) {
      double v;
      if (!(record_ >> v)) throw ParseError(name_, line_, "too few values in record");
      return v;
    }
    const std::size_t n = scalar_size(t);
    if (pos_ + n > data_.size()) throw ParseError(name_, 0, "binary PLY body truncated");
    const char* p = data_.data() + pos_;
    pos_ += n;
    switch (t) {
      case ScalarType::Int8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
      case ScalarType::UInt8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
      case ScalarType::Int16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
      case ScalarType::UInt16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
      case ScalarType::Int32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
      case ScalarType::UInt32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
      case ScalarType::Float32: { float v; std::memcpy(&v, p, 4); return v; }
      case ScalarType::Float64: { double v; std::memcpy(&v, p, 8); return v; }
    }
    return 0.0;
  }

  void begin_record() {
    if (header_.binary) return;
    std::string line;
    do {
      if (!std::getline(text_, line)) throw ParseError(name_, line_ + 1, "ASCII PLY body truncated");
      ++line_;
    } while (line.find_first_not_of(" \t\r") == std::string::npos);
    record_.clear();
    record_.str(line);
  }

  std::size_t line() const { return line_; }

 private:
  const std::vector<char>& data_;
  const PlyHeader& header_;
  std::string name_;
  std::size_t pos_;
  std::size_t line_;
  std::istringstream text_;
  std::istringstream record_;
};

struct PlyData {
  std::vector<Vec3> vertices;
  std::vector<std::vector<std::int64_t>> faces;
};

PlyData read_ply(const std::filesystem::path& path, bool want_faces) {
  const auto data = read_all(path);
  const std::string name = path.string();
  const PlyHeader header = parse_ply_header(data, name);
  PlyBodyReader reader(data, header, name);
  PlyData out;
  bool saw_vertex = false;
  for (const auto& e : header.elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    int ix = -1, iy = -1, iz = -1;
    if (is_vertex) {
      saw_vertex = true;
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        if (e.properties[k].name == "x") ix = static_cast<int>(k);
        if (e.properties[k].name == "y") iy = static_cast<int>(k);
        if (e.properties[k].name == "z") iz = static_cast<int>(k);
      }
      if (ix < 0 || iy < 0 || iz < 0) throw ParseError(name, 0, "vertex element lacks x/y/z");
      out.vertices.reserve(e.count);
    }
    for (std::size_t r = 0; r < e.count; ++r) {
      reader.begin_record();
      Vec3 v = Vec3::Zero();
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& p = e.properties[k];
        if (p.is_list) {
          const double n = reader.read_scalar(p.count_type);
          if (n < 0 || n > 1e6) throw ParseError(name, reader.line(), "bad list length");
          std::vector<std::int64_t> items(static_cast<std::size_t>(n));
          for (auto& item : items) item = static_cast<std::int64_t>(reader.read_scalar(p.type));
          if (is_face && want_faces &&
              (p.name == "vertex_indices" || p.name == "vertex_index")) {
            out.faces.push_back(std::move(items));
          }
        } else {
          const double value = reader.read_scalar(p.type);
          if (static_cast<int>(k) == ix) v.x() = value;
          if (static_cast<int>(k) == iy) v.y() = value;
          if (static_cast<int>(k) == iz) v.z() = value;
        }
      }
      if (is_vertex) {
        if (!v.allFinite()) throw ParseError(name, reader.line(), "non-finite vertex");
        out.vertices.push_back(v);
      }
    }
  }
  if (!saw_vertex) throw ParseError(name, 0, "no vertex element");
  return out;
}

void write_ply(const std::filesystem::path& path, const std::vector<Vec3>& vertices,
               const std::vector<Triangle>* faces, PlyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const bool binary = format == PlyFormat::BinaryLittleEndian;
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
  out << "element vertex " << vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (faces) {
    out << "element face " << faces->size() << "\n";
    out << "property list uchar uint vertex_indices\n";
  }
  out << "end_header\n";
  if (binary) {
    for (const auto& v : vertices) {
      const double xyz[3] = {v.x(), v.y(), v.z()};
      out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
    if (faces) {
      for (const auto& f : *faces) {
        const std::uint8_t n = 3;
        out.write(reinterpret_cast<const char*>(&n), 1);
        out.write(reinterpret_cast<const char*>(f.data()), 12);
      }
    }
  } else {
    out.precision(17);
    for (const auto& v : vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    if (faces) {
      for (const auto& f : *faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }
  }
  if (!out) throw Error("write failed for " + path.string());
}

TriangleMesh finish_mesh(TriangleMesh mesh, const std::string& name) {
  try {
    mesh.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(name, 0, e.what());
  }
  mesh.remove_degenerate();
  if (mesh.triangles.empty()) throw ParseError(name, 0, "mesh has no non-degenerate triangles");
  return mesh;
}

}  // namespace

TriangleMesh load_stl(const std::filesystem::path& path) {
  const auto data = read_all(path);
  const std::string name = path.string();
  if (data.size() >= 84) {
    std::uint32_t count = 0;
    std::memcpy(&count, data.data() + 80, 4);
    const bool looks_ascii =
        lower(std::string(data.begin(), data.begin() + 5)) == "solid" &&
        84 + static_cast<std::size_t>(count) * 50 != data.size();
    if (!looks_ascii) return finish_mesh(parse_stl_binary(data, name), name);
  }
  return finish_mesh(parse_stl_ascii(data, name), name);
}

void save_stl(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  char header[80] = "binpick binary STL";
  out.write(header, 80);
  const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
  out.write(reinterpret_cast<const char*>(&count), 4);
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const Vec3 n = mesh.normal(f);
    float rec[12];
    for (int a = 0; a < 3; ++a) rec[a] = static_cast<float>(n[a]);
    for (int v = 0; v < 3; ++v) {
      for (int a = 0; a < 3; ++a) {
        rec[3 + v * 3 + a] = static_cast<float>(mesh.vertices[mesh.triangles[f][v]][a]);
      }
    }
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), 2);
  }
  if (!out) throw Error("write failed for " + path.string());
}

TriangleMesh load_ply_mesh(const std::filesystem::path& path) {
  PlyData d = read_ply(path, true);
  TriangleMesh mesh;
  mesh.vertices = std::move(d.vertices);
  for (const auto& f : d.faces) {
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {  // fan-triangulate polygons
      for (auto idx : {f[0], f[k], f[k + 1]}) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= mesh.vertices.size()) {
          throw ParseError(path.string(), 0, "face index " + std::to_string(idx) + " out of range");
        }
      }
      mesh.triangles.push_back({static_cast<std::uint32_t>(f[0]), static_cast<std::uint32_t>(f[k]),
                                static_cast<std::uint32_t>(f[k + 1])});
    }
  }
  return finish_mesh(std::move(mesh), path.string());
}

void save_ply_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, PlyFormat format) {
  write_ply(path, mesh.vertices, &mesh.triangles, format);
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".stl") return load_stl(path);
  if (ext == ".ply") return load_ply_mesh(path);
  throw ParseError(path.string(), 0, "unsupported mesh extension '" + ext + "'");
}

PointCloud load_ply_cloud(const std::filesystem::path& path) {
  PlyData d = read_ply(path, false);
  PointCloud cloud;
  cloud.points = std::move(d.vertices);
  return cloud;
}

void save_ply_cloud(const PointCloud& cloud, const std::filesystem::path& path, PlyFormat format) {
  write_ply(path, cloud.points, nullptr, format);
}

}  // namespace binpick::geometry
