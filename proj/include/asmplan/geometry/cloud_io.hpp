#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/geometry/point_cloud.hpp"

namespace asmplan {

namespace detail {

inline std::size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32") return 4;
  if (t == "double" || t == "float64") return 8;
  throw ParseError("unsupported PLY property type '" + t + "'");
}

inline double ply_read_binary(const char* data, const std::string& t) {
  auto read = [&](auto v) {
    std::memcpy(&v, data, sizeof(v));
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return read(std::int8_t{});
  if (t == "uchar" || t == "uint8") return read(std::uint8_t{});
  if (t == "short" || t == "int16") return read(std::int16_t{});
  if (t == "ushort" || t == "uint16") return read(std::uint16_t{});
  if (t == "int" || t == "int32") return read(std::int32_t{});
  if (t == "uint" || t == "uint32") return read(std::uint32_t{});
  if (t == "float" || t == "float32") return read(float{});
  return read(double{});
}

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<std::pair<std::string, std::string>> properties;  // (type, name)
  bool has_list = false;
};

}  // namespace detail

/// Reads vertex x/y/z from an ASCII or binary little-endian PLY file.
inline PointCloud read_ply(const std::filesystem::path& path, PartId part = PartId{}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open PLY file " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw ParseError(path.string() + ": missing 'ply' magic");
  std::string format;
  std::vector<detail::PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      ls >> format;
    } else if (key == "element") {
      detail::PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) throw ParseError(path.string() + ": property before element");
      std::string type, name;
      ls >> type;
      if (type == "list") {
        elements.back().has_list = true;
        std::string ct, it;
        ls >> ct >> it >> name;
        elements.back().properties.emplace_back("list", name);
      } else {
        ls >> name;
        elements.back().properties.emplace_back(type, name);
      }
    } else if (key == "end_header") {
      break;
    }
  }
  if (format != "ascii" && format != "binary_little_endian")
    throw ParseError(path.string() + ": unsupported PLY format '" + format + "'");

  PointCloud cloud;
  cloud.part = part;
  for (const auto& e : elements) {
    const bool is_vertex = e.name == "vertex";
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t i = 0; i < e.properties.size(); ++i) {
      if (e.properties[i].second == "x") ix = static_cast<int>(i);
      if (e.properties[i].second == "y") iy = static_cast<int>(i);
      if (e.properties[i].second == "z") iz = static_cast<int>(i);
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) throw ParseError(path.string() + ": vertex lacks x/y/z");
    if (format == "ascii") {
      for (std::size_t n = 0; n < e.count; ++n) {
        if (!std::getline(in, line)) throw ParseError(path.string() + ": truncated PLY body");
        if (!is_vertex) continue;
        std::istringstream ls(line);
        std::vector<double> values;
        double v;
        while (ls >> v) values.push_back(v);
        if (values.size() < e.properties.size()) throw ParseError(path.string() + ": short vertex line");
        cloud.points.emplace_back(values[ix], values[iy], values[iz]);
      }
    } else {
      if (!is_vertex) {
        if (e.has_list) break;  // vertex data already read or unreachable
        std::size_t stride = 0;
        for (const auto& [t, nm] : e.properties) stride += detail::ply_type_size(t);
        in.seekg(static_cast<std::streamoff>(stride * e.count), std::ios::cur);
        continue;
      }
      if (e.has_list) throw ParseError(path.string() + ": list properties on vertices are not supported");
      std::vector<std::size_t> offsets;
      std::size_t stride = 0;
      for (const auto& [t, nm] : e.properties) {
        offsets.push_back(stride);
        stride += detail::ply_type_size(t);
      }
      std::vector<char> buf(stride * e.count);
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw ParseError(path.string() + ": truncated PLY body");
      for (std::size_t n = 0; n < e.count; ++n) {
        const char* row = buf.data() + n * stride;
        cloud.points.emplace_back(detail::ply_read_binary(row + offsets[ix], e.properties[ix].first),
                                  detail::ply_read_binary(row + offsets[iy], e.properties[iy].first),
                                  detail::ply_read_binary(row + offsets[iz], e.properties[iz].first));
      }
    }
    if (is_vertex) break;
  }
  return cloud;
}

/// Reads whitespace-separated "x y z" lines; '#' starts a comment.
inline PointCloud read_xyz(const std::filesystem::path& path, PartId part = PartId{}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open XYZ file " + path.string());
  PointCloud cloud;
  cloud.part = part;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x)) continue;
    if (!(ls >> y >> z)) throw ParseError(path.string() + ": malformed line " + std::to_string(lineno));
    cloud.points.emplace_back(x, y, z);
  }
  return cloud;
}

inline PointCloud read_cloud(const std::filesystem::path& path, PartId part = PartId{}) {
  const auto ext = path.extension().string();
  if (ext == ".ply" || ext == ".PLY") return read_ply(path, part);
  return read_xyz(path, part);
}

inline void write_xyz(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.precision(17);
  for (const auto& p : cloud.points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

/// Writes a binary little-endian PLY with double-precision vertices.
inline void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& p : cloud.points) {
    double xyz[3] = {p.x(), p.y(), p.z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
  }
}

}  // namespace asmplan
