#include <algorithm>
#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "cadseq/geom.hpp"

namespace cadseq {

namespace {

static_assert(std::endian::native == std::endian::little, "STL writer assumes a little-endian host");

template <typename T>
void put(std::string &out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

void put_vec(std::string &out, Vec3 v) {
  put(out, static_cast<float>(v.x));
  put(out, static_cast<float>(v.y));
  put(out, static_cast<float>(v.z));
}

}  // namespace

std::string to_binary_stl(const TriMesh &mesh) {
  std::string out(80, '\0');
  const std::string_view header = "cadseq mesh";
  std::copy(header.begin(), header.end(), out.begin());
  put(out, static_cast<std::uint32_t>(mesh.triangles.size()));
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto &t = mesh.triangles[i];
    const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    Vec3 n = cross(b - a, c - a);
    const double len = norm(n);
    if (len > 0.0) n = n * (1.0 / len);
    put_vec(out, n);
    put_vec(out, a);
    put_vec(out, b);
    put_vec(out, c);
    put(out, static_cast<std::uint16_t>(std::min<std::size_t>(mesh.triangle_op[i], 0xFFFF)));
  }
  return out;
}

std::string to_mesh_json(const TriMesh &mesh) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const Vec3 &v : mesh.vertices) {
    vertices.push_back(v.x);
    vertices.push_back(v.y);
    vertices.push_back(v.z);
  }
  nlohmann::json triangles = nlohmann::json::array();
  for (const auto &t : mesh.triangles) {
    for (const std::uint32_t i : t) triangles.push_back(i);
  }
  return nlohmann::json{{"vertices", vertices}, {"triangles", triangles}, {"ops", mesh.triangle_op}}.dump();
}

}  // namespace cadseq
