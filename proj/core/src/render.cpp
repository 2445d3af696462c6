#include "facegen/render.hpp"

#include "facegen/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace facegen {

LightingEnv LightingEnv::studio() {
  // Warm key light from upper front-left over a soft ambient term.
  static constexpr std::array<double, 9> kBase = {0.70, 0.16, 0.30, -0.10, 0.02, 0.04, -0.06, -0.02, 0.03};
  static constexpr std::array<double, 3> kTint = {1.0, 0.97, 0.93};
  LightingEnv env;
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < 9; ++k) env.coeff(c, k) = kBase[static_cast<std::size_t>(k)] * kTint[static_cast<std::size_t>(c)];
  }
  return env;
}

LightingEnv LightingEnv::ambient(double l00) {
  LightingEnv env;
  for (int c = 0; c < 3; ++c) env.coeff(c, 0) = l00;
  return env;
}

std::array<double, 9> sh_basis(const Eigen::Vector3d& n) {
  const double x = n.x(), y = n.y(), z = n.z();
  return {0.28209479177387814,
          0.4886025119029199 * y,
          0.4886025119029199 * z,
          0.4886025119029199 * x,
          1.0925484305920792 * x * y,
          1.0925484305920792 * y * z,
          0.31539156525252005 * (3.0 * z * z - 1.0),
          1.0925484305920792 * x * z,
          0.5462742152960396 * (x * x - y * y)};
}

Eigen::Vector3d sh_irradiance(const LightingEnv& lighting, const Eigen::Vector3d& n) {
  // Lambertian kernel per band: pi, 2pi/3, pi/4.
  static constexpr double kPi = std::numbers::pi;
  static constexpr std::array<double, 9> kBand = {kPi,       2 * kPi / 3, 2 * kPi / 3, 2 * kPi / 3, kPi / 4,
                                                  kPi / 4,   kPi / 4,     kPi / 4,     kPi / 4};
  const auto y = sh_basis(n);
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < 9; ++k) {
      e(c) += kBand[static_cast<std::size_t>(k)] * lighting.coeff(c, k) * y[static_cast<std::size_t>(k)];
    }
  }
  return e;
}

Framing Framing::fit(const FaceMesh& mesh) {
  const int n = mesh.vertex_count();
  if (n == 0) fail(ErrorCode::kDegenerateGeometry, "degenerate geometry: empty mesh");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (int v = 0; v < n; ++v) {
    const auto p = mesh.position(v);
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  if (!(x1 - x0 > 1e-12) || !(y1 - y0 > 1e-12)) {
    fail(ErrorCode::kDegenerateGeometry, "degenerate geometry");
  }
  return Framing{0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.5 * (x1 - x0), 0.5 * (y1 - y0)};
}

std::vector<Eigen::Vector3d> vertex_normals(const FaceMesh& mesh) {
  std::vector<Eigen::Vector3d> normals(static_cast<std::size_t>(mesh.vertex_count()), Eigen::Vector3d::Zero());
  for (const auto& tri : mesh.topology()->triangles) {
    const Eigen::Vector3d a = mesh.position(tri[0]);
    const Eigen::Vector3d b = mesh.position(tri[1]);
    const Eigen::Vector3d c = mesh.position(tri[2]);
    const Eigen::Vector3d fn = (b - a).cross(c - a);  // length = 2 * area
    for (int idx : tri) normals[static_cast<std::size_t>(idx)] += fn;
  }
  for (auto& nrm : normals) {
    const double len = nrm.norm();
    nrm = len > 0.0 ? Eigen::Vector3d(nrm / len) : Eigen::Vector3d::UnitZ();
  }
  return normals;
}

Image render_frontal(const FaceMesh& mesh, const LightingEnv& lighting, int width, int height,
                     const std::optional<Framing>& framing) {
  if (width <= 0 || height <= 0) fail(ErrorCode::kInvalidSpec, "invalid spec: image size");
  const Framing fitted = Framing::fit(mesh);  // also rejects degenerate meshes
  const Framing& frame = framing ? *framing : fitted;

  const double scale = std::min(0.9 * height / (2.0 * frame.half_height), 0.9 * width / (2.0 * frame.half_width));
  const int n = mesh.vertex_count();
  std::vector<Eigen::Vector3d> screen(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const auto p = mesh.position(v);
    screen[static_cast<std::size_t>(v)] = {0.5 * width + scale * (p.x() - frame.center_x),
                                           0.5 * height - scale * (p.y() - frame.center_y), p.z()};
  }

  // Visibility pass: nearest triangle (largest z) and barycentrics per pixel.
  const auto pixel_count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> depth(pixel_count, -std::numeric_limits<double>::infinity());
  std::vector<int> owner(pixel_count, -1);
  std::vector<Eigen::Vector3d> bary(pixel_count);
  const auto& triangles = mesh.topology()->triangles;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    const Eigen::Vector3d& a = screen[static_cast<std::size_t>(tri[0])];
    const Eigen::Vector3d& b = screen[static_cast<std::size_t>(tri[1])];
    const Eigen::Vector3d& c = screen[static_cast<std::size_t>(tri[2])];
    const double area = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    if (std::abs(area) < 1e-12) continue;
    const int px0 = std::max(0, static_cast<int>(std::floor(std::min({a.x(), b.x(), c.x()}) - 0.5)));
    const int px1 = std::min(width - 1, static_cast<int>(std::ceil(std::max({a.x(), b.x(), c.x()}) - 0.5)));
    const int py0 = std::max(0, static_cast<int>(std::floor(std::min({a.y(), b.y(), c.y()}) - 0.5)));
    const int py1 = std::min(height - 1, static_cast<int>(std::ceil(std::max({a.y(), b.y(), c.y()}) - 0.5)));
    for (int py = py0; py <= py1; ++py) {
      const double sy = py + 0.5;
      for (int px = px0; px <= px1; ++px) {
        const double sx = px + 0.5;
        const double w0 = ((b.x() - sx) * (c.y() - sy) - (b.y() - sy) * (c.x() - sx)) / area;
        const double w1 = ((c.x() - sx) * (a.y() - sy) - (c.y() - sy) * (a.x() - sx)) / area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        const double z = w0 * a.z() + w1 * b.z() + w2 * c.z();
        const std::size_t idx = static_cast<std::size_t>(py) * static_cast<std::size_t>(width) + static_cast<std::size_t>(px);
        if (z > depth[idx]) {
          depth[idx] = z;
          owner[idx] = static_cast<int>(t);
          bary[idx] = {w0, w1, w2};
        }
      }
    }
  }

  // Shading pass.
  const auto normals = vertex_normals(mesh);
  Image image(width, height, kBackgroundGray);
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      const std::size_t idx = static_cast<std::size_t>(py) * static_cast<std::size_t>(width) + static_cast<std::size_t>(px);
      if (owner[idx] < 0) continue;
      const auto& tri = triangles[static_cast<std::size_t>(owner[idx])];
      const Eigen::Vector3d& w = bary[idx];
      Eigen::Vector3d albedo = Eigen::Vector3d::Zero();
      Eigen::Vector3d normal = Eigen::Vector3d::Zero();
      for (int k = 0; k < 3; ++k) {
        albedo += w(k) * mesh.color(tri[static_cast<std::size_t>(k)]);
        normal += w(k) * normals[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])];
      }
      const double len = normal.norm();
      normal = len > 0.0 ? Eigen::Vector3d(normal / len) : Eigen::Vector3d::UnitZ();
      const Eigen::Vector3d e = sh_irradiance(lighting, normal);
      for (int c = 0; c < 3; ++c) image.at(px, py, c) = std::clamp(albedo(c) * e(c), 0.0, 1.0);
    }
  }
  return image;
}

}  // namespace facegen
