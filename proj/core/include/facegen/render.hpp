#pragma once

#include "facegen/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <vector>

namespace facegen {

// Row-major RGB image, row 0 at the top, channels in [0,1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, fill) {}

  double& at(int x, int y, int c) { return pixels[index(x, y, c)]; }
  double at(int x, int y, int c) const { return pixels[index(x, y, c)]; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3 +
           static_cast<std::size_t>(c);
  }
};

inline constexpr double kBackgroundGray = 0.5;

// Second-order spherical harmonics lighting: 9 coefficients per channel,
// stored channel-major (sh[c * 9 + k]). Band order: Y00, Y1-1 (y), Y10 (z),
// Y11 (x), Y2-2 (xy), Y2-1 (yz), Y20 (3z^2-1), Y21 (xz), Y22 (x^2-y^2).
struct LightingEnv {
  std::array<double, 27> sh{};

  static LightingEnv studio();
  static LightingEnv ambient(double l00);

  double& coeff(int channel, int k) { return sh[static_cast<std::size_t>(channel * 9 + k)]; }
  double coeff(int channel, int k) const { return sh[static_cast<std::size_t>(channel * 9 + k)]; }
};

// Real SH basis values at unit direction n.
std::array<double, 9> sh_basis(const Eigen::Vector3d& n);

// Irradiance of a Lambertian surface with normal n (convolved SH lighting).
Eigen::Vector3d sh_irradiance(const LightingEnv& lighting, const Eigen::Vector3d& n);

// Orthographic framing: the box [cx +- half_w] x [cy +- half_h] is scaled to
// fill 90% of the image height (or width, whichever binds) and centered.
struct Framing {
  double center_x = 0.0;
  double center_y = 0.0;
  double half_width = 1.0;
  double half_height = 1.0;

  // Bounding box of the mesh in the image plane; throws "degenerate geometry"
  // for a zero-area box.
  static Framing fit(const FaceMesh& mesh);
};

struct RenderSettings {
  int width = 64;
  int height = 64;
  // Unset: fit to the mesh being rendered. Pipelines pin the family framing
  // so all renders share one camera.
  std::optional<Framing> framing;
  LightingEnv lighting = LightingEnv::studio();
};

Image render_frontal(const FaceMesh& mesh, const LightingEnv& lighting, int width, int height,
                     const std::optional<Framing>& framing = std::nullopt);

inline Image render_frontal(const FaceMesh& mesh, const RenderSettings& settings) {
  return render_frontal(mesh, settings.lighting, settings.width, settings.height, settings.framing);
}

// Per-vertex unit normals (area-weighted triangle normals).
std::vector<Eigen::Vector3d> vertex_normals(const FaceMesh& mesh);

}  // namespace facegen
