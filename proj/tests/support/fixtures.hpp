#pragma once

#include "facegen/facegen.hpp"

#include <cmath>
#include <string>

namespace facegen::testing {

// Small family for fast unit tests.
inline SyntheticFamily small_family(int identities = 20, std::uint64_t seed = 3) {
  FamilySpec spec;
  spec.identities = identities;
  spec.seed = seed;
  return generate_family(spec);
}

inline FaceCoefficients random_coefficients(int m, Rng& rng, double scale = 0.1) {
  FaceCoefficients c = FaceCoefficients::zeros(m);
  for (auto& b : c.blocks) {
    for (Eigen::Index k = 0; k < b.size(); ++k) b(k) = scale * rng.normal();
  }
  return c;
}

inline double rms(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

inline Image solid_image(int w, int h, double r, double g, double b) {
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  }
  return img;
}

inline Image random_image(int w, int h, Rng& rng) {
  Image img(w, h);
  for (double& p : img.pixels) p = rng.uniform();
  return img;
}

// Message of the facegen::Error thrown by f, or "" when nothing is thrown.
template <typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

inline bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace facegen::testing
