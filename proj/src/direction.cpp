#include "bellsim/direction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bellsim/errors.hpp"

namespace bellsim {

namespace {
constexpr double kNormTol = 1e-12;
}

Direction::Direction(double x, double y, double z) : v_{x, y, z} {
  const double n2 = x * x + y * y + z * z;
  if (!std::isfinite(n2) || std::abs(std::sqrt(n2) - 1.0) > kNormTol) {
    throw InvalidArgument("direction is not a unit vector: (" +
                          std::to_string(x) + ", " + std::to_string(y) + ", " +
                          std::to_string(z) + ")");
  }
}

Direction Direction::normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("cannot normalize a zero or non-finite vector");
  }
  return Direction(x / n, y / n, z / n);
}

Direction Direction::from_azimuth(double phi) {
  return Direction::normalized(std::cos(phi), std::sin(phi), 0.0);
}

double dot(const Direction& a, const Direction& b) {
  return a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

double angle_between(const Direction& a, const Direction& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

bool same_direction(const Direction& a, const Direction& b, double tol) {
  return std::abs(a.x() - b.x()) <= tol && std::abs(a.y() - b.y()) <= tol &&
         std::abs(a.z() - b.z()) <= tol;
}

}  // namespace bellsim
