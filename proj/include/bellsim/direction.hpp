#pragma once

#include <array>

namespace bellsim {

// Unit vector in R^3. Construction validates the norm to 1e-12; use
// Direction::normalized when starting from an arbitrary vector.
class Direction {
 public:
  Direction(double x, double y, double z);

  static Direction normalized(double x, double y, double z);
  // In-plane direction (cos phi, sin phi, 0).
  static Direction from_azimuth(double phi);

  double x() const { return v_[0]; }
  double y() const { return v_[1]; }
  double z() const { return v_[2]; }
  const std::array<double, 3>& components() const { return v_; }

  bool operator==(const Direction& o) const { return v_ == o.v_; }

 private:
  std::array<double, 3> v_;
};

double dot(const Direction& a, const Direction& b);

// arccos of the clamped dot product, in [0, pi]. Clamping protects
// antiparallel pairs whose dot product rounds below -1.
double angle_between(const Direction& a, const Direction& b);

// Componentwise match within tol (used to group runs by settings).
bool same_direction(const Direction& a, const Direction& b, double tol = 1e-9);

// sign convention used everywhere: sign(0) = +1.
inline int sign_pm(double x) { return x < 0.0 ? -1 : +1; }

}  // namespace bellsim
