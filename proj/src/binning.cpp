#include "bellsim/binning.hpp"

#include <cmath>
#include <sstream>

#include "bellsim/errors.hpp"

namespace bellsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t clamp_bin(double frac, unsigned bins) {
  if (frac < 0.0) frac = 0.0;
  auto idx = static_cast<std::size_t>(frac * bins);
  if (idx >= bins) idx = bins - 1;
  return idx;
}

}  // namespace

Binner::Binner(const StateDomain& domain, unsigned bins_per_dim)
    : bins_(bins_per_dim) {
  if (bins_per_dim == 0) throw InvalidArgument("bins_per_dim must be positive");
  if (const auto* d = std::get_if<DiscreteDomain>(&domain)) {
    kind_ = Kind::Discrete;
    n_cells_ = d->size;
    if (n_cells_ == 0) throw InvalidArgument("discrete domain has no states");
  } else if (const auto* b = std::get_if<BoxDomain>(&domain)) {
    kind_ = Kind::Box;
    bounds_ = b->bounds;
    if (bounds_.empty()) throw InvalidArgument("box domain has no dimensions");
    n_cells_ = 1;
    for (const auto& lohi : bounds_) {
      if (!(lohi.second > lohi.first)) {
        throw InvalidArgument("box domain has an empty dimension");
      }
      n_cells_ *= bins_;
    }
  } else {
    kind_ = Kind::Sphere;
    n_cells_ = static_cast<std::size_t>(bins_) * bins_;
  }
}

std::size_t Binner::cell_of(const StatePayload& payload) const {
  switch (kind_) {
    case Kind::Discrete: {
      const auto* d = std::get_if<DiscreteState>(&payload);
      if (!d) throw UndiscretizableState("expected a discrete state");
      if (d->index >= n_cells_) {
        throw UndiscretizableState("discrete state index out of range");
      }
      return d->index;
    }
    case Kind::Box: {
      const auto* c = std::get_if<ContinuousState>(&payload);
      if (!c) throw UndiscretizableState("expected a continuous state");
      if (c->values.size() != bounds_.size()) {
        throw UndiscretizableState("state dimension does not match domain");
      }
      std::size_t cell = 0;
      for (std::size_t i = 0; i < bounds_.size(); ++i) {
        auto [lo, hi] = bounds_[i];
        double v = c->values[i];
        if (v < lo - 1e-12 || v > hi + 1e-12) {
          throw UndiscretizableState("state component outside domain bounds");
        }
        cell = cell * bins_ + clamp_bin((v - lo) / (hi - lo), bins_);
      }
      return cell;
    }
    case Kind::Sphere: {
      const auto* c = std::get_if<ContinuousState>(&payload);
      if (!c) throw UndiscretizableState("expected a continuous state");
      if (c->values.size() != 3) {
        throw UndiscretizableState("unit sphere state needs 3 components");
      }
      double x = c->values[0], y = c->values[1], z = c->values[2];
      double norm = std::sqrt(x * x + y * y + z * z);
      if (std::abs(norm - 1.0) > 1e-9) {
        throw UndiscretizableState("state is not on the unit sphere");
      }
      // equal-area: uniform in z, uniform in azimuth
      std::size_t zi = clamp_bin((z + 1.0) / 2.0, bins_);
      double phi = std::atan2(y, x);  // [-pi, pi]
      std::size_t pi_ = clamp_bin((phi + kPi) / (2.0 * kPi), bins_);
      return zi * bins_ + pi_;
    }
  }
  throw UndiscretizableState("unknown domain kind");
}

std::string Binner::label(std::size_t cell) const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Discrete:
      out << "state=" << cell;
      break;
    case Kind::Box: {
      std::vector<std::size_t> idx(bounds_.size());
      std::size_t rem = cell;
      for (std::size_t i = bounds_.size(); i-- > 0;) {
        idx[i] = rem % bins_;
        rem /= bins_;
      }
      out << "box[";
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) out << ",";
        out << idx[i];
      }
      out << "]";
      break;
    }
    case Kind::Sphere:
      out << "sphere[z" << cell / bins_ << ",phi" << cell % bins_ << "]";
      break;
  }
  return out.str();
}

StateDomains domains_of(const ModelSpec& model) {
  return StateDomains{model.lambda_domain, model.mu_a_domain, model.mu_b_domain};
}

}  // namespace bellsim
