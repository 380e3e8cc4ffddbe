#include "bellsim/exact_table.hpp"

#include <cmath>
#include <string>

#include "bellsim/errors.hpp"

namespace bellsim {

namespace {
std::string default_label(const char* prefix, std::size_t i) {
  return std::string(prefix) + std::to_string(i);
}
}  // namespace

void ExactJointTable::allocate() {
  p.assign(policy.size() * n_lambda * n_mu_a * n_mu_b * 4, 0.0);
}

double& ExactJointTable::at(std::size_t pair, std::size_t l, std::size_t ma,
                            std::size_t mb, int ai, int bi) {
  return p[((((pair * n_lambda + l) * n_mu_a + ma) * n_mu_b + mb) * 2 +
            static_cast<std::size_t>(ai)) *
               2 +
           static_cast<std::size_t>(bi)];
}

double ExactJointTable::at(std::size_t pair, std::size_t l, std::size_t ma,
                           std::size_t mb, int ai, int bi) const {
  return p[((((pair * n_lambda + l) * n_mu_a + ma) * n_mu_b + mb) * 2 +
            static_cast<std::size_t>(ai)) *
               2 +
           static_cast<std::size_t>(bi)];
}

void ExactJointTable::validate(double tol) const {
  policy.validate();
  if (p.size() != policy.size() * n_lambda * n_mu_a * n_mu_b * 4) {
    throw InvalidArgument("exact table storage size mismatch");
  }
  for (std::size_t pair = 0; pair < policy.size(); ++pair) {
    double mass = 0.0;
    for (std::size_t l = 0; l < n_lambda; ++l) {
      for (std::size_t ma = 0; ma < n_mu_a; ++ma) {
        for (std::size_t mb = 0; mb < n_mu_b; ++mb) {
          for (int ai = 0; ai < 2; ++ai) {
            for (int bi = 0; bi < 2; ++bi) {
              const double v = at(pair, l, ma, mb, ai, bi);
              if (!(v >= 0.0) || !std::isfinite(v)) {
                throw InvalidArgument("exact table has a negative entry");
              }
              mass += v;
            }
          }
        }
      }
    }
    if (std::abs(mass - 1.0) > tol) {
      throw InvalidArgument("exact table pair " + std::to_string(pair) +
                            " mass is " + std::to_string(mass));
    }
  }
}

double ExactJointTable::expectation(std::size_t pair) const {
  double e = 0.0;
  for (std::size_t l = 0; l < n_lambda; ++l) {
    for (std::size_t ma = 0; ma < n_mu_a; ++ma) {
      for (std::size_t mb = 0; mb < n_mu_b; ++mb) {
        for (int ai = 0; ai < 2; ++ai) {
          for (int bi = 0; bi < 2; ++bi) {
            const int prod = (ai == bi) ? +1 : -1;
            e += prod * at(pair, l, ma, mb, ai, bi);
          }
        }
      }
    }
  }
  return e;
}

std::string ExactJointTable::lambda_label(std::size_t l) const {
  return l < lambda_labels.size() ? lambda_labels[l] : default_label("l", l);
}

std::string ExactJointTable::mu_a_label(std::size_t m) const {
  return m < mu_a_labels.size() ? mu_a_labels[m] : default_label("ma", m);
}

std::string ExactJointTable::mu_b_label(std::size_t m) const {
  return m < mu_b_labels.size() ? mu_b_labels[m] : default_label("mb", m);
}

}  // namespace bellsim
