#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bellsim/model_spec.hpp"
#include "bellsim/policy.hpp"

namespace bellsim::models {

// Registry metadata: which conditions the model satisfies by construction.
// The audit cross-product test holds these to the auditors' verdicts.
struct ModelDescriptor {
  std::string model_id;
  bool local_causality = false;
  bool settings_independence = false;
  bool microstate_independence = false;
  bool factorizability = false;
  // Responses deterministic given (setting, lambda, own microstate).
  bool deterministic = false;
  bool has_exact_e = false;
};

// Reference oracle reproducing the spin-singlet statistics
// P(A,B|a,b) = (1 - A*B*cos theta)/4, E = -cos theta. Not locally realizable:
// implemented as a joint responder over one shared stream and declared so.
ModelSpec build_singlet_oracle();

// lambda uniform on the unit sphere, A = sign(a.lambda), B = -sign(b.lambda).
// Deterministic, factorizable, E = -1 + 2*theta/pi.
ModelSpec build_sign_model();

// lambda = (u1, u2) uniform on [0,1]^2. The microstate sampler copies the
// remote setting b into mu_a; respond_a reconstructs b from its own microstate
// and flips a fair coin's partner with probability cos^2(theta/2). Respond
// functions are strictly local, yet E = -cos theta.
ModelSpec build_microstate_leak_model();

// Same responders, but mu_a is drawn from the b-marginal of marginal_source
// independently of the actual remote setting.
ModelSpec build_microstate_leak_ablated(const SettingsPolicy& marginal_source);

// Two settings indexed {0 -> (1,0,0), 1 -> (0,1,0)}; lambda in {0,1} picks
// which die each side rolls: d = lambda xor setting_index, outcome +1 with
// probability weights[d] judged against a uniform microstate.
// Throws InvalidWeights unless >= 2 weights in [0,1] with weights[0] != weights[1].
ModelSpec build_weighted_dice_model(const std::vector<double>& weights);

// Factorizable by construction: rho over k lambda states and response tables
// P(A=+1|a,lambda), P(B=+1|b,lambda) for the four canonical directions.
// rho must be a probability vector; tables must lie in [0,1].
ModelSpec build_factorizable_table_model(const std::string& id,
                                         const std::vector<double>& rho,
                                         const std::vector<std::vector<double>>& p_a,
                                         const std::vector<std::vector<double>>& p_b);

// Random instance of the above, tables and rho drawn from the given seed.
ModelSpec build_random_factorizable_model(std::size_t k_lambda,
                                          std::uint64_t seed);

// Outcome leak: mu_b = w uniform on [0,1] decides B = sign(w - 1/2) and mu_a
// receives a copy of w, so A = B identically while lambda stays trivial.
ModelSpec build_result_leak_demo_model();

// Adversarial fixture for auditor power tests: sample_lambda adds +0.3 to
// u1's mean when the drawn pair is (a, b) of the canonical configuration.
ModelSpec build_settings_biased_model(double shift = 0.3);

// Setting grid the dice model is defined on: (x,x),(x,y),(y,x),(y,y), uniform.
SettingsPolicy dice_policy();

// Model ids accepted by the CLI and the registry:
//   singlet | sign | leak | resultleak | dice:w1,w2[,...] | randfac:k:seed
ModelSpec build_from_id(const std::string& model_id);
ModelDescriptor descriptor_for(const std::string& model_id);
SettingsPolicy default_policy_for(const std::string& model_id);

// Canonical zoo instances used by cross-product and convergence tests.
std::vector<ModelDescriptor> zoo();

}  // namespace bellsim::models
