#include "bellsim/runner.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bellsim/errors.hpp"

namespace bellsim {

namespace {

void check_domain(const StateDomain& domain, const StatePayload& payload,
                  const std::string& model_id, const char* what) {
  if (!domain_contains(domain, payload)) {
    throw ModelFailure(model_id + ": " + what +
                       " sample left its declared domain");
  }
}

RunRecord make_run(const ModelSpec& model, const SettingsPolicy& policy,
                   std::uint64_t run_index, std::uint64_t master_seed) {
  RngStream settings_rng =
      derive_rng_stream(master_seed, run_index, Stage::Settings);
  // Weighted draw over policy pairs.
  double u = settings_rng.next_unit();
  std::size_t pick = policy.size() - 1;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (u < policy.weights[i]) {
      pick = i;
      break;
    }
    u -= policy.weights[i];
  }
  const Direction& a = policy.pairs[pick].first;
  const Direction& b = policy.pairs[pick].second;

  RngStream lambda_rng = derive_rng_stream(master_seed, run_index, Stage::Lambda);
  HiddenState lambda = model.sample_lambda(a, b, lambda_rng);
  check_domain(model.lambda_domain, lambda.payload, model.id, "lambda");

  RngStream mu_rng =
      derive_rng_stream(master_seed, run_index, Stage::Microstates);
  auto [mu_a, mu_b] = model.sample_microstates(a, b, lambda, mu_rng);
  if (mu_a.side != Side::A || mu_b.side != Side::B) {
    throw ModelFailure(model.id + ": microstate side tags are swapped");
  }
  check_domain(model.mu_a_domain, mu_a.payload, model.id, "mu_a");
  check_domain(model.mu_b_domain, mu_b.payload, model.id, "mu_b");

  Outcome A = Outcome::plus();
  Outcome B = Outcome::plus();
  if (model.has_local_responders()) {
    RngStream a_rng = derive_rng_stream(master_seed, run_index, Stage::RespondA);
    RngStream b_rng = derive_rng_stream(master_seed, run_index, Stage::RespondB);
    A = model.respond_a(a, lambda, mu_a, a_rng);
    B = model.respond_b(b, lambda, mu_b, b_rng);
  } else {
    // Joint responders consume a single shared stream (the RespondA stage).
    RngStream shared = derive_rng_stream(master_seed, run_index, Stage::RespondA);
    auto [ja, jb] = model.respond_joint(a, b, lambda, mu_a, mu_b, shared);
    A = ja;
    B = jb;
  }

  RunRecord rec;
  rec.run_index = run_index;
  rec.setting_a = a;
  rec.setting_b = b;
  rec.outcome_a = A;
  rec.outcome_b = B;
  rec.lambda = std::move(lambda);
  rec.mu_a = std::move(mu_a);
  rec.mu_b = std::move(mu_b);
  return rec;
}

}  // namespace

Ensemble run_experiment(const ModelSpec& model, const SettingsPolicy& policy,
                        std::uint64_t n_runs, std::uint64_t master_seed,
                        unsigned n_threads) {
  model.validate();
  policy.validate();
  if (n_runs == 0) throw InvalidArgument("run_experiment: n_runs must be >= 1");

  Ensemble ens;
  ens.model_id = model.id;
  ens.settings_policy_id = policy.id;
  ens.master_seed = master_seed;
  ens.policy = policy;
  ens.runs.resize(n_runs);

  if (n_threads <= 1 || n_runs < 2) {
    for (std::uint64_t i = 0; i < n_runs; ++i) {
      ens.runs[i] = make_run(model, policy, i, master_seed);
    }
    return ens;
  }

  // Per-run streams make runs order-free; write each into its slot.
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(n_threads, n_runs));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::uint64_t i = t; i < n_runs; i += workers) {
          ens.runs[i] = make_run(model, policy, i, master_seed);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return ens;
}

}  // namespace bellsim
