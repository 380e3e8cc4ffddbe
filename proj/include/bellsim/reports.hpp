#pragma once

#include <string>
#include <vector>

#include "bellsim/auditors.hpp"
#include "bellsim/estimators.hpp"
#include "bellsim/game.hpp"

namespace bellsim {

// JSON renderings of the report types, used by the command-line tool and the
// language bindings. Keys are stable:
//   expectation: {E, stderr, n, method}
//   chsh:        {E_ab, E_abp, E_apb, E_apbp, S, stderr, method}
//   audit:       {condition, mode, passed, inconclusive?, divergence,
//                 p_value?, secondary_divergence?, witness,
//                 cells_tested, cells_skipped}
//   game:        {model_id, rounds, pairs: [...], max_abs_deviation,
//                 chsh?, chsh_stderr?}
std::string expectation_to_json(const ExpectationEstimate& est);
std::string chsh_to_json(const ChshReport& rep);
std::string audit_to_json(const AuditVerdict& verdict);
std::string audits_to_json(const std::vector<AuditVerdict>& verdicts);
std::string theorem_chain_to_json(const TheoremChainReport& rep);
std::string game_to_json(const GameScore& score);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace bellsim
