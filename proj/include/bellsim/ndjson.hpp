#pragma once

#include <iosfwd>
#include <string>

#include "bellsim/ensemble.hpp"

namespace bellsim {

// NDJSON ensemble format: one header object, then one object per run.
//
// Header: {"format": "bellsim/ensemble", "version", "command", "model_id",
//          "settings_policy_id", "policy": {pairs, weights}, "master_seed",
//          "n_runs"}
// Record: {"run", "ax", "ay", "az", "bx", "by", "bz", "A", "B",
//          "lambda", "mu_a", "mu_b"}
// States serialize as {"d": <index>} or {"c": [<components>]}.
//
// Doubles are written shortest-round-trip, so identical ensembles serialize
// byte-identically and parse back bit-exactly.
void write_ndjson(const Ensemble& ensemble, std::ostream& out,
                  const std::string& command = "simulate");
std::string to_ndjson(const Ensemble& ensemble,
                      const std::string& command = "simulate");

// Throws ParseError on malformed input.
Ensemble read_ndjson(std::istream& in);
Ensemble ndjson_from_string(const std::string& text);
Ensemble read_ndjson_file(const std::string& path);

// Write text to path atomically: temp file in the same directory, then rename.
void atomic_write_file(const std::string& path, const std::string& text);

}  // namespace bellsim
