#pragma once

#include <string>

#include "json.hpp"

#include "tamp/amp.hpp"
#include "tamp/error.hpp"
#include "tamp/ensembles.hpp"
#include "tamp/freeprob.hpp"
#include "tamp/gaussian.hpp"
#include "tamp/state_evolution.hpp"

namespace tamp {

using json = nlohmann::json;

// Polynomials: {"coeffs":[...]} or a preset name.
void to_json(json& j, const Polynomial& p);
void from_json(const json& j, Polynomial& p);

// Tables: {"tag":"cumulants","values":[...]}, a preset name, or
// {"preset":"rom","order":12,"scale":0.5} for the law of 0.5 A.
void to_json(json& j, const CumulantTable& t);
void from_json(const json& j, CumulantTable& t);

// Ensembles: {"kind":"punctured","inner":"hadamard","n":4096,"q":2,
// "sigma":[[1,0.5],[0.5,1]], ...}; seed and stream are optional.
void to_json(json& j, const EnsembleSpec& s);
void from_json(const json& j, EnsembleSpec& s);

void to_json(json& j, const AMPConfig& c);
void from_json(const json& j, AMPConfig& c);

void to_json(json& j, const SEKernel& k);
void from_json(const json& j, SEKernel& k);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

// Wraps nlohmann parse/type errors as InvalidInput.
template <typename T>
T json_get(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

}  // namespace tamp
