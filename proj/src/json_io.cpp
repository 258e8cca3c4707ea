#include "tamp/json_io.hpp"

#include <cmath>
#include <fstream>

#include "tamp/error.hpp"

namespace tamp {

namespace {

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix rows_matrix(const json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput(what + ": expected an array of rows");
  const size_t r = j.size();
  const size_t c = r ? j[0].size() : 0;
  Matrix m(r, c);
  for (size_t i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != c) throw InvalidInput(what + ": ragged rows");
    for (size_t k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

void to_json(json& j, const Polynomial& p) { j = json{{"coeffs", p.coeffs}}; }

void from_json(const json& j, Polynomial& p) {
  if (j.is_string()) {
    p = preset_polynomial(j.get<std::string>());
  } else if (j.is_object() && j.contains("coeffs")) {
    p = Polynomial(j.at("coeffs").get<std::vector<double>>());
  } else if (j.is_array()) {
    p = Polynomial(j.get<std::vector<double>>());
  } else {
    throw InvalidInput("polynomial: expected a preset name or {\"coeffs\": [...]}");
  }
}

void to_json(json& j, const CumulantTable& t) {
  j = json{{"tag", tag_name(t.tag)}, {"values", t.values}};
}

void from_json(const json& j, CumulantTable& t) {
  if (j.is_string()) {
    t = preset_table(j.get<std::string>());
  } else if (j.is_object() && j.contains("preset")) {
    t = preset_table(j.at("preset").get<std::string>(), j.value("order", 12));
    // cumulants of s*A are s^k kappa_k, moments likewise
    double scale = j.value("scale", 1.0);
    for (size_t k = 0; k < t.values.size(); ++k) t.values[k] *= std::pow(scale, static_cast<double>(k + 1));
  } else if (j.is_object() && j.contains("values")) {
    t.tag = parse_tag(j.value("tag", std::string("cumulants")));
    t.values = j.at("values").get<std::vector<double>>();
    if (t.values.empty()) throw InvalidInput("cumulant table: empty values");
  } else {
    throw InvalidInput("cumulant table: expected a preset or {\"tag\",\"values\"}");
  }
}

void to_json(json& j, const EnsembleSpec& s) {
  j = json{{"kind", kind_name(s.kind)}, {"n", s.n}, {"seed", s.seed}, {"stream", s.stream}};
  switch (s.kind) {
    case EnsembleKind::wigner:
      j["entry_law"] = s.entry_law;
      break;
    case EnsembleKind::punctured:
      j["inner"] = kind_name(s.inner);
      break;
    case EnsembleKind::block_goe:
      j["q"] = s.q;
      j["sigma"] = matrix_rows(s.sigma);
      break;
    case EnsembleKind::community:
      j["q"] = s.q;
      j["community_inner"] = s.community_inner;
      break;
    case EnsembleKind::orth_invariant:
      j["spectrum"] = s.spectrum;
      break;
    default:
      break;
  }
}

void from_json(const json& j, EnsembleSpec& s) {
  s = EnsembleSpec{};
  s.kind = parse_kind(j.at("kind").get<std::string>());
  s.n = j.value("n", 0);
  s.seed = j.value("seed", std::uint64_t{0});
  s.stream = j.value("stream", std::uint64_t{0});
  s.entry_law = j.value("entry_law", s.entry_law);
  if (j.contains("inner")) s.inner = parse_kind(j.at("inner").get<std::string>());
  s.q = j.value("q", 1);
  if (j.contains("sigma")) {
    const json& sg = j.at("sigma");
    if (sg.is_array() && !sg.empty() && sg[0].is_number()) {
      // flat row-major list
      auto flat = sg.get<std::vector<double>>();
      int q = static_cast<int>(std::lround(std::sqrt(static_cast<double>(flat.size()))));
      if (q * q != static_cast<int>(flat.size())) throw InvalidInput("ensemble: flat sigma is not square");
      s.sigma.resize(q, q);
      for (int r = 0; r < q; ++r) {
        for (int c = 0; c < q; ++c) s.sigma(r, c) = flat[r * q + c];
      }
    } else {
      s.sigma = rows_matrix(sg, "ensemble sigma");
    }
    if (!j.contains("q")) s.q = static_cast<int>(s.sigma.rows());
  }
  s.community_inner = j.value("community_inner", s.community_inner);
  s.spectrum = j.value("spectrum", s.spectrum);
}

void to_json(json& j, const AMPConfig& c) {
  j = json{{"nonlinearities", c.nonlinearities},
           {"T", c.T},
           {"mode", mode_name(c.mode)},
           {"init", c.init},
           {"seed", c.seed},
           {"stream", c.stream}};
  if (!c.kappa.values.empty()) j["kappa"] = c.kappa;
  if (c.mode == OnsagerMode::community) j["q"] = c.q;
}

void from_json(const json& j, AMPConfig& c) {
  c = AMPConfig{};
  c.nonlinearities = j.at("nonlinearities").get<std::vector<Polynomial>>();
  c.T = j.value("T", 1);
  c.mode = parse_mode(j.value("mode", std::string("scalar_kappa")));
  if (j.contains("kappa")) c.kappa = j.at("kappa").get<CumulantTable>();
  c.q = j.value("q", 1);
  c.init = j.value("init", c.mode == OnsagerMode::punctured_kappa ? "gaussian" : "ones");
  c.seed = j.value("seed", std::uint64_t{0});
  c.stream = j.value("stream", std::uint64_t{0});
}

void to_json(json& j, const SEKernel& k) {
  json gammas = json::array();
  for (const auto& g : k.gammas) gammas.push_back(matrix_rows(g));
  j = json{{"variant", k.variant},
           {"T", k.T},
           {"gammas", gammas},
           {"weights", k.weights},
           {"block_kernel", k.block_kernel}};
}

void from_json(const json& j, SEKernel& k) {
  k = SEKernel{};
  k.variant = j.value("variant", std::string());
  k.T = j.at("T").get<int>();
  for (const auto& g : j.at("gammas")) k.gammas.push_back(rows_matrix(g, "kernel gamma"));
  k.weights = j.at("weights").get<std::vector<double>>();
  k.block_kernel = j.value("block_kernel", std::vector<int>{});
  if (k.gammas.empty() || k.gammas.size() != k.weights.size())
    throw InvalidInput("kernel: gammas and weights differ in length");
  for (const auto& g : k.gammas) {
    if (g.rows() != k.T || g.cols() != k.T) throw InvalidInput("kernel: gamma is not T x T");
  }
  for (int b : k.block_kernel) {
    if (b < 0 || b >= static_cast<int>(k.gammas.size())) throw InvalidInput("kernel: bad block_kernel entry");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace tamp
