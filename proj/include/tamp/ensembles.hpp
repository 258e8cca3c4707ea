#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tamp/diagram.hpp"
#include "tamp/rng.hpp"

namespace tamp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class EnsembleKind {
  goe,
  wigner,
  haar_orthogonal,
  rom,
  r_rom,
  hadamard,
  dst,
  dct,
  punctured,
  block_goe,
  community,
  orth_invariant,
};

std::string kind_name(EnsembleKind k);
EnsembleKind parse_kind(const std::string& name);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::goe;
  int n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // generation counter within a seed

  std::string entry_law = "normal";          // wigner: normal | rademacher
  EnsembleKind inner = EnsembleKind::hadamard;  // punctured(inner)
  int q = 1;                                 // block_goe, community
  Matrix sigma;                              // block_goe, q x q
  std::string community_inner = "rom";       // community (1,1) block: rom | semicircle
  std::string spectrum = "rademacher";       // orth_invariant: rademacher | semicircle | uniform

  // Throws InvalidInput on a bad n, q or sigma.
  void validate() const;
};

struct GeneratedMatrix {
  Matrix values;
  EnsembleSpec spec;
  std::string provenance;  // "seed=<s> stream=<k>"
};

GeneratedMatrix generate(const EnsembleSpec& spec);

Matrix goe(int n, CounterRng& rng);
Matrix wigner(int n, const std::string& entry_law, CounterRng& rng);
Matrix haar_orthogonal(int n, CounterRng& rng);
Matrix rom(int n, CounterRng& rng);
Matrix hadamard(int n);
Matrix dst(int n);
Matrix dct(int n);
Matrix block_goe(int n, const Matrix& sigma, CounterRng& rng);
Matrix community(int n, int q, const std::string& inner, CounterRng& rng);
Matrix orth_invariant(int n, const std::string& spectrum, CounterRng& rng);

// Pi M Pi with Pi = I - 11^T/n, in O(n^2).
Matrix puncture(const Matrix& m);

// Block of each coordinate for q equal contiguous blocks.
std::vector<int> block_labels(int n, int q);

struct DelocalizationEntry {
  std::string diagram;
  // open cactus: max off-diagonal |W[i,j]|; rooted cactus: n^{-1/2} ||Pi w||_2
  double value = 0.0;
};
struct DelocalizationReport {
  double norm = 0.0;  // operator norm of M
  std::vector<DelocalizationEntry> entries;
};
// Diagrams must be open cactuses (two roots) or rooted cactuses (one root).
DelocalizationReport delocalization_audit(const Matrix& m, const std::vector<Diagram>& diagrams);

}  // namespace tamp
