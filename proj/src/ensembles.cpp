#include "tamp/ensembles.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "tamp/error.hpp"
#include "tamp/graphpoly.hpp"
#include "tamp/structure.hpp"

namespace tamp {

namespace {

struct KindName {
  EnsembleKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {EnsembleKind::goe, "goe"},
    {EnsembleKind::wigner, "wigner"},
    {EnsembleKind::haar_orthogonal, "haar_orthogonal"},
    {EnsembleKind::rom, "rom"},
    {EnsembleKind::r_rom, "r_rom"},
    {EnsembleKind::hadamard, "hadamard"},
    {EnsembleKind::dst, "dst"},
    {EnsembleKind::dct, "dct"},
    {EnsembleKind::punctured, "punctured"},
    {EnsembleKind::block_goe, "block_goe"},
    {EnsembleKind::community, "community"},
    {EnsembleKind::orth_invariant, "orth_invariant"},
};

// Copies the lower triangle onto the upper one so symmetry is exact.
void symmetrize_from_lower(Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) m(i, j) = m(j, i);
  }
}

Matrix gaussian_matrix(int rows, int cols, CounterRng& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  }
  return g;
}

// Orthonormal basis of a Haar-random k-dimensional subspace, with the
// R-diagonal sign fix so the basis itself is Haar on the Stiefel manifold.
Matrix haar_frame(int n, int k, CounterRng& rng) {
  Matrix g = gaussian_matrix(n, k, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < k; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix conjugate_spectrum(const Matrix& q, const Vector& lambda) {
  Matrix m = q * lambda.asDiagonal() * q.transpose();
  symmetrize_from_lower(m);
  return m;
}

}  // namespace

std::string kind_name(EnsembleKind k) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == k) return kn.name;
  }
  throw InvalidInput("unknown ensemble kind");
}

EnsembleKind parse_kind(const std::string& name) {
  for (const auto& kn : kKindNames) {
    if (name == kn.name) return kn.kind;
  }
  throw InvalidInput("unknown ensemble kind '" + name + "'");
}

void EnsembleSpec::validate() const {
  if (n < 1) throw InvalidInput("ensemble: n must be positive");
  auto is_pow2 = [](int x) { return x > 0 && std::has_single_bit(static_cast<unsigned>(x)); };
  EnsembleKind base = (kind == EnsembleKind::punctured) ? inner : kind;
  if (kind == EnsembleKind::punctured &&
      (inner == EnsembleKind::punctured || inner == EnsembleKind::r_rom))
    throw InvalidInput("ensemble: nested puncturing");
  if (base == EnsembleKind::hadamard && !is_pow2(n))
    throw InvalidInput("ensemble: hadamard needs n a power of two");
  if (kind == EnsembleKind::wigner && entry_law != "normal" && entry_law != "rademacher")
    throw InvalidInput("ensemble: unknown entry law '" + entry_law + "'");
  if (kind == EnsembleKind::block_goe || kind == EnsembleKind::community) {
    if (q < 1 || n % q != 0) throw InvalidInput("ensemble: q must divide n");
  }
  if (kind == EnsembleKind::block_goe) {
    if (sigma.rows() != q || sigma.cols() != q) throw InvalidInput("ensemble: sigma must be q x q");
    for (int r = 0; r < q; ++r) {
      for (int c = 0; c < q; ++c) {
        if (sigma(r, c) < 0 || sigma(r, c) != sigma(c, r))
          throw InvalidInput("ensemble: sigma must be symmetric and nonnegative");
      }
    }
  }
  if (kind == EnsembleKind::community && community_inner != "rom" && community_inner != "semicircle")
    throw InvalidInput("ensemble: community inner must be rom or semicircle");
  if (kind == EnsembleKind::orth_invariant && spectrum != "rademacher" &&
      spectrum != "semicircle" && spectrum != "uniform")
    throw InvalidInput("ensemble: unknown spectrum '" + spectrum + "'");
}

Matrix goe(int n, CounterRng& rng) {
  Matrix a(n, n);
  const double off = 1.0 / std::sqrt(static_cast<double>(n));
  const double diag = std::sqrt(2.0 / n);
  for (int j = 0; j < n; ++j) {
    a(j, j) = diag * rng.normal();
    for (int i = j + 1; i < n; ++i) a(i, j) = off * rng.normal();
  }
  symmetrize_from_lower(a);
  return a;
}

Matrix wigner(int n, const std::string& entry_law, CounterRng& rng) {
  Matrix a(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  const bool rad = entry_law == "rademacher";
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) a(i, j) = s * (rad ? rng.rademacher() : rng.normal());
  }
  symmetrize_from_lower(a);
  return a;
}

Matrix haar_orthogonal(int n, CounterRng& rng) { return haar_frame(n, n, rng); }

// Q diag(+-1) Q^T = 2P - I with P the projection on a Haar-random subspace of
// dimension n_+ ~ Bin(n, 1/2). Sampling the smaller of the two eigenspaces
// gives the same law at a fraction of the cost.
Matrix rom(int n, CounterRng& rng) {
  long plus = rng.binomial_half(n);
  long minus = n - plus;
  int k = static_cast<int>(std::min(plus, minus));
  double sign = (plus <= minus) ? 1.0 : -1.0;
  Matrix h = -sign * Matrix::Identity(n, n);
  if (k > 0) {
    Matrix q = haar_frame(n, k, rng);
    h.selfadjointView<Eigen::Lower>().rankUpdate(q, 2.0 * sign);
  }
  symmetrize_from_lower(h);
  return h;
}

Matrix hadamard(int n) {
  if (!std::has_single_bit(static_cast<unsigned>(n)))
    throw InvalidInput("hadamard: n must be a power of two");
  Matrix h(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      h(i, j) = (std::popcount(static_cast<unsigned>(i & j)) & 1) ? -s : s;
    }
  }
  return h;
}

Matrix dst(int n) {
  Matrix h(n, n);
  const double s = std::sqrt(2.0 / (n + 1));
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= j; ++i) {
      h(i - 1, j - 1) = h(j - 1, i - 1) = s * std::sin(std::numbers::pi * i * j / (n + 1));
    }
  }
  return h;
}

Matrix dct(int n) {
  Matrix h(n, n);
  const double s = std::sqrt(2.0 / n);
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= j; ++i) {
      h(i - 1, j - 1) = h(j - 1, i - 1) =
          s * std::cos(std::numbers::pi * (i - 0.5) * (j - 0.5) / n);
    }
  }
  return h;
}

Matrix block_goe(int n, const Matrix& sigma, CounterRng& rng) {
  const int q = static_cast<int>(sigma.rows());
  if (q < 1 || n % q != 0) throw InvalidInput("block_goe: q must divide n");
  const int b = n / q;
  Matrix a(n, n);
  for (int r = 0; r < q; ++r) {
    for (int c = r; c < q; ++c) {
      const double s = std::sqrt(sigma(r, c) / n);
      // symmetric b x b block, used for (r, c) and mirrored into (c, r)
      for (int j = 0; j < b; ++j) {
        for (int i = j; i < b; ++i) {
          double x = s * rng.normal();
          a(r * b + i, c * b + j) = x;
          a(r * b + j, c * b + i) = x;
        }
      }
      if (c != r) a.block(c * b, r * b, b, b) = a.block(r * b, c * b, b, b);
    }
  }
  return a;
}

Matrix community(int n, int q, const std::string& inner, CounterRng& rng) {
  if (q < 1 || n % q != 0) throw InvalidInput("community: q must divide n");
  Matrix sigma = Matrix::Ones(q, q);
  Matrix a = block_goe(n, sigma, rng);
  const int b = n / q;
  if (inner == "rom") {
    // spectrum +-1/sqrt(q): free cumulants q^{-k/2} times those of the ROM
    a.topLeftCorner(b, b) = rom(b, rng) / std::sqrt(static_cast<double>(q));
  } else if (inner != "semicircle") {
    throw InvalidInput("community: inner must be rom or semicircle");
  }
  return a;
}

Matrix orth_invariant(int n, const std::string& spectrum, CounterRng& rng) {
  Vector lambda(n);
  if (spectrum == "rademacher") {
    for (int i = 0; i < n; ++i) lambda[i] = rng.rademacher();
  } else if (spectrum == "uniform") {
    const double w = std::sqrt(3.0);
    for (int i = 0; i < n; ++i) lambda[i] = w * (2.0 * rng.uniform() - 1.0);
  } else if (spectrum == "semicircle") {
    Eigen::SelfAdjointEigenSolver<Matrix> es(goe(n, rng), Eigen::EigenvaluesOnly);
    lambda = es.eigenvalues();
  } else {
    throw InvalidInput("orth_invariant: unknown spectrum '" + spectrum + "'");
  }
  return conjugate_spectrum(haar_orthogonal(n, rng), lambda);
}

Matrix puncture(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("puncture: matrix must be square");
  const double n = static_cast<double>(m.rows());
  Vector r = m.rowwise().sum() / n;
  Vector c = m.colwise().sum().transpose() / n;
  const double g = m.sum() / (n * n);
  Matrix out = m;
  out.colwise() -= r;
  out.rowwise() -= c.transpose();
  out.array() += g;
  return out;
}

std::vector<int> block_labels(int n, int q) {
  if (q < 1 || n % q != 0) throw InvalidInput("block_labels: q must divide n");
  std::vector<int> lab(n);
  for (int i = 0; i < n; ++i) lab[i] = i / (n / q);
  return lab;
}

GeneratedMatrix generate(const EnsembleSpec& spec) {
  spec.validate();
  CounterRng rng(spec.seed, spec.stream);
  GeneratedMatrix out;
  out.spec = spec;
  const int n = spec.n;
  auto make = [&](EnsembleKind k) -> Matrix {
    switch (k) {
      case EnsembleKind::goe:
        return goe(n, rng);
      case EnsembleKind::wigner:
        return wigner(n, spec.entry_law, rng);
      case EnsembleKind::haar_orthogonal:
        return haar_orthogonal(n, rng);
      case EnsembleKind::rom:
        return rom(n, rng);
      case EnsembleKind::r_rom:
        return puncture(rom(n, rng));
      case EnsembleKind::hadamard:
        return hadamard(n);
      case EnsembleKind::dst:
        return dst(n);
      case EnsembleKind::dct:
        return dct(n);
      case EnsembleKind::block_goe:
        return block_goe(n, spec.sigma, rng);
      case EnsembleKind::community:
        return community(n, spec.q, spec.community_inner, rng);
      case EnsembleKind::orth_invariant:
        return orth_invariant(n, spec.spectrum, rng);
      case EnsembleKind::punctured:
        break;
    }
    throw InvalidInput("ensemble: unsupported kind");
  };
  out.values = (spec.kind == EnsembleKind::punctured) ? puncture(make(spec.inner)) : make(spec.kind);
  if (spec.kind != EnsembleKind::haar_orthogonal) symmetrize_from_lower(out.values);
  out.provenance = "seed=" + std::to_string(spec.seed) + " stream=" + std::to_string(spec.stream);
  return out;
}

DelocalizationReport delocalization_audit(const Matrix& m, const std::vector<Diagram>& diagrams) {
  DelocalizationReport rep;
  rep.norm = symmetric_operator_norm(m);
  const double n = static_cast<double>(m.rows());
  for (const auto& d : diagrams) {
    DelocalizationEntry e;
    e.diagram = to_string(d);
    if (d.root_count() == 2) {
      Matrix w = eval_open_cactus_matrix(d, m);
      w.diagonal().setZero();
      e.value = w.cwiseAbs().maxCoeff();
    } else if (d.root_count() == 1 && classify(d).cactus) {
      Vector w = eval_w(d, m).vector;
      w.array() -= w.mean();
      e.value = w.norm() / std::sqrt(n);
    } else {
      throw PreconditionError("delocalization_audit: need an open cactus or a rooted cactus");
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace tamp
