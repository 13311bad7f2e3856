#include "gsci/directci.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <omp.h>

#include "gsci/errors.hpp"
#include "gsci/numeric.hpp"

namespace gsci {

void for_each_u_subsets(int k, const std::function<void(const USubsets&)>& f) {
  if (k < 0 || k > 31) throw DomainError("get_u_subsets needs 0 <= k <= 31");
  std::vector<std::uint8_t> digit(static_cast<std::size_t>(k), 0);
  USubsets u;
  for (;;) {
    f(u);
    int i = 0;
    for (; i < k; ++i) {
      VertexMask b = bit(i);
      switch (digit[i]) {
        case 0: u.u1 |= b; break;
        case 1: u.u1 &= ~b; u.u2 |= b; break;
        case 2: u.u2 &= ~b; u.u3 |= b; break;
        default: u.u3 &= ~b; break;
      }
      digit[i] = static_cast<std::uint8_t>((digit[i] + 1) & 3);
      if (digit[i] != 0) break;
    }
    if (i == k) return;
  }
}

std::vector<USubsets> get_u_subsets(int k, int r) {
  if (r < 0 || k + r > kMaxVertices) throw DomainError("get_u_subsets width exceeds 64 vertices");
  if (k > 13) throw ResourceError("get_u_subsets materializes 4^k columns; k must be at most 13");
  std::vector<USubsets> out;
  out.reserve(std::size_t{1} << (2 * k));
  for_each_u_subsets(k, [&](const USubsets& u) { out.push_back(u); });
  return out;
}

std::array<std::vector<int>, 3> get_u_subsets_card(int k) {
  std::array<std::vector<int>, 3> out;
  for (const auto& u : get_u_subsets(k, 0)) {
    out[0].push_back(popcount(u.u1));
    out[1].push_back(popcount(u.u2));
    out[2].push_back(popcount(u.u3));
  }
  return out;
}

std::vector<VertexMask> subsets(int k) {
  if (k < 0 || k > 30) throw DomainError("subsets needs 0 <= k <= 30");
  std::vector<VertexMask> out(std::size_t{1} << k);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = j;
  return out;
}

std::vector<double> perm_vector(std::span<const double> v, std::span<const std::uint64_t> pi) {
  if (v.size() != pi.size()) throw DomainError("perm_vector length mismatch");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (pi[i] >= v.size()) throw DomainError("perm_vector index out of range");
    out[i] = v[pi[i]];
  }
  return out;
}

namespace {

struct PowerTable {
  std::array<std::vector<double>, 4> pw;
  PowerTable(const PauliParams& p, int k) {
    for (int j = 0; j < 4; ++j) {
      pw[j].resize(static_cast<std::size_t>(k) + 1);
      for (int e = 0; e <= k; ++e) pw[j][e] = std::pow(p.p(j), e);
    }
  }
  double operator()(int k, int e1, int e2, int e3) const {
    return pw[1][e1] * pw[2][e2] * pw[3][e3] * pw[0][k - e1 - e2 - e3];
  }
};

// Accumulates lambda and mu over columns [begin, end) of the 4^k odometer.
void accumulate_range(const CodeGraph& g, const PowerTable& pw, std::uint64_t begin, std::uint64_t end,
                      std::vector<double>& lambda, std::vector<double>& mu) {
  const int k = g.k_sys();
  const auto adj = g.adjacency();
  const VertexMask sys = g.system_mask();
  std::vector<std::uint8_t> digit(static_cast<std::size_t>(k));
  VertexMask x = 0, z = 0, gx = 0;
  std::array<int, 4> e{k, 0, 0, 0};
  auto set = [&](int i, std::uint8_t to) {
    const std::uint8_t from = digit[i];
    const bool fx = from == 1 || from == 2, tx = to == 1 || to == 2;
    if (fx != tx) {
      x ^= bit(i);
      gx ^= adj[i];
    }
    if ((from >= 2) != (to >= 2)) z ^= bit(i);
    --e[from];
    ++e[to];
    digit[i] = to;
  };
  for (int i = 0; i < k; ++i) set(i, static_cast<std::uint8_t>((begin >> (2 * i)) & 3));
  for (std::uint64_t j = begin; j < end; ++j) {
    const VertexMask u = gx ^ z;
    const double c = pw(k, e[1], e[2], e[3]);
    lambda[u] += c;
    mu[u & sys] += c;
    for (int i = 0; i < k; ++i) {
      const auto next = static_cast<std::uint8_t>((digit[i] + 1) & 3);
      set(i, next);
      if (next != 0) break;
    }
  }
}

DenseSpectrum build(const CodeGraph& g, const PauliParams& p, bool parallel) {
  const int n = g.n(), k = g.k_sys(), r = g.k_env();
  if (n > kDirectMaxVertices)
    throw ResourceError("direct engine handles at most " + std::to_string(kDirectMaxVertices) + " vertices, got " +
                        std::to_string(n));
  const PowerTable pw(p, k);
  const std::size_t full = std::size_t{1} << n, half = std::size_t{1} << k;
  const std::uint64_t total = std::uint64_t{1} << (2 * k);
  DenseSpectrum s;
  s.lambda.assign(full, 0.0);
  s.mu.assign(half, 0.0);
  const int threads = parallel ? omp_get_max_threads() : 1;
  if (threads <= 1 || total < 4096) {
    accumulate_range(g, pw, 0, total, s.lambda, s.mu);
  } else {
    std::vector<std::vector<double>> lam(threads), mus(threads);
#pragma omp parallel num_threads(threads)
    {
      const int t = omp_get_thread_num();
      const int nt = omp_get_num_threads();
      const std::uint64_t lo = total / nt * t, hi = t + 1 == nt ? total : total / nt * (t + 1);
      lam[t].assign(full, 0.0);
      mus[t].assign(half, 0.0);
      accumulate_range(g, pw, lo, hi, lam[t], mus[t]);
    }
    for (int t = 0; t < threads; ++t) {
      if (lam[t].empty()) continue;
      for (std::size_t i = 0; i < full; ++i) s.lambda[i] += lam[t][i];
      for (std::size_t i = 0; i < half; ++i) s.mu[i] += mus[t][i];
    }
  }
  // sigma_B: average of mu permuted by A' -> A' + Gamma' R'
  s.lambda_a.assign(half, 0.0);
  const double scale = std::ldexp(1.0, -r);
  std::vector<std::uint64_t> perm(half);
  for (VertexMask rp : subsets(r)) {
    const VertexMask delta = g.env_to_system(rp);
    for (std::size_t a = 0; a < half; ++a) perm[a] = a ^ delta;
    const auto moved = perm_vector(s.mu, perm);
    for (std::size_t a = 0; a < half; ++a) s.lambda_a[a] += scale * moved[a];
  }
  return s;
}

double entropy_of(std::span<const double> v) {
  KahanSum h;
  for (double x : v) h.add(entropy_term(x));
  return h.value();
}

}  // namespace

DenseSpectrum direct_lambda(const CodeGraph& g, const PauliParams& p) { return build(g, p, true); }
DenseSpectrum direct_lambda_serial(const CodeGraph& g, const PauliParams& p) { return build(g, p, false); }

double spectrum_ci(const DenseSpectrum& s, int k_sys) {
  return (entropy_of(s.lambda_a) - entropy_of(s.lambda)) / k_sys;
}

double direct_ci(const CodeGraph& g, const PauliParams& p) { return spectrum_ci(direct_lambda(g, p), g.k_sys()); }
double direct_ci_serial(const CodeGraph& g, const PauliParams& p) {
  return spectrum_ci(direct_lambda_serial(g, p), g.k_sys());
}

// ------------------------------------------------------------ dense oracle

namespace {

double von_neumann(const Eigen::MatrixXd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConsistencyError("eigendecomposition failed");
  KahanSum h;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) h.add(entropy_term(es.eigenvalues()[i]));
  return h.value();
}

}  // namespace

double dense_oracle_ci(const CodeGraph& g, const PauliParams& p) {
  const int n = g.n(), k = g.k_sys();
  if (n > kDenseMaxVertices)
    throw ResourceError("dense oracle handles at most " + std::to_string(kDenseMaxVertices) + " vertices");
  const Eigen::Index dim = Eigen::Index{1} << n;
  // prod CZ_e |+>^n: amplitude (-1)^{edges inside S} / sqrt(2^n)
  Eigen::VectorXd psi(dim);
  const double amp = std::pow(2.0, -n / 2.0);
  for (Eigen::Index s = 0; s < dim; ++s) {
    int edges = 0;
    for (int v = 0; v < n; ++v)
      if (test_bit(s, v)) edges += popcount(g.neighbors(v) & static_cast<VertexMask>(s) & low_mask(v));
    psi[s] = (edges & 1) ? -amp : amp;
  }
  Eigen::MatrixXd rho = psi * psi.transpose();
  // Kraus terms on each system qubit in turn; the composition is the sum over all 4^k Pauli strings.
  Eigen::MatrixXd next(dim, dim);
  for (int q = 0; q < k; ++q) {
    const Eigen::Index m = Eigen::Index{1} << q;
    for (Eigen::Index a = 0; a < dim; ++a) {
      const double sa = (a & m) ? -1.0 : 1.0;
      for (Eigen::Index b = 0; b < dim; ++b) {
        const double sb = (b & m) ? -1.0 : 1.0;
        const double flipped = rho(a ^ m, b ^ m);
        // Y rho Y = XZ rho ZX: signs taken at the flipped indices
        next(a, b) = p.p(0) * rho(a, b) + p.p(1) * flipped + p.p(2) * sa * sb * flipped + p.p(3) * sa * sb * rho(a, b);
      }
    }
    rho.swap(next);
  }
  const Eigen::Index sdim = Eigen::Index{1} << k;
  Eigen::MatrixXd sigma_b = Eigen::MatrixXd::Zero(sdim, sdim);
  for (Eigen::Index e = 0; e < (dim >> k); ++e)
    for (Eigen::Index a = 0; a < sdim; ++a)
      for (Eigen::Index b = 0; b < sdim; ++b) sigma_b(a, b) += rho(a | (e << k), b | (e << k));
  return (von_neumann(sigma_b) - von_neumann(rho)) / k;
}

}  // namespace gsci
