#include "gsci/scan.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <omp.h>

#include "gsci/errors.hpp"
#include "gsci/permgroup.hpp"

namespace gsci {

// ----------------------------------------------------------------- threshold

std::array<bool, kSignGridPoints> sign_grid(const RayFunction& f) {
  std::array<bool, kSignGridPoints> s{};
  for (int j = 0; j < kSignGridPoints; ++j) s[j] = f(j / 32.0) > 0.0;
  return s;
}

std::optional<double> ray_threshold(const RayFunction& f, double eps) {
  if (!(eps > 0.0) || eps > 0.25) throw DomainError("threshold tolerance must lie in (0, 0.25]");
  const auto grid = sign_grid(f);
  int last_positive = -1;
  for (int j = 0; j < kSignGridPoints; ++j) {
    if (grid[j] && last_positive != j - 1) {
      std::ostringstream os;
      os << "CI sign pattern on x = j/32 is not +...+-...-: ";
      for (bool b : grid) os << (b ? '+' : '-');
      throw ConsistencyError(os.str());
    }
    if (grid[j]) last_positive = j;
  }
  if (f(0.0) <= 0.0) return std::nullopt;
  if (f(0.5 - eps) > 0.0) return 0.5;
  double lo = last_positive / 32.0;
  double hi = last_positive == kSignGridPoints - 1 ? 0.5 - eps : (last_positive + 1) / 32.0;
  while (hi - lo > eps) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  const bool left_ok = t - 2 * eps < 0.0 || f(t - 2 * eps) > 0.0;
  const bool right_ok = t + 2 * eps > 0.5 || f(t + 2 * eps) < 0.0;
  if (!left_ok || !right_ok) {
    std::ostringstream os;
    os << "threshold " << format_double(t) << " fails post-verification at +-2 eps";
    throw ConsistencyError(os.str());
  }
  return t;
}

double resolved_ci(const SpectrumEvaluator& ev, const PauliParams& p) {
  const auto r = ev.evaluate(p);
  return r.ci - kCiResolution * (1.0 + r.h_rb + r.h_b) / ev.k_sys();
}

std::optional<double> threshold(const SpectrumEvaluator& ev, const RayDirection& d, double eps) {
  return ray_threshold([&](double x) { return resolved_ci(ev, d.at(x)); }, eps);
}

std::optional<double> threshold(const CISpectrum& s, const RayDirection& d, double eps) {
  return threshold(SpectrumEvaluator(s), d, eps);
}

// ------------------------------------------------------------------- surface

namespace {

int thread_count(const ScanOptions& o) {
  if (!o.parallel) return 1;
  return o.threads > 0 ? o.threads : omp_get_max_threads();
}

// Runs body(i) for i in [0, n) and rethrows the first exception after the loop.
template <class Body>
void parallel_indexed(std::size_t n, int threads, Body body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(gsci_scan_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::string opt_field(const std::optional<double>& v, const char* sentinel) {
  return v ? format_double(*v) : std::string(sentinel);
}

}  // namespace

RayDirection spherical_direction(double theta, double phi) {
  double a = std::sin(theta) * std::cos(phi), b = std::sin(theta) * std::sin(phi), c = std::cos(theta);
  // clean the floating residue of cos(pi/2)
  auto clip = [](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; };
  a = clip(a);
  b = clip(b);
  c = clip(c);
  const double s = a + b + c;
  return {a / s, b / s, c / s};
}

std::vector<ThresholdSample> surface(const CISpectrum& s, int resolution, const ScanOptions& opts) {
  if (resolution < 2) throw DomainError("surface resolution must be at least 2");
  const SpectrumEvaluator ev(s);
  const double delta = (std::numbers::pi / 2) / (resolution - 1);
  const std::size_t total = static_cast<std::size_t>(resolution) * resolution;
  std::vector<ThresholdSample> out(total);
  parallel_indexed(total, thread_count(opts), [&](std::size_t idx) {
    ThresholdSample& t = out[idx];
    t.theta = static_cast<double>(idx / resolution) * delta;
    t.phi = static_cast<double>(idx % resolution) * delta;
    t.direction = spherical_direction(t.theta, t.phi);
    t.x_code = threshold(ev, t.direction, opts.eps);
    t.x_single = single_letter_threshold(t.direction, opts.eps);
    if (t.x_code) t.delta = *t.x_code - t.x_single;
  });
  return out;
}

std::string surface_csv(std::span<const ThresholdSample> samples) {
  std::string out = "theta,phi,p1,p2,p3,x_code,x_single,delta\n";
  for (const auto& t : samples) {
    out += format_double(t.theta) + ',' + format_double(t.phi);
    for (int i = 1; i <= 3; ++i) out += ',' + format_double(t.direction.d(i));
    out += ',' + opt_field(t.x_code, "none") + ',' + format_double(t.x_single) + ',' + opt_field(t.delta, "none") + '\n';
  }
  return out;
}

// --------------------------------------------------------------------- rates

std::vector<RateNode> rate_planes(std::span<const CISpectrum> spectra, double f, int grid, const ScanOptions& opts) {
  if (spectra.empty()) throw DomainError("rate_planes needs at least one code");
  if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("plane slope f must be positive");
  if (grid < 2) throw DomainError("rate grid needs at least 2 points per axis");
  std::vector<SpectrumEvaluator> evs;
  for (const auto& s : spectra) evs.emplace_back(s);
  const double s = std::sqrt(1.0 + f * f);
  const std::size_t total = static_cast<std::size_t>(grid) * grid;
  std::vector<RateNode> out(total);
  parallel_indexed(total, thread_count(opts), [&](std::size_t idx) {
    RateNode& node = out[idx];
    node.r = 0.5 * static_cast<double>(idx / grid) / (grid - 1);
    node.y = 0.5 * static_cast<double>(idx % grid) / (grid - 1);
    node.p = {node.r / s, node.y, node.r * f / s};
    const double p0 = 1.0 - node.p[0] - node.p[1] - node.p[2];
    if (p0 < 0.0) return;
    const PauliParams p(p0, node.p[0], node.p[1], node.p[2]);
    if (is_antidegradable(p)) return;
    double best = -INFINITY;
    for (std::size_t c = 0; c < evs.size(); ++c) {
      const double v = evs[c].ci(p);
      if (v > best) {
        best = v;
        node.best_code = static_cast<int>(c);
      }
    }
    node.best_ci = best;
    node.single_ci = hashing_ci(p);
    node.diff = best - *node.single_ci;
  });
  return out;
}

std::string rates_csv(std::span<const RateNode> nodes) {
  std::string out = "r,y,p1,p2,p3,best_ci,single_ci,diff,best_code\n";
  for (const auto& n : nodes) {
    out += format_double(n.r) + ',' + format_double(n.y);
    for (double v : n.p) out += ',' + format_double(v);
    out += ',' + opt_field(n.best_ci, "nan") + ',' + opt_field(n.single_ci, "nan") + ',' + opt_field(n.diff, "nan") + ',' +
           (n.best_code >= 0 ? std::to_string(n.best_code) : std::string("none")) + '\n';
  }
  return out;
}

// -------------------------------------------------------- exhaustive search

std::vector<std::vector<VertexMask>> nonisomorphic_graphs(int n) {
  if (n < 1 || n > 7) throw DomainError("nonisomorphic_graphs supports 1..7 vertices");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::map<std::string, std::vector<VertexMask>> classes;
  std::vector<std::vector<VertexMask>> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << pairs.size()); ++m) {
    std::vector<VertexMask> adj(static_cast<std::size_t>(n), 0);
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if ((m >> e) & 1) {
        adj[pairs[e].first] |= bit(pairs[e].second);
        adj[pairs[e].second] |= bit(pairs[e].first);
      }
    if (classes.emplace(canonical_graph(adj, n).key(), adj).second) out.push_back(adj);
  }
  return out;
}

SearchResult exhaustive_search(int k_sys, int k_env_max, const RayDirection& d, const SearchOptions& opts) {
  if (k_sys < 1 || k_sys > 5) throw DomainError("exhaustive search supports 1 <= k_sys <= 5");
  if (k_env_max < 1 || k_env_max > k_sys + 1) throw DomainError("k_env_max must lie in 1..k_sys+1");
  SearchResult res;
  const auto sys_graphs = nonisomorphic_graphs(k_sys);
  res.system_graphs = sys_graphs.size();
  BigInt estimate = 0;
  for (int r = 1; r <= k_env_max; ++r) estimate += BigInt(sys_graphs.size()) << (k_sys * r);
  if (estimate > opts.max_candidates)
    throw ResourceError("exhaustive search would visit " + estimate.str() + " labeled candidates, bound is " +
                        std::to_string(opts.max_candidates));
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<CodeGraph> codes;
  std::vector<std::string> keys;
  for (int r = 1; r <= k_env_max; ++r) {
    const int n = k_sys + r;
    for (const auto& sys : sys_graphs) {
      for (std::uint64_t bi = 0; bi < (std::uint64_t{1} << (k_sys * r)); ++bi) {
        ++res.labeled_candidates;
        std::vector<VertexMask> adj(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < k_sys; ++i) adj[i] = sys[i];
        for (int i = 0; i < k_sys; ++i)
          for (int j = 0; j < r; ++j)
            if ((bi >> (i * r + j)) & 1) {
              adj[i] |= bit(k_sys + j);
              adj[k_sys + j] |= bit(i);
            }
        if (!is_connected(adj)) continue;
        ++res.connected_candidates;
        std::string key = canonical_graph(adj, k_sys).key();
        if (seen.emplace(key, codes.size()).second) {
          codes.emplace_back(k_sys, std::move(adj));
          keys.push_back(std::move(key));
        }
      }
    }
  }
  std::vector<std::optional<double>> thresholds(codes.size());
  SymmetricOptions sym = opts.symmetric;
  sym.parallel = false;
  parallel_indexed(codes.size(), thread_count(opts.scan), [&](std::size_t i) {
    thresholds[i] = threshold(symmetric_lambda(codes[i], sym), d, opts.scan.eps);
  });
  double best = -INFINITY;
  for (const auto& t : thresholds)
    if (t) best = std::max(best, *t);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const bool is_best = thresholds[i] && *thresholds[i] >= best - opts.best_tolerance;
    res.records.push_back(SearchRecord{keys[i], k_sys, codes[i].k_env(), thresholds[i], is_best, codes[i]});
  }
  return res;
}

std::string search_csv(std::span<const SearchRecord> records) {
  std::string out = "canon_key,k_sys,k_env,threshold,is_best\n";
  for (const auto& r : records)
    out += r.canon_key + ',' + std::to_string(r.k_sys) + ',' + std::to_string(r.k_env) + ',' +
           opt_field(r.threshold, "none") + ',' + (r.is_best ? "1" : "0") + '\n';
  return out;
}

// ------------------------------------------------------------ 2-level trees

namespace {

void partitions(int remaining, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    cur.push_back(part);
    partitions(remaining - part, part, cur, out);
    cur.pop_back();
  }
}

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::vector<std::vector<int>> two_level_trees(int k_sys) {
  if (k_sys < 2 || k_sys > 63) throw DomainError("two_level_trees needs 2 <= k_sys <= 63");
  // each branch contributes 1 + leaves vertices below the root
  std::vector<std::vector<int>> parts, out;
  std::vector<int> cur;
  partitions(k_sys - 1, k_sys - 1, cur, parts);
  for (auto& p : parts) {
    for (int& v : p) v -= 1;
    out.push_back(p);
  }
  return out;
}

BigInt tree_automorphism_order(std::span<const int> leaf_counts) {
  std::map<int, int> groups;
  for (int l : leaf_counts) {
    if (l < 0) throw DomainError("negative leaf count");
    ++groups[l];
  }
  BigInt order = 1;
  for (auto [leaves, mult] : groups) {
    order *= factorial(mult);
    for (int i = 0; i < mult; ++i) order *= factorial(leaves);
  }
  return order;
}

}  // namespace gsci
