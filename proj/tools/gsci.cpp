#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gsci/directci.hpp"
#include "gsci/errors.hpp"
#include "gsci/graphs.hpp"
#include "gsci/scan.hpp"
#include "gsci/stabilizer.hpp"
#include "gsci/symci.hpp"

namespace fs = std::filesystem;
using namespace gsci;

namespace {

constexpr const char* kToolVersion = "gsci 1.0.0";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Collects what a run read and wrote; saved next to each output file.
struct Manifest {
  std::string subcommand;
  nlohmann::ordered_json flags = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void input(const fs::path& p) {
    inputs.push_back({{"path", p.string()}, {"fnv1a64", fnv1a64(read_file(p))}});
  }
  void write_output(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw FormatError("cannot write " + p.string());
    out << content;
    out.close();
    outputs.push_back(p.string());
  }
  void finish() const {
    if (outputs.empty()) return;
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["flags"] = flags;
    j["inputs"] = inputs;
    j["tool_version"] = kToolVersion;
    j["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    j["outputs"] = outputs;
    for (const auto& o : outputs) {
      std::ofstream out(o + ".manifest.json", std::ios::binary);
      out << j.dump(2) << "\n";
    }
  }
};

// Writes machine output to --out when given, else stdout.
void emit(Manifest& m, const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-")
    std::cout << content << std::flush;
  else
    m.write_output(out_path, content);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) throw FormatError("invalid integer list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

CISpectrum spectrum_for(const CodeGraph& g, const std::string& cache, Manifest& m, int threads) {
  if (!cache.empty() && fs::exists(cache)) {
    m.input(cache);
    CISpectrum s = load_spectrum(cache);
    if (s.k_sys != g.k_sys() || s.k_env != g.k_env()) throw FormatError("spectrum cache does not match the graph sizes");
    return s;
  }
  SymmetricOptions opts = SymmetricOptions::from_env();
  opts.threads = threads;
  SymmetricStats stats;
  CISpectrum s = symmetric_lambda(g, opts, &stats);
  std::cerr << "symci: |Aut| = " << stats.group_order << ", " << stats.canonical_4_colorings
            << " canonical 4-colorings, " << stats.rb_orbits << " RB orbits, " << stats.b_orbits << " B orbits\n";
  if (!cache.empty()) m.write_output(cache, spectrum_to_json(s));
  return s;
}

CodeGraph load_graph_input(const std::string& path, Manifest& m) {
  m.input(path);
  return load_graph(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent information of graph-state codes under Pauli channels"};
  app.require_subcommand(1);
  int threads = 0;
  std::uint64_t seed = 1;
  app.add_option("--threads", threads, "worker threads (default: logical cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "seed for random channel points");

  Manifest manifest;
  std::string out_path;

  // family
  auto* family = app.add_subcommand("family", "write a code-family graph");
  std::string kind;
  int n = 0, n1 = 0, n2 = 0;
  std::string branches;
  family->add_option("--kind", kind, "rep|cat|tree|shor")->required()->check(CLI::IsMember({"rep", "cat", "tree", "shor"}));
  family->add_option("--n", n, "system vertices of a repetition code");
  family->add_option("--n1", n1, "inner repetition size of a cat code");
  family->add_option("--n2", n2, "outer repetition size of a cat code");
  family->add_option("--branches", branches, "leaf counts per tree branch, comma separated");
  family->add_option("--out", out_path, "output graph JSON (default stdout)");

  // convert
  auto* convert = app.add_subcommand("convert", "stabilizer generators to a graph");
  std::string stab_path, env_list;
  convert->add_option("--stabilizers", stab_path, "stabilizer text file")->required();
  convert->add_option("--env", env_list, "environment qubits, comma separated (default: last qubit)");
  convert->add_option("--out", out_path, "output graph JSON (default stdout)");

  // ci
  auto* ci = app.add_subcommand("ci", "coherent information per channel use");
  std::string graph_path, p_text, dir_text, engine = "symmetric", cache;
  double x = -1;
  ci->add_option("--graph", graph_path, "graph JSON")->required();
  auto* p_opt = ci->add_option("--p", p_text, "p0,p1,p2,p3");
  auto* d_opt = ci->add_option("--direction", dir_text, "d1,d2,d3 (with --x)");
  auto* x_opt = ci->add_option("--x", x, "noise scale along --direction");
  p_opt->excludes(d_opt);
  d_opt->needs(x_opt);
  x_opt->needs(d_opt);
  ci->add_option("--engine", engine, "symmetric|direct|dense")->check(CLI::IsMember({"symmetric", "direct", "dense"}));
  ci->add_option("--spectrum", cache, "spectrum cache file (read if present, else written)");

  // threshold
  auto* thr = app.add_subcommand("threshold", "CI threshold along a ray");
  double eps = kDefaultEps;
  thr->add_option("--graph", graph_path, "graph JSON")->required();
  thr->add_option("--direction", dir_text, "d1,d2,d3")->required();
  thr->add_option("--eps", eps, "bisection tolerance")->check(CLI::PositiveNumber);
  thr->add_option("--spectrum", cache, "spectrum cache file (read if present, else written)");

  // surface
  auto* surf = app.add_subcommand("surface", "threshold surface over the simplex");
  int resolution = 512;
  surf->add_option("--graph", graph_path, "graph JSON")->required();
  surf->add_option("--resolution", resolution, "grid points per axis")->check(CLI::Range(2, 1 << 14));
  surf->add_option("--eps", eps, "bisection tolerance")->check(CLI::PositiveNumber);
  surf->add_option("--spectrum", cache, "spectrum cache file (read if present, else written)");
  surf->add_option("--out", out_path, "output CSV (default stdout)");

  // search
  auto* search = app.add_subcommand("search", "exhaustive search over small codes");
  int ksys = 0, kenv_max = 0;
  std::uint64_t max_candidates = std::uint64_t{1} << 24;
  search->add_option("--ksys", ksys, "system vertices")->required();
  search->add_option("--kenv-max", kenv_max, "maximum environment vertices")->required();
  search->add_option("--direction", dir_text, "d1,d2,d3")->required();
  search->add_option("--max-candidates", max_candidates, "bound on labeled candidates");
  search->add_option("--eps", eps, "bisection tolerance")->check(CLI::PositiveNumber);
  search->add_option("--out", out_path, "output CSV (default stdout)");

  // rates
  auto* rates = app.add_subcommand("rates", "best code CI minus hashing bound on a plane");
  std::string graphs_dir;
  double f = 1.0;
  int res = 256;
  rates->add_option("--graphs", graphs_dir, "directory of graph JSON files")->required();
  rates->add_option("--f", f, "plane slope p3 = f p1")->check(CLI::PositiveNumber);
  rates->add_option("--res", res, "grid points per axis")->check(CLI::Range(2, 1 << 14));
  rates->add_option("--out", out_path, "output CSV (default stdout)");

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "dump or load a spectrum cache");
  std::string load_path;
  auto* sg = spec->add_option("--graph", graph_path, "graph JSON to compute the spectrum of");
  auto* sl = spec->add_option("--load", load_path, "spectrum cache to validate and summarize");
  sg->excludes(sl);
  spec->add_option("--out", out_path, "output spectrum JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    CLI::App* sub = app.get_subcommands().front();
    manifest.subcommand = sub->get_name();
    for (const auto* opt : sub->get_options())
      if (opt->count() > 0 && !opt->get_lnames().empty()) manifest.flags[opt->get_lnames().front()] = opt->as<std::string>();
    manifest.flags["threads"] = threads;
    manifest.flags["seed"] = seed;

    if (sub == family) {
      CodeGraph g = [&] {
        if (kind == "rep") return repetition_graph(n);
        if (kind == "cat") return cat_graph(n1, n2);
        if (kind == "tree") {
          auto counts = parse_int_list(branches);
          return tree_graph(counts);
        }
        return shor_graph();
      }();
      emit(manifest, out_path, graph_to_json(g));
    } else if (sub == convert) {
      manifest.input(stab_path);
      GeneratorMatrix m = read_stabilizer_file(stab_path);
      std::vector<int> env = env_list.empty() ? std::vector<int>{m.n - 1} : parse_int_list(env_list);
      emit(manifest, out_path, graph_to_json(graph_from_stabilizers(m, env)));
    } else if (sub == ci) {
      CodeGraph g = load_graph_input(graph_path, manifest);
      if (!*p_opt && !*d_opt) throw FormatError("ci needs --p or --direction with --x");
      PauliParams p = *p_opt ? parse_pauli_params(p_text) : parse_direction(dir_text).at(x);
      double v = 0;
      if (engine == "dense")
        v = dense_oracle_ci(g, p);
      else if (engine == "direct")
        v = direct_ci(g, p);
      else
        v = evaluate_ci(spectrum_for(g, cache, manifest, threads), p);
      std::cout << format_double(v) << "\n";
    } else if (sub == thr) {
      CodeGraph g = load_graph_input(graph_path, manifest);
      RayDirection d = parse_direction(dir_text);
      auto t = threshold(spectrum_for(g, cache, manifest, threads), d, eps);
      std::cout << (t ? format_double(*t) : std::string("none")) << "\n";
    } else if (sub == surf) {
      CodeGraph g = load_graph_input(graph_path, manifest);
      ScanOptions so;
      so.threads = threads;
      so.eps = eps;
      auto samples = surface(spectrum_for(g, cache, manifest, threads), resolution, so);
      emit(manifest, out_path, surface_csv(samples));
    } else if (sub == search) {
      SearchOptions so;
      so.max_candidates = max_candidates;
      so.scan.threads = threads;
      so.scan.eps = eps;
      so.symmetric = SymmetricOptions::from_env();
      auto result = exhaustive_search(ksys, kenv_max, parse_direction(dir_text), so);
      std::cerr << "search: " << result.system_graphs << " system graphs, " << result.labeled_candidates
                << " labeled candidates, " << result.connected_candidates << " connected, " << result.records.size()
                << " distinct codes\n";
      emit(manifest, out_path, search_csv(result.records));
    } else if (sub == rates) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(graphs_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      std::vector<CISpectrum> spectra;
      for (std::size_t i = 0; i < files.size(); ++i) {
        std::cerr << "rates: code " << i << " = " << files[i].filename().string() << "\n";
        spectra.push_back(spectrum_for(load_graph_input(files[i].string(), manifest), "", manifest, threads));
      }
      ScanOptions so;
      so.threads = threads;
      emit(manifest, out_path, rates_csv(rate_planes(spectra, f, res, so)));
    } else if (sub == spec) {
      if (!load_path.empty()) {
        manifest.input(load_path);
        CISpectrum s = load_spectrum(load_path);
        SpectrumEvaluator::Result r = SpectrumEvaluator(s).evaluate(PauliParams::noiseless());
        nlohmann::ordered_json j;
        j["k_sys"] = s.k_sys;
        j["k_env"] = s.k_env;
        j["rb_terms"] = s.rb_terms.size();
        j["b_terms"] = s.b_terms.size();
        j["noiseless_ci"] = r.ci;
        std::cout << j.dump() << "\n";
      } else if (!graph_path.empty()) {
        CodeGraph g = load_graph_input(graph_path, manifest);
        emit(manifest, out_path, spectrum_to_json(spectrum_for(g, "", manifest, threads)));
      } else {
        throw FormatError("spectrum needs --graph or --load");
      }
    }
    manifest.finish();
    return 0;
  } catch (const ResourceError& e) {
    std::cerr << "resource bound: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
