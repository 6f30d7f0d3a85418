// Command-line front end. `run_cli` takes the argument vector and output
// streams so the whole interface can be driven in-process by tests.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "treecomp/analytics.hpp"
#include "treecomp/cbst.hpp"
#include "treecomp/dag.hpp"
#include "treecomp/experiments.hpp"
#include "treecomp/json_io.hpp"
#include "treecomp/sampler.hpp"
#include "treecomp/verify.hpp"

namespace treecomp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace cli_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

/// A compressed BST from either a saved CBST1 file or a JSON BST.
inline CompactedBst load_cbst(const std::string& path) {
  const auto bytes = read_file(path);
  if (bytes.rfind("CBST1", 0) == 0) {
    std::istringstream in(bytes);
    return CompactedBst::read(in);
  }
  return CompactedBst::build(parse_tree(bytes));
}

/// TREECOMP_SEED, when set, overrides --seed.
inline std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("TREECOMP_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 0);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string("TREECOMP_SEED is not an unsigned integer: ") + env);
    }
  }
  return flag;
}

inline nlohmann::json rational(const mpq_class& q) { return q.get_str(); }

inline ShapeMode parse_mode(const std::string& s) { return s == "polya" ? ShapeMode::Polya : ShapeMode::PlaneBinary; }
inline Family parse_family(const std::string& s) { return s == "recursive" ? Family::Recursive : Family::Bst; }

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Fringe-subtree compaction of random trees"};
  app.require_subcommand(1);
  unsigned jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  const auto family_check = CLI::IsMember({"recursive", "bst"});
  const auto mode_check = CLI::IsMember({"polya", "plane"});

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Draw a uniform random tree (JSON on stdout)");
  std::string family = "bst";
  std::size_t n = 0;
  std::uint64_t seed = 0;
  sample_cmd->add_option("--family", family)->required()->check(family_check);
  sample_cmd->add_option("--n", n)->required()->check(CLI::Range(std::size_t{1}, std::size_t{1} << 26));
  sample_cmd->add_option("--seed", seed, "Master seed (TREECOMP_SEED overrides)");
  sample_cmd->add_flag("--json", "Emit JSON (the only format)");

  // compact
  auto* compact_cmd = app.add_subcommand("compact", "Compact a JSON tree into its shape DAG");
  std::string in_path;
  std::string mode;
  compact_cmd->add_option("--in", in_path)->required();
  compact_cmd->add_option("--mode", mode, "Defaults to the tree's own mode")->check(mode_check);

  // cbst
  auto* cbst_cmd = app.add_subcommand("cbst", "Compressed binary search trees");
  cbst_cmd->require_subcommand(1);
  std::string cbst_out;
  auto* cbst_build = cbst_cmd->add_subcommand("build", "Compress a JSON BST; print a summary");
  cbst_build->add_option("--in", in_path)->required();
  cbst_build->add_option("--out", cbst_out, "Write the CBST1 binary form");
  auto* cbst_search = cbst_cmd->add_subcommand("search", "Search a key in the compressed structure");
  std::int64_t query = 0;
  cbst_search->add_option("--in", in_path)->required();
  cbst_search->add_option("--query", query)->required();
  auto* cbst_unfold = cbst_cmd->add_subcommand("unfold", "Rebuild the original BST as JSON");
  cbst_unfold->add_option("--in", in_path)->required();

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Weights, series and roots for shapes of size k");
  analyze_cmd->require_subcommand(1);
  std::uint32_t k = 0;
  std::size_t series_n = 0;
  long precision = kDefaultRootBits;
  std::string shape_json;
  auto add_shape_opts = [&](CLI::App* c) {
    c->add_option("--mode", mode)->required()->check(mode_check);
    c->add_option("--k", k, "Shape size (all shapes of this size)")->check(CLI::Range(1u, 64u));
    c->add_option("--shape", shape_json, "A single shape as JSON instead of --k");
  };
  auto* an_weights = analyze_cmd->add_subcommand("weights", "Labeling counts and weights");
  add_shape_opts(an_weights);
  auto* an_series = analyze_cmd->add_subcommand("series", "Avoidance probability [z^n]S_t/[z^n]T");
  add_shape_opts(an_series);
  an_series->add_option("--n", series_n, "Tree size (default 2k)")->check(CLI::Range(std::size_t{1}, kMaxSeriesOrder));
  auto* an_roots = analyze_cmd->add_subcommand("roots", "Dominant singularity 1+eps of S_t");
  add_shape_opts(an_roots);
  an_roots->add_option("--precision", precision, "Bits")->check(CLI::Range(64L, 65536L));

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run acceptance checks");
  std::string suite = "all";
  verify_cmd->add_option("suite", suite)->check(CLI::IsMember(suite_names()));

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Batch studies writing CSV");
  exp_cmd->require_subcommand(1);
  std::string out_dir = ".";
  std::vector<std::uint64_t> sizes;
  std::uint64_t trials = 0;
  auto* ex_scaling = exp_cmd->add_subcommand("scaling", "Compacted size vs n");
  ex_scaling->add_option("--out", out_dir)->required();
  ex_scaling->add_option("--family", family)->required()->check(family_check);
  ex_scaling->add_option("--sizes", sizes, "Tree sizes")->delimiter(',');
  ex_scaling->add_option("--trials", trials, "Trials per size (default 20)");
  ex_scaling->add_option("--seed", seed);
  Fig5Config fig5;
  auto* ex_fig5 = exp_cmd->add_subcommand("fig5", "Footprint ratio and search cost of compressed BSTs");
  ex_fig5->add_option("--out", out_dir)->required();
  ex_fig5->add_option("--first", fig5.first);
  ex_fig5->add_option("--last", fig5.last);
  ex_fig5->add_option("--step", fig5.step);
  ex_fig5->add_option("--trials", fig5.trials);
  ex_fig5->add_option("--queries", fig5.queries);
  ex_fig5->add_option("--seed", seed);
  LemmaConfig lemma;
  std::string selection = "all";
  auto* ex_lemmas = exp_cmd->add_subcommand("lemmas", "Roots and normalized eps over shapes");
  ex_lemmas->add_option("--out", out_dir)->required();
  ex_lemmas->add_option("--mode", mode)->required()->check(mode_check);
  ex_lemmas->add_option("--k-min", lemma.k_min);
  ex_lemmas->add_option("--k-max", lemma.k_max);
  ex_lemmas->add_option("--select", selection)->check(CLI::IsMember({"all", "max-weight", "path"}));
  ex_lemmas->add_option("--precision", precision)->check(CLI::Range(64L, 65536L));
  std::string pilot_out;
  std::uint64_t pilot_seed = kPilotSeed;
  auto* ex_pilot = exp_cmd->add_subcommand("pilot", "Calibrate acceptance bands; writes a C++ header");
  ex_pilot->add_option("--out", pilot_out)->required();
  ex_pilot->add_option("--trials", trials, "Pilot trials (default 1000)");
  ex_pilot->add_option("--seed", pilot_seed);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  auto shapes_for = [&](const std::string& m) {
    const auto sm = parse_mode(m);
    if (!shape_json.empty()) {
      auto s = parse_shape(shape_json);
      if (s.mode() != sm) throw UsageError("--shape does not match --mode");
      return std::vector<Shape>{s};
    }
    if (k == 0) throw UsageError("one of --k or --shape is required");
    return enumerate_shapes(sm, k);
  };

  try {
    if (*sample_cmd) {
      out << serialize(sample({parse_family(family), n, effective_seed(seed)})) << "\n";
    } else if (*compact_cmd) {
      const auto tree = parse_tree(read_file(in_path));
      out << dag_to_json(mode.empty() ? compact(tree) : compact(tree, parse_mode(mode))).dump() << "\n";
    } else if (*cbst_build) {
      const auto tree = parse_tree(read_file(in_path));
      const auto c = CompactedBst::build(tree);
      if (!cbst_out.empty()) {
        auto f = open_out(cbst_out);
        c.write(f);
      }
      nlohmann::json j{{"n", c.size()},
                       {"retained", c.retained().size()},
                       {"redirects", c.redirects().size()},
                       {"bytes_plain", footprint(tree)},
                       {"bytes_compact", footprint(c)},
                       {"ratio", static_cast<double>(footprint(c)) / static_cast<double>(footprint(tree))}};
      out << j.dump() << "\n";
    } else if (*cbst_search) {
      const auto r = load_cbst(in_path).search(query);
      out << "found=" << (r.found ? "true" : "false") << " comparisons=" << r.comparisons
          << " additions=" << r.additions << "\n";
    } else if (*cbst_unfold) {
      out << serialize(load_cbst(in_path).unfold()) << "\n";
    } else if (*an_weights) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& s : shapes_for(mode)) {
        const auto ws = weight(s);
        arr.push_back({{"shape", s.encoding()}, {"k", ws.k}, {"labelings", ws.labelings.get_str()}, {"w", rational(ws.w)}});
      }
      out << arr.dump() << "\n";
    } else if (*an_series) {
      nlohmann::json arr = nlohmann::json::array();
      const auto fam = parse_mode(mode) == ShapeMode::Polya ? Family::Recursive : Family::Bst;
      for (const auto& s : shapes_for(mode)) {
        const auto nn = series_n ? series_n : 2 * static_cast<std::size_t>(s.size());
        const auto p = coefficient_ratio_check(fam, s, nn);
        arr.push_back({{"shape", s.encoding()}, {"n", nn}, {"avoid_probability", rational(p)}, {"approx", p.get_d()}});
      }
      out << arr.dump() << "\n";
    } else if (*an_roots) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& s : shapes_for(mode)) {
        const auto row = lemma_row(s, precision);
        nlohmann::json j{{"shape", s.encoding()}, {"k", row.k}, {"w", rational(row.w)}, {"epsilon", row.epsilon},
                         {"bound_ok", row.bound_ok}};
        if (row.error.empty()) j["normalized"] = row.normalized;
        else j["error"] = row.error;
        arr.push_back(std::move(j));
      }
      out << arr.dump() << "\n";
    } else if (*verify_cmd) {
      const auto results = run_suite(suite, {jobs, kVerifySeed}, out);
      std::size_t passed = 0;
      for (const auto& r : results) passed += r.pass;
      out << passed << "/" << results.size() << " criteria passed\n";
      return passed == results.size() ? kExitOk : kExitVerifyFailed;
    } else if (*ex_scaling) {
      if (sizes.empty()) sizes = {1024, 2048, 4096, 8192, 16384, 32768, 65536, 131072};
      const auto recs = run_scaling(parse_family(family), sizes, trials ? trials : 20, effective_seed(seed), jobs);
      const auto path = std::filesystem::path(out_dir) / ("scaling_" + family + ".csv");
      auto f = open_out(path);
      write_scaling_csv(f, recs);
      const auto fit = fit_nlogn(recs);
      out << nlohmann::json{{"csv", path.string()}, {"alpha", fit.alpha}, {"r2", fit.r2}}.dump() << "\n";
    } else if (*ex_fig5) {
      fig5.seed = effective_seed(seed);
      const auto recs = run_fig5(fig5, jobs);
      const auto path = std::filesystem::path(out_dir) / "fig5.csv";
      auto f = open_out(path);
      write_fig5_csv(f, recs);
      nlohmann::json j{{"csv", path.string()}, {"records", recs.size()}};
      const auto means = mean_ratio_by_size(recs);
      if (means.size() >= 2 && means.begin()->first > 1) {
        std::vector<double> ns, rs;
        for (const auto& [size, r] : means) {
          ns.push_back(static_cast<double>(size));
          rs.push_back(r);
        }
        const auto fit = fit_inverse_log(ns, rs);
        j["alpha"] = fit.alpha;
        j["r2"] = fit.r2_uncentered;
        j["r2_centered"] = fit.r2;
      }
      out << j.dump() << "\n";
    } else if (*ex_lemmas) {
      lemma.mode = parse_mode(mode);
      lemma.bits = precision;
      lemma.selection = selection == "all" ? ShapeSelection::All
                        : selection == "path" ? ShapeSelection::Path
                                              : ShapeSelection::MaxWeight;
      const auto recs = run_lemma_sweep(lemma, jobs);
      const auto path = std::filesystem::path(out_dir) / ("lemma_" + mode + ".csv");
      auto f = open_out(path);
      write_lemma_csv(f, recs);
      std::size_t ok = 0;
      for (const auto& r : recs) ok += r.bound_ok;
      out << nlohmann::json{{"csv", path.string()}, {"rows", recs.size()}, {"bound_ok", ok}}.dump() << "\n";
    } else if (*ex_pilot) {
      const auto s = effective_seed(pilot_seed);
      const auto bands = run_pilot(trials ? trials : 1000, s, jobs);
      auto f = open_out(pilot_out);
      write_pilot_header(f, bands, s);
      out << nlohmann::json{{"header", pilot_out}, {"bands", bands.size()}}.dump() << "\n";
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << (e.where().empty() ? "" : " at " + e.where()) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace treecomp
