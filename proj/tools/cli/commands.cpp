#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "objhc/dataset.hpp"
#include "objhc/dendrogram.hpp"
#include "objhc/hc.hpp"
#include "objhc/measures.hpp"
#include "objhc/objectives.hpp"
#include "objhc/oracle.hpp"
#include "objhc/parallel.hpp"
#include "objhc/random.hpp"

namespace objhc::cli {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "text";
};

struct DataOpts {
  std::string path;
  std::string format = "csv";
  bool header = false;
  int label_column = -1;
};

struct MeasureOpts {
  std::string kind = "cossim";
  double gamma = 1.0;
  int rbf_features = 1024;
};

struct AlgoOpts {
  std::string algo = "bppc";
  int theta = 512;
  double delta = 0.0;
  std::vector<double> delta_grid;
  int iterations = 200;
  double eta0 = 0.0;
  double noise = 0.1;
  int restarts = 3;
  std::string rounding = "topk";
  std::string solver = "auto";
};

void add_data_options(CLI::App* app, DataOpts& d) {
  app->add_option("data", d.path, "Dataset file")->required();
  app->add_option("--data-format", d.format, "csv or f32")->capture_default_str();
  app->add_flag("--header", d.header, "CSV has a header row");
  app->add_option("--label-column", d.label_column, "CSV column holding class labels");
}

void add_measure_options(CLI::App* app, MeasureOpts& m) {
  app->add_option("--measure", m.kind, "cossim, l2sq or rbf")->capture_default_str();
  app->add_option("--gamma", m.gamma, "rbf bandwidth")->capture_default_str();
  app->add_option("--rbf-features", m.rbf_features, "rbf random features")->capture_default_str();
}

void add_algo_options(CLI::App* app, AlgoOpts& a) {
  app->add_option("--theta", a.theta, "Average-linkage threshold")->capture_default_str();
  app->add_option("--delta", a.delta, "Partition imbalance")->capture_default_str();
  app->add_option("--delta-grid", a.delta_grid,
                  "Try each delta and keep the best tree under the measure's objective")
      ->delimiter(',');
  app->add_option("--iterations", a.iterations, "Gradient steps")->capture_default_str();
  app->add_option("--eta0", a.eta0, "Initial step (0 = automatic)")->capture_default_str();
  app->add_option("--noise", a.noise, "Start noise variance")->capture_default_str();
  app->add_option("--restarts", a.restarts, "Independent descents")->capture_default_str();
  app->add_option("--rounding", a.rounding, "topk or randomized")->capture_default_str();
  app->add_option("--solver", a.solver, "auto, exhaustive or gd")->capture_default_str();
}

Measure make_measure(const MeasureOpts& m) {
  Measure out;
  out.kind = parse_measure_kind(m.kind);
  out.gamma = m.gamma;
  out.rbf_features = m.rbf_features;
  require(m.gamma > 0.0, ErrorKind::InvalidParam, "--gamma must be positive");
  require(m.rbf_features >= 1, ErrorKind::InvalidParam, "--rbf-features must be >= 1");
  return out;
}

HcConfig make_config(const AlgoOpts& a, std::uint64_t seed) {
  HcConfig cfg;
  cfg.theta = a.theta;
  cfg.seed = seed;
  cfg.partition.delta = a.delta;
  cfg.partition.iterations = a.iterations;
  cfg.partition.eta0 = a.eta0;
  cfg.partition.noise_variance = a.noise;
  cfg.partition.restarts = a.restarts;
  cfg.partition.seed = seed;
  if (a.rounding == "topk") {
    cfg.partition.rounding = Rounding::DeterministicTopK;
  } else if (a.rounding == "randomized") {
    cfg.partition.rounding = Rounding::Randomized;
  } else {
    fail(ErrorKind::InvalidParam, "unknown rounding '" + a.rounding + "'");
  }
  if (a.solver == "auto") {
    cfg.solver = Max2SatSolver::Auto;
  } else if (a.solver == "exhaustive") {
    cfg.solver = Max2SatSolver::Exhaustive;
  } else if (a.solver == "gd") {
    cfg.solver = Max2SatSolver::GdRelaxation;
  } else {
    fail(ErrorKind::InvalidParam, "unknown solver '" + a.solver + "'");
  }
  cfg.validate();
  return cfg;
}

EmbeddingSet load(const DataOpts& d) {
  CsvOptions csv;
  csv.header = d.header;
  if (d.label_column >= 0) csv.label_column = d.label_column;
  return load_dataset(d.path, parse_data_format(d.format), csv);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

long peak_memory_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) return std::strtol(line.c_str() + 6, nullptr, 10);
  }
  return -1;
}

json measure_json(const MeasureOpts& m) {
  return {{"kind", m.kind}, {"gamma", m.gamma}, {"rbf_features", m.rbf_features}};
}

json data_json(const DataOpts& d) {
  return {{"path", d.path},
          {"format", d.format},
          {"header", d.header},
          {"label_column", d.label_column >= 0 ? json(d.label_column) : json(nullptr)}};
}

json algo_json(const AlgoOpts& a) {
  return {{"name", a.algo},         {"theta", a.theta},         {"delta", a.delta},
          {"delta_grid", a.delta_grid}, {"iterations", a.iterations}, {"eta0", a.eta0},
          {"noise_variance", a.noise},  {"restarts", a.restarts},     {"rounding", a.rounding},
          {"solver", a.solver}};
}

// Everything needed to replay a run, written next to its output.
class Manifest {
 public:
  Manifest(const std::vector<std::string>& args, const GlobalOpts& g) : start_(Clock::now()) {
    doc_["argv"] = args;
    doc_["seed"] = g.seed;
    doc_["threads"] = g.threads;
  }
  json& operator[](const char* key) { return doc_[key]; }
  void write(const std::string& output_path) {
    doc_["outputs"].push_back(output_path);
    doc_["wall_clock_seconds"] =
        std::chrono::duration<double>(Clock::now() - start_).count();
    doc_["peak_memory_kb"] = peak_memory_kb();
    write_text(output_path + ".manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  Clock::time_point start_;
};

ObjectiveKind default_objective(const Measure& m) {
  return m.orientation() == Orientation::Distance ? ObjectiveKind::CKMM : ObjectiveKind::MW;
}

// Runs the algorithm once, or once per delta of the grid keeping the best
// tree under the measure's natural objective.
Dendrogram cluster_once(Algorithm algo, const EmbeddingSet& data, const Measure& measure,
                        HcConfig cfg, const std::vector<double>& grid,
                        const FeatureMaps* maps_for_sweep) {
  if (grid.empty() || algo != Algorithm::BisectPlusPlus) {
    return run_algorithm(algo, data, measure, cfg);
  }
  std::optional<FeatureMaps> own;
  if (!maps_for_sweep) {
    own = build_feature_maps(data, measure, cfg.seed);
    maps_for_sweep = &*own;
  }
  const ObjectiveKind kind = default_objective(measure);
  std::optional<Dendrogram> best;
  double best_value = 0.0;
  for (double delta : grid) {
    cfg.partition.delta = delta;
    cfg.validate();
    auto tree = run_algorithm(algo, data, measure, cfg);
    const double value = evaluate(kind, tree, *maps_for_sweep);
    if (!best || value > best_value) {
      best = std::move(tree);
      best_value = value;
    }
  }
  return std::move(*best);
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

json report_json(const ObjectiveReport& r) {
  json j = {{"objective", to_string(r.kind)},
            {"q_value", r.q_value},
            {"q_upper", r.q_upper},
            {"q_random_expected", r.q_random_expected},
            {"alpha", r.alpha},
            {"alpha_star", r.alpha_star},
            {"degenerate", r.degenerate}};
  j["purity"] = r.purity ? json(*r.purity) : json(nullptr);
  return j;
}

void print_report(std::ostream& out, const ObjectiveReport& r, const std::string& measure) {
  auto row = [&](const std::string& k, const std::string& v) {
    out << std::left << std::setw(14) << k << v << "\n";
  };
  std::ostringstream q, ub, er;
  q << std::setprecision(10) << r.q_value;
  ub << std::setprecision(10) << r.q_upper;
  er << std::setprecision(10) << r.q_random_expected;
  row("objective", to_string(r.kind));
  row("measure", measure);
  row("Q", q.str());
  row(r.kind == ObjectiveKind::Dasgupta ? "Q_lb" : "Q_ub", ub.str());
  row("E[Q(T_R)]", er.str());
  row("alpha/alpha*", format_pair(r.alpha, r.alpha_star));
  if (r.degenerate) row("note", "degenerate normalization");
  if (r.purity) row("DP", format_fraction(*r.purity));
}

// ---- gen ---------------------------------------------------------------

struct GenOpts {
  int clusters = 4;
  int per = 25;
  int dim = 16;
  double sep = 10.0;
  std::string out;
  std::string out_format = "csv";
};

int cmd_gen(const GenOpts& o, const GlobalOpts& g, const std::vector<std::string>& args,
            std::ostream& out) {
  Manifest manifest(args, g);
  const auto data = gen_mixture(o.clusters, o.per, o.dim, o.sep, g.seed);
  save_dataset(data, o.out, parse_data_format(o.out_format));
  manifest["command"] = "gen";
  manifest["params"] = {{"clusters", o.clusters}, {"per", o.per},    {"dim", o.dim},
                        {"sep", o.sep},           {"format", o.out_format}};
  manifest.write(o.out);
  if (g.format == "json") {
    out << json{{"output", o.out}, {"n", data.size()}, {"d", data.dim()}}.dump() << "\n";
  } else {
    out << "wrote " << data.size() << " points (d = " << data.dim() << ") to " << o.out << "\n";
  }
  return kOk;
}

// ---- cluster -----------------------------------------------------------

struct ClusterOpts {
  DataOpts data;
  MeasureOpts measure;
  AlgoOpts algo;
  std::string out;
};

int cmd_cluster(const ClusterOpts& o, const GlobalOpts& g, const std::vector<std::string>& args,
                std::ostream& out) {
  Manifest manifest(args, g);
  const auto data = load(o.data);
  const auto measure = make_measure(o.measure);
  const auto algo = parse_algorithm(o.algo.algo);
  const auto cfg = make_config(o.algo, g.seed);
  const auto t0 = Clock::now();
  const auto tree = cluster_once(algo, data, measure, cfg, o.algo.delta_grid, nullptr);
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_text(o.out, serialize(tree) + "\n");
  manifest["command"] = "cluster";
  manifest["dataset"] = data_json(o.data);
  manifest["measure"] = measure_json(o.measure);
  manifest["algorithm"] = algo_json(o.algo);
  manifest["algorithm_seconds"] = seconds;
  manifest.write(o.out);
  if (g.format == "json") {
    out << json{{"output", o.out}, {"n", tree.n_leaves()}, {"seconds", seconds}}.dump() << "\n";
  } else {
    out << o.algo.algo << ": " << tree.n_leaves() << " leaves in " << fixed(seconds, 3)
        << " s -> " << o.out << "\n";
  }
  return kOk;
}

// ---- eval --------------------------------------------------------------

struct EvalOpts {
  DataOpts data;
  MeasureOpts measure;
  std::string tree;
  std::string objective;
  bool purity = false;
  std::string out;
};

int cmd_eval(const EvalOpts& o, const GlobalOpts& g, const std::vector<std::string>& args,
             std::ostream& out) {
  Manifest manifest(args, g);
  const auto data = load(o.data);
  const auto tree = deserialize(read_text(o.tree));
  require(tree.n_leaves() == static_cast<int>(data.size()), ErrorKind::DimensionMismatch,
          "tree has " + std::to_string(tree.n_leaves()) + " leaves but the dataset has " +
              std::to_string(data.size()) + " points");
  const auto measure = make_measure(o.measure);
  const auto kind =
      o.objective.empty() ? default_objective(measure) : parse_objective_kind(o.objective);
  const auto maps = build_feature_maps(data, measure, g.seed);
  auto report = make_report(kind, tree, maps);
  if (o.purity) {
    require(data.has_labels(), ErrorKind::MissingLabels, "--dp needs class labels");
    report.purity = dendrogram_purity(tree, *data.labels);
  }
  const json j = report_json(report);
  if (g.format == "json") {
    out << j.dump(2) << "\n";
  } else {
    print_report(out, report, o.measure.kind);
  }
  if (!o.out.empty()) {
    write_text(o.out, j.dump(2) + "\n");
    manifest["command"] = "eval";
    manifest["dataset"] = data_json(o.data);
    manifest["measure"] = measure_json(o.measure);
    manifest["tree"] = o.tree;
    manifest["objective"] = to_string(kind);
    manifest.write(o.out);
  }
  return kOk;
}

// ---- bench -------------------------------------------------------------

struct BenchOpts {
  DataOpts data;
  MeasureOpts measure;
  AlgoOpts algo;
  std::vector<std::string> algorithms{"bppc", "bppc0", "bkmeans", "randomcut", "random"};
  int reps = 5;
  std::string objective;
  std::string out;
};

struct BenchRow {
  std::string name;
  std::vector<double> alpha, alpha_star, purity, seconds;
  int failures = 0;
  std::string error;
};

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

const std::vector<double> kDefaultDeltaGrid{0.0, 0.1, 0.2, 0.3};

int cmd_bench(const BenchOpts& o, const GlobalOpts& g, const std::vector<std::string>& args,
              std::ostream& out, std::ostream& err) {
  Manifest manifest(args, g);
  require(o.reps >= 1, ErrorKind::InvalidParam, "--reps must be >= 1");
  const auto data = load(o.data);
  const auto measure = make_measure(o.measure);
  const auto kind =
      o.objective.empty() ? default_objective(measure) : parse_objective_kind(o.objective);
  const auto maps = build_feature_maps(data, measure, g.seed);
  const bool with_purity = data.has_labels();

  std::vector<BenchRow> rows;
  for (const auto& name : o.algorithms) {
    BenchRow row;
    row.name = name;
    for (int rep = 0; rep < o.reps; ++rep) {
      try {
        const std::uint64_t seed = derive_seed(g.seed, static_cast<std::uint64_t>(rep));
        AlgoOpts a = o.algo;
        std::vector<double> grid;
        Algorithm algo;
        if (name == "bppc0") {
          algo = Algorithm::BisectPlusPlus;
          a.delta = 0.0;
        } else {
          algo = parse_algorithm(name);
          if (algo == Algorithm::BisectPlusPlus)
            grid = a.delta_grid.empty() ? kDefaultDeltaGrid : a.delta_grid;
        }
        const auto cfg = make_config(a, seed);
        const auto t0 = Clock::now();
        const auto tree = cluster_once(algo, data, measure, cfg, grid, &maps);
        row.seconds.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
        const auto report = make_report(kind, tree, maps);
        row.alpha.push_back(report.alpha);
        row.alpha_star.push_back(report.alpha_star);
        if (with_purity) row.purity.push_back(dendrogram_purity(tree, *data.labels));
      } catch (const Error& e) {
        ++row.failures;
        row.error = e.what();
      }
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> rank(rows.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    const bool ea = rows[a].alpha_star.empty(), eb = rows[b].alpha_star.empty();
    if (ea != eb) return eb;
    return mean_of(rows[a].alpha_star) > mean_of(rows[b].alpha_star);
  });

  json results = json::array();
  int succeeded = 0;
  for (std::size_t r = 0; r < rank.size(); ++r) {
    const auto& row = rows[rank[r]];
    if (!row.alpha_star.empty()) ++succeeded;
    json j = {{"rank", r + 1},
              {"algorithm", row.name},
              {"runs", row.alpha_star.size()},
              {"failures", row.failures},
              {"alpha_mean", mean_of(row.alpha)},
              {"alpha_star_mean", mean_of(row.alpha_star)},
              {"alpha_star_std", std_of(row.alpha_star)},
              {"alpha_star", row.alpha_star},
              {"seconds_mean", mean_of(row.seconds)}};
    j["purity_mean"] = row.purity.empty() ? json(nullptr) : json(mean_of(row.purity));
    if (!row.error.empty()) j["error"] = row.error;
    results.push_back(std::move(j));
  }
  const json doc = {{"objective", to_string(kind)},
                    {"measure", o.measure.kind},
                    {"n", data.size()},
                    {"reps", o.reps},
                    {"results", results}};

  if (g.format == "json") {
    out << doc.dump(2) << "\n";
  } else {
    out << "objective " << to_string(kind) << ", measure " << o.measure.kind << ", n = "
        << data.size() << ", " << o.reps << " repetitions\n";
    out << std::left << std::setw(6) << "rank" << std::setw(12) << "algorithm" << std::setw(14)
        << "alpha/alpha*" << std::setw(8) << "std" << std::setw(8) << "DP" << std::setw(11)
        << "seconds" << "runs\n";
    for (const auto& j : results) {
      const bool ok = j["runs"].get<int>() > 0;
      out << std::left << std::setw(6) << j["rank"].get<int>() << std::setw(12)
          << j["algorithm"].get<std::string>();
      if (ok) {
        out << std::setw(14)
            << format_pair(j["alpha_mean"].get<double>(), j["alpha_star_mean"].get<double>())
            << std::setw(8) << format_fraction(j["alpha_star_std"].get<double>()) << std::setw(8)
            << (j["purity_mean"].is_null() ? std::string("-")
                                           : format_fraction(j["purity_mean"].get<double>()))
            << std::setw(11) << fixed(j["seconds_mean"].get<double>(), 3);
      } else {
        out << std::setw(14) << "FAILED" << std::setw(8) << "-" << std::setw(8) << "-"
            << std::setw(11) << "-";
      }
      out << j["runs"].get<int>() << "/" << o.reps << "\n";
    }
  }
  for (const auto& row : rows) {
    if (row.failures > 0) err << row.name << ": " << row.failures << " failed run(s): " << row.error << "\n";
  }
  if (!o.out.empty()) {
    write_text(o.out, doc.dump(2) + "\n");
    manifest["command"] = "bench";
    manifest["dataset"] = data_json(o.data);
    manifest["measure"] = measure_json(o.measure);
    manifest["algorithm"] = algo_json(o.algo);
    manifest["algorithms"] = o.algorithms;
    manifest["reps"] = o.reps;
    manifest["objective"] = to_string(kind);
    manifest.write(o.out);
  }
  return succeeded > 0 ? kOk : kAlgorithm;
}

// ---- oracle ------------------------------------------------------------

struct OracleOpts {
  DataOpts data;
  MeasureOpts measure;
  std::string tree;
  std::string objective;
  bool exhaustive = false;
  bool max2sat = false;
  int mc_samples = 0;
};

double rel_err(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

int cmd_oracle(const OracleOpts& o, const GlobalOpts& g, std::ostream& out) {
  const auto data = load(o.data);
  const auto measure = make_measure(o.measure);
  const auto kind =
      o.objective.empty() ? default_objective(measure) : parse_objective_kind(o.objective);
  require(measure.orientation() == required_orientation(kind), ErrorKind::MeasureMismatch,
          "measure orientation does not fit the objective");
  const int n = static_cast<int>(data.size());
  const auto tree = o.tree.empty() ? random_binary_tree(n, g.seed) : deserialize(read_text(o.tree));
  require(tree.n_leaves() == n, ErrorKind::DimensionMismatch, "tree and dataset sizes differ");

  const auto w = oracle::pairwise_matrix(data, measure);
  const auto maps = build_feature_maps(data, measure, g.seed);
  json doc = {{"n", n}, {"objective", to_string(kind)}, {"measure", o.measure.kind}};
  bool agree = true;
  const double tol = 1e-9;

  const double fast = evaluate(kind, tree, maps);
  const double direct = oracle::eval_pairwise_direct(tree, w, kind);
  doc["fast"] = fast;
  doc["direct"] = direct;
  // The random-feature rbf map is an estimate; only exact maps must agree.
  if (maps.exact) agree = agree && rel_err(fast, direct) <= tol;
  if (tree.is_binary() && n <= 200) {
    double triple = 0;
    switch (kind) {
      case ObjectiveKind::MW:
      case ObjectiveKind::MWPlus:
        triple = oracle::eval_mw_triples(tree, w);
        break;
      case ObjectiveKind::Dasgupta:
        triple = oracle::eval_dasgupta_triples(tree, w);
        break;
      default:
        triple = oracle::eval_ckmm_triples(tree, w);
    }
    doc["triple"] = triple;
    agree = agree && rel_err(triple, direct) <= tol;
  }
  if (n <= 200 && kind != ObjectiveKind::Dasgupta) {
    const bool mw_like = kind == ObjectiveKind::MW || kind == ObjectiveKind::MWPlus;
    const double ub_fast = mw_like ? mw_upper_bound(maps) : ckmm_upper_bound(maps);
    const double ub = mw_like ? oracle::mw_upper_bound(w) : oracle::ckmm_upper_bound(w);
    doc["upper_bound"] = ub;
    doc["upper_bound_fast"] = ub_fast;
    if (maps.exact) agree = agree && rel_err(ub_fast, ub) <= tol;
  }
  if (o.exhaustive) {
    const auto opt = oracle::exhaustive_tree_opt(w, kind);
    doc["opt"] = opt.value;
    doc["opt_tree"] = json::parse(serialize(opt.tree));
    doc["trees_enumerated"] = opt.trees_enumerated;
  }
  if (o.max2sat) {
    const auto s = oracle::exhaustive_balanced_max2sat(w);
    doc["max2sat_value"] = s.value;
    doc["max2sat_set"] = s.s_set;
  }
  if (o.mc_samples > 0) {
    const auto mc = oracle::monte_carlo_random_tree(w, kind, o.mc_samples, g.seed);
    doc["mc_mean"] = mc.mean;
    doc["mc_stderr"] = mc.stderr_mean;
    doc["closed_form_expectation"] = random_tree_expectation(maps, kind);
  }
  doc["agree"] = agree;

  if (g.format == "json") {
    out << doc.dump(2) << "\n";
  } else {
    for (const auto& [key, value] : doc.items()) {
      if (key == "opt_tree") continue;
      out << std::left << std::setw(26) << key << value.dump() << "\n";
    }
  }
  return agree ? kOk : kAlgorithm;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Format:
    case ErrorKind::EmptyDataset:
      return kIo;
    case ErrorKind::Infeasible:
    case ErrorKind::Degenerate:
      return kAlgorithm;
    default:
      return kParams;
  }
}

std::string format_fraction(double x) {
  std::string s = fixed(x, 2);
  if (s == "-0.00") s = "0.00";
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  if (s.rfind("-0.", 0) == 0) s.erase(1, 1);
  return s;
}

std::string format_pair(double alpha, double alpha_star) {
  return format_fraction(alpha) + "/" + format_fraction(alpha_star);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Objective-based hierarchical clustering of embedding vectors", "objhc"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker cap (0 = hardware)")->capture_default_str();
  app.add_option("--format", g.format, "Console output: text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a seeded Gaussian mixture");
  gen_cmd->add_option("--clusters", gen.clusters)->capture_default_str();
  gen_cmd->add_option("--per", gen.per, "Points per cluster")->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim)->capture_default_str();
  gen_cmd->add_option("--sep", gen.sep, "Center radius")->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.out, "Dataset file to write")->required();
  gen_cmd->add_option("--data-format", gen.out_format, "csv or f32")->capture_default_str();

  ClusterOpts cl;
  auto* cl_cmd = app.add_subcommand("cluster", "Build a tree and write it as JSON");
  add_data_options(cl_cmd, cl.data);
  add_measure_options(cl_cmd, cl.measure);
  cl_cmd->add_option("--algo", cl.algo.algo,
                     "bppc, b2satc, bbhc, avg, single, complete, ward, bkmeans, randomcut, random")
      ->capture_default_str();
  add_algo_options(cl_cmd, cl.algo);
  cl_cmd->add_option("-o,--output", cl.out, "Tree JSON to write")->required();

  EvalOpts ev;
  auto* ev_cmd = app.add_subcommand("eval", "Report objective values for a tree");
  add_data_options(ev_cmd, ev.data);
  ev_cmd->add_option("tree", ev.tree, "Tree JSON")->required();
  add_measure_options(ev_cmd, ev.measure);
  ev_cmd->add_option("--objective", ev.objective,
                     "dasgupta, mw, ckmm, mw_plus, ckmm_plus (default from the measure)");
  ev_cmd->add_flag("--dp", ev.purity, "Add dendrogram purity");
  ev_cmd->add_option("-o,--output", ev.out, "Also write the JSON report here");

  BenchOpts bn;
  auto* bn_cmd = app.add_subcommand("bench", "Compare algorithms over repeated seeds");
  add_data_options(bn_cmd, bn.data);
  add_measure_options(bn_cmd, bn.measure);
  add_algo_options(bn_cmd, bn.algo);
  bn_cmd->add_option("--algos", bn.algorithms, "Algorithms; bppc0 is bppc with delta = 0")
      ->delimiter(',')
      ->capture_default_str();
  bn_cmd->add_option("--reps", bn.reps, "Seeds per algorithm")->capture_default_str();
  bn_cmd->add_option("--objective", bn.objective, "dasgupta, mw, ckmm, mw_plus, ckmm_plus (default from the measure)");
  bn_cmd->add_option("-o,--output", bn.out, "Write results JSON here");

  OracleOpts orc;
  auto* or_cmd = app.add_subcommand("oracle", "Check fast evaluators against brute force");
  add_data_options(or_cmd, orc.data);
  add_measure_options(or_cmd, orc.measure);
  or_cmd->add_option("--tree", orc.tree, "Tree JSON (default: a random tree)");
  or_cmd->add_option("--objective", orc.objective, "dasgupta, mw, ckmm, mw_plus, ckmm_plus (default from the measure)");
  or_cmd->add_flag("--exhaustive", orc.exhaustive, "Exact optimum over all binary trees");
  or_cmd->add_flag("--max2sat", orc.max2sat, "Exact balanced MAX-2-SAT optimum");
  or_cmd->add_option("--mc", orc.mc_samples, "Monte Carlo samples of random trees");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "objhc: " << e.what() << "\n";
    return kParams;
  }

  try {
    if (g.threads < 0) fail(ErrorKind::InvalidParam, "--threads must be >= 0");
    if (g.threads > 0) set_max_threads(static_cast<unsigned>(g.threads));
    if (gen_cmd->parsed()) return cmd_gen(gen, g, args, out);
    if (cl_cmd->parsed()) return cmd_cluster(cl, g, args, out);
    if (ev_cmd->parsed()) return cmd_eval(ev, g, args, out);
    if (bn_cmd->parsed()) return cmd_bench(bn, g, args, out, err);
    if (or_cmd->parsed()) return cmd_oracle(orc, g, out);
  } catch (const Error& e) {
    err << "objhc: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    err << "objhc: out of memory\n";
    return kAlgorithm;
  } catch (const std::exception& e) {
    err << "objhc: " << e.what() << "\n";
    return kAlgorithm;
  }
  return kParams;
}

}  // namespace objhc::cli
