// depcap: command-line surface for the dependence-strength toolkit.
//
// Subcommands:
//   estimate          k-NN and partition estimators on a CSV sample file
//   channel capacity  Blahut-Arimoto or Renyi capacity of a channel matrix
//   channel compose   cascade two channels (X -> Y -> Z)
//   channel parallel  Kronecker product of two channels
//   channel augment   append a convex-mixture input row
//   axioms            numeric axiom battery for a capacity measure
//   bench sweep       convergence sweep CSVs, k-NN vs partition baselines
//   bench trend       trend-recovery probability on a cascade CSV
//   bench cascade     synthetic cascade generator
//
// stdout carries only the payload (JSON document, CSV matrix, or summary
// table); warnings and errors go to stderr. Exit codes: 0 success, 2 usage
// or validation error, 3 numerical failure, 4 axiom-battery failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "depcap/bench.hpp"
#include "depcap/channels.hpp"
#include "depcap/cmi.hpp"
#include "depcap/common.hpp"
#include "depcap/csv.hpp"
#include "depcap/estimators.hpp"
#include "depcap/schema.hpp"
#include "json.hpp"

namespace {

using namespace depcap;
using ordered_json = nlohmann::ordered_json;
using TimePoint = std::chrono::steady_clock::time_point;

double elapsed_ms(TimePoint start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

double parse_double_strict(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != text.size())
    throw validation_error(what + ": cannot parse '" + text + "' as a number");
  return v;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

// Reproducibility record carried by every JSON payload.
struct Manifest {
  std::string subcommand;
  std::map<std::string, std::string> flags;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> input_digest;
  TimePoint start;

  ordered_json to_json() const {
    ordered_json m;
    m["subcommand"] = subcommand;
    m["version"] = kVersion;
    m["wall_time_ms"] = elapsed_ms(start);
    m["flags"] = flags;
    m["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    m["input_digest"] =
        input_digest ? ordered_json(*input_digest) : ordered_json(nullptr);
    return m;
  }
};

// Self-check against the shipped schema before anything reaches stdout.
void emit_json(const ordered_json& doc) {
  const std::string text = doc.dump(2);
  validate_output_json(text);
  std::cout << text << '\n';
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void create_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw validation_error("cannot create output directory '" + dir +
                           "': " + ec.message());
}

std::ofstream open_out_file(const std::string& path) {
  std::ofstream file(path);
  if (!file)
    throw validation_error("cannot open '" + path + "' for writing");
  return file;
}

void finish_out_file(std::ofstream& file, const std::string& path) {
  file.close();
  if (!file) throw validation_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string method;
  std::string input;
  int k = 5;
  double c_reg = kDefaultCReg;
  std::optional<double> bandwidth;
  std::optional<std::uint64_t> seed;
  std::optional<double> a;
  std::vector<double> target_prior;
  std::optional<int> bins;
  double step = 0.1;
  int iters = 500;
  int restarts = 5;
  double c_lo = 0.1;
  double c_hi = 10.0;
  double delta = 0.05;
  bool bits = false;
};

int run_estimate(const EstimateArgs& args, TimePoint start) {
  if (args.method == "cmi" && !args.seed)
    throw validation_error(
        "--seed is required for --method cmi (restarts are randomized)");

  const CsvTable table = read_csv_file(args.input);

  Manifest manifest;
  manifest.subcommand = "estimate";
  manifest.seed = args.seed;
  manifest.input_digest = hex64(digest_file(args.input));
  manifest.start = start;
  auto& flags = manifest.flags;
  flags["method"] = args.method;
  flags["input"] = args.input;
  flags["k"] = std::to_string(args.k);
  if (args.seed) flags["seed"] = std::to_string(*args.seed);
  if (args.bits) flags["bits"] = "true";

  EstimatorConfig cfg;
  cfg.k = args.k;
  cfg.c_reg = args.c_reg;
  if (args.bandwidth) cfg.bandwidth = BandwidthRule::fixed(*args.bandwidth);
  if (!args.target_prior.empty()) cfg.target_prior = args.target_prior;

  const std::string bandwidth_flag =
      args.bandwidth ? format_double(*args.bandwidth) : "auto";

  Estimate est;
  if (args.method == "ksg") {
    est = ksg_mi(load_continuous(table), args.k);
  } else if (args.method == "entropy") {
    // Differential entropy of all sample coordinates jointly.
    est = kl_entropy(load_continuous(table).joint(), args.k);
  } else if (args.method == "umi") {
    flags["c-reg"] = format_double(args.c_reg);
    flags["bandwidth"] = bandwidth_flag;
    est = umi_continuous(load_continuous(table), cfg);
  } else if (args.method == "umi-disc") {
    flags["c-reg"] = format_double(args.c_reg);
    if (!args.target_prior.empty())
      flags["target-prior"] = join_doubles(args.target_prior);
    est = umi_discrete(load_discrete(table), cfg);
  } else if (args.method == "cmi") {
    const ContinuousDataset ds = load_continuous(table);
    const PowerConstraint pc =
        args.a ? PowerConstraint(*args.a) : PowerConstraint::empirical(ds.x);
    OptimizerConfig oc;
    oc.step = args.step;
    oc.iters = args.iters;
    oc.restarts = args.restarts;
    oc.seed = *args.seed;
    flags["a"] = format_double(pc.a);
    flags["c-reg"] = format_double(args.c_reg);
    flags["bandwidth"] = bandwidth_flag;
    flags["step"] = format_double(args.step);
    flags["iters"] = std::to_string(args.iters);
    flags["restarts"] = std::to_string(args.restarts);
    est = cmi_continuous(ds, cfg, pc, oc);
  } else if (args.method == "cmi-disc") {
    WeightGrid grid;
    grid.c_lo = args.c_lo;
    grid.c_hi = args.c_hi;
    grid.delta = args.delta;
    flags["c-lo"] = format_double(args.c_lo);
    flags["c-hi"] = format_double(args.c_hi);
    flags["delta"] = format_double(args.delta);
    est = cmi_discrete(load_discrete(table), cfg, grid);
  } else {
    const ContinuousDataset ds = load_continuous(table);
    const int bins = args.bins ? *args.bins : default_bins(ds.n());
    flags["bins"] = std::to_string(bins);
    if (args.method == "partition-mi") {
      est = partition_mi(ds, bins);
    } else if (args.method == "partition-umi") {
      est = partition_umi(ds, bins);
    } else {
      est = partition_cmi(ds, bins);
    }
  }

  log_warnings(est.warnings);

  ordered_json doc;
  doc["manifest"] = manifest.to_json();
  doc["method"] = est.method;
  doc["value_nats"] = est.value;
  if (args.bits) doc["value_bits"] = est.value / std::numbers::ln2;
  doc["k"] = est.k;
  doc["n"] = est.n;
  doc["warnings"] = est.warnings;
  doc["diagnostics"] = est.diagnostics;
  emit_json(doc);
  return 0;
}

// ---------------------------------------------------------------------------
// channel

struct CapacityArgs {
  std::string matrix;
  std::optional<double> renyi;
  double tol = 1e-10;
  int max_iters = 200000;
  int grid = 100;
  bool bits = false;
};

int run_capacity(const CapacityArgs& args, TimePoint start) {
  const DiscreteChannel ch(load_channel_csv(read_csv_file(args.matrix)));

  Manifest manifest;
  manifest.subcommand = "channel capacity";
  manifest.input_digest = hex64(digest_file(args.matrix));
  manifest.start = start;
  manifest.flags["matrix"] = args.matrix;
  if (args.bits) manifest.flags["bits"] = "true";

  ordered_json doc;
  if (args.renyi) {
    manifest.flags["renyi"] = format_double(*args.renyi);
    manifest.flags["grid"] = std::to_string(args.grid);
    const double cap = renyi_capacity(ch, RenyiOrder(*args.renyi), args.grid);
    doc["manifest"] = manifest.to_json();
    doc["capacity_nats"] = cap;
    if (args.bits) doc["capacity_bits"] = cap / std::numbers::ln2;
    doc["order"] = *args.renyi;
    doc["prior"] = nullptr;
    doc["grid_resolution"] = args.grid;
  } else {
    manifest.flags["tol"] = format_double(args.tol);
    manifest.flags["max-iters"] = std::to_string(args.max_iters);
    const BaResult result = blahut_arimoto(ch, args.tol, args.max_iters);
    doc["manifest"] = manifest.to_json();
    doc["capacity_nats"] = result.capacity;
    if (args.bits) doc["capacity_bits"] = result.capacity / std::numbers::ln2;
    doc["order"] = "shannon";
    doc["prior"] = result.prior;
    doc["iterations"] = result.iterations;
  }
  emit_json(doc);
  return 0;
}

void print_channel(const DiscreteChannel& ch) {
  std::vector<std::string> header(ch.n_outputs());
  for (std::size_t j = 0; j < ch.n_outputs(); ++j)
    header[j] = "y" + std::to_string(j);
  std::vector<std::vector<std::string>> rows(ch.n_inputs());
  for (std::size_t i = 0; i < ch.n_inputs(); ++i) {
    rows[i].resize(ch.n_outputs());
    for (std::size_t j = 0; j < ch.n_outputs(); ++j)
      rows[i][j] = format_double(ch.p(i, j));
  }
  write_csv(std::cout, header, rows);
}

struct PairArgs {
  std::string first;
  std::string second;
};

int run_channel_pair(const PairArgs& args, bool kronecker) {
  const DiscreteChannel c1(load_channel_csv(read_csv_file(args.first)));
  const DiscreteChannel c2(load_channel_csv(read_csv_file(args.second)));
  print_channel(kronecker ? parallel(c1, c2) : compose(c1, c2));
  return 0;
}

struct AugmentArgs {
  std::string matrix;
  std::vector<double> alpha;
};

int run_augment(const AugmentArgs& args) {
  const DiscreteChannel ch(load_channel_csv(read_csv_file(args.matrix)));
  print_channel(augment_convex_row(ch, args.alpha));
  return 0;
}

// ---------------------------------------------------------------------------
// axioms

struct AxiomArgs {
  std::string measure;
  int trials = 100;
  std::uint64_t seed = 0;
  std::optional<double> tol;
};

CapacityMeasure parse_measure(const std::string& id) {
  if (id == "shannon") return CapacityMeasure::shannon();
  if (id == "umi") return CapacityMeasure::umi();
  if (id.rfind("renyi:", 0) == 0) {
    const double lambda = parse_double_strict(id.substr(6), "--measure");
    if (!(lambda > 0.0) || lambda == 1.0)
      throw validation_error("renyi order must be positive and not 1");
    return CapacityMeasure::renyi(lambda);
  }
  throw validation_error("unknown measure '" + id +
                         "'; expected shannon, umi, or renyi:<lambda>");
}

int run_axioms(const AxiomArgs& args, TimePoint start) {
  const CapacityMeasure measure = parse_measure(args.measure);
  // The Renyi capacity is grid-quantized, so its default tolerance budgets
  // for discretization; the exact measures default to near machine level.
  const double tol =
      args.tol ? *args.tol
               : (measure.kind == CapacityMeasure::Kind::renyi ? 0.02 : 1e-6);
  const AxiomReport report = check_axioms(measure, args.trials, args.seed, tol);

  Manifest manifest;
  manifest.subcommand = "axioms";
  manifest.seed = args.seed;
  manifest.start = start;
  manifest.flags["measure"] = args.measure;
  manifest.flags["trials"] = std::to_string(args.trials);
  manifest.flags["seed"] = std::to_string(args.seed);
  manifest.flags["tol"] = format_double(tol);

  ordered_json doc;
  doc["manifest"] = manifest.to_json();
  doc["measure"] = report.measure;
  auto checks = ordered_json::array();
  for (const AxiomCheck& c : report.checks) {
    ordered_json entry;
    entry["name"] = c.name;
    entry["trials"] = c.trials;
    entry["max_violation"] = c.max_violation;
    entry["tolerance"] = c.tolerance;
    entry["pass"] = c.pass;
    checks.push_back(entry);
  }
  doc["checks"] = checks;
  doc["all_pass"] = report.all_pass;
  emit_json(doc);

  if (!report.all_pass) {
    std::cerr << "axiom battery failed for measure '" << report.measure
              << "'\n";
    return 4;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct SweepArgs {
  std::string figure;
  std::vector<double> sigmas;
  std::vector<std::size_t> ns = {500, 1000, 2000};
  int reps = 5;
  int k = 5;
  std::uint64_t seed = 0;
  std::string out;
};

int run_bench_sweep(const SweepArgs& args) {
  std::vector<double> sigmas = args.sigmas;
  if (sigmas.empty())
    sigmas = args.figure == "umi" ? std::vector<double>{0.36}
                                  : std::vector<double>{0.36, 1.0, 2.25};

  std::vector<SweepRow> rows;
  for (const char* suffix : {"_knn", "_partition"}) {
    SweepSpec spec;
    spec.method = args.figure + suffix;
    spec.sigma2_list = sigmas;
    spec.n_list = args.ns;
    spec.reps = args.reps;
    spec.k = args.k;
    spec.base_seed = args.seed;
    const auto block = run_sweep(spec);
    rows.insert(rows.end(), block.begin(), block.end());
  }

  create_out_dir(args.out);
  const std::string path = args.out + "/sweep_" + args.figure + ".csv";
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const SweepRow& r : rows)
    cells.push_back({r.method, format_double(r.sigma2), std::to_string(r.n),
                     std::to_string(r.rep), std::to_string(r.seed),
                     format_double(r.estimate), format_double(r.truth)});
  auto file = open_out_file(path);
  write_csv(file, {"method", "sigma2", "n", "rep", "seed", "estimate", "truth"},
            cells);
  finish_out_file(file, path);
  std::cerr << "wrote " << path << " (" << rows.size() << " rows)\n";

  // Per-cell aggregation in the same deterministic order as the file.
  std::cout << "method,sigma2,n,reps,mean,truth,rmse\n";
  for (const char* suffix : {"_knn", "_partition"}) {
    const std::string method = args.figure + suffix;
    for (const double sigma2 : sigmas) {
      for (const std::size_t n : args.ns) {
        double sum = 0.0, sq = 0.0, truth = 0.0;
        int count = 0;
        for (const SweepRow& r : rows) {
          if (r.method != method || r.sigma2 != sigma2 || r.n != n) continue;
          sum += r.estimate;
          sq += (r.estimate - r.truth) * (r.estimate - r.truth);
          truth = r.truth;
          ++count;
        }
        if (count == 0) continue;
        std::cout << method << ',' << format_double(sigma2) << ',' << n << ','
                  << count << ',' << format_double(sum / count) << ','
                  << format_double(truth) << ','
                  << format_double(std::sqrt(sq / count)) << '\n';
      }
    }
  }
  return 0;
}

struct TrendArgs {
  std::string input;
  std::vector<std::string> peaks;
  std::vector<double> rates = {0.1, 0.2, 0.5, 1.0};
  int reps = 20;
  std::string method = "umi";
  int k = 5;
  std::uint64_t seed = 0;
  std::string out;
};

std::map<std::string, double> parse_peaks(
    const std::vector<std::string>& entries) {
  std::map<std::string, double> peaks;
  for (const auto& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw validation_error("peak '" + entry +
                             "' is not of the form edge=timepoint");
    const std::string edge = entry.substr(0, eq);
    const double t = parse_double_strict(entry.substr(eq + 1), "--peaks");
    if (!peaks.emplace(edge, t).second)
      throw validation_error("duplicate peak for edge '" + edge + "'");
  }
  return peaks;
}

int run_bench_trend(const TrendArgs& args) {
  const CascadeTable data = load_cascade_csv(read_csv_file(args.input));
  const auto peaks = parse_peaks(args.peaks);
  const TrendResult result = trend_success(data, peaks, args.rates, args.reps,
                                           args.method, args.seed, args.k);
  log_warnings(result.warnings);

  create_out_dir(args.out);
  const std::string detail_path = args.out + "/trend_detail.csv";
  std::vector<std::vector<std::string>> detail;
  for (std::size_t ri = 0; ri < result.resample_rates.size(); ++ri)
    for (std::size_t rep = 0; rep < result.successes[ri].size(); ++rep)
      detail.push_back({format_double(result.resample_rates[ri]),
                        std::to_string(rep),
                        std::to_string(result.successes[ri][rep])});
  auto detail_file = open_out_file(detail_path);
  write_csv(detail_file, {"rate", "rep", "success"}, detail);
  finish_out_file(detail_file, detail_path);

  const std::string summary_path = args.out + "/trend_summary.csv";
  std::vector<std::vector<std::string>> summary;
  for (std::size_t ri = 0; ri < result.resample_rates.size(); ++ri)
    summary.push_back({format_double(result.resample_rates[ri]),
                       format_double(result.success_prob[ri])});
  auto summary_file = open_out_file(summary_path);
  write_csv(summary_file, {"rate", "success_prob"}, summary);
  finish_out_file(summary_file, summary_path);
  std::cerr << "wrote " << detail_path << " and " << summary_path << '\n';

  std::cout << "rate,success_prob\n";
  for (const auto& row : summary) std::cout << row[0] << ',' << row[1] << '\n';
  return 0;
}

struct CascadeArgs {
  std::vector<double> timepoints;
  std::vector<double> sxy;
  std::vector<double> syz;
  std::size_t n_per_t = 500;
  std::uint64_t seed = 0;
  std::string out;
};

int run_bench_cascade(const CascadeArgs& args) {
  if (args.sxy.size() != args.timepoints.size() ||
      args.syz.size() != args.timepoints.size())
    throw validation_error(
        "--sxy and --syz must list one variance per timepoint");

  CascadeSpec spec;
  spec.timepoints = args.timepoints;
  spec.noise.reserve(args.timepoints.size());
  for (std::size_t i = 0; i < args.timepoints.size(); ++i)
    spec.noise.emplace_back(args.sxy[i], args.syz[i]);
  spec.n_per_t = args.n_per_t;
  spec.seed = args.seed;
  const CascadeTable table = gen_cascade(spec);

  const std::filesystem::path out_path(args.out);
  if (out_path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(out_path.parent_path(), ec);
    if (ec)
      throw validation_error("cannot create directory for '" + args.out +
                             "': " + ec.message());
  }
  auto file = open_out_file(args.out);
  write_cascade_csv(file, table);
  finish_out_file(file, args.out);
  std::cerr << "wrote " << args.out << " (" << table.n_rows() << " rows)\n";

  std::cout << "t,sigma2_xy,sigma2_yz,n\n";
  for (std::size_t i = 0; i < args.timepoints.size(); ++i)
    std::cout << format_double(args.timepoints[i]) << ','
              << format_double(args.sxy[i]) << ','
              << format_double(args.syz[i]) << ',' << args.n_per_t << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const TimePoint start = std::chrono::steady_clock::now();

  CLI::App app{"Dependence-strength estimation and channel-capacity toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  EstimateArgs ea;
  auto* est = app.add_subcommand(
      "estimate", "Run an estimator on a CSV sample file, JSON to stdout");
  est->add_option("--method", ea.method,
                  "ksg | entropy | umi | umi-disc | cmi | cmi-disc | "
                  "partition-mi | partition-umi | partition-cmi")
      ->required()
      ->check(CLI::IsMember({"ksg", "entropy", "umi", "umi-disc", "cmi",
                             "cmi-disc", "partition-mi", "partition-umi",
                             "partition-cmi"}));
  est->add_option("--input", ea.input,
                  "Sample CSV: columns x0..,y0.. (continuous) or xcat,y0.. "
                  "(discrete X)")
      ->required()
      ->check(CLI::ExistingFile);
  est->add_option("--k", ea.k, "Neighbor count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  est->add_option("--seed", ea.seed, "RNG seed (required for --method cmi)");
  est->add_option("--a", ea.a,
                  "cmi: second-moment budget (default: empirical moment of X)");
  est->add_option("--target-prior", ea.target_prior,
                  "umi-disc: target label prior, comma separated")
      ->delimiter(',');
  est->add_option("--bins", ea.bins,
                  "partition-*: bins per coordinate (default: ceil(N^(1/3)) "
                  "clamped to [2,16])")
      ->check(CLI::Range(2, 4096));
  est->add_option("--c-reg", ea.c_reg, "Radius regularization constant")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  est->add_option("--bandwidth", ea.bandwidth,
                  "Fixed KDE bandwidth (default: 0.5 N^(-1/(2 dx + 3)))")
      ->check(CLI::PositiveNumber);
  est->add_option("--step", ea.step, "cmi: projected-ascent step size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  est->add_option("--iters", ea.iters, "cmi: iterations per restart")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  est->add_option("--restarts", ea.restarts, "cmi: optimizer restarts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  est->add_option("--c-lo", ea.c_lo, "cmi-disc: lowest weight level")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  est->add_option("--c-hi", ea.c_hi, "cmi-disc: highest weight level")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  est->add_option("--delta", ea.delta, "cmi-disc: weight level spacing")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  est->add_flag("--bits", ea.bits, "Also report the value in bits");

  auto* channel =
      app.add_subcommand("channel", "Discrete channel matrix analytics");
  channel->require_subcommand(1);

  CapacityArgs ca;
  auto* cap = channel->add_subcommand(
      "capacity", "Channel capacity: Blahut-Arimoto, or Renyi with --renyi");
  cap->add_option("--matrix", ca.matrix,
                  "Channel CSV: header y0..y{m-1}, one row per input symbol")
      ->required()
      ->check(CLI::ExistingFile);
  cap->add_option("--renyi", ca.renyi,
                  "Renyi order lambda (> 0, != 1); omit for Shannon capacity");
  cap->add_option("--tol", ca.tol, "Capacity bracket tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cap->add_option("--max-iters", ca.max_iters, "Iteration cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cap->add_option("--grid", ca.grid,
                  "Renyi: simplex grid subdivisions (>= 50)")
      ->capture_default_str()
      ->check(CLI::Range(50, 1000000));
  cap->add_flag("--bits", ca.bits, "Also report the capacity in bits");

  PairArgs compose_args;
  auto* comp = channel->add_subcommand(
      "compose", "Cascade two channels, CSV matrix to stdout");
  comp->add_option("--first", compose_args.first, "Channel X -> Y")
      ->required()
      ->check(CLI::ExistingFile);
  comp->add_option("--second", compose_args.second, "Channel Y -> Z")
      ->required()
      ->check(CLI::ExistingFile);

  PairArgs parallel_args;
  auto* par = channel->add_subcommand(
      "parallel", "Kronecker product of two channels, CSV matrix to stdout");
  par->add_option("--first", parallel_args.first, "First channel")
      ->required()
      ->check(CLI::ExistingFile);
  par->add_option("--second", parallel_args.second, "Second channel")
      ->required()
      ->check(CLI::ExistingFile);

  AugmentArgs aug_args;
  auto* aug = channel->add_subcommand(
      "augment", "Append a convex-mixture input row, CSV matrix to stdout");
  aug->add_option("--matrix", aug_args.matrix, "Channel CSV")
      ->required()
      ->check(CLI::ExistingFile);
  aug->add_option("--alpha", aug_args.alpha,
                  "Mixture coefficients over existing rows, comma separated")
      ->required()
      ->delimiter(',');

  AxiomArgs xa;
  auto* ax = app.add_subcommand(
      "axioms", "Numeric axiom battery; exit 4 when any axiom fails");
  ax->add_option("--measure", xa.measure, "shannon | renyi:<lambda> | umi")
      ->required();
  ax->add_option("--trials", xa.trials, "Random channel instances per axiom")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ax->add_option("--seed", xa.seed, "RNG seed")->required();
  ax->add_option("--tol", xa.tol,
                 "Violation tolerance (default 1e-6; 0.02 for renyi)");

  auto* bench = app.add_subcommand("bench", "Benchmark harness");
  bench->require_subcommand(1);

  SweepArgs sa;
  auto* sweep = bench->add_subcommand(
      "sweep", "Convergence sweep, k-NN estimator vs partition baseline");
  sweep->add_option("--figure", sa.figure, "umi | cmi")
      ->required()
      ->check(CLI::IsMember({"umi", "cmi"}));
  sweep->add_option("--sigmas", sa.sigmas,
                    "Noise variances (default: 0.36 for umi; 0.36,1.0,2.25 "
                    "for cmi)")
      ->delimiter(',');
  sweep->add_option("--ns", sa.ns, "Sample sizes, ascending")->delimiter(',');
  sweep->add_option("--reps", sa.reps, "Datasets per (sigma2, N) cell")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--k", sa.k, "Neighbor count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sa.seed, "Base seed; each cell derives its own")
      ->required();
  sweep->add_option("--out", sa.out, "Directory for sweep_<figure>.csv")
      ->required();

  TrendArgs ta;
  auto* trend = bench->add_subcommand(
      "trend", "Trend-recovery probability vs resampling rate");
  trend->add_option("--input", ta.input, "Cascade CSV with columns t,x0,y0,z0")
      ->required()
      ->check(CLI::ExistingFile);
  trend->add_option("--peaks", ta.peaks,
                    "Expected peak timepoint per edge, e.g. xy=0.5,yz=1.5")
      ->required()
      ->delimiter(',');
  trend->add_option("--rates", ta.rates, "Resampling rates in (0,1]")
      ->delimiter(',');
  trend->add_option("--reps", ta.reps, "Subsamples per rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  trend->add_option("--method", ta.method, "Edge estimator: ksg | umi")
      ->capture_default_str()
      ->check(CLI::IsMember({"ksg", "umi"}));
  trend->add_option("--k", ta.k, "Neighbor count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  trend->add_option("--seed", ta.seed, "RNG seed")->required();
  trend->add_option("--out", ta.out,
                    "Directory for trend_detail.csv and trend_summary.csv")
      ->required();

  CascadeArgs za;
  auto* cascade = bench->add_subcommand(
      "cascade", "Generate a synthetic X -> Y -> Z cascade CSV");
  cascade->add_option("--timepoints", za.timepoints, "Timepoint labels")
      ->required()
      ->delimiter(',');
  cascade
      ->add_option("--sxy", za.sxy, "Noise variance X -> Y per timepoint")
      ->required()
      ->delimiter(',');
  cascade
      ->add_option("--syz", za.syz, "Noise variance Y -> Z per timepoint")
      ->required()
      ->delimiter(',');
  cascade->add_option("--n-per-t", za.n_per_t, "Samples per timepoint")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cascade->add_option("--seed", za.seed, "RNG seed")->required();
  cascade->add_option("--out", za.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
    if (est->parsed()) return run_estimate(ea, start);
    if (cap->parsed()) return run_capacity(ca, start);
    if (comp->parsed()) return run_channel_pair(compose_args, false);
    if (par->parsed()) return run_channel_pair(parallel_args, true);
    if (aug->parsed()) return run_augment(aug_args);
    if (ax->parsed()) return run_axioms(xa, start);
    if (sweep->parsed()) return run_bench_sweep(sa);
    if (trend->parsed()) return run_bench_trend(ta);
    if (cascade->parsed()) return run_bench_cascade(za);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
