// End-to-end checks of the command-line binary. Each case spawns the real
// executable (path injected by the build), captures stdout, stderr, and the
// exit code, and pins the output contract: JSON payloads satisfy the shipped
// schema and mirror library values bit for bit, channel subcommands emit
// exact CSV matrices, failures map to the documented exit codes, and seeded
// artifact files are byte-identical across reruns.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "depcap/bench.hpp"
#include "depcap/channels.hpp"
#include "depcap/cmi.hpp"
#include "depcap/common.hpp"
#include "depcap/csv.hpp"
#include "depcap/dataset.hpp"
#include "depcap/estimators.hpp"
#include "depcap/rng.hpp"
#include "depcap/schema.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace depcap;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const std::filesystem::path& work_dir() {
  static const std::filesystem::path dir = [] {
    const auto d = std::filesystem::temp_directory_path() /
                   ("depcap_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_file(const std::string& name, const std::string& body) {
  const auto path = work_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  out.close();
  REQUIRE(static_cast<bool>(out));
  return path.string();
}

// Runs the binary with the given argument string, shell-redirecting the two
// streams to files so the test can inspect them separately.
CliResult run_cli(const std::string& args) {
  static int call = 0;
  const auto out_path = work_dir() / ("stdout" + std::to_string(call) + ".txt");
  const auto err_path = work_dir() / ("stderr" + std::to_string(call) + ".txt");
  ++call;
  const std::string cmd = std::string("\"") + DEPCAP_CLI_PATH + "\" " + args +
                          " > " + out_path.string() + " 2> " +
                          err_path.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  REQUIRE(status != -1);
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

// Parses a JSON payload after confirming it satisfies the output schema and
// that stdout carries the document and nothing else.
ordered_json parse_payload(const CliResult& r) {
  REQUIRE_FALSE(r.out.empty());
  CHECK_NOTHROW(validate_output_json(r.out));
  ordered_json doc = ordered_json::parse(r.out);
  CHECK(doc.dump(2) + "\n" == r.out);
  return doc;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// Continuous sample file: y = x + 0.4 eps with x uniform on (offset, offset+1).
std::string linear_csv_body(std::size_t n, std::uint64_t seed,
                            double offset = 0.0) {
  Rng rng(seed);
  std::ostringstream ss;
  ss << "x0,y0\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x = offset + rng.next_double();
    const double y = x + 0.4 * rng.next_normal();
    ss << format_double(x) << ',' << format_double(y) << '\n';
  }
  return ss.str();
}

// Discrete sample file: two labels with well-separated Gaussian responses.
std::string labeled_csv_body(std::size_t per_label, std::uint64_t seed) {
  Rng rng(seed);
  std::ostringstream ss;
  ss << "xcat,y0\n";
  for (std::size_t i = 0; i < per_label; ++i)
    ss << "low," << format_double(rng.next_normal(0.0, 1.0)) << '\n';
  for (std::size_t i = 0; i < per_label; ++i)
    ss << "high," << format_double(rng.next_normal(2.5, 1.0)) << '\n';
  return ss.str();
}

Matrix bsc(double flip) {
  Matrix m(2, 2);
  m(0, 0) = 1.0 - flip;
  m(0, 1) = flip;
  m(1, 0) = flip;
  m(1, 1) = 1.0 - flip;
  return m;
}

// Renders a matrix the way the channel subcommands print one, so expected
// stdout can be compared byte for byte.
std::string channel_csv_text(const Matrix& m) {
  std::vector<std::string> header(m.cols);
  for (std::size_t j = 0; j < m.cols; ++j)
    header[j] = "y" + std::to_string(j);
  std::vector<std::vector<std::string>> rows(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    rows[i].resize(m.cols);
    for (std::size_t j = 0; j < m.cols; ++j)
      rows[i][j] = format_double(m(i, j));
  }
  std::ostringstream ss;
  write_csv(ss, header, rows);
  return ss.str();
}

ContinuousDataset load_continuous_file(const std::string& path) {
  return load_continuous(read_csv_file(path));
}

}  // namespace

TEST_CASE("cli usage surface: version, help, and parse failures") {
  const CliResult version = run_cli("--version");
  CHECK(version.exit_code == 0);
  CHECK(version.out.find(kVersion) != std::string::npos);

  const CliResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("estimate") != std::string::npos);
  CHECK(help.out.find("bench") != std::string::npos);

  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);

  const std::string input =
      write_file("usage_sample.csv", linear_csv_body(40, 0x05a9e));
  CHECK(run_cli("estimate --input " + input).exit_code == 2);
  CHECK(run_cli("estimate --method warp --input " + input).exit_code == 2);
  CHECK(run_cli("estimate --method ksg --input " + (work_dir() / "absent.csv").string())
            .exit_code == 2);
  CHECK(run_cli("estimate --method ksg --k 0 --input " + input).exit_code == 2);
  const CliResult huge_k = run_cli("estimate --method ksg --k 40 --input " + input);
  CHECK(huge_k.exit_code == 2);
  CHECK(huge_k.err.find("error:") != std::string::npos);
}

TEST_CASE("cli estimate mirrors library values over the continuous methods") {
  const std::string path =
      write_file("continuous_200.csv", linear_csv_body(200, 0x11ce));
  const ContinuousDataset ds = load_continuous_file(path);
  EstimatorConfig cfg;
  cfg.k = 4;

  struct MethodCase {
    const char* flag;
    Estimate want;
  };
  const std::vector<MethodCase> cases = {
      {"ksg", ksg_mi(ds, 4)},
      {"entropy", kl_entropy(ds.joint(), 4)},
      {"umi", umi_continuous(ds, cfg)},
      {"partition-mi", partition_mi(ds, 5)},
      {"partition-umi", partition_umi(ds, 5)},
      {"partition-cmi", partition_cmi(ds, 5)},
  };
  for (const auto& mc : cases) {
    CAPTURE(mc.flag);
    std::string args = std::string("estimate --method ") + mc.flag +
                       " --k 4 --input " + path;
    if (std::string(mc.flag).rfind("partition", 0) == 0) args += " --bins 5";
    const CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    const ordered_json doc = parse_payload(r);
    CHECK(doc.at("method").get<std::string>() == mc.want.method);
    CHECK(doc.at("value_nats").get<double>() == mc.want.value);
    CHECK(doc.at("k").get<int>() == mc.want.k);
    CHECK(doc.at("n").get<int>() == mc.want.n);
    CHECK(doc.at("warnings").get<std::vector<std::string>>() ==
          mc.want.warnings);
    CHECK(doc.at("diagnostics").get<std::map<std::string, double>>() ==
          mc.want.diagnostics);
  }

  // Manifest contract, pinned on the ksg run: no seed, digest of the input
  // file, echoed flags, and a clean stderr.
  const CliResult r = run_cli("estimate --method ksg --k 4 --input " + path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.empty());
  const ordered_json doc = parse_payload(r);
  const ordered_json& manifest = doc.at("manifest");
  CHECK(manifest.at("subcommand").get<std::string>() == "estimate");
  CHECK(manifest.at("version").get<std::string>() == kVersion);
  CHECK(manifest.at("wall_time_ms").get<double>() >= 0.0);
  CHECK(manifest.at("seed").is_null());
  CHECK(manifest.at("input_digest").get<std::string>() ==
        hex64(digest_file(path)));
  CHECK(manifest.at("flags").at("method").get<std::string>() == "ksg");
  CHECK(manifest.at("flags").at("k").get<std::string>() == "4");

  // Default bin count is derived from N and echoed in the flags.
  const CliResult defbins =
      run_cli("estimate --method partition-umi --input " + path);
  REQUIRE(defbins.exit_code == 0);
  const ordered_json def_doc = parse_payload(defbins);
  const int bins = default_bins(ds.n());
  CHECK(def_doc.at("manifest").at("flags").at("bins").get<std::string>() ==
        std::to_string(bins));
  CHECK(def_doc.at("value_nats").get<double>() ==
        partition_umi(ds, bins).value);
  CHECK(run_cli("estimate --method partition-mi --bins 1 --input " + path)
            .exit_code == 2);
}

TEST_CASE("cli estimate reports bits and honors a fixed bandwidth") {
  const std::string path =
      write_file("continuous_bits.csv", linear_csv_body(150, 0xb175));
  const CliResult r =
      run_cli("estimate --method umi --k 4 --bits --input " + path);
  REQUIRE(r.exit_code == 0);
  const ordered_json doc = parse_payload(r);
  const double nats = doc.at("value_nats").get<double>();
  CHECK(doc.at("value_bits").get<double>() == nats / std::numbers::ln2);
  CHECK(doc.at("manifest").at("flags").at("bandwidth").get<std::string>() ==
        "auto");

  const ContinuousDataset ds = load_continuous_file(path);
  EstimatorConfig cfg;
  cfg.k = 4;
  cfg.bandwidth = BandwidthRule::fixed(0.3);
  const CliResult fixed = run_cli(
      "estimate --method umi --k 4 --bandwidth 0.3 --input " + path);
  REQUIRE(fixed.exit_code == 0);
  const ordered_json fixed_doc = parse_payload(fixed);
  CHECK(fixed_doc.at("value_nats").get<double>() ==
        umi_continuous(ds, cfg).value);
  CHECK(fixed_doc.at("manifest").at("flags").at("bandwidth")
            .get<std::string>() == "0.3");
}

TEST_CASE("cli estimate handles the discrete-label schema") {
  const std::string path =
      write_file("labeled_80.csv", labeled_csv_body(40, 0xd15c));
  const DiscreteXDataset ds = load_discrete(read_csv_file(path));

  EstimatorConfig cfg;
  cfg.k = 3;
  cfg.target_prior = {0.5, 0.5};
  const CliResult umi = run_cli(
      "estimate --method umi-disc --k 3 --target-prior 0.5,0.5 --input " +
      path);
  REQUIRE(umi.exit_code == 0);
  const ordered_json umi_doc = parse_payload(umi);
  const Estimate umi_want = umi_discrete(ds, cfg);
  CHECK(umi_doc.at("method").get<std::string>() == "umi_disc");
  CHECK(umi_doc.at("value_nats").get<double>() == umi_want.value);
  CHECK(umi_doc.at("warnings").get<std::vector<std::string>>() ==
        umi_want.warnings);
  CHECK(umi_doc.at("manifest").at("flags").at("target-prior")
            .get<std::string>() == "0.5,0.5");

  EstimatorConfig plain;
  plain.k = 3;
  const CliResult cmi =
      run_cli("estimate --method cmi-disc --k 3 --input " + path);
  REQUIRE(cmi.exit_code == 0);
  const ordered_json cmi_doc = parse_payload(cmi);
  const Estimate cmi_want = cmi_discrete(ds, plain, WeightGrid{});
  CHECK(cmi_doc.at("method").get<std::string>() == "cmi_disc");
  CHECK(cmi_doc.at("value_nats").get<double>() == cmi_want.value);
  CHECK(cmi_doc.at("diagnostics").get<std::map<std::string, double>>() ==
        cmi_want.diagnostics);
  const ordered_json& flags = cmi_doc.at("manifest").at("flags");
  CHECK(flags.at("c-lo").get<std::string>() == "0.1");
  CHECK(flags.at("c-hi").get<std::string>() == "10");
  CHECK(flags.at("delta").get<std::string>() == "0.05");

  // Each loader rejects the other schema.
  CHECK(run_cli("estimate --method ksg --input " + path).exit_code == 2);
  const std::string cont =
      write_file("continuous_for_disc.csv", linear_csv_body(60, 0x0dd));
  CHECK(run_cli("estimate --method umi-disc --input " + cont).exit_code == 2);
}

TEST_CASE("cli estimate cmi is seeded, reproducible, and budget-checked") {
  const std::string path =
      write_file("cmi_input.csv", linear_csv_body(80, 0xc311));
  const ContinuousDataset ds = load_continuous_file(path);
  EstimatorConfig cfg;
  cfg.k = 3;
  const PowerConstraint pc = PowerConstraint::empirical(ds.x);
  OptimizerConfig oc;
  oc.step = 0.1;
  oc.iters = 60;
  oc.restarts = 2;
  oc.seed = 11;
  const Estimate want = cmi_continuous(ds, cfg, pc, oc);

  const std::string args =
      "estimate --method cmi --k 3 --seed 11 --iters 60 --restarts 2 "
      "--input " +
      path;
  const CliResult r = run_cli(args);
  REQUIRE(r.exit_code == 0);
  const ordered_json doc = parse_payload(r);
  CHECK(doc.at("value_nats").get<double>() == want.value);
  CHECK(doc.at("diagnostics").get<std::map<std::string, double>>() ==
        want.diagnostics);
  CHECK(doc.at("manifest").at("seed").get<std::uint64_t>() == 11);
  CHECK(doc.at("manifest").at("flags").at("a").get<std::string>() ==
        format_double(pc.a));

  // Same seed, same payload (wall time aside).
  const ordered_json again = parse_payload(run_cli(args));
  CHECK(again.at("value_nats") == doc.at("value_nats"));
  CHECK(again.at("diagnostics") == doc.at("diagnostics"));

  const CliResult unseeded =
      run_cli("estimate --method cmi --k 3 --input " + path);
  CHECK(unseeded.exit_code == 2);
  CHECK(unseeded.err.find("--seed is required") != std::string::npos);

  // x sits on (1, 2), so every ||x_i||^2 exceeds a budget of 0.5.
  const std::string offset =
      write_file("cmi_offset.csv", linear_csv_body(80, 0xc312, 1.0));
  const CliResult infeasible = run_cli(
      "estimate --method cmi --k 3 --seed 1 --a 0.5 --input " + offset);
  CHECK(infeasible.exit_code == 3);
  CHECK(infeasible.err.find("power budget") != std::string::npos);
}

TEST_CASE("cli channel capacity reports shannon and renyi solutions") {
  const std::string bsc01 = write_file("bsc01.csv", channel_csv_text(bsc(0.1)));
  const CliResult r = run_cli("channel capacity --bits --matrix " + bsc01);
  REQUIRE(r.exit_code == 0);
  const ordered_json doc = parse_payload(r);
  const double cap = doc.at("capacity_nats").get<double>();
  CHECK(cap == doctest::Approx(0.36806420716849707).epsilon(1e-8));
  CHECK(doc.at("capacity_bits").get<double>() == cap / std::numbers::ln2);
  CHECK(doc.at("order").get<std::string>() == "shannon");
  CHECK(doc.at("iterations").get<int>() >= 1);
  const auto prior = doc.at("prior").get<std::vector<double>>();
  REQUIRE(prior.size() == 2);
  CHECK(prior[0] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(doc.at("manifest").at("input_digest").get<std::string>() ==
        hex64(digest_file(bsc01)));
  CHECK(doc.at("manifest").at("flags").count("tol") == 1);
  CHECK(doc.at("manifest").at("flags").count("max-iters") == 1);

  Matrix eye(2, 2);
  eye(0, 0) = 1.0;
  eye(1, 1) = 1.0;
  const std::string id2 = write_file("id2.csv", channel_csv_text(eye));
  const CliResult renyi =
      run_cli("channel capacity --renyi 2 --grid 120 --matrix " + id2);
  REQUIRE(renyi.exit_code == 0);
  const ordered_json renyi_doc = parse_payload(renyi);
  CHECK(renyi_doc.at("capacity_nats").get<double>() ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  CHECK(renyi_doc.at("order").get<double>() == 2.0);
  CHECK(renyi_doc.at("prior").is_null());
  CHECK(renyi_doc.at("grid_resolution").get<int>() == 120);

  Matrix bad(2, 2);
  bad(0, 0) = 0.5;
  bad(0, 1) = 0.3;
  bad(1, 0) = 0.5;
  bad(1, 1) = 0.5;
  const std::string badrow = write_file("badrow.csv", channel_csv_text(bad));
  CHECK(run_cli("channel capacity --matrix " + badrow).exit_code == 2);
  CHECK(run_cli("channel capacity --renyi 1 --matrix " + bsc01).exit_code == 2);

  // An asymmetric channel cannot bracket to 1e-15 in two iterations.
  Matrix asym(2, 2);
  asym(0, 0) = 1.0;
  asym(1, 0) = 0.5;
  asym(1, 1) = 0.5;
  const std::string zch = write_file("asym.csv", channel_csv_text(asym));
  const CliResult stuck = run_cli(
      "channel capacity --tol 1e-15 --max-iters 2 --matrix " + zch);
  CHECK(stuck.exit_code == 3);
  CHECK(stuck.err.find("did not converge") != std::string::npos);
}

TEST_CASE("cli channel algebra emits exact csv matrices") {
  const std::string bsc01 = write_file("alg_bsc01.csv", channel_csv_text(bsc(0.1)));
  const std::string bsc02 = write_file("alg_bsc02.csv", channel_csv_text(bsc(0.2)));
  const DiscreteChannel c1(bsc(0.1));
  const DiscreteChannel c2(bsc(0.2));

  const CliResult comp =
      run_cli("channel compose --first " + bsc01 + " --second " + bsc02);
  REQUIRE(comp.exit_code == 0);
  CHECK(comp.out == channel_csv_text(compose(c1, c2).p));
  const CsvTable comp_table = [&] {
    std::istringstream in(comp.out);
    return read_csv(in, "stdout");
  }();
  const Matrix comp_m = load_channel_csv(comp_table);
  CHECK(comp_m(0, 1) == doctest::Approx(0.26).epsilon(1e-12));

  Matrix eye(2, 2);
  eye(0, 0) = 1.0;
  eye(1, 1) = 1.0;
  const std::string id2 = write_file("alg_id2.csv", channel_csv_text(eye));
  const CliResult par =
      run_cli("channel parallel --first " + bsc01 + " --second " + id2);
  REQUIRE(par.exit_code == 0);
  CHECK(par.out == channel_csv_text(parallel(c1, DiscreteChannel(eye)).p));

  const CliResult aug =
      run_cli("channel augment --alpha 0.25,0.75 --matrix " + bsc01);
  REQUIRE(aug.exit_code == 0);
  CHECK(aug.out == channel_csv_text(augment_convex_row(c1, {0.25, 0.75}).p));

  CHECK(run_cli("channel augment --alpha 0.5,0.9 --matrix " + bsc01)
            .exit_code == 2);
  CHECK(run_cli("channel augment --alpha 0.2,0.3,0.5 --matrix " + bsc01)
            .exit_code == 2);
  CHECK(run_cli("channel compose --first " + bsc01).exit_code == 2);
}

TEST_CASE("cli axioms battery json and exit codes") {
  const CliResult shannon =
      run_cli("axioms --measure shannon --trials 4 --seed 7");
  REQUIRE(shannon.exit_code == 0);
  const ordered_json doc = parse_payload(shannon);
  CHECK(doc.at("measure").get<std::string>() == "shannon");
  CHECK(doc.at("all_pass").get<bool>() == true);
  const auto& checks = doc.at("checks");
  REQUIRE(checks.size() == 5);
  const std::vector<std::string> names = {
      "independence", "data_processing", "additivity",
      "convex_row_augmentation", "max_value"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    CHECK(checks.at(i).at("name").get<std::string>() == names[i]);
    CHECK(checks.at(i).at("pass").get<bool>() == true);
    CHECK(checks.at(i).at("tolerance").get<double>() == 1e-6);
  }
  CHECK(doc.at("manifest").at("flags").at("tol").get<std::string>() ==
        format_double(1e-6));

  // The uniform-capacity measure is designed to lose convex row augmentation.
  const CliResult umi = run_cli("axioms --measure umi --trials 4 --seed 42");
  CHECK(umi.exit_code == 4);
  CHECK(umi.err.find("axiom battery failed") != std::string::npos);
  const ordered_json umi_doc = parse_payload(umi);
  CHECK(umi_doc.at("all_pass").get<bool>() == false);
  const auto& convex = umi_doc.at("checks").at(3);
  CHECK(convex.at("name").get<std::string>() == "convex_row_augmentation");
  CHECK(convex.at("pass").get<bool>() == false);
  CHECK(convex.at("max_violation").get<double>() > 0.05);

  const CliResult renyi =
      run_cli("axioms --measure renyi:2 --trials 2 --seed 3");
  REQUIRE(renyi.exit_code == 0);
  const ordered_json renyi_doc = parse_payload(renyi);
  CHECK(renyi_doc.at("measure").get<std::string>() == "renyi:2");
  CHECK(renyi_doc.at("checks").at(0).at("tolerance").get<double>() == 0.02);

  CHECK(run_cli("axioms --measure foo --trials 2 --seed 1").exit_code == 2);
  CHECK(run_cli("axioms --measure renyi:abc --trials 2 --seed 1").exit_code ==
        2);
  CHECK(run_cli("axioms --measure renyi:1 --trials 2 --seed 1").exit_code == 2);
  CHECK(run_cli("axioms --measure shannon --trials 2").exit_code == 2);
}

TEST_CASE("cli bench cascade generates deterministic files") {
  const std::string out_a = (work_dir() / "casc_a" / "cascade.csv").string();
  const std::string out_b = (work_dir() / "casc_b" / "cascade.csv").string();
  const std::string args =
      "bench cascade --timepoints 0,1,2 --sxy 0.04,0.5,2 --syz 2,0.5,0.04 "
      "--n-per-t 400 --seed 9 --out ";
  const CliResult a = run_cli(args + out_a);
  REQUIRE(a.exit_code == 0);
  CHECK(a.err.find("wrote") != std::string::npos);
  CHECK(a.out.rfind("t,sigma2_xy,sigma2_yz,n\n", 0) == 0);
  const CliResult b = run_cli(args + out_b);
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(out_a) == slurp(out_b));

  // The file is exactly what the generator writes for the same spec.
  CascadeSpec spec;
  spec.timepoints = {0.0, 1.0, 2.0};
  spec.noise = {{0.04, 2.0}, {0.5, 0.5}, {2.0, 0.04}};
  spec.n_per_t = 400;
  spec.seed = 9;
  std::ostringstream want;
  write_cascade_csv(want, gen_cascade(spec));
  CHECK(slurp(out_a) == want.str());

  const CascadeTable table = load_cascade_csv(read_csv_file(out_a));
  CHECK(table.n_rows() == 1200);

  CHECK(run_cli("bench cascade --timepoints 0,1,2 --sxy 0.04,0.5 "
                "--syz 2,0.5,0.04 --n-per-t 50 --seed 9 --out " +
                (work_dir() / "casc_bad.csv").string())
            .exit_code == 2);
}

TEST_CASE("cli bench trend recovers the designed peaks") {
  // X->Y is cleanest at t=0 and Y->Z at t=2, with large noise margins, so
  // peak recovery succeeds at every tested rate.
  const std::string cascade = (work_dir() / "trend" / "cascade.csv").string();
  REQUIRE(run_cli("bench cascade --timepoints 0,1,2 --sxy 0.04,0.5,2 "
                  "--syz 2,0.5,0.04 --n-per-t 400 --seed 21 --out " + cascade)
              .exit_code == 0);

  const std::string out_dir = (work_dir() / "trend" / "out").string();
  const CliResult r = run_cli(
      "bench trend --input " + cascade +
      " --peaks xy=0,yz=2 --rates 0.5,1 --reps 2 --method umi --k 3 "
      "--seed 5 --out " +
      out_dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "rate,success_prob\n0.5,1\n1,1\n");

  const CsvTable summary =
      read_csv_file(out_dir + "/trend_summary.csv");
  REQUIRE(summary.n_rows() == 2);
  CHECK(summary.rows[0] == std::vector<std::string>{"0.5", "1"});
  CHECK(summary.rows[1] == std::vector<std::string>{"1", "1"});

  const CsvTable detail = read_csv_file(out_dir + "/trend_detail.csv");
  CHECK(detail.header == std::vector<std::string>{"rate", "rep", "success"});
  REQUIRE(detail.n_rows() == 4);
  for (const auto& row : detail.rows) CHECK(row[2] == "1");

  CHECK(run_cli("bench trend --input " + cascade +
                " --peaks xy:0 --rates 1 --reps 1 --seed 5 --out " + out_dir)
            .exit_code == 2);
  CHECK(run_cli("bench trend --input " + cascade +
                " --peaks xy=0,xy=1 --rates 1 --reps 1 --seed 5 --out " +
                out_dir)
            .exit_code == 2);
  CHECK(run_cli("bench trend --input " + cascade +
                " --peaks xz=0 --rates 1 --reps 1 --seed 5 --out " + out_dir)
            .exit_code == 2);
  CHECK(run_cli("bench trend --input " + cascade +
                " --peaks xy=0 --rates 0 --reps 1 --seed 5 --out " + out_dir)
            .exit_code == 2);
}

TEST_CASE("cli bench sweep writes byte-identical artifacts per seed") {
  const std::string dir_a = (work_dir() / "sweep_a").string();
  const std::string dir_b = (work_dir() / "sweep_b").string();
  const std::string args =
      "bench sweep --figure umi --sigmas 0.36 --ns 80,120 --reps 2 --k 3 "
      "--seed 123 --out ";
  const CliResult a = run_cli(args + dir_a);
  REQUIRE(a.exit_code == 0);
  const CliResult b = run_cli(args + dir_b);
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(dir_a + "/sweep_umi.csv") == slurp(dir_b + "/sweep_umi.csv"));
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("method,sigma2,n,reps,mean,truth,rmse\n", 0) == 0);

  const CsvTable table = read_csv_file(dir_a + "/sweep_umi.csv");
  CHECK(table.header == std::vector<std::string>{"method", "sigma2", "n",
                                                 "rep", "seed", "estimate",
                                                 "truth"});
  // 2 methods x 1 sigma x 2 sizes x 2 reps.
  REQUIRE(table.n_rows() == 8);

  // The k-NN block of the file reproduces the library sweep cell for cell.
  SweepSpec spec;
  spec.method = "umi_knn";
  spec.sigma2_list = {0.36};
  spec.n_list = {80, 120};
  spec.reps = 2;
  spec.k = 3;
  spec.base_seed = 123;
  const std::vector<SweepRow> rows = run_sweep(spec);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(table.rows[i][0] == "umi_knn");
    CHECK(table.rows[i][2] == std::to_string(rows[i].n));
    CHECK(table.rows[i][4] == std::to_string(rows[i].seed));
    CHECK(table.rows[i][5] == format_double(rows[i].estimate));
    CHECK(table.rows[i][6] == format_double(rows[i].truth));
  }

  // Aggregate stdout: header plus one line per (method, sigma2, N) cell.
  int lines = 0;
  for (const char c : a.out) lines += c == '\n';
  CHECK(lines == 5);

  CHECK(run_cli("bench sweep --figure mi --sigmas 0.36 --seed 1 --out " +
                dir_a)
            .exit_code == 2);
  CHECK(run_cli("bench sweep --figure umi --sigmas 0.36 --out " + dir_a)
            .exit_code == 2);
}

TEST_CASE("cli warnings go to stderr while stdout stays pure json") {
  // Thirty points duplicated three times each: at k=2 every joint radius
  // collapses to zero, which floors the marginal counts and warns.
  std::ostringstream body;
  body << "x0,y0\n";
  for (int v = 0; v < 30; ++v)
    for (int repeat = 0; repeat < 3; ++repeat)
      body << format_double(0.1 * v) << ',' << format_double(0.2 * v) << '\n';
  const std::string path = write_file("duplicated.csv", body.str());

  const CliResult r = run_cli("estimate --method ksg --k 2 --input " + path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("warning:") != std::string::npos);
  CHECK(r.err.find("zero marginal count") != std::string::npos);
  const ordered_json doc = parse_payload(r);
  CHECK_FALSE(doc.at("warnings").empty());
}
