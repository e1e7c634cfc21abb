// Python bindings for the core estimators, capacity solvers, and the axiom
// battery. Samples cross the boundary as nested lists of floats; results come
// back as plain dicts so the module has no third-party Python dependencies.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "depcap/bench.hpp"
#include "depcap/channels.hpp"
#include "depcap/cmi.hpp"
#include "depcap/common.hpp"
#include "depcap/dataset.hpp"
#include "depcap/estimators.hpp"

namespace py = pybind11;

namespace {

using namespace depcap;

Matrix to_matrix(const std::vector<std::vector<double>>& rows,
                 const char* what) {
  if (rows.empty())
    throw validation_error(std::string(what) + " must be nonempty");
  const std::size_t cols = rows[0].size();
  if (cols == 0)
    throw validation_error(std::string(what) + " rows must be nonempty");
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw validation_error(std::string(what) +
                             " rows must all have the same length");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> from_matrix(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows, std::vector<double>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) rows[i][j] = m(i, j);
  return rows;
}

DiscreteXDataset to_discrete(const std::vector<int>& labels,
                             const std::vector<std::vector<double>>& y) {
  if (labels.empty()) throw validation_error("labels must be nonempty");
  const int n_labels = *std::max_element(labels.begin(), labels.end()) + 1;
  return DiscreteXDataset(labels, n_labels, to_matrix(y, "y"));
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["value_nats"] = e.value;
  d["method"] = e.method;
  d["k"] = e.k;
  d["n"] = e.n;
  d["warnings"] = e.warnings;
  d["diagnostics"] = e.diagnostics;
  return d;
}

CapacityMeasure parse_measure(const std::string& id) {
  if (id == "shannon") return CapacityMeasure::shannon();
  if (id == "umi") return CapacityMeasure::umi();
  if (id.rfind("renyi:", 0) == 0) {
    const double lambda = std::stod(id.substr(6));
    return CapacityMeasure::renyi(lambda);
  }
  throw validation_error("unknown measure '" + id +
                         "'; expected shannon, umi, or renyi:<lambda>");
}

}  // namespace

PYBIND11_MODULE(_depcap, m) {
  m.doc() =
      "Dependence-strength estimators (KSG, UMI, CMI) and channel analytics";
  m.attr("__version__") = kVersion;

  py::register_exception<validation_error>(m, "ValidationError",
                                           PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError",
                                          PyExc_ArithmeticError);

  m.def(
      "ksg_mi",
      [](const std::vector<std::vector<double>>& x,
         const std::vector<std::vector<double>>& y, int k) {
        return estimate_dict(
            ksg_mi(ContinuousDataset(to_matrix(x, "x"), to_matrix(y, "y")),
                   k));
      },
      py::arg("x"), py::arg("y"), py::arg("k") = 5,
      "Kraskov mutual information estimate in nats");

  m.def(
      "entropy",
      [](const std::vector<std::vector<double>>& points, int k) {
        return estimate_dict(kl_entropy(to_matrix(points, "points"), k));
      },
      py::arg("points"), py::arg("k") = 5,
      "k-NN differential entropy estimate in nats");

  m.def(
      "umi",
      [](const std::vector<std::vector<double>>& x,
         const std::vector<std::vector<double>>& y, int k) {
        EstimatorConfig cfg;
        cfg.k = k;
        return estimate_dict(umi_continuous(
            ContinuousDataset(to_matrix(x, "x"), to_matrix(y, "y")), cfg));
      },
      py::arg("x"), py::arg("y"), py::arg("k") = 5,
      "Uniform mutual information estimate in nats");

  m.def(
      "umi_disc",
      [](const std::vector<int>& labels,
         const std::vector<std::vector<double>>& y, int k,
         std::optional<std::vector<double>> target_prior) {
        EstimatorConfig cfg;
        cfg.k = k;
        if (target_prior) cfg.target_prior = std::move(*target_prior);
        return estimate_dict(umi_discrete(to_discrete(labels, y), cfg));
      },
      py::arg("labels"), py::arg("y"), py::arg("k") = 5,
      py::arg("target_prior") = std::nullopt,
      "Discrete-X uniform mutual information estimate in nats");

  m.def(
      "cmi",
      [](const std::vector<std::vector<double>>& x,
         const std::vector<std::vector<double>>& y, std::uint64_t seed, int k,
         std::optional<double> a, double step, int iters, int restarts) {
        const ContinuousDataset ds(to_matrix(x, "x"), to_matrix(y, "y"));
        EstimatorConfig cfg;
        cfg.k = k;
        const PowerConstraint pc =
            a ? PowerConstraint(*a) : PowerConstraint::empirical(ds.x);
        OptimizerConfig oc;
        oc.step = step;
        oc.iters = iters;
        oc.restarts = restarts;
        oc.seed = seed;
        return estimate_dict(cmi_continuous(ds, cfg, pc, oc));
      },
      py::arg("x"), py::arg("y"), py::arg("seed"), py::arg("k") = 5,
      py::arg("a") = std::nullopt, py::arg("step") = 0.1,
      py::arg("iters") = 500, py::arg("restarts") = 5,
      "Capacitated mutual information estimate in nats");

  m.def(
      "cmi_disc",
      [](const std::vector<int>& labels,
         const std::vector<std::vector<double>>& y, int k, double c_lo,
         double c_hi, double delta) {
        EstimatorConfig cfg;
        cfg.k = k;
        WeightGrid grid;
        grid.c_lo = c_lo;
        grid.c_hi = c_hi;
        grid.delta = delta;
        return estimate_dict(cmi_discrete(to_discrete(labels, y), cfg, grid));
      },
      py::arg("labels"), py::arg("y"), py::arg("k") = 5,
      py::arg("c_lo") = 0.1, py::arg("c_hi") = 10.0, py::arg("delta") = 0.05,
      "Discrete-X capacitated mutual information estimate in nats");

  m.def(
      "mutual_information",
      [](const std::vector<double>& prior,
         const std::vector<std::vector<double>>& channel) {
        return mutual_information(prior,
                                  DiscreteChannel(to_matrix(channel, "channel")));
      },
      py::arg("prior"), py::arg("channel"),
      "Exact discrete mutual information in nats");

  m.def(
      "blahut_arimoto",
      [](const std::vector<std::vector<double>>& channel, double tol,
         int max_iters) {
        const BaResult r = blahut_arimoto(
            DiscreteChannel(to_matrix(channel, "channel")), tol, max_iters);
        py::dict d;
        d["capacity_nats"] = r.capacity;
        d["prior"] = r.prior;
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("channel"), py::arg("tol") = 1e-10,
      py::arg("max_iters") = 200000, "Channel capacity in nats");

  m.def(
      "renyi_capacity",
      [](const std::vector<std::vector<double>>& channel, double lam,
         int grid) {
        return renyi_capacity(DiscreteChannel(to_matrix(channel, "channel")),
                              RenyiOrder(lam), grid);
      },
      py::arg("channel"), py::arg("lam"), py::arg("grid") = 100,
      "Renyi capacity in nats via simplex-grid minimization");

  m.def(
      "compose",
      [](const std::vector<std::vector<double>>& first,
         const std::vector<std::vector<double>>& second) {
        return from_matrix(compose(DiscreteChannel(to_matrix(first, "first")),
                                   DiscreteChannel(to_matrix(second, "second")))
                               .p);
      },
      py::arg("first"), py::arg("second"),
      "Cascade two channels: row-stochastic product");

  m.def(
      "parallel",
      [](const std::vector<std::vector<double>>& a,
         const std::vector<std::vector<double>>& b) {
        return from_matrix(parallel(DiscreteChannel(to_matrix(a, "first")),
                                    DiscreteChannel(to_matrix(b, "second")))
                               .p);
      },
      py::arg("first"), py::arg("second"),
      "Parallel channel: Kronecker product");

  m.def(
      "augment_convex_row",
      [](const std::vector<std::vector<double>>& channel,
         const std::vector<double>& alpha) {
        return from_matrix(
            augment_convex_row(DiscreteChannel(to_matrix(channel, "channel")),
                               alpha)
                .p);
      },
      py::arg("channel"), py::arg("alpha"),
      "Append an input row equal to the alpha-mixture of existing rows");

  m.def(
      "check_axioms",
      [](const std::string& measure, int trials, std::uint64_t seed,
         std::optional<double> tol) {
        const CapacityMeasure cm = parse_measure(measure);
        const double t =
            tol ? *tol
                : (cm.kind == CapacityMeasure::Kind::renyi ? 0.02 : 1e-6);
        const AxiomReport report = check_axioms(cm, trials, seed, t);
        py::list checks;
        for (const AxiomCheck& c : report.checks) {
          py::dict entry;
          entry["name"] = c.name;
          entry["trials"] = c.trials;
          entry["max_violation"] = c.max_violation;
          entry["tolerance"] = c.tolerance;
          entry["pass"] = c.pass;
          checks.append(entry);
        }
        py::dict d;
        d["measure"] = report.measure;
        d["checks"] = checks;
        d["all_pass"] = report.all_pass;
        return d;
      },
      py::arg("measure"), py::arg("trials") = 100, py::arg("seed") = 0,
      py::arg("tol") = std::nullopt,
      "Numeric axiom battery for a capacity measure");

  m.def(
      "gen_beta_gaussian",
      [](double sigma2, std::size_t n, std::uint64_t seed) {
        const ContinuousDataset ds =
            gen_beta_gaussian(GaussianChannelSpec{sigma2, n, seed});
        py::dict d;
        d["x"] = from_matrix(ds.x);
        d["y"] = from_matrix(ds.y);
        return d;
      },
      py::arg("sigma2"), py::arg("n"), py::arg("seed"),
      "X ~ Beta(1.5, 1.5), Y = X + N(0, sigma2)");

  m.def("cmi_ground_truth", &cmi_ground_truth, py::arg("sigma2"),
        "Closed form 0.5 ln(1 + 1/(16 sigma2))");

  m.def("umi_ground_truth", &umi_ground_truth, py::arg("sigma2"),
        py::arg("m") = 8192, py::arg("k") = 5,
        py::arg("seed") = std::uint64_t{0x6e5d},
        "Monte-Carlo uniform-input reference value");
}
