#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wdiffuse/density.hpp"
#include "wdiffuse/dirichlet.hpp"
#include "wdiffuse/measures.hpp"
#include "wdiffuse/random_means.hpp"
#include "wdiffuse/rng.hpp"
#include "wdiffuse/sde.hpp"

namespace py = pybind11;
using namespace wdiffuse;

namespace {

density::SimplexPoint make_point(const std::vector<double>& coords) {
  return density::SimplexPoint{coords};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-dimensional Wasserstein diffusion toolkit (C++ core)";

  // -- random means ---------------------------------------------------------
  m.def("vartheta", &random_means::vartheta, py::arg("x"), py::arg("beta"),
        py::arg("tol") = 1e-10, "Density of the random mean, parameter beta.");
  m.def("theta_cdf", &random_means::theta_cdf, py::arg("x"), py::arg("beta"),
        py::arg("tol") = 1e-10);
  m.def(
      "theta_cdf_oscillatory",
      [](double x, double beta, double t_split) {
        const auto r = random_means::theta_cdf_oscillatory(x, beta, t_split);
        return py::make_tuple(r.value, r.error_estimate);
      },
      py::arg("x"), py::arg("beta"), py::arg("t_split") = 10.0);
  m.def(
      "sample_random_means",
      [](double beta, std::size_t n, std::uint64_t seed) {
        rng::CounterRng rng(seed, 0);
        random_means::VarthetaTable tab(beta);
        std::vector<double> out(n);
        for (auto& v : out) v = random_means::sample_random_mean(tab, rng);
        return out;
      },
      py::arg("beta"), py::arg("n"), py::arg("seed") = 0);

  // -- multivariate density -------------------------------------------------
  py::class_<density::DensityModel>(m, "DensityModel")
      .def(py::init<double, std::size_t, std::size_t, double, std::uint64_t>(),
           py::arg("beta"), py::arg("k"), py::arg("mc_budget") = 200000,
           py::arg("quad_tol") = 1e-7, py::arg("mc_seed") = 0x9a2b)
      .def_property_readonly("beta", &density::DensityModel::beta)
      .def_property_readonly("k", &density::DensityModel::k)
      .def(
          "rho",
          [](const density::DensityModel& self, const std::vector<double>& x) {
            const auto r = self.rho(make_point(x));
            return py::make_tuple(r.value, r.error_estimate, r.warning);
          },
          py::arg("x"), "Returns (value, error_estimate, mc_warning).")
      .def(
          "log_rho",
          [](const density::DensityModel& self, const std::vector<double>& x) {
            return self.log_rho_fast(make_point(x));
          },
          py::arg("x"))
      .def(
          "log_rho_grad",
          [](const density::DensityModel& self, const std::vector<double>& x,
             double h_rel) { return self.log_rho_grad(make_point(x), h_rel); },
          py::arg("x"), py::arg("h_rel") = 1e-4);
  m.def(
      "rho_tilde",
      [](double beta, std::size_t k, const std::vector<double>& x) {
        return density::rho_tilde(beta, k, make_point(x));
      },
      py::arg("beta"), py::arg("k"), py::arg("x"));
  m.def(
      "check_hierarchy",
      [](double beta, std::size_t k, const std::vector<double>& x,
         std::size_t mc_budget, std::uint64_t seed) {
        rng::CounterRng rng(seed, 7);
        const auto r =
            density::check_hierarchy(beta, k, make_point(x), mc_budget, rng);
        py::dict d;
        d["relative_error"] = r.relative_error;
        d["estimate"] = r.estimate;
        d["reference"] = r.reference;
        d["stderr"] = r.stderr_;
        return d;
      },
      py::arg("beta"), py::arg("k"), py::arg("x"),
      py::arg("mc_budget") = 100000, py::arg("seed") = 0);

  // -- exact samplers -------------------------------------------------------
  m.def(
      "sample_mk",
      [](double beta, std::size_t k, std::size_t n, std::uint64_t seed) {
        dirichlet::MkSampler sampler(beta, k);
        std::vector<std::vector<double>> out;
        out.reserve(n);
        rng::CounterRng rng(seed, 0);
        for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.sample(rng));
        return out;
      },
      py::arg("beta"), py::arg("k"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "sample_rho_tilde",
      [](double beta, std::size_t k, std::size_t n, std::uint64_t seed) {
        std::vector<std::vector<double>> out;
        out.reserve(n);
        rng::CounterRng rng(seed, 0);
        for (std::size_t i = 0; i < n; ++i)
          out.push_back(dirichlet::sample_rho_tilde(beta, k, rng));
        return out;
      },
      py::arg("beta"), py::arg("k"), py::arg("n"), py::arg("seed") = 0);

  // -- measures -------------------------------------------------------------
  m.def(
      "project_particles",
      [](const std::vector<double>& atoms, const std::vector<double>& weights,
         std::size_t k) {
        return measures::project_pi_P(measures::AtomicMeasure{atoms, weights}, k)
            .atoms;
      },
      py::arg("atoms"), py::arg("weights"), py::arg("k"),
      "Slice-mean projection of an atomic measure onto k ordered particles.");
  m.def(
      "wasserstein_distance",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return measures::wasserstein_distance(measures::EmpiricalMeasure{a},
                                              measures::EmpiricalMeasure{b});
      },
      py::arg("atoms_a"), py::arg("atoms_b"),
      "L2-Wasserstein distance of two equal-weight particle clouds.");

  // -- SDE ------------------------------------------------------------------
  py::enum_<sde::DriftKind>(m, "DriftKind")
      .value("monotone", sde::DriftKind::monotone)
      .value("explicit_gaps", sde::DriftKind::explicit_);

  py::class_<sde::SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("k", &sde::SimConfig::k)
      .def_readwrite("beta", &sde::SimConfig::beta)
      .def_readwrite("drift", &sde::SimConfig::drift)
      .def_readwrite("dt", &sde::SimConfig::dt)
      .def_readwrite("horizon", &sde::SimConfig::horizon)
      .def_readwrite("n_traj", &sde::SimConfig::n_traj)
      .def_readwrite("seed", &sde::SimConfig::seed)
      .def_readwrite("record_stride", &sde::SimConfig::record_stride)
      .def_readwrite("fd_h_rel", &sde::SimConfig::fd_h_rel)
      .def_readwrite("allow_mc_monotone", &sde::SimConfig::allow_mc_monotone);

  m.def(
      "drift_explicit",
      [](double beta, std::size_t k, const std::vector<double>& x) {
        return sde::drift_explicit(beta, k, make_point(x));
      },
      py::arg("beta"), py::arg("k"), py::arg("x"));

  m.def(
      "simulate",
      [](const sde::SimConfig& cfg) {
        const auto trajs = sde::simulate(cfg);
        py::list out;
        for (const auto& tr : trajs) {
          py::dict d;
          d["times"] = tr.times;
          std::vector<std::vector<double>> states;
          states.reserve(tr.states.size());
          for (const auto& s : tr.states) states.push_back(s.coords);
          d["states"] = states;
          d["rejected_steps"] = tr.rejected_steps;
          d["degenerate"] = tr.degenerate;
          d["acceptance_fraction"] = tr.acceptance_fraction();
          out.append(d);
        }
        return out;
      },
      py::arg("config"));
}
