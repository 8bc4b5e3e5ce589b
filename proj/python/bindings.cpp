#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qvdp/asymptotics.hpp"
#include "qvdp/error.hpp"
#include "qvdp/exactstate.hpp"
#include "qvdp/liouville.hpp"
#include "qvdp/metrology.hpp"
#include "qvdp/scaling.hpp"

namespace py = pybind11;
using namespace qvdp;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict wigner_dict(const exactstate::WignerField& w) {
  py::array_t<double> values({static_cast<py::ssize_t>(w.y.size()), static_cast<py::ssize_t>(w.x.size())});
  std::copy(w.values.begin(), w.values.end(), values.mutable_data());
  py::dict d;
  d["x"] = to_array(w.x);
  d["y"] = to_array(w.y);
  d["W"] = values;
  d["integral"] = w.integral();
  d["mean_field_radius"] = w.mean_field_radius ? py::cast(*w.mean_field_radius) : py::none();
  return d;
}

std::vector<scaling::Observable> observables(const std::vector<std::string>& names) {
  std::vector<scaling::Observable> out;
  for (const auto& n : names) out.push_back(scaling::observable_from_string(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings of the qvdp C++ core";
  m.attr("__version__") = QVDP_VERSION;
  py::register_exception<Error>(m, "QvdpError", PyExc_RuntimeError);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](double g, double eta, double kappa, double omega0, std::optional<std::size_t> trunc) {
             NumericalControls nc;
             nc.truncation = trunc;
             return SystemParams(g, eta, kappa, omega0, nc);
           }),
           py::arg("g"), py::arg("eta"), py::arg("kappa") = 1.0, py::arg("omega0") = 0.0,
           py::arg("truncation") = py::none())
      .def_property_readonly("g", &SystemParams::g)
      .def_property_readonly("eta", &SystemParams::eta)
      .def_property_readonly("kappa", &SystemParams::kappa)
      .def_property_readonly("omega0", &SystemParams::omega0)
      .def_property_readonly("truncation", [](const SystemParams& p) { return p.numerics().truncation; })
      .def_property_readonly("q_exponent", &SystemParams::q_exponent)
      .def_property_readonly("delta_g", &SystemParams::delta_g)
      .def("__repr__", [](const SystemParams& p) {
        return "SystemParams(g=" + std::to_string(p.g()) + ", eta=" + std::to_string(p.eta()) +
               ", kappa=" + std::to_string(p.kappa()) + ")";
      });

  m.def(
      "photon_distribution",
      [](const SystemParams& p, std::optional<std::size_t> trunc) {
        return to_array(exactstate::photon_distribution(p, trunc).probabilities);
      },
      py::arg("params"), py::arg("truncation") = py::none(), "Closed-form p_n as a numpy array.");

  m.def(
      "steady_state_oracle",
      [](const SystemParams& p, std::size_t trunc) {
        return to_array(liouville::steady_state_oracle(p, trunc).probabilities);
      },
      py::arg("params"), py::arg("truncation"), "Kernel of the k = 0 Liouvillian block.");

  m.def(
      "factorial_moments",
      [](const SystemParams& p, int max_order) {
        const auto r = exactstate::factorial_moments(p, max_order);
        py::dict d;
        d["moments"] = r.factorial_moments;
        d["Na"] = r.photon_number;
        d["std_Na"] = r.photon_std;
        d["g2"] = r.g2;
        return d;
      },
      py::arg("params"), py::arg("max_order") = 2);

  m.def(
      "wigner",
      [](const SystemParams& p, std::size_t points, std::optional<double> half_width) {
        return wigner_dict(exactstate::wigner(p, {half_width, points}));
      },
      py::arg("params"), py::arg("points") = 201, py::arg("half_width") = py::none());

  m.def(
      "driven_branch_wigner",
      [](const SystemParams& p, double delta, std::complex<double> epsilon, std::size_t points,
         std::optional<double> half_width) {
        return wigner_dict(exactstate::driven_branch_wigner_grid(p, exactstate::DrivenBranchParams(delta, epsilon),
                                                                 {half_width, points}));
      },
      py::arg("params"), py::arg("delta"), py::arg("epsilon"), py::arg("points") = 201,
      py::arg("half_width") = py::none());

  m.def(
      "real_dissipative_gap",
      [](const SystemParams& p, std::optional<std::size_t> trunc) { return liouville::real_dissipative_gap(p, trunc); },
      py::arg("params"), py::arg("truncation") = py::none());

  m.def(
      "asymptotic_decay_rate",
      [](const SystemParams& p, std::optional<std::size_t> trunc, int k_max) {
        const auto s = liouville::asymptotic_decay_rate(p, trunc, k_max);
        py::dict d;
        d["rdg"] = s.rdg;
        d["adr"] = s.adr;
        d["adr_block"] = s.adr_block;
        d["T"] = s.relaxation_time;
        d["truncation"] = s.truncation;
        py::dict blocks;
        for (const auto& b : s.leading_eigenvalues) blocks[py::int_(b.k)] = b.eigenvalues;
        d["leading_eigenvalues"] = blocks;
        return d;
      },
      py::arg("params"), py::arg("truncation") = py::none(), py::arg("k_max") = 4);

  m.def(
      "metrology",
      [](const SystemParams& p, double step) {
        metrology::DifferenceOptions o;
        o.step = step;
        const auto r = metrology::analyze(p, o);
        py::dict d;
        d["qfi"] = r.qfi;
        d["snr"] = r.snr_photon;
        d["dNa_dg"] = r.susceptibility;
        d["std_Na"] = r.photon_std;
        d["Na"] = r.photon_number;
        d["fd_step"] = r.fd_step;
        d["richardson_error"] = r.richardson_error_estimate;
        d["discarded_mass"] = r.discarded_mass;
        d["truncation"] = r.truncation;
        return d;
      },
      py::arg("params"), py::arg("step") = 1e-4);

  m.def(
      "limit_report",
      [](double g, double kappa, double eta) {
        const auto r = asymptotics::limit_report(g, kappa, eta);
        py::dict d;
        d["regime"] = asymptotics::to_string(r.regime.kind);
        d["Na"] = r.photon_number_limit;
        d["std_Na"] = r.photon_std_limit;
        d["dNa_dg"] = r.susceptibility_limit;
        d["g2"] = r.g2_limit;
        d["snr"] = r.snr_limit;
        return d;
      },
      py::arg("g"), py::arg("kappa"), py::arg("eta"));

  m.def(
      "sweep",
      [](const std::string& axis, const std::vector<double>& values, const SystemParams& fixed,
         const std::vector<std::string>& names) {
        const auto obs = observables(names);
        const auto recs = scaling::sweep(scaling::axis_from_string(axis), values, fixed, obs);
        py::list out;
        for (const auto& r : recs) {
          py::dict d;
          d["g"] = r.params.g();
          d["kappa"] = r.params.kappa();
          d["eta"] = r.params.eta();
          d["ok"] = r.ok;
          d["failure"] = r.failure;
          for (auto o : obs) {
            const auto v = r.get(o);
            d[scaling::to_string(o)] = v ? py::cast(*v) : py::none();
          }
          out.append(d);
        }
        return out;
      },
      py::arg("axis"), py::arg("values"), py::arg("fixed"), py::arg("observables"),
      "Sweep g or eta; one dict per value.");

  m.def(
      "fit_exponent",
      [](const std::string& axis, const std::vector<double>& values, const SystemParams& fixed,
         const std::string& x, const std::string& y) {
        std::vector<scaling::Observable> obs{scaling::observable_from_string(y)};
        const auto xv = scaling::x_variable_from_string(x);
        if (xv == scaling::XVariable::Na) obs.push_back(scaling::Observable::Na);
        if (xv == scaling::XVariable::T) obs.push_back(scaling::Observable::T);
        const auto recs = scaling::sweep(scaling::axis_from_string(axis), values, fixed, obs);
        const auto f = scaling::fit_exponent(recs, xv, obs.front());
        py::dict d;
        d["exponent"] = f.exponent;
        d["intercept"] = f.intercept;
        d["r_squared"] = f.r_squared;
        d["stderr"] = f.stderr_exponent;
        d["n_points"] = f.n_points;
        return d;
      },
      py::arg("axis"), py::arg("values"), py::arg("fixed"), py::arg("x"), py::arg("y"),
      "Sweep, then fit log y against log x.");
}
