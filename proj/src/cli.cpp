#include "qvdp/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvdp/asymptotics.hpp"
#include "qvdp/error.hpp"
#include "qvdp/exactstate.hpp"
#include "qvdp/liouville.hpp"
#include "qvdp/metrology.hpp"
#include "qvdp/params.hpp"
#include "qvdp/scaling.hpp"

namespace qvdp::cli {

namespace {

using json = nlohmann::ordered_json;

// Usage or configuration problem; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { number, optional_number, integer, optional_integer, text, number_list, text_list, flag };

struct OptionSpec {
  std::string key;  // config key; the flag is --key with '_' -> '-'
  Kind kind;
  json default_value;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  json param_defaults;
  std::vector<OptionSpec> options;
};

json params_defaults(double g, double eta) {
  return json{{"g", g}, {"kappa", 1.0}, {"eta", eta}, {"omega0", 0.0}, {"trunc", nullptr}};
}

const std::vector<OptionSpec>& param_specs() {
  static const std::vector<OptionSpec> specs{
      {"g", Kind::number, {}, "one-photon pump rate"},
      {"kappa", Kind::number, {}, "one-photon loss rate"},
      {"eta", Kind::number, {}, "two-photon loss rate"},
      {"omega0", Kind::number, {}, "cavity frequency (lab frame only)"},
      {"trunc", Kind::optional_integer, {}, "Fock levels kept, or 'auto'"},
  };
  return specs;
}

json list(std::initializer_list<double> v) { return json(std::vector<double>(v)); }

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs{
      {"steady",
       "Closed-form photon-number distribution and moments",
       params_defaults(0.5, 0.1),
       {{"max_order", Kind::integer, 2, "highest factorial moment reported"}}},
      {"wigner",
       "Closed-form Wigner function on a square grid (columns x,y,W)",
       params_defaults(2.0, 0.1),
       {{"points", Kind::integer, 201, "grid points per axis"},
        {"half_width", Kind::optional_number, nullptr, "grid half width, or 'auto'"},
        {"series", Kind::number_list, json::array(), "pump rates, one grid each (adds a leading g column)"}}},
      {"spectrum",
       "Leading Liouvillian eigenvalues per block, gap and decay rate",
       params_defaults(1.0, 0.01),
       {{"k_max", Kind::integer, 4, "largest block offset scanned"},
        {"method", Kind::text, "automatic", "automatic, dense or shift_invert"}}},
      {"metrology",
       "Quantum Fisher information and photon-number signal-to-noise ratio",
       params_defaults(1.0, 0.01),
       {{"step", Kind::number, 1e-4, "finite-difference base step in units of kappa"},
        {"floor", Kind::number, 1e-14, "probability floor of the Fisher sum"}}},
      {"scan",
       "Sweep g or eta and tabulate observables",
       params_defaults(0.5, 0.01),
       {{"axis", Kind::text, "g", "g or eta"},
        {"values", Kind::number_list, json::array(), "comma-separated sweep values"},
        {"range", Kind::number_list, json::array(), "start,stop,count (linear)"},
        {"log_range", Kind::number_list, json::array(), "start,stop,count (geometric)"},
        {"observables", Kind::text_list, json::array({"Na", "g2"}),
         "comma-separated: Na,eta_Na,dNa_dg,std_Na,g2,qfi,snr,rdg,adr,T"},
        {"series", Kind::number_list, json::array(),
         "values of the other parameter (eta for axis g, g for axis eta), one sweep each"},
        {"truncation_check", Kind::flag, false, "fail points whose spectra move under 1.5x truncation"}}},
      {"gapmin",
       "Gap at g = kappa and its minimum over g, per eta",
       params_defaults(1.0, 0.01),
       {{"eta_grid", Kind::number_list, list({0.05, 0.035, 0.02, 0.01, 0.007, 0.005, 0.0035, 0.002}),
         "eta values"},
        {"g_lo", Kind::number, 0.5, "lower end of the g grid"},
        {"g_hi", Kind::number, 2.0, "upper end of the g grid"},
        {"g_step", Kind::number, 0.01, "g grid spacing"}}},
      {"fit",
       "Fit a power law to a sweep",
       params_defaults(1.0, 0.002),
       {{"exponent", Kind::text, "omega2",
         "omega1, omega2, rdg, adr, qfi, qfi_Na, qfi_T or custom"},
        {"eta_grid", Kind::number_list, list({0.05, 0.02, 0.01, 0.005, 0.002}),
         "eta values for eta sweeps"},
        {"delta_grid", Kind::number_list, json::array(),
         "g - kappa values for omega1 (default: six points from 10 sqrt(eta kappa))"},
        {"x", Kind::text, "eta", "custom fit abscissa: eta, delta_g, Na or T"},
        {"y", Kind::text, "Na", "custom fit ordinate (observable name)"},
        {"axis", Kind::text, "eta", "custom fit sweep axis"},
        {"values", Kind::number_list, json::array(), "custom fit sweep values"},
        {"tolerance", Kind::optional_number, nullptr,
         "tolerance against the reference exponent, or 'auto' (0.03 omega2, 0.1 qfi_Na, 0.15 qfi_T, else 0.05)"}}},
      {"table1",
       "eta exponents of dNa/dg, std, SNR, Na and T at two pump rates",
       params_defaults(1.0, 0.01),
       {{"eta_grid", Kind::number_list,
         list({0.002, 0.0013, 0.0008, 0.0005, 0.0003, 0.0002}), "eta values"},
        {"g_critical", Kind::number, 1.0, "pump rate of the critical row"},
        {"g_time_crystal", Kind::number, 2.0, "pump rate of the time-crystal row"},
        {"no_T", Kind::flag, false, "skip the relaxation-time column"}}},
      {"verify",
       "Compare closed-form p_n with the Liouvillian null-space oracle",
       params_defaults(0.2, 1.0),
       {{"tolerance", Kind::number, 1e-10, "largest accepted |p_closed - p_oracle|"}}},
      {"driven",
       "Wigner function of the coherently driven g = 0 branch",
       params_defaults(0.0, 1.0),
       {{"delta", Kind::number, 1.0, "detuning"},
        {"epsilon_re", Kind::number, 1.0, "real part of the drive amplitude"},
        {"epsilon_im", Kind::number, 0.0, "imaginary part of the drive amplitude"},
        {"points", Kind::integer, 201, "grid points per axis"},
        {"half_width", Kind::optional_number, nullptr, "grid half width, or 'auto'"},
        {"oracle_trunc", Kind::integer, 0,
         "if > 0, also solve the dense driven Liouvillian with this many levels"}}},
  };
  return specs;
}

const CommandSpec& find_command(const std::string& name) {
  for (const auto& c : command_specs()) {
    if (c.name == name) return c;
  }
  throw UsageError("unknown command '" + name + "'");
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

// ---- value conversion ------------------------------------------------------

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(what + ": invalid number '" + text + "'");
  return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(what + ": invalid integer '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

json from_flag(const OptionSpec& spec, const std::string& text) {
  const std::string what = flag_name(spec.key);
  switch (spec.kind) {
    case Kind::number:
      return parse_number(text, what);
    case Kind::optional_number:
      if (text == "auto" || text == "none") return nullptr;
      return parse_number(text, what);
    case Kind::integer:
      return parse_integer(text, what);
    case Kind::optional_integer:
      if (text == "auto" || text == "none") return nullptr;
      return parse_integer(text, what);
    case Kind::text:
      return text;
    case Kind::number_list: {
      json arr = json::array();
      for (const auto& s : split(text)) arr.push_back(parse_number(s, what));
      return arr;
    }
    case Kind::text_list: {
      json arr = json::array();
      for (const auto& s : split(text)) arr.push_back(s);
      return arr;
    }
    case Kind::flag:
      return true;
  }
  return nullptr;
}

void check_type(const OptionSpec& spec, const json& v, const std::string& where) {
  const auto bad = [&](const char* expected) {
    throw UsageError("config " + where + "." + spec.key + ": expected " + expected + ", got " +
                     v.dump());
  };
  switch (spec.kind) {
    case Kind::number:
      if (!v.is_number()) bad("a number");
      break;
    case Kind::optional_number:
      if (!v.is_null() && !v.is_number()) bad("a number or null");
      break;
    case Kind::integer:
      if (!v.is_number_integer()) bad("an integer");
      break;
    case Kind::optional_integer:
      if (!v.is_null() && !v.is_number_integer()) bad("an integer or null");
      break;
    case Kind::text:
      if (!v.is_string()) bad("a string");
      break;
    case Kind::number_list:
      if (!v.is_array()) bad("an array of numbers");
      for (const auto& e : v) {
        if (!e.is_number()) bad("an array of numbers");
      }
      break;
    case Kind::text_list:
      if (!v.is_array()) bad("an array of strings");
      for (const auto& e : v) {
        if (!e.is_string()) bad("an array of strings");
      }
      break;
    case Kind::flag:
      if (!v.is_boolean()) bad("a boolean");
      break;
  }
}

// ---- configuration resolution ---------------------------------------------

json defaults_for(const CommandSpec& cmd) {
  json opts = json::object();
  for (const auto& o : cmd.options) opts[o.key] = o.default_value;
  return json{{"command", cmd.name}, {"params", cmd.param_defaults}, {"options", opts},
              {"output", ""},        {"format", "csv"},               {"seedless", true}};
}

void merge_config_file(json& resolved, const CommandSpec& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file '" + path + "': top level must be an object");
  // A result file can be fed back: use its embedded configuration.
  if (cfg.contains("config") && cfg.contains("rows")) cfg = cfg["config"];

  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") {
      if (!value.is_string() || value.get<std::string>() != cmd.name) {
        throw UsageError("config file '" + path + "' is for command " + value.dump() +
                         ", not '" + cmd.name + "'");
      }
    } else if (key == "params") {
      if (!value.is_object()) throw UsageError("config params must be an object");
      for (const auto& [pk, pv] : value.items()) {
        const auto it = std::find_if(param_specs().begin(), param_specs().end(),
                                     [&](const OptionSpec& s) { return s.key == pk; });
        if (it == param_specs().end()) throw UsageError("config params: unknown key '" + pk + "'");
        check_type(*it, pv, "params");
        resolved["params"][pk] = pv;
      }
    } else if (key == "options") {
      if (!value.is_object()) throw UsageError("config options must be an object");
      for (const auto& [ok, ov] : value.items()) {
        const auto it = std::find_if(cmd.options.begin(), cmd.options.end(),
                                     [&](const OptionSpec& s) { return s.key == ok; });
        if (it == cmd.options.end()) {
          throw UsageError("config options: unknown key '" + ok + "' for command '" + cmd.name + "'");
        }
        check_type(*it, ov, "options");
        resolved["options"][ok] = ov;
      }
    } else if (key == "output" || key == "format") {
      if (!value.is_string()) throw UsageError("config " + key + ": expected a string");
      resolved[key] = value;
    } else if (key == "seedless") {
      if (value != true) throw UsageError("config seedless: only true is supported");
    } else {
      throw UsageError("config file '" + path + "': unknown key '" + key + "'");
    }
  }
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw UsageError("--format: expected csv or json, got '" + s + "'");
}

// ---- typed access ----------------------------------------------------------

struct Resolved {
  json config;
  SystemParams params;
  Format format;
  std::string output;

  [[nodiscard]] const json& opt(const std::string& key) const { return config["options"][key]; }
  [[nodiscard]] double number(const std::string& key) const { return opt(key).get<double>(); }
  [[nodiscard]] long long integer(const std::string& key) const { return opt(key).get<long long>(); }
  [[nodiscard]] std::string text(const std::string& key) const { return opt(key).get<std::string>(); }
  [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
    return opt(key).get<std::vector<double>>();
  }
  [[nodiscard]] std::vector<std::string> texts(const std::string& key) const {
    return opt(key).get<std::vector<std::string>>();
  }
  [[nodiscard]] std::optional<double> optional_number(const std::string& key) const {
    return opt(key).is_null() ? std::nullopt : std::optional<double>(number(key));
  }
};

std::size_t non_negative(long long v, const std::string& key) {
  if (v < 0) throw UsageError(flag_name(key) + ": must be >= 0");
  return static_cast<std::size_t>(v);
}

SystemParams build_params(const json& p) {
  NumericalControls nc;
  if (!p["trunc"].is_null()) {
    const auto t = p["trunc"].get<long long>();
    if (t < 0) throw UsageError("--trunc: must be >= 0");
    nc.truncation = static_cast<std::size_t>(t);
  }
  try {
    return SystemParams(p["g"].get<double>(), p["eta"].get<double>(), p["kappa"].get<double>(),
                        p["omega0"].get<double>(), nc);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

std::string default_output(const std::string& command, Format format) {
  const char* dir = std::getenv(kOutputDirEnv);
  std::filesystem::path base = (dir && *dir) ? std::filesystem::path(dir) : std::filesystem::path(".");
  return (base / (command + (format == Format::csv ? ".csv" : ".json"))).string();
}

// ---- commands --------------------------------------------------------------

struct CommandResult {
  Table table;
  std::vector<std::string> summary;
  int exit_code = kExitOk;
};

std::string kv(const std::string& k, double v) { return k + " = " + format_number(v); }

std::vector<Cell> row(std::initializer_list<Cell> cells) { return std::vector<Cell>(cells); }

Table wigner_table(const exactstate::WignerField& w) {
  Table t{{"x", "y", "W"}, {}};
  t.rows.reserve(w.values.size());
  for (std::size_t iy = 0; iy < w.y.size(); ++iy) {
    for (std::size_t ix = 0; ix < w.x.size(); ++ix) {
      t.rows.push_back(row({w.x[ix], w.y[iy], w.at(ix, iy)}));
    }
  }
  return t;
}

CommandResult cmd_steady(const Resolved& r) {
  const auto order = static_cast<int>(r.integer("max_order"));
  if (order < 1) throw UsageError("--max-order: must be >= 1");
  const auto dist = exactstate::photon_distribution(r.params);
  const auto m = exactstate::factorial_moments(r.params, order);
  CommandResult out;
  out.table.columns = {"n", "p"};
  for (std::size_t n = 0; n < dist.truncation; ++n) {
    out.table.rows.push_back(row({static_cast<double>(n), dist.probabilities[n]}));
  }
  out.summary = {kv("Na", m.photon_number), kv("std_Na", m.photon_std), kv("g2", m.g2),
                 kv("truncation", static_cast<double>(dist.truncation))};
  for (int k = 0; k <= order; ++k) {
    out.summary.push_back(kv("moment[" + std::to_string(k) + "]",
                             m.factorial_moments[static_cast<std::size_t>(k)]));
  }
  return out;
}

CommandResult cmd_wigner(const Resolved& r) {
  exactstate::GridSpec grid;
  grid.points = non_negative(r.integer("points"), "points");
  grid.half_width = r.optional_number("half_width");
  const auto series = r.numbers("series");
  CommandResult out;
  if (series.empty()) {
    const auto w = exactstate::wigner(r.params, grid);
    out.table = wigner_table(w);
    out.summary = {kv("integral", w.integral()), kv("points", static_cast<double>(w.x.size()))};
    if (w.mean_field_radius) out.summary.push_back(kv("mean_field_radius", *w.mean_field_radius));
    return out;
  }
  out.table.columns = {"g", "x", "y", "W"};
  for (double g : series) {
    const auto w = exactstate::wigner(r.params.with_g(g), grid);
    auto part = wigner_table(w);
    for (auto& cells : part.rows) {
      cells.insert(cells.begin(), g);
      out.table.rows.push_back(std::move(cells));
    }
    out.summary.push_back("g = " + format_number(g) + ": integral = " + format_number(w.integral()));
  }
  return out;
}

liouville::EigenMethod parse_method(const std::string& s) {
  if (s == "automatic") return liouville::EigenMethod::automatic;
  if (s == "dense") return liouville::EigenMethod::dense;
  if (s == "shift_invert") return liouville::EigenMethod::shift_invert;
  throw UsageError("--method: expected automatic, dense or shift_invert, got '" + s + "'");
}

CommandResult cmd_spectrum(const Resolved& r) {
  liouville::EigenOptions eo;
  eo.method = parse_method(r.text("method"));
  const auto s = liouville::asymptotic_decay_rate(r.params, r.params.numerics().truncation,
                                                  static_cast<int>(r.integer("k_max")), eo);
  CommandResult out;
  out.table.columns = {"k", "index", "re", "im"};
  for (const auto& b : s.leading_eigenvalues) {
    for (std::size_t i = 0; i < b.eigenvalues.size(); ++i) {
      out.table.rows.push_back(row({static_cast<double>(b.k), static_cast<double>(i),
                                    b.eigenvalues[i].real(), b.eigenvalues[i].imag()}));
    }
  }
  out.summary = {kv("rdg", s.rdg), kv("adr", s.adr), kv("adr_block", s.adr_block),
                 kv("relaxation_time", s.relaxation_time),
                 kv("truncation", static_cast<double>(s.truncation))};
  return out;
}

CommandResult cmd_metrology(const Resolved& r) {
  metrology::DifferenceOptions d;
  d.step = r.number("step");
  d.probability_floor = r.number("floor");
  const auto m = metrology::analyze(r.params, d);
  const double gap = std::abs(m.qfi - m.snr_photon) / m.qfi;
  CommandResult out;
  out.table.columns = {"g",     "kappa",   "eta",           "qfi",
                       "snr",   "dNa_dg",  "std_Na",        "Na",
                       "optimality_gap", "fd_step", "richardson_error", "discarded_mass",
                       "truncation"};
  out.table.rows.push_back(row({r.params.g(), r.params.kappa(), r.params.eta(), m.qfi, m.snr_photon,
                                m.susceptibility, m.photon_std, m.photon_number, gap, m.fd_step,
                                m.richardson_error_estimate, m.discarded_mass,
                                static_cast<double>(m.truncation)}));
  out.summary = {kv("qfi", m.qfi), kv("snr", m.snr_photon), kv("optimality_gap", gap),
                 kv("dNa_dg", m.susceptibility), kv("std_Na", m.photon_std),
                 kv("Na", m.photon_number)};
  return out;
}

std::vector<double> sweep_values(const Resolved& r) {
  const auto values = r.numbers("values");
  const auto lin = r.numbers("range");
  const auto geo = r.numbers("log_range");
  const int given = !values.empty() + !lin.empty() + !geo.empty();
  if (given > 1) throw UsageError("scan: give only one of --values, --range, --log-range");
  if (!values.empty()) return values;
  const auto& spec = !lin.empty() ? lin : geo;
  if (spec.empty()) {
    if (r.text("axis") == "eta") return {0.05, 0.035, 0.02, 0.01, 0.007, 0.005, 0.0035, 0.002, 0.001};
    std::vector<double> v;
    for (int i = 0; i <= 30; ++i) v.push_back(0.5 + 0.05 * i);
    return v;
  }
  if (spec.size() != 3 || spec[2] < 2 || spec[2] != std::floor(spec[2])) {
    throw UsageError("scan: ranges take start,stop,count with an integer count >= 2");
  }
  const auto count = static_cast<std::size_t>(spec[2]);
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    v[i] = !lin.empty() ? spec[0] + t * (spec[1] - spec[0])
                        : spec[0] * std::pow(spec[1] / spec[0], t);
  }
  return v;
}

CommandResult cmd_scan(const Resolved& r) {
  const auto axis = scaling::axis_from_string(r.text("axis"));
  std::vector<scaling::Observable> obs;
  for (const auto& name : r.texts("observables")) obs.push_back(scaling::observable_from_string(name));
  scaling::SweepOptions so;
  so.truncation_check = r.opt("truncation_check").get<bool>();
  const auto values = sweep_values(r);
  auto series = r.numbers("series");
  std::vector<scaling::SweepRecord> recs;
  if (series.empty()) {
    recs = scaling::sweep(axis, values, r.params, obs, so);
  } else {
    for (double v : series) {
      const auto fixed = axis == scaling::Axis::g ? r.params.with_eta(v) : r.params.with_g(v);
      auto part = scaling::sweep(axis, values, fixed, obs, so);
      recs.insert(recs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
  }

  CommandResult out;
  out.table.columns = {"g", "kappa", "eta"};
  for (auto o : obs) out.table.columns.emplace_back(scaling::to_string(o));
  std::size_t failures = 0;
  for (const auto& rec : recs) {
    std::vector<Cell> cells{rec.params.g(), rec.params.kappa(), rec.params.eta()};
    for (auto o : obs) cells.emplace_back(rec.get(o).value_or(NAN));
    out.table.rows.push_back(std::move(cells));
    if (!rec.ok) {
      ++failures;
      out.summary.push_back("failed at g = " + format_number(rec.params.g()) +
                            ", eta = " + format_number(rec.params.eta()) + ": " + rec.failure);
    }
  }
  out.summary.insert(out.summary.begin(), kv("points", static_cast<double>(recs.size())));
  out.summary.insert(out.summary.begin() + 1, kv("failures", static_cast<double>(failures)));
  return out;
}

CommandResult cmd_gapmin(const Resolved& r) {
  const auto etas = r.numbers("eta_grid");
  if (etas.empty()) throw UsageError("gapmin: eta_grid is empty");
  const double lo = r.number("g_lo"), hi = r.number("g_hi"), step = r.number("g_step");
  CommandResult out;
  out.table.columns = {"eta", "kappa", "rdg_critical", "g_min", "rdg_min", "interior_minima"};
  std::size_t irregular = 0;
  for (double eta : etas) {
    const auto p = r.params.with_eta(eta);
    const auto m = scaling::gap_minimum(p, lo, hi, step);
    const double crit = liouville::real_dissipative_gap(p.with_g(p.kappa()));
    out.table.rows.push_back(row({eta, p.kappa(), crit, m.g, m.rdg, static_cast<double>(m.interior_minima)}));
    if (m.interior_minima != 1) ++irregular;
  }
  out.summary = {kv("points", static_cast<double>(etas.size())),
                 kv("without_single_minimum", static_cast<double>(irregular))};
  return out;
}

struct FitPlan {
  scaling::Axis axis;
  std::vector<double> values;
  scaling::XVariable x;
  scaling::Observable y;
  std::vector<scaling::Observable> observables;
  std::optional<double> reference;
  double tolerance = 0.05;
};

// Reference exponent for eta sweeps that depend on the regime.
std::optional<double> by_regime(const SystemParams& p, std::optional<double> normal,
                                std::optional<double> critical, std::optional<double> crystal) {
  switch (asymptotics::classify(p.g(), p.kappa()).kind) {
    case asymptotics::RegimeKind::normal:
      return normal;
    case asymptotics::RegimeKind::critical:
      return critical;
    case asymptotics::RegimeKind::time_crystal:
      return crystal;
  }
  return std::nullopt;
}

FitPlan plan_fit(const Resolved& r) {
  using O = scaling::Observable;
  using X = scaling::XVariable;
  const auto name = r.text("exponent");
  const auto& p = r.params;
  const auto eta_grid = r.numbers("eta_grid");
  FitPlan plan{scaling::Axis::eta, eta_grid, X::eta, O::Na, {}, std::nullopt};
  if (name == "omega1") {
    auto deltas = r.numbers("delta_grid");
    if (deltas.empty()) {
      const double start = 10.0 * std::sqrt(p.eta() * p.kappa());
      for (int i = 0; i < 6; ++i) deltas.push_back(start * std::pow(4.0, i / 5.0));
    }
    plan.axis = scaling::Axis::g;
    plan.values.clear();
    for (double d : deltas) plan.values.push_back(p.kappa() + d);
    plan.x = X::delta_g;
    plan.y = O::eta_Na;
    plan.reference = 1.0;
  } else if (name == "omega2") {
    plan.y = O::Na;
    plan.reference = -0.5;
    plan.tolerance = 0.03;
  } else if (name == "rdg") {
    plan.y = O::rdg;
    plan.reference = by_regime(p, std::nullopt, 0.5, std::nullopt);
  } else if (name == "adr") {
    plan.y = O::adr;
    plan.reference = by_regime(p, std::nullopt, 0.5, 1.0);
  } else if (name == "qfi") {
    plan.y = O::qfi;
    plan.reference = by_regime(p, std::nullopt, -1.0, -1.0);
  } else if (name == "qfi_Na") {
    plan.x = X::Na;
    plan.y = O::qfi;
    plan.observables = {O::Na, O::qfi};
    plan.reference = by_regime(p, std::nullopt, 2.0, 1.0);
    plan.tolerance = 0.1;
  } else if (name == "qfi_T") {
    plan.x = X::T;
    plan.y = O::qfi;
    plan.observables = {O::T, O::qfi};
    plan.reference = by_regime(p, std::nullopt, 2.0, 1.0);
    plan.tolerance = 0.15;
  } else if (name == "custom") {
    plan.axis = scaling::axis_from_string(r.text("axis"));
    plan.values = r.numbers("values");
    plan.x = scaling::x_variable_from_string(r.text("x"));
    plan.y = scaling::observable_from_string(r.text("y"));
    if (plan.x == X::Na) plan.observables.push_back(O::Na);
    if (plan.x == X::T) plan.observables.push_back(O::T);
  } else {
    throw UsageError("--exponent: unknown fit '" + name + "'");
  }
  if (plan.observables.empty()) plan.observables = {plan.y};
  if (std::find(plan.observables.begin(), plan.observables.end(), plan.y) == plan.observables.end()) {
    plan.observables.push_back(plan.y);
  }
  if (plan.values.empty()) throw UsageError("fit: no sweep values");
  return plan;
}

CommandResult cmd_fit(const Resolved& r) {
  const auto plan = plan_fit(r);
  const auto recs = scaling::sweep(plan.axis, plan.values, r.params, plan.observables);
  const auto f = scaling::fit_exponent(recs, plan.x, plan.y, plan.reference,
                                            r.optional_number("tolerance").value_or(plan.tolerance));
  CommandResult out;
  out.table.columns = {"fit", "x", "y", "exponent", "intercept", "r_squared", "stderr",
                       "n_points", "reference", "within_tolerance"};
  out.table.rows.push_back(row({r.text("exponent"), std::string(scaling::to_string(plan.x)),
                                std::string(scaling::to_string(plan.y)), f.exponent, f.intercept,
                                f.r_squared, f.stderr_exponent, static_cast<double>(f.n_points),
                                f.reference_exponent.value_or(NAN),
                                std::string(f.within_tolerance ? "true" : "false")}));
  out.summary = {kv("exponent", f.exponent), kv("stderr", f.stderr_exponent),
                 kv("r_squared", f.r_squared), kv("n_points", static_cast<double>(f.n_points))};
  if (f.reference_exponent) {
    out.summary.push_back(kv("reference", *f.reference_exponent));
    out.summary.push_back(std::string("within_tolerance = ") + (f.within_tolerance ? "true" : "false"));
  }
  for (const auto& e : f.exclusions) {
    out.summary.push_back("excluded point " + std::to_string(e.index) + ": " + e.reason);
  }
  return out;
}

CommandResult cmd_table1(const Resolved& r) {
  const bool with_t = !r.opt("no_T").get<bool>();
  const auto rep = scaling::table1_report(r.numbers("eta_grid"), r.number("g_critical"),
                                          r.number("g_time_crystal"), with_t, r.params);
  const auto cols = scaling::table1_columns(with_t);
  CommandResult out;
  out.table.columns = {"regime", "g", "observable", "exponent", "reference", "within_tolerance",
                       "r_squared", "stderr"};
  auto add = [&](const std::string& regime, const scaling::Table1Row& tr) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& f = tr.fits[c];
      out.table.rows.push_back(row({regime, tr.g, std::string(scaling::to_string(cols[c])),
                                    f.exponent, f.reference_exponent.value_or(NAN),
                                    std::string(f.within_tolerance ? "true" : "false"),
                                    f.r_squared, f.stderr_exponent}));
      out.summary.push_back(regime + " " + scaling::to_string(cols[c]) + ": " +
                            format_number(f.exponent) + " (reference " +
                            format_number(f.reference_exponent.value_or(NAN)) + ")");
    }
  };
  add("critical", rep.critical);
  add("time_crystal", rep.time_crystal);
  return out;
}

CommandResult cmd_verify(const Resolved& r) {
  const auto trunc = r.params.numerics().truncation.value_or(exactstate::auto_truncation(r.params));
  const auto closed = exactstate::photon_distribution(r.params, trunc);
  const auto oracle = liouville::steady_state_oracle(r.params, trunc);
  CommandResult out;
  out.table.columns = {"n", "p_closed", "p_oracle", "abs_diff"};
  double worst = 0.0;
  for (std::size_t n = 0; n < trunc; ++n) {
    const double d = std::abs(closed.probabilities[n] - oracle.probabilities[n]);
    worst = std::max(worst, d);
    out.table.rows.push_back(row({static_cast<double>(n), closed.probabilities[n],
                                  oracle.probabilities[n], d}));
  }
  const double tol = r.number("tolerance");
  out.summary = {kv("max_abs_diff", worst), kv("tolerance", tol),
                 kv("truncation", static_cast<double>(trunc)),
                 std::string("status = ") + (worst < tol ? "PASS" : "FAIL")};
  out.exit_code = worst < tol ? kExitOk : kExitComputation;
  return out;
}

CommandResult cmd_driven(const Resolved& r) {
  const exactstate::DrivenBranchParams drive(
      r.number("delta"), {r.number("epsilon_re"), r.number("epsilon_im")});
  exactstate::GridSpec grid;
  grid.points = non_negative(r.integer("points"), "points");
  grid.half_width = r.optional_number("half_width");
  const auto w = exactstate::driven_branch_wigner_grid(r.params, drive, grid);
  CommandResult out;
  out.table = wigner_table(w);
  const double w0 = exactstate::driven_branch_wigner(r.params, drive, {0.0, 0.0});
  out.summary = {kv("integral", w.integral()), kv("W0", w0)};
  const auto oracle_trunc = non_negative(r.integer("oracle_trunc"), "oracle_trunc");
  if (oracle_trunc > 0) {
    const auto rho = liouville::dense_steady_state(r.params, oracle_trunc, drive);
    const double wo = liouville::wigner_at_origin(rho);
    out.summary.push_back(kv("W0_oracle", wo));
    out.summary.push_back(kv("W0_abs_diff", std::abs(wo - w0)));
  }
  return out;
}

using Handler = std::function<CommandResult(const Resolved&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"steady", cmd_steady},   {"wigner", cmd_wigner}, {"spectrum", cmd_spectrum},
      {"metrology", cmd_metrology}, {"scan", cmd_scan}, {"gapmin", cmd_gapmin},   {"fit", cmd_fit},
      {"table1", cmd_table1},   {"verify", cmd_verify}, {"driven", cmd_driven}};
  return h;
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  return std::get<std::string>(c);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string s;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) s += ',';
    s += table.columns[i];
  }
  s += '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      if (const auto* d = std::get_if<double>(&r[i])) {
        s += format_number(*d);
      } else {
        s += std::get<std::string>(r[i]);
      }
    }
    s += '\n';
  }
  return s;
}

std::string to_json(const ResultEnvelope& env) {
  json j;
  j["config"] = env.config_json.empty() ? json::object() : json::parse(env.config_json);
  j["version"] = env.version;
  j["timings"] = json::object();
  for (const auto& [k, v] : env.timings) j["timings"][k] = v;
  j["rows"] = json::array();
  for (const auto& r : env.payload.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < r.size() && i < env.payload.columns.size(); ++i) {
      o[env.payload.columns[i]] = cell_json(r[i]);
    }
    j["rows"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

void emit(const ResultEnvelope& env, Format format, const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file '" + path + "' for writing");
  out << (format == Format::csv ? to_csv(env.payload) : to_json(env));
  out.close();
  if (!out) throw Error("failed writing output file '" + path + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  CLI::App app{"Steady state, spectra and metrology of the quantum van der Pol oscillator"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", QVDP_VERSION);

  // Raw flag text per command and key; only flags actually given are applied.
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, bool>> flags;
  std::map<std::string, std::string> config_path;
  std::map<std::string, std::string> output_path;
  std::map<std::string, std::string> format_text;
  std::map<std::string, std::map<std::string, CLI::Option*>> handles;

  for (const auto& cmd : command_specs()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    auto& store = raw[cmd.name];
    auto& h = handles[cmd.name];
    for (const auto& ps : param_specs()) {
      h["params." + ps.key] = sub->add_option(flag_name(ps.key), store["params." + ps.key], ps.help);
    }
    for (const auto& os : cmd.options) {
      if (os.kind == Kind::flag) {
        h["options." + os.key] = sub->add_flag(flag_name(os.key), flags[cmd.name][os.key], os.help);
      } else {
        h["options." + os.key] = sub->add_option(flag_name(os.key), store["options." + os.key], os.help);
      }
    }
    h["config"] = sub->add_option("--config", config_path[cmd.name],
                                  "JSON config file (or a previous JSON result file)");
    h["output"] = sub->add_option("--output,-o", output_path[cmd.name],
                                  std::string("output file (default: $") + kOutputDirEnv +
                                      "/<command>.<format>)");
    h["format"] = sub->add_option("--format", format_text[cmd.name], "csv or json");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto* sub = app.get_subcommands().front();
  const auto& cmd = find_command(sub->get_name());
  auto& h = handles[cmd.name];

  Resolved res{json{}, SystemParams(1.0, 1.0), Format::csv, ""};
  try {
    json resolved = defaults_for(cmd);
    if (h["config"]->count() > 0) merge_config_file(resolved, cmd, config_path[cmd.name]);
    for (const auto& ps : param_specs()) {
      if (h["params." + ps.key]->count() > 0) {
        resolved["params"][ps.key] = from_flag(ps, raw[cmd.name]["params." + ps.key]);
      }
    }
    for (const auto& os : cmd.options) {
      if (h["options." + os.key]->count() > 0) {
        resolved["options"][os.key] =
            os.kind == Kind::flag ? json(flags[cmd.name][os.key])
                                  : from_flag(os, raw[cmd.name]["options." + os.key]);
      }
    }
    if (h["format"]->count() > 0) resolved["format"] = format_text[cmd.name];
    if (h["output"]->count() > 0) resolved["output"] = output_path[cmd.name];
    res.format = parse_format(resolved["format"].get<std::string>());
    if (resolved["output"].get<std::string>().empty()) {
      resolved["output"] = default_output(cmd.name, res.format);
    }
    res.params = build_params(resolved["params"]);
    res.output = resolved["output"].get<std::string>();
    res.config = std::move(resolved);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto t1 = clock::now();

  CommandResult result;
  try {
    result = handlers().at(cmd.name)(res);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  const auto t2 = clock::now();

  ResultEnvelope env;
  env.config_json = res.config.dump();
  env.version = QVDP_VERSION;
  env.timings["resolve_s"] = std::chrono::duration<double>(t1 - t0).count();
  env.timings["compute_s"] = std::chrono::duration<double>(t2 - t1).count();
  env.payload = std::move(result.table);
  try {
    emit(env, res.format, res.output);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }

  out << cmd.name << ": " << res.output << "\n";
  for (const auto& line : result.summary) out << "  " << line << "\n";
  return result.exit_code;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace qvdp::cli
