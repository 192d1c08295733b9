#include "cli.hpp"

#include "g2lab/chernsimons.hpp"
#include "g2lab/form_json.hpp"
#include "g2lab/identities.hpp"
#include "g2lab/lattice.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace g2lab::cli {

namespace {

// ---------------------------------------------------------------- JSON helpers

json read_json_file(const std::string &path, const std::string &what) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + what + " '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw std::invalid_argument(what + " '" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot open '" + path + "' for writing");
  f << text;
}

std::string dump(const json &j) { return j.dump(2, ' ', false, json::error_handler_t::replace); }

template <class S> json scalar_json(const S &x) {
  if constexpr (ScalarTraits<S>::exact)
    return x.str();
  else
    return x;
}

template <class S> json matrix_json(const Matrix<S> &m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(scalar_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

template <class S> json vector_json(const std::vector<S> &v) {
  json a = json::array();
  for (auto &x : v) a.push_back(scalar_json(x));
  return a;
}

template <class S> S scalar_from_json(const json &j, const std::string &where) {
  Rational r;
  if (j.is_string())
    r = parse_exact(j.get<std::string>());
  else if (j.is_number_integer())
    r = Rational(j.get<long long>());
  else if (j.is_number_float()) {
    if constexpr (!ScalarTraits<S>::exact) return j.get<double>();
    r = parse_exact(j.dump());
  } else
    throw std::invalid_argument(where + ": entries must be numbers or rational strings");
  if constexpr (ScalarTraits<S>::exact)
    return r;
  else
    return r.template convert_to<double>();
}

template <class S> Matrix<S> matrix_from_json(const json &j, int rows, int cols, const std::string &name) {
  const std::string shape = name + " must be a " + std::to_string(rows) + "x" + std::to_string(cols) + " array of rows";
  if (!j.is_array() || int(j.size()) != rows) throw std::invalid_argument(shape);
  Matrix<S> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || int(j[i].size()) != cols) throw std::invalid_argument(shape);
    for (int k = 0; k < cols; ++k) m(i, k) = scalar_from_json<S>(j[i][k], name);
  }
  return m;
}

// ---------------------------------------------------------------- structures

/// Keys eta (4x4), L (3x3, rows are fiber lattice vectors) and alpha (3x4); all optional.
template <class S> FibrationSpec<S> load_spec(const std::string &path) {
  FibrationSpec<S> spec;
  if (path.empty()) return spec;
  json j = read_json_file(path, "spec file");
  if (!j.is_object()) throw std::invalid_argument("spec file must hold a JSON object");
  for (auto &[k, v] : j.items()) {
    if (k == "eta")
      spec.eta = matrix_from_json<S>(v, 4, 4, "eta");
    else if (k == "L")
      spec.L = matrix_from_json<S>(v, 3, 3, "L");
    else if (k == "alpha")
      spec.alpha = matrix_from_json<S>(v, 3, 4, "alpha");
    else
      throw std::invalid_argument("unknown key '" + k + "' in spec file (expected eta, L, alpha)");
  }
  spec.validate();
  return spec;
}

template <class S> double max_abs_of(const ConstForm<S> &f) { return f.is_zero() ? 0.0 : f.max_abs(); }

/// How far the lattice-coordinate 3-form deviates from φ0; all lattice
/// quantities are evaluated with φ0 itself.
template <class S> double lattice_phi_deviation(const TorusFibration<S> &fib) {
  return max_abs_of(fib.to_lattice(fib.phi) - standard_phi<S>());
}

const G2Structure<double> &lattice_structure() {
  static const G2Structure<double> s = eigen_split(standard_phi<double>());
  return s;
}

json identities_json(Mode mode) {
  auto checks = mode == Mode::Exact ? identity_suite<Rational>() : identity_suite<double>();
  json list = json::array();
  bool all = true;
  for (auto &c : checks) {
    list.push_back({{"name", c.name}, {"mode", to_string(mode)}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    all = all && c.pass;
  }
  return {{"command", "identities"}, {"mode", to_string(mode)}, {"identities", list}, {"all_pass", all}};
}

template <class S> json fibration_json(const std::string &spec_path, Mode mode) {
  auto spec = load_spec<S>(spec_path);
  auto fib = build_fibration(spec);
  const bool product = fib.riemannian_product();
  return {{"command", "fibration"},
          {"mode", to_string(mode)},
          {"spec", {{"eta", matrix_json(spec.eta)}, {"L", matrix_json(spec.L)}, {"alpha", matrix_json(spec.alpha)}}},
          {"generators", matrix_json(fib.generators)},
          {"phi", form_to_json(fib.phi)},
          {"star_phi", form_to_json(fib.g2.star_phi)},
          {"metric", matrix_json(fib.g2.metric.matrix())},
          {"lambda7", scalar_json(fib.g2.lambda7)},
          {"lambda14", scalar_json(fib.g2.lambda14)},
          {"orthonormality_residual", fib.orthonormality_residual()},
          {"fiber_phi", form_to_json(fib.fiber_restriction())},
          {"riemannian_product", product},
          {"diagnosis", product ? "product" : "non-product"},
          {"lattice_phi_deviation", lattice_phi_deviation(fib)}};
}

template <class S> json split_json(const DeformationSplit<S> &d) {
  static const char *names[5] = {"I", "II", "III_pp", "III_mp", "IV"};
  json blocks = {{"I", scalar_json(d.c_I)},
                 {"II", matrix_json(d.c_II)},
                 {"III_pp", matrix_json(d.c_III_pp)},
                 {"III_mp", matrix_json(d.c_III_mp)},
                 {"IV", vector_json(d.c_IV)}};
  auto n = d.block_norms_sq();
  json norms_sq = json::object(), norms = json::object();
  int dominant = -1;
  double best = 0;
  for (int i = 0; i < 5; ++i) {
    double v = to_double(n[i]);
    norms_sq[names[i]] = scalar_json(n[i]);
    norms[names[i]] = std::sqrt(v);
    if (v > best) {
      best = v;
      dominant = i;
    }
  }
  return {{"blocks", blocks}, {"norms_sq", norms_sq}, {"norms", norms}, {"dominant_type", dominant < 0 ? json(nullptr) : json(names[dominant])}};
}

template <class S> ConstForm<S> load_xi(const std::string &path) {
  json j = read_json_file(path, "xi file");
  ConstForm<S> xi;
  if constexpr (ScalarTraits<S>::exact)
    xi = exact_form_from_json(j);
  else
    xi = double_form_from_json(j);
  if (xi.dim() != 7 || xi.degree() != 4) throw std::invalid_argument("xi must be a 4-form on R^7 (dim 7, degree 4)");
  return xi;
}

template <class S> json deform_json(const ConstForm<S> &xi, Mode mode) {
  auto d = decompose_deformation(xi);
  json j = split_json(d);
  j["command"] = "deform";
  j["mode"] = to_string(mode);
  j["xi"] = form_to_json(xi);
  j["reassembly_residual"] = max_abs_of(d.reassemble() - xi);
  return j;
}

// ---------------------------------------------------------------- lattices

std::vector<int> parse_grid(const std::string &s, size_t n, const std::string &what) {
  std::vector<int> dims;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, 'x')) {
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size() || v < 2 || v > 4096)
      throw std::invalid_argument(what + " '" + s + "': extents must be integers in 2..4096 separated by 'x'");
    dims.push_back(v);
  }
  if (dims.size() != n) throw std::invalid_argument(what + " '" + s + "' must have " + std::to_string(n) + " extents");
  return dims;
}

LatticeGaugeField load_lattice(const std::string &path, int ndim, const std::string &what) {
  auto U = read_snapshot(path);
  if (U.ndim() != ndim)
    throw std::invalid_argument(what + " '" + path + "' holds a " + std::to_string(U.ndim()) + "-dimensional lattice, expected " +
                                std::to_string(ndim));
  return U;
}

struct FlowConfig {
  std::string lattice = "6x6x6x6", group = "su2", init = "auto";
  double tol = 1e-3, step_size = 0.05, rho = 0.3, noise = 0.05;
  int max_steps = 5000;
  std::uint64_t seed = 42;
};

struct FlowRun {
  CoolingResult result;
  json summary;
};

// Integer SD flux m12 = m34 = 1, charge -1.
FluxMatrix unit_sd_flux() {
  FluxMatrix m(4, std::vector<int>(4, 0));
  m[0][1] = m[2][3] = 1;
  m[1][0] = m[3][2] = -1;
  return m;
}

std::string history_csv(const std::vector<CoolingRecord> &h) {
  std::ostringstream o;
  o << std::setprecision(17) << "step,asd_fraction,charge,asd_energy,step_size\n";
  for (auto &r : h) o << r.step << ',' << r.asd_fraction << ',' << r.charge << ',' << r.asd_energy << ',' << r.step_size << '\n';
  return o.str();
}

json history_series(const std::vector<CoolingRecord> &h) {
  json step = json::array(), frac = json::array(), charge = json::array();
  for (auto &r : h) {
    step.push_back(r.step);
    frac.push_back(r.asd_fraction);
    charge.push_back(r.charge);
  }
  return {{"step", step}, {"asd_fraction", frac}, {"charge", charge}};
}

/// Seeds the field, cools it and summarizes. On divergence the partial history is
/// written to history_path (when given) before rethrowing.
FlowRun run_flow(const FlowConfig &c, const std::string &history_path) {
  auto dims = parse_grid(c.lattice, 4, "--lattice");
  GaugeGroup g = parse_group(c.group);
  std::string init = c.init == "auto" ? (g == GaugeGroup::SU2 ? "instanton" : "flux") : c.init;
  LatticeGaugeField U;
  if (init == "instanton") {
    if (g != GaugeGroup::SU2) throw std::invalid_argument("--init instanton needs --group su2");
    U = instanton_seed(dims, c.rho, -1);
  } else if (init == "flux") {
    if (g != GaugeGroup::U1) throw std::invalid_argument("--init flux needs --group u1");
    U = discretize_u1_flux(dims, unit_sd_flux());
  } else {
    U = LatticeGaugeField(dims, g);
  }
  SplitMix64 rng(c.seed);
  U = add_noise(U, c.noise, rng);

  CoolingOptions opts;
  opts.max_steps = c.max_steps;
  opts.step_size = c.step_size;
  opts.tol = c.tol;
  FlowRun r;
  try {
    r.result = cool_to_sd(U, opts);
  } catch (const CoolingDivergence &e) {
    if (!history_path.empty()) write_text(history_path, history_csv(e.history));
    throw;
  }
  const auto &h = r.result.history;
  auto en = lattice_energy_4d(r.result.field);
  r.summary = {{"lattice", dims},
               {"group", group_name(g)},
               {"init", init},
               {"seed", c.seed},
               {"noise", c.noise},
               {"tol", c.tol},
               {"max_steps", c.max_steps},
               {"steps", r.result.steps},
               {"converged", r.result.converged},
               {"initial", {{"asd_fraction", h.front().asd_fraction}, {"charge", h.front().charge}}},
               {"asd_fraction", h.back().asd_fraction},
               {"charge", en.q},
               {"energy", {{"total", en.total}, {"sd_part", en.sd_part}, {"asd_part", en.asd_part}}}};
  if (init == "instanton") r.summary["rho"] = c.rho;
  return r;
}

json residual_json(const LatticeGaugeField &U) {
  const auto &s = lattice_structure();
  auto r = lattice_instanton_residual(U, s);
  auto e = lattice_energy_7d(U, s);
  return {{"r_a", r.r_a},
          {"r_b", r.r_b},
          {"f7_norm", r.f7_norm},
          {"energy", {{"F7sq", e.F7sq}, {"F14sq", e.F14sq}, {"ym", e.ym}, {"kappa_integral", e.kappa_integral}}},
          {"base_charge", lattice_base_charge(U)}};
}

Lie random_algebra_element(int rank, SplitMix64 &rng) {
  if (rank == 1) return u1_element(rng.normal());
  Lie x = lie_zero(2);
  for (int a = 1; a <= 3; ++a) x += rng.normal() * su2_generator(a);
  return x;
}

// Two random Fourier modes with |m|∞ ≤ 1 filling every component of a 7D 1-form.
FourierField probe_offset(int rank, SplitMix64 &rng) {
  FourierField o(7, 1, rank);
  for (int t = 0; t < 2; ++t) {
    Frequency m{};
    for (int i = 0; i < 7; ++i) m[i] = rng.integer(-1, 1);
    for (auto &idx : basis(7, 1)) o.add_real(m, idx, random_algebra_element(rank, rng) + cplx(0, 1) * random_algebra_element(rank, rng));
  }
  return o;
}

json cs_json(const LatticeGaugeField &U, int probes, double h, std::uint64_t seed) {
  const auto &s = lattice_structure();
  SplitMix64 rng(seed);
  json values = json::array();
  std::vector<double> lo(7, INFINITY), hi(7, -INFINITY);
  for (int p = 0; p < probes; ++p) {
    auto r = lattice_rho_translations(perturb_links(U, probe_offset(U.rank(), rng), h), s);
    for (int i = 0; i < 7; ++i) {
      lo[i] = std::min(lo[i], r[i]);
      hi[i] = std::max(hi[i], r[i]);
    }
    values.push_back(r);
  }
  std::vector<double> spread(7, 0.0);
  double max_spread = 0;
  if (probes > 0)
    for (int i = 0; i < 7; ++i) {
      spread[i] = hi[i] - lo[i];
      max_spread = std::max(max_spread, spread[i]);
    }
  return {{"rho_translation", lattice_rho_translations(U, s)},
          {"base_charge", lattice_base_charge(U)},
          {"probe_offsets", probes},
          {"probe_h", h},
          {"probe_seed", seed},
          {"probe_values", values},
          {"spread", spread},
          {"max_spread", max_spread}};
}

// ξ = -2 e1∧e567: pure type IV with ε(e1) = 1.
Form default_xi() { return Form::basis_form(7, {1, 5, 6, 7}, -2.0); }

json obstruct_json(const ObstructionReport &r) {
  json j = split_json(r.split);
  j["xi"] = form_to_json(r.xi);
  j["v"] = r.v;
  j["epsilon"] = r.epsilon;
  j["rho_value"] = r.rho_value;
  j["r_phi_value"] = r.r_phi_value;
  j["n_phi_value"] = r.n_phi_value;
  j["q"] = r.q;
  j["tolerance"] = r.tolerance;
  j["verdict"] = verdict_name(r.verdict);
  return j;
}

// ---------------------------------------------------------------- report

struct ReportConfig {
  std::string mode = "exact", spec, xi, tgrid = "2x2x2", out = "report.json", csv;
  FlowConfig flow;
  int probes = 3;
  double h = 0.1;
};

std::string fmt(double x) {
  std::ostringstream o;
  o << std::setprecision(6) << x;
  return o.str();
}

std::string table(const json &r) {
  std::vector<std::array<std::string, 3>> rows;
  auto add = [&](std::string a, std::string b, std::string c) { rows.push_back({std::move(a), std::move(b), std::move(c)}); };
  int passed = 0, total = 0;
  for (auto &c : r["identities"]["identities"]) {
    ++total;
    passed += c["pass"].get<bool>();
  }
  add("identities", "passed (" + r["identities"]["mode"].get<std::string>() + ")", std::to_string(passed) + "/" + std::to_string(total));
  add("fibration", "diagnosis", r["fibration"]["diagnosis"].get<std::string>());
  add("fibration", "orthonormality residual", fmt(r["fibration"]["orthonormality_residual"].get<double>()));
  add("deform", "dominant type", r["deform"]["dominant_type"].is_null() ? "none" : r["deform"]["dominant_type"].get<std::string>());
  const auto &f = r["flow"];
  add("flow", "steps", std::to_string(f["steps"].get<int>()) + (f["converged"].get<bool>() ? " (converged)" : " (not converged)"));
  add("flow", "asd fraction", fmt(f["asd_fraction"].get<double>()));
  add("flow", "clover charge", fmt(f["charge"].get<double>()));
  add("residual", "|F ∧ ⋆φ|", fmt(r["residual"]["r_a"].get<double>()));
  add("residual", "|π7 F|", fmt(r["residual"]["f7_norm"].get<double>()));
  add("cs", "max spread of ρ(β_v)", fmt(r["cs"]["max_spread"].get<double>()));
  add("obstruct", "q", fmt(r["obstruct"]["q"].get<double>()));
  add("obstruct", "r_φ(β_v)", fmt(r["obstruct"]["r_phi_value"].get<double>()));
  add("obstruct", "verdict", r["obstruct"]["verdict"].get<std::string>());
  std::ostringstream o;
  o << std::left << std::setw(12) << "section" << std::setw(26) << "quantity" << "value\n";
  for (auto &row : rows) {
    // setw counts bytes, so pad multi-byte symbols by hand.
    std::string q = row[1];
    size_t chars = 0;
    for (unsigned char ch : q) chars += (ch & 0xc0) != 0x80;
    o << std::setw(12) << row[0] << q << std::string(chars < 26 ? 26 - chars : 1, ' ') << row[2] << '\n';
  }
  return o.str();
}

json report_json(const ReportConfig &c) {
  const Mode mode = c.mode == "exact" ? Mode::Exact : Mode::Double;
  json r;
  r["command"] = "report";
  r["seed"] = c.flow.seed;
  r["identities"] = identities_json(mode);
  r["fibration"] = mode == Mode::Exact ? fibration_json<Rational>(c.spec, mode) : fibration_json<double>(c.spec, mode);
  if (c.xi.empty())
    r["deform"] = deform_json(default_xi(), Mode::Double);
  else
    r["deform"] = mode == Mode::Exact ? deform_json(load_xi<Rational>(c.xi), mode) : deform_json(load_xi<double>(c.xi), mode);

  FlowRun flow = run_flow(c.flow, "");
  r["flow"] = flow.summary;
  r["flow"]["series"] = history_series(flow.result.history);
  if (!c.csv.empty()) write_text(c.csv, history_csv(flow.result.history));

  auto tdims = parse_grid(c.tgrid, 3, "--tgrid");
  auto U = lift_to_7d(flow.result.field, tdims);
  r["lift"] = {{"tgrid", tdims}, {"dims", U.dims()}, {"base_charge", clover_charge(flow.result.field)}};
  r["residual"] = residual_json(U);
  r["cs"] = cs_json(U, c.probes, c.h, c.flow.seed);
  Form xi = c.xi.empty() ? default_xi() : load_xi<double>(c.xi);
  r["obstruct"] = obstruct_json(lattice_obstruction_verdict(U, lattice_structure(), xi));
  r["period_formula"] = "ϑ(g·A) − ϑ(A) = ⟨[⋆φ], S_g⟩ for a gauge transformation g; the period set is documented, not computed";
  return r;
}

// ---------------------------------------------------------------- entry point

void emit_error(std::ostream &err, int code, const std::string &message) {
  json j = {{"error", {{"kind", code == 1 ? "validation" : "numerical"}, {"exit_code", code}, {"message", message}}}};
  err << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
}

int guarded(std::ostream &err, const std::function<int()> &body) {
  try {
    return body();
  } catch (const CoolingDivergence &e) {
    emit_error(err, 2, e.what());
  } catch (const std::invalid_argument &e) {
    emit_error(err, 1, e.what());
    return 1;
  } catch (const std::out_of_range &e) {
    emit_error(err, 1, e.what());
    return 1;
  } catch (const json::exception &e) {
    emit_error(err, 1, e.what());
    return 1;
  } catch (const std::exception &e) {
    emit_error(err, 2, e.what());
  }
  return 2;
}

Mode mode_of(const std::string &s) { return s == "exact" ? Mode::Exact : Mode::Double; }

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"G2 gauge theory on flat 7-tori: identities, fibrations, lattice cooling, lifting and "
               "Chern-Simons obstruction analysis.",
               "g2lab"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "TOML/INI file with option values; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);
  const auto modes = CLI::IsMember({"exact", "double"});
  std::map<CLI::App *, std::function<int()>> actions;

  std::string mode = "exact";
  auto *identities = app.add_subcommand("identities", "Verify the algebraic identities of the standard G2 structure");
  identities->add_option("--mode", mode, "exact (rational) or double arithmetic")->check(modes)->capture_default_str();
  actions[identities] = [&] {
    json j = identities_json(mode_of(mode));
    out << dump(j) << '\n';
    if (!j["all_pass"].get<bool>()) {
      emit_error(err, 2, "identity residuals exceed tolerance");
      return 2;
    }
    return 0;
  };

  std::string spec_path, fib_mode = "double";
  auto *fibration = app.add_subcommand("fibration", "Build the G2-torus fibration of a spec and diagnose it");
  fibration->add_option("--spec", spec_path, "JSON with eta (4x4), L (3x3), alpha (3x4); defaults to the flat product");
  fibration->add_option("--mode", fib_mode, "exact or double arithmetic")->check(modes)->capture_default_str();
  actions[fibration] = [&] {
    out << dump(fib_mode == "exact" ? fibration_json<Rational>(spec_path, Mode::Exact) : fibration_json<double>(spec_path, Mode::Double)) << '\n';
    return 0;
  };

  std::string xi_path, deform_mode = "double";
  auto *deform = app.add_subcommand("deform", "Split a constant 4-form deformation into types I-IV");
  deform->add_option("--xi", xi_path, "JSON 4-form on R^7 in lattice coordinates")->required();
  deform->add_option("--mode", deform_mode, "exact or double arithmetic")->check(modes)->capture_default_str();
  actions[deform] = [&] {
    if (deform_mode == "exact")
      out << dump(deform_json(load_xi<Rational>(xi_path), Mode::Exact)) << '\n';
    else
      out << dump(deform_json(load_xi<double>(xi_path), Mode::Double)) << '\n';
    return 0;
  };

  FlowConfig flow_cfg;
  std::string flow_out, flow_history;
  auto *flow = app.add_subcommand("flow", "Cool a seeded 4D lattice field towards self-duality");
  auto add_flow_options = [&](CLI::App *sc, FlowConfig &c) {
    sc->add_option("--lattice", c.lattice, "4D extents, e.g. 8x8x8x8")->capture_default_str();
    sc->add_option("--group", c.group, "gauge group")->check(CLI::IsMember({"u1", "su2"}))->capture_default_str();
    sc->add_option("--init", c.init, "initial data: instanton (su2), flux (u1), random; auto picks by group")
        ->check(CLI::IsMember({"auto", "instanton", "flux", "random"}))
        ->capture_default_str();
    sc->add_option("--rho", c.rho, "instanton scale in torus units")->check(CLI::PositiveNumber)->capture_default_str();
    sc->add_option("--noise", c.noise, "amplitude of the seeded link noise")->check(CLI::NonNegativeNumber)->capture_default_str();
    sc->add_option("--tol", c.tol, "stop once the ASD fraction drops below this")->check(CLI::PositiveNumber)->capture_default_str();
    sc->add_option("--step-size", c.step_size, "initial descent step")->check(CLI::PositiveNumber)->capture_default_str();
    sc->add_option("--max-steps", c.max_steps, "cooling step limit")->check(CLI::PositiveNumber)->capture_default_str();
    sc->add_option("--seed", c.seed, "SplitMix64 seed")->capture_default_str();
  };
  add_flow_options(flow, flow_cfg);
  flow->add_option("--out", flow_out, "output snapshot path")->required();
  flow->add_option("--history", flow_history, "CSV history path (default: <out>.history.csv)");
  actions[flow] = [&] {
    const std::string history = flow_history.empty() ? flow_out + ".history.csv" : flow_history;
    FlowRun r = run_flow(flow_cfg, history);
    write_snapshot(flow_out, r.result.field, {{"generator", "g2lab flow"}, {"flow", r.summary}});
    write_text(history, history_csv(r.result.history));
    json j = r.summary;
    j["command"] = "flow";
    j["out"] = flow_out;
    j["manifest"] = flow_out + ".json";
    j["history_csv"] = history;
    out << dump(j) << '\n';
    if (!r.result.converged) {
      emit_error(err, 2, "cooling did not reach --tol within --max-steps");
      return 2;
    }
    return 0;
  };

  std::string lift_in, lift_spec, lift_out, tgrid = "4x4x4";
  auto *lift = app.add_subcommand("lift", "Pull a 4D lattice field back to the 7-torus");
  lift->add_option("--in", lift_in, "4D snapshot")->required();
  lift->add_option("--spec", lift_spec, "fibration spec JSON (validated and recorded)");
  lift->add_option("--tgrid", tgrid, "fiber extents, e.g. 4x4x4")->capture_default_str();
  lift->add_option("--out", lift_out, "output 7D snapshot path")->required();
  actions[lift] = [&] {
    auto fib = build_fibration(load_spec<double>(lift_spec));
    auto base = load_lattice(lift_in, 4, "--in");
    auto tdims = parse_grid(tgrid, 3, "--tgrid");
    auto U = lift_to_7d(base, tdims);
    write_snapshot(lift_out, U, {{"generator", "g2lab lift"}, {"source", lift_in}, {"tgrid", tdims}});
    out << dump({{"command", "lift"},
                 {"in", lift_in},
                 {"out", lift_out},
                 {"dims", U.dims()},
                 {"group", group_name(U.group())},
                 {"tgrid", tdims},
                 {"base_charge", clover_charge(base)},
                 {"lattice_phi_deviation", lattice_phi_deviation(fib)}})
        << '\n';
    return 0;
  };

  std::string res_in, res_spec;
  auto *residual = app.add_subcommand("residual", "G2-instanton residuals and energy split of a 7D lattice field");
  residual->add_option("--in", res_in, "7D snapshot")->required();
  residual->add_option("--spec", res_spec, "fibration spec JSON");
  actions[residual] = [&] {
    auto fib = build_fibration(load_spec<double>(res_spec));
    json j = residual_json(load_lattice(res_in, 7, "--in"));
    j["command"] = "residual";
    j["lattice_phi_deviation"] = lattice_phi_deviation(fib);
    out << dump(j) << '\n';
    return 0;
  };

  std::string cs_field, cs_spec;
  int cs_probes = 5;
  double cs_h = 0.1;
  std::uint64_t cs_seed = 42;
  auto *cs = app.add_subcommand("cs", "Chern-Simons 1-form on translation tangents and its probe spread");
  cs->add_option("--field", cs_field, "7D snapshot")->required();
  cs->add_option("--spec", cs_spec, "fibration spec JSON");
  cs->add_option("--probe-offsets", cs_probes, "number of smooth random probe offsets")->check(CLI::NonNegativeNumber)->capture_default_str();
  cs->add_option("--probe-h", cs_h, "probe offset magnitude")->check(CLI::NonNegativeNumber)->capture_default_str();
  cs->add_option("--seed", cs_seed, "SplitMix64 seed for the probes")->capture_default_str();
  actions[cs] = [&] {
    auto fib = build_fibration(load_spec<double>(cs_spec));
    json j = cs_json(load_lattice(cs_field, 7, "--field"), cs_probes, cs_h, cs_seed);
    j["command"] = "cs";
    j["lattice_phi_deviation"] = lattice_phi_deviation(fib);
    out << dump(j) << '\n';
    return 0;
  };

  std::string ob_field, ob_xi, ob_spec;
  double ob_tol = 1e-10;
  auto *obstruct = app.add_subcommand("obstruct", "Deformation obstruction verdict for a 7D lattice field");
  obstruct->add_option("--field", ob_field, "7D snapshot (default: the flat trivial U(1) bundle on 2^7)");
  obstruct->add_option("--xi", ob_xi, "JSON 4-form ξ (default: -2 e1∧e567)");
  obstruct->add_option("--spec", ob_spec, "fibration spec JSON");
  obstruct->add_option("--tol", ob_tol, "quadrature tolerance; obstructed when |r_φ| > 10·tol")->check(CLI::PositiveNumber)->capture_default_str();
  actions[obstruct] = [&] {
    build_fibration(load_spec<double>(ob_spec));
    LatticeGaugeField U = ob_field.empty() ? LatticeGaugeField(std::vector<int>(7, 2), GaugeGroup::U1) : load_lattice(ob_field, 7, "--field");
    Form xi = ob_xi.empty() ? default_xi() : load_xi<double>(ob_xi);
    json j = obstruct_json(lattice_obstruction_verdict(U, lattice_structure(), xi, ob_tol));
    j["command"] = "obstruct";
    out << dump(j) << '\n';
    return 0;
  };

  ReportConfig rep;
  rep.flow.lattice = "4x4x4x4";
  rep.flow.group = "u1";
  auto *report = app.add_subcommand("report", "Run every module on one seeded configuration and bundle the results");
  report->add_option("--mode", rep.mode, "arithmetic for identities, fibration and deform")->check(modes)->capture_default_str();
  report->add_option("--spec", rep.spec, "fibration spec JSON");
  report->add_option("--xi", rep.xi, "JSON 4-form ξ (default: -2 e1∧e567)");
  add_flow_options(report, rep.flow);
  report->add_option("--tgrid", rep.tgrid, "fiber extents for the lift")->capture_default_str();
  report->add_option("--probe-offsets", rep.probes, "probe offsets for the cs block")->check(CLI::NonNegativeNumber)->capture_default_str();
  report->add_option("--out", rep.out, "report JSON path")->capture_default_str();
  report->add_option("--csv", rep.csv, "optional CSV path for the cooling series");
  actions[report] = [&] {
    json j = report_json(rep);
    write_text(rep.out, dump(j) + '\n');
    out << table(j);
    return 0;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    emit_error(err, 1, e.what());
    return 1;
  }
  for (auto &[sc, action] : actions)
    if (sc->parsed()) return guarded(err, action);
  emit_error(err, 1, "no subcommand given");
  return 1;
}

} // namespace g2lab::cli
