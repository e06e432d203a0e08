#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <locale>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "scheme.hpp"

namespace tpmhd {

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Converge: return "converge";
    case Experiment::Spinodal: return "spinodal";
    case Experiment::KelvinHelmholtz: return "kh";
  }
  return "?";
}

const char* to_string(DtRule r) {
  switch (r) {
    case DtRule::H2: return "h2";
    case DtRule::H3: return "h3";
    case DtRule::Fixed: return "fixed";
  }
  return "?";
}

double Config::step_for(std::size_t n) const {
  const double h = 1.0 / static_cast<double>(n);
  switch (dt_rule) {
    case DtRule::H2: return h * h;
    case DtRule::H3: return h * h * h;
    case DtRule::Fixed: return dt;
  }
  return dt;
}

bool Config::operator==(const Config& o) const {
  const SchemeParams& a = params;
  const SchemeParams& b = o.params;
  return experiment == o.experiment && pairing == o.pairing && n_list == o.n_list && dt_rule == o.dt_rule &&
         dt == o.dt && kh_mode == o.kh_mode && a.gamma == b.gamma && a.mobility == b.mobility && a.nu == b.nu &&
         a.mu == b.mu && a.lambda == b.lambda && a.sigma == b.sigma && a.t_final == b.t_final &&
         a.newton_tol == b.newton_tol && a.newton_max == b.newton_max && a.lin_tol == b.lin_tol &&
         a.seed == b.seed && output_dir == o.output_dir && dump_every == o.dump_every;
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

struct Entry {
  std::string value;
  int line = 0;
};

const std::set<std::string, std::less<>> kKeys = {
    "experiment", "case",  "n",          "n_list",  "dt",       "dt_rule",  "T_final",
    "gamma",      "mobility", "nu",      "mu",      "lambda",   "sigma",    "seed",
    "kh_mode",    "newton_tol", "newton_max", "lin_tol", "output_dir", "dump_every"};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry, std::less<>> entries) : entries_(std::move(entries)) {}

  bool has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

  [[noreturn]] void fail(std::string_view key, const std::string& what) const {
    const auto it = entries_.find(key);
    const std::string where = it == entries_.end() ? "" : "line " + std::to_string(it->second.line) + ": ";
    throw ConfigError(where + std::string(key) + ": " + what);
  }

  const std::string& text(std::string_view key) const { return entries_.find(key)->second.value; }

  double real(std::string_view key) const {
    const std::string& v = text(key);
    const auto slash = v.find('/');
    if (slash == std::string::npos) return parse_real(key, v);
    const double den = parse_real(key, trim(std::string_view(v).substr(slash + 1)));
    if (den == 0.0) fail(key, "zero denominator");
    return parse_real(key, trim(std::string_view(v).substr(0, slash))) / den;
  }

  double positive(std::string_view key) const {
    const double v = real(key);
    if (!(v > 0.0) || !std::isfinite(v)) fail(key, "must be a positive number");
    return v;
  }

  std::uint64_t integer(std::string_view key, std::string_view v) const {
    std::uint64_t out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty()) {
      fail(key, "invalid integer '" + std::string(v) + "'");
    }
    return out;
  }
  std::uint64_t integer(std::string_view key) const { return integer(key, text(key)); }

  template <class T>
  T choice(std::string_view key, std::initializer_list<std::pair<const char*, T>> options) const {
    for (const auto& [name, value] : options) {
      if (text(key) == name) return value;
    }
    std::string names;
    for (const auto& o : options) names += (names.empty() ? "" : ", ") + std::string(o.first);
    fail(key, "expected one of " + names + ", got '" + text(key) + "'");
  }

 private:
  double parse_real(std::string_view key, std::string_view v) const {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty()) {
      fail(key, "invalid number '" + std::string(v) + "'");
    }
    return out;
  }

  std::map<std::string, Entry, std::less<>> entries_;
};

void set_physical_defaults(Config& c) {
  SchemeParams& p = c.params;
  if (c.experiment == Experiment::Spinodal) {
    p.gamma = 0.01;
    p.lambda = 0.01;
  } else if (c.experiment == Experiment::KelvinHelmholtz) {
    p.gamma = 0.01;
    p.mobility = 0.01;
    p.nu = 1e-3;
    p.lambda = 1e-4;
  }
}

}  // namespace

Config parse_config_text(std::string_view text) {
  std::map<std::string, Entry, std::less<>> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (!kKeys.contains(key)) throw ConfigError(where + "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + key + ": missing value");
    if (entries.contains(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    entries.emplace(key, Entry{value, line_no});
  }

  const Reader r(std::move(entries));
  // Syntax of every value first, so a malformed line is reported before anything missing.
  for (const char* key : {"dt", "T_final", "gamma", "mobility", "nu", "mu", "lambda", "sigma", "newton_tol", "lin_tol"}) {
    if (r.has(key)) r.real(key);
  }
  for (const char* key : {"n", "seed", "newton_max", "dump_every"}) {
    if (r.has(key)) r.integer(key);
  }
  const auto require = [&](const char* key) {
    if (!r.has(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  };

  Config c;
  require("experiment");
  c.experiment = r.choice<Experiment>("experiment", {{"converge", Experiment::Converge},
                                                     {"spinodal", Experiment::Spinodal},
                                                     {"kh", Experiment::KelvinHelmholtz}});
  set_physical_defaults(c);
  const bool converge = c.experiment == Experiment::Converge;

  require("T_final");
  c.params.t_final = r.positive("T_final");
  if (converge) require("case");
  if (r.has("case")) c.pairing = r.choice<Pairing>("case", {{"I", Pairing::I}, {"II", Pairing::II}});

  if (r.has("n") && r.has("n_list")) r.fail("n_list", "give either n or n_list");
  if (r.has("n_list")) {
    if (!converge) r.fail("n_list", "only converge runs take a list of meshes");
    std::string_view rest = r.text("n_list");
    while (true) {
      const auto comma = rest.find(',');
      c.n_list.push_back(r.integer("n_list", trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else {
    if (!r.has("n")) require(converge ? "n_list" : "n");
    c.n_list.push_back(r.integer("n"));
  }
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] == 0) r.fail(r.has("n") ? "n" : "n_list", "mesh sizes must be positive");
    if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) r.fail("n_list", "must be strictly increasing");
  }

  if (r.has("dt_rule")) {
    c.dt_rule = r.choice<DtRule>("dt_rule", {{"h2", DtRule::H2}, {"h3", DtRule::H3}, {"fixed", DtRule::Fixed}});
    if (c.dt_rule == DtRule::Fixed) require("dt");
    if (c.dt_rule != DtRule::Fixed && r.has("dt")) r.fail("dt", "conflicts with dt_rule");
  } else if (r.has("dt")) {
    c.dt_rule = DtRule::Fixed;
  } else if (converge) {
    c.dt_rule = c.pairing == Pairing::I ? DtRule::H2 : DtRule::H3;
  } else {
    require("dt");
  }
  if (r.has("dt")) c.dt = r.positive("dt");

  SchemeParams& p = c.params;
  for (const auto& [key, field] : {std::pair<const char*, double*>{"gamma", &p.gamma},
                                   {"mobility", &p.mobility},
                                   {"nu", &p.nu},
                                   {"mu", &p.mu},
                                   {"lambda", &p.lambda},
                                   {"sigma", &p.sigma},
                                   {"newton_tol", &p.newton_tol},
                                   {"lin_tol", &p.lin_tol}}) {
    if (r.has(key)) *field = r.positive(key);
  }
  if (r.has("newton_max")) {
    const std::uint64_t m = r.integer("newton_max");
    if (m < 1 || m > 10000) r.fail("newton_max", "must be between 1 and 10000");
    p.newton_max = static_cast<int>(m);
  }
  if (c.experiment == Experiment::Spinodal) require("seed");
  if (r.has("seed")) p.seed = r.integer("seed");
  if (r.has("kh_mode")) c.kh_mode = r.choice<KhMode>("kh_mode", {{"single", KhMode::Single}, {"double", KhMode::Double}});
  if (r.has("output_dir")) c.output_dir = r.text("output_dir");
  if (r.has("dump_every")) c.dump_every = r.integer("dump_every");

  for (std::size_t n : c.n_list) {
    if (std::llround(p.t_final / c.step_for(n)) < 1) {
      throw ConfigError("T_final is shorter than half a time step");
    }
  }
  return c;
}

Config parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config_text(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_config(const Config& c) {
  std::string out;
  const auto line = [&out](const char* key, const std::string& value) { out += std::string(key) + " = " + value + "\n"; };
  line("experiment", to_string(c.experiment));
  line("case", to_string(c.pairing));
  std::string ns;
  for (std::size_t n : c.n_list) ns += (ns.empty() ? "" : ",") + std::to_string(n);
  line(c.experiment == Experiment::Converge ? "n_list" : "n", ns);
  line("dt_rule", to_string(c.dt_rule));
  if (c.dt_rule == DtRule::Fixed) line("dt", format_number(c.dt));
  const SchemeParams& p = c.params;
  line("T_final", format_number(p.t_final));
  line("gamma", format_number(p.gamma));
  line("mobility", format_number(p.mobility));
  line("nu", format_number(p.nu));
  line("mu", format_number(p.mu));
  line("lambda", format_number(p.lambda));
  line("sigma", format_number(p.sigma));
  line("seed", std::to_string(p.seed));
  line("kh_mode", to_string(c.kh_mode));
  line("newton_tol", format_number(p.newton_tol));
  line("newton_max", std::to_string(p.newton_max));
  line("lin_tol", format_number(p.lin_tol));
  line("output_dir", c.output_dir.string());
  line("dump_every", std::to_string(c.dump_every));
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

void make_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

void write_vtk(const Mesh& mesh, std::span<const VtkField> fields, const std::filesystem::path& path) {
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::pair<std::size_t, std::size_t>> at(mesh.num_vertices(), {kNone, 0});
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    for (std::size_t i = 0; i < 3; ++i) {
      if (at[mesh.cell(c)[i]].first == kNone) at[mesh.cell(c)[i]] = {c, i};
    }
  }
  for (const VtkField& f : fields) {
    TPMHD_REQUIRE(f.space && &f.space->mesh() == &mesh, InvalidArgument, "field " + f.name + " is not on this mesh");
    TPMHD_REQUIRE(f.coeffs.size() == f.space->n_dofs(), InvalidArgument, "field " + f.name + " has the wrong length");
    TPMHD_REQUIRE(!f.name.empty() && f.name.find_first_of(" \t\n") == std::string::npos, InvalidArgument,
                  "VTK field names must be single words");
  }

  std::string out = "# vtk DataFile Version 3.0\ntpmhd fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(mesh.num_vertices()) + " double\n";
  for (Point2 p : mesh.vertices()) out += format_number(p.x) + " " + format_number(p.y) + " 0\n";
  out += "CELLS " + std::to_string(mesh.num_cells()) + " " + std::to_string(4 * mesh.num_cells()) + "\n";
  for (const Cell& c : mesh.cells()) {
    out += "3 " + std::to_string(c[0]) + " " + std::to_string(c[1]) + " " + std::to_string(c[2]) + "\n";
  }
  out += "CELL_TYPES " + std::to_string(mesh.num_cells()) + "\n";
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out += "5\n";
  if (!fields.empty()) out += "POINT_DATA " + std::to_string(mesh.num_vertices()) + "\n";
  for (const VtkField& f : fields) {
    const bool vector = f.space->components() == 2;
    out += vector ? "VECTORS " + f.name + " double\n" : "SCALARS " + f.name + " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      std::array<double, 3> bary{};
      bary[at[v].second] = 1.0;
      if (vector) {
        const Vec2 w = eval_vector(*f.space, f.coeffs, at[v].first, bary);
        out += format_number(w.x) + " " + format_number(w.y) + " 0\n";
      } else {
        out += format_number(eval_scalar(*f.space, f.coeffs, at[v].first, bary)) + "\n";
      }
    }
  }
  write_file(path, out);
}

std::vector<double> vorticity(const FeSpace& scalar, const FeSpace& velocity, std::span<const double> u) {
  TPMHD_REQUIRE(scalar.components() == 1 && velocity.components() == 2, InvalidArgument,
                "vorticity needs a scalar target and a vector velocity");
  TPMHD_REQUIRE(&scalar.mesh() == &velocity.mesh(), InvalidArgument, "spaces are on different meshes");
  TPMHD_REQUIRE(u.size() == velocity.n_dofs(), InvalidArgument, "velocity length mismatch");
  const QuadratureRule& rule = quadrature_rule(kAssemblyQuadratureDegree);
  const BasisTable table = tabulate(scalar.family(), rule);
  std::vector<double> rhs(scalar.n_dofs(), 0.0);
  for (std::size_t c = 0; c < scalar.mesh().num_cells(); ++c) {
    const double area = std::abs(cell_geometry(scalar.mesh(), c).det);
    const auto dofs = scalar.cell_dofs(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Mat2 g = eval_vector_gradient(velocity, u, c, rule.points[q]);
      const double w = rule.weights[q] * area * (g.yx - g.xy);
      for (std::size_t i = 0; i < dofs.size(); ++i) rhs[dofs[i]] += w * table.value(q, i);
    }
  }
  return solve_linear(assemble_mass(scalar).matrix, rhs);
}

std::string converge_csv_name(Pairing pairing) { return std::string("converge_case") + to_string(pairing) + ".csv"; }

namespace {

std::string converge_csv(std::span<const RateRow> table) {
  std::string out = "h,dt";
  for (const char* name : ErrorReport::names()) out += std::string(",") + name + "," + name + "_rate";
  out += "\n";
  for (const RateRow& r : table) {
    out += format_number(r.h) + "," + format_number(r.dt);
    for (std::size_t k = 0; k < ErrorReport::kCount; ++k) {
      out += "," + format_number(r.errors[k]) + ",";
      if (r.rates[k]) out += format_number(*r.rates[k]);
    }
    out += "\n";
  }
  return out;
}

void say(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

RunOutput run_series(const Config& cfg, const ProblemCase& pc, const SchemeParams& prm, const std::string& prefix,
                     bool dump_ends, const LogFn& log) {
  make_directory(cfg.output_dir);
  const std::size_t n = cfg.n_list.front();
  const ProblemSpaces s = make_problem_spaces(pc, n);
  const std::size_t steps = step_count(prm);

  RunOutput out;
  out.csv = cfg.output_dir / (prefix + ".csv");
  std::ofstream csv(out.csv, std::ios::binary | std::ios::trunc);
  if (!csv) throw IoError("cannot write " + out.csv.string());
  csv.imbue(std::locale::classic());
  csv << "step,time,energy_system,energy_algorithm,mass,diss_omega,diss_u,diss_curlB,diss_divB,newton_iters\n";

  const std::size_t report_every = std::max<std::size_t>(1, steps / 10);
  const auto emit = [&](const StateFields& x, std::size_t step, double t, int iterations) {
    SeriesRow row{step, t, energy(s, x, prm), total_mass(s.phase, x.phi), iterations};
    const EnergyReport& e = row.energy;
    csv << step << ',' << format_number(t) << ',' << format_number(e.energy) << ',' << format_number(e.energy) << ','
        << format_number(row.mass) << ',' << format_number(e.diss_omega) << ',' << format_number(e.diss_u) << ','
        << format_number(e.diss_curlB) << ',' << format_number(e.diss_divB) << ',' << iterations << '\n';
    csv.flush();
    if (!csv) throw IoError("cannot write " + out.csv.string());
    out.series.push_back(row);
    if ((cfg.dump_every > 0 && step % cfg.dump_every == 0) || (dump_ends && (step == 0 || step == steps))) {
      char name[32];
      std::snprintf(name, sizeof name, "_%06zu.vtk", step);
      const std::vector<double> w = vorticity(s.phase, s.velocity, x.u);
      const std::vector<VtkField> fields = {{"phi", &s.phase, x.phi},        {"u", &s.velocity, x.u},
                                            {"p", &s.pressure, x.p},         {"B", &s.magnetic, x.B},
                                            {"vorticity", &s.phase, w}};
      out.dumps.push_back(cfg.output_dir / (prefix + name));
      write_vtk(*s.mesh, fields, out.dumps.back());
    }
    if (step % report_every == 0 || step == steps) {
      say(log, prefix + " step " + std::to_string(step) + "/" + std::to_string(steps) + " t=" + format_number(t) +
                   " energy=" + format_number(e.energy) + " newton=" + std::to_string(iterations));
    }
  };

  emit(initialize(s, pc, prm), 0, 0.0, 0);
  run(s, pc, prm, [&](const StateFields& x, const StepInfo& info) {
    emit(x, info.step, info.t, info.report.newton_iterations);
  });
  return out;
}

}  // namespace

ConvergeOutput cmd_converge(const Config& cfg, const LogFn& log) {
  TPMHD_REQUIRE(cfg.experiment == Experiment::Converge, InvalidArgument, "not a converge config");
  make_directory(cfg.output_dir);
  ConvergeOutput out;
  out.csv = cfg.output_dir / converge_csv_name(cfg.pairing);
  write_file(out.csv, converge_csv(out.table));
  std::vector<RateInput> inputs;
  for (std::size_t n : cfg.n_list) {
    SchemeParams prm = cfg.params;
    prm.dt = cfg.step_for(n);
    const ProblemCase pc = manufactured_case(cfg.pairing, prm);
    const ProblemSpaces s = make_problem_spaces(pc, n);
    say(log, "case " + std::string(to_string(cfg.pairing)) + " n=" + std::to_string(n) + " dt=" + format_number(prm.dt) +
                 " steps=" + std::to_string(step_count(prm)));
    const StateFields x = run(s, pc, prm);
    inputs.push_back({1.0 / static_cast<double>(n), prm.dt, error_norms(s, x, *pc.exact, x.t)});
    out.table = rate_table(inputs);
    write_file(out.csv, converge_csv(out.table));
    say(log, "n=" + std::to_string(n) + " l2_phi=" + format_number(inputs.back().errors.l2_phi) +
                 " l2_u=" + format_number(inputs.back().errors.l2_u) + " l2_B=" + format_number(inputs.back().errors.l2_B));
  }
  return out;
}

RunOutput cmd_spinodal(const Config& cfg, const LogFn& log) {
  TPMHD_REQUIRE(cfg.experiment == Experiment::Spinodal, InvalidArgument, "not a spinodal config");
  SchemeParams prm = cfg.params;
  prm.dt = cfg.step_for(cfg.n_list.front());
  ProblemCase pc = spinodal_case(prm.seed);
  pc.pairing = cfg.pairing;
  return run_series(cfg, pc, prm, "spinodal", false, log);
}

RunOutput cmd_kh(const Config& cfg, const LogFn& log) {
  TPMHD_REQUIRE(cfg.experiment == Experiment::KelvinHelmholtz, InvalidArgument, "not a kh config");
  SchemeParams prm = cfg.params;
  prm.dt = cfg.step_for(cfg.n_list.front());
  ProblemCase pc = kelvin_helmholtz_case(cfg.kh_mode, prm);
  pc.pairing = cfg.pairing;
  return run_series(cfg, pc, prm, "kh", true, log);
}

}  // namespace tpmhd
