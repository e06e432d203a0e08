// Acceptance suite: one PASS/FAIL line per criterion.
//   tpmhd_acceptance [--criterion N ...] [--out DIR]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "forms.hpp"
#include "oracle.hpp"
#include "projections.hpp"

namespace tpmhd {
namespace {

namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [FAIL]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string in_range(double v, double lo, double hi) { return num(v) + " in [" + num(lo) + ", " + num(hi) + "]"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Config config_of(const std::string& text, const fs::path& out) {
  Config c = parse_config_text(text);
  c.output_dir = out;
  return c;
}

std::size_t norm_index(const char* name) {
  const auto& names = ErrorReport::names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (std::string(names[k]) == name) return k;
  }
  throw InvalidArgument(name);
}

struct RateBound {
  const char* norm;
  double lo, hi;
};

Outcome convergence(const std::string& text, const fs::path& out, std::initializer_list<RateBound> bounds) {
  const ConvergeOutput r = cmd_converge(config_of(text, out));
  Outcome o;
  const RateRow& last = r.table.back();
  for (const RateBound& b : bounds) {
    const double rate = *last.rates[norm_index(b.norm)];
    o.check(rate >= b.lo && rate <= b.hi,
            std::string(b.norm) + " " + (std::isinf(b.hi) ? num(rate) + " >= " + num(b.lo) : in_range(rate, b.lo, b.hi)));
  }
  return o;
}

Outcome criterion1(const fs::path& out) {
  return convergence("experiment = converge\ncase = I\nn_list = 8,16,32\nT_final = 1\n", out / "c1",
                     {{"l2_phi", 1.75, 2.25}, {"h1semi_phi", 0.85, 1.35}, {"l2_u", 1.8, 2.2},
                      {"h1semi_u", 0.85, 1.15}, {"l2_B", 1.75, 2.2}, {"h1semi_B", 0.85, 1.15}});
}

Outcome criterion2(const fs::path& out) {
  const double inf = std::numeric_limits<double>::infinity();
  return convergence("experiment = converge\ncase = II\nn_list = 4,8,16\nT_final = 1\n", out / "c2",
                     {{"l2_u", 2.0, inf}, {"h1semi_u", 1.8, 2.2}, {"l2_B", 2.0, inf}, {"h1semi_B", 1.8, 2.2}});
}

double mass_drift(const RunOutput& r) {
  double drift = 0.0;
  for (const SeriesRow& row : r.series) drift = std::max(drift, std::abs(row.mass - r.series.front().mass));
  return drift;
}

Outcome criterion3(const fs::path& out) {
  const RunOutput r =
      cmd_spinodal(config_of("experiment = spinodal\nn = 64\ndt = 1e-3\nT_final = 0.5\nseed = 2024\n", out / "c3"));
  Outcome o;
  o.check(r.series.size() == 501, std::to_string(r.series.size() - 1) + " steps");
  o.check(mass_drift(r) <= 1e-10, "max mass drift " + num(mass_drift(r)) + " <= 1e-10");
  return o;
}

Outcome criterion4(const fs::path& out) {
  Outcome o;
  for (const char* dt : {"1", "0.1", "0.01"}) {
    Config c = config_of("experiment = spinodal\nn = 32\nseed = 7\ndt = " + std::string(dt) + "\nT_final = 1\n",
                         out / ("c4_" + std::string(dt)));
    c.params.t_final = 20 * c.dt;
    const RunOutput r = cmd_spinodal(c);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < r.series.size(); ++k) {
      worst = std::max(worst, r.series[k].energy.energy - r.series[k - 1].energy.energy);
    }
    o.check(r.series.size() == 21 && worst <= 1e-9,
            "dt " + std::string(dt) + ": max increase " + num(worst) + " <= 1e-9, E " +
                num(r.series.front().energy.energy) + " -> " + num(r.series.back().energy.energy));
  }
  return o;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double max_diff(const CsrMatrix& a, const oracle::Dense& d) {
  const auto dense = a.to_dense();
  double worst = 0.0;
  for (std::size_t k = 0; k < dense.size(); ++k) worst = std::max(worst, std::abs(dense[k] - d.a[k]));
  return worst;
}

double transpose_gap(const CsrMatrix& a, const CsrMatrix& b) {
  const auto da = a.to_dense(), db = b.to_dense();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    for (std::size_t j = 0; j < a.n_cols(); ++j) {
      worst = std::max(worst, std::abs(da[i * a.n_cols() + j] - db[j * a.n_rows() + i]));
    }
  }
  return worst;
}

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Outcome criterion5(const fs::path&) {
  using oracle::basis_curl;
  using oracle::basis_div;
  using oracle::comp;
  using oracle::dense_form;
  using oracle::NodalBasis;
  const std::array<ElementFamily, 3> families = {ElementFamily::P1, ElementFamily::P2, ElementFamily::P1Bubble};
  const auto mesh_of = [](std::size_t n) { return std::make_shared<const Mesh>(Mesh::structured(n)); };
  Outcome o;

  double skew = 0.0;
  for (ElementFamily f : families) {
    const FeSpace s = make_space(mesh_of(4), f, 2);
    for (std::uint64_t k = 0; k < 100; ++k) {
      const CsrMatrix n = assemble_convection(s, random_vector(s.n_dofs(), 1000 + k)).matrix;
      const auto w = random_vector(s.n_dofs(), 2000 + k);
      skew = std::max(skew, std::abs(n.bilinear(w, w)) / (n.max_abs() * vdot(w, w)));
    }
  }
  o.check(skew <= 1e-12, "(a) convection w^T N w relative " + num(skew) + " <= 1e-12");

  double gap = 0.0;
  const auto m4 = mesh_of(4);
  const FeSpace sc = make_space(m4, ElementFamily::P1);
  for (ElementFamily vf : {ElementFamily::P2, ElementFamily::P1Bubble}) {
    const FeSpace vel = make_space(m4, vf, 2);
    const OperatorPair t = assemble_phase_transport(sc, vel, random_vector(sc.n_dofs(), 3));
    gap = std::max(gap, transpose_gap(t.forward.matrix, t.adjoint.matrix));
    for (ElementFamily mf : {ElementFamily::P1, ElementFamily::P2}) {
      const FeSpace mag = make_space(m4, mf, 2);
      const OperatorPair l = assemble_lorentz(mag, vel, random_vector(mag.n_dofs(), 4), 0.7);
      gap = std::max(gap, transpose_gap(l.forward.matrix, l.adjoint.matrix));
    }
  }
  o.check(gap <= 1e-13, "(b) adjoint pairs transpose gap " + num(gap) + " <= 1e-13");

  double worst = 0.0;
  for (std::size_t n : {1u, 2u}) {
    const auto m = mesh_of(n);
    for (ElementFamily f : families) {
      for (std::size_t comps : {1u, 2u}) {
        const FeSpace s = make_space(m, f, comps);
        worst = std::max(worst, max_diff(assemble_mass(s, 1.5).matrix,
                                          dense_form(s, s, [](std::size_t, const NodalBasis& a, std::size_t ra,
                                                              const NodalBasis& b, std::size_t cb, Point2 p) {
                                            return ra == cb ? 1.5 * a.value(p) * b.value(p) : 0.0;
                                          })));
        worst = std::max(worst, max_diff(assemble_stiffness(s, 0.7).matrix,
                                          dense_form(s, s, [](std::size_t, const NodalBasis& a, std::size_t ra,
                                                              const NodalBasis& b, std::size_t cb, Point2 p) {
                                            return ra == cb ? 0.7 * dot(a.grad(p), b.grad(p)) : 0.0;
                                          })));
      }
      const FeSpace v = make_space(m, f, 2);
      const FeSpace pre = make_space(m, ElementFamily::P1);
      worst = std::max(worst, max_diff(assemble_div_coupling(v, pre).matrix,
                                        dense_form(pre, v, [](std::size_t, const NodalBasis& q, std::size_t,
                                                              const NodalBasis& b, std::size_t cb, Point2 p) {
                                          return q.value(p) * basis_div(b, cb, p);
                                        })));
      const auto w = random_vector(v.n_dofs(), 11);
      worst = std::max(worst, max_diff(assemble_convection(v, w).matrix,
                                        dense_form(v, v, [&](std::size_t c, const NodalBasis& a, std::size_t ra,
                                                             const NodalBasis& b, std::size_t cb, Point2 p) {
                                          if (ra != cb) return 0.0;
                                          const Vec2 wv = {oracle::field_value(v, w, c, p, 0),
                                                           oracle::field_value(v, w, c, p, 1)};
                                          return 0.5 * (dot(wv, b.grad(p)) * a.value(p) - dot(wv, a.grad(p)) * b.value(p));
                                        })));
      if (f != ElementFamily::P1Bubble) {
        worst = std::max(worst, max_diff(assemble_curlcurl_divdiv(v, 1.3, 0.6).matrix,
                                          dense_form(v, v, [](std::size_t, const NodalBasis& a, std::size_t ra,
                                                              const NodalBasis& b, std::size_t cb, Point2 p) {
                                            return 1.3 * basis_curl(a, ra, p) * basis_curl(b, cb, p) +
                                                   0.6 * basis_div(a, ra, p) * basis_div(b, cb, p);
                                          })));
      }
    }
    const FeSpace s1 = make_space(m, ElementFamily::P1);
    const auto phi = random_vector(s1.n_dofs(), 21);
    const CubicTerm ct = cubic_term(s1, phi, random_vector(s1.n_dofs(), 22), 1.7);
    worst = std::max(worst, max_diff(ct.jacobian.matrix,
                                      dense_form(s1, s1, [&](std::size_t c, const NodalBasis& a, std::size_t,
                                                             const NodalBasis& b, std::size_t, Point2 p) {
                                        const double val = oracle::field_value(s1, phi, c, p);
                                        return 1.7 * 3.0 * val * val * a.value(p) * b.value(p);
                                      })));
    for (ElementFamily vf : {ElementFamily::P2, ElementFamily::P1Bubble}) {
      const FeSpace vel = make_space(m, vf, 2);
      const OperatorPair t = assemble_phase_transport(s1, vel, phi);
      worst = std::max(worst, max_diff(t.forward.matrix,
                                        dense_form(s1, vel, [&](std::size_t c, const NodalBasis& xi, std::size_t,
                                                                const NodalBasis& b, std::size_t cb, Point2 p) {
                                          return comp(oracle::field_grad(s1, phi, c, p), cb) * b.value(p) * xi.value(p);
                                        })));
      for (ElementFamily mf : {ElementFamily::P1, ElementFamily::P2}) {
        const FeSpace mag = make_space(m, mf, 2);
        const auto b = random_vector(mag.n_dofs(), 31);
        worst = std::max(worst, max_diff(assemble_lorentz(mag, vel, b, 0.8).forward.matrix,
                                          dense_form(vel, mag, [&](std::size_t c, const NodalBasis& v, std::size_t cv,
                                                                   const NodalBasis& z, std::size_t cz, Point2 p) {
                                            const double bx = oracle::field_value(mag, b, c, p, 0);
                                            const double by = oracle::field_value(mag, b, c, p, 1);
                                            const double cross = cv == 0 ? v.value(p) * by : -v.value(p) * bx;
                                            return 0.8 * basis_curl(z, cz, p) * cross;
                                          })));
      }
    }
  }
  o.check(worst <= 1e-12, "(c) operators vs dense oracle on 2- and 8-cell meshes " + num(worst) + " <= 1e-12");

  const FeSpace s = make_space(mesh_of(4), ElementFamily::P1);
  const auto phi = random_vector(s.n_dofs(), 61), prev = random_vector(s.n_dofs(), 62);
  const auto dir = random_vector(s.n_dofs(), 63);
  const double h = 1e-6;
  auto plus = phi, minus = phi;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    plus[i] += h * dir[i];
    minus[i] -= h * dir[i];
  }
  const auto rp = cubic_term(s, plus, prev).residual, rm = cubic_term(s, minus, prev).residual;
  const auto jd = cubic_term(s, phi, prev).jacobian.matrix.multiply(dir);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double fd = (rp[i] - rm[i]) / (2 * h);
    err += (fd - jd[i]) * (fd - jd[i]);
    ref += jd[i] * jd[i];
  }
  o.check(std::sqrt(err / ref) <= 1e-5, "(d) cubic Jacobian vs finite differences " + num(std::sqrt(err / ref)) + " <= 1e-5");
  return o;
}

double cos2(double s) { return std::cos(kPi * s) * std::cos(kPi * s); }

Outcome criterion6(const fs::path&) {
  const auto mesh_of = [](std::size_t n) { return std::make_shared<const Mesh>(Mesh::structured(n)); };
  const ScalarFn phi = [](Point2 p) { return cos2(p.x) * cos2(p.y); };
  const GradientFn grad_phi = [](Point2 p) {
    return Vec2{-kPi * std::sin(2 * kPi * p.x) * cos2(p.y), -kPi * cos2(p.x) * std::sin(2 * kPi * p.y)};
  };
  const VectorFn b = [](Point2 p) {
    return Vec2{std::sin(kPi * p.x) * std::cos(kPi * p.y), -std::sin(kPi * p.y) * std::cos(kPi * p.x)};
  };
  const TensorFn grad_b = [](Point2 p) {
    const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
    const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
    return Mat2{kPi * cx * cy, -kPi * sx * sy, kPi * sx * sy, -kPi * cx * cy};
  };
  std::vector<double> l2, h1, mx;
  for (std::size_t n : {8u, 16u, 32u}) {
    const auto m = mesh_of(n);
    const FeSpace s = make_space(m, ElementFamily::P1);
    const auto r = ritz_projection(s, phi, grad_phi);
    l2.push_back(l2_error(s, r, phi));
    h1.push_back(h1semi_error(s, r, grad_phi));
    const FeSpace v = make_space(m, ElementFamily::P2, 2);
    mx.push_back(l2_error_vector(v, maxwell_projection(v, b, grad_b), b));
  }
  Outcome o;
  const double r_l2 = observed_rate(l2[1], l2[2], 1.0 / 16, 1.0 / 32);
  const double r_h1 = observed_rate(h1[1], h1[2], 1.0 / 16, 1.0 / 32);
  const double r_mx = observed_rate(mx[1], mx[2], 1.0 / 16, 1.0 / 32);
  o.check(std::abs(r_l2 - 2.0) <= 0.3, "Ritz L2 order " + in_range(r_l2, 1.7, 2.3));
  o.check(std::abs(r_h1 - 1.0) <= 0.3, "Ritz H1 order " + in_range(r_h1, 0.7, 1.3));
  o.check(std::abs(r_mx - 3.0) <= 0.4, "Maxwell P2 L2 order " + in_range(r_mx, 2.6, 3.4));

  // Projecting a member of the space, evaluated cellwise, returns its coefficients.
  const auto m = mesh_of(6);
  const auto locate = [&m](Point2 p, const std::function<double(std::size_t, const std::array<double, 3>&)>& f) {
    for (std::size_t c = 0; c < m->num_cells(); ++c) {
      const CellGeometry g = cell_geometry(*m, c);
      const Point2 d = p - g.origin;
      const double a = (g.jacobian.yy * d.x - g.jacobian.xy * d.y) / g.det;
      const double e = (-g.jacobian.yx * d.x + g.jacobian.xx * d.y) / g.det;
      if (a >= -1e-12 && e >= -1e-12 && a + e <= 1 + 1e-12) return f(c, {1 - a - e, a, e});
    }
    return 0.0;
  };
  double idem = 0.0;
  for (ElementFamily f : {ElementFamily::P1, ElementFamily::P2}) {
    const FeSpace s = make_space(m, f);
    const auto coeffs = random_vector(s.n_dofs(), 71);
    const auto proj = l2_projection(s, ScalarFn([&](Point2 p) {
      return locate(p, [&](std::size_t c, const auto& l) { return eval_scalar(s, coeffs, c, l); });
    }));
    for (std::size_t k = 0; k < coeffs.size(); ++k) idem = std::max(idem, std::abs(proj[k] - coeffs[k]));
  }
  const FeSpace vb = make_space(m, ElementFamily::P1Bubble, 2);
  const auto coeffs = random_vector(vb.n_dofs(), 72);
  const auto proj = l2_projection(vb, VectorFn([&](Point2 p) {
    return Vec2{locate(p, [&](std::size_t c, const auto& l) { return eval_vector(vb, coeffs, c, l).x; }),
                locate(p, [&](std::size_t c, const auto& l) { return eval_vector(vb, coeffs, c, l).y; })};
  }));
  for (std::size_t k = 0; k < coeffs.size(); ++k) idem = std::max(idem, std::abs(proj[k] - coeffs[k]));
  o.check(idem <= 1e-11, "L2 projection idempotent " + num(idem) + " <= 1e-11");
  return o;
}

Outcome criterion7(const fs::path& out) {
  struct Case {
    const char* name;
    std::string text;
  };
  const std::vector<Case> cases = {
      {"converge_I", "experiment = converge\ncase = I\nn_list = 4,8\nT_final = 1/4\n"},
      {"converge_II", "experiment = converge\ncase = II\nn_list = 2,4\nT_final = 1/8\n"},
      {"spinodal", "experiment = spinodal\nn = 16\ndt = 1e-3\nT_final = 0.02\nseed = 11\ndump_every = 10\n"},
      {"kh", "experiment = kh\nn = 16\ndt = 1e-3\nT_final = 0.01\ndump_every = 5\n"},
  };
  Outcome o;
  for (const Case& c : cases) {
    std::vector<fs::path> files[2];
    for (int rep = 0; rep < 2; ++rep) {
      const Config cfg = config_of(c.text, out / "c7" / (std::string(c.name) + "_" + std::to_string(rep)));
      switch (cfg.experiment) {
        case Experiment::Converge: files[rep] = {cmd_converge(cfg).csv}; break;
        case Experiment::Spinodal:
        case Experiment::KelvinHelmholtz: {
          const RunOutput r = cfg.experiment == Experiment::Spinodal ? cmd_spinodal(cfg) : cmd_kh(cfg);
          files[rep] = r.dumps;
          files[rep].insert(files[rep].begin(), r.csv);
        }
      }
    }
    bool same = files[0].size() == files[1].size();
    for (std::size_t i = 0; same && i < files[0].size(); ++i) same = slurp(files[0][i]) == slurp(files[1][i]);
    o.check(same, std::string(c.name) + " " + std::to_string(files[0].size()) + " files identical");
  }
  return o;
}

Outcome criterion8(const fs::path& out) {
  const RunOutput r = cmd_kh(config_of(
      "experiment = kh\nkh_mode = single\nn = 64\ndt = 1e-3\nT_final = 0.5\ndump_every = 100\n", out / "c8"));
  Outcome o;
  int worst = 0;
  for (const SeriesRow& row : r.series) worst = std::max(worst, row.newton_iterations);
  o.check(r.series.size() == 501 && r.series.back().t >= 0.5 - 1e-12,
          "reached t = " + num(r.series.back().t) + " in " + std::to_string(r.series.size() - 1) + " steps");
  o.check(worst <= 8, "max Newton iterations " + std::to_string(worst) + " <= 8");
  o.check(mass_drift(r) <= 1e-9, "mass drift " + num(mass_drift(r)) + " <= 1e-9");
  bool dumps = r.dumps.size() == 6;
  for (const fs::path& d : r.dumps) dumps = dumps && fs::file_size(d) > 0;
  o.check(dumps, std::to_string(r.dumps.size()) + " field dumps");
  return o;
}

}  // namespace
}  // namespace tpmhd

int main(int argc, char** argv) {
  using namespace tpmhd;
  CLI::App app{"tpmhd acceptance suite"};
  std::vector<int> selected;
  std::string out = (fs::temp_directory_path() / "tpmhd_acceptance").string();
  app.add_option("--criterion", selected, "criteria to run (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--out", out, "scratch directory for experiment outputs");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::vector<std::pair<const char*, std::function<Outcome(const fs::path&)>>> criteria = {
      {"case I convergence rates", criterion1},
      {"case II convergence rates", criterion2},
      {"spinodal mass conservation", criterion3},
      {"unconditional energy decay", criterion4},
      {"algebraic identities", criterion5},
      {"projection orders", criterion6},
      {"determinism", criterion7},
      {"Kelvin-Helmholtz smoke run", criterion8},
  };
  int failures = 0;
  for (int id : selected) {
    const auto& [name, fn] = criteria[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn(fs::path(out));
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s (%s; %.1f s)\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
