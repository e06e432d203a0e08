#include "forms.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace tpmhd {

void SchemeParams::validate() const {
  const auto positive = [](double v, const char* name) {
    TPMHD_REQUIRE(std::isfinite(v) && v > 0.0, InvalidArgument,
                  std::string("parameter ") + name + " must be positive");
  };
  positive(gamma, "gamma");
  positive(mobility, "mobility");
  positive(nu, "nu");
  positive(mu, "mu");
  positive(lambda, "lambda");
  positive(sigma, "sigma");
  positive(dt, "dt");
  positive(newton_tol, "newton_tol");
  positive(lin_tol, "lin_tol");
  TPMHD_REQUIRE(t_final >= dt * (1.0 - 1e-12), InvalidArgument, "T_final must be at least dt");
  TPMHD_REQUIRE(newton_max >= 1, InvalidArgument, "newton_max must be at least 1");
}

SpaceInfo describe(const FeSpace& space) {
  return {space.family(), space.components(), space.n_dofs()};
}

namespace {

const BasisTable& assembly_table(ElementFamily family) {
  static const std::array<BasisTable, 3> tables = {
      tabulate(ElementFamily::P1, quadrature_rule(kAssemblyQuadratureDegree)),
      tabulate(ElementFamily::P2, quadrature_rule(kAssemblyQuadratureDegree)),
      tabulate(ElementFamily::P1Bubble, quadrature_rule(kAssemblyQuadratureDegree)),
  };
  return tables[static_cast<std::size_t>(family)];
}

// Physical basis data of one space on one cell at the assembly quadrature points.
class CellValues {
 public:
  explicit CellValues(const FeSpace& space)
      : space_(space),
        table_(assembly_table(space.family())),
        rule_(quadrature_rule(kAssemblyQuadratureDegree)),
        grads_(table_.n_local * table_.n_points) {}

  void reinit(std::size_t cell) {
    cell_ = cell;
    geo_ = cell_geometry(space_.mesh(), cell);
    for (std::size_t k = 0; k < grads_.size(); ++k) grads_[k] = geo_.physical_gradient(table_.ref_grads[k]);
  }

  std::size_t n_local() const { return table_.n_local; }
  std::size_t n_points() const { return table_.n_points; }
  double jxw(std::size_t q) const { return rule_.weights[q] * std::abs(geo_.det); }
  double value(std::size_t q, std::size_t i) const { return table_.value(q, i); }
  Vec2 grad(std::size_t q, std::size_t i) const { return grads_[q * table_.n_local + i]; }
  Point2 point(std::size_t q) const { return geo_.map(rule_.points[q]); }
  std::size_t dof(std::size_t i, std::size_t comp = 0) const {
    return space_.global_dof(space_.cell_dofs(cell_)[i], comp);
  }

  double scalar_at(std::span<const double> c, std::size_t q) const {
    double v = 0.0;
    for (std::size_t i = 0; i < n_local(); ++i) v += c[dof(i)] * value(q, i);
    return v;
  }
  Vec2 scalar_grad_at(std::span<const double> c, std::size_t q) const {
    Vec2 g;
    for (std::size_t i = 0; i < n_local(); ++i) g = g + c[dof(i)] * grad(q, i);
    return g;
  }
  Vec2 vector_at(std::span<const double> c, std::size_t q) const {
    Vec2 v;
    for (std::size_t i = 0; i < n_local(); ++i) {
      v.x += c[dof(i, 0)] * value(q, i);
      v.y += c[dof(i, 1)] * value(q, i);
    }
    return v;
  }

 private:
  const FeSpace& space_;
  const BasisTable& table_;
  const QuadratureRule& rule_;
  std::vector<Vec2> grads_;
  CellGeometry geo_;
  std::size_t cell_ = 0;
};

AssembledOperator finish(const FeSpace& rows, const FeSpace& cols, const std::vector<Triplet>& t) {
  return {triplet_to_csr(rows.n_dofs(), cols.n_dofs(), t), describe(rows), describe(cols)};
}

// Componentwise scalar kernel k(q, i_test, j_trial) replicated on each component block.
template <class Kernel>
AssembledOperator assemble_componentwise(const FeSpace& space, Kernel kernel) {
  CellValues cv(space);
  const std::size_t nl = cv.n_local();
  std::vector<Triplet> triplets;
  triplets.reserve(space.mesh().num_cells() * nl * nl * space.components());
  std::vector<double> local(nl * nl);
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    cv.reinit(c);
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      for (std::size_t i = 0; i < nl; ++i) {
        for (std::size_t j = 0; j < nl; ++j) local[i * nl + j] += kernel(cv, q, i, j);
      }
    }
    for (std::size_t comp = 0; comp < space.components(); ++comp) {
      for (std::size_t i = 0; i < nl; ++i) {
        for (std::size_t j = 0; j < nl; ++j) {
          triplets.push_back({cv.dof(i, comp), cv.dof(j, comp), local[i * nl + j]});
        }
      }
    }
  }
  return finish(space, space, triplets);
}

void require_same_mesh(const FeSpace& a, const FeSpace& b) {
  TPMHD_REQUIRE(&a.mesh() == &b.mesh(), InvalidArgument, "spaces must share one mesh");
}

}  // namespace

AssembledOperator assemble_mass(const FeSpace& space, double c) {
  return assemble_componentwise(space, [c](const CellValues& cv, std::size_t q, std::size_t i,
                                           std::size_t j) {
    return c * cv.jxw(q) * cv.value(q, i) * cv.value(q, j);
  });
}

AssembledOperator assemble_stiffness(const FeSpace& space, double c) {
  return assemble_componentwise(space, [c](const CellValues& cv, std::size_t q, std::size_t i,
                                           std::size_t j) {
    return c * cv.jxw(q) * dot(cv.grad(q, i), cv.grad(q, j));
  });
}

AssembledOperator assemble_div_coupling(const FeSpace& velocity, const FeSpace& pressure) {
  TPMHD_REQUIRE(velocity.components() == 2 && pressure.components() == 1, InvalidArgument,
                "div coupling needs vector velocity and scalar pressure");
  require_same_mesh(velocity, pressure);
  CellValues cu(velocity), cp(pressure);
  std::vector<Triplet> triplets;
  triplets.reserve(velocity.mesh().num_cells() * cp.n_local() * cu.n_local() * 2);
  for (std::size_t c = 0; c < velocity.mesh().num_cells(); ++c) {
    cu.reinit(c);
    cp.reinit(c);
    for (std::size_t i = 0; i < cp.n_local(); ++i) {
      for (std::size_t j = 0; j < cu.n_local(); ++j) {
        double bx = 0.0, by = 0.0;
        for (std::size_t q = 0; q < cu.n_points(); ++q) {
          const double w = cu.jxw(q) * cp.value(q, i);
          bx += w * cu.grad(q, j).x;
          by += w * cu.grad(q, j).y;
        }
        triplets.push_back({cp.dof(i), cu.dof(j, 0), bx});
        triplets.push_back({cp.dof(i), cu.dof(j, 1), by});
      }
    }
  }
  return finish(pressure, velocity, triplets);
}

AssembledOperator assemble_convection(const FeSpace& velocity, std::span<const double> u_prev) {
  TPMHD_REQUIRE(velocity.components() == 2, InvalidArgument, "convection needs a vector space");
  TPMHD_REQUIRE(u_prev.size() == velocity.n_dofs(), InvalidArgument, "u_prev has wrong length");
  CellValues cv(velocity);
  const std::size_t nl = cv.n_local();
  std::vector<Triplet> triplets;
  triplets.reserve(velocity.mesh().num_cells() * nl * nl * 2);
  std::vector<double> local(nl * nl);
  std::vector<Vec2> w(cv.n_points());
  for (std::size_t c = 0; c < velocity.mesh().num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) w[q] = cv.vector_at(u_prev, q);
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      for (std::size_t i = 0; i < nl; ++i) {
        const double wgi = dot(w[q], cv.grad(q, i));
        for (std::size_t j = 0; j < nl; ++j) {
          const double wgj = dot(w[q], cv.grad(q, j));
          local[i * nl + j] += 0.5 * cv.jxw(q) * (wgj * cv.value(q, i) - wgi * cv.value(q, j));
        }
      }
    }
    for (std::size_t comp = 0; comp < 2; ++comp) {
      for (std::size_t i = 0; i < nl; ++i) {
        for (std::size_t j = 0; j < nl; ++j) {
          triplets.push_back({cv.dof(i, comp), cv.dof(j, comp), local[i * nl + j]});
        }
      }
    }
  }
  return finish(velocity, velocity, triplets);
}

OperatorPair assemble_phase_transport(const FeSpace& scalar, const FeSpace& velocity,
                                      std::span<const double> phi_prev) {
  TPMHD_REQUIRE(scalar.components() == 1 && velocity.components() == 2, InvalidArgument,
                "phase transport needs scalar and vector spaces");
  TPMHD_REQUIRE(phi_prev.size() == scalar.n_dofs(), InvalidArgument, "phi_prev has wrong length");
  require_same_mesh(scalar, velocity);
  CellValues cs(scalar), cu(velocity);
  std::vector<Triplet> triplets;
  triplets.reserve(scalar.mesh().num_cells() * cs.n_local() * cu.n_local() * 2);
  std::vector<Vec2> gphi(cs.n_points());
  for (std::size_t c = 0; c < scalar.mesh().num_cells(); ++c) {
    cs.reinit(c);
    cu.reinit(c);
    for (std::size_t q = 0; q < cs.n_points(); ++q) gphi[q] = cs.scalar_grad_at(phi_prev, q);
    for (std::size_t i = 0; i < cs.n_local(); ++i) {
      for (std::size_t j = 0; j < cu.n_local(); ++j) {
        double tx = 0.0, ty = 0.0;
        for (std::size_t q = 0; q < cs.n_points(); ++q) {
          const double w = cs.jxw(q) * cs.value(q, i) * cu.value(q, j);
          tx += w * gphi[q].x;
          ty += w * gphi[q].y;
        }
        triplets.push_back({cs.dof(i), cu.dof(j, 0), tx});
        triplets.push_back({cs.dof(i), cu.dof(j, 1), ty});
      }
    }
  }
  AssembledOperator forward = finish(scalar, velocity, triplets);
  AssembledOperator adjoint{forward.matrix.transpose(), forward.col_space, forward.row_space};
  return {std::move(forward), std::move(adjoint)};
}

OperatorPair assemble_lorentz(const FeSpace& magnetic, const FeSpace& velocity,
                              std::span<const double> b_prev, double c) {
  TPMHD_REQUIRE(magnetic.components() == 2 && velocity.components() == 2, InvalidArgument,
                "Lorentz coupling needs vector spaces");
  TPMHD_REQUIRE(b_prev.size() == magnetic.n_dofs(), InvalidArgument, "B_prev has wrong length");
  require_same_mesh(magnetic, velocity);
  CellValues cb(magnetic), cu(velocity);
  std::vector<Triplet> triplets;
  triplets.reserve(magnetic.mesh().num_cells() * cu.n_local() * cb.n_local() * 4);
  std::vector<Vec2> bq(cb.n_points());
  for (std::size_t cell = 0; cell < magnetic.mesh().num_cells(); ++cell) {
    cb.reinit(cell);
    cu.reinit(cell);
    for (std::size_t q = 0; q < cb.n_points(); ++q) bq[q] = cb.vector_at(b_prev, q);
    for (std::size_t i = 0; i < cu.n_local(); ++i) {
      for (std::size_t j = 0; j < cb.n_local(); ++j) {
        // [test component][trial component]
        double l[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        for (std::size_t q = 0; q < cb.n_points(); ++q) {
          const double w = c * cb.jxw(q) * cu.value(q, i);
          const Vec2 g = cb.grad(q, j);
          // curl(M e_x) = -dM/dy, curl(M e_y) = dM/dx; v x B = v_x B_y - v_y B_x
          const double curl[2] = {-g.y, g.x};
          const double cross[2] = {bq[q].y, -bq[q].x};
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) l[a][b] += w * cross[a] * curl[b];
          }
        }
        for (std::size_t a = 0; a < 2; ++a) {
          for (std::size_t b = 0; b < 2; ++b) triplets.push_back({cu.dof(i, a), cb.dof(j, b), l[a][b]});
        }
      }
    }
  }
  AssembledOperator forward = finish(velocity, magnetic, triplets);
  AssembledOperator adjoint{forward.matrix.transpose(), forward.col_space, forward.row_space};
  return {std::move(forward), std::move(adjoint)};
}

AssembledOperator assemble_curlcurl_divdiv(const FeSpace& magnetic, double c_curl, double c_div) {
  TPMHD_REQUIRE(magnetic.components() == 2, InvalidArgument, "curl-curl needs a vector space");
  CellValues cv(magnetic);
  const std::size_t nl = cv.n_local();
  std::vector<Triplet> triplets;
  triplets.reserve(magnetic.mesh().num_cells() * nl * nl * 4);
  for (std::size_t c = 0; c < magnetic.mesh().num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t i = 0; i < nl; ++i) {
      for (std::size_t j = 0; j < nl; ++j) {
        double l[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        for (std::size_t q = 0; q < cv.n_points(); ++q) {
          const Vec2 gi = cv.grad(q, i), gj = cv.grad(q, j);
          const double curl_i[2] = {-gi.y, gi.x}, curl_j[2] = {-gj.y, gj.x};
          const double div_i[2] = {gi.x, gi.y}, div_j[2] = {gj.x, gj.y};
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              l[a][b] += cv.jxw(q) * (c_curl * curl_i[a] * curl_j[b] + c_div * div_i[a] * div_j[b]);
            }
          }
        }
        for (std::size_t a = 0; a < 2; ++a) {
          for (std::size_t b = 0; b < 2; ++b) triplets.push_back({cv.dof(i, a), cv.dof(j, b), l[a][b]});
        }
      }
    }
  }
  return finish(magnetic, magnetic, triplets);
}

CubicTerm cubic_term(const FeSpace& scalar, std::span<const double> phi_iter,
                     std::span<const double> phi_prev, double c) {
  TPMHD_REQUIRE(scalar.components() == 1, InvalidArgument, "cubic term needs a scalar space");
  TPMHD_REQUIRE(phi_iter.size() == scalar.n_dofs() && phi_prev.size() == scalar.n_dofs(),
                InvalidArgument, "cubic term input has wrong length");
  CellValues cv(scalar);
  const std::size_t nl = cv.n_local();
  CubicTerm out;
  out.residual.assign(scalar.n_dofs(), 0.0);
  std::vector<Triplet> triplets;
  triplets.reserve(scalar.mesh().num_cells() * nl * nl);
  std::vector<double> local(nl * nl);
  for (std::size_t cell = 0; cell < scalar.mesh().num_cells(); ++cell) {
    cv.reinit(cell);
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double phi = cv.scalar_at(phi_iter, q);
      const double prev = cv.scalar_at(phi_prev, q);
      const double w = c * cv.jxw(q);
      for (std::size_t i = 0; i < nl; ++i) {
        out.residual[cv.dof(i)] += w * (phi * phi * phi - prev) * cv.value(q, i);
        for (std::size_t j = 0; j < nl; ++j) {
          local[i * nl + j] += w * 3.0 * phi * phi * cv.value(q, i) * cv.value(q, j);
        }
      }
    }
    for (std::size_t i = 0; i < nl; ++i) {
      for (std::size_t j = 0; j < nl; ++j) triplets.push_back({cv.dof(i), cv.dof(j), local[i * nl + j]});
    }
  }
  out.jacobian = finish(scalar, scalar, triplets);
  return out;
}

std::vector<double> assemble_source(const FeSpace& space, const TimeScalarFn& g, double t) {
  TPMHD_REQUIRE(space.components() == 1, InvalidArgument, "scalar source on vector space");
  CellValues cv(space);
  std::vector<double> out(space.n_dofs(), 0.0);
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const double w = cv.jxw(q) * g(cv.point(q), t);
      for (std::size_t i = 0; i < cv.n_local(); ++i) out[cv.dof(i)] += w * cv.value(q, i);
    }
  }
  return out;
}

std::vector<double> assemble_source(const FeSpace& space, const TimeVectorFn& g, double t) {
  TPMHD_REQUIRE(space.components() == 2, InvalidArgument, "vector source on scalar space");
  CellValues cv(space);
  std::vector<double> out(space.n_dofs(), 0.0);
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec2 v = g(cv.point(q), t);
      const double w = cv.jxw(q);
      for (std::size_t i = 0; i < cv.n_local(); ++i) {
        out[cv.dof(i, 0)] += w * v.x * cv.value(q, i);
        out[cv.dof(i, 1)] += w * v.y * cv.value(q, i);
      }
    }
  }
  return out;
}

std::vector<double> assemble_gradient_source(const FeSpace& space, const GradientFn& g) {
  TPMHD_REQUIRE(space.components() == 1, InvalidArgument, "gradient source on vector space");
  CellValues cv(space);
  std::vector<double> out(space.n_dofs(), 0.0);
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Vec2 v = g(cv.point(q));
      const double w = cv.jxw(q);
      for (std::size_t i = 0; i < cv.n_local(); ++i) out[cv.dof(i)] += w * dot(v, cv.grad(q, i));
    }
  }
  return out;
}

std::vector<double> assemble_curl_div_source(const FeSpace& space, const TensorFn& grad, double c_curl,
                                             double c_div) {
  TPMHD_REQUIRE(space.components() == 2, InvalidArgument, "curl/div source on scalar space");
  CellValues cv(space);
  std::vector<double> out(space.n_dofs(), 0.0);
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    cv.reinit(c);
    for (std::size_t q = 0; q < cv.n_points(); ++q) {
      const Mat2 d = grad(cv.point(q));
      const double w = cv.jxw(q);
      const double curl = c_curl * (d.yx - d.xy) * w, div = c_div * (d.xx + d.yy) * w;
      for (std::size_t i = 0; i < cv.n_local(); ++i) {
        const Vec2 g = cv.grad(q, i);
        out[cv.dof(i, 0)] += -curl * g.y + div * g.x;
        out[cv.dof(i, 1)] += curl * g.x + div * g.y;
      }
    }
  }
  return out;
}

}  // namespace tpmhd
