#include "viscobem/contact.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "viscobem/error.hpp"

namespace viscobem {

Vector contact_bounds(double chi, double tau, const Vector& un_prev, const Vector& g0) {
  return ((tau + chi) / tau) * g0 - (chi / tau) * un_prev;
}

Vector contact_bounds(const StepCoeffs& c, const Vector& un1, const Vector& un2, const Vector& g0) {
  return c.a0 * g0 - c.a1 * un1 + c.a2 * un2;
}

namespace {

/// Phase one: primal active set on the symmetric energy.
QpResult solve_energy_qp(const ContactQP& qp, int cap) {
  const int m = static_cast<int>(qp.b.size());
  QpResult res;
  res.x = qp.b.cwiseMin(0.0);
  res.active.assign(m, 0);
  for (int i = 0; i < m; ++i) res.active[i] = res.x(i) >= qp.b(i);
  const double kscale = std::max(qp.K.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

  for (int it = 0; it < cap; ++it) {
    res.iterations = it + 1;
    const Vector g = qp.K * res.x + qp.c;
    const double gscale = std::max({g.cwiseAbs().maxCoeff(), qp.c.cwiseAbs().maxCoeff(),
                                    kscale * std::max(res.x.cwiseAbs().maxCoeff(), qp.b.cwiseAbs().maxCoeff()),
                                    std::numeric_limits<double>::min()});
    std::vector<int> free;
    for (int i = 0; i < m; ++i) {
      if (!res.active[i]) free.push_back(i);
    }
    const int f = static_cast<int>(free.size());
    Vector p = Vector::Zero(f);
    bool ray = false;
    if (f > 0) {
      Matrix KFF(f, f);
      Vector gF(f);
      for (int a = 0; a < f; ++a) {
        gF(a) = g(free[a]);
        for (int c = 0; c < f; ++c) KFF(a, c) = qp.K(free[a], free[c]);
      }
      Eigen::SelfAdjointEigenSolver<Matrix> eig(KFF);
      const Vector& ev = eig.eigenvalues();
      const Matrix& U = eig.eigenvectors();
      // Symmetrisation leaves rigid modes slightly indefinite; such
      // eigenvalues are treated as null directions.
      const double tol = 1e-4 * std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
      if (ev.minCoeff() < -tol) throw Error(ErrorCode::IllPosed, "contact operator is not positive semidefinite");
      const Vector proj = U.transpose() * gF;
      Vector null_part = Vector::Zero(f);
      for (int k = 0; k < f; ++k) {
        if (ev(k) > tol) {
          p -= (proj(k) / ev(k)) * U.col(k);
        } else {
          null_part += proj(k) * U.col(k);
        }
      }
      if (null_part.cwiseAbs().maxCoeff() > 1e-11 * gscale) {
        p = -null_part;
        ray = true;
      }
    }

    const double xscale = std::max({res.x.cwiseAbs().maxCoeff(), qp.b.cwiseAbs().maxCoeff(), 1e-300});
    if (f == 0 || (!ray && p.cwiseAbs().maxCoeff() <= 1e-13 * xscale)) {
      // Stationary on the current face: release the most positive multiplier.
      int release = -1;
      double worst = 1e-12 * gscale;
      for (int i = 0; i < m; ++i) {
        if (res.active[i] && g(i) > worst) {
          worst = g(i);
          release = i;
        }
      }
      if (release < 0) {
        res.lambda = Vector::Zero(m);
        for (int i = 0; i < m; ++i) {
          if (res.active[i]) res.lambda(i) = g(i);
        }
        return res;
      }
      res.active[release] = 0;
      continue;
    }

    double alpha = ray ? std::numeric_limits<double>::infinity() : 1.0;
    int block = -1;
    for (int a = 0; a < f; ++a) {
      if (p(a) <= 0.0) continue;
      const int i = free[a];
      const double ratio = std::max(0.0, (qp.b(i) - res.x(i)) / p(a));
      if (ratio < alpha) {
        alpha = ratio;
        block = i;
      }
    }
    if (!std::isfinite(alpha)) throw Error(ErrorCode::IllPosed, "contact problem is unbounded");
    for (int a = 0; a < f; ++a) res.x(free[a]) += alpha * p(a);
    if (block >= 0) {
      res.x(block) = qp.b(block);
      res.active[block] = 1;
    }
  }
  throw Error(ErrorCode::NonConvergence,
              "active-set solver did not converge in " + std::to_string(cap) + " iterations");
}

/// Phase two: exchange the active set until (A, f) is complementary.
void polish(const ContactQP& qp, QpResult& res, int cap) {
  const int m = static_cast<int>(qp.b.size());
  const double ascale = std::max(qp.A.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const Vector diag = qp.A.diagonal().cwiseAbs().cwiseMax(1e-12 * ascale);
  for (int it = 0; it <= cap; ++it) {
    const Vector lam = qp.A * res.x + qp.f;
    const double xscale = std::max({res.x.cwiseAbs().maxCoeff(), qp.b.cwiseAbs().maxCoeff(), 1e-300});
    const double fscale = std::max({qp.f.cwiseAbs().maxCoeff(), lam.cwiseAbs().maxCoeff(), ascale * xscale});
    int worst = -1;
    double wv = 0.0;
    bool stationary = true;
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      if (res.active[i]) {
        v = lam(i) > 1e-12 * fscale ? lam(i) : 0.0;
      } else {
        v = res.x(i) - qp.b(i) > 1e-12 * xscale ? diag(i) * (res.x(i) - qp.b(i)) : 0.0;
        if (std::abs(lam(i)) > 1e-10 * fscale) stationary = false;
      }
      if (v > wv) {
        wv = v;
        worst = i;
      }
    }
    if (worst < 0 && stationary) {
      res.lambda = Vector::Zero(m);
      for (int i = 0; i < m; ++i) {
        if (res.active[i]) res.lambda(i) = lam(i);
      }
      return;
    }
    if (it == cap) break;
    if (worst >= 0) {
      res.active[worst] = !res.active[worst];
      ++res.polish_iterations;
    }
    // Solve the equality system of the current partition as a correction
    // of the current iterate (minimum norm in rigid directions).
    std::vector<int> free;
    for (int i = 0; i < m; ++i) {
      if (res.active[i]) {
        res.x(i) = qp.b(i);
      } else {
        free.push_back(i);
      }
    }
    const int nf = static_cast<int>(free.size());
    if (nf == 0) continue;
    const Vector r = qp.A * res.x + qp.f;
    Matrix AFF(nf, nf);
    Vector rF(nf);
    for (int a = 0; a < nf; ++a) {
      rF(a) = r(free[a]);
      for (int c = 0; c < nf; ++c) AFF(a, c) = qp.A(free[a], free[c]);
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(AFF);
    cod.setThreshold(1e-10);
    const Vector dx = cod.solve(-rF);
    if ((AFF * dx + rF).cwiseAbs().maxCoeff() > 1e-8 * fscale) {
      throw Error(ErrorCode::IllPosed, "contact problem has no equilibrium for the current contact set");
    }
    for (int a = 0; a < nf; ++a) res.x(free[a]) += dx(a);
  }
  throw Error(ErrorCode::NonConvergence,
              "complementarity correction did not converge in " + std::to_string(cap) + " exchanges");
}

}  // namespace

QpResult solve_qp(const ContactQP& qp, const QpOptions& opt) {
  const int m = static_cast<int>(qp.b.size());
  const int cap = opt.max_iterations > 0 ? opt.max_iterations : 10 * std::max(m, 1);
  QpResult res = solve_energy_qp(qp, cap);
  if (qp.A.size() > 0) polish(qp, res, cap);
  return res;
}

bool KktReport::within(double tol) const {
  return primal <= tol * x_scale && dual <= tol * force_scale && stationarity <= tol * force_scale &&
         complementarity <= tol * x_scale * force_scale;
}

KktReport kkt_check(const ContactQP& qp, const Vector& x, const Vector& lambda) {
  KktReport r;
  const bool raw = qp.A.size() > 0;
  const Matrix& M = raw ? qp.A : qp.K;
  const Vector& c = raw ? qp.f : qp.c;
  const Vector g = M * x + c;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    r.primal = std::max(r.primal, x(i) - qp.b(i));
    r.dual = std::max(r.dual, lambda(i));
    r.complementarity = std::max(r.complementarity, std::abs(lambda(i) * (x(i) - qp.b(i))));
  }
  r.stationarity = x.size() > 0 ? (g - lambda).cwiseAbs().maxCoeff() : 0.0;
  if (x.size() > 0) {
    r.x_scale = std::max({x.cwiseAbs().maxCoeff(), qp.b.cwiseAbs().maxCoeff(), 1e-300});
    r.force_scale = std::max({c.cwiseAbs().maxCoeff(), lambda.cwiseAbs().maxCoeff(),
                              M.cwiseAbs().maxCoeff() * r.x_scale, 1e-300});
  }
  return r;
}

Vector boundary_pairing_weights(const RegionLayout& L, const Vector& v, bool lumped) {
  const int E = L.bem.num_elements();
  Vector w = Vector::Zero(4 * E);
  const double own = lumped ? 3.0 : 2.0, other = lumped ? 0.0 : 1.0;
  for (int le = 0; le < E; ++le) {
    const int na = L.bem.element_nodes[le][0], nb = L.bem.element_nodes[le][1];
    const Vec2 va = L.node[na].frame * v.segment<2>(2 * na);
    const Vec2 vb = L.node[nb].frame * v.segment<2>(2 * nb);
    const double h = L.bem.lengths[le] / 6.0;
    w.segment<2>(4 * le) = L.node[na].frame.transpose() * (h * (own * va + other * vb));
    w.segment<2>(4 * le + 2) = L.node[nb].frame.transpose() * (h * (other * va + own * vb));
  }
  return w;
}

double boundary_pairing(const RegionLayout& L, const Vector& t, const Vector& v, bool lumped) {
  return t.dot(boundary_pairing_weights(L, v, lumped));
}

namespace {

Vector known_slots(const RegionLayout& L, const Vector& t) {
  Vector out = Vector::Zero(t.size());
  for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
    for (int d = 0; d < 2; ++d) {
      if (L.slot[s].known[d]) out(2 * s + d) = t(2 * s + d);
    }
  }
  return out;
}

/// A slot carrying the contact traction unknown of a node, or -1.
int contact_slot(const RegionLayout& L, int n) {
  for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
    if (L.slot_node(s) == n && !L.slot[s].known[0]) return s;
  }
  return -1;
}

}  // namespace

ContactOperator::ContactOperator(const MixedSystem& sys) {
  const int m = static_cast<int>(sys.contact.size());
  const Matrix& Z = sys.contact_response();
  Matrix K_raw = Matrix::Zero(m, m);
  for (const auto& L : sys.regions) {
    const int n2 = 2 * L.bem.num_nodes();
    const int s2 = 2 * static_cast<int>(L.slot.size());
    Matrix V = Matrix::Zero(n2, m), T = Matrix::Zero(s2, m), BV(s2, m);
    for (int nd = 0; nd < n2; ++nd) {
      const auto& nl = L.node[nd / 2];
      if (nl.kind[nd % 2] == DofKind::Contact) {
        V(nd, nl.contact) = 1.0;
      } else if (L.disp_col[nd] >= 0 && m > 0) {
        V.row(nd) = Z.row(L.disp_col[nd]);
      }
    }
    for (int s = 0; s < s2 / 2; ++s) {
      for (int d = 0; d < 2; ++d) {
        if (!L.slot[s].known[d] && m > 0) T.row(2 * s + d) = Z.row(L.trac_col[2 * L.slot_node(s) + d]);
      }
    }
    for (int k = 0; k < m; ++k) BV.col(k) = boundary_pairing_weights(L, V.col(k), true);
    K_raw += T.transpose() * BV;
    V_.push_back(std::move(V));
    T_.push_back(std::move(T));
    BV_.push_back(std::move(BV));
  }
  A_ = K_raw.transpose();
  K_ = 0.5 * (A_ + A_.transpose());
  const double norm = A_.norm();
  asymmetry_ = norm > 0.0 ? (A_ - A_.transpose()).norm() / norm : 0.0;
  w_ = Vector::Zero(m);
  for (int k = 0; k < m; ++k) {
    const auto& cn = sys.contact[k];
    const auto& L = sys.regions[cn.region];
    for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
      if (L.slot_node(s) == cn.local_node && !L.slot[s].known[0]) w_(k) += 0.5 * L.bem.lengths[s / 2];
    }
  }
}

ContactQP ContactOperator::condense(const MixedSystem& sys, const std::vector<RegionValues>& base,
                                    const std::vector<RegionValues>& known, const Vector& b) const {
  ContactQP qp;
  qp.K = K_;
  qp.A = A_;
  qp.asymmetry = asymmetry_;
  qp.b = b;
  const int m = size();
  qp.c = Vector::Zero(m);
  for (std::size_t r = 0; r < sys.regions.size(); ++r) {
    const auto& L = sys.regions[r];
    const Vector tk = known_slots(L, known[r].t);
    const Vector w0 = boundary_pairing_weights(L, base[r].v, true);
    // d/dx of 1/2 beta(t0 + Tx, v0 + Vx) - beta(tk, v0 + Vx)
    qp.c += 0.5 * (BV_[r].transpose() * base[r].t + T_[r].transpose() * w0) - BV_[r].transpose() * tk;
    qp.offset += 0.5 * base[r].t.dot(w0) - tk.dot(w0);
  }
  qp.f = Vector::Zero(m);
  for (int k = 0; k < m; ++k) {
    const auto& cn = sys.contact[k];
    const int s = contact_slot(sys.regions[cn.region], cn.local_node);
    if (s >= 0) qp.f(k) = w_(k) * base[cn.region].t(2 * s);
  }
  return qp;
}

double ContactOperator::energy(const MixedSystem& sys, const std::vector<RegionValues>& fields,
                               const std::vector<RegionValues>& known) {
  double e = 0.0;
  for (std::size_t r = 0; r < sys.regions.size(); ++r) {
    const auto& L = sys.regions[r];
    const Vector w = boundary_pairing_weights(L, fields[r].v, true);
    e += 0.5 * fields[r].t.dot(w) - known_slots(L, known[r].t).dot(w);
  }
  return e;
}

double contact_zone_length(const MixedSystem& sys, const std::vector<char>& active) {
  double len = 0.0;
  for (const auto& L : sys.regions) {
    for (int le = 0; le < L.bem.num_elements(); ++le) {
      const int ca = L.node[L.bem.element_nodes[le][0]].contact;
      const int cb = L.node[L.bem.element_nodes[le][1]].contact;
      if (ca >= 0 && cb >= 0 && active[ca] && active[cb]) len += L.bem.lengths[le];
    }
  }
  return len;
}

}  // namespace viscobem
