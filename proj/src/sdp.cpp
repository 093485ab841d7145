#include "entcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entcert/error.hpp"

namespace entcert {

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

struct FullEntry {
  int block;
  int r;
  int c;
  double v;
};

double dot(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frob(const Blocks& a) { return std::sqrt(dot(a, a)); }

Blocks zeros_like(const std::vector<int>& dims) {
  Blocks out;
  for (int d : dims) out.push_back(Eigen::MatrixXd::Zero(d, d));
  return out;
}

void add_scaled(Blocks& out, const std::vector<SymEntry>& a, double alpha) {
  for (const auto& e : a) {
    out[e.block](e.r, e.c) += alpha * e.v;
    if (e.r != e.c) out[e.block](e.c, e.r) += alpha * e.v;
  }
}

/// Largest step keeping p + alpha dp positive semidefinite (may be +inf).
double max_step(const Blocks& p, const Blocks& dp) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k].rows() == 1) {
      if (dp[k](0, 0) < 0.0) alpha = std::min(alpha, -p[k](0, 0) / dp[k](0, 0));
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(p[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    Eigen::MatrixXd w = llt.matrixL().solve(dp[k]);
    w = llt.matrixL().solve(w.transpose()).transpose();
    w = 0.5 * (w + w.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
    const double e = eig.eigenvalues().minCoeff();
    if (e < 0.0) alpha = std::min(alpha, -1.0 / e);
  }
  return alpha;
}

class KktSolver {
 public:
  KktSolver(const Eigen::MatrixXd& m, const Eigen::MatrixXd& e) : m_(m), e_(e) {
    const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
    double reg = 0.0;
    Eigen::MatrixXd mr = m;
    for (int attempt = 0; attempt < 12; ++attempt) {
      llt_.compute(mr);
      if (llt_.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-14 * scale : reg * 10.0;
      mr = m;
      mr.diagonal().array() += reg;
    }
    ok_ = llt_.info() == Eigen::Success;
    if (ok_ && e.rows() > 0) {
      const Eigen::MatrixXd minv_et = llt_.solve(e.transpose());
      k_.compute(e * minv_et);
      ok_ = k_.info() == Eigen::Success;
    }
  }

  bool ok() const { return ok_; }

  void solve(const Eigen::VectorXd& h, const Eigen::VectorXd& re, Eigen::VectorXd& dy, Eigen::VectorXd& dnu) const {
    raw_solve(h, re, dy, dnu);
    for (int round = 0; round < 2; ++round) {
      const Eigen::VectorXd r1 = h - m_ * dy - e_.transpose() * dnu;
      const Eigen::VectorXd r2 = re - e_ * dy;
      Eigen::VectorXd cy;
      Eigen::VectorXd cnu;
      raw_solve(r1, r2, cy, cnu);
      dy += cy;
      dnu += cnu;
    }
  }

 private:
  void raw_solve(const Eigen::VectorXd& h, const Eigen::VectorXd& re, Eigen::VectorXd& dy, Eigen::VectorXd& dnu) const {
    if (e_.rows() == 0) {
      dy = llt_.solve(h);
      dnu.resize(0);
      return;
    }
    const Eigen::VectorXd u = llt_.solve(h);
    dnu = k_.solve(e_ * u - re);
    dy = llt_.solve(h - e_.transpose() * dnu);
  }

  const Eigen::MatrixXd& m_;
  const Eigen::MatrixXd& e_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::LDLT<Eigen::MatrixXd> k_;
  bool ok_ = false;
};

}  // namespace

void SolverOptions::validate() const {
  if (!(gap_tol > 0.0) || !(feas_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver tolerances must be > 0");
  if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
  if (!(step_fraction > 0.0 && step_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "step_fraction must lie in (0, 1)");
  }
  if (!(initial_point_scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "initial_point_scale must be > 0");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::NumericalTrouble: return "NumericalTrouble";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "NumericalTrouble";
}

double inner(const std::vector<SymEntry>& a, const std::vector<Eigen::MatrixXd>& m) {
  double s = 0.0;
  for (const auto& e : a) s += (e.r == e.c ? 1.0 : 2.0) * e.v * 0.5 * (m[e.block](e.r, e.c) + m[e.block](e.c, e.r));
  return s;
}

ConicSolution solve_conic(const ConicProblem& pb, const SolverOptions& opts) {
  opts.validate();
  const int p = pb.n_vars();
  const int n_eq = static_cast<int>(pb.eq.rows());
  const auto& dims = pb.block_dims;
  int n_total = 0;
  int max_dim = 1;
  for (int d : dims) {
    n_total += d;
    max_dim = std::max(max_dim, d);
  }

  std::vector<std::vector<FullEntry>> full(p);
  std::vector<char> dense(p, 0);
  std::vector<Blocks> dense_a(p);
  for (int i = 0; i < p; ++i) {
    for (const auto& e : pb.a[i]) {
      full[i].push_back({e.block, e.r, e.c, e.v});
      if (e.r != e.c) full[i].push_back({e.block, e.c, e.r, e.v});
    }
    if (static_cast<int>(full[i].size()) > 2 * max_dim) {
      dense[i] = 1;
      dense_a[i] = zeros_like(dims);
      add_scaled(dense_a[i], pb.a[i], 1.0);
    }
  }

  const Eigen::VectorXd f = n_eq > 0 ? pb.eq_rhs : Eigen::VectorXd();
  const double c_norm = frob(pb.c);
  const double b_norm = pb.b.norm();
  const double f_norm = n_eq > 0 ? f.norm() : 0.0;

  ConicSolution sol;
  sol.y = Eigen::VectorXd::Zero(p);
  sol.nu = Eigen::VectorXd::Zero(n_eq);
  Blocks& x = sol.x;
  Blocks& s = sol.s;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    x.push_back(Eigen::MatrixXd::Identity(dims[k], dims[k]));
    if (pb.s0.size() == dims.size()) {
      s.push_back(opts.initial_point_scale * pb.s0[k]);
    } else {
      s.push_back(opts.initial_point_scale * Eigen::MatrixXd::Identity(dims[k], dims[k]));
    }
  }
  Eigen::VectorXd& y = sol.y;
  Eigen::VectorXd& nu = sol.nu;

  auto a_of = [&](const Blocks& m) {
    Eigen::VectorXd out(p);
    for (int i = 0; i < p; ++i) out(i) = inner(pb.a[i], m);
    return out;
  };
  auto a_adj = [&](const Eigen::VectorXd& v) {
    Blocks out = zeros_like(dims);
    for (int i = 0; i < p; ++i) {
      if (v(i) != 0.0) add_scaled(out, pb.a[i], v(i));
    }
    return out;
  };

  int stalls = 0;
  sol.status = SolveStatus::IterationLimit;
  for (int iter = 0;; ++iter) {
    Blocks rd = pb.c;
    const Blocks ay = a_adj(y);
    for (std::size_t k = 0; k < dims.size(); ++k) rd[k] -= ay[k] + s[k];
    Eigen::VectorXd r = pb.b - a_of(x);
    if (n_eq > 0) r -= pb.eq.transpose() * nu;
    const Eigen::VectorXd re = n_eq > 0 ? Eigen::VectorXd(f - pb.eq * y) : Eigen::VectorXd();

    sol.primal_obj = pb.b.dot(y);
    sol.dual_obj = dot(pb.c, x) + (n_eq > 0 ? f.dot(nu) : 0.0);
    sol.gap = std::abs(sol.dual_obj - sol.primal_obj);
    const double xs = dot(x, s);
    const double mu = xs / n_total;
    sol.slack_infeas = frob(rd) / (1.0 + c_norm);
    if (n_eq > 0) sol.slack_infeas = std::max(sol.slack_infeas, re.norm() / (1.0 + f_norm));
    sol.cert_infeas = r.norm() / (1.0 + b_norm);
    sol.iterations = iter;

    IterationRecord rec{iter, sol.primal_obj, sol.dual_obj, sol.gap, sol.slack_infeas, sol.cert_infeas, mu, 0.0, 0.0};

    if (!std::isfinite(sol.gap) || !std::isfinite(mu)) {
      sol.status = SolveStatus::NumericalTrouble;
      sol.trace.push_back(rec);
      break;
    }
    const double gap_scale = std::max(1.0, std::abs(sol.primal_obj));
    if (sol.gap <= opts.gap_tol * gap_scale && xs <= opts.gap_tol * gap_scale && sol.slack_infeas <= opts.feas_tol &&
        sol.cert_infeas <= opts.feas_tol) {
      sol.status = SolveStatus::Optimal;
      sol.trace.push_back(rec);
      break;
    }
    if (sol.cert_infeas <= opts.feas_tol && sol.dual_obj < -1e10 * (1.0 + std::abs(sol.primal_obj))) {
      sol.status = SolveStatus::PrimalInfeasible;
      sol.trace.push_back(rec);
      break;
    }
    if (iter >= opts.max_iter) {
      sol.status = SolveStatus::IterationLimit;
      sol.trace.push_back(rec);
      break;
    }

    Blocks sinv;
    bool chol_ok = true;
    for (const auto& sk : s) {
      Eigen::LLT<Eigen::MatrixXd> llt(sk);
      if (llt.info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(sk.rows(), sk.cols()));
      sinv.push_back(0.5 * (inv + inv.transpose()));
    }
    if (!chol_ok) {
      sol.status = SolveStatus::NumericalTrouble;
      sol.trace.push_back(rec);
      break;
    }

    // Schur complement M_ij = tr(A_i X A_j S^-1).
    Eigen::MatrixXd m(p, p);
    std::vector<Blocks> g(p);
    for (int i = 0; i < p; ++i) {
      if (!dense[i]) continue;
      g[i] = zeros_like(dims);
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (dense_a[i][k].cwiseAbs().maxCoeff() == 0.0) continue;
        g[i][k] = x[k] * dense_a[i][k] * sinv[k];
      }
    }
    for (int i = 0; i < p; ++i) {
      for (int j = i; j < p; ++j) {
        double v = 0.0;
        if (dense[i] || dense[j]) {
          const int di = dense[i] ? i : j;
          const int sj = dense[i] ? j : i;
          for (const auto& e : full[sj]) v += e.v * g[di][e.block](e.r, e.c);
        } else {
          for (const auto& a : full[i]) {
            const auto& xb = x[a.block];
            const auto& sb = sinv[a.block];
            for (const auto& b : full[j]) {
              if (b.block != a.block) continue;
              v += a.v * b.v * xb(a.c, b.r) * sb(b.c, a.r);
            }
          }
        }
        m(i, j) = m(j, i) = v;
      }
    }

    const Eigen::MatrixXd& e_mat = pb.eq;
    KktSolver kkt(m, e_mat);
    if (!kkt.ok()) {
      sol.status = SolveStatus::NumericalTrouble;
      sol.trace.push_back(rec);
      break;
    }

    auto direction = [&](double target, const Blocks* corr, Eigen::VectorXd& dy, Eigen::VectorXd& dnu, Blocks& dx,
                         Blocks& ds) {
      Blocks t(dims.size());
      for (std::size_t k = 0; k < dims.size(); ++k) {
        t[k] = -x[k] + target * sinv[k] - x[k] * rd[k] * sinv[k];
        if (corr) t[k] -= (*corr)[k];
      }
      Eigen::VectorXd h(p);
      for (int i = 0; i < p; ++i) {
        double v = 0.0;
        for (const auto& e : full[i]) v += e.v * t[e.block](e.r, e.c);
        h(i) = r(i) - v;
      }
      kkt.solve(h, re, dy, dnu);
      const Blocks ady = a_adj(dy);
      ds.resize(dims.size());
      dx.resize(dims.size());
      for (std::size_t k = 0; k < dims.size(); ++k) {
        ds[k] = rd[k] - ady[k];
        Eigen::MatrixXd d = -x[k] + target * sinv[k] - x[k] * ds[k] * sinv[k];
        if (corr) d -= (*corr)[k];
        dx[k] = 0.5 * (d + d.transpose());
      }
    };

    Eigen::VectorXd dy;
    Eigen::VectorXd dnu;
    Blocks dx;
    Blocks ds;
    direction(0.0, nullptr, dy, dnu, dx, ds);
    const double ap = std::min(1.0, max_step(x, dx));
    const double ad = std::min(1.0, max_step(s, ds));
    Blocks xa = x;
    Blocks sa = s;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      xa[k] += ap * dx[k];
      sa[k] += ad * ds[k];
    }
    const double mu_aff = dot(xa, sa) / n_total;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    Blocks corr(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) corr[k] = dx[k] * ds[k] * sinv[k];
    direction(sigma * mu, &corr, dy, dnu, dx, ds);

    const double step_x = std::min(1.0, opts.step_fraction * max_step(x, dx));
    const double step_s = std::min(1.0, opts.step_fraction * max_step(s, ds));
    rec.step_x = step_x;
    rec.step_s = step_s;
    sol.trace.push_back(rec);
    if (!dy.allFinite() || !std::isfinite(step_x) || !std::isfinite(step_s)) {
      sol.status = SolveStatus::NumericalTrouble;
      break;
    }
    stalls = (step_x < 1e-10 && step_s < 1e-10) ? stalls + 1 : 0;
    if (stalls >= 3) {
      sol.status = SolveStatus::NumericalTrouble;
      break;
    }
    for (std::size_t k = 0; k < dims.size(); ++k) {
      x[k] += step_x * dx[k];
      s[k] += step_s * ds[k];
    }
    if (n_eq > 0) nu += step_x * dnu;
    y += step_s * dy;
  }
  return sol;
}

}  // namespace entcert
