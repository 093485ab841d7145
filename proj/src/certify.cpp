#include "entcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "entcert/error.hpp"

namespace entcert {

namespace {

double pattern_inner(const std::vector<PatternEntry>& pattern, const Eigen::MatrixXd& z) {
  double s = 0.0;
  for (const auto& e : pattern) s += (e.r == e.c ? 1.0 : 2.0) * e.coef * z(e.r, e.c);
  return s;
}

/// Rows of `e` that are linearly independent, by column-pivoted QR of e'.
std::vector<int> independent_rows(const Eigen::MatrixXd& e) {
  if (e.rows() == 0) return {};
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(e.transpose());
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  std::vector<int> rows;
  for (Eigen::Index k = 0; k < rank; ++k) rows.push_back(qr.colsPermutation().indices()(k));
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

SdpProblem assemble_primal(const MomentMatrixLayout& layout, const CorrelationDataset& ds) {
  SdpProblem pb;
  pb.layout = layout;
  pb.labels = layout.labels;
  const int n_labels = static_cast<int>(pb.labels.size());
  std::map<Label, int> label_index;
  pb.data_values.resize(n_labels);
  for (int a = 0; a < n_labels; ++a) {
    label_index[pb.labels[a]] = a;
    const auto v = ds.get(pb.labels[a]);
    if (!v) throw Error(ErrorKind::MissingData, "layout references absent " + pb.labels[a].str());
    pb.data_values(a) = *v;
  }

  const int full_dim = layout.dim();
  const auto redundant = sphere_redundant_rows(layout.basis);
  std::vector<int> reduced(full_dim, -1);
  for (int r = 0; r < full_dim; ++r) {
    if (std::binary_search(redundant.begin(), redundant.end(), r)) continue;
    reduced[r] = static_cast<int>(pb.kept_rows.size());
    pb.kept_rows.push_back(r);
  }
  const int d = pb.gamma_dim();

  pb.constant_part = Eigen::MatrixXd::Zero(d, d);
  pb.label_patterns.assign(n_labels, {});
  std::vector<std::vector<PatternEntry>> var_patterns(layout.n_vars);
  for (int ri = 0; ri < d; ++ri) {
    for (int ci = ri; ci < d; ++ci) {
      const LayoutEntry& e = layout.at(pb.kept_rows[ri], pb.kept_rows[ci]);
      switch (e.kind) {
        case EntryKind::Constant:
          pb.constant_part(ri, ci) = pb.constant_part(ci, ri) = e.constant;
          break;
        case EntryKind::Data:
          for (const auto& t : e.data) pb.label_patterns[label_index.at(t.label)].push_back({ri, ci, t.coef});
          break;
        case EntryKind::FreeVar: var_patterns[e.var].push_back({ri, ci, 1.0}); break;
        case EntryKind::Zero: break;
      }
    }
  }

  const int nc = static_cast<int>(layout.pauli_constraints.size());
  pb.pauli_label = Eigen::MatrixXd::Zero(nc, n_labels);
  pb.pauli_var = Eigen::MatrixXd::Zero(nc, layout.n_vars);
  pb.pauli_rhs = Eigen::VectorXd::Zero(nc);
  for (int j = 0; j < nc; ++j) {
    const auto& pc = layout.pauli_constraints[j];
    pb.pauli_rhs(j) = pc.rhs;
    for (const auto& t : pc.terms) {
      const LayoutEntry& e = layout.at(t.row, t.col);
      if (e.kind == EntryKind::FreeVar) {
        pb.pauli_var(j, e.var) += t.coef;
      } else if (e.kind == EntryKind::Data) {
        for (const auto& dt : e.data) pb.pauli_label(j, label_index.at(dt.label)) += t.coef * dt.coef;
      }
    }
  }

  std::vector<int> inside;
  std::vector<int> outside;
  for (int k = 0; k < layout.n_vars; ++k) (var_patterns[k].empty() ? outside : inside).push_back(k);
  pb.var_of_column = inside;

  // Equalities over (lambda, inside vars); moments absent from the LMI are
  // projected out through the left null space of their columns.
  const Eigen::VectorXd label_rows = pb.pauli_label * pb.data_values;
  Eigen::MatrixXd e_full(nc, 1 + inside.size());
  e_full.col(0) = -label_rows;
  for (std::size_t k = 0; k < inside.size(); ++k) e_full.col(1 + k) = pb.pauli_var.col(inside[k]);
  const Eigen::VectorXd f_full = pb.pauli_rhs - label_rows;

  Eigen::MatrixXd null_rows = Eigen::MatrixXd::Identity(nc, nc);
  if (!outside.empty() && nc > 0) {
    Eigen::MatrixXd e_out(nc, outside.size());
    for (std::size_t k = 0; k < outside.size(); ++k) e_out.col(k) = pb.pauli_var.col(outside[k]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(e_out);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    const Eigen::MatrixXd q = qr.householderQ();
    null_rows = q.rightCols(nc - rank).transpose();
  }
  const Eigen::MatrixXd e_proj = null_rows * e_full;
  const auto keep = independent_rows(e_proj);
  pb.eq_map.resize(static_cast<Eigen::Index>(keep.size()), nc);
  for (std::size_t k = 0; k < keep.size(); ++k) pb.eq_map.row(k) = null_rows.row(keep[k]);

  ConicProblem& cp = pb.conic;
  cp.block_dims = {1, d};
  const int p = 1 + static_cast<int>(inside.size());
  Eigen::MatrixXd data_part = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < n_labels; ++a) {
    for (const auto& e : pb.label_patterns[a]) {
      data_part(e.r, e.c) += e.coef * pb.data_values(a);
      if (e.r != e.c) data_part(e.c, e.r) += e.coef * pb.data_values(a);
    }
  }
  cp.c = {Eigen::MatrixXd::Zero(1, 1), pb.constant_part + data_part};
  cp.a.assign(p, {});
  cp.a[0].push_back({0, 0, 0, -1.0});
  for (int r = 0; r < d; ++r) {
    for (int c = r; c < d; ++c) {
      if (data_part(r, c) != 0.0) cp.a[0].push_back({1, r, c, data_part(r, c)});
    }
  }
  for (std::size_t k = 0; k < inside.size(); ++k) {
    for (const auto& e : var_patterns[inside[k]]) cp.a[1 + k].push_back({1, e.r, e.c, -1.0});
  }
  cp.b = Eigen::VectorXd::Zero(p);
  cp.b(0) = -1.0;
  cp.eq = pb.eq_map * e_full;
  cp.eq_rhs = pb.eq_map * f_full;

  Eigen::MatrixXd gamma0 = Eigen::MatrixXd::Identity(d, d) / 3.0;
  gamma0(0, 0) = 1.0;
  cp.s0 = {Eigen::MatrixXd::Ones(1, 1), gamma0};
  return pb;
}

namespace {

SdpSolution solve_once(const SdpProblem& pb, const SolverOptions& opts) {
  const ConicSolution cs = solve_conic(pb.conic, opts);
  SdpSolution out;
  out.status = cs.status;
  out.iterations = cs.iterations;
  out.trace = cs.trace;
  out.lambda_star = cs.y(0);
  out.gamma = cs.s[1];
  out.dual_matrix = cs.x[1];
  out.dual_scalar = cs.x[0](0, 0);
  const Eigen::MatrixXd& z = out.dual_matrix;

  const Eigen::VectorXd nu = pb.eq_map.transpose() * cs.nu;
  const int n_labels = static_cast<int>(pb.labels.size());
  Eigen::VectorXd w = pb.pauli_label.transpose() * nu;
  for (int a = 0; a < n_labels; ++a) w(a) -= pattern_inner(pb.label_patterns[a], z);
  out.w_data.assign(w.data(), w.data() + w.size());
  out.w_pauli.resize(nu.size());
  for (Eigen::Index j = 0; j < nu.size(); ++j) out.w_pauli[j] = -nu(j);
  out.fixed_term = -pb.constant_part.cwiseProduct(z).sum();
  out.w_dot_c = w.dot(pb.data_values);
  out.primal_objective = out.lambda_star;
  out.dual_objective = out.w_dot_c - pb.pauli_rhs.dot(nu) + out.fixed_term;
  out.duality_gap = std::abs(out.primal_objective - out.dual_objective);

  // Stationarity in every layout variable, PSD of Z, xi >= 0, xi = 1 - w.C.
  Eigen::VectorXd fz = Eigen::VectorXd::Zero(pb.layout.n_vars);
  for (int ri = 0; ri < pb.gamma_dim(); ++ri) {
    for (int ci = ri; ci < pb.gamma_dim(); ++ci) {
      const LayoutEntry& e = pb.layout.at(pb.kept_rows[ri], pb.kept_rows[ci]);
      if (e.kind == EntryKind::FreeVar) fz(e.var) += (ri == ci ? 1.0 : 2.0) * z(ri, ci);
    }
  }
  double residual = 0.0;
  if (pb.layout.n_vars > 0) residual = (fz - pb.pauli_var.transpose() * nu).cwiseAbs().maxCoeff();
  if (z.rows() > 0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z, Eigen::EigenvaluesOnly);
    residual = std::max(residual, -eig.eigenvalues().minCoeff());
  }
  residual = std::max(residual, -out.dual_scalar);
  residual = std::max(residual, std::abs(out.dual_scalar - (1.0 - out.w_dot_c)));
  out.dual_residual = residual;
  return out;
}

}  // namespace

SdpSolution solve(const SdpProblem& pb, const SolverOptions& opts) {
  // Complementarity only forces xi = 1 - w.C to within gap / lambda*, so
  // entangled instances with small lambda* are re-solved more tightly.
  SdpSolution sol = solve_once(pb, opts);
  SolverOptions tight = opts;
  while (sol.status == SolveStatus::Optimal && sol.lambda_star > kDetectionThreshold &&
         std::abs(1.0 - sol.w_dot_c) > 1e-8 && tight.gap_tol > 1e-13) {
    tight.gap_tol = std::max(tight.gap_tol * 1e-2, 1e-13);
    SdpSolution next = solve_once(pb, tight);
    if (next.status != SolveStatus::Optimal) break;
    next.iterations += sol.iterations;
    sol = std::move(next);
  }
  return sol;
}

Witness extract_witness(const SdpSolution& sol, const SdpProblem& pb, double threshold) {
  if (sol.status != SolveStatus::Optimal) {
    throw Error(ErrorKind::NotEntangled, "solve ended with status " + to_string(sol.status));
  }
  if (!(sol.lambda_star > threshold)) {
    throw Error(ErrorKind::NotEntangled, "lambda* = " + std::to_string(sol.lambda_star) + " below detection threshold");
  }
  std::vector<std::pair<Label, double>> coefs;
  for (std::size_t a = 0; a < pb.labels.size(); ++a) coefs.emplace_back(pb.labels[a], sol.w_data[a]);
  return make_witness(std::move(coefs), 1.0 - sol.lambda_star, Orientation::UpperBound, Provenance::DualCertificate);
}

Certification certify(const CorrelationDataset& ds, const CertifyOptions& opts) {
  const MonomialBasis basis = monomial_basis(ds.n_sites(), opts.level, opts.extra_monomials);
  Certification out;
  if (opts.scheme) {
    out.scheme = fit_scheme(ds, *opts.scheme);
  } else if (opts.level == 1 && opts.extra_monomials.empty()) {
    out.scheme = select_scheme(ds);
  }
  const MomentMatrixLayout layout = build_layout(basis, ds, out.scheme);
  out.problem = assemble_primal(layout, ds);
  out.solution = solve(out.problem, opts.solver);
  out.entangled = out.solution.status == SolveStatus::Optimal && out.solution.lambda_star > kDetectionThreshold;
  return out;
}

}  // namespace entcert
