#include "entcert/witnesslab.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "entcert/error.hpp"
#include "entcert/sdp.hpp"

namespace entcert {

namespace {

constexpr double kPi = std::numbers::pi;

double require(const CorrelationDataset& ds, const Label& l) {
  const auto v = ds.get(l);
  if (!v) throw Error(ErrorKind::MissingData, "needs " + l.str());
  return *v;
}

void check_phases(const PhaseAssignment& phases) {
  if (phases.n_sites() < 2) throw Error(ErrorKind::WrongSize, "phase assignment needs at least two sites");
}

void check_sites(const CorrelationDataset& ds, const PhaseAssignment& phases) {
  if (ds.n_sites() != phases.n_sites()) {
    throw Error(ErrorKind::WrongSize, "phase assignment covers " + std::to_string(phases.n_sites()) +
                                          " sites, dataset has " + std::to_string(ds.n_sites()));
  }
}

}  // namespace

PhaseAssignment PhaseAssignment::zeros(int n) {
  PhaseAssignment p;
  p.phi.assign(static_cast<std::size_t>(n), {0.0, 0.0, 0.0});
  return p;
}

PhaseAssignment PhaseAssignment::ising_staggered(int n) {
  PhaseAssignment p = zeros(n);
  for (int j = 1; j < n; j += 2) p.phi[j] = {kPi, 0.0, kPi};
  return p;
}

Witness phase_witness(const PhaseAssignment& phases) {
  check_phases(phases);
  const int n = phases.n_sites();
  std::vector<std::pair<Label, double>> coefs;
  for (Axis a : kAxes) {
    for (int j = 0; j < n; ++j) {
      for (int jp = j + 1; jp < n; ++jp) {
        const double w = 2.0 * std::cos(phases.phi[jp][index(a)] - phases.phi[j][index(a)]);
        coefs.emplace_back(Label::two_body(j, jp, a, a), w);
      }
    }
  }
  return make_witness(std::move(coefs), -static_cast<double>(n), Orientation::LowerBound, Provenance::PhaseFamily);
}

double phase_witness_value(const CorrelationDataset& ds, const PhaseAssignment& phases) {
  check_sites(ds, phases);
  return eval_witness(phase_witness(phases), ds).value;
}

Witness structure_witness(int n, const std::array<Vec2, 3>& k, const std::vector<Vec2>& positions) {
  if (n < 2 || static_cast<int>(positions.size()) != n) throw Error(ErrorKind::WrongSize, "one position per site required");
  std::vector<std::pair<Label, double>> coefs;
  for (Axis a : kAxes) {
    const Vec2& q = k[index(a)];
    for (int j = 0; j < n; ++j) {
      for (int jp = j + 1; jp < n; ++jp) {
        const double phase = q[0] * (positions[jp][0] - positions[j][0]) + q[1] * (positions[jp][1] - positions[j][1]);
        coefs.emplace_back(Label::two_body(j, jp, a, a), 2.0 * std::cos(phase) / n);
      }
    }
  }
  return make_witness(std::move(coefs), kQubitStructureBound, Orientation::LowerBound, Provenance::StructureFactor, 3.0);
}

double structure_witness_value(const CorrelationDataset& ds, const std::array<Vec2, 3>& k,
                               const std::vector<Vec2>& positions) {
  double s = 0.0;
  for (Axis a : kAxes) s += structure_factor(ds, k[index(a)], a, positions);
  return s;
}

BipartiteKernel::BipartiteKernel(int n) : n_(n) {
  if (n < 4 || n % 4 != 0) throw Error(ErrorKind::BadSize, "bipartite kernel needs n divisible by 4, got " + std::to_string(n));
  for (int r = -(n - 1); r < n; r += 2) odd_[r] = closed_form(n, r);
}

double BipartiteKernel::operator()(int r) const {
  const auto it = odd_.find(r);
  return it != odd_.end() ? it->second : closed_form(n_, r);
}

double BipartiteKernel::direct_sum(int n, int r) {
  std::complex<double> s = 0.0;
  for (int k = -n / 4 + 1; k <= n / 4 - 1; ++k) s += std::polar(1.0, 2.0 * kPi * k * r / n);
  return 2.0 * s.real() / n;
}

double BipartiteKernel::closed_form(int n, int r) {
  if (r % n == 0) return 2.0 * (n / 2 - 1) / n;
  const double x = kPi * r;
  return 2.0 / n * (std::sin(x / 2.0) / std::tan(x / n) - std::cos(x / 2.0));
}

double BipartiteKernel::odd_form(int n, int r) {
  if (r % 2 == 0) throw Error(ErrorKind::InvalidArgument, "odd-r kernel form needs odd r");
  const int m = (r - 1) / 2;
  const double sign = (((m % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
  return 2.0 * sign / (n * std::tan(kPi * r / n));
}

BipartiteKernel bipartite_kernel(int n) { return BipartiteKernel(n); }

Witness bipartite_witness(const PhaseAssignment& phases) {
  check_phases(phases);
  const int n = phases.n_sites();
  const BipartiteKernel kernel(n);
  std::vector<std::pair<Label, double>> coefs;
  for (Axis a : kAxes) {
    for (int i = 0; i < n; i += 2) {
      for (int j = 1; j < n; j += 2) {
        const double w = kernel(j - i) * std::cos(phases.phi[i][index(a)] - phases.phi[j][index(a)]);
        coefs.emplace_back(Label::two_body(i, j, a, a), w);
      }
    }
  }
  return make_witness(std::move(coefs), -0.5 * n, Orientation::LowerBound, Provenance::Bipartite);
}

double bipartite_witness_value(const CorrelationDataset& ds, const PhaseAssignment& phases) {
  check_sites(ds, phases);
  return eval_witness(bipartite_witness(phases), ds).value;
}

std::array<InequalityResult, 8> spin_squeezing_check(const CollectiveMoments& mo, int n) {
  if (n != mo.n_sites) throw Error(ErrorKind::WrongSize, "moments were averaged over a different site count");
  const double N = n;
  const auto& m = mo.m;
  const auto& c = mo.c;
  const double mx2 = m[0] * m[0];
  const double my2 = m[1] * m[1];
  const double mz2 = m[2] * m[2];
  const std::array<double, 8> lhs{
      c[0] + c[1] + c[2],
      c[0] + c[1] + N * mz2 - (N - 1) * c[2],
      c[1] + c[2] + N * mx2 - (N - 1) * c[0],
      c[2] + c[0] + N * my2 - (N - 1) * c[1],
      c[0] + N * (my2 + mz2) - (N - 1) * (c[1] + c[2]),
      c[1] + N * (mz2 + mx2) - (N - 1) * (c[2] + c[0]),
      c[2] + N * (mx2 + my2) - (N - 1) * (c[0] + c[1]),
      N * (mx2 + my2 + mz2) - (N - 1) * (c[0] + c[1] + c[2]),
  };
  std::array<InequalityResult, 8> out{};
  for (std::size_t k = 0; k < 8; ++k) out[k] = {lhs[k], lhs[k] <= 1.0 + kViolationTol};
  return out;
}

Witness spin_squeezing_witness(int n) {
  if (n < 2) throw Error(ErrorKind::WrongSize, "spin squeezing needs n >= 2");
  const double w = 2.0 / (static_cast<double>(n) * (n - 1));
  std::vector<std::pair<Label, double>> coefs;
  for (Axis a : kAxes) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) coefs.emplace_back(Label::two_body(i, j, a, a), w);
    }
  }
  return make_witness(std::move(coefs), 1.0, Orientation::UpperBound, Provenance::SpinSqueezing);
}

CmcResult cmc_check(const CorrelationDataset& ds, double tol) {
  if (ds.n_sites() != 3) throw Error(ErrorKind::WrongSize, "covariance-matrix check is defined for three qubits");
  Eigen::Matrix<double, 9, 1> c;
  Eigen::Matrix<double, 9, 9> m0 = Eigen::Matrix<double, 9, 9>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (Axis a : kAxes) c(3 * i + index(a)) = require(ds, Label::one_body(i, a));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      for (Axis a : kAxes) {
        for (Axis b : kAxes) {
          const double v = require(ds, Label::two_body(i, j, a, b));
          m0(3 * i + index(a), 3 * j + index(b)) = v;
          m0(3 * j + index(b), 3 * i + index(a)) = v;
        }
      }
    }
  }
  m0 -= c * c.transpose();

  // y = (t, per site rho_xx, rho_yy and the three off-diagonal entries);
  // rho_zz = 1 - rho_xx - rho_yy. Keeping rho_zz free with a trace row makes
  // t redundant with the diagonal and the Schur complement singular.
  // S = m0 + sum_i rho_i - t 1.
  constexpr std::array<std::pair<int, int>, 5> kFree{{{0, 0}, {1, 1}, {0, 1}, {0, 2}, {1, 2}}};
  ConicProblem pb;
  pb.block_dims = {9};
  Eigen::MatrixXd c0 = m0;
  for (int i = 0; i < 3; ++i) c0(3 * i + 2, 3 * i + 2) += 1.0;
  pb.c = {c0};
  pb.a.assign(1 + 15, {});
  for (int k = 0; k < 9; ++k) pb.a[0].push_back({0, k, k, 1.0});
  int var = 1;
  for (int i = 0; i < 3; ++i) {
    for (const auto& [a, b] : kFree) {
      pb.a[var].push_back({0, 3 * i + a, 3 * i + b, -1.0});
      if (a == b) pb.a[var].push_back({0, 3 * i + 2, 3 * i + 2, 1.0});
      ++var;
    }
  }
  pb.b = Eigen::VectorXd::Zero(16);
  pb.b(0) = 1.0;

  // Some entangled pure states stall just short of the tightest tolerance.
  ConicSolution sol;
  for (double t : {1e-10, 1e-9, 1e-8}) {
    SolverOptions opts;
    opts.gap_tol = t;
    opts.feas_tol = t;
    sol = solve_conic(pb, opts);
    if (sol.status == SolveStatus::Optimal) break;
  }
  if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::IterationLimit) {
    throw Error(ErrorKind::InvalidArgument, "covariance-matrix SDP failed: " + to_string(sol.status));
  }
  CmcResult out;
  // The dual value bounds t* from above, so only it can prove infeasibility.
  out.t_star = sol.dual_obj;
  out.feasible = out.t_star >= -tol;
  var = 1;
  for (int i = 0; i < 3; ++i) {
    for (const auto& [a, b] : kFree) {
      out.rho[i](a, b) = out.rho[i](b, a) = sol.y(var);
      ++var;
    }
    out.rho[i](2, 2) = 1.0 - out.rho[i](0, 0) - out.rho[i](1, 1);
  }
  return out;
}

}  // namespace entcert
