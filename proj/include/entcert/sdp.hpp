#pragma once

// Dense primal-dual interior-point solver for block-diagonal linear matrix
// inequalities with linear equality constraints:
//
//   max  b'y   s.t.  S = C - sum_i y_i A_i  >= 0,   E y = f
//   min  <C,X> + f'nu   s.t.  <A_i,X> + (E'nu)_i = b_i,   X >= 0
//
// HKM search direction with a Mehrotra predictor-corrector, infeasible start.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace entcert {

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  double initial_point_scale = 1.0;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, NumericalTrouble, IterationLimit };

std::string to_string(SolveStatus s);

/// Upper-triangle entry (r <= c) of one block of a symmetric matrix.
struct SymEntry {
  int block = 0;
  int r = 0;
  int c = 0;
  double v = 0.0;
};

struct ConicProblem {
  std::vector<int> block_dims;
  std::vector<Eigen::MatrixXd> c;           ///< one dense symmetric matrix per block
  std::vector<std::vector<SymEntry>> a;     ///< one sparse symmetric matrix per variable
  Eigen::VectorXd b;
  Eigen::MatrixXd eq;                       ///< rows x variables, may have zero rows
  Eigen::VectorXd eq_rhs;
  std::vector<Eigen::MatrixXd> s0;          ///< optional starting slack, one per block

  int n_vars() const { return static_cast<int>(a.size()); }
};

struct IterationRecord {
  int iteration = 0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  double slack_infeas = 0.0;
  double cert_infeas = 0.0;
  double mu = 0.0;
  double step_x = 0.0;
  double step_s = 0.0;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalTrouble;
  Eigen::VectorXd y;
  Eigen::VectorXd nu;
  std::vector<Eigen::MatrixXd> s;
  std::vector<Eigen::MatrixXd> x;
  double primal_obj = 0.0;  ///< b'y
  double dual_obj = 0.0;    ///< <C,X> + f'nu
  double gap = 0.0;         ///< |dual_obj - primal_obj|
  double slack_infeas = 0.0;
  double cert_infeas = 0.0;
  int iterations = 0;
  std::vector<IterationRecord> trace;
};

ConicSolution solve_conic(const ConicProblem& problem, const SolverOptions& opts = {});

/// <A, M> for a sparse symmetric A against dense blocks.
double inner(const std::vector<SymEntry>& a, const std::vector<Eigen::MatrixXd>& m);

}  // namespace entcert
