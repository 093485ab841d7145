#pragma once

// Noise-robustness SDP: min lambda such that the moment matrix built from
// (1 - lambda) C admits a PSD completion satisfying the Pauli constraints.

#include <vector>

#include <Eigen/Dense>

#include "entcert/corrdata.hpp"
#include "entcert/momentmat.hpp"
#include "entcert/sdp.hpp"
#include "entcert/witness.hpp"

namespace entcert {

inline constexpr double kDetectionThreshold = 1e-6;

struct PatternEntry {
  int r = 0;
  int c = 0;  ///< r <= c, indices into the solved Gamma block
  double coef = 0.0;
};

struct SdpProblem {
  MomentMatrixLayout layout;
  std::vector<int> kept_rows;      ///< basis rows kept in the Gamma block
  std::vector<Label> labels;       ///< data label per index alpha
  Eigen::VectorXd data_values;     ///< C_alpha
  std::vector<std::vector<PatternEntry>> label_patterns;  ///< D_alpha
  Eigen::MatrixXd constant_part;   ///< G0: constant entries of the Gamma block
  Eigen::MatrixXd pauli_label;     ///< L_j(D_alpha): constraints x labels
  Eigen::MatrixXd pauli_var;       ///< L_j(F_k): constraints x layout vars
  Eigen::VectorXd pauli_rhs;
  Eigen::MatrixXd eq_map;          ///< solver equality rows as combinations of layout constraints
  std::vector<int> var_of_column;  ///< solver variable k >= 1 -> layout var id
  ConicProblem conic;

  int gamma_dim() const { return static_cast<int>(kept_rows.size()); }
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalTrouble;
  double lambda_star = 0.0;
  Eigen::MatrixXd gamma;        ///< completed moment matrix on the kept rows
  Eigen::MatrixXd dual_matrix;  ///< Z, the certificate block
  double dual_scalar = 0.0;     ///< xi = 1 - w.C
  std::vector<double> w_data;   ///< aligned with SdpProblem::labels
  std::vector<double> w_pauli;  ///< one per layout constraint
  double fixed_term = 0.0;      ///< lambda* = w.C + rhs.w_pauli + fixed_term at optimality
  double w_dot_c = 0.0;
  double duality_gap = 0.0;
  double primal_objective = 0.0;  ///< lambda from the moment side
  double dual_objective = 0.0;    ///< w.C + rhs.w_pauli + fixed_term
  double dual_residual = 0.0;     ///< feasibility violation of the extracted certificate
  int iterations = 0;
  std::vector<IterationRecord> trace;
};

SdpProblem assemble_primal(const MomentMatrixLayout& layout, const CorrelationDataset& ds);

SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts = {});

/// Throws NotEntangled when the solve did not certify lambda* above the
/// threshold.
Witness extract_witness(const SdpSolution& solution, const SdpProblem& problem,
                        double threshold = kDetectionThreshold);

struct CertifyOptions {
  int level = 1;
  std::vector<Monomial> extra_monomials;
  /// Empty: automatic selection (General above level 1).
  std::optional<SchemeKind> scheme;
  SolverOptions solver;
};

struct Certification {
  SymmetryScheme scheme;
  SdpProblem problem;
  SdpSolution solution;
  bool entangled = false;
};

/// Layout, assembly and solve in one call.
Certification certify(const CorrelationDataset& ds, const CertifyOptions& opts = {});

}  // namespace entcert
