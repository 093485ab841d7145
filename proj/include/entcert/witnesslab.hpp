#pragma once

// Analytic witness families: general-phase, structure-factor, bipartite
// interface witnesses, generalized spin squeezing and the covariance-matrix
// criterion.

#include <array>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "entcert/corrdata.hpp"
#include "entcert/physmodels.hpp"
#include "entcert/witness.hpp"

namespace entcert {

/// phi[j][a]: phase of axis a on site j, radians.
struct PhaseAssignment {
  std::vector<std::array<double, 3>> phi;

  static PhaseAssignment zeros(int n);
  /// phi_X = phi_Z = pi on odd sites, everything else 0.
  static PhaseAssignment ising_staggered(int n);
  int n_sites() const { return static_cast<int>(phi.size()); }
};

/// sum_a sum_{j != j'} e^{i[phi_a(j') - phi_a(j)]} C_jj'^aa >= -N.
Witness phase_witness(const PhaseAssignment& phases);
double phase_witness_value(const CorrelationDataset& ds, const PhaseAssignment& phases);

/// S_kX^X + S_kY^Y + S_kZ^Z >= 2 as a linear witness (offset 3).
Witness structure_witness(int n, const std::array<Vec2, 3>& k, const std::vector<Vec2>& positions);
double structure_witness_value(const CorrelationDataset& ds, const std::array<Vec2, 3>& k,
                               const std::vector<Vec2>& positions);
/// Separable bound of the structure-factor witness for spin-s particles.
inline double spin_s_structure_bound(int n, double s) { return n * s; }
inline constexpr double kQubitStructureBound = 2.0;

/// K_r for the even|odd interface witness.
class BipartiteKernel {
 public:
  /// n divisible by 4, otherwise BadSize.
  explicit BipartiteKernel(int n);

  int n() const { return n_; }
  /// Closed form; defined for every integer r, tabulated for odd |r| < n.
  double operator()(int r) const;
  const std::map<int, double>& odd_values() const { return odd_; }

  static double direct_sum(int n, int r);
  static double closed_form(int n, int r);
  /// 2 (-1)^((r-1)/2) / (N tan(pi r / N)), odd r only.
  static double odd_form(int n, int r);

 private:
  int n_ = 0;
  std::map<int, double> odd_;
};

BipartiteKernel bipartite_kernel(int n);

/// sum_a sum_{i even} sum_{j odd} K_{j-i} C_ij^aa cos[phi_a(i) - phi_a(j)] >= -N/2.
Witness bipartite_witness(const PhaseAssignment& phases);
double bipartite_witness_value(const CorrelationDataset& ds, const PhaseAssignment& phases);

struct InequalityResult {
  double value = 0.0;  ///< left-hand side; separable states give value <= 1
  bool satisfied = true;
};

/// The eight permutation-invariant inequalities, in the usual order.
std::array<InequalityResult, 8> spin_squeezing_check(const CollectiveMoments& moments, int n);

/// Linear form of the first inequality, C_xx + C_yy + C_zz <= 1.
Witness spin_squeezing_witness(int n);

struct CmcResult {
  bool feasible = false;
  double t_star = 0.0;  ///< largest t with block(rho, C) - c c' - t 1 >= 0 (dual value)
  std::array<Eigen::Matrix3d, 3> rho{};
};

inline constexpr double kCmcTolerance = 1e-9;

/// Covariance-matrix criterion for three qubits (needs all one-body and all
/// nine axis pairs per pair). Infeasible implies entanglement.
CmcResult cmc_check(const CorrelationDataset& ds, double tol = kCmcTolerance);

}  // namespace entcert
