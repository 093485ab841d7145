#pragma once

// Dataset generators for the reference scenarios: Werner pair, single
// spin-flip quench on an XX ring, thermal states of small spin rings by exact
// diagonalization. Also structure factors and two-qubit concurrence.

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "entcert/corrdata.hpp"

namespace entcert {

/// Singlet mixed with white noise: C_12^aa = -(1 - noise), no one-body data.
CorrelationDataset werner_dataset(double noise);

/// Single-excitation amplitudes phi_r(t) on a ring of n sites. Storage index
/// s = r mod n, so s = 0 is the flipped site.
struct QuenchAmplitudes {
  int n = 0;
  double t = 0.0;
  std::vector<std::complex<double>> phi;

  /// Signed ring coordinate r in (-n/2, n/2] (any integer accepted, taken mod n).
  const std::complex<double>& at(int r) const;
  static int wrap(int r, int n) { return ((r % n) + n) % n; }
};

QuenchAmplitudes quench_amplitudes(int n, double t);

/// C_i^Z, C_ij^XX = C_ij^YY = 2 Re(phi_i* phi_j), C_ij^ZZ for every pair.
CorrelationDataset quench_dataset(const QuenchAmplitudes& amps);

enum class ModelKind { Heisenberg, TransverseIsing };

struct ModelSpec {
  ModelKind kind = ModelKind::Heisenberg;
  int n = 2;
  double g = 0.0;  ///< transverse field (Ising only)
  double J = 1.0;
};

inline constexpr int kMaxEdSites = 14;
inline constexpr double kMinTemperature = 1e-3;

/// Periodic-ring Hamiltonian in the computational (Z) basis, real symmetric.
Eigen::MatrixXd ring_hamiltonian(const ModelSpec& spec);

/// All one- and two-body correlators of exp(-H/T)/Z by dense exact
/// diagonalization. T below kMinTemperature is raised to it.
CorrelationDataset thermal_dataset_ed(const ModelSpec& spec, double temperature);

using Vec2 = std::array<double, 2>;

/// Chain positions (j, 0) for j = 0..n-1.
std::vector<Vec2> chain_positions(int n);

/// S_k^a = N^-1 sum_{j,j'} e^{ik.(r_j' - r_j)} C_jj'^aa with C_jj^aa = 1.
double structure_factor(const CorrelationDataset& ds, const Vec2& k, Axis axis, const std::vector<Vec2>& positions);
double structure_factor(const CorrelationDataset& ds, double k, Axis axis);

struct StructureWitnessOpt {
  std::array<double, 3> k{};  ///< argmin per axis (X, Y, Z)
  std::array<double, 3> s{};  ///< minimal S per axis
  double value = 0.0;         ///< sum of the minima
  bool entangled = false;     ///< value < 2
};

/// Per-axis minimisation of S_k^a over a grid of chain wavevectors. Ties
/// resolve to the first grid point.
StructureWitnessOpt optimal_structure_witness(const CorrelationDataset& ds, const std::vector<double>& k_grid);

/// Commensurate chain grid {2 pi m / n}, m = 0..n-1.
std::vector<double> commensurate_grid(int n);

/// Validated two-qubit density matrix (basis |00>,|01>,|10>,|11> with 0 = up).
class TwoQubitDensity {
 public:
  explicit TwoQubitDensity(const Eigen::Matrix4cd& rho);
  const Eigen::Matrix4cd& matrix() const { return rho_; }

 private:
  Eigen::Matrix4cd rho_;
};

/// Reduced state of the single-excitation pure state on sites (i, j) (signed
/// ring coordinates), mixed with `noise` * identity/4.
TwoQubitDensity pair_density_from_quench(const QuenchAmplitudes& amps, int i, int j, double noise);

/// max(0, l1 - l2 - l3 - l4) from the spin-flipped spectrum.
double wootters_concurrence(const TwoQubitDensity& rho);

/// Smallest white-noise fraction at which the concurrence of the noisy pair
/// state vanishes (bisection to `tol`). 0 if the pair is not entangled.
double concurrence_noise_threshold(const Eigen::Matrix4cd& rho, double tol = 1e-12);

/// Max over all pairs of the quench of the concurrence noise threshold.
double quench_concurrence_robustness(const QuenchAmplitudes& amps);

}  // namespace entcert
