#pragma once

// Separable side: product states, their mixtures and the variational
// maximisation of witnesses over product states.

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "entcert/corrdata.hpp"
#include "entcert/witness.hpp"

namespace entcert {

using Bloch = std::array<double, 3>;

class ProductState {
 public:
  /// Every vector must have unit norm to 1e-12 (InvalidArgument otherwise).
  explicit ProductState(std::vector<Bloch> bloch);

  int n_sites() const { return static_cast<int>(bloch_.size()); }
  const std::vector<Bloch>& bloch() const { return bloch_; }
  const Bloch& operator[](int i) const { return bloch_[i]; }

 private:
  std::vector<Bloch> bloch_;
};

class SeparableMixture {
 public:
  /// Weights >= 0 summing to 1 (1e-12), equal site counts.
  explicit SeparableMixture(std::vector<std::pair<double, ProductState>> components);

  int n_sites() const { return components_.front().second.n_sites(); }
  const std::vector<std::pair<double, ProductState>>& components() const { return components_; }

 private:
  std::vector<std::pair<double, ProductState>> components_;
};

/// Full one- and two-body dataset of the mixture.
CorrelationDataset dataset_of(const SeparableMixture& mixture);
CorrelationDataset dataset_of(const ProductState& state);

/// 53-bit uniform double in [0, 1) from one engine draw.
double uniform01(std::mt19937_64& rng);
Bloch random_bloch(std::mt19937_64& rng);
ProductState random_product_state(int n, std::uint64_t seed);
ProductState random_product_state(int n, std::mt19937_64& rng);
/// `components` random product states with Dirichlet(1) weights.
SeparableMixture random_mixture(int n, int components, std::mt19937_64& rng);

struct OracleOptions {
  int restarts = 1000;
  int max_iter = 2000;
  double grad_tol = 1e-10;
  std::uint64_t seed = 1;
};

struct OracleResult {
  double best_value = 0.0;
  ProductState best_state{std::vector<Bloch>{{0.0, 0.0, 1.0}}};
  int best_restart = 0;
  int converged_restarts = 0;
};

/// Value of the witness (offset + sum w C) on a product state.
double witness_value(const Witness& w, const ProductState& state);

/// Local ascent of the witness on the product of spheres from `restarts`
/// random starts. Maximises for UpperBound witnesses and minimises for
/// LowerBound ones, i.e. always pushes towards violation.
OracleResult max_over_product_states(const Witness& w, int n, const OracleOptions& opts = {});

}  // namespace entcert
