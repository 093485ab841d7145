#include <doctest.h>

#include <fstream>
#include <map>
#include <random>

#include <json.hpp>

#include "entcert/certify.hpp"
#include "entcert/error.hpp"
#include "entcert/physmodels.hpp"
#include "entcert/seporacle.hpp"
#include "support/qubits.hpp"

using namespace entcert;

namespace {

void check_certificate(const Certification& c) {
  const SdpSolution& s = c.solution;
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.duality_gap <= 1e-6);
  CHECK(std::abs(s.w_dot_c - 1.0) <= 1e-6);
  CHECK(s.dual_residual <= 1e-8);
  // lambda* = w.C - rhs.nu + fixed, with w_pauli = -nu.
  double rhs_term = 0.0;
  for (std::size_t j = 0; j < s.w_pauli.size(); ++j) rhs_term += c.problem.pauli_rhs(j) * s.w_pauli[j];
  CHECK(std::abs(s.w_dot_c + rhs_term + s.fixed_term - s.lambda_star) <= 1e-6);
}

CorrelationDataset isotropic_pair(double c) {
  return CorrelationDataset::make(2, {{Label::two_body(0, 1, Axis::X, Axis::X), c / 3.0},
                                      {Label::two_body(0, 1, Axis::Y, Axis::Y), c / 3.0},
                                      {Label::two_body(0, 1, Axis::Z, Axis::Z), c / 3.0}});
}

}  // namespace

TEST_SUITE("certify") {
  TEST_CASE("werner singlet") {
    for (auto scheme : {std::optional<SchemeKind>{}, std::optional<SchemeKind>{SchemeKind::General}}) {
      CertifyOptions o;
      o.scheme = scheme;
      const auto c = certify(werner_dataset(0.0), o);
      CHECK(c.entangled);
      CHECK(std::abs(c.solution.lambda_star - 2.0 / 3.0) <= 1e-6);
      check_certificate(c);

      const Witness w = extract_witness(c.solution, c.problem);
      REQUIRE(w.coefficients.size() == 3);
      for (const auto& [l, v] : w.coefficients) CHECK(std::abs(v + 1.0 / 3.0) <= 1e-6);
      CHECK(std::abs(w.separable_bound - 1.0 / 3.0) <= 1e-6);
      CHECK(w.orientation == Orientation::UpperBound);
      CHECK(w.provenance == Provenance::DualCertificate);

      const auto on_data = eval_witness(w, werner_dataset(0.0));
      CHECK(std::abs(on_data.value - 1.0) <= 1e-6);
      CHECK(on_data.violated);
      CHECK(eval_witness(w, werner_dataset(1.0)).value == 0.0);
      const auto boundary = eval_witness(w, scale_noise(werner_dataset(0.0), c.solution.lambda_star));
      CHECK(std::abs(boundary.value - (1.0 - c.solution.lambda_star)) <= 1e-6);
      CHECK_FALSE(boundary.violated);
    }
    CertifyOptions l2;
    l2.level = 2;
    CHECK(std::abs(certify(werner_dataset(0.0), l2).solution.lambda_star - 2.0 / 3.0) <= 1e-6);
  }

  TEST_CASE("two-qubit verdict matches |c| > 1") {
    for (double c : {-3.0, -2.0, -1.2, -0.8, 0.0, 0.5, 1.0, 1.1, 2.5, 3.0}) {
      const auto cert = certify(isotropic_pair(c));
      REQUIRE(cert.solution.status == SolveStatus::Optimal);
      CHECK(cert.entangled == (std::abs(c) > 1.0));
      if (std::abs(c) > 1.0) CHECK(std::abs(cert.solution.lambda_star - (1.0 - 1.0 / std::abs(c))) <= 1e-6);
    }
  }

  TEST_CASE("separable inputs") {
    const auto empty = certify(CorrelationDataset::make(3, {}));
    REQUIRE(empty.solution.status == SolveStatus::Optimal);
    CHECK(std::abs(empty.solution.lambda_star) <= 1e-7);
    CHECK_FALSE(empty.entangled);

    std::mt19937_64 rng(8);
    for (int n : {2, 4}) {
      const auto c = certify(dataset_of(random_product_state(n, rng)));
      REQUIRE(c.solution.status == SolveStatus::Optimal);
      CHECK(c.solution.lambda_star <= 1e-7);
      CHECK_THROWS_AS(extract_witness(c.solution, c.problem), Error);
    }
  }

  TEST_CASE("quench n=64 at t=10") {
    std::ifstream f(ENTCERT_FIXTURE_DIR "/regression.json");
    const double frozen = nlohmann::json::parse(f)["quench_n64_lambda_star"]["10"].get<double>();
    const auto ds = quench_dataset(quench_amplitudes(64, 10.0));
    const auto c = certify(ds);
    CHECK(c.scheme.kind == SchemeKind::TransverseSymmetric);
    CHECK(c.problem.gamma_dim() == 193);
    CHECK(c.entangled);
    CHECK(c.solution.duality_gap <= 1e-8);
    CHECK(std::abs(c.solution.lambda_star - frozen) <= 1e-7);
    check_certificate(c);

    const Witness w = extract_witness(c.solution, c.problem);
    std::vector<Label> labels;
    for (const auto& [l, v] : w.coefficients) labels.push_back(l);
    CHECK(labels == ds.labels());
    // Transverse symmetry: equal weights on XX and YY of every pair.
    const std::map<Label, double> weights(w.coefficients.begin(), w.coefficients.end());
    for (const auto& [l, v] : weights) {
      if (!l.is_one_body() && l.a == Axis::X) CHECK(std::abs(v - weights.at(Label::two_body(l.i, l.j, Axis::Y, Axis::Y))) < 1e-12);
    }
  }

  TEST_CASE("symmetric schemes agree with the general relaxation") {
    const auto q = quench_dataset(quench_amplitudes(12, 4.0));
    const auto ising = thermal_dataset_ed({ModelKind::TransverseIsing, 6, 1.0, 1.0}, 0.2);
    const auto heis = thermal_dataset_ed({ModelKind::Heisenberg, 6, 0.0, 1.0}, 0.3);
    for (const auto* ds : {&q, &ising, &heis}) {
      const auto automatic = certify(*ds);
      CertifyOptions o;
      o.scheme = SchemeKind::General;
      const auto general = certify(*ds, o);
      CHECK(automatic.scheme.kind != SchemeKind::General);
      CHECK(std::abs(automatic.solution.lambda_star - general.solution.lambda_star) <= 1e-6);
      if (automatic.entangled) check_certificate(automatic);
      if (general.entangled) check_certificate(general);
    }
  }

  TEST_CASE("partial transposition invariance and level monotonicity") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
      const auto full = qubits::dataset_of_density(qubits::random_noisy(3, 0.3 * u(rng), rng), 3);
      const auto ds = full.filtered([&](const Label&) { return u(rng) < 0.8; });
      std::vector<int> subset;
      for (int s = 0; s < 3; ++s) {
        if (u(rng) < 0.5) subset.push_back(s);
      }
      const auto c = certify(ds);
      const auto pt = certify(partial_transpose(ds, subset));
      CHECK(std::abs(c.solution.lambda_star - pt.solution.lambda_star) <= 1e-6);

      CertifyOptions l2;
      l2.level = 2;
      const auto c2 = certify(full, l2);
      const auto c1 = certify(full);
      REQUIRE(c2.solution.status == SolveStatus::Optimal);
      CHECK(c2.solution.lambda_star >= c1.solution.lambda_star - 1e-7);
      if (c2.entangled) check_certificate(c2);
    }
  }

  TEST_CASE("hybrid level") {
    std::mt19937_64 rng(5);
    const auto ds = qubits::dataset_of_density(qubits::random_noisy(2, 0.1, rng), 2);
    CertifyOptions o;
    o.extra_monomials = {Monomial::var(0, Axis::X) * Monomial::var(1, Axis::X)};
    const auto h = certify(ds, o);
    const auto c1 = certify(ds);
    REQUIRE(h.solution.status == SolveStatus::Optimal);
    CHECK(h.problem.layout.dim() == 8);
    CHECK(h.solution.lambda_star >= c1.solution.lambda_star - 1e-7);
  }
}
