#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "entcert/error.hpp"
#include "entcert/physmodels.hpp"
#include "support/qubits.hpp"

using namespace entcert;
using qubits::CMat;
using qubits::cplx;

namespace {

constexpr double kPi = std::numbers::pi;

nlohmann::json fixtures() {
  std::ifstream f(ENTCERT_FIXTURE_DIR "/regression.json");
  return nlohmann::json::parse(f);
}

double max_diff(const CorrelationDataset& a, const CorrelationDataset& b) {
  REQUIRE(a.size() == b.size());
  double d = 0.0;
  for (const auto& [l, v] : a.entries()) {
    const auto w = b.get(l);
    REQUIRE(w.has_value());
    d = std::max(d, std::abs(v - *w));
  }
  return d;
}

Eigen::Matrix4cd singlet_projector() {
  Eigen::Vector4cd psi(0, 1, -1, 0);
  psi /= std::sqrt(2.0);
  return psi * psi.adjoint();
}

Eigen::Matrix4cd werner_density(double noise) {
  return (1.0 - noise) * singlet_projector() + noise * Eigen::Matrix4cd::Identity() / 4.0;
}

/// max(0, l1 - l2 - l3 - l4), l = sqrt of the spectrum of rho * rho~ (non-Hermitian route).
double concurrence_reference(const Eigen::Matrix4cd& rho) {
  const CMat yy = qubits::op(2, {{0, Axis::Y}, {1, Axis::Y}});
  const CMat tilde = yy * rho.conjugate() * yy;
  const Eigen::ComplexEigenSolver<CMat> es(rho * tilde);
  std::vector<double> l;
  for (Eigen::Index k = 0; k < 4; ++k) l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(k).real())));
  std::sort(l.rbegin(), l.rend());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

CorrelationDataset all_up(int n) {
  std::vector<CorrelationDataset::Entry> e;
  for (int i = 0; i < n; ++i) {
    for (Axis a : kAxes) e.emplace_back(Label::one_body(i, a), a == Axis::Z ? 1.0 : 0.0);
    for (int j = i + 1; j < n; ++j) {
      for (Axis a : kAxes) e.emplace_back(Label::two_body(i, j, a, a), a == Axis::Z ? 1.0 : 0.0);
    }
  }
  return CorrelationDataset::make(n, e);
}

}  // namespace

TEST_SUITE("physmodels") {
  TEST_CASE("werner correlator sum") {
    auto c_of = [](const CorrelationDataset& ds) {
      double c = 0.0;
      for (Axis a : kAxes) c += *ds.two_body(0, 1, a, a);
      return c;
    };
    CHECK(c_of(werner_dataset(0.0)) == -3.0);
    CHECK(c_of(werner_dataset(1.0)) == 0.0);
    CHECK(c_of(werner_dataset(2.0 / 3.0)) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(werner_dataset(1.1), Error);
  }

  TEST_CASE("quench amplitudes") {
    const auto a0 = quench_amplitudes(64, 0.0);
    CHECK(std::abs(a0.at(0) - cplx(1.0, 0.0)) < 1e-14);
    for (int r = 1; r < 64; ++r) CHECK(std::abs(a0.at(r)) < 1e-14);

    const auto a10 = quench_amplitudes(64, 10.0);
    double norm = 0.0;
    for (const auto& p : a10.phi) norm += std::norm(p);
    CHECK(std::abs(norm - 1.0) < 1e-12);

    // Kahan-compensated long double evaluation of the same finite sum.
    long double re = 0, im = 0, cre = 0, cim = 0;
    for (int k = 0; k < 8; ++k) {
      const long double q = 2.0L * std::numbers::pi_v<long double> * k / 8;
      const long double arg = 1.0L * std::cos(q);
      const long double yr = std::cos(arg) - cre, yi = std::sin(arg) - cim;
      const long double tr = re + yr, ti = im + yi;
      cre = (tr - re) - yr;
      cim = (ti - im) - yi;
      re = tr;
      im = ti;
    }
    const auto a8 = quench_amplitudes(8, 1.0);
    CHECK(std::abs(a8.at(0).real() - static_cast<double>(re / 8)) < 1e-15);
    CHECK(std::abs(a8.at(0).imag() - static_cast<double>(im / 8)) < 1e-15);
  }

  TEST_CASE("quench dataset matches full Hilbert-space evolution") {
    const int n = 6;
    const double t = 2.7;
    CMat h = CMat::Zero(1 << n, 1 << n);
    for (int i = 0; i < n; ++i) {
      h -= 0.25 * qubits::op(n, {{i, Axis::X}, {(i + 1) % n, Axis::X}});
      h -= 0.25 * qubits::op(n, {{i, Axis::Y}, {(i + 1) % n, Axis::Y}});
    }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(1 << n);
    psi(1 << (n - 1)) = 1.0;  // site 0 flipped down
    const CMat u = (cplx(0.0, -t) * h).exp();
    const Eigen::VectorXcd pt = u * psi;
    const CMat rho = pt * pt.adjoint();

    const auto ds = quench_dataset(quench_amplitudes(n, t));
    for (const auto& [l, v] : ds.entries()) {
      const double ref = l.is_one_body() ? qubits::expect(rho, qubits::op(n, {{l.i, l.a}}))
                                         : qubits::expect(rho, qubits::op(n, {{l.i, l.a}, {l.j, l.b}}));
      CHECK(std::abs(v - ref) < 1e-10);
    }
    CHECK(ds.size() == static_cast<std::size_t>(n + 3 * n * (n - 1) / 2));

    QuenchAmplitudes bad = quench_amplitudes(n, t);
    bad.phi[0] *= 1.01;
    CHECK_THROWS_AS(quench_dataset(bad), Error);
  }

  TEST_CASE("thermal datasets against Kronecker-product exact diagonalization") {
    const auto heis = thermal_dataset_ed({ModelKind::Heisenberg, 4, 0.0, 1.0}, 0.7);
    CHECK(max_diff(heis, qubits::dataset_of_density(qubits::gibbs(qubits::heisenberg_ring(4, 1.0), 0.7), 4)) < 1e-10);

    const auto ising = thermal_dataset_ed({ModelKind::TransverseIsing, 5, 1.3, 1.0}, 0.4);
    CHECK(max_diff(ising, qubits::dataset_of_density(qubits::gibbs(qubits::ising_ring(5, 1.0, 1.3), 0.4), 5)) < 1e-10);

    const auto low = thermal_dataset_ed({ModelKind::Heisenberg, 2, 0.0, 1.0}, 1e-3);
    for (Axis a : kAxes) CHECK(*low.two_body(0, 1, a, a) == doctest::Approx(-1.0).epsilon(1e-9));

    const auto hot = thermal_dataset_ed({ModelKind::TransverseIsing, 4, 1.0, 1.0}, 1e6);
    for (const auto& [l, v] : hot.entries()) CHECK(std::abs(v) < 1e-5);

    CHECK_THROWS_AS(ring_hamiltonian({ModelKind::Heisenberg, kMaxEdSites + 1, 0.0, 1.0}), Error);
  }

  TEST_CASE("heisenberg n=8 regression constant") {
    const double frozen = fixtures()["heisenberg_n8_T0.5_nn_czz"].get<double>();
    const auto ds = thermal_dataset_ed({ModelKind::Heisenberg, 8, 0.0, 1.0}, 0.5);
    CHECK(std::abs(*ds.two_body(0, 1, Axis::Z, Axis::Z) - frozen) < 1e-12);
    const CMat rho = qubits::gibbs(qubits::heisenberg_ring(8, 1.0), 0.5);
    CHECK(std::abs(qubits::expect(rho, qubits::op(8, {{0, Axis::Z}, {1, Axis::Z}})) - frozen) < 1e-10);
  }

  TEST_CASE("structure factors") {
    const auto up = all_up(6);
    CHECK(structure_factor(up, 0.0, Axis::Z) == doctest::Approx(6.0));
    for (double k : commensurate_grid(6)) {
      if (k != 0.0) CHECK(structure_factor(up, k, Axis::X) == doctest::Approx(1.0));
    }
    const auto s = werner_dataset(0.0);
    CHECK(structure_factor(s, kPi, Axis::Z) == doctest::Approx(2.0));

    const auto opt_up = optimal_structure_witness(up, commensurate_grid(6));
    CHECK(opt_up.value == doctest::Approx(2.0));
    CHECK_FALSE(opt_up.entangled);

    const auto opt_s = optimal_structure_witness(s, {0.0, kPi});
    for (int a = 0; a < 3; ++a) {
      CHECK(opt_s.k[a] == 0.0);
      CHECK(opt_s.s[a] == doctest::Approx(0.0));
    }
    CHECK(opt_s.entangled);

    const auto ising = thermal_dataset_ed({ModelKind::TransverseIsing, 8, 1.0, 1.0}, 0.05);
    const auto opt = optimal_structure_witness(ising, commensurate_grid(8));
    CHECK(opt.k[0] == doctest::Approx(kPi));
    CHECK(opt.k[1] == 0.0);
    CHECK(opt.k[2] == doctest::Approx(kPi));

    const auto heis = thermal_dataset_ed({ModelKind::Heisenberg, 8, 0.0, 1.0}, 0.5);
    double s0 = 0.0;
    for (Axis a : kAxes) s0 += structure_factor(heis, 0.0, a);
    CHECK(s0 < 2.0);
  }

  TEST_CASE("heisenberg S_0 crossing temperature regression") {
    const double frozen = fixtures()["heisenberg_n8_s0_crossing_temperature"].get<double>();
    auto s0 = [](double T) {
      const auto ds = thermal_dataset_ed({ModelKind::Heisenberg, 8, 0.0, 1.0}, T);
      double v = 0.0;
      for (Axis a : kAxes) v += structure_factor(ds, 0.0, a);
      return v;
    };
    CHECK(s0(frozen - 1e-6) < 2.0);
    CHECK(s0(frozen + 1e-6) > 2.0);
  }

  TEST_CASE("two-qubit densities and concurrence") {
    const auto amps0 = quench_amplitudes(8, 0.0);
    const auto up = pair_density_from_quench(amps0, 1, 2, 0.0);
    CHECK(std::abs(up.matrix()(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(up.matrix().trace() - cplx(1.0)) < 1e-14);

    const auto mixed = pair_density_from_quench(quench_amplitudes(8, 3.0), 1, 2, 1.0);
    CHECK((mixed.matrix() - Eigen::Matrix4cd::Identity() / 4.0).cwiseAbs().maxCoeff() < 1e-14);

    const auto amps = quench_amplitudes(64, 10.0);
    const auto pair = pair_density_from_quench(amps, -10, 10, 0.0);
    const double closed = 2.0 * std::abs(amps.at(-10)) * std::abs(amps.at(10));
    CHECK(std::abs(wootters_concurrence(pair) - closed) < 1e-10);
    CHECK(std::abs(concurrence_reference(pair.matrix()) - closed) < 1e-8);

    CHECK(wootters_concurrence(TwoQubitDensity(singlet_projector())) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(wootters_concurrence(TwoQubitDensity(Eigen::Matrix4cd::Identity() / 4.0)) == doctest::Approx(0.0));
    CHECK(wootters_concurrence(TwoQubitDensity(werner_density(0.5))) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(concurrence_reference(werner_density(0.5)) == doctest::Approx(0.25).epsilon(1e-8));

    CHECK(concurrence_noise_threshold(singlet_projector()) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(concurrence_noise_threshold(Eigen::Matrix4cd::Identity() / 4.0) == 0.0);

    Eigen::Matrix4cd bad = Eigen::Matrix4cd::Identity() / 2.0;
    CHECK_THROWS_AS(TwoQubitDensity{bad}, Error);
    Eigen::Matrix4cd neg = Eigen::Matrix4cd::Zero();
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(TwoQubitDensity{neg}, Error);
  }
}
