#include "entcert/physmodels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "entcert/error.hpp"

namespace entcert {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

bool spin_down(std::uint32_t state, int site) { return ((state >> site) & 1U) != 0; }

/// Action of a single Pauli on basis state `state`: returns (flip mask, phase).
std::pair<std::uint32_t, cplx> pauli_action(Axis a, int site, std::uint32_t state) {
  const std::uint32_t bit = 1U << site;
  switch (a) {
    case Axis::X: return {bit, 1.0};
    case Axis::Y: return {bit, spin_down(state, site) ? cplx(0.0, -1.0) : cplx(0.0, 1.0)};
    case Axis::Z: return {0U, spin_down(state, site) ? -1.0 : 1.0};
  }
  return {0U, 0.0};
}

double expectation(const Eigen::MatrixXd& rho, const Label& label) {
  const auto dim = static_cast<std::uint32_t>(rho.rows());
  cplx acc = 0.0;
  for (std::uint32_t s = 0; s < dim; ++s) {
    auto [mask, phase] = pauli_action(label.a, label.i, s);
    if (!label.is_one_body()) {
      auto [mask_j, phase_j] = pauli_action(label.b, label.j, s);
      mask ^= mask_j;
      phase *= phase_j;
    }
    acc += rho(s, s ^ mask) * phase;
  }
  return acc.real();
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

CorrelationDataset werner_dataset(double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) {
    throw Error(ErrorKind::BadNoiseLevel, "Werner noise " + std::to_string(noise) + " outside [0, 1]");
  }
  const double c = -(1.0 - noise);
  return CorrelationDataset::make(2, {{Label::two_body(0, 1, Axis::X, Axis::X), c},
                                      {Label::two_body(0, 1, Axis::Y, Axis::Y), c},
                                      {Label::two_body(0, 1, Axis::Z, Axis::Z), c}});
}

const std::complex<double>& QuenchAmplitudes::at(int r) const { return phi.at(static_cast<std::size_t>(wrap(r, n))); }

QuenchAmplitudes quench_amplitudes(int n, double t) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "quench ring needs n >= 2");
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "quench time must be >= 0");
  QuenchAmplitudes amps;
  amps.n = n;
  amps.t = t;
  amps.phi.assign(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    cplx sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const double q = 2.0 * kPi * k / n;
      sum += std::polar(1.0, q * r + t * std::cos(q));
    }
    amps.phi[static_cast<std::size_t>(r)] = sum / static_cast<double>(n);
  }
  return amps;
}

CorrelationDataset quench_dataset(const QuenchAmplitudes& amps) {
  double norm = 0.0;
  for (const auto& p : amps.phi) norm += std::norm(p);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw Error(ErrorKind::NotNormalized, "sum |phi|^2 = " + std::to_string(norm));
  }
  const int n = amps.n;
  std::vector<CorrelationDataset::Entry> entries;
  entries.reserve(static_cast<std::size_t>(n + 3 * n * (n - 1) / 2));
  for (int i = 0; i < n; ++i) {
    entries.emplace_back(Label::one_body(i, Axis::Z), clamp_unit(1.0 - 2.0 * std::norm(amps.phi[i])));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double perp = clamp_unit(2.0 * (std::conj(amps.phi[i]) * amps.phi[j]).real());
      const double zz = clamp_unit(1.0 - 2.0 * (std::norm(amps.phi[i]) + std::norm(amps.phi[j])));
      entries.emplace_back(Label::two_body(i, j, Axis::X, Axis::X), perp);
      entries.emplace_back(Label::two_body(i, j, Axis::Y, Axis::Y), perp);
      entries.emplace_back(Label::two_body(i, j, Axis::Z, Axis::Z), zz);
    }
  }
  return CorrelationDataset::make(n, entries);
}

Eigen::MatrixXd ring_hamiltonian(const ModelSpec& spec) {
  if (spec.n < 2) throw Error(ErrorKind::InvalidArgument, "ring needs n >= 2");
  if (spec.n > kMaxEdSites) {
    throw Error(ErrorKind::TooLarge, "exact diagonalization capped at n = " + std::to_string(kMaxEdSites));
  }
  const int n = spec.n;
  const std::uint32_t dim = 1U << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      const double zi = spin_down(s, i) ? -1.0 : 1.0;
      const double zj = spin_down(s, j) ? -1.0 : 1.0;
      if (spec.kind == ModelKind::Heisenberg) {
        h(s, s) += 0.25 * spec.J * zi * zj;
        if (zi != zj) h(s ^ (1U << i) ^ (1U << j), s) += 0.25 * spec.J * 2.0;
      } else {
        h(s, s) -= 0.25 * spec.J * zi * zj;
        h(s ^ (1U << i), s) -= 0.25 * spec.J * spec.g;
      }
    }
  }
  return h;
}

CorrelationDataset thermal_dataset_ed(const ModelSpec& spec, double temperature) {
  if (!(temperature > 0.0)) throw Error(ErrorKind::InvalidArgument, "temperature must be > 0");
  const double T = std::max(temperature, kMinTemperature);
  const Eigen::MatrixXd h = ring_hamiltonian(spec);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const Eigen::VectorXd& e = eig.eigenvalues();
  const double e0 = e.minCoeff();
  Eigen::VectorXd w = (-(e.array() - e0) / T).exp();
  w /= w.sum();
  const Eigen::MatrixXd half = eig.eigenvectors() * w.cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd rho = half * half.transpose();

  const int n = spec.n;
  std::vector<CorrelationDataset::Entry> entries;
  for (int i = 0; i < n; ++i) {
    for (Axis a : kAxes) {
      const Label l = Label::one_body(i, a);
      entries.emplace_back(l, clamp_unit(expectation(rho, l)));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (Axis a : kAxes) {
        for (Axis b : kAxes) {
          const Label l = Label::two_body(i, j, a, b);
          entries.emplace_back(l, clamp_unit(expectation(rho, l)));
        }
      }
    }
  }
  return CorrelationDataset::make(n, entries);
}

std::vector<Vec2> chain_positions(int n) {
  std::vector<Vec2> pos(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) pos[j] = {static_cast<double>(j), 0.0};
  return pos;
}

double structure_factor(const CorrelationDataset& ds, const Vec2& k, Axis axis, const std::vector<Vec2>& positions) {
  const int n = ds.n_sites();
  if (static_cast<int>(positions.size()) != n) throw Error(ErrorKind::WrongSize, "one position per site required");
  double sum = n;  // diagonal terms C_jj^aa = 1
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto c = ds.two_body(i, j, axis, axis);
      if (!c) throw Error(ErrorKind::MissingData, "structure factor needs " + Label::two_body(i, j, axis, axis).str());
      const double phase = k[0] * (positions[j][0] - positions[i][0]) + k[1] * (positions[j][1] - positions[i][1]);
      sum += 2.0 * std::cos(phase) * *c;
    }
  }
  return sum / n;
}

double structure_factor(const CorrelationDataset& ds, double k, Axis axis) {
  return structure_factor(ds, Vec2{k, 0.0}, axis, chain_positions(ds.n_sites()));
}

std::vector<double> commensurate_grid(int n) {
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) grid[m] = 2.0 * kPi * m / n;
  return grid;
}

StructureWitnessOpt optimal_structure_witness(const CorrelationDataset& ds, const std::vector<double>& k_grid) {
  if (k_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty wavevector grid");
  const auto positions = chain_positions(ds.n_sites());
  StructureWitnessOpt out;
  for (Axis a : kAxes) {
    double best = 0.0;
    double best_k = k_grid.front();
    bool first = true;
    for (double k : k_grid) {
      const double s = structure_factor(ds, Vec2{k, 0.0}, a, positions);
      if (first || s < best - 1e-12) {
        best = s;
        best_k = k;
        first = false;
      }
    }
    out.k[index(a)] = best_k;
    out.s[index(a)] = best;
  }
  out.value = out.s[0] + out.s[1] + out.s[2];
  out.entangled = out.value < 2.0 - 1e-9;
  return out;
}

TwoQubitDensity::TwoQubitDensity(const Eigen::Matrix4cd& rho) : rho_(rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw Error(ErrorKind::NotDensity, "matrix not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-12) throw Error(ErrorKind::NotDensity, "trace differs from 1");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) throw Error(ErrorKind::NotDensity, "negative eigenvalue");
}

TwoQubitDensity pair_density_from_quench(const QuenchAmplitudes& amps, int i, int j, double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error(ErrorKind::BadNoiseLevel, "noise outside [0, 1]");
  if (QuenchAmplitudes::wrap(i, amps.n) == QuenchAmplitudes::wrap(j, amps.n)) {
    throw Error(ErrorKind::BadKey, "pair density needs two distinct sites");
  }
  const cplx pi = amps.at(i);
  const cplx pj = amps.at(j);
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  rho(0, 0) = 1.0 - std::norm(pi) - std::norm(pj);
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(1) = pj;  // |up, down>: excitation on site j
  psi(2) = pi;  // |down, up>: excitation on site i
  rho += psi * psi.adjoint();
  rho = (1.0 - noise) * rho + noise * 0.25 * Eigen::Matrix4cd::Identity();
  return TwoQubitDensity(rho);
}

namespace {

double concurrence_of(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix2cd y;
  y << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  Eigen::Matrix4cd yy;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) yy(2 * a + c, 2 * b + d) = y(a, b) * y(c, d);
  const Eigen::Matrix4cd flipped = yy * rho.conjugate() * yy;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(rho);
  const Eigen::Vector4d ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4cd sqrt_rho = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().adjoint();
  Eigen::Matrix4cd m = sqrt_rho * flipped * sqrt_rho;
  m = 0.5 * (m + m.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig_m(m, Eigen::EigenvaluesOnly);
  Eigen::Vector4d l = eig_m.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(l.data(), l.data() + 4, std::greater<>());
  return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

}  // namespace

double wootters_concurrence(const TwoQubitDensity& rho) { return concurrence_of(rho.matrix()); }

double concurrence_noise_threshold(const Eigen::Matrix4cd& rho, double tol) {
  const Eigen::Matrix4cd id4 = 0.25 * Eigen::Matrix4cd::Identity();
  auto conc = [&](double noise) { return concurrence_of((1.0 - noise) * rho + noise * id4); };
  constexpr double kEntangled = 1e-13;
  if (conc(0.0) <= kEntangled) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (conc(mid) > kEntangled) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double quench_concurrence_robustness(const QuenchAmplitudes& amps) {
  double best = 0.0;
  for (int i = 0; i < amps.n; ++i) {
    for (int j = i + 1; j < amps.n; ++j) {
      const auto rho = pair_density_from_quench(amps, i, j, 0.0);
      best = std::max(best, concurrence_noise_threshold(rho.matrix(), 1e-10));
    }
  }
  return best;
}

}  // namespace entcert
