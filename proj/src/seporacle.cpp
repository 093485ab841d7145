#include "entcert/seporacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "entcert/error.hpp"

namespace entcert {

namespace {

constexpr double kMaxStep = 1.0;
constexpr double kArmijo = 0.1;

double norm(const Bloch& b) { return std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]); }

/// value = offset + h.n + sum_{pairs} n_i' J_ij n_j, stored as a dense
/// symmetric coupling over the 3n stacked components.
struct Multilinear {
  double offset = 0.0;
  Eigen::VectorXd h;
  Eigen::MatrixXd j;  // symmetric, zero diagonal blocks

  Multilinear(const Witness& w, int n, double sign) : h(Eigen::VectorXd::Zero(3 * n)), j(Eigen::MatrixXd::Zero(3 * n, 3 * n)) {
    offset = sign * w.offset;
    for (const auto& [label, coef] : w.coefficients) {
      if (label.max_site() >= n) throw Error(ErrorKind::BadKey, "witness label " + label.str() + " outside the sites");
      if (label.is_one_body()) {
        h(3 * label.i + index(label.a)) += sign * coef;
      } else {
        const int r = 3 * label.i + index(label.a);
        const int c = 3 * label.j + index(label.b);
        j(r, c) += 0.5 * sign * coef;
        j(c, r) += 0.5 * sign * coef;
      }
    }
  }

  double value(const Eigen::VectorXd& x) const { return offset + h.dot(x) + x.dot(j * x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return h + 2.0 * (j * x); }
};

void normalize_sites(Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); i += 3) x.segment<3>(i).normalize();
}

/// Component of g tangent to every sphere at x.
Eigen::VectorXd tangent(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  Eigen::VectorXd t = g;
  for (Eigen::Index i = 0; i < x.size(); i += 3) t.segment<3>(i) -= g.segment<3>(i).dot(x.segment<3>(i)) * x.segment<3>(i);
  return t;
}

/// Tangent gradient with each site scaled by its local field |g_i|, so that
/// weakly coupled sites move at the same angular rate as strong ones.
Eigen::VectorXd scaled_direction(const Eigen::VectorXd& t, const Eigen::VectorXd& g) {
  Eigen::VectorXd d = t;
  for (Eigen::Index i = 0; i < t.size(); i += 3) {
    const double field = g.segment<3>(i).norm();
    if (field > 0.0) d.segment<3>(i) /= field;
  }
  return d;
}

}  // namespace

ProductState::ProductState(std::vector<Bloch> bloch) : bloch_(std::move(bloch)) {
  if (bloch_.empty()) throw Error(ErrorKind::InvalidArgument, "product state needs at least one site");
  for (std::size_t i = 0; i < bloch_.size(); ++i) {
    if (std::abs(norm(bloch_[i]) - 1.0) > 1e-12) {
      throw Error(ErrorKind::InvalidArgument, "Bloch vector of site " + std::to_string(i) + " is not a unit vector");
    }
  }
}

SeparableMixture::SeparableMixture(std::vector<std::pair<double, ProductState>> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorKind::InvalidArgument, "mixture needs at least one component");
  double total = 0.0;
  for (const auto& [p, state] : components_) {
    if (!(p >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative mixture weight");
    if (state.n_sites() != components_.front().second.n_sites()) {
      throw Error(ErrorKind::WrongSize, "mixture components differ in site count");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "mixture weights do not sum to 1");
}

CorrelationDataset dataset_of(const SeparableMixture& mixture) {
  const int n = mixture.n_sites();
  std::vector<double> one(static_cast<std::size_t>(3 * n), 0.0);
  std::vector<double> two(static_cast<std::size_t>(9 * n * n), 0.0);
  for (const auto& [p, state] : mixture.components()) {
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) {
        one[3 * i + a] += p * state[i][a];
        for (int j = i + 1; j < n; ++j) {
          for (int b = 0; b < 3; ++b) two[((i * n + j) * 3 + a) * 3 + b] += p * state[i][a] * state[j][b];
        }
      }
    }
  }
  std::vector<CorrelationDataset::Entry> entries;
  for (int i = 0; i < n; ++i) {
    for (Axis a : kAxes) entries.emplace_back(Label::one_body(i, a), std::clamp(one[3 * i + index(a)], -1.0, 1.0));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (Axis a : kAxes) {
        for (Axis b : kAxes) {
          const double v = two[((i * n + j) * 3 + index(a)) * 3 + index(b)];
          entries.emplace_back(Label::two_body(i, j, a, b), std::clamp(v, -1.0, 1.0));
        }
      }
    }
  }
  return CorrelationDataset::make(n, entries);
}

CorrelationDataset dataset_of(const ProductState& state) {
  return dataset_of(SeparableMixture({{1.0, state}}));
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Bloch random_bloch(std::mt19937_64& rng) {
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  Bloch b{r * std::cos(phi), r * std::sin(phi), z};
  const double nb = norm(b);
  for (double& v : b) v /= nb;
  return b;
}

ProductState random_product_state(int n, std::mt19937_64& rng) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "product state needs n >= 1");
  std::vector<Bloch> bloch(static_cast<std::size_t>(n));
  for (auto& b : bloch) b = random_bloch(rng);
  return ProductState(std::move(bloch));
}

ProductState random_product_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_product_state(n, rng);
}

SeparableMixture random_mixture(int n, int components, std::mt19937_64& rng) {
  if (components < 1) throw Error(ErrorKind::InvalidArgument, "mixture needs at least one component");
  std::vector<double> w(static_cast<std::size_t>(components));
  double total = 0.0;
  for (double& v : w) {
    v = -std::log(1.0 - uniform01(rng));
    total += v;
  }
  std::vector<std::pair<double, ProductState>> comps;
  double acc = 0.0;
  for (int k = 0; k < components; ++k) {
    const double p = k + 1 == components ? 1.0 - acc : w[k] / total;
    acc += p;
    comps.emplace_back(std::max(0.0, p), random_product_state(n, rng));
  }
  return SeparableMixture(std::move(comps));
}

double witness_value(const Witness& w, const ProductState& state) {
  double v = w.offset;
  for (const auto& [label, coef] : w.coefficients) {
    if (label.max_site() >= state.n_sites()) throw Error(ErrorKind::BadKey, "witness label " + label.str() + " outside the state");
    if (label.is_one_body()) {
      v += coef * state[label.i][index(label.a)];
    } else {
      v += coef * state[label.i][index(label.a)] * state[label.j][index(label.b)];
    }
  }
  return v;
}

OracleResult max_over_product_states(const Witness& w, int n, const OracleOptions& opts) {
  if (opts.restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be >= 1");
  const double sign = w.orientation == Orientation::UpperBound ? 1.0 : -1.0;
  const Multilinear f(w, n, sign);
  std::mt19937_64 rng(opts.seed);

  OracleResult out;
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    Eigen::VectorXd x(3 * n);
    for (int i = 0; i < n; ++i) {
      const Bloch b = random_bloch(rng);
      x.segment<3>(3 * i) << b[0], b[1], b[2];
    }
    double fx = f.value(x);
    double step = 1.0;
    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      const Eigen::VectorXd grad = f.gradient(x);
      const Eigen::VectorXd g = tangent(x, grad);
      if (g.norm() < opts.grad_tol) {
        converged = true;
        break;
      }
      const Eigen::VectorXd d = scaled_direction(g, grad);
      bool moved = false;
      while (step > 1e-14) {
        Eigen::VectorXd trial = x + step * d;
        normalize_sites(trial);
        const double ft = f.value(trial);
        if (ft > fx + kArmijo * step * g.dot(d)) {
          x = std::move(trial);
          fx = ft;
          step = std::min(2.0 * step, kMaxStep);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) {
        converged = true;  // no ascent possible at machine precision
        break;
      }
    }
    if (converged) ++out.converged_restarts;
    if (fx > best) {
      best = fx;
      best_x = x;
      out.best_restart = restart;
    }
  }
  std::vector<Bloch> bloch(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) bloch[i] = {best_x(3 * i), best_x(3 * i + 1), best_x(3 * i + 2)};
  out.best_state = ProductState(std::move(bloch));
  out.best_value = witness_value(w, out.best_state);
  return out;
}

}  // namespace entcert
