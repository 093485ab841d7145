#include "entcert/momentmat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "entcert/error.hpp"

namespace entcert {

namespace {

constexpr double kZeroTol = 1e-12;
constexpr char kComponents[] = {'x', 'y', 'z'};

int site_of(int code) { return code / 3; }
Axis comp_of(int code) { return static_cast<Axis>(code % 3); }

void multisets(int n_codes, int degree, std::vector<int>& current, std::vector<Monomial>& out) {
  if (static_cast<int>(current.size()) == degree) {
    out.emplace_back(current);
    return;
  }
  const int start = current.empty() ? 0 : current.back();
  for (int c = start; c < n_codes; ++c) {
    current.push_back(c);
    multisets(n_codes, degree, current, out);
    current.pop_back();
  }
}

bool nonzero(double v) { return std::abs(v) > kZeroTol; }

bool axis_shape(const CorrelationDataset& ds, Axis s) {
  for (const auto& [label, value] : ds.entries()) {
    if (label.is_one_body()) {
      if (label.a != s && nonzero(value)) return false;
    } else if (label.a != label.b && nonzero(value)) {
      return false;
    }
  }
  return true;
}

std::pair<Axis, Axis> transverse_axes(Axis s) {
  switch (s) {
    case Axis::X: return {Axis::Y, Axis::Z};
    case Axis::Y: return {Axis::X, Axis::Z};
    case Axis::Z: return {Axis::X, Axis::Y};
  }
  return {Axis::X, Axis::Y};
}

bool transverse_shape(const CorrelationDataset& ds, Axis s) {
  if (!axis_shape(ds, s)) return false;
  const auto [p, q] = transverse_axes(s);
  for (int i = 0; i < ds.n_sites(); ++i) {
    for (int j = i + 1; j < ds.n_sites(); ++j) {
      const auto cp = ds.two_body(i, j, p, p);
      const auto cq = ds.two_body(i, j, q, q);
      if (cp.has_value() != cq.has_value()) return false;
      if (cp && std::abs(*cp - *cq) > kZeroTol) return false;
    }
  }
  return true;
}

bool rotation_shape(const CorrelationDataset& ds) {
  for (const auto& [label, value] : ds.entries()) {
    if (label.is_one_body() && nonzero(value)) return false;
    if (!label.is_one_body() && label.a != label.b && nonzero(value)) return false;
  }
  for (int i = 0; i < ds.n_sites(); ++i) {
    for (int j = i + 1; j < ds.n_sites(); ++j) {
      const auto cx = ds.two_body(i, j, Axis::X, Axis::X);
      const auto cy = ds.two_body(i, j, Axis::Y, Axis::Y);
      const auto cz = ds.two_body(i, j, Axis::Z, Axis::Z);
      const int present = int(cx.has_value()) + int(cy.has_value()) + int(cz.has_value());
      if (present == 0) continue;
      if (present != 3) return false;
      if (std::abs(*cx - *cy) > kZeroTol || std::abs(*cx - *cz) > kZeroTol) return false;
    }
  }
  return true;
}

/// Axis carrying the nonzero one-body data, if that axis is unique.
std::optional<Axis> one_body_axis(const CorrelationDataset& ds) {
  std::optional<Axis> found;
  for (const auto& [label, value] : ds.entries()) {
    if (!label.is_one_body() || !nonzero(value)) continue;
    if (found && *found != label.a) return std::nullopt;
    found = label.a;
  }
  return found;
}

std::optional<SymmetryScheme> try_fit(const CorrelationDataset& ds, SchemeKind kind) {
  switch (kind) {
    case SchemeKind::General: return SymmetryScheme{};
    case SchemeKind::RotationInvariant:
      if (rotation_shape(ds)) return SymmetryScheme{SchemeKind::RotationInvariant, Axis::Z};
      return std::nullopt;
    case SchemeKind::TransverseSymmetric:
      for (Axis s : {Axis::Z, Axis::X, Axis::Y}) {
        if (transverse_shape(ds, s)) return SymmetryScheme{SchemeKind::TransverseSymmetric, s};
      }
      return std::nullopt;
    case SchemeKind::AxisDiagonal: {
      const Axis s = one_body_axis(ds).value_or(Axis::Z);
      if (axis_shape(ds, s)) return SymmetryScheme{SchemeKind::AxisDiagonal, s};
      return std::nullopt;
    }
  }
  return std::nullopt;
}

struct BasisSlot {
  bool one = true;
  int site = 0;
  Axis a = Axis::X;
};

BasisSlot slot(int idx) {
  if (idx == 0) return {};
  return {false, (idx - 1) / 3, static_cast<Axis>((idx - 1) % 3)};
}

class VarTable {
 public:
  int id(const Monomial& key) {
    auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(order_.size()));
    if (inserted) order_.push_back(key);
    return it->second;
  }
  std::vector<Monomial> moments() const { return order_; }
  int size() const { return static_cast<int>(order_.size()); }

 private:
  std::map<Monomial, int> ids_;
  std::vector<Monomial> order_;
};

LayoutEntry constant(double v) { return {EntryKind::Constant, v, {}, -1}; }
LayoutEntry zero() { return {}; }
LayoutEntry free_var(int id) { return {EntryKind::FreeVar, 0.0, {}, id}; }
LayoutEntry data(std::vector<DataTerm> terms) { return {EntryKind::Data, 0.0, std::move(terms), -1}; }

LayoutEntry general_entry(const Monomial& m, const CorrelationDataset& ds, VarTable& vars) {
  if (m.is_one()) return constant(1.0);
  if (const auto label = m.data_label(); label && ds.contains(*label)) return data({{*label, 1.0}});
  return free_var(vars.id(m));
}

LayoutEntry scheme_entry(int r, int c, const CorrelationDataset& ds, const SymmetryScheme& scheme, VarTable& vars) {
  const BasisSlot u = slot(r);
  const BasisSlot v = slot(c);
  if (u.one && v.one) return constant(1.0);
  const bool rotation = scheme.kind == SchemeKind::RotationInvariant;
  const Axis s = scheme.axis;

  if (u.one || v.one) {
    const BasisSlot& w = u.one ? v : u;
    if (rotation || w.a != s) return zero();
    const Label l = Label::one_body(w.site, s);
    if (ds.contains(l)) return data({{l, 1.0}});
    return free_var(vars.id(Monomial::var(w.site, s)));
  }

  if (u.site == v.site) {
    if (u.a != v.a) return zero();
    if (rotation) return constant(1.0 / 3.0);
    Axis key_axis = u.a;
    if (scheme.kind == SchemeKind::TransverseSymmetric && u.a != s) key_axis = transverse_axes(s).first;
    const Monomial sq = Monomial::var(u.site, key_axis) * Monomial::var(u.site, key_axis);
    return free_var(vars.id(sq));
  }

  if (u.a != v.a) return zero();
  const int i = std::min(u.site, v.site);
  const int j = std::max(u.site, v.site);
  auto pair_key = [&](Axis a) { return Monomial::var(i, a) * Monomial::var(j, a); };

  if (rotation) {
    const Label lx = Label::two_body(i, j, Axis::X, Axis::X);
    if (ds.contains(lx)) {
      return data({{lx, 1.0 / 3.0},
                    {Label::two_body(i, j, Axis::Y, Axis::Y), 1.0 / 3.0},
                    {Label::two_body(i, j, Axis::Z, Axis::Z), 1.0 / 3.0}});
    }
    return free_var(vars.id(pair_key(Axis::X)));
  }
  if (scheme.kind == SchemeKind::TransverseSymmetric && u.a != s) {
    const auto [p, q] = transverse_axes(s);
    const Label lp = Label::two_body(i, j, p, p);
    const Label lq = Label::two_body(i, j, q, q);
    if (ds.contains(lp) && ds.contains(lq)) return data({{lp, 0.5}, {lq, 0.5}});
    if (ds.contains(lp) || ds.contains(lq)) {
      throw Error(ErrorKind::SchemeMismatch, "transverse pair " + lp.str() + " / " + lq.str() + " only half present");
    }
    return free_var(vars.id(pair_key(p)));
  }
  const Label l = Label::two_body(i, j, u.a, u.a);
  if (ds.contains(l)) return data({{l, 1.0}});
  return free_var(vars.id(pair_key(u.a)));
}

}  // namespace

Monomial::Monomial(std::vector<int> codes) : codes_(std::move(codes)) { std::sort(codes_.begin(), codes_.end()); }

Monomial Monomial::operator*(const Monomial& other) const {
  std::vector<int> merged;
  merged.reserve(codes_.size() + other.codes_.size());
  std::merge(codes_.begin(), codes_.end(), other.codes_.begin(), other.codes_.end(), std::back_inserter(merged));
  Monomial out;
  out.codes_ = std::move(merged);
  return out;
}

int Monomial::power(int site, Axis component) const {
  return static_cast<int>(std::count(codes_.begin(), codes_.end(), 3 * site + index(component)));
}

std::optional<Label> Monomial::data_label() const {
  if (codes_.size() == 1) return Label::one_body(site_of(codes_[0]), comp_of(codes_[0]));
  if (codes_.size() == 2 && site_of(codes_[0]) != site_of(codes_[1])) {
    return Label::two_body(site_of(codes_[0]), site_of(codes_[1]), comp_of(codes_[0]), comp_of(codes_[1]));
  }
  return std::nullopt;
}

std::string Monomial::str() const {
  if (codes_.empty()) return "1";
  std::string out;
  for (std::size_t k = 0; k < codes_.size();) {
    std::size_t run = 1;
    while (k + run < codes_.size() && codes_[k + run] == codes_[k]) ++run;
    if (!out.empty()) out += '*';
    out += kComponents[codes_[k] % 3];
    out += std::to_string(site_of(codes_[k]));
    if (run > 1) out += "^" + std::to_string(run);
    k += run;
  }
  return out;
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  if (auto c = codes_.size() <=> other.codes_.size(); c != 0) return c;
  return codes_ <=> other.codes_;
}

int MonomialBasis::find(const Monomial& m) const {
  const auto it = std::lower_bound(monomials.begin(), monomials.end(), m);
  if (it == monomials.end() || *it != m) return -1;
  return static_cast<int>(it - monomials.begin());
}

MonomialBasis monomial_basis(int n_sites, int level, const std::vector<Monomial>& extras) {
  if (n_sites < 1) throw Error(ErrorKind::InvalidArgument, "basis needs n_sites >= 1");
  if (level < 1) throw Error(ErrorKind::InvalidArgument, "hierarchy level must be >= 1");
  MonomialBasis basis;
  basis.n_sites = n_sites;
  basis.level = level;
  std::vector<int> scratch;
  for (int d = 0; d <= level; ++d) multisets(3 * n_sites, d, scratch, basis.monomials);

  std::vector<Monomial> extra = extras;
  for (const auto& m : extra) {
    if (m.degree() <= level) {
      throw Error(ErrorKind::InvalidArgument, "extra monomial " + m.str() + " must have degree > level");
    }
    if (!m.codes().empty() && site_of(m.codes().back()) >= n_sites) {
      throw Error(ErrorKind::BadKey, "extra monomial " + m.str() + " references a site out of range");
    }
  }
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  basis.monomials.insert(basis.monomials.end(), extra.begin(), extra.end());
  return basis;
}

std::string scheme_name(const SymmetryScheme& s) {
  switch (s.kind) {
    case SchemeKind::General: return "general";
    case SchemeKind::AxisDiagonal: return std::string("axis-") + axis_char(s.axis);
    case SchemeKind::TransverseSymmetric: return std::string("transverse-") + axis_char(s.axis);
    case SchemeKind::RotationInvariant: return "rotation";
  }
  return "general";
}

SchemeKind parse_scheme_kind(std::string_view text) {
  if (text == "general") return SchemeKind::General;
  if (text == "axis") return SchemeKind::AxisDiagonal;
  if (text == "transverse") return SchemeKind::TransverseSymmetric;
  if (text == "rotation") return SchemeKind::RotationInvariant;
  throw Error(ErrorKind::InvalidArgument, "unknown scheme '" + std::string(text) + "'");
}

SymmetryScheme select_scheme(const CorrelationDataset& ds) {
  for (SchemeKind k : {SchemeKind::RotationInvariant, SchemeKind::TransverseSymmetric, SchemeKind::AxisDiagonal}) {
    if (auto s = try_fit(ds, k)) return *s;
  }
  return {};
}

SymmetryScheme fit_scheme(const CorrelationDataset& ds, SchemeKind kind) {
  if (auto s = try_fit(ds, kind)) return *s;
  throw Error(ErrorKind::SchemeMismatch, "dataset shape does not fit the requested scheme");
}

MomentMatrixLayout build_layout(const MonomialBasis& basis, const CorrelationDataset& ds, const SymmetryScheme& scheme) {
  if (ds.n_sites() != basis.n_sites) {
    throw Error(ErrorKind::WrongSize, "dataset has " + std::to_string(ds.n_sites()) + " sites, basis " +
                                          std::to_string(basis.n_sites));
  }
  if (scheme.kind != SchemeKind::General) {
    if (basis.level != 1 || basis.size() != 3 * basis.n_sites + 1) {
      throw Error(ErrorKind::SchemeMismatch, "symmetry schemes are only available at level 1");
    }
    bool ok = false;
    switch (scheme.kind) {
      case SchemeKind::RotationInvariant: ok = rotation_shape(ds); break;
      case SchemeKind::TransverseSymmetric: ok = transverse_shape(ds, scheme.axis); break;
      case SchemeKind::AxisDiagonal: ok = axis_shape(ds, scheme.axis); break;
      case SchemeKind::General: ok = true; break;
    }
    if (!ok) throw Error(ErrorKind::SchemeMismatch, "dataset shape does not fit scheme " + scheme_name(scheme));
  }

  MomentMatrixLayout layout;
  layout.basis = basis;
  layout.scheme = scheme;
  layout.resize_entries();
  const int dim = basis.size();

  VarTable vars;
  std::map<Monomial, std::pair<int, int>> where;
  for (int r = 0; r < dim; ++r) {
    for (int c = r; c < dim; ++c) {
      const Monomial m = basis.monomials[r] * basis.monomials[c];
      LayoutEntry e = scheme.kind == SchemeKind::General ? general_entry(m, ds, vars) : scheme_entry(r, c, ds, scheme, vars);
      where.try_emplace(m, r, c);
      layout.at(c, r) = e;
      layout.at(r, c) = std::move(e);
    }
  }
  layout.n_vars = vars.size();
  layout.var_moments = vars.moments();

  std::vector<Label> used;
  for (int r = 0; r < dim; ++r) {
    for (int c = r; c < dim; ++c) {
      for (const auto& t : layout.at(r, c).data) used.push_back(t.label);
    }
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  layout.labels = std::move(used);

  // sum_a <m a_i^2> = <m> for every moment m whose four products are entries.
  for (const auto& [m, rc] : where) {
    for (int i = 0; i < basis.n_sites; ++i) {
      std::array<std::pair<int, int>, 3> sq{};
      bool all = true;
      for (Axis a : kAxes) {
        const Monomial ma = m * Monomial::var(i, a) * Monomial::var(i, a);
        const auto it = where.find(ma);
        if (it == where.end()) {
          all = false;
          break;
        }
        sq[index(a)] = it->second;
      }
      if (!all) continue;
      PauliConstraint pc;
      auto add = [&](std::pair<int, int> pos, double coef) {
        const LayoutEntry& e = layout.at(pos.first, pos.second);
        if (e.kind == EntryKind::Zero) return;
        if (e.kind == EntryKind::Constant) {
          pc.rhs -= coef * e.constant;
          return;
        }
        pc.terms.push_back({pos.first, pos.second, coef});
      };
      for (const auto& pos : sq) add(pos, 1.0);
      add(rc, -1.0);
      if (pc.terms.empty()) {
        if (std::abs(pc.rhs) > kZeroTol) throw Error(ErrorKind::SchemeMismatch, "inconsistent constant constraint");
        continue;
      }
      layout.pauli_constraints.push_back(std::move(pc));
    }
  }

  if (layout.n_vars > 0 && !layout.pauli_constraints.empty()) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(layout.pauli_constraints.size()), layout.n_vars);
    for (std::size_t k = 0; k < layout.pauli_constraints.size(); ++k) {
      for (const auto& t : layout.pauli_constraints[k].terms) {
        const LayoutEntry& e = layout.at(t.row, t.col);
        if (e.kind == EntryKind::FreeVar) a(static_cast<Eigen::Index>(k), e.var) += t.coef;
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    layout.free_var_count = layout.n_vars - static_cast<int>(qr.rank());
  } else {
    layout.free_var_count = layout.n_vars;
  }
  return layout;
}

std::vector<int> sphere_redundant_rows(const MonomialBasis& basis) {
  std::vector<int> rows;
  for (int b = 0; b < basis.size(); ++b) {
    const Monomial& mono = basis.monomials[b];
    for (int i = 0; i < basis.n_sites; ++i) {
      if (mono.power(i, Axis::Z) < 2) continue;
      std::vector<int> codes = mono.codes();
      const int zc = 3 * i + index(Axis::Z);
      codes.erase(std::find(codes.begin(), codes.end(), zc));
      codes.erase(std::find(codes.begin(), codes.end(), zc));
      const Monomial m(codes);
      const Monomial xx = Monomial::var(i, Axis::X) * Monomial::var(i, Axis::X);
      const Monomial yy = Monomial::var(i, Axis::Y) * Monomial::var(i, Axis::Y);
      if (basis.find(m) >= 0 && basis.find(m * xx) >= 0 && basis.find(m * yy) >= 0) {
        rows.push_back(b);
        break;
      }
    }
  }
  return rows;
}

ClosedFormResult closed_form_check(const CorrelationDataset& ds) {
  const int n = ds.n_sites();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  std::vector<std::string> missing;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double c = 0.0;
      for (Axis a : kAxes) {
        const auto v = ds.two_body(i, j, a, a);
        if (!v) {
          missing.push_back(Label::two_body(i, j, a, a).str());
          continue;
        }
        c += *v;
      }
      m(i, j) = m(j, i) = c;
    }
  }
  if (!missing.empty()) {
    std::string msg = "closed-form check needs";
    for (const auto& s : missing) msg += " " + s;
    throw Error(ErrorKind::MissingData, msg);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  ClosedFormResult out;
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  out.is_psd = out.min_eigenvalue >= -kZeroTol;
  return out;
}

std::string dump_layout(const MomentMatrixLayout& layout) {
  std::ostringstream os;
  os << "# dim " << layout.dim() << " scheme " << scheme_name(layout.scheme) << " vars " << layout.n_vars
     << " free " << layout.free_var_count << " constraints " << layout.pauli_constraints.size() << "\n";
  os << "# basis";
  for (const auto& m : layout.basis.monomials) os << ' ' << m.str();
  os << "\n";
  for (int r = 0; r < layout.dim(); ++r) {
    for (int c = 0; c < layout.dim(); ++c) {
      const LayoutEntry& e = layout.at(r, c);
      char ch = '.';
      switch (e.kind) {
        case EntryKind::Constant: ch = e.constant == 1.0 ? '1' : 'c'; break;
        case EntryKind::Data: ch = 'D'; break;
        case EntryKind::FreeVar: ch = 'v'; break;
        case EntryKind::Zero: ch = '.'; break;
      }
      os << ch;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace entcert
