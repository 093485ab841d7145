#pragma once

// Monomial bases of the relaxation hierarchy and the symbolic layout of the
// moment matrix Gamma_{ab} = <m_a m_b>.

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "entcert/corrdata.hpp"

namespace entcert {

/// Product of classical Bloch components. Factors are encoded as
/// 3 * site + component and kept sorted, so a monomial is a multiset.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> codes);

  static Monomial one() { return {}; }
  static Monomial var(int site, Axis component) { return Monomial({3 * site + index(component)}); }

  int degree() const { return static_cast<int>(codes_.size()); }
  bool is_one() const { return codes_.empty(); }
  const std::vector<int>& codes() const { return codes_; }

  Monomial operator*(const Monomial& other) const;
  /// Number of times (site, component) occurs.
  int power(int site, Axis component) const;
  /// Dataset label carried by this moment when it is a one-body term or a
  /// product of two factors on distinct sites.
  std::optional<Label> data_label() const;
  /// "1", "x0", "x0*y3", "z2^2" ...
  std::string str() const;

  /// Graded, then lexicographic by (site, component).
  std::strong_ordering operator<=>(const Monomial& other) const;
  bool operator==(const Monomial&) const = default;

 private:
  std::vector<int> codes_;
};

struct MonomialBasis {
  int n_sites = 0;
  int level = 1;
  std::vector<Monomial> monomials;

  int size() const { return static_cast<int>(monomials.size()); }
  /// Index of `m` in the basis, or -1.
  int find(const Monomial& m) const;
};

/// v^(level) over n sites plus optional extra monomials of degree > level
/// (hybrid levels), appended in canonical order.
MonomialBasis monomial_basis(int n_sites, int level, const std::vector<Monomial>& extras = {});

enum class SchemeKind { General, AxisDiagonal, TransverseSymmetric, RotationInvariant };

struct SymmetryScheme {
  SchemeKind kind = SchemeKind::General;
  /// Axis singled out by AxisDiagonal / TransverseSymmetric (the "Z" role).
  Axis axis = Axis::Z;

  bool operator==(const SymmetryScheme&) const = default;
};

std::string scheme_name(const SymmetryScheme& s);
/// "general", "axis", "transverse", "rotation" (axis chosen by detection).
SchemeKind parse_scheme_kind(std::string_view text);

/// Most restrictive scheme whose shape matches the data. Values with
/// |v| <= 1e-12 count as absent-by-symmetry zeros.
SymmetryScheme select_scheme(const CorrelationDataset& ds);

/// Most restrictive scheme of the given kind that fits `ds` (axis chosen
/// automatically); throws SchemeMismatch if none fits.
SymmetryScheme fit_scheme(const CorrelationDataset& ds, SchemeKind kind);

enum class EntryKind { Constant, Data, FreeVar, Zero };

struct DataTerm {
  Label label;
  double coef = 1.0;
};

/// Symbolic Gamma entry. Data entries evaluate to (1 - lambda) sum coef * C.
struct LayoutEntry {
  EntryKind kind = EntryKind::Zero;
  double constant = 0.0;
  std::vector<DataTerm> data;
  int var = -1;
};

struct ConstraintTerm {
  int row = 0;
  int col = 0;
  double coef = 1.0;
};

/// sum coef * Gamma(row, col) = rhs.
struct PauliConstraint {
  std::vector<ConstraintTerm> terms;
  double rhs = 0.0;
};

struct MomentMatrixLayout {
  MonomialBasis basis;
  SymmetryScheme scheme;
  int n_vars = 0;                     ///< distinct free-variable ids
  std::vector<Monomial> var_moments;  ///< representative moment per id
  std::vector<PauliConstraint> pauli_constraints;
  int free_var_count = 0;  ///< n_vars minus the rank of the constraints on them
  std::vector<Label> labels;  ///< dataset labels used, sorted

  int dim() const { return basis.size(); }
  const LayoutEntry& at(int r, int c) const { return entries_[static_cast<std::size_t>(r) * dim() + c]; }
  LayoutEntry& at(int r, int c) { return entries_[static_cast<std::size_t>(r) * dim() + c]; }
  void resize_entries() { entries_.assign(static_cast<std::size_t>(dim()) * dim(), {}); }

 private:
  std::vector<LayoutEntry> entries_;
};

/// Throws SchemeMismatch when `scheme` does not fit `ds` or when a
/// non-General scheme is requested above level 1.
MomentMatrixLayout build_layout(const MonomialBasis& basis, const CorrelationDataset& ds, const SymmetryScheme& scheme);

/// Basis positions whose monomial is m * z_i^2 with m, m x_i^2, m y_i^2 also
/// in the basis; under the substitution constraints these columns are linear
/// combinations of the others.
std::vector<int> sphere_redundant_rows(const MonomialBasis& basis);

struct ClosedFormResult {
  bool is_psd = true;
  double min_eigenvalue = 0.0;
};

/// PSD test of M_ii = 1, M_ij = C^XX + C^YY + C^ZZ. Needs every pair.
ClosedFormResult closed_form_check(const CorrelationDataset& ds);

/// Entry-kind grid: '1' unit constant, 'c' other constant, 'D' data,
/// 'v' free variable, '.' zero.
std::string dump_layout(const MomentMatrixLayout& layout);

}  // namespace entcert
