#pragma once

// Partial one- and two-body Pauli correlation datasets.

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace entcert {

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

inline constexpr int index(Axis a) { return static_cast<int>(a); }
char axis_char(Axis a);
/// Accepts "X"/"Y"/"Z" (also lower case); anything else throws BadKey.
Axis parse_axis(std::string_view token);

/// Names one correlator: C_i^a (one-body, `j < 0`) or C_ij^ab with i < j.
/// Always stored canonicalized; use the factory functions.
struct Label {
  int i = 0;
  int j = -1;
  Axis a = Axis::X;
  Axis b = Axis::X;

  static Label one_body(int site, Axis axis);
  /// Canonicalizes (j, i, b, a) to (i, j, a, b) when j < i. Throws BadKey for i == j.
  static Label two_body(int site_i, int site_j, Axis axis_i, Axis axis_j);
  /// Parses the text form produced by `str()`: "Z_3" or "XY_0_5".
  static Label parse(std::string_view text);

  bool is_one_body() const { return j < 0; }
  int max_site() const { return is_one_body() ? i : j; }
  std::string str() const;

  auto operator<=>(const Label&) const = default;
};

/// Immutable set of correlators {C_i^a, C_ij^ab} with values in [-1, 1].
/// Absent entries are unknown, not zero.
class CorrelationDataset {
 public:
  using Entry = std::pair<Label, double>;

  CorrelationDataset() = default;

  /// Validating constructor. Throws BadKey (site range, i == j, duplicates)
  /// and ValueOutOfRange (|value| > 1 or non-finite).
  static CorrelationDataset make(int n_sites, const std::vector<Entry>& entries);

  int n_sites() const { return n_sites_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::optional<double> get(const Label& label) const;
  std::optional<double> one_body(int site, Axis a) const;
  /// Order-insensitive: (j, i, b, a) returns the stored (i, j, a, b) entry.
  std::optional<double> two_body(int i, int j, Axis a, Axis b) const;
  bool contains(const Label& label) const { return values_.count(label) != 0; }

  const std::map<Label, double>& entries() const { return values_; }
  std::vector<Label> labels() const;

  /// Keeps only the entries accepted by `keep`.
  CorrelationDataset filtered(const std::function<bool(const Label&)>& keep) const;

  bool operator==(const CorrelationDataset&) const = default;

 private:
  int n_sites_ = 0;
  std::map<Label, double> values_;
};

/// Every value multiplied by (1 - noise): white-noise admixture.
CorrelationDataset scale_noise(const CorrelationDataset& ds, double noise);

/// Flips the sign of every correlator with an odd number of Y factors on
/// `sites`. Involution.
CorrelationDataset partial_transpose(const CorrelationDataset& ds, const std::vector<int>& sites);

/// Permutation-averaged collective moments.
struct CollectiveMoments {
  int n_sites = 0;
  std::array<double, 3> m{};  ///< m_a = N^-1 sum_i C_i^a
  std::array<double, 3> c{};  ///< C_aa = [N(N-1)]^-1 sum_{i != j} C_ij^aa
};

/// Requires every C_i^a and every C_ij^aa; otherwise MissingData listing the
/// absent labels.
CollectiveMoments collective_moments(const CorrelationDataset& ds);

/// Restriction to a subset of sites, relabelled 0..k-1 in the given order.
CorrelationDataset restrict_sites(const CorrelationDataset& ds, const std::vector<int>& sites);

std::string dataset_to_json(const CorrelationDataset& ds);
CorrelationDataset dataset_from_json(std::string_view text);
void write_dataset(const CorrelationDataset& ds, const std::filesystem::path& path);
CorrelationDataset read_dataset(const std::filesystem::path& path);

}  // namespace entcert
