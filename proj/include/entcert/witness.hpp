#pragma once

// Linear witnesses over dataset labels: value = offset + sum w_r C_r.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "entcert/corrdata.hpp"

namespace entcert {

/// UpperBound: separable data satisfy value <= bound. LowerBound: value >= bound.
enum class Orientation { UpperBound, LowerBound };

enum class Provenance { DualCertificate, StructureFactor, Bipartite, PhaseFamily, SpinSqueezing };

std::string to_string(Orientation o);
std::string to_string(Provenance p);
Orientation parse_orientation(std::string_view text);
Provenance parse_provenance(std::string_view text);

struct Witness {
  std::vector<std::pair<Label, double>> coefficients;  ///< sorted by label, unique
  double offset = 0.0;
  double separable_bound = 0.0;
  Orientation orientation = Orientation::UpperBound;
  Provenance provenance = Provenance::DualCertificate;

  /// Largest site index referenced, plus one.
  int min_sites() const;
};

/// Sorts and merges duplicate labels. Throws InvalidArgument for an empty
/// coefficient list or a non-finite bound.
Witness make_witness(std::vector<std::pair<Label, double>> coefficients, double separable_bound,
                     Orientation orientation, Provenance provenance, double offset = 0.0);

struct WitnessEvaluation {
  double value = 0.0;
  bool violated = false;
  double margin = 0.0;  ///< distance to the bound on the separable side; negative when violated
};

inline constexpr double kViolationTol = 1e-9;

/// Throws MissingData naming the absent labels.
WitnessEvaluation eval_witness(const Witness& w, const CorrelationDataset& ds);

std::string witness_to_json(const Witness& w);
Witness witness_from_json(std::string_view text);
void write_witness(const Witness& w, const std::filesystem::path& path);
Witness read_witness(const std::filesystem::path& path);

}  // namespace entcert
