#include "entcert/witness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "entcert/error.hpp"

namespace entcert {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, "witness: " + what); }

}  // namespace

std::string to_string(Orientation o) { return o == Orientation::UpperBound ? "upper" : "lower"; }

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::DualCertificate: return "dual_certificate";
    case Provenance::StructureFactor: return "structure_factor";
    case Provenance::Bipartite: return "bipartite";
    case Provenance::PhaseFamily: return "phase_family";
    case Provenance::SpinSqueezing: return "spin_squeezing";
  }
  return "dual_certificate";
}

Orientation parse_orientation(std::string_view text) {
  if (text == "upper" || text == "<=") return Orientation::UpperBound;
  if (text == "lower" || text == ">=") return Orientation::LowerBound;
  throw Error(ErrorKind::ParseError, "unknown orientation '" + std::string(text) + "'");
}

Provenance parse_provenance(std::string_view text) {
  for (Provenance p : {Provenance::DualCertificate, Provenance::StructureFactor, Provenance::Bipartite,
                       Provenance::PhaseFamily, Provenance::SpinSqueezing}) {
    if (text == to_string(p)) return p;
  }
  throw Error(ErrorKind::ParseError, "unknown provenance '" + std::string(text) + "'");
}

int Witness::min_sites() const {
  int n = 0;
  for (const auto& [label, w] : coefficients) n = std::max(n, label.max_site() + 1);
  return n;
}

Witness make_witness(std::vector<std::pair<Label, double>> coefficients, double separable_bound,
                     Orientation orientation, Provenance provenance, double offset) {
  if (coefficients.empty()) throw Error(ErrorKind::InvalidArgument, "witness needs at least one coefficient");
  if (!std::isfinite(separable_bound) || !std::isfinite(offset)) {
    throw Error(ErrorKind::InvalidArgument, "witness bound must be finite");
  }
  std::sort(coefficients.begin(), coefficients.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Witness w;
  for (const auto& [label, value] : coefficients) {
    if (!std::isfinite(value)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient on " + label.str());
    if (!w.coefficients.empty() && w.coefficients.back().first == label) {
      w.coefficients.back().second += value;
    } else {
      w.coefficients.emplace_back(label, value);
    }
  }
  w.offset = offset;
  w.separable_bound = separable_bound;
  w.orientation = orientation;
  w.provenance = provenance;
  return w;
}

WitnessEvaluation eval_witness(const Witness& w, const CorrelationDataset& ds) {
  double value = w.offset;
  std::string missing;
  for (const auto& [label, coef] : w.coefficients) {
    const auto c = ds.get(label);
    if (!c) {
      missing += " " + label.str();
      continue;
    }
    value += coef * *c;
  }
  if (!missing.empty()) throw Error(ErrorKind::MissingData, "witness needs" + missing);
  WitnessEvaluation out;
  out.value = value;
  out.margin = w.orientation == Orientation::UpperBound ? w.separable_bound - value : value - w.separable_bound;
  out.violated = out.margin < -kViolationTol;
  return out;
}

std::string witness_to_json(const Witness& w) {
  json doc;
  doc["format_version"] = kFormatVersion;
  json coefs = json::array();
  for (const auto& [label, value] : w.coefficients) coefs.push_back({{"label", label.str()}, {"value", value}});
  doc["coefficients"] = std::move(coefs);
  doc["offset"] = w.offset;
  doc["bound"] = w.separable_bound;
  doc["orientation"] = to_string(w.orientation);
  doc["provenance"] = to_string(w.provenance);
  return doc.dump(2) + "\n";
}

Witness witness_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_fail(e.what());
  }
  if (!doc.is_object()) parse_fail("top level must be an object");
  if (!doc.contains("coefficients") || !doc["coefficients"].is_array()) parse_fail("missing 'coefficients' array");
  if (!doc.contains("bound") || !doc["bound"].is_number()) parse_fail("missing numeric 'bound'");
  std::vector<std::pair<Label, double>> coefs;
  const auto& arr = doc["coefficients"];
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto& rec = arr[k];
    const std::string where = "coefficients[" + std::to_string(k) + "]";
    if (!rec.is_object() || !rec.contains("label") || !rec["label"].is_string()) parse_fail(where + ": missing 'label'");
    if (!rec.contains("value") || !rec["value"].is_number()) parse_fail(where + ": missing numeric 'value'");
    Label label;
    try {
      label = Label::parse(rec["label"].get<std::string>());
    } catch (const Error& e) {
      parse_fail(where + ": " + e.what());
    }
    coefs.emplace_back(label, rec["value"].get<double>());
  }
  const auto orientation = doc.contains("orientation") ? parse_orientation(doc["orientation"].get<std::string>())
                                                       : Orientation::UpperBound;
  const auto provenance = doc.contains("provenance") ? parse_provenance(doc["provenance"].get<std::string>())
                                                     : Provenance::DualCertificate;
  const double offset = doc.contains("offset") ? doc["offset"].get<double>() : 0.0;
  return make_witness(std::move(coefs), doc["bound"].get<double>(), orientation, provenance, offset);
}

void write_witness(const Witness& w, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << witness_to_json(w);
}

Witness read_witness(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return witness_from_json(buf.str());
}

}  // namespace entcert
