#include "entcert/corrdata.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "entcert/error.hpp"

namespace entcert {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, where + ": " + what);
}

int site_field(const json& rec, const char* key, const std::string& where) {
  if (!rec.contains(key)) parse_fail(where, std::string("missing field '") + key + "'");
  const auto& v = rec.at(key);
  if (!v.is_number_integer()) parse_fail(where, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

Axis axis_field(const json& rec, const char* key, const std::string& where) {
  if (!rec.contains(key)) parse_fail(where, std::string("missing field '") + key + "'");
  const auto& v = rec.at(key);
  if (!v.is_string()) parse_fail(where, std::string("field '") + key + "' must be a string");
  const auto token = v.get<std::string>();
  if (token != "X" && token != "Y" && token != "Z") {
    parse_fail(where, std::string("field '") + key + "': unknown axis token \"" + token + "\"");
  }
  return parse_axis(token);
}

double value_field(const json& rec, const std::string& where) {
  if (!rec.contains("value")) parse_fail(where, "missing field 'value'");
  const auto& v = rec.at("value");
  if (!v.is_number()) parse_fail(where, "field 'value' must be a number");
  return v.get<double>();
}

}  // namespace

char axis_char(Axis a) {
  switch (a) {
    case Axis::X: return 'X';
    case Axis::Y: return 'Y';
    case Axis::Z: return 'Z';
  }
  return '?';
}

Axis parse_axis(std::string_view token) {
  if (token == "X" || token == "x") return Axis::X;
  if (token == "Y" || token == "y") return Axis::Y;
  if (token == "Z" || token == "z") return Axis::Z;
  throw Error(ErrorKind::BadKey, "unknown axis token \"" + std::string(token) + "\"");
}

Label Label::one_body(int site, Axis axis) {
  if (site < 0) throw Error(ErrorKind::BadKey, "negative site index");
  return Label{site, -1, axis, Axis::X};
}

Label Label::two_body(int site_i, int site_j, Axis axis_i, Axis axis_j) {
  if (site_i < 0 || site_j < 0) throw Error(ErrorKind::BadKey, "negative site index");
  if (site_i == site_j) {
    throw Error(ErrorKind::BadKey, "two-body key with i == j (" + std::to_string(site_i) + ")");
  }
  if (site_j < site_i) return Label{site_j, site_i, axis_j, axis_i};
  return Label{site_i, site_j, axis_i, axis_j};
}

std::string Label::str() const {
  std::string s;
  if (is_one_body()) {
    s += axis_char(a);
    s += '_' + std::to_string(i);
  } else {
    s += axis_char(a);
    s += axis_char(b);
    s += '_' + std::to_string(i) + '_' + std::to_string(j);
  }
  return s;
}

Label Label::parse(std::string_view text) {
  const auto bad = [&] { return Error(ErrorKind::BadKey, "malformed label \"" + std::string(text) + "\""); };
  const auto us = text.find('_');
  if (us == std::string_view::npos) throw bad();
  const auto axes = text.substr(0, us);
  const auto rest = text.substr(us + 1);
  auto to_int = [&](std::string_view s) {
    if (s.empty()) throw bad();
    int v = 0;
    for (char ch : s) {
      if (ch < '0' || ch > '9') throw bad();
      v = v * 10 + (ch - '0');
    }
    return v;
  };
  if (axes.size() == 1) {
    return one_body(to_int(rest), parse_axis(axes.substr(0, 1)));
  }
  if (axes.size() == 2) {
    const auto us2 = rest.find('_');
    if (us2 == std::string_view::npos) throw bad();
    return two_body(to_int(rest.substr(0, us2)), to_int(rest.substr(us2 + 1)), parse_axis(axes.substr(0, 1)),
                    parse_axis(axes.substr(1, 1)));
  }
  throw bad();
}

CorrelationDataset CorrelationDataset::make(int n_sites, const std::vector<Entry>& entries) {
  if (n_sites < 1) throw Error(ErrorKind::BadKey, "n_sites must be >= 1");
  CorrelationDataset ds;
  ds.n_sites_ = n_sites;
  for (const auto& [raw, value] : entries) {
    const Label label = raw.is_one_body() ? Label::one_body(raw.i, raw.a) : Label::two_body(raw.i, raw.j, raw.a, raw.b);
    if (label.max_site() >= n_sites) {
      throw Error(ErrorKind::BadKey, "site out of range in " + label.str() + " (n_sites=" + std::to_string(n_sites) + ")");
    }
    if (!std::isfinite(value) || std::abs(value) > 1.0) {
      std::ostringstream os;
      os.precision(17);
      os << label.str() << " = " << value << " outside [-1, 1]";
      throw Error(ErrorKind::ValueOutOfRange, os.str());
    }
    if (!ds.values_.emplace(label, value).second) {
      throw Error(ErrorKind::BadKey, "duplicate key " + label.str());
    }
  }
  return ds;
}

std::optional<double> CorrelationDataset::get(const Label& label) const {
  const auto it = values_.find(label);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> CorrelationDataset::one_body(int site, Axis a) const { return get(Label::one_body(site, a)); }

std::optional<double> CorrelationDataset::two_body(int i, int j, Axis a, Axis b) const {
  return get(Label::two_body(i, j, a, b));
}

std::vector<Label> CorrelationDataset::labels() const {
  std::vector<Label> out;
  out.reserve(values_.size());
  for (const auto& kv : values_) out.push_back(kv.first);
  return out;
}

CorrelationDataset CorrelationDataset::filtered(const std::function<bool(const Label&)>& keep) const {
  CorrelationDataset out;
  out.n_sites_ = n_sites_;
  for (const auto& kv : values_) {
    if (keep(kv.first)) out.values_.insert(kv);
  }
  return out;
}

CorrelationDataset scale_noise(const CorrelationDataset& ds, double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) {
    throw Error(ErrorKind::BadNoiseLevel, "noise level " + std::to_string(noise) + " outside [0, 1]");
  }
  std::vector<CorrelationDataset::Entry> entries;
  entries.reserve(ds.size());
  for (const auto& [label, value] : ds.entries()) entries.emplace_back(label, (1.0 - noise) * value);
  return CorrelationDataset::make(ds.n_sites(), entries);
}

CorrelationDataset partial_transpose(const CorrelationDataset& ds, const std::vector<int>& sites) {
  std::set<int> subset;
  for (int s : sites) {
    if (s < 0 || s >= ds.n_sites()) throw Error(ErrorKind::BadKey, "partial transpose site " + std::to_string(s) + " out of range");
    subset.insert(s);
  }
  auto y_on_subset = [&](int site, Axis a) { return a == Axis::Y && subset.count(site) != 0 ? 1 : 0; };
  std::vector<CorrelationDataset::Entry> entries;
  entries.reserve(ds.size());
  for (const auto& [label, value] : ds.entries()) {
    int flips = y_on_subset(label.i, label.a);
    if (!label.is_one_body()) flips += y_on_subset(label.j, label.b);
    entries.emplace_back(label, (flips % 2 == 1) ? -value : value);
  }
  return CorrelationDataset::make(ds.n_sites(), entries);
}

CollectiveMoments collective_moments(const CorrelationDataset& ds) {
  const int n = ds.n_sites();
  std::vector<std::string> missing;
  CollectiveMoments out;
  out.n_sites = n;
  for (Axis a : kAxes) {
    double sum1 = 0.0;
    for (int i = 0; i < n; ++i) {
      if (auto v = ds.one_body(i, a)) {
        sum1 += *v;
      } else {
        missing.push_back(Label::one_body(i, a).str());
      }
    }
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (auto v = ds.two_body(i, j, a, a)) {
          sum2 += 2.0 * *v;
        } else {
          missing.push_back(Label::two_body(i, j, a, a).str());
        }
      }
    }
    out.m[index(a)] = sum1 / n;
    out.c[index(a)] = n > 1 ? sum2 / (static_cast<double>(n) * (n - 1)) : 0.0;
  }
  if (!missing.empty()) {
    std::string msg = "collective moments need";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 12);
    for (std::size_t k = 0; k < shown; ++k) msg += " " + missing[k];
    if (shown < missing.size()) msg += " ... (" + std::to_string(missing.size()) + " absent)";
    throw Error(ErrorKind::MissingData, msg);
  }
  return out;
}

CorrelationDataset restrict_sites(const CorrelationDataset& ds, const std::vector<int>& sites) {
  std::map<int, int> relabel;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] < 0 || sites[k] >= ds.n_sites()) throw Error(ErrorKind::BadKey, "site out of range");
    if (!relabel.emplace(sites[k], static_cast<int>(k)).second) throw Error(ErrorKind::BadKey, "repeated site");
  }
  std::vector<CorrelationDataset::Entry> entries;
  for (const auto& [label, value] : ds.entries()) {
    const auto it = relabel.find(label.i);
    if (it == relabel.end()) continue;
    if (label.is_one_body()) {
      entries.emplace_back(Label::one_body(it->second, label.a), value);
    } else {
      const auto jt = relabel.find(label.j);
      if (jt == relabel.end()) continue;
      entries.emplace_back(Label::two_body(it->second, jt->second, label.a, label.b), value);
    }
  }
  return CorrelationDataset::make(static_cast<int>(sites.size()), entries);
}

std::string dataset_to_json(const CorrelationDataset& ds) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["n_sites"] = ds.n_sites();
  json one = json::array();
  json two = json::array();
  for (const auto& [label, value] : ds.entries()) {
    if (label.is_one_body()) {
      one.push_back({{"i", label.i}, {"axis", std::string(1, axis_char(label.a))}, {"value", value}});
    } else {
      two.push_back({{"i", label.i},
                     {"j", label.j},
                     {"axis_i", std::string(1, axis_char(label.a))},
                     {"axis_j", std::string(1, axis_char(label.b))},
                     {"value", value}});
    }
  }
  doc["one_body"] = std::move(one);
  doc["two_body"] = std::move(two);
  // nlohmann prints doubles in shortest round-trip form.
  return doc.dump(2) + "\n";
}

CorrelationDataset dataset_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    parse_fail("line " + std::to_string(line) + ", column " + std::to_string(col), e.what());
  }
  if (!doc.is_object()) parse_fail("document", "top level must be an object");
  if (!doc.contains("n_sites") || !doc["n_sites"].is_number_integer()) {
    parse_fail("field 'n_sites'", "missing or not an integer");
  }
  const int n = doc["n_sites"].get<int>();
  std::vector<CorrelationDataset::Entry> entries;
  if (doc.contains("one_body")) {
    const auto& arr = doc["one_body"];
    if (!arr.is_array()) parse_fail("field 'one_body'", "must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string where = "one_body[" + std::to_string(k) + "]";
      const auto& rec = arr[k];
      if (!rec.is_object()) parse_fail(where, "record must be an object");
      const int i = site_field(rec, "i", where);
      const Axis a = axis_field(rec, "axis", where);
      if (i < 0) parse_fail(where, "field 'i' negative");
      entries.emplace_back(Label::one_body(i, a), value_field(rec, where));
    }
  }
  if (doc.contains("two_body")) {
    const auto& arr = doc["two_body"];
    if (!arr.is_array()) parse_fail("field 'two_body'", "must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string where = "two_body[" + std::to_string(k) + "]";
      const auto& rec = arr[k];
      if (!rec.is_object()) parse_fail(where, "record must be an object");
      const int i = site_field(rec, "i", where);
      const int j = site_field(rec, "j", where);
      const Axis a = axis_field(rec, "axis_i", where);
      const Axis b = axis_field(rec, "axis_j", where);
      if (i < 0 || j < 0 || i == j) parse_fail(where, "invalid site pair");
      entries.emplace_back(Label::two_body(i, j, a, b), value_field(rec, where));
    }
  }
  return CorrelationDataset::make(n, entries);
}

void write_dataset(const CorrelationDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << dataset_to_json(ds);
  if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + path.string());
}

CorrelationDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return dataset_from_json(buf.str());
}

}  // namespace entcert
