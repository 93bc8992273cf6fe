#include "termrank/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "termrank/error.hpp"

namespace termrank {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kModelVersion = 1;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

Count parse_count(std::string_view s, std::size_t line, const char* what) {
  Count v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    throw ParseError(line, std::string("invalid ") + what + " '" +
                               std::string(s) + "'");
  }
  return v;
}

double parse_real(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, "invalid number '" + std::string(s) + "'");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Json scaling_to_json(const ColumnScaling& s) {
  Json j;
  if (s.kind == ScalingKind::rank) {
    j["kind"] = "rank";
    j["values"] = s.sorted;
  } else {
    j["kind"] = "minmax";
    j["lo"] = s.lo;
    j["hi"] = s.hi;
  }
  return j;
}

ColumnScaling scaling_from_json(const Json& j) {
  ColumnScaling s;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "rank") {
    s.kind = ScalingKind::rank;
    s.sorted = j.at("values").get<std::vector<double>>();
    if (s.sorted.empty()) throw SchemaError("rank scaling without values");
    if (!std::is_sorted(s.sorted.begin(), s.sorted.end())) {
      throw SchemaError("rank scaling values must be ascending");
    }
    s.lo = s.sorted.front();
    s.hi = s.sorted.back();
  } else if (kind == "minmax") {
    s.kind = ScalingKind::minmax;
    s.lo = j.at("lo").get<double>();
    s.hi = j.at("hi").get<double>();
    if (s.lo > s.hi) throw SchemaError("minmax scaling with lo > hi");
  } else {
    throw SchemaError("unknown scaling kind '" + kind + "'");
  }
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------- counts

CandidateSet read_counts(std::istream& in) {
  CandidateSet set;
  std::optional<Count> total;
  bool header_seen = false;
  std::unordered_set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kTotal = "#total=";
      if (line.substr(0, kTotal.size()) == kTotal) {
        if (header_seen) {
          throw ParseError(line_no, "#total must precede the header");
        }
        total = parse_count(line.substr(kTotal.size()), line_no, "total");
      }
      continue;
    }
    const auto fields = split_tabs(line);
    if (!header_seen) {
      if (fields.size() != 4 || fields[0] != "id" || fields[1] != "n11" ||
          fields[2] != "nx" || fields[3] != "ny") {
        throw SchemaError("line " + std::to_string(line_no) +
                          ": expected header id<TAB>n11<TAB>nx<TAB>ny");
      }
      if (!total) throw SchemaError("missing #total=<N> line before header");
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 fields, found " +
                                    std::to_string(fields.size()));
    }
    const std::string id(fields[0]);
    if (id.empty()) throw ParseError(line_no, "empty candidate id");
    if (!seen.insert(id).second) {
      throw SchemaError("line " + std::to_string(line_no) +
                        ": duplicate candidate '" + id + "'");
    }
    const Count n11 = parse_count(fields[1], line_no, "n11");
    const Count nx = parse_count(fields[2], line_no, "nx");
    const Count ny = parse_count(fields[3], line_no, "ny");
    try {
      const auto table = contingency(n11, nx, ny, *total);
      const auto space = id.find(' ');
      CandidateEntry e{id.substr(0, space),
                       space == std::string::npos ? std::string()
                                                  : id.substr(space + 1),
                       table};
      set.entries.push_back(std::move(e));
    } catch (const MarginViolation& err) {
      throw SchemaError("line " + std::to_string(line_no) + ": candidate '" +
                        id + "': " + err.what());
    }
  }
  if (!header_seen) throw SchemaError("counts file has no header");
  set.n_total = *total;
  return set;
}

void write_counts(const CandidateSet& set, std::ostream& out) {
  out << "#total=" << set.n_total << '\n' << "id\tn11\tnx\tny\n";
  for (const auto& e : set.entries) {
    out << e.id() << '\t' << e.table.n11() << '\t' << e.table.n_x() << '\t'
        << e.table.n_y() << '\n';
  }
}

CandidateSet load_counts(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_counts(in);
}

void save_counts(const CandidateSet& set, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_counts(set, out);
  finish_write(out, path);
}

std::vector<CountedCandidate> counted_candidates(const CandidateSet& set) {
  std::vector<CountedCandidate> out;
  out.reserve(set.entries.size());
  for (const auto& e : set.entries) {
    out.push_back({e.id(), e.table, std::nullopt});
  }
  return out;
}

// -------------------------------------------------------------- features

FeatureMatrix read_features(std::istream& in, NormalizationMode mode) {
  const auto expected = measure_columns();
  std::string raw;
  std::size_t line_no = 0;
  bool has_label = false;
  bool header_seen = false;
  std::vector<Candidate> rows;
  std::unordered_set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (!header_seen) {
      if (fields.empty() || fields[0] != "id") {
        throw SchemaError("line " + std::to_string(line_no) +
                          ": header must start with 'id'");
      }
      has_label = fields.back() == "label";
      const std::size_t measures = fields.size() - 1 - (has_label ? 1 : 0);
      if (measures != kMeasureCount) {
        throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(kMeasureCount) +
                          " measure columns, found " +
                          std::to_string(measures));
      }
      for (std::size_t j = 0; j < kMeasureCount; ++j) {
        if (fields[j + 1] != expected[j]) {
          throw SchemaError("line " + std::to_string(line_no) + ": column " +
                            std::to_string(j + 2) + " should be '" +
                            expected[j] + "', found '" +
                            std::string(fields[j + 1]) + "'");
        }
      }
      header_seen = true;
      continue;
    }
    const std::size_t width = 1 + kMeasureCount + (has_label ? 1 : 0);
    if (fields.size() != width) {
      throw ParseError(line_no, "expected " + std::to_string(width) +
                                    " fields, found " +
                                    std::to_string(fields.size()));
    }
    Candidate c;
    c.id = std::string(fields[0]);
    if (c.id.empty()) throw ParseError(line_no, "empty candidate id");
    if (!seen.insert(c.id).second) {
      throw SchemaError("line " + std::to_string(line_no) +
                        ": duplicate candidate '" + c.id + "'");
    }
    c.raw.reserve(kMeasureCount);
    for (std::size_t j = 0; j < kMeasureCount; ++j) {
      c.raw.push_back(parse_real(fields[j + 1], line_no));
    }
    if (has_label && !fields.back().empty()) {
      c.label = parse_label(fields.back());
      if (!c.label) {
        throw ParseError(line_no, "label must be -1 or 1, found '" +
                                      std::string(fields.back()) + "'");
      }
    }
    rows.push_back(std::move(c));
  }
  if (!header_seen) throw SchemaError("feature file has no header");
  if (rows.empty()) throw EmptyInput("feature file has no candidates");
  return FeatureMatrix::fit(expected, std::move(rows), mode);
}

void write_features(const FeatureMatrix& m, std::ostream& out) {
  const bool any_label =
      std::any_of(m.candidates().begin(), m.candidates().end(),
                  [](const Candidate& c) { return c.label.has_value(); });
  out << "id";
  for (const auto& col : m.columns()) out << '\t' << col;
  if (any_label) out << "\tlabel";
  out << '\n';
  for (const auto& c : m.candidates()) {
    out << c.id;
    for (double v : c.raw) out << '\t' << format_double(v);
    if (any_label) {
      out << '\t';
      if (c.label) out << to_int(*c.label);
    }
    out << '\n';
  }
}

FeatureMatrix load_features(const std::filesystem::path& path,
                            NormalizationMode mode) {
  auto in = open_in(path);
  return read_features(in, mode);
}

void save_features(const FeatureMatrix& m, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_features(m, out);
  finish_write(out, path);
}

FeatureMatrix join_labels(const FeatureMatrix& m, std::istream& labels) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.size(); ++i) index[m.candidates()[i].id] = i;
  std::vector<Candidate> rows = m.candidates();
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(labels, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw ParseError(line_no, "expected id<TAB>label");
    }
    if (fields[0] == "id" && fields[1] == "label") continue;
    const auto label = parse_label(fields[1]);
    if (!label) {
      throw ParseError(line_no, "label must be -1 or 1, found '" +
                                    std::string(fields[1]) + "'");
    }
    const auto it = index.find(std::string(fields[0]));
    if (it == index.end()) {
      throw SchemaError("line " + std::to_string(line_no) +
                        ": unknown candidate '" + std::string(fields[0]) +
                        "'");
    }
    rows[it->second].label = *label;
  }
  return FeatureMatrix::with_normalizer(m.columns(), std::move(rows),
                                        m.normalizer());
}

FeatureMatrix join_labels(const FeatureMatrix& m,
                          const std::filesystem::path& labels) {
  auto in = open_in(labels);
  return join_labels(m, in);
}

// ----------------------------------------------------------------- model

std::string model_to_json(const EnsembleModel& model) {
  Json j;
  j["version"] = kModelVersion;
  j["kind"] = model.members.empty()
                  ? std::string("weighted_l1")
                  : std::string(kind_name(model.members.front().hypothesis.kind));
  j["T"] = model.members.size();
  j["d"] = model.dimension();
  j["columns"] = model.columns;
  Json norm;
  norm["mode"] = std::string(mode_name(model.features.mode()));
  norm["columns"] = Json::array();
  for (const auto& s : model.features.columns()) {
    norm["columns"].push_back(scaling_to_json(s));
  }
  j["normalization"] = std::move(norm);
  j["members"] = Json::array();
  for (const auto& m : model.members) {
    Json jm;
    jm["w"] = m.hypothesis.w;
    jm["c"] = m.hypothesis.c;
    jm["sigma"] = m.hypothesis.sigma;
    jm["lo"] = m.normalizer.lo;
    jm["hi"] = m.normalizer.hi;
    j["members"].push_back(std::move(jm));
  }
  return j.dump(2) + "\n";
}

EnsembleModel model_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kModelVersion) {
      throw SchemaError("unsupported model version");
    }
    const auto kind = parse_kind(j.at("kind").get<std::string>());
    if (!kind) throw SchemaError("unknown hypothesis kind in model");
    const auto t = j.at("T").get<std::size_t>();
    const auto d = j.at("d").get<std::size_t>();

    EnsembleModel model;
    model.columns = j.at("columns").get<std::vector<std::string>>();
    const auto& norm = j.at("normalization");
    const auto mode = parse_mode(norm.at("mode").get<std::string>());
    if (!mode) throw SchemaError("unknown normalization mode in model");
    std::vector<ColumnScaling> scalings;
    for (const auto& s : norm.at("columns")) {
      scalings.push_back(scaling_from_json(s));
    }
    model.features = FeatureNormalizer(*mode, std::move(scalings));
    if (model.features.dimension() != d || model.columns.size() != d) {
      throw SchemaError("normalization does not match model dimension");
    }

    const auto& members = j.at("members");
    if (members.size() != t || t == 0) {
      throw SchemaError("member count does not match T");
    }
    for (const auto& jm : members) {
      EnsembleMember m;
      m.hypothesis.kind = *kind;
      m.hypothesis.w = jm.at("w").get<std::vector<double>>();
      m.hypothesis.c = jm.at("c").get<std::vector<double>>();
      m.hypothesis.sigma = jm.at("sigma").get<std::vector<double>>();
      m.normalizer.lo = jm.at("lo").get<double>();
      m.normalizer.hi = jm.at("hi").get<double>();
      const std::size_t c_len = *kind == HypothesisKind::linear ? 0 : d;
      if (m.hypothesis.w.size() != d || m.hypothesis.c.size() != c_len) {
        throw SchemaError("member weights/centers do not match dimension");
      }
      if (m.normalizer.lo > m.normalizer.hi) {
        throw SchemaError("member normalizer has lo > hi");
      }
      model.members.push_back(std::move(m));
    }
    return model;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
  write_file(path, model_to_json(model));
}

EnsembleModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

// ------------------------------------------------------------------- roc

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
  out << "fpr,tpr\n";
  char buf[64];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", p.fpr, p.tpr);
    out << buf;
  }
}

void save_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_roc_csv(curve, out);
  finish_write(out, path);
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish_write(out, path);
}

}  // namespace termrank
