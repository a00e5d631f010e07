// Copyright 2026 The errscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "errscope/ingestion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "errscope/error.hpp"
#include "errscope/hash.hpp"

namespace errscope {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path.string());
  return std::move(buf).str();
}

[[noreturn]] void malformed(const fs::path& path, std::size_t line,
                            const std::string& why) {
  throw Error(ErrorCode::kMalformedRow,
              path.string() + ":" + std::to_string(line) + ": " + why);
}

// Calls fn(line_number, record) for every non-blank line.
template <typename Fn>
void for_each_record(const fs::path& path, const std::string& bytes, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    std::string_view line(bytes.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(path, line_no, std::string("invalid record: ") + e.what());
    }
    if (!record.is_object()) malformed(path, line_no, "expected an object");
    fn(line_no, record);
  }
}

std::int64_t read_row_id(const fs::path& path, std::size_t line,
                         const json& record, std::size_t expected) {
  auto it = record.find("id");
  if (it == record.end() || !it->is_number_integer()) {
    malformed(path, line, "missing integer 'id'");
  }
  const auto id = it->get<std::int64_t>();
  if (id < 0) malformed(path, line, "negative id");
  if (static_cast<std::size_t>(id) != expected) {
    malformed(path, line,
              "id " + std::to_string(id) + " out of order; expected " +
                  std::to_string(expected) + " (rows align by position)");
  }
  return id;
}

Eigen::VectorXd read_probs(const fs::path& path, std::size_t line,
                           const json& record, int class_count) {
  auto it = record.find("probs");
  if (it == record.end() || !it->is_array()) {
    malformed(path, line, "missing 'probs' array");
  }
  if (static_cast<int>(it->size()) != class_count) {
    malformed(path, line,
              "expected " + std::to_string(class_count) + " probabilities, got " +
                  std::to_string(it->size()));
  }
  Eigen::VectorXd v(class_count);
  for (int c = 0; c < class_count; ++c) {
    const json& x = (*it)[c];
    if (!x.is_number()) malformed(path, line, "non-numeric probability");
    v(c) = x.get<double>();
  }
  return v;
}

bool trimmed_empty(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

void check_rows(const fs::path& path, std::size_t got, std::size_t expected) {
  if (got != expected) {
    throw Error(ErrorCode::kRowCountMismatch,
                path.string() + ": " + std::to_string(got) +
                    " rows, but split has " + std::to_string(expected));
  }
}

Split parse_dataset(const fs::path& path, const std::string& bytes,
                    const std::string& name, const ProjectConfig& config) {
  Split split;
  split.name = name;
  for_each_record(path, bytes, [&](std::size_t line, const json& r) {
    Utterance u;
    u.id = read_row_id(path, line, r, split.utterances.size());
    auto text = r.find("text");
    if (text == r.end() || !text->is_string()) {
      malformed(path, line, "missing string 'text'");
    }
    u.text = text->get<std::string>();
    if (trimmed_empty(u.text)) malformed(path, line, "empty text");
    auto label = r.find("label");
    if (label == r.end() || !label->is_string()) {
      malformed(path, line, "missing string 'label'");
    }
    auto index = config.class_index(label->get_ref<const std::string&>());
    if (!index) {
      malformed(path, line,
                "label '" + label->get<std::string>() + "' is not a declared class");
    }
    u.label = *index;
    split.utterances.push_back(std::move(u));
  });
  return split;
}

Eigen::MatrixXd parse_predictions(const fs::path& path, const std::string& bytes,
                                  int class_count) {
  std::vector<Eigen::VectorXd> rows;
  for_each_record(path, bytes, [&](std::size_t line, const json& r) {
    read_row_id(path, line, r, rows.size());
    rows.push_back(read_probs(path, line, r, class_count));
  });
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), class_count);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return m;
}

FloatMatrixFile parse_float_matrix(const fs::path& path, const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) malformed(path, 1, "missing header line");
  std::istringstream header(bytes.substr(0, nl));
  FloatMatrixFile m;
  if (!(header >> m.rows >> m.dim)) {
    malformed(path, 1, "header must be 'rows dim [samples]'");
  }
  std::int64_t samples = 0;
  if (header >> samples) m.samples = samples;
  std::string extra;
  if (header >> extra) malformed(path, 1, "unexpected header field '" + extra + "'");
  if (m.rows < 0 || m.dim < 1 || m.samples < 0) {
    malformed(path, 1, "invalid header dimensions");
  }
  const std::int64_t count = m.rows * m.dim * std::max<std::int64_t>(m.samples, 1);
  const std::size_t payload = bytes.size() - nl - 1;
  if (payload != static_cast<std::size_t>(count) * sizeof(float)) {
    malformed(path, 1,
              "payload is " + std::to_string(payload) + " bytes, header implies " +
                  std::to_string(count * 4));
  }
  m.values.resize(static_cast<std::size_t>(count));
  std::memcpy(m.values.data(), bytes.data() + nl + 1, payload);
  if constexpr (std::endian::native == std::endian::big) {
    for (float& f : m.values) {
      auto u = std::bit_cast<std::uint32_t>(f);
      u = (u >> 24) | ((u >> 8) & 0xff00U) | ((u << 8) & 0xff0000U) | (u << 24);
      f = std::bit_cast<float>(u);
    }
  }
  return m;
}

SaliencyTable parse_saliency(const fs::path& path, const std::string& bytes) {
  SaliencyTable t;
  for_each_record(path, bytes, [&](std::size_t line, const json& r) {
    read_row_id(path, line, r, t.rows.size());
    SaliencyRow row;
    auto tokens = r.find("tokens");
    auto scores = r.find("scores");
    if (tokens == r.end() || !tokens->is_array() || scores == r.end() ||
        !scores->is_array()) {
      malformed(path, line, "expected 'tokens' and 'scores' arrays");
    }
    if (tokens->size() != scores->size()) {
      malformed(path, line, "tokens and scores differ in length");
    }
    for (std::size_t i = 0; i < tokens->size(); ++i) {
      if (!(*tokens)[i].is_string() || !(*scores)[i].is_number()) {
        malformed(path, line, "token must be a string and score a number");
      }
      row.tokens.push_back((*tokens)[i].get<std::string>());
      row.scores.push_back((*scores)[i].get<double>());
    }
    t.rows.push_back(std::move(row));
  });
  return t;
}

SyntaxTable parse_syntax(const fs::path& path, const std::string& bytes) {
  SyntaxTable t;
  for_each_record(path, bytes, [&](std::size_t line, const json& r) {
    read_row_id(path, line, r, t.rows.size());
    SyntaxRow row;
    auto flag = [&](const char* key) {
      auto it = r.find(key);
      if (it == r.end() || !it->is_boolean()) {
        malformed(path, line, std::string("missing boolean '") + key + "'");
      }
      return it->get<bool>();
    };
    row.has_subject = flag("has_subject");
    row.has_verb = flag("has_verb");
    row.has_object = flag("has_object");
    if (auto it = r.find("token_count_override"); it != r.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        malformed(path, line, "token_count_override must be a non-negative integer");
      }
      row.token_count_override = it->get<int>();
    }
    t.rows.push_back(row);
  });
  return t;
}

std::vector<PerturbedPredictionRow> parse_perturbed(const fs::path& path,
                                                    const std::string& bytes,
                                                    int class_count) {
  std::vector<PerturbedPredictionRow> rows;
  for_each_record(path, bytes, [&](std::size_t line, const json& r) {
    PerturbedPredictionRow row;
    auto id = r.find("id");
    if (id == r.end() || !id->is_number_integer() || id->get<std::int64_t>() < 0) {
      malformed(path, line, "missing non-negative integer 'id'");
    }
    row.id = id->get<std::int64_t>();
    auto name = r.find("test_name");
    if (name == r.end() || !name->is_string()) {
      malformed(path, line, "missing string 'test_name'");
    }
    row.test_name = name->get<std::string>();
    row.probs = read_probs(path, line, r, class_count);
    if (auto f = r.find("family"); f != r.end() && f->is_string()) {
      row.family = f->get<std::string>();
    }
    if (auto t = r.find("perturbed_text"); t != r.end() && t->is_string()) {
      row.perturbed_text = t->get<std::string>();
    }
    rows.push_back(std::move(row));
  });
  return rows;
}

template <typename Map>
auto find_pair(const Map& m, std::string_view pipeline, std::string_view split)
    -> decltype(&m.begin()->second) {
  auto it = m.find(PipelineSplitKey(std::string(pipeline), std::string(split)));
  return it == m.end() ? nullptr : &it->second;
}

void add_entry(ValidationReport& report, const fs::path& file, std::string check,
               std::optional<std::int64_t> id, std::string message) {
  report.ok = false;
  report.entries.push_back(
      {file.generic_string(), std::move(check), id, std::move(message)});
}

void check_probability_row(ValidationReport& report, const fs::path& file,
                           std::int64_t id, const Eigen::Ref<const Eigen::RowVectorXd>& p) {
  if (!p.allFinite() || (p.array() < 0.0).any() || (p.array() > 1.0).any()) {
    add_entry(report, file, "probability out of range", id,
              "entries must be finite and in [0, 1]");
    return;
  }
  const double sum = p.sum();
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    std::ostringstream msg;
    msg << "row sums to " << sum;
    add_entry(report, file, "probability sum out of tolerance", id, msg.str());
  }
}

}  // namespace

const Utterance& Split::at(std::int64_t id) const {
  if (!contains(id)) {
    throw Error(ErrorCode::kUnknownUtterance,
                "split '" + name + "' has no utterance " + std::to_string(id));
  }
  return utterances[static_cast<std::size_t>(id)];
}

const Split& ProjectState::split(std::string_view name) const {
  auto it = splits.find(std::string(name));
  if (it == splits.end()) {
    throw Error(ErrorCode::kUnknownSplit, "unknown split '" + std::string(name) + "'");
  }
  return it->second;
}

const PredictionTable& ProjectState::prediction_table(std::string_view pipeline,
                                                      std::string_view split_name) const {
  config.pipeline(pipeline);
  split(split_name);
  if (auto* t = find_pair(predictions, pipeline, split_name)) return *t;
  throw Error(ErrorCode::kMissingPredictions,
              "pipeline '" + std::string(pipeline) + "' has no predictions for split '" +
                  std::string(split_name) + "'");
}

bool ProjectState::has_predictions(std::string_view pipeline,
                                   std::string_view split_name) const {
  return find_pair(predictions, pipeline, split_name) != nullptr;
}

const EmbeddingMatrix* ProjectState::embedding(std::string_view name) const {
  auto it = embeddings.find(std::string(name));
  return it == embeddings.end() ? nullptr : &it->second;
}

const SyntaxTable* ProjectState::syntax_table(std::string_view name) const {
  auto it = syntax.find(std::string(name));
  return it == syntax.end() ? nullptr : &it->second;
}

const SaliencyTable* ProjectState::saliency_table(std::string_view pipeline,
                                                  std::string_view split_name) const {
  return find_pair(saliency, pipeline, split_name);
}

const McSampleTable* ProjectState::mc_table(std::string_view pipeline,
                                            std::string_view split_name) const {
  return find_pair(mc_samples, pipeline, split_name);
}

Split read_dataset(const fs::path& path, const std::string& split,
                   const ProjectConfig& config) {
  return parse_dataset(path, read_file(path), split, config);
}

Eigen::MatrixXd read_prediction_rows(const fs::path& path, int class_count) {
  return parse_predictions(path, read_file(path), class_count);
}

FloatMatrixFile read_float_matrix(const fs::path& path) {
  return parse_float_matrix(path, read_file(path));
}

void write_float_matrix(const fs::path& path, std::int64_t rows, std::int64_t dim,
                        std::int64_t samples, const std::vector<float>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << rows << ' ' << dim;
  if (samples > 0) out << ' ' << samples;
  out << '\n';
  static_assert(std::endian::native == std::endian::little,
                "writer assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

std::vector<PerturbedPredictionRow> read_perturbed_predictions(const fs::path& path,
                                                               int class_count) {
  return parse_perturbed(path, read_file(path), class_count);
}

ProjectState load_artifacts(const ProjectConfig& config) {
  ProjectState state;
  state.config = config;
  Fnv1a64 fingerprint;
  fingerprint.update(config.hash);
  auto read_hashed = [&](const fs::path& path) {
    std::string bytes = read_file(path);
    fingerprint.update(path.filename().string()).update(bytes);
    return bytes;
  };

  for (const auto& [name, rel] : config.splits) {
    const fs::path path = config.resolve(rel);
    state.splits.emplace(name, parse_dataset(path, read_hashed(path), name, config));
  }

  for (const auto& [name, rel] : config.embeddings) {
    const fs::path path = config.resolve(rel);
    FloatMatrixFile m = parse_float_matrix(path, read_hashed(path));
    if (m.samples != 0) malformed(path, 1, "embedding header must be 'rows dim'");
    if (m.dim < 2) malformed(path, 1, "embedding dimension must be at least 2");
    check_rows(path, static_cast<std::size_t>(m.rows), state.split(name).size());
    EmbeddingMatrix e;
    e.split = name;
    e.source = path;
    e.rows = Eigen::Map<const RowMatrixXf>(m.values.data(), m.rows, m.dim);
    state.embeddings.emplace(name, std::move(e));
  }

  for (const auto& [name, rel] : config.syntax) {
    const fs::path path = config.resolve(rel);
    SyntaxTable t = parse_syntax(path, read_hashed(path));
    check_rows(path, t.rows.size(), state.split(name).size());
    t.split = name;
    t.source = path;
    state.syntax.emplace(name, std::move(t));
  }

  const int classes = config.class_count();
  for (const auto& p : config.pipelines) {
    for (const auto& [name, rel] : p.predictions) {
      const fs::path path = config.resolve(rel);
      PredictionTable t;
      t.pipeline_id = p.id;
      t.split = name;
      t.source = path;
      t.probs = parse_predictions(path, read_hashed(path), classes);
      check_rows(path, static_cast<std::size_t>(t.probs.rows()), state.split(name).size());
      state.predictions.emplace(PipelineSplitKey(p.id, name), std::move(t));
    }
    for (const auto& [name, rel] : p.saliency) {
      const fs::path path = config.resolve(rel);
      SaliencyTable t = parse_saliency(path, read_hashed(path));
      check_rows(path, t.rows.size(), state.split(name).size());
      t.pipeline_id = p.id;
      t.split = name;
      t.source = path;
      state.saliency.emplace(PipelineSplitKey(p.id, name), std::move(t));
    }
    for (const auto& [name, rel] : p.mc_samples) {
      const fs::path path = config.resolve(rel);
      FloatMatrixFile m = parse_float_matrix(path, read_hashed(path));
      if (m.samples < 2) {
        throw Error(ErrorCode::kTooFewSamples,
                    path.string() + ": header must be 'rows classes samples' with "
                                    "samples >= 2");
      }
      if (m.dim != classes) {
        malformed(path, 1, "expected " + std::to_string(classes) + " classes");
      }
      check_rows(path, static_cast<std::size_t>(m.rows), state.split(name).size());
      McSampleTable t;
      t.pipeline_id = p.id;
      t.split = name;
      t.source = path;
      t.samples = static_cast<int>(m.samples);
      using RowMatrixXfMap = Eigen::Map<const RowMatrixXf>;
      t.values = RowMatrixXfMap(m.values.data(), m.rows * m.samples, m.dim).cast<double>();
      state.mc_samples.emplace(PipelineSplitKey(p.id, name), std::move(t));
    }
    // Perturbed-prediction files are hashed here but parsed lazily by the
    // file-backed provider.
    for (const auto& [name, rel] : p.perturbed_predictions) {
      state.split(name);
      const fs::path path = config.resolve(rel);
      if (fs::exists(path)) read_hashed(path);
    }
  }
  state.fingerprint = fingerprint.digest();
  return state;
}

ValidationReport validate_artifacts(const ProjectState& state) {
  ValidationReport report;
  for (const auto& [key, table] : state.predictions) {
    for (Eigen::Index i = 0; i < table.probs.rows(); ++i) {
      check_probability_row(report, table.source, i, table.probs.row(i));
    }
  }
  for (const auto& [name, e] : state.embeddings) {
    for (Eigen::Index i = 0; i < e.rows.rows(); ++i) {
      if (!e.rows.row(i).allFinite()) {
        add_entry(report, e.source, "embedding not finite", i,
                  "embedding for utterance " + std::to_string(i) +
                      " contains NaN or Inf");
      } else if (e.rows.row(i).squaredNorm() == 0.0f) {
        add_entry(report, e.source, "zero embedding", i,
                  "embedding for utterance " + std::to_string(i) + " is all zeros");
      }
    }
  }
  for (const auto& [key, t] : state.saliency) {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& scores = t.rows[i].scores;
      if (scores.empty()) continue;
      const auto id = static_cast<std::int64_t>(i);
      if (std::any_of(scores.begin(), scores.end(),
                      [](double s) { return !(s >= 0.0) || !std::isfinite(s); })) {
        add_entry(report, t.source, "saliency score negative", id,
                  "scores must be finite and non-negative");
        continue;
      }
      double sum = 0.0;
      for (double s : scores) sum += s;
      if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        std::ostringstream msg;
        msg << "scores sum to " << sum;
        add_entry(report, t.source, "saliency not normalized", id, msg.str());
      }
    }
  }
  for (const auto& [key, t] : state.mc_samples) {
    for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
      check_probability_row(report, t.source, r / t.samples, t.values.row(r));
    }
  }
  const int classes = state.config.class_count();
  for (const auto& p : state.config.pipelines) {
    for (const auto& [name, rel] : p.perturbed_predictions) {
      const fs::path path = state.config.resolve(rel);
      std::vector<PerturbedPredictionRow> rows;
      try {
        rows = read_perturbed_predictions(path, classes);
      } catch (const Error& e) {
        add_entry(report, path, "unreadable", std::nullopt, e.what());
        continue;
      }
      const Split& split = state.split(name);
      std::set<std::pair<std::int64_t, std::string>> seen;
      for (const auto& row : rows) {
        if (!split.contains(row.id)) {
          add_entry(report, path, "unknown utterance id", row.id,
                    "id not present in split '" + name + "'");
          continue;
        }
        if (!seen.emplace(row.id, row.test_name).second) {
          add_entry(report, path, "duplicate perturbed prediction", row.id,
                    "duplicate (id, test_name) = (" + std::to_string(row.id) + ", " +
                        row.test_name + ")");
        }
        check_probability_row(report, path, row.id, row.probs.transpose());
      }
    }
  }
  return report;
}

json state_to_json(const ProjectState& s) {
  json out;
  out["config"] = config_to_json(s.config);
  out["fingerprint"] = hex64(s.fingerprint);
  json splits = json::object();
  for (const auto& [name, split] : s.splits) {
    json rows = json::array();
    for (const auto& u : split.utterances) {
      rows.push_back({{"id", u.id}, {"text", u.text},
                      {"label", s.config.class_name(u.label)}});
    }
    splits[name] = std::move(rows);
  }
  out["splits"] = std::move(splits);
  auto matrix = [](const auto& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  json preds = json::object();
  for (const auto& [key, t] : s.predictions) {
    preds[key.first + "/" + key.second] = matrix(t.probs);
  }
  out["predictions"] = std::move(preds);
  json emb = json::object();
  for (const auto& [name, e] : s.embeddings) emb[name] = matrix(e.rows);
  out["embeddings"] = std::move(emb);
  json syn = json::object();
  for (const auto& [name, t] : s.syntax) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      rows.push_back({{"has_subject", r.has_subject},
                      {"has_verb", r.has_verb},
                      {"has_object", r.has_object},
                      {"token_count_override",
                       r.token_count_override ? json(*r.token_count_override) : json()}});
    }
    syn[name] = std::move(rows);
  }
  out["syntax"] = std::move(syn);
  json sal = json::object();
  for (const auto& [key, t] : s.saliency) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back({{"tokens", r.tokens}, {"scores", r.scores}});
    sal[key.first + "/" + key.second] = std::move(rows);
  }
  out["saliency"] = std::move(sal);
  json mc = json::object();
  for (const auto& [key, t] : s.mc_samples) {
    mc[key.first + "/" + key.second] = {{"samples", t.samples}, {"values", matrix(t.values)}};
  }
  out["mc_samples"] = std::move(mc);
  return out;
}

json validation_to_json(const ValidationReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"file", e.file},
                       {"check", e.check},
                       {"utterance_id", e.utterance_id ? json(*e.utterance_id) : json()},
                       {"message", e.message}});
  }
  return {{"ok", report.ok}, {"entries", std::move(entries)}};
}

}  // namespace errscope
