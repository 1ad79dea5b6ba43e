// Copyright 2026 The vsxscan Authors.
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

#include "vsxscan/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::classify {

namespace {

constexpr std::array<std::string_view, 6> kVectorNames = {
    "GlobalState", "RequestedConfiguration", "UsedConfiguration",
    "InputBox",    "RequestedCommand",       "UsedCommand"};

constexpr std::array<std::string_view, 2> kLabelNames = {"CredentialRelated",
                                                         "Normal"};

bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }
bool IsLower(char c) { return c >= 'a' && c <= 'z'; }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsWordByte(char c) {
  return IsUpper(c) || IsLower(c) || IsDigit(c) ||
         static_cast<unsigned char>(c) >= 0x80;
}

// Separator-free lowercase text used for must-flag matching.
std::string Compact(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (IsUpper(c)) {
      out += static_cast<char>(c - 'A' + 'a');
    } else if (IsWordByte(c)) {
      out += c;
    }
  }
  return out;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double UnitDouble(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void Shuffle(std::vector<size_t>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

[[noreturn]] void ModelError(const std::string& what) {
  throw Error(ErrorCode::kModelFormat, what);
}

double ParseDouble(const std::string& s) {
  try {
    return text::HexToDouble(s);
  } catch (const Error&) {
    ModelError("bad number '" + s + "'");
  }
}

int ParseInt(const std::string& s) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) ModelError("bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    ModelError("bad integer '" + s + "'");
  }
}

std::string IntField(int v) { return std::to_string(v); }

}  // namespace

std::string_view VectorName(Vector v) {
  return kVectorNames[static_cast<size_t>(v)];
}

std::optional<Vector> VectorFromName(std::string_view name) {
  for (size_t i = 0; i < kVectorNames.size(); ++i) {
    if (kVectorNames[i] == name) return static_cast<Vector>(i);
  }
  return std::nullopt;
}

std::string_view LabelName(Label l) {
  return kLabelNames[static_cast<size_t>(l)];
}

std::optional<Label> LabelFromName(std::string_view name) {
  for (size_t i = 0; i < kLabelNames.size(); ++i) {
    if (kLabelNames[i] == name) return static_cast<Label>(i);
  }
  return std::nullopt;
}

std::optional<Vector> VectorForSink(graph::SinkApi api) {
  using graph::SinkApi;
  switch (api) {
    case SinkApi::kRegisterCommand:
    case SinkApi::kRegisterTextEditorCommand:
    case SinkApi::kExecuteCommand:
      return Vector::kUsedCommand;
    case SinkApi::kGetConfiguration:
      return Vector::kUsedConfiguration;
    case SinkApi::kShowInputBox:
      return Vector::kInputBox;
    case SinkApi::kGlobalStateUpdate:
    case SinkApi::kGlobalStateGet:
      return Vector::kGlobalState;
    case SinkApi::kClipboardReadText:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<DataPoint> ExtractDataPoints(
    const ingest::ExtensionPackage& package,
    const std::vector<graph::TracedSite>& sites, ExtractionStats* stats) {
  ExtractionStats local;
  ExtractionStats& st = stats != nullptr ? *stats : local;
  std::vector<DataPoint> out;
  std::set<std::pair<Vector, std::string>> seen;
  auto add = [&](DataPoint p) {
    if (p.text.empty()) {
      ++st.empty;
      return;
    }
    if (!seen.insert({p.vector, p.text}).second) {
      ++st.duplicates;
      return;
    }
    p.extension_id = package.extension_id;
    out.push_back(std::move(p));
  };

  const ingest::ExtensionManifest& m = package.manifest;
  const auto commands = ingest::RequestedCommands(m);
  for (const ingest::CommandContribution& c : commands) {
    DataPoint p;
    p.vector = Vector::kRequestedCommand;
    p.text = c.title.empty() ? c.command_id : c.title + " | " + c.command_id;
    p.location.manifest_path = "contributes.commands[" + c.command_id + "]";
    add(std::move(p));
  }
  for (const ingest::ConfigurationContribution& c :
       ingest::RequestedConfigurations(m)) {
    DataPoint p;
    p.vector = Vector::kRequestedConfiguration;
    p.text = c.description.empty() ? c.key : c.key + " | " + c.description;
    p.location.manifest_path = "contributes.configuration[" + c.key + "]";
    add(std::move(p));
  }
  for (const std::string& id : ingest::ForeignCommandListeners(m, commands)) {
    DataPoint p;
    p.vector = Vector::kUsedCommand;
    p.text = id;
    p.location.manifest_path = "activationEvents[onCommand:" + id + "]";
    add(std::move(p));
  }

  for (const graph::TracedSite& ts : sites) {
    const auto vector = VectorForSink(ts.site.api);
    if (!vector) continue;
    for (const graph::ResolvedString& v : ts.values) {
      if (!v.resolved()) {
        ++st.unresolved;
        continue;
      }
      DataPoint p;
      p.vector = *vector;
      p.text = v.value;
      p.resolution = v.status;
      p.location.file = ts.site.file;
      p.location.span = ts.site.span;
      p.location.position = ts.site.position;
      add(std::move(p));
    }
  }
  return out;
}

// ---- featurization ---------------------------------------------------------------

std::vector<std::string> Tokenize(std::string_view s, bool split_camel_case) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (!IsWordByte(c)) {
      flush();
      continue;
    }
    if (split_camel_case && IsUpper(c) && !cur.empty()) {
      const char prev = s[i - 1];
      const bool next_lower = i + 1 < s.size() && IsLower(s[i + 1]);
      // fooBar | 2Fa | HTTPServer
      if (IsLower(prev) || IsDigit(prev) || (IsUpper(prev) && next_lower)) {
        flush();
      }
    }
    cur += IsUpper(c) ? static_cast<char>(c - 'A' + 'a') : c;
  }
  flush();
  return out;
}

FeatureText Featurize(std::string_view text, Vector vector,
                      const FeaturizerConfig& config) {
  FeatureText f;
  f.tokens = Tokenize(text);
  if (f.tokens.empty()) {
    throw Error(ErrorCode::kEmptyText,
                "no tokens in '" + std::string(text) + "'");
  }
  f.raw = std::string(text::Trim(text));
  if (config.vector_token) f.vector = std::string(VectorName(vector));
  return f;
}

FeatureText Featurize(const DataPoint& point, const FeaturizerConfig& config) {
  return Featurize(point.text, point.vector, config);
}

std::vector<std::pair<std::string, double>> FeatureVector(
    const FeatureText& f, const FeaturizerConfig& config) {
  std::set<std::string> names;
  for (size_t i = 0; i < f.tokens.size(); ++i) {
    names.insert("w:" + f.tokens[i]);
    if (config.word_bigrams && i + 1 < f.tokens.size()) {
      names.insert("b:" + f.tokens[i] + " " + f.tokens[i + 1]);
    }
    const std::string padded = "#" + f.tokens[i] + "#";
    for (int n = config.char_ngram_min; n <= config.char_ngram_max; ++n) {
      if (n <= 0) continue;
      const size_t len = static_cast<size_t>(n);
      for (size_t k = 0; k + len <= padded.size(); ++k) {
        names.insert("c:" + padded.substr(k, len));
      }
    }
  }
  if (config.raw_field) names.insert("r:" + text::ToLowerAscii(f.raw));
  if (!f.vector.empty()) names.insert("v:" + f.vector);
  const double value = 1.0 / std::sqrt(static_cast<double>(names.size()));
  std::vector<std::pair<std::string, double>> out;
  out.reserve(names.size());
  for (const std::string& n : names) out.emplace_back(n, value);
  return out;
}

// ---- lexicon ------------------------------------------------------------------------

Lexicon Lexicon::Default() {
  Lexicon l;
  for (const char* t :
       {"password", "passwd", "pwd", "apikey", "api-key", "api_key", "secret",
        "credential", "accesstoken", "access-token", "auth-token",
        "privatekey", "client-secret", "webhook"}) {
    l.terms.push_back({t, 8.0, true});
  }
  for (const char* t : {"token", "key", "auth"}) {
    l.terms.push_back({t, 1.5, false});
  }
  l.negating_suffixes = {"less"};
  return l;
}

std::vector<std::string> Lexicon::Matches(const FeatureText& f) const {
  std::string compact;
  for (const std::string& t : f.tokens) compact += t;
  const std::set<std::string> tokens(f.tokens.begin(), f.tokens.end());
  std::vector<std::string> out;
  std::set<std::string> matched_forms;
  for (const LexiconTerm& term : terms) {
    const std::string form = Compact(term.term);
    if (form.empty() || matched_forms.count(form) > 0) continue;
    bool hit = false;
    if (!term.must_flag) {
      hit = tokens.count(form) > 0;
    } else {
      for (size_t p = compact.find(form); p != std::string::npos && !hit;
           p = compact.find(form, p + 1)) {
        const std::string_view rest =
            std::string_view(compact).substr(p + form.size());
        hit = std::none_of(negating_suffixes.begin(), negating_suffixes.end(),
                           [&](const std::string& neg) {
                             return text::StartsWith(rest, neg);
                           });
      }
    }
    if (hit) {
      matched_forms.insert(form);
      out.push_back(term.term);
    }
  }
  return out;
}

double Lexicon::Score(const FeatureText& f) const {
  double score = 0;
  for (const std::string& m : Matches(f)) {
    for (const LexiconTerm& term : terms) {
      if (term.term == m) {
        score += term.weight;
        break;
      }
    }
  }
  return score;
}

// ---- model I/O ---------------------------------------------------------------------

std::string ClassifierModel::Serialize() const {
  std::string out;
  auto line = [&](std::vector<std::string> fields) {
    out += text::JoinRecord(fields);
    out += '\n';
  };
  line({"vsxscan-model", IntField(kModelFormatVersion)});
  line({"threshold", text::DoubleToHex(threshold)});
  line({"bias", text::DoubleToHex(bias)});
  line({"class_weights", text::DoubleToHex(class_weights.credential),
        text::DoubleToHex(class_weights.normal)});
  line({"featurizer", IntField(featurizer.char_ngram_min),
        IntField(featurizer.char_ngram_max),
        IntField(featurizer.word_bigrams), IntField(featurizer.raw_field),
        IntField(featurizer.vector_token)});
  for (const LexiconTerm& t : lexicon.terms) {
    line({"lexicon", t.term, text::DoubleToHex(t.weight),
          IntField(t.must_flag)});
  }
  for (const std::string& s : lexicon.negating_suffixes) {
    line({"negator", s});
  }
  for (const auto& [name, w] : weights) {
    line({"weight", name, text::DoubleToHex(w)});
  }
  line({"end"});
  return out;
}

ClassifierModel ClassifierModel::Parse(std::string_view data) {
  ClassifierModel m;
  m.lexicon = {};
  bool header = false;
  bool ended = false;
  size_t line_no = 0;
  for (const std::string& line : text::Split(data, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    if (ended) ModelError("content after end marker");
    const auto f = text::SplitRecord(line);
    auto need = [&](size_t n) {
      if (f.size() != n) {
        ModelError("line " + std::to_string(line_no) + ": expected " +
                   std::to_string(n) + " fields");
      }
    };
    const std::string& tag = f[0];
    if (!header) {
      if (tag != "vsxscan-model") ModelError("missing model header");
      need(2);
      const int version = ParseInt(f[1]);
      if (version != kModelFormatVersion) {
        ModelError("unsupported model format version " + f[1]);
      }
      header = true;
    } else if (tag == "threshold") {
      need(2);
      m.threshold = ParseDouble(f[1]);
    } else if (tag == "bias") {
      need(2);
      m.bias = ParseDouble(f[1]);
    } else if (tag == "class_weights") {
      need(3);
      m.class_weights = {ParseDouble(f[1]), ParseDouble(f[2])};
    } else if (tag == "featurizer") {
      need(6);
      m.featurizer.char_ngram_min = ParseInt(f[1]);
      m.featurizer.char_ngram_max = ParseInt(f[2]);
      m.featurizer.word_bigrams = ParseInt(f[3]) != 0;
      m.featurizer.raw_field = ParseInt(f[4]) != 0;
      m.featurizer.vector_token = ParseInt(f[5]) != 0;
    } else if (tag == "lexicon") {
      need(4);
      m.lexicon.terms.push_back({f[1], ParseDouble(f[2]), ParseInt(f[3]) != 0});
    } else if (tag == "negator") {
      need(2);
      m.lexicon.negating_suffixes.push_back(f[1]);
    } else if (tag == "weight") {
      need(3);
      m.weights[f[1]] = ParseDouble(f[2]);
    } else if (tag == "end") {
      need(1);
      ended = true;
    } else {
      ModelError("unknown record '" + tag + "'");
    }
  }
  if (!header) ModelError("empty model");
  if (!ended) ModelError("truncated model (no end marker)");
  if (!(m.threshold > 0 && m.threshold < 1)) ModelError("threshold out of range");
  if (!(m.class_weights.credential > 0 && m.class_weights.normal > 0)) {
    ModelError("class weights must be positive");
  }
  return m;
}

void ClassifierModel::Save(const std::filesystem::path& path) const {
  text::WriteFile(path, Serialize());
}

ClassifierModel ClassifierModel::Load(const std::filesystem::path& path) {
  return Parse(text::ReadFile(path));
}

// ---- classification --------------------------------------------------------------

namespace {

double Response(const ClassifierModel& m, const FeatureText& f) {
  double z = m.bias + m.lexicon.Score(f);
  for (const auto& [name, x] : FeatureVector(f, m.featurizer)) {
    auto it = m.weights.find(name);
    if (it != m.weights.end()) z += it->second * x;
  }
  return z;
}

}  // namespace

Prediction Classify(const ClassifierModel& model, const DataPoint& point) {
  const double score =
      Sigmoid(Response(model, Featurize(point, model.featurizer)));
  return {score >= model.threshold ? Label::kCredentialRelated : Label::kNormal,
          score};
}

Prediction LinearClassifier::Classify(const DataPoint& point) const {
  return classify::Classify(model_, point);
}

// ---- training -------------------------------------------------------------------------

ClassifierModel Train(const std::vector<LabeledDataPoint>& data,
                      const TrainConfig& config,
                      std::vector<double>* loss_history) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no training data");
  const bool has_pos =
      std::any_of(data.begin(), data.end(), [](const LabeledDataPoint& d) {
        return d.label == Label::kCredentialRelated;
      });
  const bool has_neg =
      std::any_of(data.begin(), data.end(), [](const LabeledDataPoint& d) {
        return d.label == Label::kNormal;
      });
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kSingleClassData,
                "training data holds a single class");
  }
  if (!(config.class_weights.credential > 0 && config.class_weights.normal > 0)) {
    throw Error(ErrorCode::kUsage, "class weights must be positive");
  }

  struct Example {
    std::vector<std::pair<size_t, double>> x;
    double offset;
    double y;
    double c;
  };
  std::vector<std::vector<std::pair<std::string, double>>> raw;
  std::vector<double> offsets;
  std::map<std::string, size_t> vocab;
  for (const LabeledDataPoint& d : data) {
    const FeatureText f = Featurize(d.point, config.featurizer);
    raw.push_back(FeatureVector(f, config.featurizer));
    offsets.push_back(config.lexicon.Score(f));
    for (const auto& [name, x] : raw.back()) vocab.emplace(name, 0);
  }
  size_t next = 0;
  for (auto& [name, idx] : vocab) idx = next++;

  std::vector<Example> ex;
  double total_c = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    Example e;
    for (const auto& [name, x] : raw[i]) e.x.emplace_back(vocab.at(name), x);
    e.offset = offsets[i];
    const bool pos = data[i].label == Label::kCredentialRelated;
    e.y = pos ? 1.0 : 0.0;
    e.c = pos ? config.class_weights.credential : config.class_weights.normal;
    total_c += e.c;
    ex.push_back(std::move(e));
  }

  std::mt19937_64 rng(config.seed);
  std::vector<double> w(vocab.size());
  for (double& wi : w) wi = (UnitDouble(rng) - 0.5) * 2e-3;
  double b = config.initial_bias;

  std::vector<double> grad(w.size());
  auto objective = [&](bool want_grad) {
    double loss = 0;
    double gb = 0;
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    for (const Example& e : ex) {
      double z = b + e.offset;
      for (const auto& [j, x] : e.x) z += w[j] * x;
      loss += e.c * (Softplus(z) - e.y * z);
      if (want_grad) {
        const double g = e.c * (Sigmoid(z) - e.y) / total_c;
        gb += g;
        for (const auto& [j, x] : e.x) grad[j] += g * x;
      }
    }
    double reg = 0;
    for (size_t j = 0; j < w.size(); ++j) {
      reg += w[j] * w[j];
      if (want_grad) grad[j] += config.l2 * w[j];
    }
    return std::pair(loss / total_c + 0.5 * config.l2 * reg, gb);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto [loss, gb] = objective(true);
    if (loss_history != nullptr) loss_history->push_back(loss);
    for (size_t j = 0; j < w.size(); ++j) w[j] -= config.learning_rate * grad[j];
    b -= config.learning_rate * gb;
  }
  if (loss_history != nullptr) loss_history->push_back(objective(false).first);

  ClassifierModel m;
  m.lexicon = config.lexicon;
  m.bias = b;
  m.class_weights = config.class_weights;
  m.threshold = config.threshold;
  m.featurizer = config.featurizer;
  for (const auto& [name, idx] : vocab) m.weights.emplace(name, w[idx]);
  return m;
}

// ---- evaluation ---------------------------------------------------------------------

EvalMetrics EvalMetrics::FromConfusion(int64_t tp, int64_t fp, int64_t tn,
                                       int64_t fn) {
  EvalMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  auto ratio = [](int64_t num, int64_t den, bool& degenerate) {
    degenerate = den == 0;
    return degenerate ? 1.0
                      : static_cast<double>(num) / static_cast<double>(den);
  };
  bool unused = false;
  m.accuracy = ratio(tp + tn, m.total(), unused);
  m.precision = ratio(tp, tp + fp, m.precision_degenerate);
  m.true_positive_rate = ratio(tp, tp + fn, m.tpr_degenerate);
  m.true_negative_rate = ratio(tn, tn + fp, m.tnr_degenerate);
  const double p = m.precision;
  const double r = m.true_positive_rate;
  m.f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  return m;
}

EvalMetrics Evaluate(const Classifier& classifier,
                     const std::vector<LabeledDataPoint>& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no evaluation data");
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const LabeledDataPoint& d : data) {
    const bool predicted =
        classifier.Classify(d.point).label == Label::kCredentialRelated;
    const bool actual = d.label == Label::kCredentialRelated;
    if (predicted && actual) ++tp;
    if (predicted && !actual) ++fp;
    if (!predicted && !actual) ++tn;
    if (!predicted && actual) ++fn;
  }
  return EvalMetrics::FromConfusion(tp, fp, tn, fn);
}

EvalMetrics Evaluate(const ClassifierModel& model,
                     const std::vector<LabeledDataPoint>& data) {
  return Evaluate(LinearClassifier(model), data);
}

std::pair<std::vector<LabeledDataPoint>, std::vector<LabeledDataPoint>>
StratifiedSplit(const std::vector<LabeledDataPoint>& data,
                double test_fraction, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<bool> in_test(data.size(), false);
  for (Label label : {Label::kCredentialRelated, Label::kNormal}) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < data.size(); ++i) {
      if (data[i].label == label) idx.push_back(i);
    }
    Shuffle(idx, rng);
    size_t n = static_cast<size_t>(
        std::llround(test_fraction * static_cast<double>(idx.size())));
    if (idx.size() >= 2) n = std::clamp<size_t>(n, 1, idx.size() - 1);
    for (size_t k = 0; k < n && k < idx.size(); ++k) in_test[idx[k]] = true;
  }
  std::pair<std::vector<LabeledDataPoint>, std::vector<LabeledDataPoint>> out;
  for (size_t i = 0; i < data.size(); ++i) {
    (in_test[i] ? out.second : out.first).push_back(data[i]);
  }
  return out;
}

// ---- corpus file --------------------------------------------------------------------

std::vector<LabeledDataPoint> ParseCorpus(std::string_view data) {
  std::vector<LabeledDataPoint> out;
  size_t line_no = 0;
  for (const std::string& line : text::Split(data, '\n')) {
    ++line_no;
    const std::string_view trimmed = text::Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto f = text::SplitRecord(line);
    const std::string where = "corpus line " + std::to_string(line_no);
    if (f.size() != 4) {
      throw Error(ErrorCode::kCorpusFormat, where + ": expected 4 fields");
    }
    const auto vector = VectorFromName(f[1]);
    const auto label = LabelFromName(f[3]);
    if (!vector) {
      throw Error(ErrorCode::kCorpusFormat, where + ": unknown vector " + f[1]);
    }
    if (!label) {
      throw Error(ErrorCode::kCorpusFormat, where + ": unknown label " + f[3]);
    }
    LabeledDataPoint d;
    d.point.extension_id = f[0];
    d.point.vector = *vector;
    d.point.text = f[2];
    d.label = *label;
    out.push_back(std::move(d));
  }
  return out;
}

std::string SerializeCorpus(const std::vector<LabeledDataPoint>& data) {
  std::string out;
  for (const LabeledDataPoint& d : data) {
    out += text::JoinRecord({d.point.extension_id,
                             std::string(VectorName(d.point.vector)),
                             d.point.text, std::string(LabelName(d.label))});
    out += '\n';
  }
  return out;
}

std::vector<LabeledDataPoint> LoadCorpus(const std::filesystem::path& path) {
  return ParseCorpus(text::ReadFile(path));
}

}  // namespace vsxscan::classify
