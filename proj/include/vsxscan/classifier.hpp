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

#ifndef VSXSCAN_CLASSIFIER_HPP_
#define VSXSCAN_CLASSIFIER_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vsxscan/js_ast.hpp"
#include "vsxscan/package.hpp"
#include "vsxscan/sinks.hpp"

namespace vsxscan::classify {

enum class Vector : uint8_t {
  kGlobalState,
  kRequestedConfiguration,
  kUsedConfiguration,
  kInputBox,
  kRequestedCommand,
  kUsedCommand,
};
inline constexpr std::array<Vector, 6> kAllVectors = {
    Vector::kGlobalState,      Vector::kRequestedConfiguration,
    Vector::kUsedConfiguration, Vector::kInputBox,
    Vector::kRequestedCommand, Vector::kUsedCommand};

std::string_view VectorName(Vector v);
std::optional<Vector> VectorFromName(std::string_view name);

// Where a data point came from: a source span or a manifest path such as
// "contributes.commands[codegpt.removeApiKeyCodeGPT]".
struct Location {
  std::string file;  // relative source path; empty for manifest points
  js::Span span;
  js::Position position;
  std::string manifest_path;

  bool in_manifest() const { return file.empty(); }
  friend bool operator==(const Location&, const Location&) = default;
};

struct DataPoint {
  Vector vector = Vector::kGlobalState;
  std::string text;
  std::string extension_id;
  Location location;
  graph::Resolution resolution = graph::Resolution::kLiteral;

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

enum class Label : uint8_t { kCredentialRelated, kNormal };
std::string_view LabelName(Label l);
std::optional<Label> LabelFromName(std::string_view name);

struct LabeledDataPoint {
  DataPoint point;
  Label label = Label::kNormal;
};

struct ExtractionStats {
  int unresolved = 0;  // traced values that were not constants
  int empty = 0;       // resolved to the empty string
  int duplicates = 0;
};

// Manifest points first (commands, then configurations), then call-site
// points in the given order; one point per (vector, text).
std::vector<DataPoint> ExtractDataPoints(
    const ingest::ExtensionPackage& package,
    const std::vector<graph::TracedSite>& sites,
    ExtractionStats* stats = nullptr);

// The vector a sink contributes to; nullopt for clipboard reads.
std::optional<Vector> VectorForSink(graph::SinkApi api);

// ---- featurization ---------------------------------------------------------

struct FeaturizerConfig {
  int char_ngram_min = 3;
  int char_ngram_max = 4;
  bool word_bigrams = true;
  bool raw_field = true;
  bool vector_token = true;

  friend bool operator==(const FeaturizerConfig&,
                         const FeaturizerConfig&) = default;
};

// Lowercased tokens split on separators and, unless disabled, on camelCase
// boundaries ("openAI" -> open, ai).
std::vector<std::string> Tokenize(std::string_view text,
                                  bool split_camel_case = true);

struct FeatureText {
  std::vector<std::string> tokens;
  std::string raw;
  std::string vector;  // categorical token, empty when disabled
};

// Throws Error(kEmptyText) when no token survives normalization.
FeatureText Featurize(const DataPoint& point, const FeaturizerConfig& config);
FeatureText Featurize(std::string_view text, Vector vector,
                      const FeaturizerConfig& config);

// Sparse, L2-normalized indicator features keyed by name.
std::vector<std::pair<std::string, double>> FeatureVector(
    const FeatureText& text, const FeaturizerConfig& config);

// ---- lexicon ---------------------------------------------------------------------

struct LexiconTerm {
  std::string term;
  double weight = 0;
  // Must-flag terms match anywhere in the separator-free text; the others
  // match whole tokens only.
  bool must_flag = false;

  friend bool operator==(const LexiconTerm&, const LexiconTerm&) = default;
};

struct Lexicon {
  std::vector<LexiconTerm> terms;
  // A must-flag match directly followed by one of these ("passwordless") is
  // ignored.
  std::vector<std::string> negating_suffixes;

  static Lexicon Default();
  double Score(const FeatureText& text) const;
  // Terms that matched, in lexicon order.
  std::vector<std::string> Matches(const FeatureText& text) const;

  friend bool operator==(const Lexicon&, const Lexicon&) = default;
};

// ---- model ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

struct ClassWeights {
  double credential = 0.01;
  double normal = 0.1;

  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

struct ClassifierModel {
  Lexicon lexicon = Lexicon::Default();
  std::map<std::string, double> weights;
  double bias = -4.0;
  ClassWeights class_weights;
  double threshold = 0.5;
  FeaturizerConfig featurizer;

  // Lexicon only, no learned weights.
  static ClassifierModel Default() { return {}; }

  std::string Serialize() const;
  static ClassifierModel Parse(std::string_view text);
  void Save(const std::filesystem::path& path) const;
  static ClassifierModel Load(const std::filesystem::path& path);

  friend bool operator==(const ClassifierModel&,
                         const ClassifierModel&) = default;
};

struct Prediction {
  Label label = Label::kNormal;
  double score = 0;
};

// Backend-neutral interface; the scanner only needs Classify.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Prediction Classify(const DataPoint& point) const = 0;
};

class LinearClassifier final : public Classifier {
 public:
  explicit LinearClassifier(ClassifierModel model) : model_(std::move(model)) {}
  Prediction Classify(const DataPoint& point) const override;
  const ClassifierModel& model() const { return model_; }

 private:
  ClassifierModel model_;
};

Prediction Classify(const ClassifierModel& model, const DataPoint& point);

// ---- training and evaluation ---------------------------------------------

struct TrainConfig {
  uint64_t seed = 7;
  int epochs = 300;
  double learning_rate = 1.0;
  double l2 = 1e-4;
  ClassWeights class_weights;
  double threshold = 0.5;
  double initial_bias = -4.0;
  FeaturizerConfig featurizer;
  Lexicon lexicon = Lexicon::Default();
};

// Full-batch gradient descent on the class-weighted mean cross-entropy plus
// an L2 penalty. `loss_history` receives the objective before each epoch and
// after the last one.
ClassifierModel Train(const std::vector<LabeledDataPoint>& data,
                      const TrainConfig& config = {},
                      std::vector<double>* loss_history = nullptr);

struct EvalMetrics {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0;
  double precision = 0;
  double f1 = 0;
  double true_positive_rate = 0;
  double true_negative_rate = 0;
  bool precision_degenerate = false;
  bool tpr_degenerate = false;
  bool tnr_degenerate = false;

  int64_t total() const { return tp + fp + tn + fn; }
  static EvalMetrics FromConfusion(int64_t tp, int64_t fp, int64_t tn,
                                   int64_t fn);
};

EvalMetrics Evaluate(const Classifier& classifier,
                     const std::vector<LabeledDataPoint>& data);
EvalMetrics Evaluate(const ClassifierModel& model,
                     const std::vector<LabeledDataPoint>& data);

// Per-class shuffled split; `test_fraction` of each class goes to the second
// set (rounded, at least one item when the class has two or more).
std::pair<std::vector<LabeledDataPoint>, std::vector<LabeledDataPoint>>
StratifiedSplit(const std::vector<LabeledDataPoint>& data,
                double test_fraction, uint64_t seed);

// ---- labeled corpus file ---------------------------------------------------------
// One record per line: extension_id, vector, text, label (escaped fields).
// Lines starting with '#' and blank lines are ignored.

std::vector<LabeledDataPoint> ParseCorpus(std::string_view text);
std::string SerializeCorpus(const std::vector<LabeledDataPoint>& data);
std::vector<LabeledDataPoint> LoadCorpus(const std::filesystem::path& path);

}  // namespace vsxscan::classify

#endif  // VSXSCAN_CLASSIFIER_HPP_
