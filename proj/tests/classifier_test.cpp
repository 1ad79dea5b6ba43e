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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "vsxscan/error.hpp"

namespace vsxscan::classify {
namespace {

using Tokens = std::vector<std::string>;

const std::string kData = VSXSCAN_TEST_DATA "/data/labeled_fixture.tsv";

DataPoint Point(std::string text, Vector v = Vector::kRequestedConfiguration) {
  DataPoint p;
  p.vector = v;
  p.text = std::move(text);
  return p;
}

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

TEST(TokenizeTest, SplittingRules) {
  const Tokens t = Tokenize("easycode.openAI ApiKey");
  for (const char* want : {"open", "ai", "api", "key"}) {
    EXPECT_NE(std::find(t.begin(), t.end(), want), t.end()) << want;
  }
  EXPECT_EQ(t, (Tokens{"easycode", "open", "ai", "api", "key"}));
  EXPECT_EQ(Tokenize("CHAT_CONVERSATIONS"), (Tokens{"chat", "conversations"}));
  EXPECT_EQ(Tokenize("x"), Tokens{"x"});
  EXPECT_EQ(Tokenize("HTTPServer-port_no"), (Tokens{"http", "server", "port", "no"}));
  EXPECT_EQ(Tokenize("Enter your API key:"),
            (Tokens{"enter", "your", "api", "key"}));
  EXPECT_EQ(Tokenize("gpt4 codeGPT"), (Tokens{"gpt4", "code", "gpt"}));
  EXPECT_TRUE(Tokenize(" .-_ ").empty());
}

TEST(FeaturizeTest, FieldsAndEmptyText) {
  FeaturizerConfig c;
  FeatureText f = Featurize(Point("  Your OpenAI Api Key "), c);
  EXPECT_EQ(f.raw, "Your OpenAI Api Key");
  EXPECT_EQ(f.vector, "RequestedConfiguration");
  EXPECT_EQ(CodeOf([&] { Featurize(Point("..."), c); }), ErrorCode::kEmptyText);
  EXPECT_EQ(CodeOf([&] { Featurize(Point(""), c); }), ErrorCode::kEmptyText);

  auto fv = FeatureVector(f, c);
  double norm = 0;
  for (const auto& [name, x] : fv) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  auto has = [&](const std::string& n) {
    return std::any_of(fv.begin(), fv.end(),
                       [&](const auto& e) { return e.first == n; });
  };
  EXPECT_TRUE(has("w:openai") == false);
  EXPECT_TRUE(has("w:open"));
  EXPECT_TRUE(has("b:api key"));
  EXPECT_TRUE(has("c:#ke"));
  EXPECT_TRUE(has("r:your openai api key"));
  EXPECT_TRUE(has("v:RequestedConfiguration"));
}

TEST(LexiconTest, MatchingRules) {
  const Lexicon l = Lexicon::Default();
  FeaturizerConfig c;
  auto matches = [&](const std::string& s) {
    return l.Matches(Featurize(Point(s), c));
  };
  EXPECT_EQ(matches("Your OpenAI Api Key"), (Tokens{"apikey", "key"}));
  EXPECT_EQ(matches("api_key"), (Tokens{"apikey", "key"}));
  EXPECT_EQ(matches("keyboard layout"), Tokens{});
  EXPECT_EQ(matches("token colors"), Tokens{"token"});
  EXPECT_EQ(matches("Enable passwordless login"), Tokens{});
  EXPECT_EQ(matches("passwordless or password"), Tokens{"password"});
  EXPECT_EQ(matches("haasStudio.wifiSsidPwd"), Tokens{"pwd"});
}

TEST(ClassifyTest, DefaultModelExamples) {
  const ClassifierModel m = ClassifierModel::Default();
  EXPECT_EQ(Classify(m, Point("Enter your API key", Vector::kInputBox)).label,
            Label::kCredentialRelated);
  EXPECT_EQ(Classify(m, Point("Your OpenAI Api Key")).label,
            Label::kCredentialRelated);
  EXPECT_EQ(Classify(m, Point("Format document on save")).label,
            Label::kNormal);
  const Prediction p = Classify(m, Point("token"));
  EXPECT_EQ(p.label, Label::kNormal);
  EXPECT_GT(p.score, 0.0);
  EXPECT_LT(p.score, 0.5);
}

TEST(ClassifyTest, MustFlagTermsAlwaysFlagUnderDefaultModel) {
  const ClassifierModel m = ClassifierModel::Default();
  const std::vector<std::string> contexts = {
      "",          "Your ",       "settings.",   "Enter the ",
      "my_",       "Toggle ",     "format on save ", "Remote "};
  for (const LexiconTerm& t : m.lexicon.terms) {
    if (!t.must_flag) continue;
    for (const std::string& pre : contexts) {
      for (const std::string& post : {"", " for the server", ".value", "Path"}) {
        const std::string text = pre + t.term + post;
        EXPECT_GE(Classify(m, Point(text)).score, m.threshold) << text;
      }
    }
  }
}

TEST(ClassifyTest, ThresholdMonotonicity) {
  ClassifierModel m = ClassifierModel::Default();
  const std::vector<std::string> texts = {
      "Enter your API key", "Format document", "token", "auth token key",
      "github access token", "Run tests", "secretless mode"};
  for (const std::string& s : texts) {
    bool normal_before = false;
    for (double th = 0.05; th < 1.0; th += 0.05) {
      m.threshold = th;
      const bool normal = Classify(m, Point(s)).label == Label::kNormal;
      if (normal_before) EXPECT_TRUE(normal) << s << " @ " << th;
      normal_before = normal;
    }
  }
}

TEST(EvaluateTest, ConfusionArithmetic) {
  // Standard definitions, positive class = CredentialRelated.
  auto m = EvalMetrics::FromConfusion(405, 39, 16473, 39);
  EXPECT_DOUBLE_EQ(m.true_positive_rate, 405.0 / 444.0);
  EXPECT_DOUBLE_EQ(m.true_negative_rate, 16473.0 / 16512.0);
  EXPECT_DOUBLE_EQ(m.accuracy, (405.0 + 16473.0) / 16956.0);
  const double p = 405.0 / 444.0;
  EXPECT_DOUBLE_EQ(m.precision, p);
  EXPECT_DOUBLE_EQ(m.f1, 2 * p * p / (p + p));
  EXPECT_EQ(m.total(), 16956);

  auto paper = EvalMetrics::FromConfusion(413, 39, 16473, 31);
  EXPECT_NEAR(paper.true_positive_rate, 0.9302, 5e-5);
  EXPECT_NEAR(paper.true_negative_rate, 0.9976, 5e-5);

  auto one = EvalMetrics::FromConfusion(1, 0, 0, 0);
  EXPECT_EQ(one.true_positive_rate, 1.0);
  EXPECT_FALSE(one.tpr_degenerate);
  EXPECT_EQ(one.true_negative_rate, 1.0);
  EXPECT_TRUE(one.tnr_degenerate);

  auto none = EvalMetrics::FromConfusion(0, 3, 2, 4);
  EXPECT_EQ(none.f1, 0.0);
  EXPECT_FALSE(none.precision_degenerate);
}

TEST(EvaluateTest, PerfectPredictionsAndErrors) {
  std::vector<LabeledDataPoint> data;
  for (int i = 0; i < 5; ++i) {
    data.push_back({Point("password " + std::to_string(i)),
                    Label::kCredentialRelated});
    data.push_back({Point("font size " + std::to_string(i)), Label::kNormal});
  }
  auto m = Evaluate(ClassifierModel::Default(), data);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.f1, 1.0);
  EXPECT_EQ(m.total(), 10);
  EXPECT_EQ(CodeOf([] { Evaluate(ClassifierModel::Default(), {}); }),
            ErrorCode::kEmptyDataset);
}

TEST(TrainTest, Errors) {
  EXPECT_EQ(CodeOf([] { Train({}); }), ErrorCode::kEmptyDataset);
  std::vector<LabeledDataPoint> normal_only = {
      {Point("font size"), Label::kNormal}, {Point("tab size"), Label::kNormal}};
  EXPECT_EQ(CodeOf([&] { Train(normal_only); }), ErrorCode::kSingleClassData);
}

TEST(TrainTest, FixtureCorpusSplitMeetsF1) {
  const auto corpus = LoadCorpus(kData);
  ASSERT_EQ(corpus.size(), 60u);
  const auto [train, test] = StratifiedSplit(corpus, 0.25, 2026);
  EXPECT_EQ(test.size(), 16u);  // round(7.5) per class
  std::vector<double> history;
  const ClassifierModel m = Train(train, {}, &history);
  const EvalMetrics e = Evaluate(m, test);
  EXPECT_GE(e.f1, 0.90) << "tp=" << e.tp << " fp=" << e.fp << " fn=" << e.fn;

  // Objective never increases between epochs.
  ASSERT_EQ(history.size(), static_cast<size_t>(TrainConfig{}.epochs) + 1);
  for (size_t i = 1; i < history.size(); ++i) {
    EXPECT_LE(history[i], history[i - 1] + 1e-9) << i;
  }
  EXPECT_LT(history.back(), history.front());
}

TEST(TrainTest, SameSeedIsBitIdentical) {
  const auto corpus = LoadCorpus(kData);
  const ClassifierModel a = Train(corpus);
  const ClassifierModel b = Train(corpus);
  EXPECT_EQ(a.Serialize(), b.Serialize());
  EXPECT_TRUE(a == b);
  TrainConfig other;
  other.seed = 99;
  EXPECT_NE(Train(corpus, other).Serialize(), a.Serialize());
}

TEST(TrainTest, ClassWeightsAreConfigurable) {
  const auto corpus = LoadCorpus(kData);
  TrainConfig c;
  c.class_weights = {0.1, 0.01};
  const ClassifierModel m = Train(corpus, c);
  EXPECT_EQ(m.class_weights.credential, 0.1);
  EXPECT_EQ(m.class_weights.normal, 0.01);
  c.class_weights.normal = 0;
  EXPECT_EQ(CodeOf([&] { Train(corpus, c); }), ErrorCode::kUsage);
}

TEST(ClassifyTest, PermutationOfTrainingInputDoesNotMatterForFixedModel) {
  const ClassifierModel m = Train(LoadCorpus(kData));
  std::vector<DataPoint> points;
  for (const auto& d : LoadCorpus(kData)) points.push_back(d.point);
  std::vector<Label> first;
  for (const auto& p : points) first.push_back(Classify(m, p).label);
  std::vector<size_t> order(points.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(5);
  std::shuffle(order.begin(), order.end(), rng);
  for (size_t i : order) EXPECT_EQ(Classify(m, points[i]).label, first[i]);
}

TEST(ModelIoTest, RoundTripIsBitExact) {
  const ClassifierModel m = Train(LoadCorpus(kData));
  const std::string s = m.Serialize();
  const ClassifierModel back = ClassifierModel::Parse(s);
  EXPECT_TRUE(back == m);
  EXPECT_EQ(back.Serialize(), s);
  EXPECT_EQ(s.substr(0, 16), "vsxscan-model\t1\n");
  EXPECT_TRUE(ClassifierModel::Parse(ClassifierModel::Default().Serialize()) ==
              ClassifierModel::Default());
}

TEST(ModelIoTest, RejectsMalformedModels) {
  const std::string good = ClassifierModel::Default().Serialize();
  auto code = [](std::string s) {
    return CodeOf([&] { ClassifierModel::Parse(s); });
  };
  EXPECT_EQ(code(""), ErrorCode::kModelFormat);
  EXPECT_EQ(code("vsxscan-model\t2\nend\n"), ErrorCode::kModelFormat);
  EXPECT_EQ(code(good.substr(0, good.size() - 4)), ErrorCode::kModelFormat);
  EXPECT_EQ(code("vsxscan-model\t1\nbias\tnope\nend\n"),
            ErrorCode::kModelFormat);
  EXPECT_EQ(code("vsxscan-model\t1\nmystery\t1\nend\n"),
            ErrorCode::kModelFormat);
  EXPECT_EQ(code("vsxscan-model\t1\nthreshold\t0x1p+0\nend\n"),
            ErrorCode::kModelFormat);
}

TEST(CorpusIoTest, RoundTripAndErrors) {
  std::vector<LabeledDataPoint> data = {
      {Point("tab\there | x"), Label::kCredentialRelated},
      {Point("line\nbreak", Vector::kInputBox), Label::kNormal}};
  data[0].point.extension_id = "a.b";
  const auto back = ParseCorpus(SerializeCorpus(data));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].point.text, "tab\there | x");
  EXPECT_EQ(back[0].point.extension_id, "a.b");
  EXPECT_EQ(back[1].point.vector, Vector::kInputBox);
  EXPECT_EQ(back[1].label, Label::kNormal);
  EXPECT_EQ(CodeOf([] { ParseCorpus("a\tb\tc\n"); }), ErrorCode::kCorpusFormat);
  EXPECT_EQ(CodeOf([] { ParseCorpus("a\tNope\tc\tNormal\n"); }),
            ErrorCode::kCorpusFormat);
  EXPECT_EQ(CodeOf([] { ParseCorpus("a\tInputBox\tc\tMaybe\n"); }),
            ErrorCode::kCorpusFormat);
  EXPECT_TRUE(ParseCorpus("# comment\n\n").empty());
}

TEST(SplitTest, StratifiedAndDeterministic) {
  const auto corpus = LoadCorpus(kData);
  const auto a = StratifiedSplit(corpus, 0.25, 1);
  const auto b = StratifiedSplit(corpus, 0.25, 1);
  ASSERT_EQ(a.second.size(), b.second.size());
  for (size_t i = 0; i < a.second.size(); ++i) {
    EXPECT_EQ(a.second[i].point.text, b.second[i].point.text);
  }
  const auto pos = std::count_if(a.second.begin(), a.second.end(),
                                 [](const LabeledDataPoint& d) {
                                   return d.label == Label::kCredentialRelated;
                                 });
  EXPECT_EQ(pos, 8);
  EXPECT_EQ(a.first.size() + a.second.size(), corpus.size());
}

ingest::ExtensionPackage Package(std::string_view manifest) {
  ingest::ExtensionPackage p;
  p.manifest = ingest::ParseManifest(manifest);
  p.extension_id = p.manifest.publisher + "." + p.manifest.name;
  return p;
}

graph::TracedSite Site(graph::SinkApi api,
                       std::vector<graph::ResolvedString> values) {
  graph::TracedSite ts;
  ts.site.api = api;
  ts.site.file = "out/extension.js";
  ts.site.span = {10, 20};
  ts.site.position = {3, 5};
  ts.values = std::move(values);
  return ts;
}

TEST(ExtractDataPointsTest, ManifestAndSites) {
  auto pkg = Package(R"({
    "publisher": "easycode", "name": "easycode",
    "activationEvents": ["onCommand:github.copilot.generate", "onCommand:easycode.ask"],
    "contributes": {
      "commands": [{"command": "easycode.ask", "title": "Ask"}],
      "configuration": {"properties": {
        "easycode.openAI ApiKey": {"type": "string", "description": "Your OpenAI Api Key"}
      }}
    }})");
  ExtractionStats stats;
  using graph::Resolution;
  using graph::SinkApi;
  const auto points = ExtractDataPoints(
      pkg,
      {Site(SinkApi::kGetConfiguration,
            {{Resolution::kLiteral, "easycode.openAI ApiKey", {}}}),
       Site(SinkApi::kGlobalStateUpdate,
            {{Resolution::kPropagatedConst, "CHAT_CONVERSATIONS", {}}}),
       Site(SinkApi::kGlobalStateGet,
            {{Resolution::kLiteral, "CHAT_CONVERSATIONS", {}}}),
       Site(SinkApi::kExecuteCommand, {graph::ResolvedString::Unresolved()}),
       Site(SinkApi::kShowInputBox, {{Resolution::kLiteral, "", {}}}),
       Site(SinkApi::kClipboardReadText, {})},
      &stats);
  ASSERT_EQ(points.size(), 5u);
  EXPECT_EQ(points[0].vector, Vector::kRequestedCommand);
  EXPECT_EQ(points[0].text, "Ask | easycode.ask");
  EXPECT_EQ(points[1].vector, Vector::kRequestedConfiguration);
  EXPECT_EQ(points[1].text, "easycode.openAI ApiKey | Your OpenAI Api Key");
  EXPECT_TRUE(points[1].location.in_manifest());
  EXPECT_EQ(points[2].vector, Vector::kUsedCommand);
  EXPECT_EQ(points[2].text, "github.copilot.generate");
  EXPECT_EQ(points[3].vector, Vector::kUsedConfiguration);
  EXPECT_EQ(points[3].text, "easycode.openAI ApiKey");
  EXPECT_EQ(points[3].location.file, "out/extension.js");
  EXPECT_EQ(points[3].location.position.line, 3u);
  EXPECT_EQ(points[4].vector, Vector::kGlobalState);
  EXPECT_EQ(points[4].text, "CHAT_CONVERSATIONS");
  EXPECT_EQ(points[4].resolution, Resolution::kPropagatedConst);
  for (const auto& p : points) EXPECT_EQ(p.extension_id, "easycode.easycode");
  EXPECT_EQ(stats.unresolved, 1);
  EXPECT_EQ(stats.empty, 1);
  EXPECT_EQ(stats.duplicates, 1);
}

TEST(ExtractDataPointsTest, EmptyPackage) {
  auto pkg = Package(R"({"publisher": "p", "name": "n"})");
  EXPECT_TRUE(ExtractDataPoints(pkg, {}).empty());
}

TEST(NamesTest, RoundTrip) {
  for (Vector v : kAllVectors) EXPECT_EQ(VectorFromName(VectorName(v)), v);
  EXPECT_EQ(LabelFromName("CredentialRelated"), Label::kCredentialRelated);
  EXPECT_EQ(VectorFromName("globalstate"), std::nullopt);
}

}  // namespace
}  // namespace vsxscan::classify
