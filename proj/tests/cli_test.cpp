#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using depscan::cli::run;

namespace {

const std::string kSamples = DEPSCAN_DATA_DIR "/samples";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("depscan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(call({}), 1);
  EXPECT_EQ(call({"bogus"}), 1);
  EXPECT_EQ(call({"train"}), 1);
  EXPECT_NE(err_.str().find("--corpus"), std::string::npos);
  EXPECT_EQ(call({"train", "--corpus", kSamples + "/corpus.jsonl", "--ngram", "3:2"}), 1);
  EXPECT_EQ(call({"train", "--corpus", kSamples + "/corpus.jsonl", "--features", "lstm"}), 1);
  EXPECT_EQ(call({"score", "--comments", kSamples + "/corpus.jsonl", "--threshold", "mean"}), 1);
  EXPECT_EQ(call({"patterns", "--history", kSamples + "/history.jsonl", "--window-days", "10",
                  "--overlap-days", "10"}),
            1);
  EXPECT_EQ(call({"--help"}), 0);
}

TEST_F(CliTest, DataErrorsExitTwoWithLocation) {
  EXPECT_EQ(call({"stats", "--corpus", path("missing.jsonl")}), 2);
  std::ofstream(path("bad.jsonl")) << "{\"id\":\"a\",\"kind\":\"transcript\",\"text\":\"x\"}\n"
                                   << "{\"id\":\"a\",\"kind\":\"transcript\",\"text\":\"y\"}\n";
  EXPECT_EQ(call({"stats", "--corpus", path("bad.jsonl")}), 2);
  EXPECT_NE(err_.str().find("bad.jsonl"), std::string::npos);
  EXPECT_NE(err_.str().find("duplicate-id"), std::string::npos);
  EXPECT_NE(err_.str().find("line 2"), std::string::npos);
}

TEST_F(CliTest, TrainClassifyEvaluateAreDeterministic) {
  const std::string corpus = kSamples + "/corpus.jsonl";
  for (const std::string run_id : {"a", "b"}) {
    ASSERT_EQ(call({"train", "--corpus", corpus, "--test-fraction", "0.25", "--seed", "3", "-o",
                    path("model_" + run_id + ".json")}),
              0)
        << err_.str();
    ASSERT_EQ(call({"evaluate", "--model", path("model_" + run_id + ".json"), "--videos", corpus,
                    "--threshold", "calibrated:" + corpus, "-o", path("eval_" + run_id + ".json")}),
              0)
        << err_.str();
  }
  EXPECT_EQ(slurp(path("model_a.json")), slurp(path("model_b.json")));
  // Both runs read a model at a different path, so compare everything except
  // the echoed input record.
  auto a = nlohmann::json::parse(slurp(path("eval_a.json")));
  auto b = nlohmann::json::parse(slurp(path("eval_b.json")));
  a["run"].erase("inputs");
  b["run"].erase("inputs");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_TRUE(fs::exists(path("model_a.json.meta.json")));
  for (const auto& entry : fs::directory_iterator(dir_)) {
    EXPECT_EQ(entry.path().string().find(".tmp."), std::string::npos) << entry.path();
  }
}

TEST_F(CliTest, JobsDoNotChangeResults) {
  const std::string corpus = kSamples + "/corpus.jsonl";
  ASSERT_EQ(call({"train", "--corpus", corpus, "--jobs", "1", "-o", path("m1.json")}), 0);
  ASSERT_EQ(call({"train", "--corpus", corpus, "--jobs", "4", "-o", path("m4.json")}), 0);
  EXPECT_EQ(slurp(path("m1.json")), slurp(path("m4.json")));
  ASSERT_EQ(call({"score", "--comments", corpus, "--jobs", "1"}), 0);
  const std::string one = out_.str();
  ASSERT_EQ(call({"score", "--comments", corpus, "--jobs", "3"}), 0);
  EXPECT_EQ(out_.str(), one);
}

TEST_F(CliTest, ModelBundleContents) {
  const std::string corpus = kSamples + "/corpus.jsonl";
  ASSERT_EQ(call({"train", "--corpus", corpus, "--features", "empath", "--alpha", "0.5",
                  "--test-fraction", "0", "-o", path("m.json")}),
            0);
  const auto doc = nlohmann::json::parse(slurp(path("m.json")));
  EXPECT_EQ(doc["kind"], "model_bundle");
  EXPECT_EQ(doc["run"]["config"]["features"], "empath");
  EXPECT_EQ(doc["run"]["config"]["alpha"], 0.5);
  EXPECT_EQ(doc["run"]["inputs"]["corpus"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(doc["training"]["train_ids"].size(), 8u);
  EXPECT_TRUE(doc["training"]["holdout"].is_null());
  EXPECT_EQ(doc["model"]["feature_config_hash"].get<std::string>().size(), 64u);

  auto tampered = doc;
  tampered["model"]["feature_config_hash"] = "0000";
  std::ofstream(path("t.json")) << tampered.dump();
  EXPECT_EQ(call({"classify", "--model", path("t.json"), "--corpus", corpus}), 2);
  EXPECT_NE(err_.str().find("feature-hash-mismatch"), std::string::npos);
}

TEST_F(CliTest, LexiconExpandFeedsScoring) {
  ASSERT_EQ(call({"lexicon", "expand", "--embeddings", kSamples + "/embeddings.txt", "--top-k",
                  "2", "--min-sim", "0.9", "-o", path("lex.json")}),
            0)
      << err_.str();
  const auto lex = nlohmann::json::parse(slurp(path("lex.json")));
  EXPECT_EQ(lex["kind"], "lexicon");
  EXPECT_EQ(lex["expansion"]["top_k"], 2);
  ASSERT_EQ(call({"score", "--comments", kSamples + "/corpus.jsonl", "--lexicon", path("lex.json"),
                  "--threshold", "fixed:0.01"}),
            0);
  const auto scores = nlohmann::json::parse(out_.str());
  EXPECT_EQ(scores["lexicon_hash"], lex["content_hash"]);
  EXPECT_EQ(scores["threshold"]["provenance"], "fixed");
  EXPECT_FALSE(scores["reports"].empty());
}

TEST_F(CliTest, PatternsClassifiesUnlabeledEvents) {
  const std::string corpus = kSamples + "/corpus.jsonl";
  ASSERT_EQ(call({"patterns", "--history", kSamples + "/history.jsonl"}), 1);
  ASSERT_EQ(call({"train", "--corpus", corpus, "--test-fraction", "0", "-o", path("m.json")}), 0);
  ASSERT_EQ(call({"patterns", "--history", kSamples + "/history.jsonl", "--model", path("m.json"),
                  "--videos", corpus, "--rumination-min-run", "3"}),
            0)
      << err_.str();
  const auto report = nlohmann::json::parse(out_.str());
  EXPECT_EQ(report["n_events"], 10);
  EXPECT_EQ(report["detections"].size(), 3u);
  EXPECT_EQ(report["run"]["config"]["window_days"], 24);
}

TEST_F(CliTest, StatsAppliesKeywordRules) {
  std::ofstream(path("c.jsonl"))
      << "{\"id\":\"a\",\"kind\":\"transcript\",\"text\":\"one two\",\"tags\":[\"suicidal\"]}\n"
      << "{\"id\":\"b\",\"kind\":\"transcript\",\"text\":\"three\",\"tags\":[\"comedy\"]}\n";
  ASSERT_EQ(call({"stats", "--corpus", path("c.jsonl"), "--default-rules", "--labeled-out",
                  path("labeled.jsonl")}),
            0);
  const auto doc = nlohmann::json::parse(out_.str());
  EXPECT_EQ(doc["keyword_labeled"], 2);
  EXPECT_EQ(doc["stats"]["depressive"]["transcripts"]["tokens"], 2);
  EXPECT_NE(slurp(path("labeled.jsonl")).find("\"label\":\"depressive\""), std::string::npos);
  ASSERT_EQ(call({"stats", "--corpus", path("c.jsonl"), "--rules",
                  DEPSCAN_DATA_DIR "/default_keyword_rules.json"}),
            0);
  EXPECT_EQ(nlohmann::json::parse(out_.str())["keyword_labeled"], 2);
}
