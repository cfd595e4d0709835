#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "depscan/error.hpp"
#include "depscan/lexicon.hpp"
#include "support/oracles.hpp"

using namespace depscan;

namespace {

EmbeddingTable parse(const std::string& text) {
  std::istringstream in(text);
  return load_embeddings(in);
}

// Hand-built 2-d vectors: angles chosen so the cosine ranking to "happy" is
// joyful > glad > calm > sad.
const char* kToyTable =
    "happy 1.0 0.0\n"
    "joyful 0.95 0.1\n"
    "glad 0.8 0.3\n"
    "calm 0.5 0.5\n"
    "sad -1.0 0.2\n";

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::io_error;
}

}  // namespace

TEST(LoadEmbeddings, ParsesTable) {
  const auto table = parse("dog 1 2 3\ncat 4 5 6\n");
  EXPECT_EQ(table.dimension(), 3u);
  EXPECT_EQ(table.size(), 2u);
  ASSERT_TRUE(table.find("cat"));
  EXPECT_EQ(table.vector(*table.find("cat"))[2], 6.0);
}

TEST(LoadEmbeddings, DimensionMismatchReportsLine) {
  try {
    parse("dog 1 2 3\ncat 1 2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension_mismatch);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadEmbeddings, NonNumericComponent) {
  try {
    parse("dog 1 2 3\n\ncat 1 x 3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse_error);
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadEmbeddings, DuplicateKeepsFirst) {
  const auto table = parse("dog 1 2\ndog 9 9\ncat 0 1\n");
  EXPECT_EQ(table.size(), 2u);
  EXPECT_EQ(table.vector(*table.find("dog"))[0], 1.0);
}

TEST(LoadEmbeddings, EmptySource) {
  EXPECT_EQ(kind_of([] { parse("\n\n"); }), ErrorKind::parse_error);
}

TEST(ExpandCategory, TopKZeroKeepsSeedsOnly) {
  const auto table = parse(kToyTable);
  const auto c = expand_category("pos", std::vector<std::string>{"happy"}, table, 0, 0.5);
  ASSERT_EQ(c.terms().size(), 1u);
  EXPECT_EQ(c.terms()[0], (LexiconTerm{"happy", 1.0}));
}

TEST(ExpandCategory, MatchesBruteForceCosineRanking) {
  const auto table = parse(kToyTable);
  // Oracle: rank every other word by cosine to "happy".
  std::vector<std::pair<double, std::string>> ranked;
  const std::vector<double> happy{1.0, 0.0};
  const std::vector<std::pair<std::string, std::vector<double>>> rows = {
      {"joyful", {0.95, 0.1}}, {"glad", {0.8, 0.3}}, {"calm", {0.5, 0.5}}, {"sad", {-1.0, 0.2}}};
  for (const auto& [w, v] : rows) ranked.emplace_back(oracle::cosine(happy, v), w);
  std::sort(ranked.rbegin(), ranked.rend());

  const auto c = expand_category("pos", std::vector<std::string>{"happy"}, table, 2, -1.0);
  ASSERT_EQ(c.terms().size(), 3u);
  EXPECT_EQ(c.terms()[0], (LexiconTerm{"happy", 1.0}));
  EXPECT_EQ(c.terms()[1].term, ranked[0].second);
  EXPECT_NEAR(c.terms()[1].similarity, ranked[0].first, 1e-12);
  EXPECT_EQ(c.terms()[2].term, ranked[1].second);
  EXPECT_NEAR(c.terms()[2].similarity, ranked[1].first, 1e-12);
}

TEST(ExpandCategory, MinSimFiltersButSeedsSurvive) {
  const auto table = parse(kToyTable);
  const auto c = expand_category("neg", std::vector<std::string>{"sad"}, table, 10, 0.99);
  ASSERT_EQ(c.terms().size(), 1u);
  EXPECT_EQ(c.terms()[0].term, "sad");
}

TEST(ExpandCategory, AbsentSeedFallsBackToItself) {
  const auto table = parse(kToyTable);
  const auto c = expand_category("x", std::vector<std::string>{"melancholy"}, table, 10, 0.0);
  ASSERT_EQ(c.terms().size(), 1u);
  EXPECT_EQ(c.terms()[0], (LexiconTerm{"melancholy", 1.0}));
}

TEST(ExpandCategory, MultiwordSeedUsesMeanVector) {
  const auto table = parse("weight 1 0\nloss 0 1\nanemia 1 1\nstress -1 0.2\n");
  const auto c = expand_category("appetite", std::vector<std::string>{"Weight Loss"}, table, 1, 0.0);
  ASSERT_EQ(c.terms().size(), 2u);
  EXPECT_EQ(c.terms()[0].term, "weight loss");
  EXPECT_EQ(c.terms()[1].term, "anemia");
  EXPECT_NEAR(c.terms()[1].similarity, 1.0, 1e-12);
}

TEST(ExpandCategory, DeterministicWithLexicographicTieBreak) {
  const auto table = parse("seed 1 0\nbeta 0 1\nalpha 0 1\ngamma 0 1\n");
  const auto a = expand_category("c", std::vector<std::string>{"seed"}, table, 2, -1.0);
  const auto b = expand_category("c", std::vector<std::string>{"seed"}, table, 2, -1.0);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.terms().size(), 3u);
  EXPECT_EQ(a.terms()[1].term, "alpha");
  EXPECT_EQ(a.terms()[2].term, "beta");
}

TEST(ExpandCategory, EmptySeeds) {
  const auto table = parse(kToyTable);
  EXPECT_EQ(kind_of([&] { expand_category("x", {}, table, 3, 0.5); }),
            ErrorKind::empty_seeds);
}

TEST(Analyze, NormalizedOccurrenceDensity) {
  const auto c = seed_category("neg", std::vector<std::string>{"hate", "despise"});
  EXPECT_DOUBLE_EQ(analyze(tokenize("i hate this"), c), 1.0 / 3.0);
  EXPECT_EQ(analyze(TokenStream{}, c), 0.0);
  EXPECT_EQ(analyze(tokenize("all good here"), c), 0.0);
}

TEST(Analyze, InvariantUnderSelfConcatenation) {
  const auto c = seed_category("c", std::vector<std::string>{"a", "b c", "c"});
  for (const char* text : {"a b c a", "c c c", "x y", "a", "b c b c"}) {
    TokenStream s = tokenize(text);
    TokenStream twice = s;
    twice.tokens.insert(twice.tokens.end(), s.tokens.begin(), s.tokens.end());
    EXPECT_DOUBLE_EQ(analyze(twice, c), analyze(s, c)) << text;
  }
}

TEST(LexiconBundle, RejectsOverlapAndMissingSymptoms) {
  const auto pos = seed_category("positive", std::vector<std::string>{"happy", "fine"});
  const auto neg = seed_category("negative", std::vector<std::string>{"sad", "fine"});
  const auto sym = seed_category("s", std::vector<std::string>{"tired"});
  EXPECT_EQ(kind_of([&] { LexiconBundle({sym}, pos, neg); }),
            ErrorKind::overlapping_lexicons);
  EXPECT_EQ(kind_of([&] {
              LexiconBundle({}, pos, seed_category("negative", std::vector<std::string>{"sad"}));
            }),
            ErrorKind::invalid_argument);
}

TEST(BuildBundle, ResolvesExpansionOverlap) {
  // "meh" is closer to "sad" than to "happy"; "okay" is equidistant.
  const auto table = parse("happy 1 0\nsad 0 1\nmeh 0.2 1\nokay 1 1\ntired 0 1\n");
  SeedConfig config;
  config.symptoms = {{"fatigue", {"tired"}}};
  config.positive = {"happy"};
  config.negative = {"sad"};
  config.expansion = {5, 0.1};
  const LexiconBundle bundle = build_bundle(config, &table);
  EXPECT_TRUE(bundle.negative().contains("meh"));
  EXPECT_FALSE(bundle.positive().contains("meh"));
  EXPECT_FALSE(bundle.positive().contains("okay"));
  EXPECT_FALSE(bundle.negative().contains("okay"));
  EXPECT_TRUE(bundle.positive().contains("happy"));
}

TEST(BuildBundle, WithoutTableUsesSeedsOnly) {
  const LexiconBundle bundle = build_bundle(default_seed_config(), nullptr);
  EXPECT_EQ(bundle.symptom_categories().size(), 9u);
  EXPECT_EQ(bundle.expansion().top_k, 0);
  EXPECT_TRUE(bundle.negative().contains("cry"));
  EXPECT_TRUE(bundle.positive().contains("hope"));
  for (const auto& c : bundle.symptom_categories()) {
    for (const auto& t : c.terms()) EXPECT_EQ(t.similarity, 1.0);
  }
}

TEST(LexiconBundle, JsonRoundTripPreservesContentAndHash) {
  const auto table = parse(kToyTable);
  SeedConfig config = default_seed_config();
  config.expansion = {2, 0.0};
  const LexiconBundle bundle = build_bundle(config, &table);
  const LexiconBundle back = lexicon_from_json(nlohmann::json::parse(to_json(bundle).dump()));
  EXPECT_EQ(back.content_hash(), bundle.content_hash());
  EXPECT_EQ(back.positive(), bundle.positive());
  EXPECT_EQ(back.symptom_terms(), bundle.symptom_terms());
}

TEST(SeedConfig, ShippedDefaultFileMatchesBuiltIn) {
  std::ifstream in(DEPSCAN_DATA_DIR "/default_seeds.json");
  ASSERT_TRUE(in) << "missing data/default_seeds.json";
  const SeedConfig file = seed_config_from_json(nlohmann::json::parse(in));
  EXPECT_EQ(to_json(file), to_json(default_seed_config()));
}
