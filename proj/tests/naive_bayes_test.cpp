#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <functional>
#include <sstream>

#include "depscan/error.hpp"
#include "depscan/naive_bayes.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace depscan;

namespace {

FeatureVector make_vector(std::vector<double> values) {
  FeatureVector v;
  v.dimension = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) v.components.emplace_back(i, values[i]);
  }
  return v;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::invalid_argument;
}

NbModel toy_model() {
  const std::vector<FeatureVector> x{make_vector({2, 0}), make_vector({0, 1})};
  const std::vector<Label> y{Label::depressive, Label::non_depressive};
  return train(x, y, 1.0, "hash");
}

}  // namespace

TEST(NaiveBayes, WorkedExample) {
  const auto model = toy_model();
  EXPECT_DOUBLE_EQ(std::exp(model.log_priors()[0]), 0.5);
  EXPECT_DOUBLE_EQ(std::exp(model.log_likelihoods(0)[0]), 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(std::exp(model.log_likelihoods(0)[1]), 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(std::exp(model.log_likelihoods(1)[0]), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(std::exp(model.log_likelihoods(1)[1]), 2.0 / 3.0);
  const auto p = predict(model, make_vector({1, 0}));
  EXPECT_EQ(p.label, Label::depressive);
  // (3/4) / (3/4 + 1/3)
  EXPECT_NEAR(p.posterior[0], 9.0 / 13.0, 1e-12);
}

TEST(NaiveBayes, PriorsFollowClassCounts) {
  const std::vector<FeatureVector> x{make_vector({1}), make_vector({1}), make_vector({1}),
                                     make_vector({1})};
  const std::vector<Label> y{Label::depressive, Label::non_depressive, Label::non_depressive,
                             Label::non_depressive};
  const auto model = train(x, y);
  EXPECT_NEAR(model.log_priors()[0], std::log(0.25), 1e-15);
  EXPECT_NEAR(model.log_priors()[1], std::log(0.75), 1e-15);
}

TEST(NaiveBayes, ZeroVectorReturnsPriors) {
  const std::vector<FeatureVector> x{make_vector({1, 0}), make_vector({0, 1}), make_vector({0, 3})};
  const std::vector<Label> y{Label::depressive, Label::non_depressive, Label::non_depressive};
  const auto model = train(x, y);
  const auto post = log_posterior(model, make_vector({0, 0}));
  EXPECT_NEAR(post.probabilities[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(post.probabilities[1], 2.0 / 3.0, 1e-15);
}

TEST(NaiveBayes, TieGoesToFirstClass) {
  const std::vector<FeatureVector> x{make_vector({1, 1}), make_vector({1, 1})};
  const std::vector<Label> y{Label::non_depressive, Label::depressive};
  const auto p = predict(train(x, y), make_vector({1, 1}));
  EXPECT_EQ(p.posterior[0], p.posterior[1]);
  EXPECT_EQ(p.label, Label::depressive);
}

TEST(NaiveBayes, MatchesOracleOnRandomInputs) {
  synth::Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + rng.below(30);
    std::vector<FeatureVector> x;
    std::vector<Label> y;
    const std::size_t n = 2 + rng.below(20);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      for (auto& c : v) c = rng.chance(0.4) ? rng.uniform() * 3 : 0.0;
      x.push_back(make_vector(v));
      y.push_back(i == 0 ? Label::depressive : i == 1 ? Label::non_depressive
                  : rng.chance(0.5) ? Label::depressive : Label::non_depressive);
    }
    const auto model = train(x, y, 0.5 + rng.uniform());
    std::vector<double> priors(model.log_priors().begin(), model.log_priors().end());
    std::vector<std::vector<double>> lik{model.log_likelihoods(0), model.log_likelihoods(1)};
    std::vector<double> probe(dim);
    for (auto& c : probe) c = rng.chance(0.5) ? rng.uniform() : 0.0;
    std::vector<double> scores;
    const auto expected = oracle::nb_posteriors(priors, lik, probe, &scores);
    const auto got = log_posterior(model, make_vector(probe));
    for (std::size_t c = 0; c < 2; ++c) {
      EXPECT_NEAR(got.probabilities[c], expected[c], 1e-12);
      EXPECT_NEAR(got.log_scores[c], scores[c], 1e-9);
    }
  }
}

TEST(NaiveBayes, TrainingOrderDoesNotMatter) {
  synth::Rng rng(12);
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> v(8);
    for (auto& c : v) c = rng.uniform() * 0.1;
    x.push_back(make_vector(v));
    y.push_back(i % 2 ? Label::depressive : Label::non_depressive);
  }
  const auto a = train(x, y);
  std::reverse(x.begin(), x.end());
  std::reverse(y.begin(), y.end());
  EXPECT_EQ(train(x, y), a);
}

TEST(NaiveBayes, ScalingPreservesPrediction) {
  synth::Rng rng(4);
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v(6);
    for (std::size_t j = 0; j < 6; ++j) v[j] = rng.uniform() + ((i % 2) == (j < 3) ? 1.0 : 0.0);
    x.push_back(make_vector(v));
    y.push_back(i % 2 ? Label::depressive : Label::non_depressive);
  }
  const auto model = train(x, y);
  for (const auto& v : x) {
    auto scaled = v;
    for (auto& [i, c] : scaled.components) c *= 10.0;
    const auto base = log_posterior(model, v);
    const auto big = log_posterior(model, scaled);
    const double margin = base.log_scores[0] - base.log_scores[1];
    const double prior_margin = model.log_priors()[0] - model.log_priors()[1];
    const double big_margin = big.log_scores[0] - big.log_scores[1];
    EXPECT_NEAR(big_margin - prior_margin, 10.0 * (margin - prior_margin), 1e-9);
  }
}

TEST(NaiveBayes, SeparableData) {
  const std::vector<FeatureVector> x{make_vector({5, 0}), make_vector({4, 1}), make_vector({0, 5}),
                                     make_vector({1, 4})};
  const std::vector<Label> y{Label::depressive, Label::depressive, Label::non_depressive,
                             Label::non_depressive};
  const auto model = train(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(predict(model, x[i]).label, y[i]);
}

TEST(NaiveBayes, TrainingErrors) {
  const std::vector<FeatureVector> x{make_vector({1, 0}), make_vector({0, 1})};
  const std::vector<Label> y{Label::depressive, Label::non_depressive};
  const std::vector<Label> one_class{Label::depressive, Label::depressive};
  EXPECT_EQ(kind_of([&] { train(x, y, 0.0); }), ErrorKind::non_positive_alpha);
  EXPECT_EQ(kind_of([&] { train(x, std::span(y).first(1)); }), ErrorKind::length_mismatch);
  EXPECT_EQ(kind_of([&] { train(x, one_class); }), ErrorKind::class_missing);
  const std::vector<FeatureVector> ragged{make_vector({1, 0}), make_vector({0, 1, 1})};
  EXPECT_EQ(kind_of([&] { train(ragged, y); }), ErrorKind::dimension_mismatch);
  EXPECT_EQ(kind_of([&] { log_posterior(toy_model(), make_vector({1, 2, 3})); }),
            ErrorKind::dimension_mismatch);
}

TEST(NaiveBayes, SaveLoadRoundTrip) {
  const auto model = toy_model();
  std::stringstream buf;
  save(model, buf);
  const auto back = load_model(buf);
  EXPECT_EQ(back, model);
  const auto probe = make_vector({0.3, 0.7});
  EXPECT_EQ(log_posterior(back, probe).probabilities, log_posterior(model, probe).probabilities);
}

TEST(NaiveBayes, CorruptAndUnsupportedPayloads) {
  std::stringstream buf;
  save(toy_model(), buf);
  const std::string text = buf.str();
  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_EQ(kind_of([&] { load_model(truncated); }), ErrorKind::corrupt_payload);

  auto doc = nlohmann::json::parse(text);
  doc["version"] = 99;
  std::istringstream future(doc.dump());
  EXPECT_EQ(kind_of([&] { load_model(future); }), ErrorKind::version_unsupported);

  auto missing = nlohmann::json::parse(text);
  missing.erase("log_priors");
  std::istringstream no_priors(missing.dump());
  EXPECT_EQ(kind_of([&] { load_model(no_priors); }), ErrorKind::corrupt_payload);
}

TEST(NaiveBayes, FeatureHashMismatch) {
  const std::vector<TokenStream> corpus{tokenize("a b c"), tokenize("c d e")};
  const LexiconBundle bundle({seed_category("s", std::vector<std::string>{"a"})},
                             seed_category("p", std::vector<std::string>{"b"}),
                             seed_category("n", std::vector<std::string>{"c"}));
  const auto space = FeatureSpace::fit({}, bundle, corpus);
  std::vector<FeatureVector> x;
  for (const auto& d : corpus) x.push_back(space.vectorize(d));
  const std::vector<Label> y{Label::depressive, Label::non_depressive};
  const auto good = train(x, y, 1.0, space.config_hash());
  EXPECT_NO_THROW(check_compatible(good, space));
  const auto bad = train(x, y, 1.0, "other");
  EXPECT_EQ(kind_of([&] { check_compatible(bad, space); }), ErrorKind::feature_hash_mismatch);
}
