#include "depscan/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

#include "depscan/error.hpp"
#include "json_util.hpp"

namespace depscan {

using nlohmann::json;

NbModel::NbModel(double alpha, std::array<double, kNumClasses> log_priors,
                 std::array<std::vector<double>, kNumClasses> log_likelihoods,
                 std::string feature_config_hash)
    : alpha_(alpha),
      dimension_(log_likelihoods[0].size()),
      log_priors_(log_priors),
      log_likelihoods_(std::move(log_likelihoods)),
      hash_(std::move(feature_config_hash)) {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw Error(ErrorKind::non_positive_alpha, "alpha must be positive");
  }
  for (const auto& row : log_likelihoods_) {
    if (row.size() != dimension_) {
      throw Error(ErrorKind::dimension_mismatch,
                  "likelihood rows differ in length");
    }
  }
}

NbModel train(std::span<const FeatureVector> vectors,
              std::span<const Label> labels, double alpha,
              std::string feature_config_hash) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::non_positive_alpha, "alpha must be positive");
  }
  if (vectors.size() != labels.size()) {
    throw Error(ErrorKind::length_mismatch, "vectors and labels differ in length");
  }
  if (vectors.empty()) {
    throw Error(ErrorKind::class_missing, "no training examples");
  }
  const std::size_t dim = vectors.front().dimension;
  std::array<std::vector<const FeatureVector*>, kNumClasses> by_class;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].dimension != dim) {
      throw Error(ErrorKind::dimension_mismatch,
                  "training vector " + std::to_string(i) + " has dimension " +
                      std::to_string(vectors[i].dimension) + ", expected " +
                      std::to_string(dim));
    }
    by_class[class_index(labels[i])].push_back(&vectors[i]);
  }

  std::array<double, kNumClasses> log_priors{};
  std::array<std::vector<double>, kNumClasses> log_likelihoods;
  const double n = static_cast<double>(vectors.size());
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& docs = by_class[c];
    if (docs.empty()) {
      throw Error(ErrorKind::class_missing,
                  "no training examples labeled " +
                      std::string(to_string(kClassOrder[c])));
    }
    // Fixed accumulation order makes the sums independent of input order.
    std::sort(docs.begin(), docs.end(),
              [](const FeatureVector* a, const FeatureVector* b) {
                return a->components < b->components;
              });
    std::vector<double> mass(dim, 0.0);
    for (const FeatureVector* doc : docs) {
      for (const auto& [idx, value] : doc->components) {
        if (idx >= dim || !(value >= 0.0)) {
          throw Error(ErrorKind::invalid_argument,
                      "feature values must be non-negative and in range");
        }
        mass[idx] += value;
      }
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    const double denominator =
        std::log(alpha * static_cast<double>(dim) + total);
    auto& row = log_likelihoods[c];
    row.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      row[j] = std::log(alpha + mass[j]) - denominator;
    }
    log_priors[c] = std::log(static_cast<double>(docs.size()) / n);
  }
  return NbModel(alpha, log_priors, std::move(log_likelihoods),
                 std::move(feature_config_hash));
}

Posterior log_posterior(const NbModel& model, const FeatureVector& vector) {
  if (vector.dimension != model.feature_dimension()) {
    throw Error(ErrorKind::dimension_mismatch,
                "vector dimension " + std::to_string(vector.dimension) +
                    " does not match model dimension " +
                    std::to_string(model.feature_dimension()));
  }
  Posterior out;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& row = model.log_likelihoods(c);
    double score = model.log_priors()[c];
    for (const auto& [idx, value] : vector.components) {
      score += value * row[idx];
    }
    out.log_scores[c] = score;
  }
  const double max_score =
      *std::max_element(out.log_scores.begin(), out.log_scores.end());
  double z = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out.probabilities[c] = std::exp(out.log_scores[c] - max_score);
    z += out.probabilities[c];
  }
  for (auto& p : out.probabilities) p /= z;
  return out;
}

Prediction predict(const NbModel& model, const FeatureVector& vector) {
  const Posterior posterior = log_posterior(model, vector);
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (posterior.log_scores[c] > posterior.log_scores[best]) best = c;
  }
  return {kClassOrder[best], posterior.probabilities};
}

void check_compatible(const NbModel& model, const FeatureSpace& space) {
  if (model.feature_config_hash() != space.config_hash()) {
    throw Error(ErrorKind::feature_hash_mismatch,
                "model was trained on feature space " +
                    model.feature_config_hash() + ", got " + space.config_hash());
  }
  if (model.feature_dimension() != space.dimension()) {
    throw Error(ErrorKind::dimension_mismatch,
                "model and feature space dimensions differ");
  }
}

json to_json(const NbModel& model) {
  json classes = json::array();
  for (const Label label : NbModel::classes()) classes.push_back(to_string(label));
  json likelihoods = json::array();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    likelihoods.push_back(model.log_likelihoods(c));
  }
  return json{{"version", detail::kSchemaVersion},
              {"kind", "nb_model"},
              {"classes", std::move(classes)},
              {"alpha", model.alpha()},
              {"feature_dimension", model.feature_dimension()},
              {"feature_config_hash", model.feature_config_hash()},
              {"log_priors", model.log_priors()},
              {"log_likelihoods", std::move(likelihoods)}};
}

NbModel model_from_json(const json& doc) {
  detail::check_header(doc, "nb_model");
  const auto classes = detail::require_as<std::vector<std::string>>(doc, "classes");
  if (classes.size() != kNumClasses) {
    throw Error(ErrorKind::corrupt_payload, "expected two classes");
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (classes[c] != to_string(kClassOrder[c])) {
      throw Error(ErrorKind::corrupt_payload, "unexpected class order");
    }
  }
  const auto priors =
      detail::require_as<std::array<double, kNumClasses>>(doc, "log_priors");
  const auto rows =
      detail::require_as<std::vector<std::vector<double>>>(doc, "log_likelihoods");
  const auto dim = detail::require_as<std::size_t>(doc, "feature_dimension");
  if (rows.size() != kNumClasses) {
    throw Error(ErrorKind::corrupt_payload, "expected one likelihood row per class");
  }
  std::array<std::vector<double>, kNumClasses> likelihoods;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (rows[c].size() != dim) {
      throw Error(ErrorKind::corrupt_payload,
                  "likelihood row length does not match feature_dimension");
    }
    likelihoods[c] = rows[c];
  }
  try {
    return NbModel(detail::require_as<double>(doc, "alpha"), priors,
                   std::move(likelihoods),
                   detail::require_as<std::string>(doc, "feature_config_hash"));
  } catch (const Error& e) {
    throw Error(ErrorKind::corrupt_payload, e.what());
  }
}

void save(const NbModel& model, std::ostream& out) {
  out << to_json(model).dump() << '\n';
}

NbModel load_model(std::istream& in) {
  const std::string payload{std::istreambuf_iterator<char>(in),
                            std::istreambuf_iterator<char>()};
  json doc;
  try {
    doc = json::parse(payload);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::corrupt_payload,
                std::string("model payload is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

}  // namespace depscan
