#pragma once

// Multinomial Naive Bayes over non-negative real-valued feature vectors.

#include <array>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "depscan/features.hpp"
#include "depscan/types.hpp"
#include "json.hpp"

namespace depscan {

inline constexpr std::size_t kNumClasses = kClassOrder.size();

class NbModel {
 public:
  NbModel(double alpha, std::array<double, kNumClasses> log_priors,
          std::array<std::vector<double>, kNumClasses> log_likelihoods,
          std::string feature_config_hash);

  static constexpr const std::array<Label, kNumClasses>& classes() {
    return kClassOrder;
  }
  double alpha() const noexcept { return alpha_; }
  std::size_t feature_dimension() const noexcept { return dimension_; }
  const std::array<double, kNumClasses>& log_priors() const noexcept {
    return log_priors_;
  }
  const std::vector<double>& log_likelihoods(std::size_t class_idx) const {
    return log_likelihoods_.at(class_idx);
  }
  const std::string& feature_config_hash() const noexcept { return hash_; }

  bool operator==(const NbModel&) const = default;

 private:
  double alpha_;
  std::size_t dimension_;
  std::array<double, kNumClasses> log_priors_;
  std::array<std::vector<double>, kNumClasses> log_likelihoods_;
  std::string hash_;
};

// log_prior(c) = ln(n_c / n)
// log_likelihood(c, j) = ln((alpha + mass_cj) / (alpha * D + mass_c))
// Throws length-mismatch, class-missing, dimension-mismatch,
// non-positive-alpha.
NbModel train(std::span<const FeatureVector> vectors,
              std::span<const Label> labels, double alpha = 1.0,
              std::string feature_config_hash = {});

struct Posterior {
  std::array<double, kNumClasses> log_scores{};
  std::array<double, kNumClasses> probabilities{};
};

// Throws dimension-mismatch.
Posterior log_posterior(const NbModel& model, const FeatureVector& vector);

struct Prediction {
  Label label = Label::depressive;
  std::array<double, kNumClasses> posterior{};
};

// Argmax of the posterior; ties go to the first class in model order.
Prediction predict(const NbModel& model, const FeatureVector& vector);

// Throws feature-hash-mismatch when `space` is not the one `model` was
// trained on.
void check_compatible(const NbModel& model, const FeatureSpace& space);

nlohmann::json to_json(const NbModel& model);
NbModel model_from_json(const nlohmann::json& doc);

void save(const NbModel& model, std::ostream& out);
// Throws version-unsupported or corrupt-payload.
NbModel load_model(std::istream& in);

}  // namespace depscan
