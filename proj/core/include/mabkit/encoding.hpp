#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mabkit/context.hpp"

namespace mabkit {

/// One experimental factor. Each factor is its own bandit problem; arms are
/// 0-based level indices.
struct Factor {
  std::string name;
  int levels = 2;
  std::vector<std::string> level_names;  // optional labels, e.g. absent/present

  std::string level_label(int level) const {
    if (level >= 0 && level < static_cast<int>(level_names.size())) {
      return level_names[level];
    }
    return std::to_string(level);
  }
};

/// The factors of a factorial experiment, e.g. Rationale:2 x Link:2 x
/// InteractionType:4.
struct ArmSet {
  std::vector<Factor> factors;

  const Factor* find(std::string_view name) const {
    for (const auto& f : factors) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
};

/// One entry of the feature vector.
struct EncodingTerm {
  enum class Kind { Intercept, Arm, Context, Interaction };

  Kind kind = Kind::Intercept;
  int arm_level = -1;       // Arm / Interaction: which level indicator
  std::string context_var;  // Context / Interaction: which variable
  std::string name;         // e.g. "intercept", "Rationale", "Rationale*Mood"
};

/// Maps an (arm, context) pair to the regression feature vector b of
/// dimension d: intercept, one-hot arm indicators with level 0 as baseline,
/// context main effects, and arm-by-context interaction products.
class FeatureEncoding {
 public:
  FeatureEncoding() = default;

  /// The default layout: intercept + arm indicators (baseline level 0
  /// dropped) + the named context main effects + every arm x context
  /// interaction (when `interactions` is set).
  static FeatureEncoding standard(const Factor& factor,
                                  const std::vector<std::string>& context_vars,
                                  bool interactions = true);

  /// Custom term list; validates every interaction references a declared
  /// arm indicator and context term.
  static FeatureEncoding from_terms(Factor factor,
                                    std::vector<EncodingTerm> terms);

  int dimension() const { return static_cast<int>(terms_.size()); }
  const std::vector<EncodingTerm>& terms() const { return terms_; }
  const Factor& factor() const { return factor_; }

  std::optional<int> term_index(std::string_view name) const;
  std::vector<std::string> term_names() const;

  /// Feature vector for playing `arm` under `context`. Throws
  /// ValidationError for an invalid arm or a missing context variable.
  Eigen::VectorXd encode(int arm, const ContextVector& context) const;

  /// Value of a single term, without materialising the full vector.
  double term_value(const EncodingTerm& term, int arm,
                    const ContextVector& context) const;

 private:
  Factor factor_;
  std::vector<EncodingTerm> terms_;
};

/// Spec name for the core operation; identical to enc.encode(arm, context).
inline Eigen::VectorXd encode_features(int arm, const ContextVector& context,
                                       const FeatureEncoding& enc) {
  return enc.encode(arm, context);
}

}  // namespace mabkit
