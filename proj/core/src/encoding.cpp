#include "mabkit/encoding.hpp"

#include <algorithm>

#include "mabkit/errors.hpp"

namespace mabkit {

namespace {

std::string arm_term_name(const Factor& factor, int level) {
  // A 2-level factor reads naturally as a single named indicator
  // ("Rationale"); wider factors disambiguate by level.
  if (factor.levels == 2) return factor.name;
  return factor.name + "=" + factor.level_label(level);
}

}  // namespace

FeatureEncoding FeatureEncoding::standard(
    const Factor& factor, const std::vector<std::string>& context_vars,
    bool interactions) {
  std::vector<EncodingTerm> terms;
  terms.push_back({EncodingTerm::Kind::Intercept, -1, "", "intercept"});
  for (int level = 1; level < factor.levels; ++level) {
    terms.push_back(
        {EncodingTerm::Kind::Arm, level, "", arm_term_name(factor, level)});
  }
  for (const auto& var : context_vars) {
    terms.push_back({EncodingTerm::Kind::Context, -1, var, var});
  }
  if (interactions) {
    for (int level = 1; level < factor.levels; ++level) {
      for (const auto& var : context_vars) {
        terms.push_back({EncodingTerm::Kind::Interaction, level, var,
                         arm_term_name(factor, level) + "*" + var});
      }
    }
  }
  return from_terms(factor, std::move(terms));
}

FeatureEncoding FeatureEncoding::from_terms(Factor factor,
                                            std::vector<EncodingTerm> terms) {
  if (terms.empty()) throw ValidationError("encoding must have d >= 1 terms");
  if (factor.levels < 1) {
    throw ValidationError("factor '" + factor.name +
                          "' must have at least one level");
  }
  for (const auto& term : terms) {
    const bool needs_level = term.kind == EncodingTerm::Kind::Arm ||
                             term.kind == EncodingTerm::Kind::Interaction;
    if (needs_level &&
        (term.arm_level < 1 || term.arm_level >= factor.levels)) {
      throw ValidationError("encoding term '" + term.name +
                            "' references arm level " +
                            std::to_string(term.arm_level) +
                            " outside factor '" + factor.name + "'");
    }
    const bool needs_var = term.kind == EncodingTerm::Kind::Context ||
                           term.kind == EncodingTerm::Kind::Interaction;
    if (needs_var && term.context_var.empty()) {
      throw ValidationError("encoding term '" + term.name +
                            "' names no context variable");
    }
  }
  FeatureEncoding enc;
  enc.factor_ = std::move(factor);
  enc.terms_ = std::move(terms);
  return enc;
}

std::optional<int> FeatureEncoding::term_index(std::string_view name) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::vector<std::string> FeatureEncoding::term_names() const {
  std::vector<std::string> names;
  names.reserve(terms_.size());
  for (const auto& t : terms_) names.push_back(t.name);
  return names;
}

double FeatureEncoding::term_value(const EncodingTerm& term, int arm,
                                   const ContextVector& context) const {
  switch (term.kind) {
    case EncodingTerm::Kind::Intercept:
      return 1.0;
    case EncodingTerm::Kind::Arm:
      return arm == term.arm_level ? 1.0 : 0.0;
    case EncodingTerm::Kind::Context:
      return context.at(term.context_var);
    case EncodingTerm::Kind::Interaction:
      return arm == term.arm_level ? context.at(term.context_var) : 0.0;
  }
  throw InternalError("unreachable encoding term kind");
}

Eigen::VectorXd FeatureEncoding::encode(int arm,
                                        const ContextVector& context) const {
  if (arm < 0 || arm >= factor_.levels) {
    throw ValidationError("arm " + std::to_string(arm) +
                          " invalid for factor '" + factor_.name + "' with " +
                          std::to_string(factor_.levels) + " levels");
  }
  Eigen::VectorXd b(dimension());
  for (int i = 0; i < dimension(); ++i) {
    b[i] = term_value(terms_[i], arm, context);
  }
  return b;
}

}  // namespace mabkit
