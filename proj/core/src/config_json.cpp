#include "mabkit/config_json.hpp"

#include <nlohmann/json.hpp>

#include "mabkit/errors.hpp"

namespace mabkit {

namespace {

nlohmann::json factor_to_json(const Factor& factor) {
  return {{"name", factor.name},
          {"levels", factor.levels},
          {"level_names", factor.level_names}};
}

Factor factor_from_json(const nlohmann::json& doc) {
  Factor factor;
  factor.name = doc.at("name").get<std::string>();
  factor.levels = doc.value("levels", 2);
  if (doc.contains("level_names")) {
    factor.level_names = doc.at("level_names").get<std::vector<std::string>>();
  }
  return factor;
}

nlohmann::json schema_to_json(const ContextSchema& schema) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& var : schema.variables()) {
    arr.push_back({{"name", var.name},
                   {"values", var.values},
                   {"default", var.default_value}});
  }
  return arr;
}

ContextSchema schema_from_json(const nlohmann::json& doc) {
  std::vector<ContextVariable> vars;
  for (const auto& v : doc) {
    ContextVariable var;
    var.name = v.at("name").get<std::string>();
    if (v.contains("values")) {
      var.values = v.at("values").get<std::vector<double>>();
    }
    var.default_value =
        v.value("default", var.values.empty() ? 0.0 : var.values.front());
    vars.push_back(std::move(var));
  }
  return ContextSchema(std::move(vars));
}

const char* term_kind_name(EncodingTerm::Kind kind) {
  switch (kind) {
    case EncodingTerm::Kind::Intercept:
      return "intercept";
    case EncodingTerm::Kind::Arm:
      return "arm";
    case EncodingTerm::Kind::Context:
      return "context";
    case EncodingTerm::Kind::Interaction:
      return "interaction";
  }
  throw InternalError("unreachable term kind");
}

EncodingTerm::Kind term_kind_from_name(const std::string& name) {
  if (name == "intercept") return EncodingTerm::Kind::Intercept;
  if (name == "arm") return EncodingTerm::Kind::Arm;
  if (name == "context") return EncodingTerm::Kind::Context;
  if (name == "interaction") return EncodingTerm::Kind::Interaction;
  throw ParseError("unknown encoding term kind '" + name + "'");
}

nlohmann::json encoding_to_json(const FeatureEncoding& enc) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& term : enc.terms()) {
    nlohmann::json t{{"kind", term_kind_name(term.kind)},
                     {"name", term.name}};
    if (term.arm_level >= 0) t["arm_level"] = term.arm_level;
    if (!term.context_var.empty()) t["context_var"] = term.context_var;
    terms.push_back(std::move(t));
  }
  return terms;
}

FeatureEncoding encoding_from_json(const Factor& factor,
                                   const nlohmann::json& doc) {
  std::vector<EncodingTerm> terms;
  for (const auto& t : doc) {
    EncodingTerm term;
    term.kind = term_kind_from_name(t.at("kind").get<std::string>());
    term.name = t.at("name").get<std::string>();
    term.arm_level = t.value("arm_level", -1);
    term.context_var = t.value("context_var", std::string{});
    terms.push_back(std::move(term));
  }
  return FeatureEncoding::from_terms(factor, std::move(terms));
}

nlohmann::json reward_to_json(const RewardModel& model) {
  nlohmann::json coefficients = nlohmann::json::object();
  for (const auto& [name, value] : model.coefficients) {
    coefficients[name] = value;
  }
  return {{"coefficients", coefficients},
          {"noise_sd", model.noise_sd},
          {"grid", model.grid},
          {"missing_prob", model.missing_prob}};
}

RewardModel reward_from_json(const nlohmann::json& doc) {
  RewardModel model;
  if (doc.contains("coefficients")) {
    for (const auto& [name, value] : doc.at("coefficients").items()) {
      model.coefficients[name] = value.get<double>();
    }
  }
  model.noise_sd = doc.value("noise_sd", 1.0 / 6.0);
  if (doc.contains("grid")) {
    model.grid = doc.at("grid").get<std::vector<double>>();
  }
  model.missing_prob = doc.value("missing_prob", 0.0);
  return model;
}

nlohmann::json noise_to_json(const NoiseParams& noise) {
  if (noise.is_direct()) return {{"v", noise.v()}};
  return {{"R", noise.R()},
          {"epsilon", noise.epsilon()},
          {"delta", noise.delta()}};
}

NoiseParams noise_from_json(const nlohmann::json& doc) {
  if (doc.contains("v")) return NoiseParams::direct(doc.at("v").get<double>());
  return NoiseParams::formula(doc.at("R").get<double>(),
                              doc.at("epsilon").get<double>(),
                              doc.at("delta").get<double>());
}

nlohmann::json policy_to_json(const PolicySpec& policy) {
  nlohmann::json doc{{"kind", policy.label()}};
  if (policy.kind == PolicySpec::Kind::Mixture) {
    doc["mixture_p"] = policy.mixture_p;
  }
  return doc;
}

PolicySpec policy_from_json(const nlohmann::json& doc) {
  PolicySpec policy = PolicySpec::from_label(doc.at("kind").get<std::string>());
  if (policy.kind == PolicySpec::Kind::Mixture) {
    policy.mixture_p = doc.value("mixture_p", 0.5);
  }
  return policy;
}

}  // namespace

nlohmann::json trial_config_to_json(const TrialConfig& config) {
  return {{"horizon", config.horizon},
          {"factor", factor_to_json(config.factor)},
          {"context", schema_to_json(config.context)},
          {"encoding", encoding_to_json(config.encoding)},
          {"reward", reward_to_json(config.reward)},
          {"policy", policy_to_json(config.policy)},
          {"algorithm_noise", noise_to_json(config.algorithm_noise)},
          {"update_every", config.update_every}};
}

TrialConfig trial_config_from_json(const nlohmann::json& doc) {
  TrialConfig config;
  config.horizon = doc.value("horizon", 0L);
  if (doc.contains("factor")) {
    config.factor = factor_from_json(doc.at("factor"));
  }
  if (doc.contains("context")) {
    config.context = schema_from_json(doc.at("context"));
  }
  if (doc.contains("encoding")) {
    config.encoding = encoding_from_json(config.factor, doc.at("encoding"));
  } else {
    std::vector<std::string> vars;
    for (const auto& v : config.context.variables()) vars.push_back(v.name);
    config.encoding = FeatureEncoding::standard(config.factor, vars);
  }
  if (doc.contains("reward")) {
    config.reward = reward_from_json(doc.at("reward"));
  }
  if (doc.contains("policy")) {
    config.policy = policy_from_json(doc.at("policy"));
  }
  if (doc.contains("algorithm_noise")) {
    config.algorithm_noise = noise_from_json(doc.at("algorithm_noise"));
  }
  config.update_every = doc.value("update_every", 1);
  config.validate();
  return config;
}

nlohmann::json scenario_to_json(const ScenarioConfig& scenario) {
  return {{"id", scenario.id},
          {"name", scenario.name},
          {"trial", trial_config_to_json(scenario.trial)},
          {"effects", scenario.effect_names},
          {"analysis_scale", scenario.analysis_scale}};
}

}  // namespace mabkit
