#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mabkit/errors.hpp"
#include "mabkit/rng.hpp"

namespace mabkit {

/// One contextual covariate: its name, the values it can take, and the
/// default used when an observation does not supply it.
struct ContextVariable {
  std::string name;
  std::vector<double> values{0.0, 1.0};  // binary unless declared otherwise
  double default_value = 0.0;
};

/// Ordered set of context variables for one experiment.
class ContextSchema {
 public:
  ContextSchema() = default;
  explicit ContextSchema(std::vector<ContextVariable> vars)
      : vars_(std::move(vars)) {}

  static ContextSchema binary(std::initializer_list<std::string> names) {
    std::vector<ContextVariable> vars;
    for (const auto& n : names) vars.push_back({n, {0.0, 1.0}, 0.0});
    return ContextSchema(std::move(vars));
  }

  const std::vector<ContextVariable>& variables() const { return vars_; }
  bool empty() const { return vars_.empty(); }
  std::size_t size() const { return vars_.size(); }

  const ContextVariable* find(std::string_view name) const {
    for (const auto& v : vars_) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }

  bool has(std::string_view name) const { return find(name) != nullptr; }

 private:
  std::vector<ContextVariable> vars_;
};

/// One observation's covariate values, in stable (schema) order.
class ContextVector {
 public:
  ContextVector() = default;

  void set(std::string name, double value) {
    for (auto& [n, v] : entries_) {
      if (n == name) {
        v = value;
        return;
      }
    }
    entries_.emplace_back(std::move(name), value);
  }

  std::optional<double> find(std::string_view name) const {
    for (const auto& [n, v] : entries_) {
      if (n == name) return v;
    }
    return std::nullopt;
  }

  /// Value of a required variable; throws if the observation lacks it.
  double at(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw ValidationError("context variable '" + std::string(name) +
                          "' missing from observation");
  }

  const std::vector<std::pair<std::string, double>>& entries() const {
    return entries_;
  }
  bool empty() const { return entries_.empty(); }

  bool operator==(const ContextVector& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

/// Draw every schema variable independently, uniformly over its declared
/// values.
inline ContextVector generate_context(const ContextSchema& schema, Rng& rng) {
  ContextVector ctx;
  for (const auto& var : schema.variables()) {
    if (var.values.empty()) {
      throw ValidationError("context variable '" + var.name +
                            "' declares no values");
    }
    ctx.set(var.name, var.values[rng.uniform_int(var.values.size())]);
  }
  return ctx;
}

/// Fill variables absent from `ctx` with schema defaults (service overlay
/// semantics: explicit values win).
inline ContextVector with_defaults(const ContextSchema& schema,
                                   const ContextVector& ctx) {
  ContextVector out;
  for (const auto& var : schema.variables()) {
    auto v = ctx.find(var.name);
    out.set(var.name, v ? *v : var.default_value);
  }
  return out;
}

}  // namespace mabkit
