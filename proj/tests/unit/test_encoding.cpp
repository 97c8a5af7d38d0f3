#include <doctest.h>

#include "mabkit/encoding.hpp"
#include "mabkit/errors.hpp"

using namespace mabkit;

namespace {

const Factor kRationale{"Rationale", 2, {"absent", "present"}};

FeatureEncoding mood_encoding() {
  return FeatureEncoding::standard(kRationale, {"Mood"}, true);
}

ContextVector mood(double value) {
  ContextVector ctx;
  ctx.set("Mood", value);
  return ctx;
}

}  // namespace

TEST_CASE("standard encoding lays out intercept, arm, context, interaction") {
  const auto enc = mood_encoding();
  REQUIRE(enc.dimension() == 4);
  CHECK(enc.term_names() ==
        std::vector<std::string>{"intercept", "Rationale", "Mood",
                                 "Rationale*Mood"});
  CHECK(enc.term_index("Rationale*Mood") == 3);
  CHECK_FALSE(enc.term_index("nope").has_value());
}

TEST_CASE("encoding values for the 2x2 arm/mood grid") {
  const auto enc = mood_encoding();
  const auto check = [&](int arm, double m, std::vector<double> expect) {
    const auto b = enc.encode(arm, mood(m));
    REQUIRE(b.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(b[i] == expect[i]);
  };
  check(1, 1.0, {1, 1, 1, 1});
  check(0, 1.0, {1, 0, 1, 0});
  check(1, 0.0, {1, 1, 0, 0});
  check(0, 0.0, {1, 0, 0, 0});
}

TEST_CASE("ordinal context values pass through the encoding") {
  const auto enc = FeatureEncoding::standard(kRationale, {"K10"}, true);
  ContextVector ctx;
  ctx.set("K10", 3.0);
  const auto b = enc.encode(1, ctx);
  CHECK(b[2] == 3.0);
  CHECK(b[3] == 3.0);  // interaction = indicator * value
}

TEST_CASE("multi-level factors get one indicator per non-baseline level") {
  const Factor interaction_type{"InteractionType", 4};
  const auto enc = FeatureEncoding::standard(interaction_type, {});
  REQUIRE(enc.dimension() == 4);  // intercept + 3 indicators
  CHECK(enc.term_names() ==
        std::vector<std::string>{"intercept", "InteractionType=1",
                                 "InteractionType=2", "InteractionType=3"});
  const auto b = enc.encode(2, {});
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 0.0);
  CHECK(b[2] == 1.0);
  CHECK(b[3] == 0.0);
}

TEST_CASE("missing context variable is an encoding error") {
  const auto enc = mood_encoding();
  CHECK_THROWS_AS(enc.encode(1, ContextVector{}), ValidationError);
}

TEST_CASE("arm outside the factor is rejected") {
  const auto enc = mood_encoding();
  CHECK_THROWS_AS(enc.encode(2, mood(0.0)), ValidationError);
  CHECK_THROWS_AS(enc.encode(-1, mood(0.0)), ValidationError);
}

TEST_CASE("custom term lists are validated") {
  CHECK_THROWS_AS(FeatureEncoding::from_terms(kRationale, {}),
                  ValidationError);
  // Interaction referencing a level the factor does not have.
  std::vector<EncodingTerm> terms{
      {EncodingTerm::Kind::Intercept, -1, "", "intercept"},
      {EncodingTerm::Kind::Interaction, 5, "Mood", "bad"}};
  CHECK_THROWS_AS(FeatureEncoding::from_terms(kRationale, std::move(terms)),
                  ValidationError);
}

TEST_CASE("encode_features alias matches the member call") {
  const auto enc = mood_encoding();
  CHECK(encode_features(1, mood(1.0), enc) == enc.encode(1, mood(1.0)));
}
