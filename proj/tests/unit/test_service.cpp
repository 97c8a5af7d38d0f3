#include "fixtures.hpp"
#include "mabkit/analysis.hpp"
#include "mabkit/errors.hpp"
#include "mabkit/service/http.hpp"
#include "mabkit/service/service.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>
#include <fstream>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>

using namespace mabkit;
using service::AssignmentReceipt;
using service::ExperimentConfig;
using service::ExperimentService;

namespace {

ExperimentConfig rationale_mood_config(double mixture_p = 0.5,
                                       double v = 1.0) {
  ExperimentConfig config;
  config.name = "rationale-test";
  config.arms.factors = {Factor{"Rationale", 2, {"absent", "present"}}};
  config.context = ContextSchema::binary({"Mood"});
  config.mixture_p = mixture_p;
  config.noise = NoiseParams::direct(v);
  return config;
}

ContextVector mood(double value) {
  ContextVector ctx;
  ctx.set("Mood", value);
  return ctx;
}

}  // namespace

TEST_CASE("experiment creation initialises an identity posterior") {
  fixtures::TempDir dir("svc_create");
  ExperimentService svc(dir.path(), 1);
  const auto id = svc.create_experiment(rationale_mood_config());
  const auto summary = svc.experiment_summary(id);
  CHECK(summary.at("assignments") == 0);
  CHECK(summary.at("rated") == 0);
  const auto& point = summary.at("decision_points").at(0);
  CHECK(point.at("name") == "Rationale");
  CHECK(point.at("n_obs") == 0);
  const auto mu = point.at("mu_hat").get<std::vector<double>>();
  REQUIRE(mu.size() == 4);  // intercept, arm, mood, interaction
  for (double m : mu) CHECK(m == 0.0);

  const auto other = svc.create_experiment(rationale_mood_config());
  CHECK(other != id);  // duplicate configs get distinct experiments

  CHECK_THROWS_AS(svc.experiment_summary("exp-nope"), NotFoundError);
}

TEST_CASE("configs referencing undeclared context are rejected") {
  fixtures::TempDir dir("svc_badcfg");
  ExperimentService svc(dir.path(), 1);
  auto config = rationale_mood_config();
  config.context_terms = std::vector<std::string>{"Mood", "Energy"};
  CHECK_THROWS_AS(svc.create_experiment(config), ValidationError);

  auto empty = rationale_mood_config();
  empty.arms.factors.clear();
  CHECK_THROWS_AS(svc.create_experiment(empty), ValidationError);
}

TEST_CASE("single-arm experiments always assign that arm") {
  fixtures::TempDir dir("svc_single");
  ExperimentService svc(dir.path(), 2);
  ExperimentConfig config;
  config.arms.factors = {Factor{"Solo", 1}};
  const auto id = svc.create_experiment(config);
  for (int i = 0; i < 20; ++i) {
    CHECK(svc.get_assignment(id, "user-a").arm == 0);
  }
}

TEST_CASE("mixture zero always tags uniform") {
  fixtures::TempDir dir("svc_mix0");
  ExperimentService svc(dir.path(), 3);
  const auto id = svc.create_experiment(rationale_mood_config(0.0));
  for (int i = 0; i < 50; ++i) {
    CHECK(svc.get_assignment(id, "user-a", mood(1.0)).policy ==
          PolicyTag::UniformRandom);
  }
}

TEST_CASE("a trained posterior drives assignments to the better arm") {
  fixtures::TempDir dir("svc_trained");
  ExperimentService svc(dir.path(), 4);
  const auto id = svc.create_experiment(rationale_mood_config(1.0, 0.1));
  // Teach it: arm 1 earns the top grid value, arm 0 the bottom.
  int rewarded = 0;
  for (int i = 0; rewarded < 80; ++i) {
    const auto receipt =
        svc.get_assignment(id, "trainer", mood(0.0));
    svc.record_reward(id, receipt.assignment_id,
                      receipt.arm == 1 ? 1.0 : 0.0);
    ++rewarded;
  }
  svc.refresh_posteriors(id);
  int arm1 = 0;
  const int probes = 200;
  for (int i = 0; i < probes; ++i) {
    arm1 += svc.get_assignment(id, "probe", mood(0.0)).arm;
  }
  CHECK(static_cast<double>(arm1) / probes > 0.95);
}

TEST_CASE("rewards validate, scale and conflict-check") {
  fixtures::TempDir dir("svc_rewards");
  ExperimentService svc(dir.path(), 5);
  const auto id = svc.create_experiment(rationale_mood_config());
  const auto receipt = svc.get_assignment(id, "user-a", mood(1.0));

  CHECK_THROWS_AS(svc.record_reward(id, "asn-404", 0.5), NotFoundError);
  CHECK_THROWS_AS(svc.record_reward(id, receipt.assignment_id, 0.3),
                  ValidationError);
  CHECK_THROWS_AS(svc.record_rating(id, receipt.assignment_id, 6),
                  ValidationError);

  svc.record_rating(id, receipt.assignment_id, 5);  // stored as 1.0
  CHECK_THROWS_AS(svc.record_reward(id, receipt.assignment_id, 0.5),
                  ConflictError);

  const auto log = svc.export_log(id);
  REQUIRE(log.size() == 1);
  CHECK(log[0].reward == 1.0);
}

TEST_CASE("context overlays fill missing variables; requests win") {
  fixtures::TempDir dir("svc_overlay");
  ExperimentService svc(dir.path(), 6);
  const auto id = svc.create_experiment(rationale_mood_config());

  svc.update_context(id, "user-a", {{"Mood", 1.0}});
  const auto from_overlay = svc.get_assignment(id, "user-a");
  CHECK(from_overlay.context.at("Mood") == 1.0);

  const auto explicit_wins = svc.get_assignment(id, "user-a", mood(0.0));
  CHECK(explicit_wins.context.at("Mood") == 0.0);

  const auto defaulted = svc.get_assignment(id, "user-b");
  CHECK(defaulted.context.at("Mood") == 0.0);  // schema default

  CHECK_THROWS_AS(svc.update_context(id, "user-a", {{"Energy", 1.0}}),
                  ValidationError);
  CHECK_THROWS_AS(svc.get_assignment(id, "user-a", [] {
                    ContextVector ctx;
                    ctx.set("Energy", 1.0);
                    return ctx;
                  }()),
                  ValidationError);
}

TEST_CASE("user ids that look like direct identifiers are refused") {
  fixtures::TempDir dir("svc_pii");
  ExperimentService svc(dir.path(), 7);
  const auto id = svc.create_experiment(rationale_mood_config());
  CHECK_THROWS_AS(svc.get_assignment(id, "bob@example.com"), ValidationError);
  CHECK_THROWS_AS(svc.get_assignment(id, "15551234567"), ValidationError);
  CHECK_THROWS_AS(svc.get_assignment(id, "+1 (555) 123-4567"),
                  ValidationError);
  CHECK_THROWS_AS(svc.get_assignment(id, ""), ValidationError);
  CHECK_NOTHROW(svc.get_assignment(id, "a1b2c3"));
  // Hex and UUID shapes are opaque even when digit-heavy.
  CHECK_NOTHROW(
      svc.get_assignment(id, "550e8400-e29b-41d4-a716-446655440000"));
}

TEST_CASE("refresh drains the pending buffer into the posterior") {
  fixtures::TempDir dir("svc_refresh");
  ExperimentService svc(dir.path(), 8);
  // No context: encoding is [intercept, arm], so an arm-1 reward of 0.75
  // reproduces the hand-solved 2x2 posterior.
  ExperimentConfig config;
  config.arms.factors = {Factor{"Rationale", 2, {"absent", "present"}}};
  config.mixture_p = 0.0;
  const auto id = svc.create_experiment(config);

  const auto empty_report = svc.refresh_posteriors(id);
  CHECK(empty_report.records_applied == 0);

  // Find an arm-1 receipt; uniform assignment reaches one quickly.
  AssignmentReceipt receipt;
  do {
    receipt = svc.get_assignment(id, "user-a");
  } while (receipt.arm != 1);
  svc.record_reward(id, receipt.assignment_id, 0.75);

  // Not visible before refresh.
  auto summary = svc.experiment_summary(id);
  CHECK(summary.at("decision_points").at(0).at("n_obs") == 0);
  CHECK(summary.at("decision_points").at(0).at("pending") == 1);

  const auto report = svc.refresh_posteriors(id);
  CHECK(report.records_applied == 1);
  REQUIRE(report.n_obs.size() == 1);
  CHECK(report.n_obs[0].second == 1);

  summary = svc.experiment_summary(id);
  const auto mu =
      summary.at("decision_points").at(0).at("mu_hat").get<std::vector<double>>();
  CHECK(mu[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(mu[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("split refreshes equal one combined refresh") {
  fixtures::TempDir dir("svc_batch");
  ExperimentService a(dir.path() / "a", 9);
  ExperimentService b(dir.path() / "b", 9);
  const auto config = rationale_mood_config(0.0);
  const auto id_a = a.create_experiment(config);
  const auto id_b = b.create_experiment(config);

  // Same seed -> same assignment sequence in both services.
  for (int i = 0; i < 30; ++i) {
    const auto ra = a.get_assignment(id_a, "u" + std::to_string(i),
                                     mood(i % 2));
    const auto rb = b.get_assignment(id_b, "u" + std::to_string(i),
                                     mood(i % 2));
    REQUIRE(ra.arm == rb.arm);
    const double value = (i % 5) * 0.25;
    a.record_reward(id_a, ra.assignment_id, value);
    b.record_reward(id_b, rb.assignment_id, value);
    if (i == 14) a.refresh_posteriors(id_a);  // a refreshes midway
  }
  a.refresh_posteriors(id_a);
  b.refresh_posteriors(id_b);
  const auto mu_a = a.experiment_summary(id_a)
                        .at("decision_points")[0]
                        .at("mu_hat")
                        .get<std::vector<double>>();
  const auto mu_b = b.experiment_summary(id_b)
                        .at("decision_points")[0]
                        .at("mu_hat")
                        .get<std::vector<double>>();
  REQUIRE(mu_a.size() == mu_b.size());
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    CHECK(mu_a[i] == doctest::Approx(mu_b[i]).epsilon(1e-9));
  }
}

TEST_CASE("summary split tracks the policy mixture") {
  fixtures::TempDir dir("svc_split");
  ExperimentService svc(dir.path(), 10);
  const auto id = svc.create_experiment(rationale_mood_config(0.5));
  for (int i = 0; i < 1000; ++i) {
    svc.get_assignment(id, "u" + std::to_string(i % 50), mood(i % 2));
  }
  const auto summary = svc.experiment_summary(id);
  CHECK(summary.at("assignments") == 1000);
  const double ts =
      summary.at("by_policy").at("ContextualTS").get<double>() / 1000.0;
  CHECK(ts > 0.45);
  CHECK(ts < 0.55);
  CHECK(summary.at("engagement_rate") == 0.0);
}

TEST_CASE("multi-factor experiments need an explicit decision point") {
  fixtures::TempDir dir("svc_multi");
  ExperimentService svc(dir.path(), 11);
  ExperimentConfig config = rationale_mood_config();
  config.arms.factors.push_back(Factor{"Link", 2, {"absent", "present"}});
  const auto id = svc.create_experiment(config);

  CHECK_THROWS_AS(svc.get_assignment(id, "user-a", mood(0.0)),
                  ValidationError);
  CHECK_THROWS_AS(
      svc.get_assignment(id, "user-a", mood(0.0), std::string("Nope")),
      NotFoundError);

  const auto link =
      svc.get_assignment(id, "user-a", mood(0.0), std::string("Link"));
  CHECK(link.decision_point == "Link");
  svc.record_reward(id, link.assignment_id, 1.0);
  const auto report = svc.refresh_posteriors(id);
  REQUIRE(report.n_obs.size() == 2);
  CHECK(report.n_obs[0].first == "Rationale");
  CHECK(report.n_obs[0].second == 0);  // untouched sibling posterior
  CHECK(report.n_obs[1].first == "Link");
  CHECK(report.n_obs[1].second == 1);
}

TEST_CASE("state replays exactly after an unclean stop") {
  fixtures::TempDir dir("svc_replay");
  nlohmann::json before;
  AssignmentLog exported_before;
  {
    // Leak the service so no destructor snapshot runs: the journal alone
    // must carry the state, as it would after a hard kill.
    auto* svc = new ExperimentService(dir.path(), 12);
    const auto id = svc->create_experiment(rationale_mood_config(0.5));
    std::vector<std::string> ids;
    for (int i = 0; i < 60; ++i) {
      ids.push_back(
          svc->get_assignment(id, "u" + std::to_string(i % 7), mood(i % 2))
              .assignment_id);
    }
    for (int i = 0; i < 20; ++i) {
      svc->record_reward(id, ids[i], (i % 5) * 0.25);
    }
    svc->refresh_posteriors(id);
    for (int i = 20; i < 30; ++i) {  // left pending on purpose
      svc->record_reward(id, ids[i], (i % 5) * 0.25);
    }
    svc->update_context(id, "u1", {{"Mood", 1.0}});
    before = svc->experiment_summary(id);
    exported_before = svc->export_log(id);
    // no delete: simulated crash
  }
  ExperimentService revived(dir.path(), 999);  // different seed on purpose
  const auto ids = revived.experiment_ids();
  REQUIRE(ids.size() == 1);
  CHECK(revived.experiment_summary(ids[0]) == before);
  const auto exported_after = revived.export_log(ids[0]);
  REQUIRE(exported_after.size() == exported_before.size());
  for (std::size_t i = 0; i < exported_after.size(); ++i) {
    CHECK(exported_after[i].user == exported_before[i].user);
    CHECK(exported_after[i].arm == exported_before[i].arm);
    CHECK(exported_after[i].reward == exported_before[i].reward);
  }
  // The revived service keeps working: pending rewards survive to the next
  // refresh.
  const auto report = revived.refresh_posteriors(ids[0]);
  CHECK(report.records_applied == 10);
}

TEST_CASE("refresh never shrinks the posterior") {
  fixtures::TempDir dir("svc_monotone");
  ExperimentService svc(dir.path(), 16);
  const auto id = svc.create_experiment(rationale_mood_config(0.0));
  std::int64_t last_n_obs = 0;
  double last_min_eig = 0.0;
  for (int round = 0; round < 4; ++round) {
    for (int i = 0; i < 10; ++i) {
      const auto receipt =
          svc.get_assignment(id, "u" + std::to_string(i), mood(i % 2));
      svc.record_reward(id, receipt.assignment_id, (i % 5) * 0.25);
    }
    svc.refresh_posteriors(id);
    const auto summary = svc.experiment_summary(id);
    const std::int64_t n_obs =
        summary.at("decision_points")[0].at("n_obs").get<std::int64_t>();
    CHECK(n_obs >= last_n_obs);
    last_n_obs = n_obs;

    // The refresh snapshot carries the posterior; its Gram matrix only grows.
    std::ifstream in(dir.path() / "experiments" / id / "snapshot.json");
    REQUIRE(in.good());
    nlohmann::json snap;
    in >> snap;
    const auto posterior = PosteriorState::from_json(
        snap.at("decision_points")[0].at("posterior"));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(posterior.gram());
    const double min_eig = eig.eigenvalues().minCoeff();
    CHECK(min_eig >= 1.0 - 1e-9);
    CHECK(min_eig >= last_min_eig - 1e-9);
    last_min_eig = min_eig;
  }
  CHECK(last_n_obs == 40);
}

TEST_CASE("snapshot fast-forward agrees with full replay") {
  fixtures::TempDir dir("svc_snapshot");
  nlohmann::json before;
  {
    ExperimentService svc(dir.path(), 13);
    const auto id = svc.create_experiment(rationale_mood_config(0.5));
    std::vector<std::string> ids;
    for (int i = 0; i < 40; ++i) {
      ids.push_back(
          svc.get_assignment(id, "u" + std::to_string(i), mood(i % 2))
              .assignment_id);
    }
    for (int i = 0; i < 25; ++i) svc.record_reward(id, ids[i], 0.75);
    svc.refresh_posteriors(id);  // writes a snapshot
    before = svc.experiment_summary(id);
    // Graceful destruction writes another snapshot.
  }
  CHECK(std::filesystem::exists(dir.path() / "experiments"));
  ExperimentService revived(dir.path(), 14);
  const auto ids = revived.experiment_ids();
  REQUIRE(ids.size() == 1);
  CHECK(revived.experiment_summary(ids[0]) == before);
}

TEST_CASE("the HTTP surface round-trips the whole workflow") {
  fixtures::TempDir dir("svc_http");
  ExperimentService svc(dir.path(), 15);
  service::ServiceConfig config;
  config.port = 0;  // pick a free port
  config.data_dir = dir.path();
  service::HttpServer server(svc, config);
  REQUIRE(server.bind());
  std::thread serving([&] { server.serve(); });
  httplib::Client client("127.0.0.1", server.port());
  client.set_connection_timeout(5);

  // Wait for readiness.
  for (int i = 0; i < 100; ++i) {
    if (auto res = client.Get("/healthz"); res && res->status == 200) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  const auto config_doc = rationale_mood_config(0.5).to_json();
  auto created = client.Post("/experiments", config_doc.dump(),
                             "application/json");
  REQUIRE(created);
  REQUIRE(created->status == 201);
  const auto id = nlohmann::json::parse(created->body)
                      .at("experiment_id")
                      .get<std::string>();

  auto assigned = client.Get("/experiments/" + id +
                             "/assignment?user=user-a&Mood=1");
  REQUIRE(assigned);
  REQUIRE(assigned->status == 200);
  const auto receipt = nlohmann::json::parse(assigned->body);
  CHECK(receipt.at("context").at("Mood") == 1.0);
  const auto assignment_id = receipt.at("assignment_id").get<std::string>();

  auto bad_user = client.Get("/experiments/" + id + "/assignment");
  CHECK(bad_user->status == 400);
  auto missing = client.Get("/experiments/exp-nope/assignment?user=u");
  CHECK(missing->status == 404);

  nlohmann::json reward{{"assignment_id", assignment_id}, {"rating", 4}};
  auto rewarded = client.Post("/experiments/" + id + "/rewards",
                              reward.dump(), "application/json");
  REQUIRE(rewarded);
  CHECK(rewarded->status == 200);
  auto duplicate = client.Post("/experiments/" + id + "/rewards",
                               reward.dump(), "application/json");
  CHECK(duplicate->status == 409);

  auto second = client.Get("/experiments/" + id +
                           "/assignment?user=user-b&Mood=0");
  REQUIRE(second);
  nlohmann::json off_grid{
      {"assignment_id",
       nlohmann::json::parse(second->body).at("assignment_id")},
      {"value", 0.33}};
  auto invalid = client.Post("/experiments/" + id + "/rewards",
                             off_grid.dump(), "application/json");
  CHECK(invalid->status == 400);

  nlohmann::json ctx{{"user", "user-a"}, {"variables", {{"Mood", 1.0}}}};
  auto ctx_res = client.Post("/experiments/" + id + "/context", ctx.dump(),
                             "application/json");
  CHECK(ctx_res->status == 200);

  auto refreshed = client.Post("/experiments/" + id + "/refresh", "",
                               "application/json");
  REQUIRE(refreshed);
  CHECK(refreshed->status == 200);
  CHECK(nlohmann::json::parse(refreshed->body).at("records_applied") == 1);

  auto summary = client.Get("/experiments/" + id + "/summary");
  REQUIRE(summary);
  CHECK(summary->status == 200);
  const auto summary_doc = nlohmann::json::parse(summary->body);
  CHECK(summary_doc.at("assignments") == 2);
  CHECK(summary_doc.at("rated") == 1);
  CHECK(summary_doc.at("engagement_rate") == 0.5);

  auto log_res = client.Get("/experiments/" + id + "/log");
  REQUIRE(log_res);
  CHECK(log_res->status == 200);
  CHECK(log_res->body.rfind("t,user,decision_point,policy", 0) == 0);
  CHECK(log_res->body.find("0.75") != std::string::npos);  // rating 4 scaled

  server.stop();
  serving.join();
}
