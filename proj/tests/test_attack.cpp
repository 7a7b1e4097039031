#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "bebp/attack.hpp"
#include "bebp/random.hpp"

using namespace bebp;

namespace {

LabelOracle threshold_oracle(double at) {
  return LabelOracle([at](ConstRow x) { return x[0] < at ? Label::kNormal : Label::kAbnormal; });
}

EdgePattern ray_from_origin() { return {{0.0, 0.0}, {1.0, 0.0}, 0}; }

Dataset moons_train(std::uint64_t seed) { return make_moons(100, 0.2, seed); }

std::vector<NamedDataset> moons_eval(std::uint64_t seed) {
  return {{"evaluating", make_moons(400, 0.2, seed + 1000)}};
}

}  // namespace

TEST_CASE("bpd walk against a half-plane") {
  // The threshold sits a hair below 0.5 so that 0.3 + 0.1 + 0.1 computed in
  // floating point still counts as reaching it.
  auto oracle = threshold_oracle(0.5 - 1e-9);
  auto res = bpd(ray_from_origin(), oracle, 8, 0.3, 0.3);
  const double expected_pos[] = {0.0, 0.3, 0.6, 0.3, 0.4, 0.5, 0.4, 0.4 + 1.0 / 30.0};
  const double expected_step[] = {0.3, 0.3, 0.3, 0.1, 0.1, 0.1, 1.0 / 30, 1.0 / 30};
  const Label A = Label::kAbnormal, N = Label::kNormal;
  const Label expected_label[] = {N, N, A, N, N, A, N, N};
  REQUIRE(res.trace.steps.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CAPTURE(i);
    CHECK(res.trace.steps[i].position[0] == doctest::Approx(expected_pos[i]));
    CHECK(res.trace.steps[i].position[1] == 0.0);
    CHECK(res.trace.steps[i].step == doctest::Approx(expected_step[i]));
    CHECK(res.trace.steps[i].label == expected_label[i]);
  }
  REQUIRE(res.boundary.size() == 3);
  CHECK(res.boundary[0][0] == doctest::Approx(0.3));
  CHECK(res.boundary[1][0] == doctest::Approx(0.4));
  CHECK(res.boundary[2][0] == doctest::Approx(0.4 + 1.0 / 30.0));
}

TEST_CASE("bpd with an always-Normal oracle") {
  LabelOracle oracle([](ConstRow) { return Label::kNormal; });
  auto res = bpd({{0.2, 0.1}, {0.6, 0.8}, 0}, oracle, 5, 0.05, 0.05);
  CHECK(res.boundary.empty());
  REQUIRE(res.trace.steps.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(res.trace.steps[i].step == 0.05);
    CHECK(res.trace.steps[i].direction == +1);
    if (i > 0) CHECK(res.trace.steps[i].position[1] > res.trace.steps[i - 1].position[1]);
  }
}

TEST_CASE("step shrinks to a ninth after two Abnormal answers") {
  auto res = bpd(ray_from_origin(), threshold_oracle(0.5 - 1e-9), 8, 0.3, 0.3);
  int abnormal = 0;
  for (const auto& s : res.trace.steps) {
    if (abnormal == 2) {
      CHECK(s.step == doctest::Approx(0.3 / 9));
      break;
    }
    abnormal += s.label == Label::kAbnormal;
  }
  CHECK(abnormal == 2);
}

TEST_CASE("bpd traces follow the step ledger") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const double at = 0.1 + rng.uniform();
    const double angle = 2.0 * rng.uniform() - 1.0;
    EdgePattern e{{0.0, 0.0}, {std::cos(angle), std::sin(angle)}, 0};
    const double lambda0 = 0.01 + 0.2 * rng.uniform();
    auto res = bpd(e, threshold_oracle(at), 1 + rng.index(30), lambda0, lambda0);
    const auto& st = res.trace.steps;
    int shrinks = 0;
    for (std::size_t i = 0; i < st.size(); ++i) {
      CHECK(st[i].step == doctest::Approx(lambda0 / std::pow(3.0, shrinks)));
      if (i + 1 < st.size()) {
        const double moved = std::sqrt(squared_distance(st[i + 1].position, st[i].position));
        CHECK(moved == doctest::Approx(st[i].step));
      }
      if (st[i].label == Label::kAbnormal) ++shrinks;
    }
  }
}

TEST_CASE("bpd query count") {
  auto oracle = threshold_oracle(0.5 - 1e-9);
  auto res = bpd(ray_from_origin(), oracle, 8, 0.3, 0.3);
  std::size_t normals = 0;
  for (const auto& s : res.trace.steps) normals += s.label == Label::kNormal;
  CHECK(oracle.queries() == 8 + normals);
}

TEST_CASE("single-batch bebp equals plain edge detection plus bpd") {
  auto train = moons_train(3);
  auto normals = train.points_with_label(Label::kNormal);
  auto model = fit(VictimSpec::named("svm-rbf"), train);
  LabelOracle oracle(model);
  AttackConfig cfg;
  cfg.batch_size = normals.size();
  auto batch = bebp::bebp(normals, oracle, cfg, 5);

  std::set<Vector> plain;
  for (const auto& e : edge_detect(normals, cfg.epd())) {
    for (auto& p : bpd(e, oracle, cfg.max_iters, cfg.step, cfg.effective_epsilon()).boundary)
      plain.insert(p);
  }
  CHECK(std::set<Vector>(batch.samples.begin(), batch.samples.end()) == plain);
  CHECK(batch.size() == plain.size());
}

TEST_CASE("bebp against an always-Abnormal oracle") {
  LabelOracle oracle([](ConstRow) { return Label::kAbnormal; });
  AttackConfig cfg;
  auto normals = moons_train(2).points_with_label(Label::kNormal);
  CHECK(bebp::bebp(normals, oracle, cfg, 1).empty());
  cfg.batch_size = normals.size() + 1;
  CHECK_THROWS_AS(bebp::bebp(normals, oracle, cfg, 1), SizeError);
}

TEST_CASE("budget cap is strict") {
  CHECK(budget_cap(0.07, 6472) == 453);
  CHECK(budget_cap(0.07, 100) == 6);
  CHECK(budget_cap(0.5, 10) == 4);
  CHECK(budget_cap(0.001, 100) == 0);

  AdversarialBatch ten;
  for (int i = 0; i < 10; ++i) {
    ten.samples.push_back({double(i)});
    ten.source_index.push_back(kNoSource);
  }
  CHECK(enforce_budget(ten, 0.07, 6472, 1).samples == ten.samples);

  AdversarialBatch fifty;
  for (int i = 0; i < 50; ++i) {
    fifty.samples.push_back({double(i)});
    fifty.source_index.push_back(kNoSource);
  }
  auto kept = enforce_budget(fifty, 0.07, 100, 1);
  CHECK(kept.size() == 6);
  for (const auto& s : kept.samples) CHECK(s[0] == std::floor(s[0]));

  for (std::size_t n = 1; n < 3000; n += 37)
    for (double eta : {0.01, 0.04, 0.07, 0.1, 0.25})
      CHECK(static_cast<double>(budget_cap(eta, n)) < eta * n);
}

TEST_CASE("BASIC copies normal rows") {
  auto train = moons_train(4);
  auto batch = baseline_basic(train, 5, 9);
  REQUIRE(batch.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& src = train.samples[batch.source_index[i]];
    CHECK(src.label == Label::kNormal);
    CHECK(src.features == batch.samples[i]);
  }
}

TEST_CASE("RANDOM keeps oracle-Normal candidates") {
  auto train = moons_train(4);
  LabelOracle yes([](ConstRow) { return Label::kNormal; });
  auto batch = baseline_random(train, yes, 4, 2, 17);
  REQUIRE(batch.size() == 8);
  Rng replay(17);
  for (std::size_t i = 0; i < 4; ++i) {
    Vector c{replay.uniform(), replay.uniform()};
    CHECK(batch.samples[i] == c);
  }
  CHECK(yes.queries() == 4);

  LabelOracle no([](ConstRow) { return Label::kAbnormal; });
  CHECK(baseline_random(train, no, 4, 2, 17, 10).empty());
  CHECK(no.queries() == 40);
}

TEST_CASE("round zero is the clean model") {
  auto train = moons_train(5);
  AttackConfig cfg;
  cfg.rounds = 0;
  auto res = chronic_attack(train, VictimSpec::named("nb"), cfg, moons_eval(5));
  REQUIRE(res.rounds.size() == 1);
  CHECK(res.rounds[0].report.injected == 0);
  CHECK(res.final_train.size() == train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    CHECK(res.final_train.samples[i].features == train.samples[i].features);
}

TEST_CASE("chronic rounds respect the budget and the witness property") {
  auto train = moons_train(6);
  for (auto mode : {BudgetMode::kPerRound, BudgetMode::kCumulative}) {
    AttackConfig cfg;
    cfg.rounds = 5;
    cfg.seed = 3;
    cfg.budget_mode = mode;
    FittedModel previous;
    std::size_t total = 0, violations = 0;
    auto res = chronic_attack(train, VictimSpec::named("lr"), cfg, moons_eval(6),
                              [&](const RoundOutcome& out, const Dataset&) {
                                if (previous) {
                                  CHECK(static_cast<double>(out.report.injected) <
                                        cfg.eta * out.train_size_before);
                                  for (std::size_t i = 0; i < out.batch.size(); ++i) {
                                    const auto& x = out.batch.samples[i];
                                    Vector probe = x;
                                    for (std::size_t f = 0; f < x.size(); ++f)
                                      probe[f] += cfg.effective_epsilon() *
                                                  out.batch.directions[i][f];
                                    violations += previous->predict(x) != Label::kNormal;
                                    violations += previous->predict(probe) != Label::kAbnormal;
                                  }
                                }
                                total += out.report.injected;
                                previous = out.model;
                              });
    CHECK(res.rounds.size() == 6);
    CHECK(violations == 0);
    if (mode == BudgetMode::kCumulative)
      CHECK(static_cast<double>(total) < cfg.eta * train.size());
    std::size_t adversarial = 0;
    for (const auto& s : res.final_train.samples) {
      if (s.origin == Origin::kAdversarial) {
        ++adversarial;
        CHECK(s.label == Label::kNormal);
      }
    }
    CHECK(adversarial == total);
  }
}

TEST_CASE("chronic attack is deterministic") {
  auto train = moons_train(7);
  AttackConfig cfg;
  cfg.rounds = 3;
  cfg.seed = 11;
  auto a = chronic_attack(train, VictimSpec::named("svm-rbf"), cfg, moons_eval(7));
  auto b = chronic_attack(train, VictimSpec::named("svm-rbf"), cfg, moons_eval(7));
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    CHECK(a.rounds[r].batch.samples == b.rounds[r].batch.samples);
    CHECK(a.rounds[r].report.evals[0].counts == b.rounds[r].report.evals[0].counts);
  }
}

TEST_CASE("attack configuration validation") {
  AttackConfig cfg;
  cfg.eta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(parse_poison_method("random") == PoisonMethod::kRandom);
  CHECK(parse_budget_mode("cumulative") == BudgetMode::kCumulative);
}
