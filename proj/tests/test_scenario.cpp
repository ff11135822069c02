#include <gtest/gtest.h>

#include "dynkin/dynkin.hpp"
#include "support/oracles.hpp"

using namespace dynkin;

namespace {

const char* kTwoState = R"({
  "states": ["lo", "hi"],
  "transitions": [[0.5, 0.5], [0.25, 0.75]],
  "players": [
    {"f": [1, 2], "g": [3, 4], "h": [2, 3], "discount": {"family": "exponential", "beta": 0.5}},
    {"f": {"hi": 1}, "g": [2, 2], "h": [1, 1], "discount": {"family": "hyperbolic", "beta": 1}}
  ],
  "numerics": {"horizon": 50, "mc_seed": 7},
  "boundary_groups": [["lo", "hi"]]
})";

std::string error_path(const std::string& text) {
  try {
    load_scenario(text);
  } catch (const ScenarioError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST(Scenario, LoadsJson) {
  auto s = load_scenario(kTwoState);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.states().find("hi"), 1u);
  EXPECT_DOUBLE_EQ(s.kernel().prob(1, 1), 0.75);
  EXPECT_EQ(s.player(Player::two).f, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(s.numerics().horizon, 50);
  EXPECT_EQ(s.numerics().mc_seed, 7u);
  EXPECT_EQ(s.player(Player::two).discount.family(), DiscountFamily::hyperbolic);
  ASSERT_EQ(s.boundary_groups().size(), 1u);
  EXPECT_TRUE(s.splits_boundary(StoppingPolicy(2, {0})));
  EXPECT_FALSE(s.splits_boundary(StoppingPolicy::full(2)));
}

TEST(Scenario, JsonRoundTripIsExact) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    auto s = oracle::random_scenario(rng);
    auto back = load_scenario(dump_scenario(s));
    EXPECT_EQ(scenario_to_json(back), scenario_to_json(s));
    EXPECT_EQ(back.kernel().dense(), s.kernel().dense());
    for (Player i : {Player::one, Player::two}) {
      EXPECT_EQ(back.player(i).f, s.player(i).f);
      EXPECT_EQ(back.player(i).discount, s.player(i).discount);
    }
  }
}

TEST(Scenario, ErrorsCarryJsonPointer) {
  std::string bad = kTwoState;
  EXPECT_EQ(error_path(R"({"states": ["a"]})"), "/transitions");
  EXPECT_EQ(error_path("{"), "");

  auto doc = nlohmann::json::parse(kTwoState);
  auto with = [&](auto edit) {
    auto d = doc;
    edit(d);
    return error_path(d.dump());
  };
  EXPECT_EQ(with([](auto& d) { d["transitions"][1] = {0.5, 0.4}; }), "/transitions/1");
  EXPECT_EQ(with([](auto& d) { d["players"][1]["g"][0] = -1; }), "/players/1/g/lo");
  EXPECT_EQ(with([](auto& d) { d["players"][0]["f"] = {1}; }), "/players/0/f");
  EXPECT_EQ(with([](auto& d) { d["players"][0]["discount"]["family"] = "cubic"; }),
            "/players/0/discount/family");
  EXPECT_EQ(with([](auto& d) { d["players"][1]["discount"]["beta"] = 0; }), "/players/1/discount");
  EXPECT_EQ(with([](auto& d) { d["players"][0]["h"] = {{"mid", 1}}; }), "/players/0/h/mid");
  EXPECT_EQ(with([](auto& d) { d["states"] = {"a", "a"}; }), "/states/1");
  EXPECT_EQ(with([](auto& d) { d["boundary_groups"] = {{"nope"}}; }), "/boundary_groups/0/0");
  EXPECT_EQ(with([](auto& d) { d["players"][0].erase("g"); }), "/players/0/g");
  EXPECT_EQ(with([](auto& d) {
              d["players"][0]["discount"] = {{"family", "table"}, {"values", {1.0, 0.5}}};
            }),
            "/players/0/discount/values");
}

TEST(Scenario, KernelOperations) {
  auto k = TransitionKernel::from_dense({{0.0, 1.0, 0.0}, {0.0, 0.5, 0.5}, {0.0, 0.0, 1.0}});
  EXPECT_EQ(k.row(0).size(), 1u);
  EXPECT_EQ(k.apply(std::vector<double>{1, 2, 4}), (std::vector<double>{2, 3, 4}));
  // Largest weight reachable, including the state itself.
  EXPECT_EQ(k.max_reachable(std::vector<double>{5, 1, 2}), (std::vector<double>{5, 2, 2}));
  EXPECT_THROW(TransitionKernel::from_dense({{0.5, 0.4}, {0, 1}}), ScenarioError);
  EXPECT_THROW(TransitionKernel::from_dense({{1.5, -0.5}, {0, 1}}), ScenarioError);
}

TEST(Scenario, StateCap) {
  std::vector<std::string> labels{"a", "b", "c"};
  EXPECT_THROW(StateSpace(labels, 2), Error);
}

TEST(Scenario, Validation) {
  auto s = load_scenario(kTwoState);
  auto rep = validate(s);
  EXPECT_TRUE(rep.ok());
  ASSERT_NE(rep.find("row-stochastic"), nullptr);
  EXPECT_TRUE(rep.find("player1:decreasing-impatience")->passed);
  EXPECT_EQ(rep.find("player1:ordering f<=h<=g"), nullptr);

  auto war = validate(s, ValidationMode::war_of_attrition);
  EXPECT_TRUE(war.find("player1:ordering f<=h<=g")->passed);
  // player 2: f(lo)=0 <= h=1 <= g=2, f(hi)=1 <= 1 <= 2.
  EXPECT_TRUE(war.find("player2:ordering f<=h<=g")->passed);

  auto doc = nlohmann::json::parse(kTwoState);
  doc["players"][0]["h"] = {5, 3};
  auto bad = validate(scenario_from_json(doc), ValidationMode::war_of_attrition);
  EXPECT_FALSE(bad.ok());
  EXPECT_NE(bad.find("player1:ordering f<=h<=g")->detail.find("lo"), std::string::npos);

  // A table with increasing impatience.
  doc = nlohmann::json::parse(kTwoState);
  std::vector<double> tab{1.0, 0.9, 0.5};
  for (int t = 3; t <= 50; ++t) tab.push_back(0.5 * std::pow(0.5, t));
  doc["players"][1]["discount"] = {{"family", "table"}, {"values", tab}};
  auto di = validate(scenario_from_json(doc));
  EXPECT_FALSE(di.find("player2:decreasing-impatience")->passed);
}

TEST(Scenario, MarginCheckIsAdvisory) {
  auto s = load_scenario(kTwoState);
  auto rep = validate(s);
  const auto* c = rep.find("player2:margin-vs-a-priori-tail");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->advisory);
  EXPECT_FALSE(c->passed);  // 1/51 * 2 is far above the margin
  EXPECT_TRUE(rep.ok());

  NumericsConfig n = s.numerics();
  n.tail_tolerance = 1e-6;
  EXPECT_FALSE(validate(s.with_numerics(n)).ok());
}

TEST(Scenario, SupermartingaleCondition) {
  // g constant and hyperbolic discount: delta(t+1) g <= delta(t) g holds.
  auto s = load_scenario(kTwoState);
  EXPECT_TRUE(check_supermartingale(s, Player::two).passed());
  // g rising towards an absorbing state breaks it at the start.
  auto k = TransitionKernel::from_dense({{0.0, 1.0}, {0.0, 1.0}});
  std::array<PlayerSpec, 2> pl;
  for (auto& p : pl) {
    p.f = {0, 0};
    p.g = {1, 10};
    p.h = {0, 0};
    p.discount = DiscountFunction::hyperbolic(1.0);
  }
  Scenario up(StateSpace({"a", "b"}), k, pl);
  auto rep = check_supermartingale(up, Player::one);
  EXPECT_FALSE(rep.passed());
  EXPECT_TRUE(rep.fails_at(0));
  EXPECT_FALSE(rep.fails_at(1));
}

TEST(Scenario, TailBound) {
  auto s = load_scenario(kTwoState);
  EXPECT_DOUBLE_EQ(tail_bound(s, Player::two, 50), 2.0 / 51.0);
  EXPECT_DOUBLE_EQ(tail_bound(s, Player::one, 10), std::exp(-5.0) * 4.0);
}
