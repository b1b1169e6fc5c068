#include <doctest.h>
#include <mmwsim/agent.hpp>
#include <mmwsim/checkpoint.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <vector>

#include "toy_env.hpp"

using namespace mmwsim;

TEST_CASE("state encoding layout") {
  const State s{1, 2, 100.0, 1};
  const auto v = encode_state(s, 3, 100);
  REQUIRE(v.size() == 6);  // |B| + 3
  CHECK(v[0] == doctest::Approx(0.01));
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 1.0);
  CHECK(v[3] == 0.0);
  CHECK(v[4] == 1.0);  // SNR above the range clamps to 1
  CHECK(v[5] == 1.0);

  const auto low = encode_state(State{50, 1, -100.0, 0}, 3, 100);
  CHECK(low[0] == doctest::Approx(0.5));
  CHECK(low[4] == 0.0);  // clamped at the bottom
  CHECK(low[5] == 0.0);

  const auto mid = encode_state(State{1, 1, 20.0, 0}, 3, 100);
  CHECK(mid[4] == doctest::Approx(0.5));  // (20 - -20) / 80
}

TEST_CASE("greedy action is the lowest-index argmax") {
  QPolicy policy;
  policy.net = MlpNetwork({5, 8, 3}, 7);
  policy.num_bs = 2;
  policy.horizon = 10;
  const State s{1, 1, 0.0, 0};
  const auto q = policy.q_values(s);
  REQUIRE(q.size() == 3);
  int expect = 0;
  for (int i = 1; i < 3; ++i)
    if (q[i] > q[expect]) expect = i;
  CHECK(policy.greedy(s) == expect);
}

TEST_CASE("greedy action is invariant to constant shifts") {
  QPolicy policy;
  policy.net = MlpNetwork({5, 8, 3}, 11);
  policy.num_bs = 2;
  policy.horizon = 10;
  const State s{4, 2, -3.0, 1};
  const Action before = policy.greedy(s);
  // Shifting the output biases shifts every Q value equally.
  auto& params = policy.net.params();
  const auto& sizes = policy.net.layer_sizes();
  int bias_start = 0;
  for (std::size_t l = 1; l < sizes.size(); ++l) bias_start += sizes[l - 1] * sizes[l] + sizes[l];
  for (int i = bias_start - sizes.back(); i < bias_start; ++i) params[static_cast<std::size_t>(i)] += 42.0;
  CHECK(policy.greedy(s) == before);
}

TEST_CASE("epsilon schedule decays to the floor by mid-training") {
  TrainConfig cfg;
  cfg.episodes = 1000;
  CHECK(epsilon_at(cfg, 0) == doctest::Approx(1.0));
  CHECK(epsilon_at(cfg, 500) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(epsilon_at(cfg, 999) == doctest::Approx(0.05));
  for (int e = 1; e < 1000; ++e) CHECK(epsilon_at(cfg, e) <= epsilon_at(cfg, e - 1) + 1e-12);
}

TEST_CASE("select_action is greedy at eps 0 and uniform at eps 1") {
  QPolicy policy;
  policy.net = MlpNetwork({5, 8, 3}, 3);
  policy.num_bs = 2;
  policy.horizon = 10;
  const State s{2, 1, 1.0, 0};
  rng::Stream rng(5);

  for (int i = 0; i < 20; ++i) CHECK(select_action(policy, s, 0.0, rng) == policy.greedy(s));

  std::array<int, 3> counts{};
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(select_action(policy, s, 1.0, rng))];
  for (int a = 0; a < 3; ++a)
    CHECK(static_cast<double>(counts[static_cast<std::size_t>(a)]) / draws ==
          doctest::Approx(1.0 / 3.0).epsilon(0.05));

  CHECK_THROWS_AS(select_action(policy, s, 1.5, rng), std::invalid_argument);
}

TEST_CASE("replay buffer wraps and samples without replacement") {
  ReplayBuffer buf(8);
  for (int i = 0; i < 20; ++i) {
    Transition t;
    t.r = i;
    buf.push(std::move(t));
  }
  CHECK(buf.size() == 8);
  rng::Stream rng(3);
  const auto batch = buf.sample(5, rng);
  REQUIRE(batch.size() == 5);
  std::set<const Transition*> unique(batch.begin(), batch.end());
  CHECK(unique.size() == 5);
  for (const Transition* t : batch) CHECK(t->r >= 12.0);  // oldest entries evicted

  const auto all = buf.sample(50, rng);
  CHECK(all.size() == 8);  // clamped to size
}

TEST_CASE("td targets match the update rule") {
  MlpNetwork online({3, 4, 2}, 1);
  MlpNetwork target({3, 4, 2}, 2);

  Transition terminal;
  terminal.s = {0.1, 0.2, 0.3};
  terminal.s2 = {0.0, 0.0, 0.0};
  terminal.a = 0;
  terminal.r = 2.0;
  terminal.terminal = true;
  const Transition* batch1[] = {&terminal};
  const double q = online.forward(terminal.s)[0];
  CHECK(td_loss(batch1, online, target, 0.99) == doctest::Approx((q - 2.0) * (q - 2.0)));

  Transition mid = terminal;
  mid.terminal = false;
  mid.r = 1.0;
  const Transition* batch2[] = {&mid};
  const auto tq = target.forward(mid.s2);
  const double y = 1.0 + 0.99 * std::max(tq[0], tq[1]);
  CHECK(td_loss(batch2, online, target, 0.99) == doctest::Approx((q - y) * (q - y)));
  CHECK(td_loss(batch2, online, target, 0.0) == doctest::Approx((q - 1.0) * (q - 1.0)));
}

TEST_CASE("backprop matches central finite differences") {
  MlpNetwork online({4, 8, 6, 3}, 17);
  MlpNetwork target({4, 8, 6, 3}, 18);
  rng::Stream rng(9);

  std::vector<Transition> batch(8);
  for (Transition& t : batch) {
    t.s = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    t.s2 = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    t.a = static_cast<int>(rng.uniform_int(0, 2));
    t.r = rng.uniform(-2.0, 2.0);
    t.terminal = rng.uniform() < 0.2;
  }
  std::vector<const Transition*> ptrs;
  for (const Transition& t : batch) ptrs.push_back(&t);

  std::vector<double> grad;
  td_gradient(ptrs, online, target, 0.99, grad);
  REQUIRE(static_cast<int>(grad.size()) == online.num_params());

  const double h = 1e-5;
  auto& params = online.params();
  double worst = 0.0;
  for (int i = 0; i < online.num_params(); i += 7) {
    const double orig = params[static_cast<std::size_t>(i)];
    params[static_cast<std::size_t>(i)] = orig + h;
    const double up = td_loss(ptrs, online, target, 0.99);
    params[static_cast<std::size_t>(i)] = orig - h;
    const double down = td_loss(ptrs, online, target, 0.99);
    params[static_cast<std::size_t>(i)] = orig;
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(grad[static_cast<std::size_t>(i)]), 1e-8});
    worst = std::max(worst, std::abs(fd - grad[static_cast<std::size_t>(i)]) / denom);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("training on the toy env is deterministic") {
  TrainConfig cfg;
  cfg.episodes = 50;
  cfg.warmup_transitions = 20;
  cfg.seed = 4;
  toy::ToyEnv env1, env2;
  const TrainResult a = train(env1, cfg);
  const TrainResult b = train(env2, cfg);
  REQUIRE(a.episode_return.size() == 50);
  REQUIRE(b.episode_return.size() == 50);
  for (std::size_t i = 0; i < a.episode_return.size(); ++i)
    CHECK(a.episode_return[i] == b.episode_return[i]);
  for (std::size_t i = 0; i < a.policy.net.params().size(); ++i)
    CHECK(a.policy.net.params()[i] == b.policy.net.params()[i]);
}

TEST_CASE("zero-episode training returns an untrained policy") {
  TrainConfig cfg;
  cfg.episodes = 0;
  toy::ToyEnv env;
  const TrainResult r = train(env, cfg);
  CHECK(r.episode_return.empty());
  CHECK(r.policy.num_bs == 2);
}

TEST_CASE("tabular learning converges on the toy env") {
  toy::ToyEnv env;
  TabularConfig cfg;
  cfg.episodes = 4000;
  cfg.seed = 6;
  const TabularQ q = tabular_q_learning(env, cfg);
  const toy::ValueIteration vi(cfg.discount);
  CHECK(vi.min_margin() > 0.1);  // the toy is genuinely discriminative

  for (const auto& [key, values] : q.table) {
    const auto [loc, serving, bucket, ind] = key;
    REQUIRE(values.size() == 3);
    for (int a = 0; a <= 2; ++a)
      CHECK(values[static_cast<std::size_t>(a)] ==
            doctest::Approx(vi.q[loc - 1][serving - 1][static_cast<std::size_t>(a)]).epsilon(1e-6));
  }

  // Greedy rollout matches the optimal policy.
  State s = env.reset(1);
  while (!env.finished()) {
    const Action a = q.greedy(s);
    CHECK(a == vi.best_action(s.location, s.serving_bs));
    s = env.step(a).next;
  }
}

TEST_CASE("discount zero collapses tabular values to immediate rewards") {
  toy::ToyEnv env;
  TabularConfig cfg;
  cfg.discount = 0.0;
  cfg.episodes = 2000;
  cfg.seed = 8;
  const TabularQ q = tabular_q_learning(env, cfg);
  for (const auto& [key, values] : q.table) {
    const auto [loc, serving, bucket, ind] = key;
    for (int a = 0; a <= 2; ++a)
      CHECK(values[static_cast<std::size_t>(a)] ==
            doctest::Approx(toy::reward(loc, serving, a)).epsilon(1e-9));
  }
}

TEST_CASE("checkpoints round trip exactly") {
  QPolicy policy;
  policy.net = MlpNetwork({5, 16, 3}, 23);
  policy.num_bs = 2;
  policy.horizon = 10;
  policy.action_offset = 0;
  const std::string path =
      (std::filesystem::temp_directory_path() / "mmwsim_ckpt_test.json").string();
  save_policy(policy, "proposed", path);
  const LoadedPolicy back = load_policy(path);
  CHECK(back.method == "proposed");
  CHECK(back.policy.num_bs == 2);
  CHECK(back.policy.horizon == 10);
  REQUIRE(back.policy.net.params().size() == policy.net.params().size());
  for (std::size_t i = 0; i < policy.net.params().size(); ++i)
    CHECK(back.policy.net.params()[i] == policy.net.params()[i]);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_policy("/nonexistent/ckpt.json"), CheckpointError);
}
