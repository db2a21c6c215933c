#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "srlab/image_io.hpp"
#include "srlab/train.hpp"
#include "temp_dir.hpp"

using namespace srlab;

namespace {

NetworkConfig tiny_config(int channels = 1) { return NetworkConfig::from_notation("3-1-3", {4, 3}, channels); }

Tensor smooth_image(int c, int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 6.28);
  const double px = u(rng), py = u(rng);
  Tensor t(c, h, w);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        t.at(ch, y, x) = static_cast<float>(0.5 + 0.3 * std::sin(0.4 * x + px + ch) * std::cos(0.3 * y + py));
      }
    }
  }
  return t;
}

std::vector<TrainSample> tiny_samples(int channels, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TrainSample> s;
  for (int i = 0; i < count; ++i) {
    s.push_back({oracle::random_tensor<float>(channels, 9, 9, rng, 0.0, 1.0),
                 oracle::random_tensor<float>(channels, 5, 5, rng, 0.0, 1.0)});
  }
  return s;
}

TrainConfig tiny_train_config() {
  TrainConfig cfg;
  cfg.f_sub = 9;
  cfg.batch_size = 8;
  cfg.learning_rates = {0.05, 0.05, 0.005};
  cfg.total_backprops = 64;
  cfg.validation_every = 1000;
  return cfg;
}

// Independent weighted MSE: flat loops, no per-channel spans.
double hand_mse(const TensorD& p, const TensorD& t, const std::vector<double>& w) {
  double num = 0.0, den = 0.0;
  for (int c = 0; c < p.channels(); ++c) {
    double s = 0.0;
    for (int y = 0; y < p.height(); ++y) {
      for (int x = 0; x < p.width(); ++x) {
        const double d = p.at(c, y, x) - t.at(c, y, x);
        s += d * d;
      }
    }
    num += w[c] * s / (p.height() * p.width());
    den += w[c];
  }
  return num / den;
}

}  // namespace

TEST_CASE("default learning rates scale by out^2 / 2") {
  // 33 - 8 - 0 - 4 = 21 output pixels per side.
  const auto lr = default_learning_rates(basic_config(), 33);
  REQUIRE(lr.size() == 3);
  CHECK(lr[0] == doctest::Approx(1e-4 * 21 * 21 / 2.0).epsilon(1e-15));
  CHECK(lr[1] == doctest::Approx(1e-4 * 21 * 21 / 2.0).epsilon(1e-15));
  CHECK(lr[2] == doctest::Approx(1e-5 * 21 * 21 / 2.0).epsilon(1e-15));
  CHECK(target_size(basic_config(), 33) == 21);
  CHECK_THROWS_AS(target_size(basic_config(), 12), ConfigError);
}

TEST_CASE("TrainConfig::resolved validation") {
  const auto net = basic_config();
  const auto r = TrainConfig{}.resolved(net);
  CHECK(r.learning_rates.size() == 3);
  CHECK(r.channel_weights == std::vector<double>{1.0});
  auto bad = [&](auto mutate) {
    TrainConfig c;
    mutate(c);
    CHECK_THROWS_AS((void)c.resolved(net), ConfigError);
  };
  bad([](TrainConfig& c) { c.batch_size = 0; });
  bad([](TrainConfig& c) { c.momentum = 1.0; });
  bad([](TrainConfig& c) { c.learning_rates = {1e-4}; });
  bad([](TrainConfig& c) { c.learning_rates = {1e-4, -1.0, 1e-5}; });
  bad([](TrainConfig& c) { c.channel_weights = {0.0}; });
  bad([](TrainConfig& c) { c.channel_weights = {1.0, 1.0}; });
  bad([](TrainConfig& c) { c.total_backprops = 0; });
  bad([](TrainConfig& c) { c.f_sub = 10; });
  bad([](TrainConfig& c) { c.degrade = GaussianDecimateUp{0.0}; });
  bad([](TrainConfig& c) { c.validation_every = 0; });
}

TEST_CASE("extract_subimages: grid count, crops and offsets") {
  TrainConfig cfg;
  const auto net = basic_config();
  const Tensor hr = smooth_image(1, 69, 69, 4);
  const auto samples = extract_subimages({hr}, cfg, net);
  // Positions 0, 14, 28 on each axis.
  CHECK(samples.size() == 9);
  const Tensor lr = degrade(hr, 3, BicubicDownUp{});
  const int origins[] = {0, 14, 28};
  for (int gy = 0; gy < 3; ++gy) {
    for (int gx = 0; gx < 3; ++gx) {
      const auto& s = samples[gy * 3 + gx];
      REQUIRE(s.input.shape() == Shape{1, 33, 33});
      REQUIRE(s.target.shape() == Shape{1, 21, 21});
      CHECK(s.input.at(0, 5, 7) == lr.at(0, origins[gy] + 5, origins[gx] + 7));
      CHECK(s.target.at(0, 0, 0) == hr.at(0, origins[gy] + 6, origins[gx] + 6));
      CHECK(s.target.at(0, 20, 20) == hr.at(0, origins[gy] + 26, origins[gx] + 26));
    }
  }
}

TEST_CASE("extract_subimages: boundary sizes and warnings") {
  TrainConfig cfg;
  const auto net = basic_config();
  std::vector<std::string> warnings;
  auto sink = [&](const std::string& w) { warnings.push_back(w); };
  CHECK(extract_subimages({smooth_image(1, 33, 33, 1)}, cfg, net, sink).size() == 1);
  CHECK(warnings.empty());
  CHECK(extract_subimages({smooth_image(1, 20, 40, 1)}, cfg, net, sink).empty());
  CHECK(warnings.size() == 1);
  // 34 modcrops to 33, still one crop; 35 modcrops to 33 as well.
  CHECK(extract_subimages({smooth_image(1, 35, 35, 2)}, cfg, net, sink).size() == 1);
  // Count formula floor((H - f) / s) + 1 on both axes after modcrop.
  const Tensor wide = smooth_image(1, 51, 99, 3);
  const auto count = [](int n) { return (n - 33) / 14 + 1; };
  CHECK(extract_subimages({wide}, cfg, net).size() == static_cast<std::size_t>(count(51) * count(99)));
  CHECK_THROWS_AS(extract_subimages({smooth_image(3, 40, 40, 1)}, cfg, net), ConfigError);
}

TEST_CASE("extract_subimages with scale 2 and 4") {
  const auto net = basic_config();
  for (int s : {2, 4}) {
    TrainConfig cfg;
    cfg.scale = s;
    const auto samples = extract_subimages({smooth_image(1, 48, 48, 7)}, cfg, net);
    CHECK(samples.size() == 2 * 2);
  }
}

TEST_CASE("loss_mse") {
  std::mt19937_64 rng(2);
  const auto a = oracle::random_tensor<float>(3, 4, 5, rng);
  const std::vector<double> ones{1, 1, 1};
  CHECK(loss_mse(a, a, ones) == 0.0);
  Tensor shifted(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) shifted.data()[i] = a.data()[i] + 0.25f;
  CHECK(loss_mse(shifted, a, ones) == doctest::Approx(0.0625).epsilon(1e-6));

  Tensor c2 = a;
  for (auto& v : c2.channel(2)) v += 0.3f;
  const std::vector<double> y_only{1, 0, 0};
  CHECK(loss_mse(c2, a, y_only) == 0.0);
  CHECK(loss_mse(c2, a, ones) == doctest::Approx(0.09 / 3).epsilon(1e-5));
  CHECK(loss_mse(c2, a, ones) == doctest::Approx(hand_mse(c2.cast<double>(), a.cast<double>(), {1, 1, 1})).epsilon(1e-12));

  CHECK_THROWS_AS(loss_mse(a, Tensor(3, 4, 4), ones), ShapeError);
  CHECK_THROWS_AS(loss_mse(a, a, std::vector<double>{1, 1}), ConfigError);
  CHECK_THROWS_AS(loss_mse(a, a, std::vector<double>{0, 0, 0}), ConfigError);
  CHECK_THROWS_AS(loss_mse(a, a, std::vector<double>{1, -1, 1}), ConfigError);
}

TEST_CASE("batch gradients match finite differences of the batch loss") {
  std::mt19937_64 rng(31);
  auto cfg = tiny_config(2);
  NetworkD net = zero_network<double>(cfg);
  for (auto& b : net.banks) {
    for (auto& w : b.weights) w = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    for (auto& v : b.biases) v = std::uniform_real_distribution<double>(0.0, 0.2)(rng);
  }
  const auto batch = tiny_samples(2, 3, 5);
  const std::vector<double> w{1.0, 0.5};
  const auto [loss, grads] = batch_gradients(net, std::span<const TrainSample>(batch), w);

  auto oracle_loss = [&] {
    double s = 0.0;
    for (const auto& smp : batch) s += hand_mse(forward(net, smp.input.cast<double>()), smp.target.cast<double>(), w);
    return s / static_cast<double>(batch.size());
  };
  CHECK(loss == doctest::Approx(oracle_loss()).epsilon(1e-12));
  for (std::size_t l = 0; l < net.banks.size(); ++l) {
    const auto fd_w = oracle::central_differences(net.banks[l].weights, oracle_loss, 1e-6);
    for (std::size_t i = 0; i < fd_w.size(); ++i) {
      CHECK(std::abs(grads.weights[l][i] - fd_w[i]) < 1e-7 + 1e-5 * std::abs(fd_w[i]));
    }
    const auto fd_b = oracle::central_differences(net.banks[l].biases, oracle_loss, 1e-6);
    for (std::size_t i = 0; i < fd_b.size(); ++i) {
      CHECK(std::abs(grads.biases[l][i] - fd_b[i]) < 1e-7 + 1e-5 * std::abs(fd_b[i]));
    }
  }
}

TEST_CASE("loss_mse_gradient matches finite differences") {
  std::mt19937_64 rng(6);
  auto p = oracle::random_tensor<double>(3, 3, 4, rng);
  const auto t = oracle::random_tensor<double>(3, 3, 4, rng);
  const std::vector<double> w{2.0, 0.0, 1.0};
  const auto g = loss_mse_gradient(p, t, w);
  std::vector<double> flat(p.data().begin(), p.data().end());
  const auto fd = oracle::central_differences(flat, [&] {
    std::copy(flat.begin(), flat.end(), p.data().begin());
    return hand_mse(p, t, w);
  });
  for (std::size_t i = 0; i < fd.size(); ++i) CHECK(g.data()[i] == doctest::Approx(fd[i]).epsilon(1e-7));
}

TEST_CASE("momentum_update scalar recurrence") {
  std::vector<double> w{0.0}, d{0.0};
  const std::vector<double> g{1.0};
  momentum_update<double>(w, d, g, 0.1, 0.9);
  CHECK(std::abs(w[0] - -0.1) < 1e-15);
  momentum_update<double>(w, d, g, 0.1, 0.9);
  CHECK(std::abs(w[0] - -0.29) < 1e-15);
  momentum_update<double>(w, d, g, 0.1, 0.9);
  CHECK(std::abs(w[0] - -0.561) < 1e-15);

  std::vector<float> wf{0.0f}, df{0.0f};
  const std::vector<float> gf{1.0f};
  momentum_update<float>(wf, df, gf, 0.1f, 0.9f);
  momentum_update<float>(wf, df, gf, 0.1f, 0.9f);
  CHECK(std::abs(wf[0] - -0.29f) < 1e-7f);

  std::vector<float> short_grad;
  CHECK_THROWS_AS(momentum_update<float>(wf, df, short_grad, 0.1f, 0.9f), ShapeError);
}

TEST_CASE("sgd_step with zero learning rate only decays the momentum") {
  const auto cfg_net = tiny_config();
  Network net = init_network(cfg_net, 3, 0.1);
  const Network before = net;
  MomentumState state = MomentumState::zeros_like(net);
  std::mt19937_64 rng(1);
  for (auto& layer : state.weights) {
    for (auto& v : layer) v = static_cast<float>(std::uniform_real_distribution<double>(-1, 1)(rng));
  }
  const MomentumState state0 = state;
  TrainConfig cfg = tiny_train_config();
  cfg.learning_rates = {0.0, 0.0, 0.0};
  const auto batch = tiny_samples(1, 4, 2);
  const auto rcfg = cfg.resolved(cfg_net);
  sgd_step(net, state, batch, rcfg);
  for (std::size_t l = 0; l < net.banks.size(); ++l) {
    for (std::size_t i = 0; i < state.weights[l].size(); ++i) {
      CHECK(state.weights[l][i] == 0.9f * state0.weights[l][i]);
      CHECK(net.banks[l].weights[i] == before.banks[l].weights[i] + state.weights[l][i]);
    }
  }
  // With zero momentum as well, nothing moves.
  Network net2 = before;
  MomentumState zero = MomentumState::zeros_like(net2);
  sgd_step(net2, zero, batch, rcfg);
  CHECK(net2 == before);
}

TEST_CASE("sgd_step with zero gradient leaves the network unchanged") {
  const auto cfg_net = tiny_config();
  Network net = zero_network<float>(cfg_net);
  const Network before = net;
  MomentumState state = MomentumState::zeros_like(net);
  std::mt19937_64 rng(4);
  std::vector<TrainSample> batch;
  for (int i = 0; i < 3; ++i) batch.push_back({oracle::random_tensor<float>(1, 9, 9, rng), Tensor(1, 5, 5)});
  const auto rcfg = tiny_train_config().resolved(cfg_net);
  CHECK(sgd_step(net, state, batch, rcfg) == 0.0);
  CHECK(net == before);
}

TEST_CASE("sgd_step with zero momentum is plain gradient descent") {
  const auto cfg_net = tiny_config();
  Network net = init_network(cfg_net, 9, 0.2);
  const auto batch = tiny_samples(1, 5, 3);
  TrainConfig cfg = tiny_train_config();
  cfg.momentum = 0.0;
  const auto rcfg = cfg.resolved(cfg_net);
  const auto [loss, g] = batch_gradients(net, std::span<const TrainSample>(batch), rcfg.channel_weights);
  const Network before = net;
  MomentumState state = MomentumState::zeros_like(net);
  CHECK(sgd_step(net, state, batch, rcfg) == loss);
  for (std::size_t l = 0; l < net.banks.size(); ++l) {
    const auto lr = static_cast<float>(rcfg.learning_rates[l]);
    for (std::size_t i = 0; i < g.weights[l].size(); ++i) {
      CHECK(net.banks[l].weights[i] == before.banks[l].weights[i] - lr * g.weights[l][i]);
    }
    for (std::size_t i = 0; i < g.biases[l].size(); ++i) {
      CHECK(net.banks[l].biases[i] == before.banks[l].biases[i] - lr * g.biases[l][i]);
    }
  }
}

TEST_CASE("a small full-batch step reduces the loss") {
  const auto cfg_net = tiny_config();
  Network net = init_network(cfg_net, 12, 0.2);
  const auto batch = tiny_samples(1, 8, 8);
  TrainConfig cfg = tiny_train_config();
  cfg.momentum = 0.0;
  cfg.learning_rates = {1e-3, 1e-3, 1e-3};
  const auto rcfg = cfg.resolved(cfg_net);
  MomentumState state = MomentumState::zeros_like(net);
  const double before = sgd_step(net, state, batch, rcfg);
  const double after = batch_gradients(net, std::span<const TrainSample>(batch), rcfg.channel_weights).first;
  CHECK(after < before);
}

TEST_CASE("epoch permutations") {
  for (std::uint64_t epoch : {0u, 1u, 7u}) {
    auto p = epoch_permutation(37, 5, epoch);
    CHECK(p == epoch_permutation(37, 5, epoch));
    std::sort(p.begin(), p.end());
    std::vector<std::size_t> id(37);
    std::iota(id.begin(), id.end(), std::size_t{0});
    CHECK(p == id);
  }
  CHECK(epoch_permutation(37, 5, 0) != epoch_permutation(37, 5, 1));
  CHECK(epoch_permutation(37, 5, 0) != epoch_permutation(37, 6, 0));
  // Every sample is visited exactly once per epoch.
  std::vector<int> seen(37, 0);
  for (std::uint64_t k = 37; k < 74; ++k) ++seen[sample_at(k, 37, 5)];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
}

TEST_CASE("train_loop: counter advances by batch size and stops exactly") {
  const auto samples = tiny_samples(1, 20, 1);
  TrainConfig cfg = tiny_train_config();
  cfg.total_backprops = 50;
  std::vector<std::uint64_t> counts;
  TrainLoopOptions opts;
  opts.hooks.on_step = [&](std::uint64_t k, double) { counts.push_back(k); };
  const auto out = train_loop({init_network(tiny_config(), 1), std::nullopt, 0}, samples, {}, cfg, opts);
  CHECK(counts == std::vector<std::uint64_t>{8, 16, 24, 32, 40, 48, 50});
  CHECK(out.backprops == 50);
  REQUIRE(out.momentum.has_value());
  CHECK_THROWS_AS(train_loop({init_network(tiny_config(), 1), std::nullopt, 0}, {}, {}, cfg), ConfigError);
}

TEST_CASE("train_loop is deterministic and resumes exactly") {
  const auto samples = tiny_samples(1, 20, 2);
  TrainConfig cfg = tiny_train_config();
  const Checkpoint start{init_network(tiny_config(), 3), std::nullopt, 0};
  const auto a = train_loop(start, samples, {}, cfg);
  const auto b = train_loop(start, samples, {}, cfg);
  CHECK(a == b);
  CHECK(encode_checkpoint(a) == encode_checkpoint(b));
  CHECK_FALSE(a.net == start.net);

  // Stop at 32 (mid-epoch), round-trip through a file, continue to 64.
  srlab::testing::TempDir dir;
  TrainConfig half = cfg;
  half.total_backprops = 32;
  TrainLoopOptions opts;
  opts.checkpoint_path = dir.path / "half.srcn";
  train_loop(start, samples, {}, half, opts);
  const auto resumed = train_loop(load_checkpoint(opts.checkpoint_path), samples, {}, cfg);
  CHECK(resumed == a);

  TrainConfig other = cfg;
  other.seed = 2;
  CHECK_FALSE(train_loop(start, samples, {}, other) == a);
}

TEST_CASE("train_loop writes a CSV log and honours on_validation") {
  srlab::testing::TempDir dir;
  const auto samples = tiny_samples(1, 20, 3);
  const std::vector<std::pair<std::string, Tensor>> hr{{"v", smooth_image(3, 24, 24, 9)}};
  const auto val = make_validation_set(hr, 3, BicubicDownUp{}, 1, ColorSpace::YCbCr);
  TrainConfig cfg = tiny_train_config();
  cfg.total_backprops = 40;
  cfg.validation_every = 16;
  TrainLoopOptions opts;
  opts.log_path = dir.path / "log.csv";
  std::vector<LogRow> rows;
  opts.hooks.on_validation = [&](const LogRow& r) {
    rows.push_back(r);
    return true;
  };
  train_loop({init_network(tiny_config(), 1), std::nullopt, 0}, samples, val, cfg, opts);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].backprops == 16);
  CHECK(rows[1].backprops == 32);
  CHECK(rows[2].backprops == 40);
  CHECK(rows[2].epoch == 2);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.val_psnr));
    CHECK(r.train_loss > 0.0);
  }
  std::ifstream in(opts.log_path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == kLogHeader);
  CHECK(lines[1].rfind("16,0,", 0) == 0);
  CHECK(lines[3].rfind("40,2,", 0) == 0);

  // Appending keeps a single header; a false return stops at the first event.
  opts.hooks.on_validation = [](const LogRow&) { return false; };
  cfg.total_backprops = 200;
  const auto stopped = train_loop({init_network(tiny_config(), 1), std::nullopt, 0}, samples, val, cfg, opts);
  CHECK(stopped.backprops == 16);
  std::ifstream again(opts.log_path);
  int headers = 0, count = 0;
  while (std::getline(again, line)) {
    ++count;
    headers += line == kLogHeader;
  }
  CHECK(headers == 1);
  CHECK(count == 5);
}

TEST_CASE("strategy plans and image conversion") {
  CHECK(plan_strategy(Strategy::YOnly).channels == 1);
  CHECK(plan_strategy(Strategy::YCbCr).channels == 3);
  CHECK(plan_strategy(Strategy::RGB).space == ColorSpace::RGB);
  CHECK(plan_strategy(Strategy::YPretrain).phase1_weights == std::vector<double>{1, 0, 0});
  CHECK(plan_strategy(Strategy::CbCrPretrain).phase1_weights == std::vector<double>{0, 1, 1});
  for (auto s : {Strategy::YOnly, Strategy::YCbCr, Strategy::YPretrain, Strategy::CbCrPretrain, Strategy::RGB}) {
    CHECK(parse_strategy(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_strategy("lab"), ConfigError);

  const Tensor rgb = smooth_image(3, 10, 12, 5);
  CHECK(strategy_images(Strategy::RGB, {rgb})[0] == rgb);
  CHECK(strategy_images(Strategy::YCbCr, {rgb})[0] == rgb_to_ycbcr(rgb));
  const Tensor y = strategy_images(Strategy::YOnly, {rgb})[0];
  CHECK(y.channels() == 1);
  CHECK(y == luminance(rgb));
  CHECK_THROWS_AS(strategy_images(Strategy::RGB, {Tensor(1, 4, 4)}), ConfigError);
}

TEST_CASE("Y-masked loss ignores chroma targets entirely") {
  const auto net = init_network(tiny_config(3), 2, 0.2);
  auto batch = tiny_samples(3, 4, 10);
  auto perturbed = batch;
  std::mt19937_64 rng(77);
  for (auto& s : perturbed) {
    for (int c : {1, 2}) {
      for (auto& v : s.target.channel(c)) v += static_cast<float>(std::normal_distribution<double>(0, 0.5)(rng));
    }
  }
  const std::vector<double> w = plan_strategy(Strategy::YPretrain).phase1_weights;
  const auto a = batch_gradients(net, std::span<const TrainSample>(batch), w);
  const auto b = batch_gradients(net, std::span<const TrainSample>(perturbed), w);
  CHECK(a.first == b.first);
  CHECK(a.second.weights == b.second.weights);
  CHECK(a.second.biases == b.second.biases);
  // The last layer's chroma filters get no gradient at all.
  const auto& last = a.second.weights.back();
  const std::size_t per = net.banks.back().weights_per_output();
  for (std::size_t i = per; i < last.size(); ++i) CHECK(last[i] == 0.0f);
  CHECK(a.second.biases.back()[1] == 0.0f);
  CHECK(a.second.biases.back()[2] == 0.0f);
}

TEST_CASE("run_strategy: channel counts and pre-training") {
  const std::vector<Tensor> imgs{smooth_image(3, 30, 30, 1), smooth_image(3, 27, 33, 2)};
  const std::vector<std::pair<std::string, Tensor>> val{{"v", smooth_image(3, 21, 21, 3)}};
  TrainConfig cfg = tiny_train_config();
  cfg.total_backprops = 32;
  cfg.validation_every = 16;

  const auto rgb = run_strategy(Strategy::RGB, imgs, val, "3-1-3", {4, 3}, cfg);
  CHECK(rgb.net.config.channels == 3);
  CHECK(rgb.backprops == 32);
  const auto y = run_strategy(Strategy::YOnly, imgs, val, "3-1-3", {4, 3}, cfg);
  CHECK(y.net.config.channels == 1);
  CHECK(predict_full(y.net, Tensor(1, 12, 12)).shape() == Shape{1, 12, 12});

  cfg.pretrain_backprops = 16;
  std::vector<std::uint64_t> steps;
  TrainLoopOptions opts;
  opts.hooks.on_step = [&](std::uint64_t k, double) { steps.push_back(k); };
  const auto pre = run_strategy(Strategy::YPretrain, imgs, val, "3-1-3", {4, 3}, cfg, opts);
  CHECK(pre.backprops == 32);
  CHECK(steps == std::vector<std::uint64_t>{8, 16, 24, 32});
  cfg.pretrain_backprops = 32;
  CHECK_THROWS_AS(run_strategy(Strategy::YPretrain, imgs, val, "3-1-3", {4, 3}, cfg), ConfigError);
}
