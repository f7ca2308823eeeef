#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "evas/predict.hpp"
#include "support/fixtures.hpp"

using namespace evas;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Normal-equation OLS, independent of lr_predict's streaming sums.
double ols_oracle(const std::vector<double>& y, double dt, double horizon) {
  size_t n = y.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += i * dt;
    my += y[i];
  }
  mx /= n;
  my /= n;
  double num = 0, den = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (i * dt - mx) * (y[i] - my);
    den += (i * dt - mx) * (i * dt - mx);
  }
  double slope = num / den;
  return (my - slope * mx) + slope * ((n - 1) * dt + horizon);
}

}  // namespace

TEST_CASE("lr_predict exact on constant and affine histories") {
  std::vector<double> c(10, 0.7);
  CHECK(lr_predict(c, 1.0 / 30, 1.0) == doctest::Approx(0.7).epsilon(1e-12));

  std::vector<double> ramp;
  double dt = 1.0 / 30;
  for (int i = 0; i < 30; ++i) ramp.push_back(0.1 + 0.5 * (i * dt));
  double expected = 0.1 + 0.5 * (29 * dt + 1.0);
  CHECK(std::abs(lr_predict(ramp, dt, 1.0) - expected) < 1e-9);
}

TEST_CASE("lr_predict matches the normal-equation oracle on noisy data") {
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(0, 0.05);
  std::vector<double> y;
  double dt = 1.0 / 30;
  for (int i = 0; i < 30; ++i) y.push_back(0.2 + 0.8 * i * dt + noise(rng));
  CHECK(std::abs(lr_predict(y, dt, 1.0) - wrap_angle(ols_oracle(y, dt, 1.0))) <
        1e-9);
}

TEST_CASE("gru_forward with zero weights returns the denormalized head bias") {
  GruModel m = make_gru_model(5, 4, 1);
  std::fill(m.params.begin(), m.params.end(), 0.0);
  m.params.back() = 0.25;  // head bias
  m.norm_mean = 0.1;
  m.norm_scale = 2.0;
  std::vector<double> x{0.3, -0.2, 0.5, 0.1, 0.0};
  CHECK(gru_forward(m, x) == doctest::Approx(0.1 + 2.0 * 0.25).epsilon(1e-12));
}

TEST_CASE("gru_forward is deterministic") {
  GruModel m = make_gru_model(6, 5, 42);
  std::vector<double> x{0.1, 0.2, -0.3, 0.4, -0.5, 0.6};
  double a = gru_forward(m, x);
  double b = gru_forward(m, x);
  CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
  CHECK_THROWS_AS((gru_forward(m, std::vector<double>{1, 2})),
                  std::invalid_argument);
}

TEST_CASE("gru analytic gradients match central finite differences") {
  GruModel m = make_gru_model(5, 4, 7);
  m.norm_mean = 0;
  m.norm_scale = 1;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> x(5);
  for (double& v : x) v = u(rng);
  double target = 0.37;

  std::vector<double> grad(m.param_count());
  gru_loss_grad(m, x, target, grad);

  const double eps = 1e-5;
  double worst_rel = 0;
  for (int p = 0; p < m.param_count(); ++p) {
    GruModel mp = m;
    mp.params[p] += eps;
    GruModel mm = m;
    mm.params[p] -= eps;
    std::vector<double> scratch(m.param_count());
    double lp = gru_loss_grad(mp, x, target, scratch);
    double lm = gru_loss_grad(mm, x, target, scratch);
    double fd = (lp - lm) / (2 * eps);
    double denom = std::max({std::abs(fd), std::abs(grad[p]), 1e-8});
    worst_rel = std::max(worst_rel, std::abs(fd - grad[p]) / denom);
  }
  CHECK(worst_rel < 1e-4);
}

TEST_CASE("gru_train learns a constant trace") {
  std::vector<TrainSample> data;
  for (int k = 0; k < 40; ++k)
    data.push_back({std::vector<double>(10, 0.8), 0.8});
  GruTrainConfig cfg{8, 30, 0.05, 16, 3};
  GruModel m = gru_train(data, 10, cfg);
  CHECK(std::abs(gru_predict(m, data[0].history) - 0.8) < 1e-2);
}

TEST_CASE("gru_train is seed deterministic") {
  std::vector<TrainSample> data;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 30; ++k) {
    TrainSample s;
    for (int i = 0; i < 8; ++i) s.history.push_back(u(rng));
    s.target = u(rng);
    data.push_back(std::move(s));
  }
  GruTrainConfig cfg{6, 10, 0.02, 8, 7};
  GruModel a = gru_train(data, 8, cfg);
  GruModel b = gru_train(data, 8, cfg);
  CHECK(a.params == b.params);  // bit identical
  CHECK_THROWS_AS(gru_train({}, 8, cfg), std::invalid_argument);
}

TEST_CASE("trained gru beats hold-last on a sinusoid") {
  // yaw = sin(2*pi*t/4), 30 Hz, horizon 1 s: hold-last lags a quarter period.
  PredictionConfig cfg;
  Trace t;
  t.user_id = "sin";
  for (int k = 0; k <= 30 * 40; ++k) {
    double s = k / 30.0;
    t.samples.push_back({s, {std::sin(2 * kPi * s / 4.0), 0, 0}});
  }
  std::vector<TrainSample> all = build_windows(t, Angle::kYaw, cfg);
  // train on the first 80%, evaluate on the rest
  size_t split = all.size() * 4 / 5;
  std::vector<TrainSample> train(all.begin(), all.begin() + split);
  std::vector<TrainSample> test(all.begin() + split, all.end());
  GruTrainConfig tcfg{16, 60, 0.08, 32, 9};
  GruModel m = gru_train(train, cfg.history, tcfg);

  double gru_mae = 0, hold_mae = 0;
  for (const TrainSample& s : test) {
    gru_mae += std::abs(gru_predict(m, s.history) - wrap_angle(s.target));
    hold_mae += std::abs(s.history.back() - s.target);
  }
  gru_mae /= test.size();
  hold_mae /= test.size();
  CHECK(hold_mae > 0.5);  // sanity: quarter-period lag really hurts
  CHECK(gru_mae < hold_mae);
}

TEST_CASE("model save/load round trip is bit exact") {
  std::vector<TrainSample> data;
  for (int k = 0; k < 20; ++k)
    data.push_back({std::vector<double>(6, 0.1 * k), 0.1 * k});
  GruTrainConfig tcfg{4, 5, 0.02, 8, 2};
  ViewportModel m;
  m.config = {6, 0.5, 10.0, 0.5};
  m.yaw = gru_train(data, 6, tcfg);
  m.pitch = gru_train(data, 6, tcfg);
  m.roll = gru_train(data, 6, tcfg);

  std::string path =
      (std::filesystem::temp_directory_path() / "evas_model_test.txt").string();
  save_viewport_model(m, path);
  ViewportModel l = load_viewport_model(path);
  CHECK(l.yaw.params == m.yaw.params);
  CHECK(l.pitch.params == m.pitch.params);
  CHECK(l.roll.params == m.roll.params);
  CHECK(std::memcmp(&l.yaw.norm_scale, &m.yaw.norm_scale, sizeof(double)) == 0);
  CHECK(l.config.history == 6);
}

TEST_CASE("evaluate_predictor basics") {
  PredictionConfig cfg;
  cfg.history = 5;
  cfg.horizon = 0.5;
  cfg.sample_rate = 10;

  Trace constant;
  constant.user_id = "c";
  for (int k = 0; k <= 100; ++k)
    constant.samples.push_back({k * 0.1, {0.4, -0.2, 0.1}});
  PredictorReport rep =
      evaluate_predictor(make_lr_predictor(), {constant}, cfg);
  CHECK(rep.yaw.accuracy == doctest::Approx(1.0));
  CHECK(rep.pitch.accuracy == doctest::Approx(1.0));
  CHECK(rep.roll.accuracy == doctest::Approx(1.0));
  CHECK(rep.yaw.mae < 1e-9);
  CHECK(rep.yaw.sorted_errors.front() <= rep.yaw.sorted_errors.back());
}

TEST_CASE("accuracy is monotone in the threshold") {
  PredictionConfig cfg;
  cfg.history = 10;
  cfg.horizon = 1.0;
  cfg.sample_rate = 30;
  std::vector<Trace> traces = {
      fixtures::synthetic_trace("a", 20, 30, 1),
      fixtures::synthetic_trace("b", 20, 30, 2)};
  double prev = -1;
  for (double th : {0.1, 0.3, 0.6, 1.0, 3.2}) {
    cfg.accuracy_threshold = th;
    PredictorReport rep = evaluate_predictor(make_lr_predictor(), traces, cfg);
    CHECK(rep.yaw.accuracy >= prev);
    prev = rep.yaw.accuracy;
  }
}

TEST_CASE("per-angle models are independent") {
  PredictionConfig cfg;
  cfg.history = 8;
  cfg.horizon = 0.5;
  cfg.sample_rate = 10;
  Trace t = fixtures::synthetic_trace("u", 30, 10, 4);
  std::span<const TraceSample> window(t.samples.data(), 8);
  ViewportPredictor lr = make_lr_predictor();
  Viewport before = predict_viewport(lr, window, 0.1, 0.5);

  // scramble pitch only
  Trace scrambled = t;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  for (TraceSample& s : scrambled.samples) s.vp.pitch = u(rng);
  std::span<const TraceSample> window2(scrambled.samples.data(), 8);
  Viewport after = predict_viewport(lr, window2, 0.1, 0.5);
  CHECK(after.yaw == doctest::Approx(before.yaw).epsilon(1e-12));
  CHECK(after.roll == doctest::Approx(before.roll).epsilon(1e-12));
}
