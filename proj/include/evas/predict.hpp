#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "evas/trace.hpp"

namespace evas {

struct PredictionConfig {
  int history = 30;               // L, samples
  double horizon = 1.0;           // T, seconds
  double sample_rate = 30.0;      // Hz
  double accuracy_threshold = 0.5235987755982988;  // pi/6
};

// Least-squares line through (i*dt, history[i]) evaluated T seconds past the
// last sample, wrapped into (-pi, pi]. History values must be unwrapped.
double lr_predict(std::span<const double> history, double dt, double horizon);

// Two stacked GRU layers plus an affine head, all parameters in one flat
// vector. Inputs are scalar per timestep.
//
// Flat layout per layer: Wz | Uz | bz | Wr | Ur | br | Wh | Uh | bh with
// W (hidden x in_dim), U (hidden x hidden), b (hidden), layer 1 then layer 2,
// then head weights (hidden) and head bias. All matrices row-major.
struct GruModel {
  int input_len = 0;  // L
  int hidden = 0;
  std::vector<double> params;
  // Normalization of the delta-from-last-observation domain.
  double norm_mean = 0.0;
  double norm_scale = 1.0;

  int layer_params(int in_dim) const {
    return 3 * (hidden * in_dim + hidden * hidden + hidden);
  }
  int param_count() const {
    return layer_params(1) + layer_params(hidden) + hidden + 1;
  }
};

GruModel make_gru_model(int input_len, int hidden, unsigned seed);

// Runs the network on already-normalized inputs and returns the denormalized,
// wrapped output: wrap(norm_mean + norm_scale * head(h_final)).
double gru_forward(const GruModel& model, std::span<const double> normalized);

// Squared-error loss and its gradient w.r.t. every parameter, by
// backpropagation through time. Returns the loss; grad must have
// param_count() entries and is overwritten.
double gru_loss_grad(const GruModel& model, std::span<const double> normalized,
                     double target_normalized, std::span<double> grad);

// Raw history -> prediction: inputs are deltas from the last observation,
// normalized by the model constants; the wrapped delta prediction is added
// back onto the last observation.
double gru_predict(const GruModel& model, std::span<const double> history);

struct GruTrainConfig {
  int hidden = 64;
  int epochs = 40;
  double learning_rate = 0.05;
  int batch_size = 32;
  unsigned seed = 1;
};

struct TrainSample {
  std::vector<double> history;  // raw, unwrapped, length L
  double target = 0.0;          // raw, unwrapped
};

// Plain batch gradient descent on mean squared error. Deterministic for a
// fixed seed; throws if the loss goes non-finite (message names the epoch).
GruModel gru_train(const std::vector<TrainSample>& dataset, int input_len,
                   const GruTrainConfig& cfg,
                   std::vector<double>* loss_history = nullptr);

void save_gru_model(const GruModel& m, std::ostream& out);
GruModel load_gru_model(std::istream& in);

// One model per angle plus the window geometry they were trained with.
struct ViewportModel {
  PredictionConfig config;
  GruModel yaw, pitch, roll;
};

void save_viewport_model(const ViewportModel& m, const std::string& path);
ViewportModel load_viewport_model(const std::string& path);

// Windows with stride 1 over a resampled trace; yaw is unwrapped first.
// target_steps = round(horizon * sample_rate).
enum class Angle { kYaw, kPitch, kRoll };
std::vector<TrainSample> build_windows(const Trace& resampled, Angle angle,
                                       const PredictionConfig& cfg);

ViewportModel train_viewport_model(const std::vector<Trace>& resampled,
                                   const PredictionConfig& cfg,
                                   const GruTrainConfig& train);

// A per-angle predictor: unwrapped history -> predicted angle (wrapped).
using AnglePredictor =
    std::function<double(std::span<const double> history, double dt,
                         double horizon)>;

struct PredictorReport {
  struct PerAngle {
    double accuracy = 0.0;
    double mae = 0.0;
    std::vector<double> sorted_errors;  // CDF support points
  };
  PerAngle yaw, pitch, roll;
  int windows = 0;
};

struct ViewportPredictor {
  AnglePredictor yaw, pitch, roll;
};

ViewportPredictor make_lr_predictor();
ViewportPredictor make_gru_predictor(const ViewportModel& model);

Viewport predict_viewport(const ViewportPredictor& p,
                          std::span<const TraceSample> history, double dt,
                          double horizon);

PredictorReport evaluate_predictor(const ViewportPredictor& p,
                                   const std::vector<Trace>& resampled,
                                   const PredictionConfig& cfg);

}  // namespace evas
