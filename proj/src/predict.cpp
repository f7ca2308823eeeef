#include "evas/predict.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace evas {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Pointers into the flat parameter vector for one layer.
template <typename T>
struct LayerView {
  T* wz;
  T* uz;
  T* bz;
  T* wr;
  T* ur;
  T* br;
  T* wh;
  T* uh;
  T* bh;
  int in_dim;
  int hidden;
};

template <typename T>
LayerView<T> layer_view(T* base, int in_dim, int hidden) {
  int wn = hidden * in_dim, un = hidden * hidden;
  int gate = wn + un + hidden;
  return {base,
          base + wn,
          base + wn + un,
          base + gate,
          base + gate + wn,
          base + gate + wn + un,
          base + 2 * gate,
          base + 2 * gate + wn,
          base + 2 * gate + wn + un,
          in_dim,
          hidden};
}

struct LayerCache {
  // Each entry is one timestep, hidden wide.
  std::vector<std::vector<double>> z, r, hc, h;
};

// x is T timesteps of in_dim values; returns the hidden sequence in cache.h.
void forward_layer(const LayerView<const double>& lv,
                   const std::vector<std::vector<double>>& x,
                   LayerCache& cache) {
  int steps = static_cast<int>(x.size());
  int hn = lv.hidden;
  cache.z.assign(steps, std::vector<double>(hn));
  cache.r.assign(steps, std::vector<double>(hn));
  cache.hc.assign(steps, std::vector<double>(hn));
  cache.h.assign(steps, std::vector<double>(hn));
  std::vector<double> hprev(hn, 0.0), rh(hn);
  for (int t = 0; t < steps; ++t) {
    const std::vector<double>& xt = x[t];
    for (int i = 0; i < hn; ++i) {
      double az = lv.bz[i], ar = lv.br[i];
      for (int j = 0; j < lv.in_dim; ++j) {
        az += lv.wz[i * lv.in_dim + j] * xt[j];
        ar += lv.wr[i * lv.in_dim + j] * xt[j];
      }
      for (int j = 0; j < hn; ++j) {
        az += lv.uz[i * hn + j] * hprev[j];
        ar += lv.ur[i * hn + j] * hprev[j];
      }
      cache.z[t][i] = sigmoid(az);
      cache.r[t][i] = sigmoid(ar);
    }
    for (int i = 0; i < hn; ++i) rh[i] = cache.r[t][i] * hprev[i];
    for (int i = 0; i < hn; ++i) {
      double ah = lv.bh[i];
      for (int j = 0; j < lv.in_dim; ++j)
        ah += lv.wh[i * lv.in_dim + j] * xt[j];
      for (int j = 0; j < hn; ++j) ah += lv.uh[i * hn + j] * rh[j];
      cache.hc[t][i] = std::tanh(ah);
      cache.h[t][i] = (1.0 - cache.z[t][i]) * hprev[i] +
                      cache.z[t][i] * cache.hc[t][i];
    }
    hprev = cache.h[t];
  }
}

// Backpropagation through time for one layer. dh_seq holds the upstream
// gradient on each hidden state; dx_seq receives the gradient on the inputs.
void backward_layer(const LayerView<const double>& lv,
                    const std::vector<std::vector<double>>& x,
                    const LayerCache& cache,
                    const std::vector<std::vector<double>>& dh_seq,
                    const LayerView<double>& g,
                    std::vector<std::vector<double>>* dx_seq) {
  int steps = static_cast<int>(x.size());
  int hn = lv.hidden;
  if (dx_seq) dx_seq->assign(steps, std::vector<double>(lv.in_dim, 0.0));
  std::vector<double> dh_carry(hn, 0.0);
  std::vector<double> dh(hn), da_z(hn), da_r(hn), da_h(hn), du(hn);
  const std::vector<double> zero(hn, 0.0);
  for (int t = steps - 1; t >= 0; --t) {
    const std::vector<double>& hprev = t > 0 ? cache.h[t - 1] : zero;
    for (int i = 0; i < hn; ++i) dh[i] = dh_seq[t][i] + dh_carry[i];
    std::vector<double> dh_prev(hn, 0.0);
    for (int i = 0; i < hn; ++i) {
      double z = cache.z[t][i], hc = cache.hc[t][i];
      double dz = (hc - hprev[i]) * dh[i];
      double dhc = z * dh[i];
      dh_prev[i] = (1.0 - z) * dh[i];
      da_h[i] = dhc * (1.0 - hc * hc);
      da_z[i] = dz * z * (1.0 - z);
    }
    // du = Uh^T da_h, the gradient on r*h_prev.
    std::fill(du.begin(), du.end(), 0.0);
    for (int i = 0; i < hn; ++i)
      for (int j = 0; j < hn; ++j) du[j] += lv.uh[i * hn + j] * da_h[i];
    for (int i = 0; i < hn; ++i) {
      double r = cache.r[t][i];
      double dr = du[i] * hprev[i];
      dh_prev[i] += du[i] * r;
      da_r[i] = dr * r * (1.0 - r);
    }
    const std::vector<double>& xt = x[t];
    for (int i = 0; i < hn; ++i) {
      for (int j = 0; j < lv.in_dim; ++j) {
        g.wz[i * lv.in_dim + j] += da_z[i] * xt[j];
        g.wr[i * lv.in_dim + j] += da_r[i] * xt[j];
        g.wh[i * lv.in_dim + j] += da_h[i] * xt[j];
      }
      for (int j = 0; j < hn; ++j) {
        g.uz[i * hn + j] += da_z[i] * hprev[j];
        g.ur[i * hn + j] += da_r[i] * hprev[j];
        // Uh sees r*h_prev as its input.
        g.uh[i * hn + j] += da_h[i] * cache.r[t][j] * hprev[j];
      }
      g.bz[i] += da_z[i];
      g.br[i] += da_r[i];
      g.bh[i] += da_h[i];
    }
    for (int i = 0; i < hn; ++i)
      for (int j = 0; j < hn; ++j) {
        dh_prev[j] += lv.uz[i * hn + j] * da_z[i];
        dh_prev[j] += lv.ur[i * hn + j] * da_r[i];
      }
    if (dx_seq) {
      std::vector<double>& dx = (*dx_seq)[t];
      for (int i = 0; i < hn; ++i)
        for (int j = 0; j < lv.in_dim; ++j) {
          dx[j] += lv.wz[i * lv.in_dim + j] * da_z[i];
          dx[j] += lv.wr[i * lv.in_dim + j] * da_r[i];
          dx[j] += lv.wh[i * lv.in_dim + j] * da_h[i];
        }
    }
    dh_carry = dh_prev;
  }
}

struct ForwardState {
  std::vector<std::vector<double>> x1, x2;
  LayerCache c1, c2;
  double head_out = 0.0;
};

double forward_core(const GruModel& m, std::span<const double> normalized,
                    ForwardState* state) {
  if (static_cast<int>(normalized.size()) != m.input_len)
    throw std::invalid_argument("gru input length mismatch");
  ForwardState local;
  ForwardState& st = state ? *state : local;
  int hn = m.hidden;
  st.x1.assign(normalized.size(), std::vector<double>(1));
  for (size_t t = 0; t < normalized.size(); ++t) st.x1[t][0] = normalized[t];
  LayerView<const double> l1 = layer_view(m.params.data(), 1, hn);
  LayerView<const double> l2 =
      layer_view(m.params.data() + m.layer_params(1), hn, hn);
  const double* head_w = m.params.data() + m.layer_params(1) + m.layer_params(hn);
  double head_b = head_w[hn];
  forward_layer(l1, st.x1, st.c1);
  st.x2 = st.c1.h;
  forward_layer(l2, st.x2, st.c2);
  double y = head_b;
  const std::vector<double>& hl = st.c2.h.back();
  for (int i = 0; i < hn; ++i) y += head_w[i] * hl[i];
  st.head_out = y;
  return y;
}

}  // namespace

double lr_predict(std::span<const double> history, double dt, double horizon) {
  size_t n = history.size();
  if (n < 2) throw std::invalid_argument("lr_predict needs >= 2 samples");
  // OLS over (i*dt, y_i).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double x = i * dt;
    sx += x;
    sy += history[i];
    sxx += x * x;
    sxy += x * history[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  double intercept = (sy - slope * sx) / n;
  double x_eval = (n - 1) * dt + horizon;
  return wrap_angle(intercept + slope * x_eval);
}

GruModel make_gru_model(int input_len, int hidden, unsigned seed) {
  if (input_len < 1 || hidden < 1)
    throw std::invalid_argument("gru dimensions must be >= 1");
  GruModel m;
  m.input_len = input_len;
  m.hidden = hidden;
  m.params.resize(m.param_count());
  std::mt19937 rng(seed);
  double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& p : m.params) p = dist(rng);
  return m;
}

double gru_forward(const GruModel& m, std::span<const double> normalized) {
  double y = forward_core(m, normalized, nullptr);
  return wrap_angle(m.norm_mean + m.norm_scale * y);
}

double gru_loss_grad(const GruModel& m, std::span<const double> normalized,
                     double target_normalized, std::span<double> grad) {
  if (static_cast<int>(grad.size()) != m.param_count())
    throw std::invalid_argument("gradient buffer size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  ForwardState st;
  double y = forward_core(m, normalized, &st);
  double err = y - target_normalized;
  double loss = err * err;
  double dy = 2.0 * err;

  int hn = m.hidden;
  int l1n = m.layer_params(1), l2n = m.layer_params(hn);
  LayerView<const double> l1 = layer_view(m.params.data(), 1, hn);
  LayerView<const double> l2 = layer_view(m.params.data() + l1n, hn, hn);
  LayerView<double> g1 = layer_view(grad.data(), 1, hn);
  LayerView<double> g2 = layer_view(grad.data() + l1n, hn, hn);
  const double* head_w = m.params.data() + l1n + l2n;
  double* ghead = grad.data() + l1n + l2n;

  int steps = m.input_len;
  const std::vector<double>& hl = st.c2.h.back();
  for (int i = 0; i < hn; ++i) ghead[i] = dy * hl[i];
  ghead[hn] = dy;

  std::vector<std::vector<double>> dh2(steps, std::vector<double>(hn, 0.0));
  for (int i = 0; i < hn; ++i) dh2[steps - 1][i] = dy * head_w[i];
  std::vector<std::vector<double>> dx2;
  backward_layer(l2, st.x2, st.c2, dh2, g2, &dx2);
  backward_layer(l1, st.x1, st.c1, dx2, g1, nullptr);
  return loss;
}

double gru_predict(const GruModel& m, std::span<const double> history) {
  if (static_cast<int>(history.size()) != m.input_len)
    throw std::invalid_argument("gru history length mismatch");
  double base = history.back();
  std::vector<double> x(history.size());
  for (size_t i = 0; i < history.size(); ++i)
    x[i] = (history[i] - base - m.norm_mean) / m.norm_scale;
  double y = forward_core(m, x, nullptr);
  return wrap_angle(base + m.norm_mean + m.norm_scale * y);
}

GruModel gru_train(const std::vector<TrainSample>& dataset, int input_len,
                   const GruTrainConfig& cfg,
                   std::vector<double>* loss_history) {
  if (dataset.empty()) throw std::invalid_argument("gru_train: empty dataset");
  for (const TrainSample& s : dataset)
    if (static_cast<int>(s.history.size()) != input_len)
      throw std::invalid_argument("gru_train: window length mismatch");

  GruModel m = make_gru_model(input_len, cfg.hidden, cfg.seed);

  // Fit normalization on the delta-from-last domain.
  std::vector<std::vector<double>> inputs(dataset.size());
  std::vector<double> targets(dataset.size());
  double sum = 0, count = 0;
  for (size_t k = 0; k < dataset.size(); ++k) {
    double base = dataset[k].history.back();
    inputs[k].resize(input_len);
    for (int i = 0; i < input_len; ++i)
      inputs[k][i] = dataset[k].history[i] - base;
    targets[k] = dataset[k].target - base;
    for (double v : inputs[k]) sum += v;
    sum += targets[k];
    count += input_len + 1;
  }
  double mean = sum / count;
  double var = 0;
  for (size_t k = 0; k < dataset.size(); ++k) {
    for (double v : inputs[k]) var += (v - mean) * (v - mean);
    var += (targets[k] - mean) * (targets[k] - mean);
  }
  m.norm_mean = mean;
  m.norm_scale = std::max(std::sqrt(var / count), 1e-6);
  for (size_t k = 0; k < dataset.size(); ++k) {
    for (double& v : inputs[k]) v = (v - mean) / m.norm_scale;
    targets[k] = (targets[k] - mean) / m.norm_scale;
  }

  std::mt19937 rng(cfg.seed);
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(m.param_count()), acc(m.param_count());
  int batch = std::max(1, cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    for (size_t start = 0; start < order.size(); start += batch) {
      size_t end = std::min(order.size(), start + batch);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (size_t k = start; k < end; ++k) {
        size_t idx = order[k];
        epoch_loss += gru_loss_grad(m, inputs[idx], targets[idx], grad);
        for (size_t p = 0; p < acc.size(); ++p) acc[p] += grad[p];
      }
      double step = cfg.learning_rate / static_cast<double>(end - start);
      for (size_t p = 0; p < acc.size(); ++p) m.params[p] -= step * acc[p];
    }
    epoch_loss /= static_cast<double>(dataset.size());
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("gru_train: non-finite loss at epoch " +
                               std::to_string(epoch));
    if (loss_history) loss_history->push_back(epoch_loss);
  }
  return m;
}

void save_gru_model(const GruModel& m, std::ostream& out) {
  out << "GRU " << m.input_len << ' ' << m.hidden << ' ' << std::hexfloat
      << m.norm_mean << ' ' << m.norm_scale << ' ' << std::defaultfloat
      << m.params.size() << '\n';
  out << std::hexfloat;
  for (size_t i = 0; i < m.params.size(); ++i)
    out << m.params[i] << (i + 1 == m.params.size() ? '\n' : ' ');
  out << std::defaultfloat;
}

// operator>> cannot parse hexfloat, so numeric fields go through strtod.
static double read_double(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok))
    throw std::runtime_error(std::string("model file: missing ") + what);
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size())
    throw std::runtime_error(std::string("model file: bad ") + what + " '" +
                             tok + "'");
  return v;
}

GruModel load_gru_model(std::istream& in) {
  std::string tag;
  GruModel m;
  size_t n = 0;
  if (!(in >> tag) || tag != "GRU" || !(in >> m.input_len >> m.hidden))
    throw std::runtime_error("model file: malformed GRU block");
  m.norm_mean = read_double(in, "norm_mean");
  m.norm_scale = read_double(in, "norm_scale");
  if (!(in >> n)) throw std::runtime_error("model file: malformed GRU block");
  if (n != static_cast<size_t>(m.param_count()))
    throw std::runtime_error("model file: parameter count mismatch");
  m.params.resize(n);
  for (double& p : m.params) p = read_double(in, "parameter");
  return m;
}

void save_viewport_model(const ViewportModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model '" + path + "'");
  out << "EVASVPM1\n";
  out << m.config.history << ' ' << std::hexfloat << m.config.horizon << ' '
      << m.config.sample_rate << ' ' << m.config.accuracy_threshold
      << std::defaultfloat << '\n';
  save_gru_model(m.yaw, out);
  save_gru_model(m.pitch, out);
  save_gru_model(m.roll, out);
}

ViewportModel load_viewport_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model '" + path + "'");
  std::string magic;
  ViewportModel m;
  if (!(in >> magic) || magic != "EVASVPM1")
    throw std::runtime_error("model file: bad magic");
  if (!(in >> m.config.history))
    throw std::runtime_error("model file: malformed header");
  m.config.horizon = read_double(in, "horizon");
  m.config.sample_rate = read_double(in, "sample_rate");
  m.config.accuracy_threshold = read_double(in, "accuracy_threshold");
  m.yaw = load_gru_model(in);
  m.pitch = load_gru_model(in);
  m.roll = load_gru_model(in);
  return m;
}

std::vector<TrainSample> build_windows(const Trace& resampled, Angle angle,
                                       const PredictionConfig& cfg) {
  int steps = static_cast<int>(std::lround(cfg.horizon * cfg.sample_rate));
  if (steps < 1) throw std::invalid_argument("horizon shorter than one sample");
  int n = static_cast<int>(resampled.samples.size());
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    const Viewport& vp = resampled.samples[i].vp;
    values[i] = angle == Angle::kYaw ? vp.yaw
               : angle == Angle::kPitch ? vp.pitch
                                        : vp.roll;
  }
  if (angle != Angle::kPitch) values = unwrap_yaw(values);
  std::vector<TrainSample> out;
  for (int last = cfg.history - 1; last + steps < n; ++last) {
    TrainSample s;
    s.history.assign(values.begin() + (last - cfg.history + 1),
                     values.begin() + last + 1);
    s.target = values[last + steps];
    out.push_back(std::move(s));
  }
  return out;
}

ViewportModel train_viewport_model(const std::vector<Trace>& resampled,
                                   const PredictionConfig& cfg,
                                   const GruTrainConfig& train) {
  ViewportModel m;
  m.config = cfg;
  for (Angle a : {Angle::kYaw, Angle::kPitch, Angle::kRoll}) {
    std::vector<TrainSample> dataset;
    for (const Trace& t : resampled) {
      std::vector<TrainSample> w = build_windows(t, a, cfg);
      dataset.insert(dataset.end(), w.begin(), w.end());
    }
    GruModel g = gru_train(dataset, cfg.history, train);
    (a == Angle::kYaw ? m.yaw : a == Angle::kPitch ? m.pitch : m.roll) =
        std::move(g);
  }
  return m;
}

ViewportPredictor make_lr_predictor() {
  AnglePredictor p = [](std::span<const double> h, double dt, double horizon) {
    return lr_predict(h, dt, horizon);
  };
  return {p, p, p};
}

ViewportPredictor make_gru_predictor(const ViewportModel& model) {
  auto wrap_model = [](const GruModel& g) {
    return AnglePredictor(
        [g](std::span<const double> h, double, double) {
          return gru_predict(g, h);
        });
  };
  return {wrap_model(model.yaw), wrap_model(model.pitch),
          wrap_model(model.roll)};
}

Viewport predict_viewport(const ViewportPredictor& p,
                          std::span<const TraceSample> history, double dt,
                          double horizon) {
  size_t n = history.size();
  std::vector<double> yaw(n), pitch(n), roll(n);
  for (size_t i = 0; i < n; ++i) {
    yaw[i] = history[i].vp.yaw;
    pitch[i] = history[i].vp.pitch;
    roll[i] = history[i].vp.roll;
  }
  yaw = unwrap_yaw(yaw);
  roll = unwrap_yaw(roll);
  Viewport vp;
  vp.yaw = p.yaw(yaw, dt, horizon);
  vp.pitch = p.pitch(pitch, dt, horizon);
  vp.roll = p.roll(roll, dt, horizon);
  return normalize_viewport(vp);
}

PredictorReport evaluate_predictor(const ViewportPredictor& p,
                                   const std::vector<Trace>& resampled,
                                   const PredictionConfig& cfg) {
  int steps = static_cast<int>(std::lround(cfg.horizon * cfg.sample_rate));
  double dt = 1.0 / cfg.sample_rate;
  std::vector<double> err_yaw, err_pitch, err_roll;
  for (const Trace& t : resampled) {
    int n = static_cast<int>(t.samples.size());
    for (int last = cfg.history - 1; last + steps < n; ++last) {
      std::span<const TraceSample> window(
          t.samples.data() + last - cfg.history + 1,
          static_cast<size_t>(cfg.history));
      Viewport pred = predict_viewport(p, window, dt, cfg.horizon);
      const Viewport& actual = t.samples[last + steps].vp;
      err_yaw.push_back(angular_error(pred.yaw, actual.yaw));
      err_pitch.push_back(angular_error(pred.pitch, actual.pitch));
      err_roll.push_back(angular_error(pred.roll, actual.roll));
    }
  }
  if (err_yaw.empty())
    throw std::runtime_error("evaluate_predictor: no test windows");

  auto summarize = [&](std::vector<double> errs) {
    PredictorReport::PerAngle a;
    int hits = 0;
    double sum = 0;
    for (double e : errs) {
      if (e <= cfg.accuracy_threshold) ++hits;
      sum += e;
    }
    a.accuracy = static_cast<double>(hits) / errs.size();
    a.mae = sum / errs.size();
    std::sort(errs.begin(), errs.end());
    a.sorted_errors = std::move(errs);
    return a;
  };
  PredictorReport rep;
  rep.windows = static_cast<int>(err_yaw.size());
  rep.yaw = summarize(std::move(err_yaw));
  rep.pitch = summarize(std::move(err_pitch));
  rep.roll = summarize(std::move(err_roll));
  return rep;
}

}  // namespace evas
