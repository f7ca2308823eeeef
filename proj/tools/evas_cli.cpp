#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evas/pipeline.hpp"

namespace {

using namespace evas;

int cmd_reproject(const std::string& in, const std::string& out, double yaw,
                  double pitch, double roll, bool nearest, bool inverse) {
  Frame f = load_ppm(in);
  Viewport vp = normalize_viewport({yaw, pitch, roll});
  Sampling s = nearest ? Sampling::kNearest : Sampling::kBilinear;
  save_ppm(inverse ? inverse_reproject(f, vp, s) : reproject(f, vp, s), out);
  return 0;
}

int cmd_pack(const std::string& in, const std::string& out) {
  VbmFrame vbm = make_vbm(load_ppm(in));
  save_vbm(vbm, out, out + ".meta");
  return 0;
}

int cmd_unpack(const std::string& in, const std::string& prefix) {
  VbmFrame vbm = load_vbm(in, in + ".meta");
  Frame fov, base, margin;
  unpack_vbm(vbm, fov, base, margin);
  save_ppm(fov, prefix + "_fov.ppm");
  save_ppm(base, prefix + "_base.ppm");
  save_ppm(margin, prefix + "_margin.ppm");
  return 0;
}

int cmd_reconstruct(const std::string& in, const std::string& out) {
  save_ppm(reconstruct(load_vbm(in, in + ".meta")), out);
  return 0;
}

int cmd_metrics(const std::string& which, const std::string& a,
                const std::string& b) {
  Frame fa = load_ppm(a), fb = load_ppm(b);
  if (fa.width() != fb.width() || fa.height() != fb.height())
    throw std::runtime_error("metrics: frame dimensions differ");
  std::vector<double> la = to_luma(fa), lb = to_luma(fb);
  double v = which == "psnr" ? psnr(la, lb) : ssim(la, lb, fa.width(), fa.height());
  if (std::isinf(v))
    std::cout << "inf\n";
  else
    std::printf("%.6f\n", v);
  return 0;
}

int cmd_cluster(const std::vector<std::string>& trace_paths, double t,
                const ClusterConfig& ccfg, const std::string& cols,
                bool degrees) {
  std::vector<UserState> users;
  for (const std::string& path : trace_paths) {
    Trace tr = load_trace(path, cols, degrees, path);
    UserState u;
    u.user_id = tr.user_id;
    u.position = viewport_to_point(interpolate_viewport(tr, t));
    u.motion = motion_vector(tr, t, ccfg.motion_dt);
    users.push_back(std::move(u));
  }
  ClusterAssignment a = cluster_users(users, ccfg);
  std::cout << "user_id,label,center_yaw,center_pitch\n";
  for (size_t i = 0; i < users.size(); ++i) {
    std::cout << users[i].user_id << ',' << a.labels[i];
    if (a.labels[i] >= 0) {
      const Viewport& c = a.centers[a.labels[i]];
      std::printf(",%.9f,%.9f\n", c.yaw, c.pitch);
    } else {
      std::cout << ",,\n";
    }
  }
  return 0;
}

struct PredictArgs {
  std::vector<std::string> traces;
  std::string model;
  std::string cols = "t,yaw,pitch,roll";
  bool degrees = false;
  bool use_lr = false;
  bool use_gru = false;
  double horizon = 1.0;
  int history = 30;
  double rate = 30.0;
  double threshold = 0.5235987755982988;
  int hidden = 64;
  int epochs = 40;
  double learning_rate = 0.05;
  int batch = 32;
  unsigned seed = 1;
};

int cmd_predict_train(const PredictArgs& a) {
  PredictionConfig cfg{a.history, a.horizon, a.rate, a.threshold};
  std::vector<Trace> resampled;
  for (const std::string& p : a.traces)
    resampled.push_back(resample_trace(load_trace(p, a.cols, a.degrees, p),
                                       a.rate));
  GruTrainConfig tcfg{a.hidden, a.epochs, a.learning_rate, a.batch, a.seed};
  ViewportModel m = train_viewport_model(resampled, cfg, tcfg);
  save_viewport_model(m, a.model);
  std::cout << "model saved to " << a.model << "\n";
  return 0;
}

int cmd_predict_eval(const PredictArgs& a) {
  PredictionConfig cfg{a.history, a.horizon, a.rate, a.threshold};
  ViewportPredictor pred;
  if (a.use_gru) {
    ViewportModel m = load_viewport_model(a.model);
    cfg = m.config;
    cfg.accuracy_threshold = a.threshold;
    pred = make_gru_predictor(m);
  } else {
    pred = make_lr_predictor();
  }
  std::vector<Trace> resampled;
  for (const std::string& p : a.traces)
    resampled.push_back(
        resample_trace(load_trace(p, a.cols, a.degrees, p), cfg.sample_rate));
  PredictorReport rep = evaluate_predictor(pred, resampled, cfg);
  std::printf("windows %d\n", rep.windows);
  auto print_angle = [](const char* name,
                        const PredictorReport::PerAngle& pa) {
    std::printf("%s accuracy %.4f mae %.6f\n", name, pa.accuracy, pa.mae);
  };
  print_angle("yaw", rep.yaw);
  print_angle("pitch", rep.pitch);
  print_angle("roll", rep.roll);
  return 0;
}

int cmd_simulate(const std::string& config_path) {
  SimConfig cfg = load_sim_config(config_path);
  SimResult res = run_simulation(cfg);
  std::vector<VariantResult> variants;
  if (cfg.compare_variants) variants = compare_clustering_variants(cfg);
  if (!cfg.output_dir.empty())
    write_sim_outputs(cfg, res, cfg.compare_variants ? &variants : nullptr);
  std::printf("users %d ticks %d mean_clusters %.3f mean_noise %.3f\n",
              res.users, res.summary.ticks, res.mean_clusters, res.mean_noise);
  for (const auto& [scheme, bytes] : res.summary.total_bytes)
    std::printf("total_bytes_%s %lld\n", scheme_name(scheme).c_str(), bytes);
  for (const auto& [pair, sv] : res.summary.savings)
    std::printf("savings_%s_vs_%s %.4f\n", scheme_name(pair.first).c_str(),
                scheme_name(pair.second).c_str(), sv);
  if (cfg.evaluate_quality)
    std::printf("mean_fov_mse %.6f\n", res.mean_fov_mse);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EVAS-OV omnidirectional video toolkit"};
  app.require_subcommand(1);

  // reproject
  std::string in_path, out_path;
  double yaw = 0, pitch = 0, roll = 0;
  bool nearest = false, inverse = false;
  CLI::App* rp = app.add_subcommand("reproject", "recenter a viewport");
  rp->add_option("input", in_path)->required();
  rp->add_option("output", out_path)->required();
  rp->add_option("--yaw", yaw);
  rp->add_option("--pitch", pitch);
  rp->add_option("--roll", roll);
  rp->add_flag("--nearest", nearest);
  rp->add_flag("--inverse", inverse);

  // pack / unpack / reconstruct
  std::string vbm_in, vbm_out;
  CLI::App* pk = app.add_subcommand("pack", "generate a VBM frame");
  pk->add_option("input", vbm_in)->required();
  pk->add_option("output", vbm_out)->required();
  std::string up_in, up_prefix;
  CLI::App* up = app.add_subcommand("unpack", "split a VBM frame");
  up->add_option("input", up_in)->required();
  up->add_option("prefix", up_prefix)->required();
  std::string rc_in, rc_out;
  CLI::App* rc = app.add_subcommand("reconstruct", "rebuild a full frame");
  rc->add_option("input", rc_in)->required();
  rc->add_option("output", rc_out)->required();

  // predict
  PredictArgs pa;
  CLI::App* pr = app.add_subcommand("predict", "viewport prediction");
  pr->require_subcommand(1);
  for (CLI::App* sub : {pr->add_subcommand("train", "train a GRU model"),
                        pr->add_subcommand("eval", "evaluate a predictor")}) {
    sub->add_option("--traces", pa.traces)->required();
    sub->add_option("--model", pa.model);
    sub->add_option("--cols", pa.cols);
    sub->add_flag("--degrees", pa.degrees);
    sub->add_flag("--lr", pa.use_lr);
    sub->add_flag("--gru", pa.use_gru);
    sub->add_option("--horizon", pa.horizon);
    sub->add_option("--history", pa.history);
    sub->add_option("--rate", pa.rate);
    sub->add_option("--threshold", pa.threshold);
    sub->add_option("--hidden", pa.hidden);
    sub->add_option("--epochs", pa.epochs);
    sub->add_option("--learning-rate", pa.learning_rate);
    sub->add_option("--batch", pa.batch);
    sub->add_option("--seed", pa.seed);
  }

  // cluster
  std::vector<std::string> cl_traces;
  double cl_t = 0;
  ClusterConfig ccfg;
  std::string cl_cols = "t,yaw,pitch,roll";
  bool cl_degrees = false;
  CLI::App* cl = app.add_subcommand("cluster", "cluster users at a timestamp");
  cl->add_option("--traces", cl_traces)->required();
  cl->add_option("--t", cl_t)->required();
  cl->add_option("--eps", ccfg.eps);
  cl->add_option("--minpts", ccfg.min_pts);
  cl->add_option("--omega", ccfg.omega);
  cl->add_option("--motion-dt", ccfg.motion_dt);
  cl->add_option("--cols", cl_cols);
  cl->add_flag("--degrees", cl_degrees);

  // metrics
  std::string m_a, m_b;
  CLI::App* mt = app.add_subcommand("metrics", "image quality metrics");
  mt->require_subcommand(1);
  for (const char* name : {"psnr", "ssim"}) {
    CLI::App* sub = mt->add_subcommand(name, name);
    sub->add_option("a", m_a)->required();
    sub->add_option("b", m_b)->required();
  }

  // simulate
  std::string sim_config;
  CLI::App* sm = app.add_subcommand("simulate", "trace-driven simulation");
  sm->add_option("--config", sim_config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (rp->parsed())
      return cmd_reproject(in_path, out_path, yaw, pitch, roll, nearest,
                           inverse);
    if (pk->parsed()) return cmd_pack(vbm_in, vbm_out);
    if (up->parsed()) return cmd_unpack(up_in, up_prefix);
    if (rc->parsed()) return cmd_reconstruct(rc_in, rc_out);
    if (pr->parsed()) {
      if (pa.use_lr && pa.use_gru)
        throw CLI::ValidationError("--lr and --gru are mutually exclusive");
      if (pr->get_subcommand("train")->parsed()) {
        if (pa.use_lr)
          throw CLI::ValidationError("--lr has no training step");
        if (pa.model.empty())
          throw CLI::ValidationError("train requires --model");
        return cmd_predict_train(pa);
      }
      if (pa.use_gru && pa.model.empty())
        throw CLI::ValidationError("eval --gru requires --model");
      return cmd_predict_eval(pa);
    }
    if (cl->parsed())
      return cmd_cluster(cl_traces, cl_t, ccfg, cl_cols, cl_degrees);
    if (mt->parsed()) {
      const char* which =
          mt->get_subcommand("psnr")->parsed() ? "psnr" : "ssim";
      return cmd_metrics(which, m_a, m_b);
    }
    if (sm->parsed()) return cmd_simulate(sim_config);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
