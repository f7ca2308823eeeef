#include "evas/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evas {

namespace fs = std::filesystem;

namespace {

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: expected boolean, got '" + v + "'");
}

Scheme parse_scheme(const std::string& v) {
  if (v == "evas") return Scheme::kEvas;
  if (v == "nonviewport") return Scheme::kNonViewport;
  if (v == "twolayer") return Scheme::kTwoLayer;
  throw std::runtime_error("config: unknown scheme '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

long long cost_or_proxy(const std::map<std::string, long long>& table,
                        const std::string& id, long long proxy) {
  auto it = table.find(id);
  return it != table.end() ? it->second : proxy;
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string frame_id(int index_1based) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d", index_1based);
  return buf;
}

std::vector<std::string> list_frames(const std::string& frames_dir) {
  std::vector<std::string> out;
  for (int i = 1;; ++i) {
    fs::path p = fs::path(frames_dir) / (frame_id(i) + ".ppm");
    if (!fs::exists(p)) break;
    out.push_back(p.string());
  }
  if (out.empty())
    throw std::runtime_error("no frame_%06d.ppm files in '" + frames_dir + "'");
  return out;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  bool schemes_set = false;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    if (key == "frames_dir")
      cfg.frames_dir = val;
    else if (key == "trace")
      cfg.trace_paths.push_back(val);
    else if (key == "trace_cols")
      cfg.trace_cols = val;
    else if (key == "trace_degrees")
      cfg.trace_degrees = parse_bool(val);
    else if (key == "tick_rate")
      cfg.tick_rate = std::stod(val);
    else if (key == "history")
      cfg.prediction.history = std::stoi(val);
    else if (key == "horizon")
      cfg.prediction.horizon = std::stod(val);
    else if (key == "threshold")
      cfg.prediction.accuracy_threshold = std::stod(val);
    else if (key == "eps")
      cfg.clustering.eps = std::stod(val);
    else if (key == "minpts")
      cfg.clustering.min_pts = std::stoi(val);
    else if (key == "omega")
      cfg.clustering.omega = std::stod(val);
    else if (key == "motion_dt")
      cfg.clustering.motion_dt = std::stod(val);
    else if (key == "schemes") {
      cfg.schemes.clear();
      for (const std::string& s : split(val, ','))
        cfg.schemes.push_back(parse_scheme(s));
      schemes_set = true;
    } else if (key == "sampling") {
      if (val == "nearest")
        cfg.sampling = Sampling::kNearest;
      else if (val == "bilinear")
        cfg.sampling = Sampling::kBilinear;
      else
        throw std::runtime_error("config: unknown sampling '" + val + "'");
    } else if (key == "predictor")
      cfg.predictor = val;
    else if (key == "model")
      cfg.model_path = val;
    else if (key == "output_dir")
      cfg.output_dir = val;
    else if (key == "seed")
      cfg.seed = static_cast<unsigned>(std::stoul(val));
    else if (key == "quality")
      cfg.evaluate_quality = parse_bool(val);
    else if (key == "max_ticks")
      cfg.max_ticks = std::stoi(val);
    else if (key == "encoded_sizes")
      cfg.encoded_sizes_path = val;
    else if (key == "compare_variants")
      cfg.compare_variants = parse_bool(val);
    else
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
  }
  if (cfg.frames_dir.empty() || cfg.trace_paths.empty())
    throw std::runtime_error("config: frames_dir and at least one trace required");
  if (cfg.schemes.empty() && schemes_set)
    throw std::runtime_error("config: at least one scheme required");
  return cfg;
}

std::string grouping_name(GroupingMode m) {
  switch (m) {
    case GroupingMode::kJoint:
      return "joint";
    case GroupingMode::kPositionOnly:
      return "position_only";
    case GroupingMode::kAllInOne:
      return "all_in_one";
  }
  return "?";
}

double fov_quality_loss(const Viewport& user_vp, const Viewport& cluster_vp,
                        const Frame& gt_frame, const VbmFrame& vbm,
                        Sampling sampling) {
  const VbmLayout& layout = vbm.layout;
  Frame gt_fov =
      crop(reproject(gt_frame, user_vp, sampling), layout.fov_src);
  Frame recon = reconstruct(vbm);
  // recon holds content at direction Wc*d; the user's view needs Wu*d.
  Rot3 rel = rotation_from_viewport(cluster_vp).transposed() *
             rotation_from_viewport(user_vp);
  Frame user_view = crop(reproject_with(recon, rel, sampling), layout.fov_src);
  return mse(to_luma(gt_fov), to_luma(user_view));
}

SimResult run_simulation(const SimConfig& cfg, GroupingMode mode) {
  std::vector<std::string> frame_files = list_frames(cfg.frames_dir);
  int frame_count = static_cast<int>(frame_files.size());

  std::vector<Trace> traces;
  for (const std::string& path : cfg.trace_paths) {
    Trace t = load_trace(path, cfg.trace_cols, cfg.trace_degrees,
                         fs::path(path).stem().string());
    traces.push_back(resample_trace(t, cfg.tick_rate));
  }
  int users = static_cast<int>(traces.size());

  PredictionConfig pcfg = cfg.prediction;
  pcfg.sample_rate = cfg.tick_rate;
  int hist = pcfg.history;
  int steps = static_cast<int>(std::lround(pcfg.horizon * cfg.tick_rate));
  if (steps < 1) throw std::runtime_error("horizon shorter than one tick");

  int min_len = frame_count;
  for (const Trace& t : traces)
    min_len = std::min(min_len, static_cast<int>(t.samples.size()));
  int first_tick = hist - 1;
  int last_tick = min_len - 1 - steps;
  if (last_tick < first_tick)
    throw std::runtime_error(
        "traces/frames too short for the configured history and horizon");
  if (cfg.max_ticks > 0)
    last_tick = std::min(last_tick, first_tick + cfg.max_ticks - 1);

  ViewportPredictor predictor;
  bool perfect = cfg.predictor == "perfect";
  ViewportModel model;
  if (cfg.predictor == "lr") {
    predictor = make_lr_predictor();
  } else if (cfg.predictor == "gru") {
    if (cfg.model_path.empty())
      throw std::runtime_error("gru predictor requires model=");
    model = load_viewport_model(cfg.model_path);
    predictor = make_gru_predictor(model);
  } else if (!perfect) {
    throw std::runtime_error("unknown predictor '" + cfg.predictor + "'");
  }

  std::map<std::string, long long> sizes;
  if (!cfg.encoded_sizes_path.empty())
    sizes = load_encoded_sizes(cfg.encoded_sizes_path);

  auto has_scheme = [&](Scheme s) {
    return std::find(cfg.schemes.begin(), cfg.schemes.end(), s) !=
           cfg.schemes.end();
  };

  SimResult res;
  res.users = users;
  double dt = 1.0 / cfg.tick_rate;
  double sum_k = 0, sum_noise = 0, sum_mse = 0;
  long long mse_count = 0;
  std::string variant = grouping_name(mode);

  for (int tick = first_tick; tick <= last_tick; ++tick) {
    int target = tick + steps;
    // 1. Predicted viewport per user.
    std::vector<Viewport> predicted(users), actual(users);
    std::vector<UserState> states(users);
    for (int u = 0; u < users; ++u) {
      const Trace& t = traces[u];
      actual[u] = t.samples[target].vp;
      if (perfect) {
        predicted[u] = actual[u];
      } else {
        std::span<const TraceSample> window(
            t.samples.data() + tick - hist + 1, static_cast<size_t>(hist));
        predicted[u] = predict_viewport(predictor, window, dt, pcfg.horizon);
      }
      states[u].user_id = t.user_id;
      states[u].position = viewport_to_point(predicted[u]);
      states[u].motion =
          motion_vector(t, t.samples[tick].t,
                        std::max(cfg.clustering.motion_dt, dt));
    }

    // 2. Group users.
    ClusterAssignment assignment;
    if (mode == GroupingMode::kAllInOne) {
      assignment.labels.assign(users, 0);
      assignment.centers = cluster_centers(assignment.labels, states);
      assignment.cluster_count = 1;
    } else {
      ClusterConfig ccfg = cfg.clustering;
      if (mode == GroupingMode::kPositionOnly) ccfg.omega = 1.0;
      assignment = cluster_users(states, ccfg);
    }
    int noise = static_cast<int>(
        std::count(assignment.labels.begin(), assignment.labels.end(), kNoise));
    res.ticks.push_back({tick, assignment.cluster_count, noise});
    sum_k += assignment.cluster_count;
    sum_noise += noise;

    // 3. One VBM per cluster plus one per noise user.
    Frame frame = load_ppm(frame_files[target]);
    res.frame_w = frame.width();
    res.frame_h = frame.height();
    std::string fid = frame_id(target + 1);
    long long full_bytes = cost_or_proxy(sizes, fid, 3LL * frame.pixel_count());

    std::vector<VbmFrame> cluster_vbm;
    std::vector<Viewport> tx_center;  // per transmission
    std::vector<int> user_tx(users);  // transmission index per user
    for (int c = 0; c < assignment.cluster_count; ++c) {
      cluster_vbm.push_back(
          make_vbm(reproject(frame, assignment.centers[c], cfg.sampling)));
      tx_center.push_back(assignment.centers[c]);
    }
    for (int u = 0; u < users; ++u) {
      if (assignment.labels[u] != kNoise) {
        user_tx[u] = assignment.labels[u];
        continue;
      }
      user_tx[u] = static_cast<int>(cluster_vbm.size());
      cluster_vbm.push_back(
          make_vbm(reproject(frame, predicted[u], cfg.sampling)));
      tx_center.push_back(predicted[u]);
    }

    // 4. Bandwidth accounting.
    if (has_scheme(Scheme::kEvas)) {
      long long bytes = 0;
      for (const VbmFrame& v : cluster_vbm)
        bytes += cost_or_proxy(sizes, fid + ":vbm",
                               3LL * v.packed.pixel_count());
      res.bandwidth.push_back({Scheme::kEvas, tick, bytes, users,
                               static_cast<int>(cluster_vbm.size())});
    }
    if (has_scheme(Scheme::kNonViewport)) {
      res.bandwidth.push_back(
          {Scheme::kNonViewport, tick, users * full_bytes, users, users});
    }
    if (has_scheme(Scheme::kTwoLayer)) {
      long long base = cost_or_proxy(sizes, fid + ":base",
                                     3LL * frame.pixel_count() / 16);
      long long enh = cost_or_proxy(
          sizes, fid + ":enh",
          3LL * (frame.width() / 3) * (frame.height() / 2));
      res.bandwidth.push_back(
          {Scheme::kTwoLayer, tick, users * (base + enh), users, users});
    }

    // 5. Per-user FOV quality against the actual viewport.
    if (cfg.evaluate_quality) {
      for (int u = 0; u < users; ++u) {
        double loss =
            fov_quality_loss(actual[u], tx_center[user_tx[u]], frame,
                             cluster_vbm[user_tx[u]], cfg.sampling);
        res.quality.push_back({tick, traces[u].user_id, variant, loss});
        sum_mse += loss;
        ++mse_count;
      }
    }
  }

  int tick_count = last_tick - first_tick + 1;
  res.mean_clusters = sum_k / tick_count;
  res.mean_noise = sum_noise / tick_count;
  res.mean_fov_mse = mse_count ? sum_mse / mse_count : 0.0;
  res.summary = bandwidth_summary(res.bandwidth);
  return res;
}

std::vector<VariantResult> compare_clustering_variants(const SimConfig& cfg) {
  std::vector<VariantResult> out;
  for (GroupingMode m : {GroupingMode::kAllInOne, GroupingMode::kPositionOnly,
                         GroupingMode::kJoint}) {
    SimConfig c = cfg;
    c.evaluate_quality = true;
    SimResult r = run_simulation(c, m);
    out.push_back({grouping_name(m), r.mean_fov_mse});
  }
  return out;
}

void write_sim_outputs(const SimConfig& cfg, const SimResult& result,
                       const std::vector<VariantResult>* variants) {
  fs::create_directories(cfg.output_dir);
  {
    std::ofstream out(fs::path(cfg.output_dir) / "bandwidth.csv");
    out << "tick,scheme,bytes,transmissions\n";
    for (const BandwidthRecord& r : result.bandwidth)
      out << r.tick << ',' << scheme_name(r.scheme) << ',' << r.bytes << ','
          << r.transmissions << '\n';
  }
  {
    std::ofstream out(fs::path(cfg.output_dir) / "quality.csv");
    out << "tick,user,scheme_variant,fov_mse\n";
    for (const QualityRecord& r : result.quality)
      out << r.tick << ',' << r.user << ',' << r.variant << ','
          << csv_double(r.fov_mse) << '\n';
  }
  {
    std::ofstream out(fs::path(cfg.output_dir) / "summary.txt");
    out << "users " << result.users << '\n';
    out << "ticks " << result.summary.ticks << '\n';
    out << "frame " << result.frame_w << 'x' << result.frame_h << '\n';
    out << "mean_clusters " << csv_double(result.mean_clusters) << '\n';
    out << "mean_noise " << csv_double(result.mean_noise) << '\n';
    for (const auto& [scheme, bytes] : result.summary.total_bytes)
      out << "total_bytes_" << scheme_name(scheme) << ' ' << bytes << '\n';
    for (const auto& [pair, sv] : result.summary.savings)
      out << "savings_" << scheme_name(pair.first) << "_vs_"
          << scheme_name(pair.second) << ' ' << csv_double(sv) << '\n';
    out << "mean_fov_mse " << csv_double(result.mean_fov_mse) << '\n';
    if (variants)
      for (const VariantResult& v : *variants)
        out << "variant_mean_fov_mse_" << v.variant << ' '
            << csv_double(v.mean_fov_mse) << '\n';
  }
}

}  // namespace evas
