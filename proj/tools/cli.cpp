// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfkit/eval.hpp"
#include "lfkit/io.hpp"
#include "lfkit/model.hpp"
#include "lfkit/parallel.hpp"
#include "lfkit/pattern.hpp"
#include "lfkit/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lfkit::cli {
namespace {

struct GlobalFlags {
  int threads = 0;
  bool deterministic = false;
  std::string out;
};

void emit_result(json& j, const GlobalFlags& g) {
  if (!g.deterministic) {
    const auto now = std::chrono::system_clock::now();
    j["generated_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                            now.time_since_epoch())
                            .count();
  }
  const std::string text = j.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(g.out);
    if (!out) throw Error("cannot open '" + g.out + "' for writing");
    out << text;
    if (!out) throw Error("I/O failure writing '" + g.out + "'");
  }
}

AngularGrid parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw Error("bad grid '" + text + "' (expected MxN)");
  AngularGrid g;
  g.rows = std::stoi(text.substr(0, x));
  g.cols = std::stoi(text.substr(x + 1));
  if (g.rows < 1 || g.cols < 1) throw Error("bad grid '" + text + "'");
  return g;
}

SamplingPattern parse_pattern_arg(const std::string& text) {
  if (!text.empty() && text[0] == '@') return pattern::load_pattern_file(text.substr(1));
  return parse_pattern(text);
}

json pattern_to_json(const SamplingPattern& p) {
  json coords = json::array();
  for (const AngularCoord& c : p.coords) coords.push_back({c.u, c.v});
  return coords;
}

SceneSpec scene_spec_from_json(const json& j) {
  SceneSpec spec;
  if (j.contains("grid")) {
    spec.grid.rows = j["grid"].at(0).get<int>();
    spec.grid.cols = j["grid"].at(1).get<int>();
  }
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  spec.channels = j.value("channels", spec.channels);
  spec.d_min = j.value("d_min", spec.d_min);
  spec.d_max = j.value("d_max", spec.d_max);
  spec.max_frequency = j.value("max_frequency", spec.max_frequency);
  if (!j.contains("layers")) throw Error("scene spec needs a layers array");
  for (const json& lj : j["layers"]) {
    SceneLayer layer;
    layer.disparity = lj.value("disparity", 0.0);
    layer.texture_waves = lj.value("texture_waves", 8);
    const std::string shape = lj.value("shape", "full");
    if (shape == "full") {
      layer.shape = SceneLayer::Shape::kFull;
    } else if (shape == "rect") {
      layer.shape = SceneLayer::Shape::kRect;
      layer.x0 = lj.at("x0").get<double>();
      layer.y0 = lj.at("y0").get<double>();
      layer.x1 = lj.at("x1").get<double>();
      layer.y1 = lj.at("y1").get<double>();
    } else if (shape == "disk") {
      layer.shape = SceneLayer::Shape::kDisk;
      layer.cx = lj.at("cx").get<double>();
      layer.cy = lj.at("cy").get<double>();
      layer.r = lj.at("r").get<double>();
    } else {
      throw Error("unknown layer shape '" + shape + "'");
    }
    spec.layers.push_back(layer);
  }
  return spec;
}

// The input container either matches the output grid (pattern views are
// extracted) or holds exactly the K pattern views in row-major order.
std::vector<Image> gather_inputs(const LightField& container, const SamplingPattern& pattern,
                                 const AngularGrid& out_grid) {
  std::vector<Image> inputs;
  if (container.grid() == out_grid) {
    for (const AngularCoord& p : pattern.coords) inputs.push_back(container.view(p));
  } else if (container.grid().cells() == pattern.size()) {
    for (int i = 0; i < pattern.size(); ++i)
      inputs.push_back(container.view(container.grid().coord(i)));
  } else {
    throw Error("input container grid matches neither the output grid nor the pattern size");
  }
  return inputs;
}

int cmd_optimize_pattern(const GlobalFlags& g, const std::string& grid_text, int k, int restarts,
                         std::uint64_t seed) {
  const AngularGrid grid = parse_grid(grid_text);
  const SamplingPattern best = pattern::optimize_pattern(grid, k, restarts, seed);
  json j;
  j["grid"] = {{"rows", grid.rows}, {"cols", grid.cols}};
  j["k"] = k;
  j["restarts"] = restarts;
  j["seed"] = seed;
  j["coords"] = pattern_to_json(best);
  j["pattern"] = format_pattern(best);
  j["objective"] = pattern::pattern_objective(best, grid);
  j["min_distance"] = pattern::min_distance_metric(best, grid);
  emit_result(j, g);
  return 0;
}

int cmd_reconstruct(const GlobalFlags& g, const std::string& input_dir,
                    const std::string& pattern_text, const std::string& grid_text,
                    const std::string& model_path, const std::string& out_dir,
                    const std::string& format, const std::string& disparity_dir) {
  const AngularGrid grid = parse_grid(grid_text);
  const SamplingPattern pattern = parse_pattern_arg(pattern_text);
  pattern.validate(grid);
  const LightField container = load_lightfield(input_dir);
  const std::vector<Image> inputs = gather_inputs(container, pattern, grid);
  const LoadedModel model = load_model(model_path);

  LightField recon = reconstruct(inputs, pattern, grid, model.config, model.params);
  ContainerOptions opts;
  opts.format = format == "png8" ? ContainerFormat::kPng8 : ContainerFormat::kPfm;
  opts.disparity_range = {model.config.d_min, model.config.d_max};
  save_lightfield(recon, out_dir, opts);

  if (!disparity_dir.empty()) {
    fs::create_directories(disparity_dir);
    std::vector<Image> luma_inputs;
    for (const Image& img : inputs)
      luma_inputs.push_back(img.channels == 3 ? to_luma(img) : img);
    const TargetSet targets = complement_pattern(grid, pattern);
    for (const AngularCoord& q : targets.coords) {
      const SynthesizedView sv =
          synthesize_view(luma_inputs, pattern, q, model.config, model.params);
      char name[32];
      std::snprintf(name, sizeof(name), "disp_%02d_%02d.pfm", q.u, q.v);
      save_pfm((fs::path(disparity_dir) / name).string(), sv.disparity.map);
    }
  }

  json j;
  j["output"] = out_dir;
  j["grid"] = {{"rows", grid.rows}, {"cols", grid.cols}};
  j["pattern"] = format_pattern(pattern);
  j["synthesized_views"] = grid.cells() - pattern.size();
  emit_result(j, g);
  return 0;
}

int cmd_train(const GlobalFlags& g, const std::vector<std::string>& data_dirs,
              const std::string& out_path, const std::string& config_path,
              const std::string& pattern_text, const std::string& policy, int k, int k_min,
              int k_max, int iters, std::uint64_t seed, const std::string& trace_path, int patch,
              double lr, double lambda1, double lambda2, double lambda3) {
  ModelConfig model_cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw Error("cannot open config '" + config_path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    model_cfg = ModelConfig::from_json(text);
  }

  std::vector<LightField> dataset;
  for (const std::string& dir : data_dirs) {
    LightField lf = load_lightfield(dir);
    dataset.push_back(lf.channels() == 3 ? to_luma(lf) : std::move(lf));
  }
  if (dataset.empty()) throw Error("no training data");

  TrainConfig cfg;
  cfg.patch = patch;
  cfg.lr = lr;
  cfg.max_iterations = iters;
  cfg.seed = seed;
  if (policy == "fixed") {
    if (pattern_text.empty()) throw Error("fixed policy needs --pattern");
    cfg.policy = TrainConfig::Policy::kFixedPattern;
    cfg.fixed_pattern = parse_pattern_arg(pattern_text);
  } else if (policy == "random") {
    cfg.policy = TrainConfig::Policy::kRandomK;
    cfg.k = k;
  } else if (policy == "krange") {
    cfg.policy = TrainConfig::Policy::kRandomKRange;
    cfg.k_min = k_min;
    cfg.k_max = k_max;
  } else {
    throw Error("unknown policy '" + policy + "' (fixed|random|krange)");
  }

  loss::LossWeights weights;
  weights.lambda1 = lambda1;
  weights.lambda2 = lambda2;
  weights.lambda3 = lambda3;

  TrainResult result = train(dataset, model_cfg, cfg, weights);
  save_model(result.params, model_cfg, out_path, seed);
  if (!trace_path.empty()) write_trace_csv(trace_path, result.trace);

  json j;
  j["checkpoint"] = out_path;
  j["iterations"] = static_cast<int>(result.trace.size());
  j["final_loss"] = result.trace.empty() ? 0.0 : result.trace.back().loss;
  j["final_lr"] = result.trace.empty() ? lr : result.trace.back().lr;
  j["seed"] = seed;
  emit_result(j, g);
  return 0;
}

int cmd_evaluate(const GlobalFlags& g, const std::string& recon_dir, const std::string& gt_dir,
                 const std::string& pattern_text, const std::string& csv_path) {
  const LightField recon = load_lightfield(recon_dir);
  const LightField gt = load_lightfield(gt_dir);
  const SamplingPattern pattern = parse_pattern_arg(pattern_text);
  const EvalReport report = evaluate(recon, gt, pattern);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw Error("cannot open '" + csv_path + "' for writing");
    out << report.to_csv();
  }
  json j = json::parse(report.to_json());
  emit_result(j, g);
  return 0;
}

int cmd_synth(const GlobalFlags& g, const std::string& spec_path, const std::string& out_dir,
              std::uint64_t seed, const std::string& format, bool gt_disparity) {
  std::ifstream in(spec_path);
  if (!in) throw Error("cannot open scene spec '" + spec_path + "'");
  json spec_json;
  try {
    in >> spec_json;
  } catch (const json::exception& e) {
    throw Error(std::string("bad scene spec: ") + e.what());
  }
  const SceneSpec spec = scene_spec_from_json(spec_json);
  Rng rng(seed);
  const SyntheticScene scene = make_synthetic_scene(spec, rng);

  ContainerOptions opts;
  opts.format = format == "png8" ? ContainerFormat::kPng8 : ContainerFormat::kPfm;
  opts.disparity_range = {spec.d_min, spec.d_max};
  save_lightfield(scene.light_field(), out_dir, opts);

  if (gt_disparity) {
    for (int u = 1; u <= spec.grid.rows; ++u)
      for (int v = 1; v <= spec.grid.cols; ++v) {
        char name[32];
        std::snprintf(name, sizeof(name), "disp_%02d_%02d.pfm", u, v);
        save_pfm((fs::path(out_dir) / name).string(),
                 scene.ground_truth_disparity({u, v}).map);
      }
  }

  json j;
  j["output"] = out_dir;
  j["grid"] = {{"rows", spec.grid.rows}, {"cols", spec.grid.cols}};
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["layers"] = static_cast<int>(spec.layers.size());
  j["seed"] = seed;
  emit_result(j, g);
  return 0;
}

int cmd_epi(const GlobalFlags& g, const std::string& input_dir, const std::string& orientation,
            int angular, int spatial, const std::string& out_path) {
  const LightField lf = load_lightfield(input_dir);
  const EpiOrientation o =
      orientation == "vertical" ? EpiOrientation::kVertical : EpiOrientation::kHorizontal;
  if (orientation != "vertical" && orientation != "horizontal")
    throw Error("orientation must be horizontal or vertical");
  const Epi epi = extract_epi(lf, o, angular, spatial);
  if (out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".png")
    save_png8(out_path, epi.image);
  else
    save_pfm(out_path, epi.image);

  json j;
  j["output"] = out_path;
  j["orientation"] = orientation;
  j["rows"] = epi.image.height;
  j["cols"] = epi.image.width;
  emit_result(j, g);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"lfkit - dense light field reconstruction toolkit"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--threads", g.threads, "Worker thread count (default: all cores)");
  app.add_flag("--deterministic", g.deterministic,
               "Byte-stable output: ordered reductions, no timestamps");
  app.add_option("--out", g.out, "Write the JSON result here instead of stdout");

  // optimize-pattern
  auto* opt = app.add_subcommand("optimize-pattern", "Optimize a K-view sampling pattern");
  opt->fallthrough();
  std::string opt_grid = "7x7";
  int opt_k = 4, opt_restarts = 5;
  std::uint64_t opt_seed = 0;
  std::string opt_out;
  opt->add_option("--grid", opt_grid, "Angular grid MxN")->required();
  opt->add_option("--k", opt_k, "Number of samples")->required();
  opt->add_option("--restarts", opt_restarts, "Annealing restarts");
  opt->add_option("--seed", opt_seed, "Random seed");
  opt->add_option("--out", opt_out, "Write JSON result here instead of stdout");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct a dense light field");
  rec->fallthrough();
  std::string rec_input, rec_pattern, rec_grid, rec_model, rec_out, rec_disp;
  std::string rec_format = "pfm";
  rec->add_option("--input", rec_input, "Input light field container")->required();
  rec->add_option("--pattern", rec_pattern, "Sampling pattern u,v;u,v;... or @file")->required();
  rec->add_option("--grid", rec_grid, "Output angular grid MxN")->required();
  rec->add_option("--model", rec_model, "Model checkpoint")->required();
  rec->add_option("--out", rec_out, "Output container directory")->required();
  rec->add_option("--format", rec_format, "Output view format: pfm|png8");
  rec->add_option("--disparity-out", rec_disp, "Also write predicted disparity PFMs here");

  // train
  auto* tr = app.add_subcommand("train", "Train the reconstruction model");
  tr->fallthrough();
  std::vector<std::string> tr_data;
  std::string tr_out, tr_config, tr_pattern, tr_policy = "fixed", tr_trace;
  int tr_k = 4, tr_kmin = 2, tr_kmax = 4, tr_iters = 1000, tr_patch = 64;
  std::uint64_t tr_seed = 0;
  double tr_lr = 1e-4, tr_l1 = 1.0, tr_l2 = 0.001, tr_l3 = 1.0;
  tr->add_option("--data", tr_data, "Training container directories")->required();
  tr->add_option("--out", tr_out, "Checkpoint output path")->required();
  tr->add_option("--config", tr_config, "Model config JSON file");
  tr->add_option("--pattern", tr_pattern, "Fixed sampling pattern");
  tr->add_option("--policy", tr_policy, "Sampling policy: fixed|random|krange");
  tr->add_option("--k", tr_k, "K for the random policy");
  tr->add_option("--k-min", tr_kmin, "Minimum K for krange");
  tr->add_option("--k-max", tr_kmax, "Maximum K for krange");
  tr->add_option("--iters", tr_iters, "Training iterations");
  tr->add_option("--seed", tr_seed, "Random seed");
  tr->add_option("--trace", tr_trace, "Loss trace CSV path");
  tr->add_option("--patch", tr_patch, "Training patch size");
  tr->add_option("--lr", tr_lr, "Initial learning rate");
  tr->add_option("--lambda1", tr_l1, "Intermediate loss weight");
  tr->add_option("--lambda2", tr_l2, "Smoothness loss weight");
  tr->add_option("--lambda3", tr_l3, "Refined loss weight");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "PSNR/SSIM over novel views");
  ev->fallthrough();
  std::string ev_recon, ev_gt, ev_pattern, ev_csv;
  ev->add_option("--recon", ev_recon, "Reconstructed container")->required();
  ev->add_option("--gt", ev_gt, "Ground-truth container")->required();
  ev->add_option("--pattern", ev_pattern, "Sampling pattern (views to exclude)")->required();
  ev->add_option("--csv", ev_csv, "Also write per-view CSV here");

  // synth
  auto* sy = app.add_subcommand("synth", "Render a synthetic test scene");
  sy->fallthrough();
  std::string sy_spec, sy_out, sy_format = "pfm";
  std::uint64_t sy_seed = 0;
  bool sy_gt = false;
  sy->add_option("--spec", sy_spec, "Scene spec JSON file")->required();
  sy->add_option("--out", sy_out, "Output container directory")->required();
  sy->add_option("--seed", sy_seed, "Texture seed");
  sy->add_option("--format", sy_format, "Output view format: pfm|png8");
  sy->add_flag("--gt-disparity", sy_gt, "Also write ground-truth disparity PFMs");

  // epi
  auto* ep = app.add_subcommand("epi", "Extract an epipolar-plane image");
  ep->fallthrough();
  std::string ep_input, ep_orient = "horizontal", ep_out;
  int ep_angular = 1, ep_spatial = 0;
  ep->add_option("--input", ep_input, "Light field container")->required();
  ep->add_option("--orientation", ep_orient, "horizontal|vertical");
  ep->add_option("--angular", ep_angular, "Fixed angular index (u0 or v0, 1-based)");
  ep->add_option("--spatial", ep_spatial, "Fixed spatial index (y0 or x0, 0-based)");
  ep->add_option("--out", ep_out, "Output image (.pfm or .png)")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (g.threads > 0) set_thread_count(g.threads);

  try {
    if (opt->parsed()) {
      GlobalFlags go = g;
      go.out = opt_out;
      return cmd_optimize_pattern(go, opt_grid, opt_k, opt_restarts, opt_seed);
    }
    if (rec->parsed())
      return cmd_reconstruct(g, rec_input, rec_pattern, rec_grid, rec_model, rec_out, rec_format,
                             rec_disp);
    if (tr->parsed())
      return cmd_train(g, tr_data, tr_out, tr_config, tr_pattern, tr_policy, tr_k, tr_kmin,
                       tr_kmax, tr_iters, tr_seed, tr_trace, tr_patch, tr_lr, tr_l1, tr_l2,
                       tr_l3);
    if (ev->parsed()) return cmd_evaluate(g, ev_recon, ev_gt, ev_pattern, ev_csv);
    if (sy->parsed()) return cmd_synth(g, sy_spec, sy_out, sy_seed, sy_format, sy_gt);
    if (ep->parsed()) return cmd_epi(g, ep_input, ep_orient, ep_angular, ep_spatial, ep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace lfkit::cli
