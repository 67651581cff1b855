#include "skeleform/cli.hpp"

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "skeleform/completion.hpp"
#include "skeleform/factor_model.hpp"
#include "skeleform/json_util.hpp"
#include "skeleform/losses.hpp"
#include "skeleform/pose_io.hpp"
#include "skeleform/rng.hpp"
#include "skeleform/service.hpp"
#include "skeleform/synth.hpp"
#include "skeleform/tensor.hpp"
#include "skeleform/training.hpp"

namespace skeleform {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kUsage = 1;
constexpr int kData = 2;

json read_json(const fs::path& path) { return parse_json(read_file(path), path.string()); }

void emit(const std::optional<fs::path>& out, const std::string& text) {
  if (out) {
    write_file(*out, text);
  } else {
    std::fwrite(text.data(), 1, text.size(), stdout);
  }
}

struct TrainArgs {
  std::optional<fs::path> data;
  std::size_t synth = 0;
  fs::path out;
  std::optional<fs::path> log;
  TrainConfig tc;
  std::string optimizer = "adam";
};

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  auto* data = cmd->add_option("--data", a.data, "Directory of pose files (canonical or OpenPose)");
  cmd->add_option("--synth", a.synth, "Train on N synthetic poses instead of --data")->excludes(data);
  cmd->add_option("--out", a.out, "Model file to write")->required();
  cmd->add_option("--log", a.log, "Write per-iteration loss, one value per line");
  cmd->add_option("--iterations", a.tc.iterations)->capture_default_str();
  cmd->add_option("--batch-size", a.tc.batch_size)->capture_default_str();
  cmd->add_option("--lr", a.tc.optimizer.learning_rate)->capture_default_str();
  cmd->add_option("--optimizer", a.optimizer)->check(CLI::IsMember({"adam", "sgd"}))->capture_default_str();
}

std::vector<KeypointSet> training_set(const TrainArgs& a, std::uint64_t seed, double threshold, int verbosity) {
  if (a.synth > 0) return synth_dataset(a.synth, seed);
  if (!a.data) throw Error(ErrorCode::invalid_argument, "one of --data or --synth is required");
  Dataset ds = load_dataset(*a.data, threshold);
  for (const auto& w : ds.warnings)
    if (verbosity > 0) std::cerr << "warning: " << w.file.string() << ": " << w.message << '\n';
  return std::move(ds.poses);
}

void finish_training(const TrainArgs& a, const TrainResult& r) {
  write_file(a.out, save_model(r.model));
  if (a.log) {
    std::string text;
    char buf[32];
    for (double v : r.loss_history) {
      std::snprintf(buf, sizeof buf, "%.9g\n", v);
      text += buf;
    }
    write_file(*a.log, text);
  }
  const LossTrend t = loss_trend(r.loss_history);
  std::cerr << "loss " << t.initial << " -> " << t.final << '\n';
}

std::vector<std::size_t> parse_layers(const std::string& spec) {
  std::vector<std::size_t> sizes;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    const std::string item = spec.substr(pos, comma - pos);
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw Error(ErrorCode::invalid_argument, "bad layer size '" + item + "'", "--layers");
    sizes.push_back(v);
    pos = comma + 1;
  }
  return sizes;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Skeleton deformation toolkit", "skeleform"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "skeleform 0.1.0");

  std::uint64_t seed = 0;
  AppConfig config;
  app.add_option("--seed", seed, "Seed for every random draw")->envname("SKELEFORM_SEED")->capture_default_str();
  app.add_option("--confidence-threshold", config.confidence_threshold,
                 "OpenPose keypoints with confidence above this are visible")
      ->envname("SKELEFORM_CONFIDENCE_THRESHOLD")
      ->capture_default_str();
  app.add_flag("-v,--verbose", config.verbosity, "More logging on stderr");

  const auto model_options = [&config](CLI::App* cmd, bool factor, bool completion) {
    if (factor) cmd->add_option("--factor-model", config.factor_model)->envname("SKELEFORM_FACTOR_MODEL");
    if (completion)
      cmd->add_option("--completion-model", config.completion_model)->envname("SKELEFORM_COMPLETION_MODEL");
  };

  std::optional<fs::path> out;

  auto* synth = app.add_subcommand("synth", "Write synthetic fully visible poses");
  std::size_t synth_n = 100;
  fs::path synth_dir;
  synth->add_option("--n", synth_n)->capture_default_str();
  synth->add_option("--out", synth_dir, "Output directory")->required();

  TrainArgs factor_args;
  auto* train_factors = app.add_subcommand("train-factors", "Train the body-ratio factor model");
  add_train_options(train_factors, factor_args);
  train_factors->add_option("--scale-lo", config.scale_lo)->envname("SKELEFORM_SCALE_LO")->capture_default_str();
  train_factors->add_option("--scale-hi", config.scale_hi)->envname("SKELEFORM_SCALE_HI")->capture_default_str();

  TrainArgs completion_args;
  auto* train_completion = app.add_subcommand("train-completion", "Train the pose completion model");
  add_train_options(train_completion, completion_args);
  train_completion->add_option("--mask-prob", completion_args.tc.mask_prob)->capture_default_str();

  fs::path pose_path;
  auto* complete = app.add_subcommand("complete", "Fill invisible joints");
  complete->add_option("--pose", pose_path)->required();
  complete->add_option("--out", out);
  model_options(complete, false, true);

  auto* factors = app.add_subcommand("factors", "Predict the six group factors of a pose");
  factors->add_option("--pose", pose_path)->required();
  factors->add_option("--out", out);
  model_options(factors, true, false);

  auto* deform = app.add_subcommand("deform", "Retarget a person pose to an art pose's body ratio");
  fs::path person_path;
  std::optional<fs::path> art_path;
  std::vector<double> tau_a;
  bool naive = false;
  deform->add_option("--person", person_path)->required();
  deform->add_option("--art", art_path);
  deform->add_option("--tau-a", tau_a, "Six explicit art factors")->expected(kNumGroups);
  deform->add_flag("--naive", naive, "Copy the art pose's segment lengths instead");
  deform->add_option("--out", out);
  model_options(deform, true, true);

  auto* render = app.add_subcommand("render", "Draw poses as SVG");
  std::vector<fs::path> render_paths;
  std::optional<double> width, height;
  render->add_option("--pose", render_paths, "Pose files; every pose is drawn")->required();
  render->add_option("--width", width);
  render->add_option("--height", height);
  render->add_option("--out", out);

  auto* gradcheck = app.add_subcommand("gradcheck", "Compare backprop with finite differences");
  std::string layers = "54,32,32,6";
  double eps = 1e-6;
  std::string activation = "relu";
  gradcheck->add_option("--layers", layers)->capture_default_str();
  gradcheck->add_option("--eps", eps)->capture_default_str();
  gradcheck->add_option("--activation", activation)->check(CLI::IsMember({"relu", "tanh"}))->capture_default_str();

  auto* loss = app.add_subcommand("loss", "Evaluate the stylization loss terms on two tensors");
  fs::path loss_a, loss_b;
  std::size_t levels = 3;
  std::size_t embed_dim = 64;
  LossWeights weights;
  loss->add_option("--a", loss_a, "Generated image tensor")->required();
  loss->add_option("--b", loss_b, "Target image tensor")->required();
  loss->add_option("--levels", levels, "Feature pyramid depth for the style term")->capture_default_str();
  loss->add_option("--embed-dim", embed_dim)->capture_default_str();
  loss->add_option("--lambda-l1", weights.l1)->capture_default_str();
  loss->add_option("--lambda-face", weights.face)->capture_default_str();
  loss->add_option("--lambda-r", weights.r)->capture_default_str();

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--bind", config.bind)->envname("SKELEFORM_BIND")->capture_default_str();
  serve_cmd->add_option("--port", config.port)->envname("SKELEFORM_PORT")->capture_default_str();
  serve_cmd->add_option("--static-dir", config.static_dir, "Directory mounted at /")->envname("SKELEFORM_STATIC_DIR");
  model_options(serve_cmd, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    const auto service = [&config] { return Service::from_config(config); };

    if (synth->parsed()) {
      const auto poses = synth_dataset(synth_n, seed);
      fs::create_directories(synth_dir);
      char name[32];
      for (std::size_t i = 0; i < poses.size(); ++i) {
        std::snprintf(name, sizeof name, "pose_%05zu.json", i);
        write_file(synth_dir / name, write_pose(PoseDocument{{poses[i]}, "synth", {}}));
      }
    } else if (train_factors->parsed() || train_completion->parsed()) {
      const bool is_factor = train_factors->parsed();
      TrainArgs& a = is_factor ? factor_args : completion_args;
      a.tc.seed = seed;
      a.tc.optimizer.kind = a.optimizer == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam;
      a.tc.scale_lo = config.scale_lo;
      a.tc.scale_hi = config.scale_hi;
      validate(a.tc);
      const auto data = training_set(a, seed, config.confidence_threshold, config.verbosity);
      finish_training(a, is_factor ? train_factor_model(data, a.tc, default_factor_config(seed))
                                   : train_completion_model(data, a.tc, default_completion_config(seed)));
    } else if (complete->parsed()) {
      emit(out, service().complete(read_json(pose_path)).dump() + "\n");
    } else if (factors->parsed()) {
      emit(out, service().factors(read_json(pose_path)).dump() + "\n");
    } else if (deform->parsed()) {
      json request;
      request["person"] = read_json(person_path);
      if (art_path) request["art"] = read_json(*art_path);
      if (!tau_a.empty()) request["tau_a"] = tau_a;
      request["naive"] = naive;
      emit(out, service().deform(request).dump() + "\n");
    } else if (render->parsed()) {
      PoseDocument doc;
      for (const auto& p : render_paths) {
        PoseDocument d = parse_any(read_file(p), config.confidence_threshold);
        if (!doc.image_size) doc.image_size = d.image_size;
        doc.poses.insert(doc.poses.end(), d.poses.begin(), d.poses.end());
      }
      json request = pose_document_to_json(doc);
      if (width || height) {
        const auto size = doc.image_size.value_or(std::pair{512.0, 512.0});
        request["canvas"] = {width.value_or(size.first), height.value_or(size.second)};
      }
      emit(out, service().render(request));
    } else if (gradcheck->parsed()) {
      MlpConfig mc{parse_layers(layers), activation == "tanh" ? Activation::tanh : Activation::relu, seed};
      const MlpModel m = mlp_init(mc);
      Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
      std::vector<double> input(m.input_size());
      for (double& v : input) v = rng.uniform(-1.0, 1.0);
      const double err = grad_check(m, input, eps);
      std::printf("max relative error %.3e\n", err);
      return err < 1e-4 ? 0 : kData;
    } else if (loss->parsed()) {
      const ImageTensor a = load_tensor(loss_a);
      const ImageTensor b = load_tensor(loss_b);
      if (!a.same_shape(b)) throw Error(ErrorCode::shape, "tensors differ in shape", "--b");
      const double l1 = l1_loss(a, b).value;
      const double style = style_loss(toy_features(a, levels, seed), toy_features(b, levels, seed)).value;
      const double face = embedding_l1(ChannelMeanEmbedder{}, a, b);
      const RandomProjectionEmbedder lpips(a.channels(), a.height(), a.width(), embed_dim, seed);
      const double perceptual = embedding_l1(lpips, a, b);
      nlohmann::ordered_json result;
      result["l1"] = l1;
      result["face"] = face;
      result["style"] = style;
      result["lpips"] = perceptual;
      result["total"] = total_objective(l1, face, style + perceptual, weights);
      std::cout << result.dump(2) << '\n';
    } else if (serve_cmd->parsed()) {
      if (!serve(config)) throw Error(ErrorCode::io, "could not listen on " + config.bind + ":" + std::to_string(config.port));
    }
    return 0;
  } catch (const Error& e) {
    const ApiError err = ApiError::from(e);
    std::cerr << "error[" << to_string(err.code) << "]: " << err.message;
    if (!err.path.empty()) std::cerr << " (at " << err.path << ")";
    std::cerr << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace skeleform
