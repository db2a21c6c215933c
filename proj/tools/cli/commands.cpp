#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include "curve.hpp"
#include "errors.hpp"
#include "run_config.hpp"
#include "sample_archive.hpp"
#include "srlab/checkpoint.hpp"
#include "srlab/eval.hpp"
#include "srlab/filters.hpp"
#include "srlab/image_io.hpp"
#include "srlab/train.hpp"

namespace srlab::cli {
namespace {

std::vector<std::uint8_t> as_bytes(const std::string& s) { return {s.begin(), s.end()}; }

void require_parent_dir(const std::filesystem::path& p) {
  const auto parent = p.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError("output directory '" + parent.string() + "' does not exist");
  }
}

std::vector<std::filesystem::path> require_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  auto paths = list_images(dir);
  if (paths.empty()) throw DataError("no images in '" + dir.string() + "'");
  return paths;
}

bool supported_output(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

std::vector<int> unit_widths(const std::string& layers) {
  const auto n = static_cast<std::size_t>(std::count(layers.begin(), layers.end(), '-'));
  return std::vector<int>(n, 1);
}

// ---- prepare ---------------------------------------------------------------

struct PrepareArgs {
  std::filesystem::path hr_dir;
  std::filesystem::path out;
  int scale = 3;
  int f_sub = 33;
  int stride = 14;
  std::string mode = "bicubic";
  std::string layers = "9-1-5";
  std::string strategy = "y";
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
  const Strategy strategy = parse_strategy(a.strategy);
  const StrategyPlan plan = plan_strategy(strategy);
  const NetworkConfig net = NetworkConfig::from_notation(a.layers, unit_widths(a.layers), plan.channels);
  TrainConfig cfg;
  cfg.scale = a.scale;
  cfg.f_sub = a.f_sub;
  cfg.stride = a.stride;
  cfg.degrade = parse_degrade_mode(a.mode);
  cfg.learning_rates.clear();
  (void)cfg.resolved(net);
  require_parent_dir(a.out);
  const auto paths = require_images(a.hr_dir);

  std::vector<Tensor> images;
  for (const auto& p : paths) images.push_back(to_float(load_image(p)));
  images = strategy_images(strategy, images);

  std::vector<TrainSample> samples;
  std::ostringstream manifest;
  manifest << "# srlab sample archive manifest\n";
  manifest << "scale=" << a.scale << "\nf_sub=" << a.f_sub << "\nstride=" << a.stride << "\ndegrade=" << a.mode
           << "\nlayers=" << a.layers << "\nstrategy=" << a.strategy << '\n';
  std::ostringstream rows;
  for (std::size_t i = 0; i < images.size(); ++i) {
    auto part = extract_subimages({images[i]}, cfg, net, [&](const std::string& w) {
      err << "warning: " << paths[i].filename().string() << ": " << w << '\n';
    });
    rows << paths[i].filename().string() << '\t' << images[i].width() << 'x' << images[i].height() << '\t'
         << part.size() << '\n';
    std::move(part.begin(), part.end(), std::back_inserter(samples));
  }
  if (samples.empty()) throw DataError("no image in '" + a.hr_dir.string() + "' is large enough for f_sub");
  manifest << "count=" << samples.size() << "\n# image\tsize\tsamples\n" << rows.str();

  write_archive(a.out, samples);
  std::filesystem::path manifest_path = a.out;
  manifest_path += ".manifest";
  write_file_atomic(manifest_path, as_bytes(manifest.str()));
  out << "wrote " << samples.size() << " samples (" << plan.channels << " channel"
      << (plan.channels > 1 ? "s" : "") << ", " << a.f_sub << "x" << a.f_sub << " -> "
      << samples.front().target.width() << "x" << samples.front().target.width() << ") from " << paths.size()
      << " images to " << a.out.string() << '\n';
  return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::filesystem::path data;
  std::filesystem::path config;
  std::filesystem::path out;
  std::filesystem::path log;
  std::filesystem::path resume;
  std::filesystem::path validation_dir;
  bool quiet = false;
};

std::vector<std::pair<std::string, Tensor>> load_named_images(const std::filesystem::path& dir) {
  std::vector<std::pair<std::string, Tensor>> out;
  for (const auto& p : require_images(dir)) out.emplace_back(p.filename().string(), to_float(load_image(p)));
  return out;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  if (a.config.empty()) cfg.validate();
  if (!a.validation_dir.empty()) cfg.validation_dir = a.validation_dir;
  const NetworkConfig net = cfg.network();
  const StrategyPlan plan = plan_strategy(cfg.strategy);

  const ArchiveHeader h = read_archive_header(a.data);
  if (static_cast<int>(h.channels) != plan.channels || static_cast<int>(h.f_sub) != cfg.train.f_sub ||
      static_cast<int>(h.out) != target_size(net, cfg.train.f_sub)) {
    std::ostringstream msg;
    msg << "archive geometry (c=" << h.channels << ", f_sub=" << h.f_sub << ", out=" << h.out
        << ") does not match the configuration (c=" << plan.channels << ", f_sub=" << cfg.train.f_sub
        << ", out=" << target_size(net, cfg.train.f_sub) << ")";
    throw DataError(msg.str());
  }
  Checkpoint start{init_network(net, cfg.train.seed), std::nullopt, 0};
  if (!a.resume.empty()) {
    start = load_checkpoint(a.resume);
    if (!(start.net.config == net)) {
      throw ConfigError("checkpoint network " + start.net.config.notation() + " does not match the configuration " +
                        net.notation());
    }
  }
  std::vector<ValidationPair> validation;
  if (!cfg.validation_dir.empty()) {
    validation = make_validation_set(load_named_images(cfg.validation_dir), cfg.train.scale, cfg.train.degrade,
                                     plan.channels, plan.space);
  }
  require_parent_dir(a.out);
  if (!a.log.empty()) require_parent_dir(a.log);
  const auto samples = read_archive(a.data);

  TrainLoopOptions opts;
  opts.checkpoint_path = a.out;
  opts.log_path = a.log;
  opts.hooks.on_validation = [&](const LogRow& r) {
    if (!a.quiet) {
      out << "backprops " << r.backprops << "  epoch " << r.epoch << "  loss " << std::setprecision(6) << r.train_loss
          << "  val_psnr " << std::fixed << std::setprecision(3) << r.val_psnr << "  " << std::setprecision(1)
          << r.elapsed_seconds << "s\n";
      out.unsetf(std::ios::fixed);
      out << std::flush;
    }
    return true;
  };
  if (!a.quiet) {
    out << "training " << net.notation() << " (" << to_string(cfg.strategy) << ") on " << samples.size()
        << " samples from backprop " << start.backprops << " to " << cfg.train.total_backprops << '\n';
  }
  const Checkpoint done = train_phases(plan, std::move(start), samples, validation, cfg.train, opts);
  out << "saved " << a.out.string() << " at " << done.backprops << " backprops\n";
  return kExitOk;
}

// ---- sr --------------------------------------------------------------------

struct SrArgs {
  std::filesystem::path model;
  std::filesystem::path input;
  std::filesystem::path output;
  int scale = 3;
  std::string space = "ycbcr";
};

int cmd_sr(const SrArgs& a, std::ostream& out) {
  if (a.scale < 1) throw ConfigError("scale must be >= 1");
  if (a.space != "ycbcr" && a.space != "rgb") throw ConfigError("space must be ycbcr or rgb");
  if (!supported_output(a.output)) throw ConfigError("output must be .png, .ppm or .pgm");
  require_parent_dir(a.output);
  const Network net = load_checkpoint(a.model).net;
  const int c = net.config.channels;
  Tensor img = to_float(load_image(a.input));
  if (c == 3 && img.channels() != 3) throw DataError("a three-channel model needs a color input");
  if (a.scale > 1) img = resize_bicubic(img, img.height() * a.scale, img.width() * a.scale);

  Tensor result;
  if (c == 1 && img.channels() == 1) {
    result = predict_full(net, img);
  } else if (c == 1) {
    // Network on Y; Cb and Cr stay bicubic.
    Tensor ycc = rgb_to_ycbcr(img);
    const int y[] = {0};
    set_channel(ycc, 0, predict_full(net, select_channels(ycc, y)));
    result = ycbcr_to_rgb(ycc);
  } else if (a.space == "rgb") {
    result = predict_full(net, img);
  } else {
    result = ycbcr_to_rgb(predict_full(net, rgb_to_ycbcr(img)));
  }
  save_image(a.output, to_u8(result));
  out << "wrote " << result.width() << "x" << result.height() << " image to " << a.output.string() << '\n';
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string method = "bicubic";
  std::filesystem::path model;
  std::filesystem::path test_dir;
  int scale = 3;
  std::vector<std::string> metrics{"psnr"};
  std::string channel = "y";
  int shave = -1;
  bool quantize = false;
  std::string degrade = "bicubic";
  std::string space = "ycbcr";
  std::string label;
  std::filesystem::path csv;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  EvalProtocol p;
  p.scale = a.scale;
  p.shave = a.shave;
  p.metrics.clear();
  for (const auto& m : a.metrics) p.metrics.push_back(parse_metric(m));
  p.channel = parse_channel(a.channel);
  p.quantize = a.quantize;
  p.degrade = parse_degrade_mode(a.degrade);
  p.validate();
  if (a.space != "ycbcr" && a.space != "rgb") throw ConfigError("space must be ycbcr or rgb");

  EvalMethod method = BicubicMethod{};
  if (a.method == "network") {
    if (a.model.empty()) throw ConfigError("--method network needs --model");
    NetworkMethod m;
    m.net = load_checkpoint(a.model).net;
    m.space = a.space == "rgb" ? ColorSpace::RGB : ColorSpace::YCbCr;
    m.label = a.label.empty() ? a.model.stem().string() : a.label;
    method = std::move(m);
  } else if (a.method != "bicubic") {
    throw ConfigError("unknown method '" + a.method + "' (bicubic, network)");
  }
  if (!a.csv.empty()) require_parent_dir(a.csv);
  require_images(a.test_dir);

  EvalReport report = evaluate_dataset(method, a.test_dir, p);
  if (a.method == "bicubic" && !a.label.empty()) report.method = a.label;
  print_report_table(out, report);
  if (!a.csv.empty()) {
    std::ostringstream csv;
    write_report_csv(csv, report);
    write_file_atomic(a.csv, as_bytes(csv.str()));
  }
  if (report.failed == static_cast<int>(report.images.size())) throw DataError("every image failed to evaluate");
  return kExitOk;
}

// ---- filters ---------------------------------------------------------------

struct FiltersArgs {
  std::filesystem::path model;
  std::filesystem::path out;
  int layer = 1;
};

int cmd_filters(const FiltersArgs& a, std::ostream& out) {
  if (!supported_output(a.out)) throw ConfigError("output must be .png, .ppm or .pgm");
  require_parent_dir(a.out);
  const Network net = load_checkpoint(a.model).net;
  const int n = static_cast<int>(net.banks.size());
  if (a.layer < 1 || a.layer > n) {
    throw ConfigError("layer must be in [1, " + std::to_string(n) + "], got " + std::to_string(a.layer));
  }
  export_filters(net, a.layer - 1, a.out);
  const auto& b = net.banks[a.layer - 1];
  out << "wrote " << b.n_out * b.n_in << " filters (" << b.f << "x" << b.f << ") of layer " << a.layer << " to "
      << a.out.string() << '\n';
  return kExitOk;
}

// ---- curve -----------------------------------------------------------------

struct CurveArgs {
  std::vector<std::filesystem::path> logs;
  std::vector<std::string> labels;
  std::vector<std::string> baselines;
  std::string title = "Test PSNR during training";
  std::filesystem::path out;
};

int cmd_curve(const CurveArgs& a, std::ostream& out) {
  if (!a.labels.empty() && a.labels.size() != a.logs.size()) {
    throw ConfigError("give one --label per --log or none");
  }
  if (a.out.extension() != ".svg") throw ConfigError("output must be an .svg file");
  require_parent_dir(a.out);
  std::vector<Baseline> baselines;
  for (const auto& b : a.baselines) baselines.push_back(parse_baseline(b));
  std::vector<CurveSeries> series;
  for (std::size_t i = 0; i < a.logs.size(); ++i) {
    series.push_back(read_training_log(a.logs[i], a.labels.empty() ? a.logs[i].stem().string() : a.labels[i]));
  }
  write_file_atomic(a.out, as_bytes(render_curve_svg(series, baselines, a.title)));
  out << "wrote " << a.out.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Super-resolution network toolkit", "srlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "srlab 0.1.0");
  std::function<int()> action;

  PrepareArgs pa;
  auto* prepare = app.add_subcommand("prepare", "Extract training sub-images into a sample archive");
  prepare->add_option("--hr-dir", pa.hr_dir, "Directory of ground-truth images")->required();
  prepare->add_option("--out", pa.out, "Archive path (a .manifest file is written next to it)")->required();
  prepare->add_option("--scale", pa.scale, "Upscaling factor")->capture_default_str();
  prepare->add_option("--fsub", pa.f_sub, "Sub-image side length")->capture_default_str();
  prepare->add_option("--stride", pa.stride, "Crop stride")->capture_default_str();
  prepare->add_option("--mode", pa.mode, "Degradation: bicubic or gaussian:<sigma>")->capture_default_str();
  prepare->add_option("--layers", pa.layers, "Filter sizes, fixing the target crop size")->capture_default_str();
  prepare->add_option("--strategy", pa.strategy, "Channel strategy: y, ycbcr, y-pretrain, cbcr-pretrain, rgb")
      ->capture_default_str();
  prepare->callback([&] { action = [&] { return cmd_prepare(pa, out, err); }; });

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a network on a sample archive");
  train->add_option("--data", ta.data, "Sample archive from 'prepare'")->required();
  train->add_option("--config", ta.config, "key=value run configuration");
  train->add_option("--out", ta.out, "Checkpoint path (also used for periodic saves)")->required();
  train->add_option("--log", ta.log, "CSV training log (appended)");
  train->add_option("--resume", ta.resume, "Checkpoint to continue from");
  train->add_option("--validation-dir", ta.validation_dir, "Images for validation PSNR (overrides the config)");
  train->add_flag("--quiet", ta.quiet, "Only print the final line");
  train->callback([&] { action = [&] { return cmd_train(ta, out); }; });

  SrArgs sa;
  auto* sr = app.add_subcommand("sr", "Super-resolve one image");
  sr->add_option("--model", sa.model, "Checkpoint")->required();
  sr->add_option("--input", sa.input, "Low-resolution image")->required();
  sr->add_option("--output", sa.output, "Output image (.png, .ppm, .pgm)")->required();
  sr->add_option("--scale", sa.scale, "Bicubic pre-upscaling factor; 1 if the input is already upscaled")
      ->capture_default_str();
  sr->add_option("--space", sa.space, "Color space of a three-channel model: ycbcr or rgb")->capture_default_str();
  sr->callback([&] { action = [&] { return cmd_sr(sa, out); }; });

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a method on a directory of ground-truth images");
  eval->add_option("--method", ea.method, "bicubic or network")->capture_default_str();
  eval->add_option("--model", ea.model, "Checkpoint for --method network");
  eval->add_option("--test-dir", ea.test_dir, "Ground-truth images")->required();
  eval->add_option("--scale", ea.scale, "Upscaling factor")->capture_default_str();
  eval->add_option("--metrics", ea.metrics, "Comma list of psnr, ssim, msssim")->delimiter(',')->capture_default_str();
  eval->add_option("--channel", ea.channel, "y, rgb, cb or cr")->capture_default_str();
  eval->add_option("--shave", ea.shave, "Border to ignore; negative means the scale")->capture_default_str();
  eval->add_flag("--quantize", ea.quantize, "Round to 8-bit levels before scoring");
  eval->add_option("--degrade", ea.degrade, "bicubic or gaussian:<sigma>")->capture_default_str();
  eval->add_option("--space", ea.space, "Color space of a three-channel model: ycbcr or rgb")->capture_default_str();
  eval->add_option("--label", ea.label, "Method name in the report");
  eval->add_option("--csv", ea.csv, "Write image,metric,value rows here");
  eval->callback([&] { action = [&] { return cmd_eval(ea, out); }; });

  FiltersArgs fa;
  auto* filters = app.add_subcommand("filters", "Export a layer's filters as an image grid");
  filters->add_option("--model", fa.model, "Checkpoint")->required();
  filters->add_option("--layer", fa.layer, "Layer number, starting at 1")->capture_default_str();
  filters->add_option("--out", fa.out, "Output image (.png, .ppm, .pgm)")->required();
  filters->callback([&] { action = [&] { return cmd_filters(fa, out); }; });

  CurveArgs ca;
  auto* curve = app.add_subcommand("curve", "Plot validation PSNR from training logs as SVG");
  curve->add_option("--log", ca.logs, "Training log CSV (repeatable)")->required();
  curve->add_option("--label", ca.labels, "Legend label per log (repeatable)");
  curve->add_option("--baseline", ca.baselines, "Reference line label=psnr (repeatable)");
  curve->add_option("--title", ca.title, "Chart title")->capture_default_str();
  curve->add_option("--out", ca.out, "Output .svg")->required();
  curve->callback([&] { action = [&] { return cmd_curve(ca, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace srlab::cli
