#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace srlab::cli {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ConfigError("bad value '" + v + "' for key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean '" + v + "' for key '" + key + "'");
}

std::string join_doubles(const std::vector<double>& v) {
  std::ostringstream s;
  s.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"layers", [](RunConfig& c, const std::string&, const std::string& v) { c.layers = v; }},
      {"widths",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.widths.clear();
         if (v.empty()) return;
         for (const auto& item : split_list(v)) c.widths.push_back(parse_number<int>(k, item));
       }},
      {"strategy", [](RunConfig& c, const std::string&, const std::string& v) { c.strategy = parse_strategy(v); }},
      {"scale",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.scale = parse_number<int>(k, v);
         c.eval.scale = c.train.scale;
       }},
      {"f_sub", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.f_sub = parse_number<int>(k, v); }},
      {"stride", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.stride = parse_number<int>(k, v); }},
      {"batch_size",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.train.batch_size = parse_number<int>(k, v); }},
      {"momentum",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.train.momentum = parse_number<double>(k, v); }},
      {"learning_rates",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.learning_rates.clear();
         for (const auto& item : split_list(v)) c.train.learning_rates.push_back(parse_number<double>(k, item));
       }},
      {"total_backprops",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.total_backprops = parse_number<std::uint64_t>(k, v);
       }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.seed = parse_number<std::uint64_t>(k, v); }},
      {"degrade",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.train.degrade = parse_degrade_mode(v);
         c.eval.degrade = c.train.degrade;
       }},
      {"validation_every",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.validation_every = parse_number<std::uint64_t>(k, v);
       }},
      {"checkpoint_every",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.checkpoint_every = parse_number<std::uint64_t>(k, v);
       }},
      {"pretrain_backprops",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.pretrain_backprops = parse_number<std::uint64_t>(k, v);
       }},
      {"validation_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.validation_dir = v; }},
      {"shave", [](RunConfig& c, const std::string& k, const std::string& v) { c.eval.shave = parse_number<int>(k, v); }},
      {"metrics",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.eval.metrics.clear();
         for (const auto& item : split_list(v)) c.eval.metrics.push_back(parse_metric(item));
       }},
      {"eval_channel",
       [](RunConfig& c, const std::string&, const std::string& v) { c.eval.channel = parse_channel(v); }},
      {"quantize", [](RunConfig& c, const std::string& k, const std::string& v) { c.eval.quantize = parse_bool(k, v); }},
  };
  return table;
}

}  // namespace

NetworkConfig RunConfig::network() const {
  return NetworkConfig::from_notation(layers, widths, plan_strategy(strategy).channels);
}

void RunConfig::validate() const {
  const NetworkConfig net = network();
  (void)train.resolved(net);
  eval.validate();
  if (eval.scale != train.scale) throw ConfigError("evaluation and training scales differ");
  const auto plan = plan_strategy(strategy);
  if (train.pretrain_backprops > 0) {
    if (plan.phase1_weights.empty()) {
      throw ConfigError("pretrain_backprops needs a pre-training strategy (y-pretrain or cbcr-pretrain)");
    }
    if (train.pretrain_backprops >= train.total_backprops) {
      throw ConfigError("pretrain_backprops must be smaller than total_backprops");
    }
  }
}

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "repeated key '" + key + "'");
    try {
      it->second(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse_run_config(in, path.string());
}

void write_run_config(std::ostream& out, const RunConfig& c) {
  out << "layers=" << c.layers << '\n';
  out << "widths=";
  for (std::size_t i = 0; i < c.widths.size(); ++i) out << (i ? "," : "") << c.widths[i];
  out << '\n';
  out << "strategy=" << to_string(c.strategy) << '\n';
  out << "scale=" << c.train.scale << '\n';
  out << "f_sub=" << c.train.f_sub << '\n';
  out << "stride=" << c.train.stride << '\n';
  out << "batch_size=" << c.train.batch_size << '\n';
  out << "momentum=" << join_doubles({c.train.momentum}) << '\n';
  if (!c.train.learning_rates.empty()) out << "learning_rates=" << join_doubles(c.train.learning_rates) << '\n';
  out << "total_backprops=" << c.train.total_backprops << '\n';
  out << "seed=" << c.train.seed << '\n';
  if (const auto* g = std::get_if<GaussianDecimateUp>(&c.train.degrade)) {
    out << "degrade=gaussian:" << join_doubles({g->sigma}) << '\n';
  } else {
    out << "degrade=bicubic\n";
  }
  out << "validation_every=" << c.train.validation_every << '\n';
  out << "checkpoint_every=" << c.train.checkpoint_every << '\n';
  out << "pretrain_backprops=" << c.train.pretrain_backprops << '\n';
  if (!c.validation_dir.empty()) out << "validation_dir=" << c.validation_dir.string() << '\n';
  out << "shave=" << c.eval.shave << '\n';
  out << "metrics=";
  for (std::size_t i = 0; i < c.eval.metrics.size(); ++i) out << (i ? "," : "") << to_string(c.eval.metrics[i]);
  out << '\n';
  out << "eval_channel=" << to_string(c.eval.channel) << '\n';
  out << "quantize=" << (c.eval.quantize ? "true" : "false") << '\n';
}

}  // namespace srlab::cli
