#include "ctqc/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace ctqc {

using nlohmann::json;

namespace {

void require_object(const json& j, const char* ctx) {
  if (!j.is_object()) throw ConfigError(std::string(ctx) + " must be a JSON object");
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* ctx) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(std::string("unknown key \"") + item.key() + "\" in " + ctx);
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const char* ctx) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field \"") + key + "\" in " + ctx + " has the wrong type");
  }
}

} // namespace

std::string to_string(SplitMode mode) {
  return mode == SplitMode::Slice ? "slice" : "patient";
}

PipelineConfig pipeline_config_from_json(const json& j) {
  require_object(j, "pipeline config");
  reject_unknown_keys(j, {"trim_fraction", "target_slices", "resize_to", "window", "darkness_ratio"},
                      "pipeline config");
  PipelineConfig cfg;
  read_field(j, "trim_fraction", cfg.trim_fraction, "pipeline config");
  read_field(j, "target_slices", cfg.target_slices, "pipeline config");
  read_field(j, "resize_to", cfg.resize_to, "pipeline config");
  read_field(j, "window", cfg.window, "pipeline config");
  read_field(j, "darkness_ratio", cfg.darkness_ratio, "pipeline config");
  cfg.validate();
  return cfg;
}

namespace {

LossSpec loss_spec_from_json(const json& j) {
  require_object(j, "loss config");
  reject_unknown_keys(j, {"kind", "m", "s", "beta", "gamma", "scaling_mode", "cb_normalize"},
                      "loss config");
  LossSpec spec;
  std::string kind = to_string(spec.kind);
  read_field(j, "kind", kind, "loss config");
  spec.kind = loss_kind_from_string(kind);
  read_field(j, "m", spec.params.ldam.m, "loss config");
  read_field(j, "s", spec.params.ldam.s, "loss config");
  read_field(j, "beta", spec.params.cb.beta, "loss config");
  read_field(j, "gamma", spec.params.focal.gamma, "loss config");
  read_field(j, "cb_normalize", spec.params.cb.normalize, "loss config");
  if (j.contains("scaling_mode")) {
    const std::string mode = j.at("scaling_mode").get<std::string>();
    if (mode == "divide")
      spec.params.ldam.scaling_mode = ScalingMode::Divide;
    else if (mode == "multiply")
      spec.params.ldam.scaling_mode = ScalingMode::Multiply;
    else
      throw ConfigError("scaling_mode must be \"divide\" or \"multiply\"");
  }
  if (spec.params.ldam.m <= 0.0 || spec.params.ldam.s <= 0.0)
    throw ConfigError("LDAM m and s must be positive");
  if (spec.params.cb.beta < 0.0 || spec.params.cb.beta >= 1.0)
    throw ConfigError("beta must be in [0, 1)");
  if (spec.params.focal.gamma < 0.0) throw ConfigError("gamma must be nonnegative");
  return spec;
}

TrainConfig train_config_from_json(const json& j) {
  require_object(j, "train config");
  reject_unknown_keys(j, {"learning_rate", "batch_size", "momentum", "weight_decay", "epochs", "seed"},
                      "train config");
  TrainConfig cfg;
  read_field(j, "learning_rate", cfg.learning_rate, "train config");
  read_field(j, "batch_size", cfg.batch_size, "train config");
  read_field(j, "momentum", cfg.momentum, "train config");
  read_field(j, "weight_decay", cfg.weight_decay, "train config");
  read_field(j, "epochs", cfg.epochs, "train config");
  read_field(j, "seed", cfg.seed, "train config");
  cfg.validate();
  return cfg;
}

CvConfig cv_config_from_json(const json& j) {
  require_object(j, "cv config");
  reject_unknown_keys(j, {"k", "seed", "split_mode"}, "cv config");
  CvConfig cfg;
  read_field(j, "k", cfg.k, "cv config");
  read_field(j, "seed", cfg.seed, "cv config");
  if (j.contains("split_mode")) {
    const std::string mode = j.at("split_mode").get<std::string>();
    if (mode == "slice")
      cfg.split_mode = SplitMode::Slice;
    else if (mode == "patient")
      cfg.split_mode = SplitMode::Patient;
    else
      throw ConfigError("split_mode must be \"slice\" or \"patient\"");
  }
  if (cfg.k < 2) throw ConfigError("cv.k must be >= 2");
  return cfg;
}

PathsConfig paths_config_from_json(const json& j) {
  require_object(j, "paths config");
  reject_unknown_keys(j, {"manifest", "output_dir"}, "paths config");
  PathsConfig cfg;
  read_field(j, "manifest", cfg.manifest, "paths config");
  read_field(j, "output_dir", cfg.output_dir, "paths config");
  return cfg;
}

} // namespace

void ExperimentConfig::validate() const {
  pipeline.validate();
  train.validate();
  if (cv.k < 2) throw ConfigError("cv.k must be >= 2");
}

ExperimentConfig experiment_config_from_json(const json& j) {
  require_object(j, "experiment config");
  reject_unknown_keys(j, {"pipeline", "loss", "train", "cv", "paths"}, "experiment config");
  ExperimentConfig cfg;
  if (j.contains("pipeline")) cfg.pipeline = pipeline_config_from_json(j.at("pipeline"));
  if (j.contains("loss")) cfg.loss = loss_spec_from_json(j.at("loss"));
  if (j.contains("train")) cfg.train = train_config_from_json(j.at("train"));
  if (j.contains("cv")) cfg.cv = cv_config_from_json(j.at("cv"));
  if (j.contains("paths")) cfg.paths = paths_config_from_json(j.at("paths"));
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return experiment_config_from_json(j);
}

json to_json(const QcReport& report) {
  return json{{"per_slice_mean_brightness", report.per_slice_mean_brightness},
              {"anomalous_indices", report.anomalous_indices},
              {"degenerate_slices", report.degenerate_slices},
              {"repairs_applied", report.repairs_applied}};
}

json to_json(const MetricReport& report) {
  json per_class = json::array();
  for (const auto& c : report.per_class)
    per_class.push_back(json{{"mcc", c.mcc}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}});
  return json{{"n", report.n},
              {"per_class", per_class},
              {"macro",
               json{{"mcc", report.macro.mcc},
                    {"precision", report.macro.precision},
                    {"recall", report.macro.recall},
                    {"f1", report.macro.f1},
                    {"balanced_accuracy", report.macro.balanced_accuracy},
                    {"kappa", report.macro.kappa}}}};
}

json to_json(const PatientDiagnosis& diagnosis) {
  json per_slice = json::array();
  for (int cls : diagnosis.per_slice_predictions)
    per_slice.push_back(to_string(static_cast<SeverityLabel>(cls)));
  return json{{"per_slice_predictions", per_slice},
              {"vote_counts", diagnosis.vote_counts},
              {"final_class", to_string(static_cast<SeverityLabel>(diagnosis.final_class))}};
}

json to_json(const AnomalyResult& result) {
  return json{{"score", result.score},
              {"residual", result.residual},
              {"discrimination", result.discrimination},
              {"z_star", result.z_star}};
}

std::string dump_json(const json& j) {
  // Recursively sort object keys for byte-stable output.
  std::function<json(const json&)> sorted = [&](const json& node) -> json {
    if (node.is_object()) {
      json out = json::object(); // nlohmann objects iterate in sorted key order
      for (const auto& item : node.items()) out[item.key()] = sorted(item.value());
      return out;
    }
    if (node.is_array()) {
      json out = json::array();
      for (const auto& item : node) out.push_back(sorted(item));
      return out;
    }
    return node;
  };
  return sorted(j).dump(2) + "\n";
}

std::string summary_csv(const std::vector<MetricReport>& folds) {
  if (folds.empty())
    throw ArgumentError(ArgumentError::Code::EmptyInput, "no fold reports to summarize");
  const auto column = [&](const char* name, auto getter) {
    double mean = 0.0;
    for (const auto& r : folds) mean += getter(r);
    mean /= static_cast<double>(folds.size());
    double var = 0.0;
    for (const auto& r : folds) {
      const double d = getter(r) - mean;
      var += d * d;
    }
    const double sd = folds.size() > 1 ? std::sqrt(var / static_cast<double>(folds.size() - 1)) : 0.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g\n", name, mean, sd);
    return std::string(buf);
  };

  std::string out = "metric,mean,sd\n";
  out += column("mcc", [](const MetricReport& r) { return r.macro.mcc; });
  out += column("precision", [](const MetricReport& r) { return r.macro.precision; });
  out += column("recall", [](const MetricReport& r) { return r.macro.recall; });
  out += column("f1", [](const MetricReport& r) { return r.macro.f1; });
  out += column("balanced_accuracy", [](const MetricReport& r) { return r.macro.balanced_accuracy; });
  out += column("kappa", [](const MetricReport& r) { return r.macro.kappa; });
  return out;
}

} // namespace ctqc
