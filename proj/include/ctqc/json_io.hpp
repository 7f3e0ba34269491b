#pragma once

#include <string>

#include <json.hpp>

#include "ctqc/gan.hpp"
#include "ctqc/harness.hpp"
#include "ctqc/losses.hpp"
#include "ctqc/metrics.hpp"
#include "ctqc/pipeline.hpp"

namespace ctqc {

enum class SplitMode { Slice, Patient };

std::string to_string(SplitMode mode);

struct CvConfig {
  int k = 4;
  std::uint64_t seed = 0;
  SplitMode split_mode = SplitMode::Patient;
};

struct LossSpec {
  LossKind kind = LossKind::CbLdam;
  LossParams params;
};

struct PathsConfig {
  std::string manifest;
  std::string output_dir = ".";
};

/// Everything a reproducible experiment needs. JSON fields are optional and
/// fall back to these defaults; unknown keys are rejected.
struct ExperimentConfig {
  PipelineConfig pipeline;
  LossSpec loss;
  TrainConfig train;
  CvConfig cv;
  PathsConfig paths;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QcReport& report);
nlohmann::json to_json(const MetricReport& report);
nlohmann::json to_json(const PatientDiagnosis& diagnosis);
nlohmann::json to_json(const AnomalyResult& result);

/// Serialized with sorted keys, two-space indentation and a trailing newline;
/// byte-stable across runs.
std::string dump_json(const nlohmann::json& j);

/// One row per macro metric: "metric,mean,sd".
std::string summary_csv(const std::vector<MetricReport>& folds);

} // namespace ctqc
