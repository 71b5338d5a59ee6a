#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core_kge/model.hpp"
#include "core_kge/trainer.hpp"

namespace core_kge {

/// Everything a command needs, assembled from defaults, an optional key=value
/// config file, and command-line flags (flags win).
struct RunConfig {
  ModelConfig model;
  TrainConfig train;

  std::filesystem::path data_dir;
  std::filesystem::path out_dir = "out";
  std::filesystem::path checkpoint;

  std::string split = "test";
  int top_k = 10;
  bool filtered = false;  // predict: mask known-true completions

  std::vector<std::string> query;      // predict: head relation tail, one slot "?"
  std::vector<std::string> relations;  // inspect: relation names
  std::string pattern;                 // inspect: optional pattern kind
  std::vector<double> lambdas;         // sweep: one training run per value
};

/// Bounds checks shared by every command. Throws ConfigError with a message
/// naming the offending flag and value.
void validate_run_config(const RunConfig& config);

}  // namespace core_kge
