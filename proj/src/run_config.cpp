#include "core_kge/run_config.hpp"

#include <string>

#include "core_kge/errors.hpp"

namespace core_kge {

namespace {

void fail(const std::string& message) { throw ConfigError(message); }

}  // namespace

void validate_run_config(const RunConfig& config) {
  if (config.model.dim < 1) {
    fail("--dim must be >= 1 (got " + std::to_string(config.model.dim) + ")");
  }
  if (!(config.train.margin > 0.0)) {
    fail("--margin must be > 0 (got " + std::to_string(config.train.margin) + ")");
  }
  if (config.train.adversarial_temperature < 0.0) {
    fail("--alpha must be >= 0 (got " + std::to_string(config.train.adversarial_temperature) +
         ")");
  }
  if (config.train.reg_lambda < 0.0) {
    fail("--lambda must be >= 0 (got " + std::to_string(config.train.reg_lambda) + ")");
  }
  if (!(config.train.learning_rate > 0.0)) {
    fail("--lr must be > 0 (got " + std::to_string(config.train.learning_rate) + ")");
  }
  if (config.train.batch_size < 1) {
    fail("--batch must be >= 1 (got " + std::to_string(config.train.batch_size) + ")");
  }
  if (config.train.negatives_per_positive < 1) {
    fail("--negatives must be >= 1 (got " +
         std::to_string(config.train.negatives_per_positive) + ")");
  }
  if (config.train.max_steps < 1) {
    fail("--max-steps must be >= 1 (got " + std::to_string(config.train.max_steps) + ")");
  }
  if (config.train.valid_interval < 1) {
    fail("--valid-interval must be >= 1 (got " + std::to_string(config.train.valid_interval) +
         ")");
  }
  if (config.train.patience < 0) {
    fail("--patience must be >= 0 (got " + std::to_string(config.train.patience) + ")");
  }
  if (config.top_k < 0) {
    fail("--top-k must be >= 0 (got " + std::to_string(config.top_k) + ")");
  }
  if (config.split != "train" && config.split != "valid" && config.split != "test") {
    fail("--split must be one of train, valid, test (got '" + config.split + "')");
  }
  for (double l : config.lambdas) {
    if (l < 0.0) fail("sweep lambda values must be >= 0 (got " + std::to_string(l) + ")");
  }
}

}  // namespace core_kge
