#pragma once

#include "core_kge/run_config.hpp"

namespace core_kge {

/// Command entry points used by the executable and exercised directly in
/// tests. All return 0 on success and signal failures through exceptions
/// (ConfigError, DataError, RuntimeFailure, std::invalid_argument).
int cmd_train(const RunConfig& config);
int cmd_evaluate(const RunConfig& config);
int cmd_predict(const RunConfig& config);
int cmd_inspect(const RunConfig& config);
int cmd_sweep(const RunConfig& config);

}  // namespace core_kge
