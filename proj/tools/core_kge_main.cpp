#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "core_kge/commands.hpp"
#include "core_kge/errors.hpp"

namespace {

struct FlagState {
  std::string data_dir;
  std::string out_dir = "out";
  std::string checkpoint;
  std::string norm = "el2";
  std::uint64_t seed = 42;
  bool no_torus = false;
  bool no_bump = false;
};

void add_model_flags(CLI::App* sub, core_kge::RunConfig& cfg, FlagState& flags) {
  sub->add_option("--dim", cfg.model.dim, "Embedding dimensions")->capture_default_str();
  sub->add_option("--norm", flags.norm, "Distance aggregation: l1, l2, or el2")
      ->check(CLI::IsMember({"l1", "l2", "el2"}))
      ->capture_default_str();
  sub->add_flag("--no-torus", flags.no_torus, "Disable wrapping (plain Euclidean space)");
  sub->add_flag("--no-bump", flags.no_bump, "Disable the context shift between entities");
  sub->add_option("--seed", flags.seed, "RNG seed for init, batching, and sampling")
      ->capture_default_str();
}

void add_train_flags(CLI::App* sub, core_kge::RunConfig& cfg) {
  sub->add_option("--margin", cfg.train.margin, "Loss margin")->capture_default_str();
  sub->add_option("--alpha", cfg.train.adversarial_temperature,
                  "Negative-weighting temperature (0 = uniform)")
      ->capture_default_str();
  sub->add_option("--lambda", cfg.train.reg_lambda, "Width penalty weight")
      ->capture_default_str();
  sub->add_option("--lr", cfg.train.learning_rate, "Adam learning rate")->capture_default_str();
  sub->add_option("--batch", cfg.train.batch_size, "Positives per step")->capture_default_str();
  sub->add_option("--negatives", cfg.train.negatives_per_positive, "Negatives per positive")
      ->capture_default_str();
  sub->add_option("--max-steps", cfg.train.max_steps, "Optimization step budget")
      ->capture_default_str();
  sub->add_option("--valid-interval", cfg.train.valid_interval, "Steps between validations")
      ->capture_default_str();
  sub->add_option("--patience", cfg.train.patience,
                  "Validations without improvement before stopping (0 = never)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge graph completion with toroidal region embeddings"};
  app.require_subcommand(1);

  core_kge::RunConfig cfg;
  FlagState flags;

  CLI::App* train = app.add_subcommand("train", "Train a model and write checkpoints");
  train->set_config("--config", "", "Read options from a key=value file");
  train->add_option("--data", flags.data_dir, "Directory with train/valid/test files")
      ->required();
  train->add_option("--out", flags.out_dir, "Output directory")->capture_default_str();
  add_model_flags(train, cfg, flags);
  add_train_flags(train, cfg);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a split");
  evaluate->set_config("--config", "", "Read options from a key=value file");
  evaluate->add_option("--data", flags.data_dir, "Directory with train/valid/test files")
      ->required();
  evaluate->add_option("--checkpoint", flags.checkpoint, "Checkpoint manifest path")
      ->required();
  evaluate->add_option("--out", flags.out_dir, "Output directory")->capture_default_str();
  evaluate->add_option("--split", cfg.split, "Split to evaluate: train, valid, or test")
      ->check(CLI::IsMember({"train", "valid", "test"}))
      ->capture_default_str();

  CLI::App* predict = app.add_subcommand("predict", "Rank completions for a partial triple");
  predict->set_config("--config", "", "Read options from a key=value file");
  predict->add_option("--checkpoint", flags.checkpoint, "Checkpoint manifest path")
      ->required();
  predict->add_option("--data", flags.data_dir,
                      "Dataset directory (required with --filtered true)");
  predict->add_option("query", cfg.query, "head relation tail, one entity slot '?'")
      ->expected(3);
  predict->add_option("--top-k", cfg.top_k, "Candidates to print")->capture_default_str();
  predict->add_option("--filtered", cfg.filtered, "Hide known-true completions")
      ->capture_default_str();

  CLI::App* inspect = app.add_subcommand("inspect", "Print region statistics and patterns");
  inspect->set_config("--config", "", "Read options from a key=value file");
  inspect->add_option("--checkpoint", flags.checkpoint, "Checkpoint manifest path")
      ->required();
  inspect->add_option("relations", cfg.relations, "Relation name(s)");
  inspect->add_option(
      "--pattern", cfg.pattern,
      "symmetry, anti-symmetry, inversion, subsumption, intersection, mutual-exclusion");

  CLI::App* sweep = app.add_subcommand("sweep", "Train once per lambda and tabulate metrics");
  sweep->set_config("--config", "", "Read options from a key=value file");
  sweep->add_option("--data", flags.data_dir, "Directory with train/valid/test files")
      ->required();
  sweep->add_option("--out", flags.out_dir, "Output directory")->capture_default_str();
  sweep->add_option("--lambdas", cfg.lambdas, "Comma-separated lambda values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--split", cfg.split, "Split to evaluate: train, valid, or test")
      ->check(CLI::IsMember({"train", "valid", "test"}))
      ->capture_default_str();
  add_model_flags(sweep, cfg, flags);
  add_train_flags(sweep, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  cfg.data_dir = flags.data_dir;
  cfg.out_dir = flags.out_dir;
  cfg.checkpoint = flags.checkpoint;
  cfg.model.torus_enabled = !flags.no_torus;
  cfg.model.bump_enabled = !flags.no_bump;
  cfg.model.seed = flags.seed;
  cfg.train.seed = flags.seed;

  try {
    cfg.model.norm = core_kge::parse_norm(flags.norm);
    if (train->parsed()) return core_kge::cmd_train(cfg);
    if (evaluate->parsed()) return core_kge::cmd_evaluate(cfg);
    if (predict->parsed()) return core_kge::cmd_predict(cfg);
    if (inspect->parsed()) return core_kge::cmd_inspect(cfg);
    if (sweep->parsed()) return core_kge::cmd_sweep(cfg);
    std::cerr << app.help() << std::endl;
    return 1;
  } catch (const core_kge::ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const core_kge::DataError& e) {
    std::cerr << "data error: " << e.what() << std::endl;
    return 2;
  } catch (const core_kge::RuntimeFailure& e) {
    std::cerr << "runtime failure: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << std::endl;
    return 3;
  }
}
