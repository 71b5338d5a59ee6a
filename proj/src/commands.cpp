#include "core_kge/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "core_kge/checkpoint.hpp"
#include "core_kge/errors.hpp"
#include "core_kge/evaluator.hpp"

namespace core_kge {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

/// Advisory per-output-directory lock. Presence of the file means another run
/// owns the directory.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
    if (fs::exists(path_)) {
      throw ConfigError("output directory " + dir.string() +
                        " is locked by another run (delete " + path_.string() + " if stale)");
    }
    std::ofstream out(path_);
    if (!out) throw RuntimeFailure("cannot create lock file " + path_.string());
    out << "locked\n";
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  fs::path path_;
};

KnowledgeGraphDataset load_data_checked(const RunConfig& config, const char* command) {
  if (config.data_dir.empty()) {
    throw ConfigError(std::string("--data is required for ") + command);
  }
  return load_dataset(config.data_dir);
}

Checkpoint load_checkpoint_checked(const RunConfig& config, const char* command) {
  if (config.checkpoint.empty()) {
    throw ConfigError(std::string("--checkpoint is required for ") + command);
  }
  return load_checkpoint(config.checkpoint);
}

void check_vocab_compatible(const Checkpoint& ckpt, const KnowledgeGraphDataset& data) {
  if (!(ckpt.vocab == data.vocab)) {
    throw DataError("checkpoint vocabulary does not match the dataset (checkpoint: " +
                    std::to_string(ckpt.vocab.num_entities()) + " entities / " +
                    std::to_string(ckpt.vocab.num_relations()) + " relations, dataset: " +
                    std::to_string(data.vocab.num_entities()) + " / " +
                    std::to_string(data.vocab.num_relations()) +
                    "); was it trained on a different dataset?");
  }
}

const std::vector<Triple>& pick_split(const KnowledgeGraphDataset& data,
                                      const std::string& split) {
  if (split == "train") return data.train;
  if (split == "valid") return data.valid;
  return data.test;
}

json metrics_json(const DirectionMetrics& m) {
  return json{{"mrr", m.mrr},
              {"hits1", m.hits1},
              {"hits3", m.hits3},
              {"hits10", m.hits10},
              {"queries", m.query_count}};
}

void print_metrics(const MetricsReport& report) {
  std::printf("%-10s %8s %8s %8s %8s %10s\n", "", "MRR", "Hits@1", "Hits@3", "Hits@10",
              "queries");
  auto row = [](const char* name, const DirectionMetrics& m) {
    std::printf("%-10s %8.4f %8.4f %8.4f %8.4f %10lld\n", name, m.mrr, m.hits1, m.hits3,
                m.hits10, static_cast<long long>(m.query_count));
  };
  row("head", report.head);
  row("tail", report.tail);
  row("combined", report.combined);
}

json validation_json(const ValidationRecord& rec) {
  return json{{"step", rec.step},
              {"train_loss", rec.train_loss},
              {"train_kge", rec.train_kge},
              {"train_reg", rec.train_reg},
              {"valid_mrr", rec.valid_mrr},
              {"valid_hits1", rec.valid_hits1},
              {"valid_hits3", rec.valid_hits3},
              {"valid_hits10", rec.valid_hits10}};
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string nearest_names(const std::string& query, const std::vector<std::string>& names) {
  std::vector<std::pair<std::size_t, const std::string*>> scored;
  scored.reserve(names.size());
  for (const std::string& n : names) scored.emplace_back(levenshtein(query, n), &n);
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first < y.first : *x.second < *y.second;
  });
  std::string out;
  const std::size_t limit = std::min<std::size_t>(3, scored.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (!out.empty()) out += ", ";
    out += *scored[i].second;
  }
  return out;
}

std::int32_t resolve_entity(const Vocabulary& vocab, const std::string& name) {
  if (auto id = vocab.entity_id(name)) return *id;
  throw ConfigError("unknown entity '" + name +
                    "'; nearest names: " + nearest_names(name, vocab.entity_names()));
}

std::int32_t resolve_relation(const Vocabulary& vocab, const std::string& name) {
  if (auto id = vocab.relation_id(name)) return *id;
  throw ConfigError("unknown relation '" + name +
                    "'; nearest names: " + nearest_names(name, vocab.relation_names()));
}

PatternKind parse_pattern(const std::string& name) {
  if (name == "symmetry") return PatternKind::Symmetry;
  if (name == "anti-symmetry" || name == "antisymmetry") return PatternKind::AntiSymmetry;
  if (name == "inversion") return PatternKind::Inversion;
  if (name == "subsumption") return PatternKind::Subsumption;
  if (name == "intersection") return PatternKind::Intersection;
  if (name == "mutual-exclusion" || name == "exclusion") return PatternKind::MutualExclusion;
  throw ConfigError("unknown pattern '" + name +
                    "' (expected symmetry, anti-symmetry, inversion, subsumption, "
                    "intersection, or mutual-exclusion)");
}

void append_jsonl(const fs::path& path, const json& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << record.dump() << "\n";
}

}  // namespace

int cmd_train(const RunConfig& config) {
  validate_run_config(config);
  KnowledgeGraphDataset data = load_data_checked(config, "train");

  fs::create_directories(config.out_dir);
  DirLock lock(config.out_dir);

  const fs::path history_path = config.out_dir / "history.jsonl";
  std::ofstream history(history_path, std::ios::trunc);
  if (!history) throw RuntimeFailure("cannot write " + history_path.string());

  auto on_validation = [&history](const ValidationRecord& rec) {
    history << validation_json(rec).dump() << "\n";
    history.flush();
    std::printf(
        "step %lld  loss %.6f  kge %.6f  reg %.6f  valid mrr %.4f  h@1 %.4f  h@3 %.4f  "
        "h@10 %.4f\n",
        static_cast<long long>(rec.step), rec.train_loss, rec.train_kge, rec.train_reg,
        rec.valid_mrr, rec.valid_hits1, rec.valid_hits3, rec.valid_hits10);
    std::fflush(stdout);
  };

  TrainResult result = train(data, config.model, config.train, on_validation);

  Checkpoint best;
  best.model = config.model;
  best.vocab = data.vocab;
  best.params = result.best_params;
  best.step = result.best_step;
  save_checkpoint(config.out_dir / "best.ckpt", best);

  Checkpoint final_ckpt;
  final_ckpt.model = config.model;
  final_ckpt.vocab = data.vocab;
  final_ckpt.params = std::move(result.final_params);
  final_ckpt.optimizer = std::move(result.opt_state);
  final_ckpt.step = result.steps_completed;
  save_checkpoint(config.out_dir / "final.ckpt", final_ckpt);

  std::printf("finished %lld steps; best validation MRR %.4f at step %lld\n",
              static_cast<long long>(result.steps_completed),
              result.best_mrr < 0.0 ? 0.0 : result.best_mrr,
              static_cast<long long>(result.best_step));
  std::printf("wrote %s and %s\n", (config.out_dir / "best.ckpt").string().c_str(),
              (config.out_dir / "final.ckpt").string().c_str());
  return 0;
}

int cmd_evaluate(const RunConfig& config) {
  validate_run_config(config);
  Checkpoint ckpt = load_checkpoint_checked(config, "evaluate");
  KnowledgeGraphDataset data = load_data_checked(config, "evaluate");
  check_vocab_compatible(ckpt, data);

  const std::vector<Triple>& split = pick_split(data, config.split);
  if (split.empty()) throw DataError("split '" + config.split + "' is empty");

  FilterIndex filter = build_filter_index(data);
  MetricsReport report = evaluate(ckpt.params, ckpt.model, split, filter);

  std::printf("split=%s  checkpoint=%s  step=%lld\n", config.split.c_str(),
              config.checkpoint.string().c_str(), static_cast<long long>(ckpt.step));
  print_metrics(report);

  fs::create_directories(config.out_dir);
  json record{{"split", config.split},
              {"checkpoint", config.checkpoint.string()},
              {"step", ckpt.step},
              {"head", metrics_json(report.head)},
              {"tail", metrics_json(report.tail)},
              {"combined", metrics_json(report.combined)}};
  append_jsonl(config.out_dir / "metrics.jsonl", record);
  return 0;
}

int cmd_predict(const RunConfig& config) {
  validate_run_config(config);
  Checkpoint ckpt = load_checkpoint_checked(config, "predict");

  if (config.query.size() != 3) {
    throw ConfigError("predict expects: head relation tail (with one entity slot '?')");
  }
  const std::string& head_tok = config.query[0];
  const std::string& rel_tok = config.query[1];
  const std::string& tail_tok = config.query[2];
  if (rel_tok == "?") throw ConfigError("the relation slot cannot be '?'");
  if ((head_tok == "?") == (tail_tok == "?")) {
    throw ConfigError("exactly one of head and tail must be '?'");
  }

  const Direction direction =
      head_tok == "?" ? Direction::PredictHead : Direction::PredictTail;
  Triple query;
  query.relation = resolve_relation(ckpt.vocab, rel_tok);
  query.head = head_tok == "?" ? 0 : resolve_entity(ckpt.vocab, head_tok);
  query.tail = tail_tok == "?" ? 0 : resolve_entity(ckpt.vocab, tail_tok);

  std::vector<std::uint8_t> masked(static_cast<std::size_t>(ckpt.vocab.num_entities()), 0);
  if (config.filtered) {
    KnowledgeGraphDataset data = load_data_checked(config, "predict --filtered");
    check_vocab_compatible(ckpt, data);
    FilterIndex filter = build_filter_index(data);
    std::span<const std::int32_t> known =
        direction == Direction::PredictTail ? filter.true_tails(query.head, query.relation)
                                            : filter.true_heads(query.relation, query.tail);
    for (std::int32_t id : known) masked[static_cast<std::size_t>(id)] = 1;
  }

  std::vector<double> scores = score_all_candidates(ckpt.params, ckpt.model, query, direction);
  std::vector<std::int32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&scores](std::int32_t a, std::int32_t b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa != sb ? sa > sb : a < b;
  });

  std::printf("query: %s %s %s  (%s)\n", head_tok.c_str(), rel_tok.c_str(), tail_tok.c_str(),
              direction == Direction::PredictTail ? "predict tail" : "predict head");
  int shown = 0;
  for (std::int32_t id : order) {
    if (shown >= config.top_k) break;
    if (masked[static_cast<std::size_t>(id)]) continue;
    ++shown;
    std::printf("%4d  %-40s %14.6f\n", shown, ckpt.vocab.entity_name(id).c_str(),
                scores[static_cast<std::size_t>(id)]);
  }
  return 0;
}

int cmd_inspect(const RunConfig& config) {
  validate_run_config(config);
  Checkpoint ckpt = load_checkpoint_checked(config, "inspect");
  if (config.relations.empty()) {
    throw ConfigError("inspect needs at least one relation name");
  }

  std::vector<std::int32_t> ids;
  ids.reserve(config.relations.size());
  for (const std::string& name : config.relations) {
    ids.push_back(resolve_relation(ckpt.vocab, name));
  }

  for (std::int32_t id : ids) {
    for (Side side : {Side::Head, Side::Tail}) {
      CyclicOrthotope region = realized_region(ckpt.params, id, side);
      const auto& w = region.width();
      const double wmin = *std::min_element(w.begin(), w.end());
      const double wmax = *std::max_element(w.begin(), w.end());
      const double wmean = std::accumulate(w.begin(), w.end(), 0.0) /
                           static_cast<double>(w.size());
      std::printf("%-30s %s width min %.4f  mean %.4f  max %.4f\n",
                  ckpt.vocab.relation_name(id).c_str(), side == Side::Head ? "head" : "tail",
                  wmin, wmean, wmax);
    }
  }

  if (!config.pattern.empty()) {
    const PatternKind kind = parse_pattern(config.pattern);
    PatternReport report = pattern_check(ckpt.params, kind, ids, 10000);
    const double min_slack = *std::min_element(report.slack.begin(), report.slack.end());
    const double max_slack = *std::max_element(report.slack.begin(), report.slack.end());
    std::printf("pattern %s: verdict=%s  slack min %.6f  max %.6f  counterexamples %lld/%lld\n",
                config.pattern.c_str(), report.verdict ? "true" : "false", min_slack, max_slack,
                static_cast<long long>(report.counterexamples),
                static_cast<long long>(report.samples));
  }
  return 0;
}

int cmd_sweep(const RunConfig& config) {
  validate_run_config(config);
  if (config.lambdas.empty()) {
    throw ConfigError("sweep needs at least one lambda value (--lambdas)");
  }
  KnowledgeGraphDataset data = load_data_checked(config, "sweep");

  fs::create_directories(config.out_dir);
  DirLock lock(config.out_dir);

  const std::vector<Triple>& split = pick_split(data, config.split);
  if (split.empty()) throw DataError("split '" + config.split + "' is empty");
  FilterIndex filter = build_filter_index(data);

  const fs::path csv_path = config.out_dir / "sweep.csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw RuntimeFailure("cannot write " + csv_path.string());
  csv << "lambda,mrr,hits1,hits3,hits10,mean_width\n";

  for (double lambda : config.lambdas) {
    TrainConfig tcfg = config.train;
    tcfg.reg_lambda = lambda;
    std::printf("sweep lambda=%g\n", lambda);
    std::fflush(stdout);
    TrainResult result = train(data, config.model, tcfg);
    MetricsReport report = evaluate(result.best_params, config.model, split, filter);
    const double width = mean_realized_width(result.best_params);

    char line[256];
    std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", lambda,
                  report.combined.mrr, report.combined.hits1, report.combined.hits3,
                  report.combined.hits10, width);
    csv << line;
    csv.flush();
    std::printf("  mrr %.4f  h@1 %.4f  h@3 %.4f  h@10 %.4f  mean width %.4f\n",
                report.combined.mrr, report.combined.hits1, report.combined.hits3,
                report.combined.hits10, width);
  }
  std::printf("wrote %s\n", csv_path.string().c_str());
  return 0;
}

}  // namespace core_kge
