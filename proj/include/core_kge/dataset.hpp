#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace core_kge {

/// Bijective symbol <-> id maps for entities and relations. Ids are dense and
/// assigned by first appearance.
class Vocabulary {
 public:
  std::int32_t add_entity(const std::string& name);
  std::int32_t add_relation(const std::string& name);

  std::optional<std::int32_t> entity_id(const std::string& name) const;
  std::optional<std::int32_t> relation_id(const std::string& name) const;

  const std::string& entity_name(std::int32_t id) const;
  const std::string& relation_name(std::int32_t id) const;

  std::int32_t num_entities() const { return static_cast<std::int32_t>(entity_names_.size()); }
  std::int32_t num_relations() const { return static_cast<std::int32_t>(relation_names_.size()); }

  const std::vector<std::string>& entity_names() const { return entity_names_; }
  const std::vector<std::string>& relation_names() const { return relation_names_; }

  bool operator==(const Vocabulary& other) const {
    return entity_names_ == other.entity_names_ && relation_names_ == other.relation_names_;
  }

 private:
  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, std::int32_t> entity_ids_;
  std::unordered_map<std::string, std::int32_t> relation_ids_;
};

struct Triple {
  std::int32_t head = 0;
  std::int32_t relation = 0;
  std::int32_t tail = 0;

  bool operator==(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::size_t h = static_cast<std::uint32_t>(t.head);
    h = h * 1000003u ^ static_cast<std::uint32_t>(t.relation);
    h = h * 1000003u ^ static_cast<std::uint32_t>(t.tail);
    return h;
  }
};

struct KnowledgeGraphDataset {
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  Vocabulary vocab;
  std::size_t duplicates_dropped = 0;  // within-split duplicates removed on load
};

struct DatasetStats {
  std::int64_t entities = 0;
  std::int64_t relations = 0;
  std::int64_t train = 0;
  std::int64_t valid = 0;
  std::int64_t test = 0;
};

/// Parses a tab-separated triple file (head TAB relation TAB tail, UTF-8,
/// optional trailing \r). Returns triples in file order, duplicates included.
/// When vocab is absent a fresh vocabulary is built by first appearance; when
/// present it is extended, or consulted read-only in strict mode where an
/// unknown symbol raises DataError. Malformed lines raise DataError with the
/// line number.
std::pair<std::vector<Triple>, Vocabulary> load_triples(
    const std::filesystem::path& path, std::optional<Vocabulary> vocab = std::nullopt,
    bool strict = false);

/// Loads train.txt / valid.txt / test.txt from a dataset directory into one
/// shared vocabulary (ids by first appearance: train, then valid, then test).
/// Within-split duplicates are dropped and counted.
KnowledgeGraphDataset load_dataset(const std::filesystem::path& dir);

DatasetStats dataset_stats(const KnowledgeGraphDataset& dataset);

/// Known-true completions over train + valid + test, for the filtered ranking
/// protocol. Candidate lists are sorted for binary search.
class FilterIndex {
 public:
  /// All true tails t such that (head, relation, t) appears in some split.
  std::span<const std::int32_t> true_tails(std::int32_t head, std::int32_t relation) const;
  /// All true heads h such that (h, relation, tail) appears in some split.
  std::span<const std::int32_t> true_heads(std::int32_t relation, std::int32_t tail) const;

  bool is_true_tail(std::int32_t head, std::int32_t relation, std::int32_t tail) const;
  bool is_true_head(std::int32_t head, std::int32_t relation, std::int32_t tail) const;

  std::size_t total_tail_entries() const;
  std::size_t total_head_entries() const;

  friend FilterIndex build_filter_index(const KnowledgeGraphDataset& dataset);

 private:
  static std::uint64_t key(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> tails_;  // (h,r) -> tails
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> heads_;  // (r,t) -> heads
};

FilterIndex build_filter_index(const KnowledgeGraphDataset& dataset);

}  // namespace core_kge
