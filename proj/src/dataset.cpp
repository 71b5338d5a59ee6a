#include "core_kge/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "core_kge/errors.hpp"

namespace core_kge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<Triple> dedupe_split(std::vector<Triple> triples, std::size_t& dropped) {
  std::unordered_set<Triple, TripleHash> seen;
  seen.reserve(triples.size());
  std::vector<Triple> out;
  out.reserve(triples.size());
  for (const Triple& t : triples) {
    if (seen.insert(t).second) {
      out.push_back(t);
    } else {
      ++dropped;
    }
  }
  return out;
}

}  // namespace

std::int32_t Vocabulary::add_entity(const std::string& name) {
  auto [it, inserted] = entity_ids_.try_emplace(name, num_entities());
  if (inserted) entity_names_.push_back(name);
  return it->second;
}

std::int32_t Vocabulary::add_relation(const std::string& name) {
  auto [it, inserted] = relation_ids_.try_emplace(name, num_relations());
  if (inserted) relation_names_.push_back(name);
  return it->second;
}

std::optional<std::int32_t> Vocabulary::entity_id(const std::string& name) const {
  auto it = entity_ids_.find(name);
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int32_t> Vocabulary::relation_id(const std::string& name) const {
  auto it = relation_ids_.find(name);
  if (it == relation_ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::entity_name(std::int32_t id) const {
  if (id < 0 || id >= num_entities()) throw std::out_of_range("entity id out of range");
  return entity_names_[static_cast<std::size_t>(id)];
}

const std::string& Vocabulary::relation_name(std::int32_t id) const {
  if (id < 0 || id >= num_relations()) throw std::out_of_range("relation id out of range");
  return relation_names_[static_cast<std::size_t>(id)];
}

std::pair<std::vector<Triple>, Vocabulary> load_triples(const std::filesystem::path& path,
                                                        std::optional<Vocabulary> vocab,
                                                        bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open triple file: " + path.string());
  }
  Vocabulary v = vocab ? std::move(*vocab) : Vocabulary{};
  std::vector<Triple> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (trim(sv).empty()) continue;

    auto tab1 = sv.find('\t');
    auto tab2 = tab1 == std::string_view::npos ? std::string_view::npos : sv.find('\t', tab1 + 1);
    auto tab3 = tab2 == std::string_view::npos ? std::string_view::npos : sv.find('\t', tab2 + 1);
    if (tab1 == std::string_view::npos || tab2 == std::string_view::npos ||
        tab3 != std::string_view::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected head<TAB>relation<TAB>tail");
    }
    std::string head(trim(sv.substr(0, tab1)));
    std::string rel(trim(sv.substr(tab1 + 1, tab2 - tab1 - 1)));
    std::string tail(trim(sv.substr(tab2 + 1)));
    if (head.empty() || rel.empty() || tail.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty field");
    }

    Triple t;
    if (strict) {
      auto h = v.entity_id(head);
      auto r = v.relation_id(rel);
      auto ta = v.entity_id(tail);
      if (!h || !r || !ta) {
        const std::string& unknown = !h ? head : (!r ? rel : tail);
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": unknown symbol '" + unknown + "' (strict vocabulary)");
      }
      t = Triple{*h, *r, *ta};
    } else {
      t = Triple{v.add_entity(head), v.add_relation(rel), v.add_entity(tail)};
    }
    triples.push_back(t);
  }
  return {std::move(triples), std::move(v)};
}

KnowledgeGraphDataset load_dataset(const std::filesystem::path& dir) {
  for (const char* name : {"train.txt", "valid.txt", "test.txt"}) {
    if (!std::filesystem::exists(dir / name)) {
      throw DataError("missing split file: " + (dir / name).string());
    }
  }
  KnowledgeGraphDataset ds;
  auto [train, v1] = load_triples(dir / "train.txt");
  auto [valid, v2] = load_triples(dir / "valid.txt", std::move(v1));
  auto [test, v3] = load_triples(dir / "test.txt", std::move(v2));
  ds.vocab = std::move(v3);
  ds.train = dedupe_split(std::move(train), ds.duplicates_dropped);
  ds.valid = dedupe_split(std::move(valid), ds.duplicates_dropped);
  ds.test = dedupe_split(std::move(test), ds.duplicates_dropped);
  return ds;
}

DatasetStats dataset_stats(const KnowledgeGraphDataset& dataset) {
  DatasetStats s;
  s.entities = dataset.vocab.num_entities();
  s.relations = dataset.vocab.num_relations();
  s.train = static_cast<std::int64_t>(dataset.train.size());
  s.valid = static_cast<std::int64_t>(dataset.valid.size());
  s.test = static_cast<std::int64_t>(dataset.test.size());
  return s;
}

FilterIndex build_filter_index(const KnowledgeGraphDataset& dataset) {
  FilterIndex idx;
  for (const auto* split : {&dataset.train, &dataset.valid, &dataset.test}) {
    for (const Triple& t : *split) {
      idx.tails_[FilterIndex::key(t.head, t.relation)].push_back(t.tail);
      idx.heads_[FilterIndex::key(t.relation, t.tail)].push_back(t.head);
    }
  }
  for (auto* map : {&idx.tails_, &idx.heads_}) {
    for (auto& [k, ids] : *map) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
  }
  return idx;
}

std::span<const std::int32_t> FilterIndex::true_tails(std::int32_t head,
                                                      std::int32_t relation) const {
  auto it = tails_.find(key(head, relation));
  if (it == tails_.end()) return {};
  return it->second;
}

std::span<const std::int32_t> FilterIndex::true_heads(std::int32_t relation,
                                                      std::int32_t tail) const {
  auto it = heads_.find(key(relation, tail));
  if (it == heads_.end()) return {};
  return it->second;
}

bool FilterIndex::is_true_tail(std::int32_t head, std::int32_t relation,
                               std::int32_t tail) const {
  auto ids = true_tails(head, relation);
  return std::binary_search(ids.begin(), ids.end(), tail);
}

bool FilterIndex::is_true_head(std::int32_t head, std::int32_t relation,
                               std::int32_t tail) const {
  auto ids = true_heads(relation, tail);
  return std::binary_search(ids.begin(), ids.end(), head);
}

std::size_t FilterIndex::total_tail_entries() const {
  std::size_t n = 0;
  for (const auto& [k, ids] : tails_) n += ids.size();
  return n;
}

std::size_t FilterIndex::total_head_entries() const {
  std::size_t n = 0;
  for (const auto& [k, ids] : heads_) n += ids.size();
  return n;
}

}  // namespace core_kge
