#include "core_kge/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core_kge/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian; big-endian hosts are unsupported");

namespace core_kge {

namespace {

using json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

struct ArrayRef {
  std::string name;
  const std::vector<double>* data;
};

void collect_param_arrays(const Parameters& params, std::vector<ArrayRef>& out) {
  out.push_back({"entity_base", &params.entities.base});
  out.push_back({"entity_bump", &params.entities.bump});
  out.push_back({"rel_head_center", &params.relations.head_center_raw});
  out.push_back({"rel_head_width", &params.relations.head_width_raw});
  out.push_back({"rel_tail_center", &params.relations.tail_center_raw});
  out.push_back({"rel_tail_width", &params.relations.tail_width_raw});
}

void collect_moment_arrays(const GradBuffer& buf, const std::string& prefix,
                           std::vector<ArrayRef>& out) {
  out.push_back({prefix + "entity_base", &buf.entity_base});
  out.push_back({prefix + "entity_bump", &buf.entity_bump});
  out.push_back({prefix + "rel_head_center", &buf.rel_head_center});
  out.push_back({prefix + "rel_head_width", &buf.rel_head_width});
  out.push_back({prefix + "rel_tail_center", &buf.rel_tail_center});
  out.push_back({prefix + "rel_tail_width", &buf.rel_tail_width});
}

std::vector<double>* param_array_slot(Parameters& params, OptimizerState* opt,
                                      const std::string& name) {
  if (name == "entity_base") return &params.entities.base;
  if (name == "entity_bump") return &params.entities.bump;
  if (name == "rel_head_center") return &params.relations.head_center_raw;
  if (name == "rel_head_width") return &params.relations.head_width_raw;
  if (name == "rel_tail_center") return &params.relations.tail_center_raw;
  if (name == "rel_tail_width") return &params.relations.tail_width_raw;
  if (opt != nullptr) {
    for (auto [prefix, buf] : {std::pair{"adam_m_", &opt->m}, std::pair{"adam_v_", &opt->v}}) {
      const std::string p(prefix);
      if (name == p + "entity_base") return &buf->entity_base;
      if (name == p + "entity_bump") return &buf->entity_bump;
      if (name == p + "rel_head_center") return &buf->rel_head_center;
      if (name == p + "rel_head_width") return &buf->rel_head_width;
      if (name == p + "rel_tail_center") return &buf->rel_tail_center;
      if (name == p + "rel_tail_width") return &buf->rel_tail_width;
    }
  }
  return nullptr;
}

std::int64_t expected_array_size(const std::string& name, std::int64_t entities,
                                 std::int64_t relations, int dim) {
  const bool is_entity =
      name.find("entity_") != std::string::npos;
  return (is_entity ? entities : relations) * dim;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::vector<ArrayRef> arrays;
  collect_param_arrays(ckpt.params, arrays);
  if (ckpt.optimizer.has_value()) {
    collect_moment_arrays(ckpt.optimizer->m, "adam_m_", arrays);
    collect_moment_arrays(ckpt.optimizer->v, "adam_v_", arrays);
  }

  const std::filesystem::path blob_path = path.string() + ".bin";

  json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["model"] = {{"dim", ckpt.model.dim},
                       {"norm", norm_name(ckpt.model.norm)},
                       {"torus_enabled", ckpt.model.torus_enabled},
                       {"bump_enabled", ckpt.model.bump_enabled},
                       {"seed", ckpt.model.seed}};
  manifest["entities"] = ckpt.params.entities.count;
  manifest["relations"] = ckpt.params.relations.count;
  manifest["step"] = ckpt.step;
  manifest["blob"] = blob_path.filename().string();
  if (ckpt.optimizer.has_value()) manifest["optimizer_step"] = ckpt.optimizer->step;

  json array_list = json::array();
  std::uint64_t offset = 0;
  for (const ArrayRef& a : arrays) {
    array_list.push_back({{"name", a.name},
                          {"offset", offset},
                          {"count", a.data->size()},
                          {"dtype", "float64-le"}});
    offset += a.data->size() * sizeof(double);
  }
  manifest["arrays"] = std::move(array_list);

  json vocab;
  vocab["entities"] = ckpt.vocab.entity_names();
  vocab["relations"] = ckpt.vocab.relation_names();
  manifest["vocabulary"] = std::move(vocab);

  {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write checkpoint manifest: " + path.string());
    out << manifest.dump(2) << "\n";
    if (!out) throw RuntimeFailure("failed writing checkpoint manifest: " + path.string());
  }
  {
    std::ofstream out(blob_path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write checkpoint blob: " + blob_path.string());
    for (const ArrayRef& a : arrays) {
      out.write(reinterpret_cast<const char*>(a.data->data()),
                static_cast<std::streamsize>(a.data->size() * sizeof(double)));
    }
    if (!out) throw RuntimeFailure("failed writing checkpoint blob: " + blob_path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint manifest: " + path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint manifest " + path.string() + ": " + e.what());
  }

  Checkpoint ckpt;
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw DataError("unsupported checkpoint format version " + std::to_string(version) +
                      " in " + path.string());
    }
    const json& m = manifest.at("model");
    ckpt.model.dim = m.at("dim").get<int>();
    ckpt.model.norm = parse_norm(m.at("norm").get<std::string>());
    ckpt.model.torus_enabled = m.at("torus_enabled").get<bool>();
    ckpt.model.bump_enabled = m.at("bump_enabled").get<bool>();
    ckpt.model.seed = m.at("seed").get<std::uint64_t>();
    ckpt.step = manifest.at("step").get<std::int64_t>();

    const std::int64_t entities = manifest.at("entities").get<std::int64_t>();
    const std::int64_t relations = manifest.at("relations").get<std::int64_t>();
    if (entities < 1 || relations < 1 || ckpt.model.dim < 1) {
      throw DataError("checkpoint " + path.string() + " declares empty model dimensions");
    }

    for (const auto& name : manifest.at("vocabulary").at("entities")) {
      ckpt.vocab.add_entity(name.get<std::string>());
    }
    for (const auto& name : manifest.at("vocabulary").at("relations")) {
      ckpt.vocab.add_relation(name.get<std::string>());
    }
    if (static_cast<std::int64_t>(ckpt.vocab.num_entities()) != entities ||
        static_cast<std::int64_t>(ckpt.vocab.num_relations()) != relations) {
      throw DataError("checkpoint " + path.string() + ": vocabulary size disagrees with counts");
    }

    ckpt.params.entities.count = entities;
    ckpt.params.entities.dim = ckpt.model.dim;
    ckpt.params.relations.count = relations;
    ckpt.params.relations.dim = ckpt.model.dim;
    if (manifest.contains("optimizer_step")) {
      ckpt.optimizer.emplace();
      ckpt.optimizer->step = manifest.at("optimizer_step").get<std::int64_t>();
    }

    const std::filesystem::path blob_path =
        path.parent_path() / manifest.at("blob").get<std::string>();
    std::ifstream blob(blob_path, std::ios::binary);
    if (!blob) throw DataError("cannot open checkpoint blob: " + blob_path.string());

    for (const json& entry : manifest.at("arrays")) {
      const std::string name = entry.at("name").get<std::string>();
      const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
      const std::uint64_t count = entry.at("count").get<std::uint64_t>();
      const std::string dtype = entry.at("dtype").get<std::string>();
      if (dtype != "float64-le") {
        throw DataError("checkpoint array " + name + " has unsupported dtype " + dtype);
      }
      std::vector<double>* slot =
          param_array_slot(ckpt.params, ckpt.optimizer ? &*ckpt.optimizer : nullptr, name);
      if (slot == nullptr) {
        throw DataError("checkpoint " + path.string() + " declares unknown array " + name);
      }
      const std::int64_t expected =
          expected_array_size(name, entities, relations, ckpt.model.dim);
      if (count != static_cast<std::uint64_t>(expected)) {
        throw DataError("checkpoint array " + name + " has " + std::to_string(count) +
                        " values, expected " + std::to_string(expected));
      }
      slot->resize(count);
      blob.seekg(static_cast<std::streamoff>(offset));
      blob.read(reinterpret_cast<char*>(slot->data()),
                static_cast<std::streamsize>(count * sizeof(double)));
      if (!blob) {
        throw DataError("checkpoint blob " + blob_path.string() + " truncated in array " + name);
      }
    }
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint manifest " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError("malformed checkpoint manifest " + path.string() + ": " + e.what());
  }

  const std::size_t expected_entity = static_cast<std::size_t>(ckpt.params.entities.count) *
                                      static_cast<std::size_t>(ckpt.model.dim);
  if (ckpt.params.entities.base.size() != expected_entity ||
      ckpt.params.entities.bump.size() != expected_entity) {
    throw DataError("checkpoint " + path.string() + " is missing entity arrays");
  }
  const std::size_t expected_rel = static_cast<std::size_t>(ckpt.params.relations.count) *
                                   static_cast<std::size_t>(ckpt.model.dim);
  if (ckpt.params.relations.head_center_raw.size() != expected_rel ||
      ckpt.params.relations.head_width_raw.size() != expected_rel ||
      ckpt.params.relations.tail_center_raw.size() != expected_rel ||
      ckpt.params.relations.tail_width_raw.size() != expected_rel) {
    throw DataError("checkpoint " + path.string() + " is missing relation arrays");
  }
  return ckpt;
}

}  // namespace core_kge
