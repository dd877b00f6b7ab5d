// Copyright 2026 The kfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kfuse/kg_store.h"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "kfuse/text.h"

namespace kfuse {
namespace {

using nlohmann::json;

std::vector<std::string> StringArray(const json &obj, const char *key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) {
    throw KgError(std::string("field '") + key + "' must be an array");
  }
  for (const json &v : *it) {
    if (!v.is_string()) {
      throw KgError(std::string("field '") + key + "' must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string OptionalString(const json &obj, const char *key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw KgError(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

void CleanAliases(EntityRecord &record) {
  std::vector<std::string> kept;
  std::unordered_set<std::string> seen{record.label};
  for (std::string &alias : record.aliases) {
    if (alias.empty() || !seen.insert(alias).second) continue;
    kept.push_back(std::move(alias));
  }
  record.aliases = std::move(kept);
}

EntityRecord RecordFromJson(const json &obj) {
  if (!obj.is_object()) throw KgError("record must be a JSON object");
  EntityRecord record;
  record.id = OptionalString(obj, "id");
  record.label = OptionalString(obj, "label");
  if (record.id.empty()) throw KgError("missing or empty 'id'");
  if (record.label.empty()) throw KgError("missing or empty 'label'");
  record.aliases = StringArray(obj, "aliases");
  record.description = OptionalString(obj, "description");
  record.instance_of = StringArray(obj, "instance_of");
  record.subclass_of = StringArray(obj, "subclass_of");
  return record;
}

bool IsBlank(const std::string &line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

const char *CategoryName(Category category) {
  switch (category) {
    case Category::kAlias:
      return "ALIAS";
    case Category::kCat:
      return "CAT";
    case Category::kDesc:
      return "DESC";
  }
  return "?";
}

Category CategoryOfRelation(std::string_view relation) {
  if (relation == kRelationAlias) return Category::kAlias;
  if (relation == kRelationInstanceOf || relation == kRelationSubclassOf) {
    return Category::kCat;
  }
  if (relation == kRelationDescription) return Category::kDesc;
  throw KgError("unknown relation '" + std::string(relation) + "'");
}

CategorySet CategorySet::Parse(std::string_view list) {
  CategorySet set;
  size_t pos = 0;
  while (pos <= list.size()) {
    size_t comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    std::string item = Normalize(list.substr(pos, comma - pos));
    if (item == "alias") {
      set.Insert(Category::kAlias);
    } else if (item == "cat") {
      set.Insert(Category::kCat);
    } else if (item == "desc") {
      set.Insert(Category::kDesc);
    } else if (!item.empty()) {
      throw std::invalid_argument("unknown knowledge category '" + item +
                                  "' (expected alias, cat or desc)");
    }
    pos = comma + 1;
  }
  return set;
}

KgStore KgStore::FromRecords(std::vector<EntityRecord> records) {
  KgStore store;
  std::sort(records.begin(), records.end(),
            [](const EntityRecord &a, const EntityRecord &b) {
              return a.id < b.id;
            });
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].id.empty()) throw KgError("record with empty id");
    if (records[i].label.empty()) {
      throw KgError("record '" + records[i].id + "' has an empty label");
    }
    if (i > 0 && records[i].id == records[i - 1].id) {
      throw KgError("duplicate id '" + records[i].id + "'");
    }
    CleanAliases(records[i]);
  }
  store.records_ = std::move(records);

  for (size_t i = 0; i < store.records_.size(); ++i) {
    const EntityRecord &record = store.records_[i];
    store.by_id_.emplace(record.id, i);
    auto index_surface = [&](const std::string &surface) {
      TokenSequence seq = Tokenize(surface);
      std::string key = NormalizeTokens(seq.tokens, 0, seq.tokens.size());
      // Surfaces made only of punctuation cannot be matched.
      if (key.empty()) return;
      std::vector<std::string> &ids = store.surface_index_[key];
      if (ids.empty() || ids.back() != record.id) ids.push_back(record.id);
      size_t words = size_t(std::count(key.begin(), key.end(), ' ')) + 1;
      store.max_surface_tokens_ = std::max(store.max_surface_tokens_, words);
    };
    index_surface(record.label);
    for (const std::string &alias : record.aliases) index_surface(alias);
  }
  // Records are visited in id order, so every id list is already sorted.
  return store;
}

const EntityRecord *KgStore::Find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

const std::vector<std::string> *KgStore::FindKey(const std::string &key) const {
  auto it = surface_index_.find(key);
  return it == surface_index_.end() ? nullptr : &it->second;
}

std::vector<const EntityRecord *> KgStore::LookupSurface(
    std::string_view surface) const {
  std::vector<const EntityRecord *> out;
  const std::vector<std::string> *ids = FindKey(Normalize(surface));
  if (ids == nullptr) return out;
  out.reserve(ids->size());
  for (const std::string &id : *ids) out.push_back(Find(id));
  return out;
}

std::vector<Triplet> KgStore::TripletsOf(std::string_view id,
                                         CategorySet excluded) const {
  const EntityRecord *record = Find(id);
  if (record == nullptr) {
    throw KgError("unknown entity id '" + std::string(id) + "'");
  }
  return TripletsOfRecord(*record, excluded);
}

std::vector<Triplet> KgStore::TripletsOfRecord(const EntityRecord &entity,
                                               CategorySet excluded) const {
  const EntityRecord *record = &entity;
  std::vector<Triplet> out;
  auto add = [&](std::string_view relation, const std::string &object,
                 Category category) {
    if (excluded.Contains(category) || object.empty()) return;
    out.push_back({record->id, std::string(relation), object, category});
  };
  auto resolve = [&](const std::string &target) -> const std::string & {
    const EntityRecord *ref = Find(target);
    return ref != nullptr ? ref->label : target;
  };
  for (const std::string &alias : record->aliases) {
    add(kRelationAlias, alias, Category::kAlias);
  }
  for (const std::string &target : record->instance_of) {
    add(kRelationInstanceOf, resolve(target), Category::kCat);
  }
  for (const std::string &target : record->subclass_of) {
    add(kRelationSubclassOf, resolve(target), Category::kCat);
  }
  add(kRelationDescription, record->description, Category::kDesc);
  return out;
}

KgStore LoadKg(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw KgError("cannot open knowledge graph '" + path + "'");
  std::vector<EntityRecord> records;
  std::unordered_map<std::string, uint64_t> first_line;
  std::string line;
  uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (IsBlank(line)) continue;
    EntityRecord record;
    try {
      record = RecordFromJson(json::parse(line));
    } catch (const json::exception &e) {
      throw KgError(path + ":" + std::to_string(line_number) +
                    ": malformed record: " + e.what());
    } catch (const KgError &e) {
      throw KgError(path + ":" + std::to_string(line_number) +
                    ": malformed record: " + e.what());
    }
    auto [it, inserted] = first_line.emplace(record.id, line_number);
    if (!inserted) {
      throw KgError(path + ":" + std::to_string(line_number) +
                    ": duplicate id '" + record.id + "' (first seen on line " +
                    std::to_string(it->second) + ")");
    }
    records.push_back(std::move(record));
  }
  return KgStore::FromRecords(std::move(records));
}

std::string RecordToJsonLine(const EntityRecord &record) {
  nlohmann::ordered_json obj;
  obj["id"] = record.id;
  obj["label"] = record.label;
  obj["aliases"] = record.aliases;
  obj["description"] = record.description;
  obj["instance_of"] = record.instance_of;
  obj["subclass_of"] = record.subclass_of;
  return obj.dump();
}

void SaveKg(const KgStore &store, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw KgError("cannot write knowledge graph '" + path + "'");
  for (const EntityRecord &record : store.records()) {
    out << RecordToJsonLine(record) << '\n';
  }
  if (!out) throw KgError("write failed for '" + path + "'");
}

namespace {

// Target id of one claims.P31 / claims.P279 entry. Accepts a bare id
// string, {"id": ...}, or the full mainsnak form of the Wikidata dump.
std::string ClaimTarget(const json &claim) {
  if (claim.is_string()) return claim.get<std::string>();
  if (!claim.is_object()) return {};
  if (auto id = claim.find("id"); id != claim.end() && id->is_string()) {
    return id->get<std::string>();
  }
  const json *cursor = &claim;
  for (const char *key : {"mainsnak", "datavalue", "value", "id"}) {
    auto it = cursor->find(key);
    if (it == cursor->end()) return {};
    cursor = &*it;
  }
  return cursor->is_string() ? cursor->get<std::string>() : std::string();
}

std::vector<std::string> ClaimTargets(const json &entity, const char *property) {
  std::vector<std::string> out;
  auto claims = entity.find("claims");
  if (claims == entity.end() || !claims->is_object()) return out;
  auto list = claims->find(property);
  if (list == claims->end() || !list->is_array()) return out;
  for (const json &claim : *list) {
    std::string target = ClaimTarget(claim);
    if (!target.empty() &&
        std::find(out.begin(), out.end(), target) == out.end()) {
      out.push_back(std::move(target));
    }
  }
  return out;
}

std::string EnglishValue(const json &entity, const char *field) {
  auto it = entity.find(field);
  if (it == entity.end() || !it->is_object()) return {};
  auto en = it->find("en");
  if (en == it->end() || !en->is_object()) return {};
  auto value = en->find("value");
  if (value == en->end() || !value->is_string()) return {};
  return value->get<std::string>();
}

std::vector<std::string> EnglishAliases(const json &entity) {
  std::vector<std::string> out;
  auto it = entity.find("aliases");
  if (it == entity.end() || !it->is_object()) return out;
  auto en = it->find("en");
  if (en == it->end() || !en->is_array()) return out;
  for (const json &alias : *en) {
    if (alias.is_object()) {
      auto value = alias.find("value");
      if (value != alias.end() && value->is_string()) {
        out.push_back(value->get<std::string>());
      }
    } else if (alias.is_string()) {
      out.push_back(alias.get<std::string>());
    }
  }
  return out;
}

}  // namespace

IngestStats IngestWikidata(const std::string &raw_path,
                           const std::set<std::string> &domain_allowlist,
                           const std::string &out_path) {
  std::ifstream in(raw_path);
  if (!in) throw KgError("cannot open raw dump '" + raw_path + "'");
  std::ofstream out(out_path);
  if (!out) throw KgError("cannot write '" + out_path + "'");

  IngestStats stats;
  std::unordered_set<std::string> seen_ids;
  auto drop = [&](const char *reason) {
    ++stats.dropped;
    ++stats.drop_reasons[reason];
  };

  std::string line;
  while (std::getline(in, line)) {
    // Full dumps wrap the records in a JSON array, one per line.
    size_t end = line.find_last_not_of(" \t\r\n");
    if (end == std::string::npos) continue;
    line.resize(end + 1);
    if (line == "[" || line == "]") continue;
    if (line.back() == ',') line.pop_back();

    json entity;
    try {
      entity = json::parse(line);
    } catch (const json::exception &) {
      drop("parse_error");
      continue;
    }
    if (!entity.is_object()) {
      drop("parse_error");
      continue;
    }
    auto id_it = entity.find("id");
    if (id_it == entity.end() || !id_it->is_string() ||
        id_it->get<std::string>().empty()) {
      drop("missing_id");
      continue;
    }
    EntityRecord record;
    record.id = id_it->get<std::string>();
    record.label = EnglishValue(entity, "labels");
    if (record.label.empty()) {
      drop("no_english_label");
      continue;
    }
    record.instance_of = ClaimTargets(entity, "P31");
    record.subclass_of = ClaimTargets(entity, "P279");
    auto in_domain = [&](const std::vector<std::string> &targets) {
      return std::any_of(targets.begin(), targets.end(),
                         [&](const std::string &t) {
                           return domain_allowlist.count(t) > 0;
                         });
    };
    if (!in_domain(record.instance_of) && !in_domain(record.subclass_of)) {
      drop("out_of_domain");
      continue;
    }
    if (!seen_ids.insert(record.id).second) {
      drop("duplicate_id");
      continue;
    }
    record.aliases = EnglishAliases(entity);
    record.description = EnglishValue(entity, "descriptions");
    CleanAliases(record);
    out << RecordToJsonLine(record) << '\n';
    ++stats.kept;
  }
  if (!out) throw KgError("write failed for '" + out_path + "'");
  return stats;
}

std::set<std::string> LoadAllowlist(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw KgError("cannot open allowlist '" + path + "'");
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (size_t hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    size_t b = line.find_first_not_of(" \t\r\n,");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t\r\n,");
    ids.insert(line.substr(b, e - b + 1));
  }
  return ids;
}

}  // namespace kfuse
