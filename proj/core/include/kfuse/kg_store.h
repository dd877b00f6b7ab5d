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

#ifndef KFUSE_KG_STORE_H_
#define KFUSE_KG_STORE_H_

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kfuse {

// Raised for malformed knowledge-graph files and invalid lookups.
class KgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One knowledge-graph item restricted to the five retained properties.
struct EntityRecord {
  std::string id;
  std::string label;
  std::vector<std::string> aliases;
  std::string description;
  std::vector<std::string> instance_of;
  std::vector<std::string> subclass_of;

  bool operator==(const EntityRecord &other) const = default;
};

// Knowledge categories used for ablation.
enum class Category : uint8_t { kAlias = 0, kCat = 1, kDesc = 2 };

const char *CategoryName(Category category);

// Relation names as they appear in triplets and in the emitted token stream.
inline constexpr std::string_view kRelationAlias = "alias";
inline constexpr std::string_view kRelationInstanceOf = "instance of";
inline constexpr std::string_view kRelationSubclassOf = "subclass of";
inline constexpr std::string_view kRelationDescription = "description";

// Maps a relation name to its category. Throws KgError for unknown names.
Category CategoryOfRelation(std::string_view relation);

// Small bitset over the three categories.
class CategorySet {
 public:
  CategorySet() = default;
  CategorySet(std::initializer_list<Category> categories) {
    for (Category c : categories) Insert(c);
  }

  static CategorySet All() {
    return {Category::kAlias, Category::kCat, Category::kDesc};
  }

  // Parses a comma separated list of alias|cat|desc (case-insensitive).
  // An empty string yields the empty set.
  static CategorySet Parse(std::string_view list);

  void Insert(Category c) { bits_ |= Bit(c); }
  bool Contains(Category c) const { return (bits_ & Bit(c)) != 0; }
  bool empty() const { return bits_ == 0; }

  bool operator==(const CategorySet &other) const = default;

 private:
  static uint8_t Bit(Category c) { return uint8_t(1u << uint8_t(c)); }
  uint8_t bits_ = 0;
};

struct Triplet {
  std::string subject;
  std::string relation;
  std::string object_text;
  Category category = Category::kAlias;

  bool operator==(const Triplet &other) const = default;
};

// Immutable, indexed knowledge graph. Records are kept sorted by id and the
// surface index maps normalized labels and aliases to ascending id lists.
class KgStore {
 public:
  KgStore() = default;

  // Builds a store from records. Duplicate ids throw KgError. Aliases that
  // duplicate another alias or the label are dropped.
  static KgStore FromRecords(std::vector<EntityRecord> records);

  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<EntityRecord> &records() const { return records_; }

  // Returns nullptr if the id is unknown.
  const EntityRecord *Find(std::string_view id) const;

  // All records whose normalized label or alias equals Normalize(surface),
  // in ascending id order.
  std::vector<const EntityRecord *> LookupSurface(std::string_view surface) const;

  // Ids indexed under an already-normalized key, or nullptr.
  const std::vector<std::string> *FindKey(const std::string &key) const;

  // Longest indexed surface measured in tokens.
  size_t max_surface_tokens() const { return max_surface_tokens_; }

  // Triplets of a record in fixed relation order (aliases, instance of,
  // subclass of, description) minus the excluded categories. CAT objects
  // resolve to the referenced record's label when it is present in the
  // store. Throws KgError for an unknown id.
  std::vector<Triplet> TripletsOf(std::string_view id,
                                  CategorySet excluded = {}) const;
  std::vector<Triplet> TripletsOfRecord(const EntityRecord &record,
                                        CategorySet excluded = {}) const;

  const std::unordered_map<std::string, std::vector<std::string>> &
  surface_index() const {
    return surface_index_;
  }

 private:
  std::vector<EntityRecord> records_;
  std::unordered_map<std::string, size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::string>> surface_index_;
  size_t max_surface_tokens_ = 0;
};

// Loads the compact JSON Lines format. Blank lines are skipped. Errors name
// the 1-based line number, or the id for duplicates.
KgStore LoadKg(const std::string &path);

// Writes the store in the compact format, one record per line in id order.
void SaveKg(const KgStore &store, const std::string &path);

std::string RecordToJsonLine(const EntityRecord &record);

struct IngestStats {
  uint64_t kept = 0;
  uint64_t dropped = 0;
  std::map<std::string, uint64_t> drop_reasons;

  uint64_t total() const { return kept + dropped; }
};

// Streams Wikidata-style JSON Lines and keeps records that have an English
// label and at least one instance-of or subclass-of target in the
// allowlist. Unparseable lines are dropped with a reason; the stream never
// aborts on bad input. Throws KgError only for I/O failures.
IngestStats IngestWikidata(const std::string &raw_path,
                           const std::set<std::string> &domain_allowlist,
                           const std::string &out_path);

// Reads an allowlist file: one identifier per line, '#' starts a comment.
std::set<std::string> LoadAllowlist(const std::string &path);

}  // namespace kfuse

#endif  // KFUSE_KG_STORE_H_
