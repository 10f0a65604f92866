#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace mrlcqa {

using EntityId = std::int32_t;
using RelationId = std::int32_t;
using TypeId = std::int32_t;

// Sorted, duplicate-free list of entity ids.
using EntitySet = std::vector<EntityId>;
using EntityMap = std::map<EntityId, EntitySet>;

struct Triple {
  EntityId subject;
  RelationId relation;
  EntityId object;

  auto operator<=>(const Triple&) const = default;
};

/// Immutable in-memory triple store with exactly one type per entity.
///
/// Entity, relation and type names are interned at build time; ids follow the
/// lexicographic order of the names.
/// Lookups by unknown name or id return empty results instead of failing.
class KnowledgeBase {
 public:
  class Builder {
   public:
    // Re-declaring an entity with a different type is an error.
    Builder& add_entity(std::string entity, std::string type);
    Builder& add_triple(std::string subject, std::string relation, std::string object);

    // Throws mrlcqa::Error if a triple references an undeclared entity.
    KnowledgeBase build() const;

   private:
    std::map<std::string, std::string> entity_types_;
    std::vector<std::tuple<std::string, std::string, std::string>> triples_;
  };

  KnowledgeBase() = default;

  // Line format: `subject relation object` per triple, `#type entity type`
  // per entity. Blank lines and other `#` lines are ignored.
  static KnowledgeBase parse(std::istream& in, const std::string& source = "<kb>");
  static KnowledgeBase load(const std::string& path);
  void write(std::ostream& out) const;
  void save(const std::string& path) const;

  std::optional<EntityId> entity(std::string_view name) const;
  std::optional<RelationId> relation(std::string_view name) const;
  std::optional<TypeId> type(std::string_view name) const;

  const std::string& entity_name(EntityId e) const { return entity_names_.at(e); }
  const std::string& relation_name(RelationId r) const { return relation_names_.at(r); }
  const std::string& type_name(TypeId t) const { return type_names_.at(t); }

  TypeId type_of(EntityId e) const { return entity_type_.at(e); }

  std::size_t entity_count() const { return entity_names_.size(); }
  std::size_t relation_count() const { return relation_names_.size(); }
  std::size_t type_count() const { return type_names_.size(); }
  const std::vector<Triple>& triples() const { return triples_; }
  const EntitySet& entities_of_type(TypeId t) const;

  // {x : (e, r, x) in triples, type(x) = t}
  EntitySet select(EntityId e, RelationId r, TypeId t) const;
  EntitySet select(std::string_view e, std::string_view r, std::string_view t) const;

  // {s -> select(s, r, t2) : type(s) = t1, select(s, r, t2) nonempty}
  EntityMap select_all(TypeId t1, RelationId r, TypeId t2) const;
  EntityMap select_all(std::string_view t1, std::string_view r, std::string_view t2) const;

  // All objects of (e, r, ·) regardless of type.
  const EntitySet& objects(EntityId e, RelationId r) const;

  bool operator==(const KnowledgeBase& other) const;

 private:
  static std::uint64_t key(EntityId e, RelationId r) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e)) << 32) |
           static_cast<std::uint32_t>(r);
  }

  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::vector<std::string> type_names_;
  std::unordered_map<std::string, EntityId> entity_index_;
  std::unordered_map<std::string, RelationId> relation_index_;
  std::unordered_map<std::string, TypeId> type_index_;
  std::vector<TypeId> entity_type_;
  std::vector<EntitySet> by_type_;
  std::vector<Triple> triples_;
  std::unordered_map<std::uint64_t, EntitySet> objects_;
};

}  // namespace mrlcqa
