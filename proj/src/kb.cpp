#include "mrlcqa/kb.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mrlcqa/error.hpp"

namespace mrlcqa {

namespace {

const EntitySet kEmptySet;

template <typename Id>
std::optional<Id> find_id(const std::unordered_map<std::string, Id>& index,
                          std::string_view name) {
  auto it = index.find(std::string(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

template <typename Id>
void intern(std::set<std::string> names, std::vector<std::string>& table,
            std::unordered_map<std::string, Id>& index) {
  table.assign(names.begin(), names.end());
  index.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) index.emplace(table[i], static_cast<Id>(i));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> fields;
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

}  // namespace

KnowledgeBase::Builder& KnowledgeBase::Builder::add_entity(std::string entity, std::string type) {
  auto [it, inserted] = entity_types_.emplace(entity, type);
  if (!inserted && it->second != type)
    throw Error("entity '" + entity + "' declared with types '" + it->second + "' and '" + type + "'");
  return *this;
}

KnowledgeBase::Builder& KnowledgeBase::Builder::add_triple(std::string subject, std::string relation,
                                                           std::string object) {
  triples_.emplace_back(std::move(subject), std::move(relation), std::move(object));
  return *this;
}

KnowledgeBase KnowledgeBase::Builder::build() const {
  KnowledgeBase kb;
  std::set<std::string> entities, relations, types;
  for (const auto& [e, t] : entity_types_) {
    entities.insert(e);
    types.insert(t);
  }
  for (const auto& [s, r, o] : triples_) {
    if (!entity_types_.count(s)) throw Error("triple subject '" + s + "' has no declared type");
    if (!entity_types_.count(o)) throw Error("triple object '" + o + "' has no declared type");
    relations.insert(r);
  }
  intern(std::move(entities), kb.entity_names_, kb.entity_index_);
  intern(std::move(relations), kb.relation_names_, kb.relation_index_);
  intern(std::move(types), kb.type_names_, kb.type_index_);

  kb.entity_type_.resize(kb.entity_names_.size());
  kb.by_type_.resize(kb.type_names_.size());
  for (std::size_t e = 0; e < kb.entity_names_.size(); ++e) {
    TypeId t = kb.type_index_.at(entity_types_.at(kb.entity_names_[e]));
    kb.entity_type_[e] = t;
    kb.by_type_[t].push_back(static_cast<EntityId>(e));
  }

  kb.triples_.reserve(triples_.size());
  for (const auto& [s, r, o] : triples_)
    kb.triples_.push_back({kb.entity_index_.at(s), kb.relation_index_.at(r), kb.entity_index_.at(o)});
  std::sort(kb.triples_.begin(), kb.triples_.end());
  kb.triples_.erase(std::unique(kb.triples_.begin(), kb.triples_.end()), kb.triples_.end());
  // Triples are sorted, so each object list comes out sorted.
  for (const Triple& t : kb.triples_) kb.objects_[key(t.subject, t.relation)].push_back(t.object);
  return kb;
}

KnowledgeBase KnowledgeBase::parse(std::istream& in, const std::string& source) {
  Builder builder;
  std::string line;
  std::size_t lineno = 0;
  struct Pending {
    std::size_t line;
    std::string s, r, o;
  };
  std::vector<Pending> pending;
  std::set<std::string> declared;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields[0] == "#type") {
      if (fields.size() != 3) throw ParseError(source, lineno, "expected '#type entity type'");
      try {
        builder.add_entity(fields[1], fields[2]);
        declared.insert(fields[1]);
      } catch (const Error& e) {
        throw ParseError(source, lineno, e.what());
      }
      continue;
    }
    if (fields[0].front() == '#') continue;
    if (fields.size() != 3) throw ParseError(source, lineno, "expected 'subject relation object'");
    pending.push_back({lineno, fields[0], fields[1], fields[2]});
  }
  // Types may be declared after the triples that use them; check references at the end.
  for (const auto& p : pending) {
    if (!declared.count(p.s)) throw ParseError(source, p.line, "undeclared entity '" + p.s + "'");
    if (!declared.count(p.o)) throw ParseError(source, p.line, "undeclared entity '" + p.o + "'");
    builder.add_triple(p.s, p.r, p.o);
  }
  return builder.build();
}

KnowledgeBase KnowledgeBase::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open knowledge base file '" + path + "'");
  return parse(in, path);
}

void KnowledgeBase::write(std::ostream& out) const {
  for (std::size_t e = 0; e < entity_names_.size(); ++e)
    out << "#type " << entity_names_[e] << ' ' << type_names_[entity_type_[e]] << '\n';
  for (const Triple& t : triples_)
    out << entity_names_[t.subject] << ' ' << relation_names_[t.relation] << ' '
        << entity_names_[t.object] << '\n';
}

void KnowledgeBase::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write knowledge base file '" + path + "'");
  write(out);
}

std::optional<EntityId> KnowledgeBase::entity(std::string_view name) const {
  return find_id(entity_index_, name);
}
std::optional<RelationId> KnowledgeBase::relation(std::string_view name) const {
  return find_id(relation_index_, name);
}
std::optional<TypeId> KnowledgeBase::type(std::string_view name) const {
  return find_id(type_index_, name);
}

const EntitySet& KnowledgeBase::entities_of_type(TypeId t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= by_type_.size()) return kEmptySet;
  return by_type_[t];
}

const EntitySet& KnowledgeBase::objects(EntityId e, RelationId r) const {
  auto it = objects_.find(key(e, r));
  return it == objects_.end() ? kEmptySet : it->second;
}

EntitySet KnowledgeBase::select(EntityId e, RelationId r, TypeId t) const {
  EntitySet out;
  for (EntityId x : objects(e, r))
    if (entity_type_[x] == t) out.push_back(x);
  return out;
}

EntitySet KnowledgeBase::select(std::string_view e, std::string_view r, std::string_view t) const {
  auto ei = entity(e);
  auto ri = relation(r);
  auto ti = type(t);
  if (!ei || !ri || !ti) return {};
  return select(*ei, *ri, *ti);
}

EntityMap KnowledgeBase::select_all(TypeId t1, RelationId r, TypeId t2) const {
  EntityMap out;
  for (EntityId s : entities_of_type(t1)) {
    EntitySet group = select(s, r, t2);
    if (!group.empty()) out.emplace_hint(out.end(), s, std::move(group));
  }
  return out;
}

EntityMap KnowledgeBase::select_all(std::string_view t1, std::string_view r,
                                    std::string_view t2) const {
  auto a = type(t1);
  auto ri = relation(r);
  auto b = type(t2);
  if (!a || !ri || !b) return {};
  return select_all(*a, *ri, *b);
}

bool KnowledgeBase::operator==(const KnowledgeBase& other) const {
  return entity_names_ == other.entity_names_ && relation_names_ == other.relation_names_ &&
         type_names_ == other.type_names_ && entity_type_ == other.entity_type_ &&
         triples_ == other.triples_;
}

}  // namespace mrlcqa
