#pragma once

#include <random>
#include <string>

#include "mrlcqa/kb.hpp"

namespace fixtures {

// Hand-built KB with the rivers example and the two case-study questions.
inline mrlcqa::KnowledgeBase case_study_kb() {
  mrlcqa::KnowledgeBase::Builder b;
  b.add_entity("China", "country").add_entity("India", "country").add_entity("Nepal", "country");
  b.add_entity("Ganges", "river").add_entity("Brahmaputra", "river").add_entity("Yangtze", "river");
  b.add_entity("Indus", "river").add_entity("Everest", "mountain");
  b.add_triple("China", "flow", "Brahmaputra").add_triple("China", "flow", "Yangtze");
  b.add_triple("China", "flow", "Indus").add_triple("China", "flow", "Everest");
  b.add_triple("India", "flow", "Ganges").add_triple("India", "flow", "Brahmaputra");
  b.add_triple("India", "flow", "Indus").add_triple("Nepal", "flow", "Ganges");
  b.add_triple("Ganges", "flow_inv", "India").add_triple("Ganges", "flow_inv", "Nepal");
  b.add_triple("Brahmaputra", "flow_inv", "China").add_triple("Brahmaputra", "flow_inv", "India");
  b.add_triple("Yangtze", "flow_inv", "China").add_triple("Indus", "flow_inv", "China");
  b.add_triple("Indus", "flow_inv", "India");

  b.add_entity("SergioPiacentini", "person").add_entity("AntoinetteSandbach", "person");
  b.add_entity("HermineMospointner", "person");
  b.add_entity("MemberOfTheNationalAssemblyForWales", "occupation");
  b.add_entity("AssociationFootballManager", "occupation");
  b.add_entity("AssociationFootballPlayer", "occupation");
  b.add_entity("Valdeobispo", "political_territory").add_entity("Austria", "political_territory");
  b.add_triple("SergioPiacentini", "occupation_of", "AssociationFootballManager");
  b.add_triple("SergioPiacentini", "occupation_of", "AssociationFootballPlayer");
  b.add_triple("AntoinetteSandbach", "position_held", "MemberOfTheNationalAssemblyForWales");
  b.add_triple("HermineMospointner", "country_of_citizenship", "Austria");
  return b.build();
}

// Seeded random KB: 4 types, 8 entities per type, 5 relations, ~400 triples.
inline mrlcqa::KnowledgeBase random_kb(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  mrlcqa::KnowledgeBase::Builder b;
  const int types = 4, per_type = 8, relations = 5, triples = 400;
  std::vector<std::string> names;
  for (int t = 0; t < types; ++t)
    for (int i = 0; i < per_type; ++i) {
      names.push_back("e" + std::to_string(t) + "_" + std::to_string(i));
      b.add_entity(names.back(), "t" + std::to_string(t));
    }
  std::uniform_int_distribution<int> ent(0, static_cast<int>(names.size()) - 1);
  std::uniform_int_distribution<int> rel(0, relations - 1);
  for (int k = 0; k < triples; ++k) b.add_triple(names[ent(rng)], "r" + std::to_string(rel(rng)), names[ent(rng)]);
  return b.build();
}

}  // namespace fixtures
