#include <doctest.h>

#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "mrlcqa/error.hpp"
#include "mrlcqa/kb.hpp"
#include "reference_interpreter.hpp"

using namespace mrlcqa;

namespace {

std::set<std::string> names(const KnowledgeBase& kb, const EntitySet& s) {
  std::set<std::string> out;
  for (auto e : s) out.insert(kb.entity_name(e));
  return out;
}

}  // namespace

TEST_CASE("select filters objects by type") {
  auto kb = fixtures::case_study_kb();
  CHECK(names(kb, kb.select("China", "flow", "river")) == std::set<std::string>{"Brahmaputra", "Indus", "Yangtze"});
  // Everest is an object of (China, flow, .) but not a river.
  CHECK(names(kb, kb.select("China", "flow", "mountain")) == std::set<std::string>{"Everest"});
  CHECK(kb.select("China", "no_such_relation", "river").empty());
  CHECK(kb.select("Atlantis", "flow", "river").empty());
  CHECK(kb.select("China", "flow", "no_such_type").empty());
}

TEST_CASE("select agrees with a brute-force scan on random KBs") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto kb = fixtures::random_kb(seed);
    for (std::size_t e = 0; e < kb.entity_count(); ++e)
      for (std::size_t r = 0; r < kb.relation_count(); ++r) {
        std::set<std::string> all;
        for (std::size_t t = 0; t < kb.type_count(); ++t) {
          const auto& en = kb.entity_name(static_cast<EntityId>(e));
          const auto& rn = kb.relation_name(static_cast<RelationId>(r));
          const auto& tn = kb.type_name(static_cast<TypeId>(t));
          auto got = kb.select(en, rn, tn);
          CHECK(names(kb, got) == ref::scan_select(kb, en, rn, tn));
          CHECK(std::is_sorted(got.begin(), got.end()));
          CHECK(got == kb.select(en, rn, tn));
          for (const auto& x : names(kb, got)) all.insert(x);
        }
        // Union over types equals all objects of (e, r, .).
        CHECK(all == names(kb, kb.objects(static_cast<EntityId>(e), static_cast<RelationId>(r))));
      }
  }
}

TEST_CASE("select_all groups subjects of a type") {
  auto kb = fixtures::case_study_kb();
  auto m = kb.select_all("river", "flow_inv", "country");
  std::map<std::string, std::set<std::string>> got;
  for (const auto& [k, g] : m) got[kb.entity_name(k)] = names(kb, g);
  CHECK(got == std::map<std::string, std::set<std::string>>{{"Brahmaputra", {"China", "India"}},
                                                            {"Ganges", {"India", "Nepal"}},
                                                            {"Indus", {"China", "India"}},
                                                            {"Yangtze", {"China"}}});
  CHECK(kb.select_all("planet", "flow_inv", "country").empty());

  for (std::uint64_t seed : {4u, 5u}) {
    auto rk = fixtures::random_kb(seed);
    for (std::size_t r = 0; r < rk.relation_count(); ++r) {
      auto map = rk.select_all(0, static_cast<RelationId>(r), 1);
      for (const auto& [s, group] : map) {
        CHECK(rk.type_of(s) == 0);
        CHECK(group == rk.select(s, static_cast<RelationId>(r), 1));
      }
      auto expect = ref::scan_select_all(rk, rk.type_name(0), rk.relation_name(static_cast<RelationId>(r)),
                                         rk.type_name(1));
      CHECK(expect.size() == map.size());
    }
  }
}

TEST_CASE("ids are interned in lexicographic order") {
  auto kb = fixtures::case_study_kb();
  for (std::size_t e = 1; e < kb.entity_count(); ++e)
    CHECK(kb.entity_name(static_cast<EntityId>(e - 1)) < kb.entity_name(static_cast<EntityId>(e)));
}

TEST_CASE("builder rejects untyped entities and conflicting types") {
  KnowledgeBase::Builder b;
  b.add_entity("a", "t");
  CHECK_THROWS_AS(b.add_entity("a", "u"), Error);
  b.add_triple("a", "r", "ghost");
  CHECK_THROWS_AS(b.build(), Error);
}

TEST_CASE("file format round trip and line-numbered errors") {
  auto kb = fixtures::random_kb(9);
  std::stringstream ss;
  kb.write(ss);
  auto again = KnowledgeBase::parse(ss);
  CHECK(again == kb);

  std::istringstream later_types("a r b\n\n# comment\n#type a t\n#type b t\n");
  CHECK(KnowledgeBase::parse(later_types).triples().size() == 1);

  std::istringstream bad("#type a t\n#type b t\na r\n");
  try {
    KnowledgeBase::parse(bad, "bad.kb");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("bad.kb:3") == 0);
  }
  std::istringstream bad_type("#type a\n");
  CHECK_THROWS_AS(KnowledgeBase::parse(bad_type), ParseError);
  std::istringstream undeclared("#type a t\na r zed\n");
  try {
    KnowledgeBase::parse(undeclared);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
