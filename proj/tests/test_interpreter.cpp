#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "mrlcqa/interpreter.hpp"
#include "random_programs.hpp"
#include "reference_interpreter.hpp"

using namespace mrlcqa;

namespace {

EntitySet ids(const KnowledgeBase& kb, std::initializer_list<const char*> names) {
  EntitySet out;
  for (const char* n : names) out.push_back(*kb.entity(n));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("validate") {
  CHECK(validate(parse_program("SELECT(China, flow, river)\nINTERSECTION(India, flow, river)\nCOUNT()")));
  auto empty = validate(Program{});
  CHECK_FALSE(empty);
  CHECK(empty.index == 0);
  auto count_first = validate(parse_program("COUNT"));
  CHECK_FALSE(count_first);
  CHECK(count_first.index == 0);
  auto after_count = validate(parse_program("SELECT(a, r, t); COUNT; BOOL(a)"));
  CHECK_FALSE(after_count);
  CHECK(after_count.index == 2);
  CHECK_FALSE(validate(parse_program("SELECT(a, r, t); ARGMAX")));
  CHECK_FALSE(validate(parse_program("SELECT_ALL(t, r, u); UNION(a, r, t)")));
  CHECK(validate(parse_program("SELECT_ALL(t, r, u); GREATER_THAN(2); COUNT")));
  CHECK(validate(parse_program("SELECT_ALL(t, r, u); COUNT")));

  Program bad_arity{{Action{Op::Select, {Arg::name(ArgKind::Entity, "a")}}}};
  CHECK_FALSE(validate(bad_arity));
  Program bad_kind{{Action{Op::Bool, {Arg::name(ArgKind::Type, "a")}}}};
  CHECK_FALSE(validate(bad_kind));
}

TEST_CASE("program text round trip") {
  const char* text =
      "SELECT(ENT_1, REL_2, TYPE_1)\nUNION(China, flow, river)\nBOOL(ENT_3)\n";
  auto p = parse_program(text);
  CHECK(to_string(p) == text);
  CHECK(parse_program(to_string(p)) == p);
  auto q = parse_program("SELECT_ALL(TYPE_1, REL_1, TYPE_2)\nGREATER_THAN(NUM_1)\nLESS_THAN(3)\nCOUNT()\n");
  CHECK(q.actions[1].args[0].is_slot());
  CHECK(q.actions[2].args[0].number == 3);
  CHECK(parse_program(to_string(q)) == q);
  CHECK_THROWS_AS(parse_program("FLY(a)"), ParseError);
  CHECK_THROWS_AS(parse_program("SELECT(a, b)"), ParseError);
  CHECK_THROWS_AS(parse_program("GREATER_THAN(x)"), ParseError);
}

TEST_CASE("execute: case-study logical question") {
  auto kb = fixtures::case_study_kb();
  auto mrl = parse_program(
      "SELECT(SergioPiacentini, occupation_of, occupation)\n"
      "UNION(AntoinetteSandbach, position_held, occupation)");
  CHECK(std::get<EntitySet>(execute(mrl, kb)) ==
        ids(kb, {"MemberOfTheNationalAssemblyForWales", "AssociationFootballManager", "AssociationFootballPlayer"}));
  auto pg = parse_program(
      "SELECT(SergioPiacentini, position_held, occupation)\n"
      "UNION(AntoinetteSandbach, position_held, occupation)");
  CHECK(std::get<EntitySet>(execute(pg, kb)) == ids(kb, {"MemberOfTheNationalAssemblyForWales"}));
}

TEST_CASE("execute: case-study verification question") {
  auto kb = fixtures::case_study_kb();
  auto p = parse_program(
      "SELECT(HermineMospointner, country_of_citizenship, political_territory)\n"
      "BOOL(Valdeobispo)\nBOOL(Austria)");
  CHECK(std::get<BoolList>(execute(p, kb)).values == std::vector<bool>{false, true});
}

TEST_CASE("execute: rivers through India and China") {
  auto kb = fixtures::case_study_kb();
  auto p = parse_program("SELECT(China, flow, river); INTERSECTION(India, flow, river); COUNT");
  CHECK(std::get<Count>(execute(p, kb)).value == 2);
  auto diff = parse_program("SELECT(China, flow, river); DIFFERENCE(China, flow, river)");
  CHECK(std::get<EntitySet>(execute(diff, kb)).empty());
}

TEST_CASE("execute: map operators") {
  auto kb = fixtures::case_study_kb();
  auto most = parse_program("SELECT_ALL(river, flow_inv, country); ARGMIN");
  CHECK(std::get<EntitySet>(execute(most, kb)) == ids(kb, {"Yangtze"}));
  auto two = parse_program("SELECT_ALL(river, flow_inv, country); EQUAL_TO(2)");
  CHECK(std::get<EntitySet>(execute(two, kb)) == ids(kb, {"Brahmaputra", "Ganges", "Indus"}));
  auto count_keys = parse_program("SELECT_ALL(river, flow_inv, country); COUNT");
  CHECK(std::get<Count>(execute(count_keys, kb)).value == 4);
  auto gt = parse_program("SELECT_ALL(river, flow_inv, country); GREATER_THAN(1); COUNT");
  CHECK(std::get<Count>(execute(gt, kb)).value == 3);
}

TEST_CASE("execute: slots resolve through the artifact table") {
  auto kb = fixtures::case_study_kb();
  ArtifactTable art{{"China", "India"}, {"flow"}, {"river"}, {}};
  auto p = parse_program("SELECT(ENT_1, REL_1, TYPE_1); INTERSECTION(ENT_2, REL_1, TYPE_1); COUNT");
  CHECK(std::get<Count>(execute(p, kb, art)).value == 2);
  auto bad = parse_program("SELECT(ENT_1, REL_1, TYPE_1); UNION(ENT_3, REL_1, TYPE_1)");
  try {
    execute(bad, kb, art);
    FAIL("expected ExecutionError");
  } catch (const ExecutionError& e) {
    CHECK(e.action_index() == 1);
  }
  CHECK_THROWS_AS(execute(parse_program("COUNT"), kb), ExecutionError);
}

TEST_CASE("execute agrees with the reference evaluator on random programs") {
  for (std::uint64_t seed : {11u, 12u}) {
    auto kb = fixtures::random_kb(seed);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 500; ++i) {
      auto p = fixtures::random_valid_program(kb, rng, 4);
      REQUIRE(validate(p));
      auto got = execute(p, kb);
      INFO(to_string(p));
      CHECK(got == ref::evaluate(p, kb));
      CHECK(got == execute(p, kb));
    }
  }
}

TEST_CASE("reward") {
  auto kb = fixtures::case_study_kb();
  EntitySet ab = ids(kb, {"China", "India"});
  EntitySet a = ids(kb, {"China"});
  CHECK(reward(ab, ab) == 1.0);
  CHECK(reward(a, ab) == 0.5);
  CHECK(reward(Count{5}, a) == 0.0);
  CHECK(reward(BoolList{{true, false}}, BoolList{{true, true}}) == 0.5);
  CHECK(reward(BoolList{{true}}, BoolList{{true, true}}) == 0.0);
  CHECK(reward(EntitySet{}, EntitySet{}) == 1.0);
  CHECK(reward(Count{3}, Count{3}) == 1.0);
  CHECK(reward(Count{3}, Count{4}) == 0.0);
}

TEST_CASE("answer_f1") {
  auto kb = fixtures::case_study_kb();
  EntitySet abc = ids(kb, {"China", "India", "Nepal"});
  EntitySet a = ids(kb, {"China"});
  // precision 1, recall 1/3
  CHECK(answer_f1(a, abc) == doctest::Approx(0.5));
  CHECK(answer_f1(EntitySet{}, abc) == 0.0);
  CHECK(answer_f1(Count{2}, Count{2}) == 1.0);
  CHECK(answer_f1(BoolList{{false, true}}, BoolList{{false, false}}) == 0.5);
}
