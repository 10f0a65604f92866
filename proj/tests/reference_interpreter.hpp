#pragma once

// Independent evaluator written straight from the operator semantics, over
// entity names and full triple scans. Used as an oracle for execute().

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mrlcqa/answer.hpp"
#include "mrlcqa/kb.hpp"
#include "mrlcqa/program.hpp"

namespace ref {

using Names = std::set<std::string>;

inline Names scan_select(const mrlcqa::KnowledgeBase& kb, const std::string& e, const std::string& r,
                         const std::string& t) {
  Names out;
  for (const auto& tr : kb.triples())
    if (kb.entity_name(tr.subject) == e && kb.relation_name(tr.relation) == r &&
        kb.type_name(kb.type_of(tr.object)) == t)
      out.insert(kb.entity_name(tr.object));
  return out;
}

inline std::map<std::string, Names> scan_select_all(const mrlcqa::KnowledgeBase& kb, const std::string& t1,
                                                    const std::string& r, const std::string& t2) {
  std::map<std::string, Names> out;
  for (std::size_t s = 0; s < kb.entity_count(); ++s) {
    const auto& name = kb.entity_name(static_cast<mrlcqa::EntityId>(s));
    if (kb.type_name(kb.type_of(static_cast<mrlcqa::EntityId>(s))) != t1) continue;
    Names group = scan_select(kb, name, r, t2);
    if (!group.empty()) out[name] = group;
  }
  return out;
}

// Literal-argument programs only.
inline mrlcqa::AnswerValue evaluate(const mrlcqa::Program& p, const mrlcqa::KnowledgeBase& kb) {
  using mrlcqa::Op;
  Names set;
  std::map<std::string, Names> map;
  bool map_on = false;
  std::vector<bool> bools;
  std::optional<long> count;
  for (const auto& a : p.actions) {
    auto s = [&](int i) { return a.args[i].symbol; };
    switch (a.op) {
      case Op::Select:
        set = scan_select(kb, s(0), s(1), s(2));
        map.clear();
        map_on = false;
        break;
      case Op::Union:
        for (const auto& x : scan_select(kb, s(0), s(1), s(2))) set.insert(x);
        break;
      case Op::Intersection: {
        Names other = scan_select(kb, s(0), s(1), s(2)), keep;
        for (const auto& x : set)
          if (other.count(x)) keep.insert(x);
        set = keep;
        break;
      }
      case Op::Difference:
        for (const auto& x : scan_select(kb, s(0), s(1), s(2))) set.erase(x);
        break;
      case Op::Bool:
        bools.push_back(set.count(s(0)) > 0);
        break;
      case Op::Count:
        count = map_on ? static_cast<long>(map.size()) : static_cast<long>(set.size());
        break;
      case Op::SelectAll:
        map = scan_select_all(kb, s(0), s(1), s(2));
        map_on = true;
        break;
      case Op::ArgMax:
      case Op::ArgMin: {
        set.clear();
        if (!map.empty()) {
          std::size_t best = map.begin()->second.size();
          for (const auto& [k, g] : map)
            best = a.op == Op::ArgMax ? std::max(best, g.size()) : std::min(best, g.size());
          for (const auto& [k, g] : map)
            if (g.size() == best) set.insert(k);
        }
        map.clear();
        map_on = false;
        break;
      }
      case Op::GreaterThan:
      case Op::LessThan:
      case Op::EqualTo: {
        set.clear();
        long n = static_cast<long>(a.args[0].number);
        for (const auto& [k, g] : map) {
          long size = static_cast<long>(g.size());
          if ((a.op == Op::GreaterThan && size > n) || (a.op == Op::LessThan && size < n) ||
              (a.op == Op::EqualTo && size == n))
            set.insert(k);
        }
        map.clear();
        map_on = false;
        break;
      }
    }
  }
  if (count) return mrlcqa::Count{*count};
  if (!bools.empty()) return mrlcqa::BoolList{bools};
  mrlcqa::EntitySet ids;
  for (const auto& name : set) ids.push_back(*kb.entity(name));
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace ref
