#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fgc/exactseq.hpp"
#include "fgc/structure.hpp"

using namespace fgc;

namespace {

const MultiSortedStructure& z4(int n) {
  static MultiSortedStructure z1 = exactseq::build_z4_example(1).structure;
  static MultiSortedStructure z2 = exactseq::build_z4_example(2).structure;
  return n == 1 ? z1 : z2;
}

// all bijection families, filtered by brute force: the independent oracle
// for the backtracking search on small structures
std::vector<Automorphism> all_perms_oracle(const MultiSortedStructure& m,
                                           const std::vector<std::string>& fixed_sorts) {
  std::vector<Automorphism> out;
  std::vector<std::vector<Mapping>> pools;
  for (const auto& s : m.sorts) {
    std::vector<Mapping> pool;
    bool fixed = std::find(fixed_sorts.begin(), fixed_sorts.end(), s.name) != fixed_sorts.end();
    if (fixed) {
      pool.push_back(Mapping::identity(s.elements));
    } else {
      ElemSet perm = s.elements;
      std::sort(perm.begin(), perm.end());
      do {
        std::vector<std::pair<Elem, Elem>> pairs;
        for (size_t i = 0; i < s.elements.size(); ++i) pairs.emplace_back(s.elements[i], perm[i]);
        pool.push_back(Mapping(pairs));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    pools.push_back(std::move(pool));
  }
  std::vector<size_t> pick(pools.size(), 0);
  for (;;) {
    Automorphism a;
    for (size_t i = 0; i < pools.size(); ++i) a.per_sort[m.sorts[i].name] = pools[i][pick[i]];
    if (is_automorphism(m, a)) out.push_back(a);
    size_t i = 0;
    for (; i < pools.size(); ++i) {
      if (pick[i] + 1 < pools[i].size()) { ++pick[i]; break; }
      pick[i] = 0;
    }
    if (i == pools.size()) break;
  }
  return out;
}

MultiSortedStructure free_two_fiber() {
  // U = {u}, S = {s1, s2}, no relations beyond the fibering
  MultiSortedStructure m;
  m.sorts = {{"U", {"u"}}, {"S", {"s1", "s2"}}};
  m.base_sorts = {"U"};
  m.fiber = FiberMap{"S", {"u"}, Mapping({{"s1", "u"}, {"s2", "u"}})};
  return m;
}

}  // namespace

TEST_CASE("automorphism_group") {
  SECTION("free fiber over a point: 2 automorphisms over the base") {
    auto m = free_two_fiber();
    REQUIRE(validate_structure(m).empty());
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    REQUIRE(automorphism_group(m, opts).size() == 2);
  }
  SECTION("z4(1) over the base: 2 automorphisms, matching the all-permutations oracle") {
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    auto got = automorphism_group(z4(1), opts);
    REQUIRE(got.size() == 2);
    auto oracle = all_perms_oracle(z4(1), {"U"});
    REQUIRE(std::set<Automorphism>(got.begin(), got.end()) ==
            std::set<Automorphism>(oracle.begin(), oracle.end()));
  }
  SECTION("z4(2) over the base: 16 automorphisms, all fiberwise translations") {
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    auto got = automorphism_group(z4(2), opts);
    REQUIRE(got.size() == 16);
    // structural oracle: every automorphism is x -> x + t(pi(x)) with t additive
    const auto& m = z4(2);
    const Relation* s_add = m.relation("S_add");
    for (const auto& a : got) {
      const Mapping& f = a.per_sort.at("S");
      std::map<Elem, Elem> delta;  // fiber -> difference
      for (const auto& [x, y] : f.pairs) {
        Elem d;
        for (const auto& t : s_add->tuples)
          if (t[1] == x && t[2] == y) d = t[0];
        auto [it, fresh] = delta.emplace(m.fiber->map.at(x), d);
        REQUIRE((fresh || it->second == d));
      }
    }
  }
  SECTION("full automorphism group output is a group") {
    auto auts = automorphism_group(z4(1));
    std::set<Automorphism> s(auts.begin(), auts.end());
    REQUIRE(s.count(Automorphism::identity(z4(1))) == 1);
    for (const auto& a : auts) {
      REQUIRE(s.count(inverse(a)) == 1);
      for (const auto& b : auts) REQUIRE(s.count(compose(a, b)) == 1);
    }
  }
  SECTION("fix_sets constraint keeps a subset invariant") {
    auto m = free_two_fiber();
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    opts.fix_sets = {{"S", {"s1"}}};
    REQUIRE(automorphism_group(m, opts).size() == 1);
  }
}

TEST_CASE("restrict_structure") {
  SECTION("restricting z4(1) to base + S_0 pins the kernel fiber") {
    auto sub = restrict_to_fibers(z4(1), {"u0"});
    REQUIRE(sub.sort("S").elements == ElemSet{"s0", "s2"});
    // the kernel fiber is the image of iota, so it is a definable subgroup:
    // its induced structure admits no automorphism over the base
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    REQUIRE(automorphism_group(sub, opts).size() == 1);
    // S_add restricted to S_0 is a group: closed on the kept elements
    const Relation* add = sub.relation("S_add");
    REQUIRE(add != nullptr);
    for (const auto& x : sub.sort("S").elements)
      for (const auto& y : sub.sort("S").elements) {
        int hits = 0;
        for (const auto& t : add->tuples) hits += (t[0] == x && t[1] == y);
        REQUIRE(hits == 1);
      }
  }
  SECTION("restriction with everything kept is idempotent on the automorphism group") {
    RestrictSpec spec;
    for (const auto& s : z4(1).sorts) spec.kept[s.name] = s.elements;
    auto sub = restrict_structure(z4(1), spec);
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    REQUIRE(automorphism_group(sub, opts).size() == automorphism_group(z4(1), opts).size());
  }
  SECTION("independent pair of fibers in z4(2): the translation group is free on both") {
    // a = u10, b = u01 are independent: Aut((U, S_ab) / U) = 4 x 4
    auto sub = restrict_to_fibers(z4(2), {"u01", "u10"});
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    REQUIRE(automorphism_group(sub, opts).size() == 16);
  }
  SECTION("dependent triple in z4(2): additivity cuts the group down") {
    auto sub = restrict_to_fibers(z4(2), {"u01", "u10", "u11"});
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    REQUIRE(automorphism_group(sub, opts).size() == 16);  // = |U|^2, not 4^3
  }
  SECTION("foreign parameters are rejected") {
    RestrictSpec spec;
    spec.kept["U"] = z4(1).sort("U").elements;
    spec.parameters = {"nope"};
    REQUIRE_THROWS_AS(restrict_structure(z4(1), spec), std::out_of_range);
  }
}

TEST_CASE("check_stable_embedding") {
  SECTION("the base inside z4(n) is stably embedded") {
    for (int n : {1, 2}) {
      RestrictSpec spec;
      spec.kept["U"] = z4(n).sort("U").elements;
      auto sub = restrict_structure(z4(n), spec);
      REQUIRE(check_stable_embedding(z4(n), sub).stably_embedded);
    }
  }
  SECTION("local stable embeddedness for small fiber sets in z4(2)") {
    const auto& a_set = z4(2).fiber->base_elements;
    for (const auto& c : nonempty_subsets(a_set)) {
      if (c.size() > 2) continue;
      auto sub = restrict_to_fibers(z4(2), c);
      REQUIRE(check_stable_embedding(z4(2), sub).stably_embedded);
    }
  }
  SECTION("dropping relations breaks stable embeddedness with a transposition witness") {
    MultiSortedStructure m;
    m.sorts = {{"S", {"s1", "s2"}}};
    m.relations.push_back({"named", {"S"}, {{"s1"}}});
    MultiSortedStructure sub;
    sub.sorts = {{"S", {"s1", "s2"}}};
    auto rep = check_stable_embedding(m, sub);
    REQUIRE_FALSE(rep.stably_embedded);
    REQUIRE(rep.non_lifting.has_value());
    REQUIRE(rep.non_lifting->per_sort.at("S").at("s1") == "s2");
  }
}

TEST_CASE("local_global_check") {
  const auto& m = z4(1);
  const ElemSet s_elems = m.sort("S").elements;  // s0 s1 s2 s3
  auto translation = [&](bool on_s0, bool on_s1) {
    // add iota(1) = s2 on the selected fibers. s0+s2=s2, s2+s2=s0; s1+s2=s3, s3+s2=s1
    std::vector<std::pair<Elem, Elem>> pairs;
    for (const auto& x : s_elems) pairs.emplace_back(x, x);
    Mapping t(std::move(pairs));
    auto swap_pair = [&](const Elem& a, const Elem& b) {
      for (auto& [k, v] : t.pairs) {
        if (k == a) v = b;
        if (k == b) v = a;
      }
    };
    if (on_s0) swap_pair("s0", "s2");
    if (on_s1) swap_pair("s1", "s3");
    return t;
  };
  SECTION("identity is an automorphism") {
    REQUIRE(local_global_check(m, Mapping::identity(s_elems)));
  }
  SECTION("translation by iota(1) on the nonzero fiber only is an automorphism") {
    REQUIRE(local_global_check(m, translation(false, true)));
  }
  SECTION("translation by iota(1) on both fibers breaks additivity") {
    REQUIRE_FALSE(local_global_check(m, translation(true, true)));
  }
  SECTION("fiber-incompatible maps are rejected") {
    REQUIRE_THROWS_AS(local_global_check(m, Mapping({{"s0", "s1"}, {"s1", "s0"}, {"s2", "s2"}, {"s3", "s3"}})),
                      std::invalid_argument);
  }
  SECTION("agrees with membership in Aut(M / base) on all fiber-respecting maps") {
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    auto group = automorphism_group(m, opts);
    std::set<Mapping> members;
    for (const auto& a : group) members.insert(a.per_sort.at("S"));
    for (bool b0 : {false, true})
      for (bool b1 : {false, true}) {
        Mapping t = translation(b0, b1);
        REQUIRE(local_global_check(m, t) == (members.count(t) == 1));
      }
  }
}

TEST_CASE("structure plumbing") {
  SECTION("rename_cover_part produces a disjoint copy over the same base") {
    auto copy = rename_cover_part(z4(1), "'");
    REQUIRE(copy.has_sort("S'"));
    REQUIRE(copy.sort("U") == z4(1).sort("U"));
    REQUIRE(validate_structure(copy).empty());
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    REQUIRE(automorphism_group(copy, opts).size() == 2);
  }
  SECTION("combine_over_base joins two covers with a distinguished graph") {
    auto copy = rename_cover_part(z4(1), "'");
    std::vector<std::pair<Elem, Elem>> pairs;
    for (const auto& x : z4(1).sort("S").elements) pairs.emplace_back(x, x + "'");
    auto combined = combine_over_base(z4(1), copy, Mapping(std::move(pairs)), "S", "S'");
    REQUIRE(validate_structure(combined).empty());
    REQUIRE(combined.relation("h_graph") != nullptr);
    REQUIRE(combined.relation("fiber_of_S") != nullptr);
    REQUIRE(combined.relation("fiber_of_S'") != nullptr);
    // the identity graph forces the two copies to move together
    SearchOptions opts;
    opts.fix_sorts_pointwise = {"U"};
    REQUIRE(automorphism_group(combined, opts).size() == 2);
  }
}
