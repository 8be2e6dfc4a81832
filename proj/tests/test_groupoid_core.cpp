#include <catch2/catch_amalgamated.hpp>

#include "fgc/fixtures.hpp"
#include "fgc/groupoid.hpp"

using namespace fgc;

namespace {

Mapping swap2(const Elem& a, const Elem& b) {
  return Mapping({{a, b}, {b, a}});
}

// one object {e1, e2} with its identity, optionally the swap
ConcreteGroupoid two_elt_object(const ObjId& id, const Elem& e1, const Elem& e2, bool with_swap,
                                const CompId& comp = "c") {
  ConcreteGroupoid g;
  g.add_object(id, comp, make_set({e1, e2}));
  g.component_label[comp] = {comp};
  g.add_morphism(id, id, Mapping::identity(g.elements_of(id)));
  if (with_swap) g.add_morphism(id, id, swap2(e1, e2));
  g.finalize();
  return g;
}

// the full groupoid on two 2-element objects in one component
ConcreteGroupoid full_two_objects() {
  ConcreteGroupoid g;
  g.add_object("O1", "c", make_set({"x1", "x2"}));
  g.add_object("O2", "c", make_set({"y1", "y2"}));
  g.component_label["c"] = {"c"};
  auto add_all = [&](const ObjId& a, const ObjId& b) {
    const auto& ea = g.elements_of(a);
    const auto& eb = g.elements_of(b);
    g.add_morphism(a, b, Mapping({{ea[0], eb[0]}, {ea[1], eb[1]}}));
    g.add_morphism(a, b, Mapping({{ea[0], eb[1]}, {ea[1], eb[0]}}));
  };
  add_all("O1", "O1");
  add_all("O1", "O2");
  add_all("O2", "O1");
  add_all("O2", "O2");
  g.finalize();
  return g;
}

const SimplicialGroupoid& toy() {
  static SimplicialGroupoid sg = fixtures::sg_toy();
  return sg;
}

}  // namespace

TEST_CASE("validate_groupoid") {
  SECTION("identity-only object is valid") {
    REQUIRE(validate_groupoid(two_elt_object("O", "1", "2", false)).empty());
  }
  SECTION("object with the swap is valid (involution closes itself)") {
    REQUIRE(validate_groupoid(two_elt_object("O", "1", "2", true)).empty());
  }
  SECTION("cross bijection with missing inverse is reported") {
    ConcreteGroupoid g;
    g.add_object("O1", "c", make_set({"x1", "x2"}));
    g.add_object("O2", "c", make_set({"y1", "y2"}));
    g.component_label["c"] = {"c"};
    g.add_morphism("O1", "O1", Mapping::identity(g.elements_of("O1")));
    g.add_morphism("O2", "O2", Mapping::identity(g.elements_of("O2")));
    g.add_morphism("O1", "O2", Mapping({{"x1", "y1"}, {"x2", "y2"}}));
    g.finalize();
    auto report = validate_groupoid(g);
    REQUIRE_FALSE(report.empty());
    bool mentions_inverse = false;
    for (const auto& r : report) mentions_inverse |= r.find("inverse missing") != std::string::npos;
    REQUIRE(mentions_inverse);
  }
  SECTION("shared elements between objects are reported") {
    ConcreteGroupoid g;
    g.add_object("O1", "c1", make_set({"x"}));
    g.add_object("O2", "c2", make_set({"x"}));
    g.component_label["c1"] = {"c1"};
    g.component_label["c2"] = {"c2"};
    g.add_morphism("O1", "O1", Mapping::identity(g.elements_of("O1")));
    g.add_morphism("O2", "O2", Mapping::identity(g.elements_of("O2")));
    g.finalize();
    REQUIRE_FALSE(validate_groupoid(g).empty());
  }
  SECTION("fixtures are valid") {
    for (const auto& [n, g] : toy().degrees) REQUIRE(validate_groupoid(*g).empty());
  }
}

TEST_CASE("hom_set") {
  auto g = full_two_objects();
  REQUIRE(validate_groupoid(g).empty());
  SECTION("full groupoid on two 2-element objects has two cross maps") {
    REQUIRE(hom_set(g, "O1", "O2").size() == 2);
  }
  SECTION("objects in distinct components have empty hom sets") {
    ConcreteGroupoid h;
    h.add_object("O1", "c1", make_set({"x"}));
    h.add_object("O2", "c2", make_set({"y"}));
    h.component_label["c1"] = {"c1"};
    h.component_label["c2"] = {"c2"};
    h.add_morphism("O1", "O1", Mapping::identity(h.elements_of("O1")));
    h.add_morphism("O2", "O2", Mapping::identity(h.elements_of("O2")));
    h.finalize();
    REQUIRE(hom_set(h, "O1", "O2").empty());
  }
  SECTION("hom of an object with itself contains the identity") {
    bool has_id = false;
    for (int i : hom_set(g, "O1", "O1"))
      has_id |= g.morphisms[i].map == Mapping::identity(g.elements_of("O1"));
    REQUIRE(has_id);
  }
  SECTION("unknown object throws") { REQUIRE_THROWS_AS(hom_set(g, "O1", "Ox"), std::out_of_range); }
}

TEST_CASE("aut_group") {
  SECTION("two-element object with swap has order 2") {
    auto pa = *toy().degree(1);
    REQUIRE(aut_group(pa, "Pa").size() == 2);
  }
  SECTION("identity-only object is trivial") {
    REQUIRE(aut_group(two_elt_object("O", "1", "2", false), "O").size() == 1);
  }
  SECTION("degree-2 object with fiberwise swaps has order 4") {
    REQUIRE(aut_group(*toy().degree(2), "Pab").size() == 4);
  }
  SECTION("hom-set composition law: Hom(O2,O3) . Hom(O1,O2) = Hom(O1,O3)") {
    auto g = full_two_objects();
    for (const auto& o1 : g.object_ids())
      for (const auto& o2 : g.object_ids())
        for (const auto& o3 : g.object_ids()) {
          std::set<Mapping> composed;
          for (const auto& f : hom_maps(g, o1, o2))
            for (const auto& h : hom_maps(g, o2, o3)) composed.insert(compose(h, f));
          auto direct = hom_maps(g, o1, o3);
          REQUIRE(composed == std::set<Mapping>(direct.begin(), direct.end()));
        }
  }
  SECTION("aut groups within a component are conjugate") {
    auto g = full_two_objects();
    auto a1 = aut_group(g, "O1");
    auto a2 = aut_group(g, "O2");
    auto h = hom_maps(g, "O1", "O2").front();
    std::set<Mapping> conj;
    for (const auto& a : a1) conj.insert(compose(h, compose(a, h.inverse())));
    REQUIRE(conj == std::set<Mapping>(a2.begin(), a2.end()));
  }
}

TEST_CASE("is_finitely_faithful") {
  SECTION("swap object: single-element witness") {
    auto w = is_finitely_faithful(*toy().degree(1));
    REQUIRE(w.finitely_faithful);
    REQUIRE(w.witness.at("Pa").size() == 1);
  }
  SECTION("identity-only object: empty witness") {
    auto w = is_finitely_faithful(two_elt_object("O", "1", "2", false));
    REQUIRE(w.witness.at("O").empty());
  }
  SECTION("fiberwise swaps need one point per fiber") {
    auto w = is_finitely_faithful(*toy().degree(2));
    REQUIRE(w.witness.at("Pab").size() == 2);
  }
}

TEST_CASE("is_canonical") {
  REQUIRE(is_canonical(*toy().degree(1)));
  SECTION("second object in a component breaks canonicity") {
    auto fam = fixtures::swap_family({"a", "b"}, {{"a", {"p1", "p2"}}, {"b", {"q1", "q2"}}});
    auto sg = fixtures::build_fibered_simplicial(fam, {{"a", 2}});
    REQUIRE_FALSE(is_canonical(*sg.degree(1)));
  }
}

TEST_CASE("condition (A)") {
  SECTION("identity morphism always satisfies (A)") {
    auto g = share(full_two_objects());
    REQUIRE(check_condition_A(identity_morphism_set(g)).holds);
  }
  SECTION("translate inclusions satisfy (A)") {
    REQUIRE(check_condition_A(toy().inclusions.at({1, 2})).holds);
  }
  SECTION("deleting a map keeps (A) but breaks (B')") {
    // condition (A) constrains composites of the remaining maps only; the
    // missing translate is detected by the closure condition (B')
    GroupoidMorphismSet h = toy().inclusions.at({1, 2});
    auto full = check_condition_Bprime(h);
    REQUIRE(full.b_prime);
    h.maps.erase(h.maps.begin());  // drop one inclusion map
    h.finalize();
    REQUIRE(check_condition_A(h).holds);
    auto broken = check_condition_Bprime(h);
    REQUIRE_FALSE(broken.b_prime);
    REQUIRE(broken.missing.has_value());
  }
  SECTION("a genuinely incoherent morphism set fails (A) with a witness") {
    // two maps into the same component that are not translates of each other
    auto g1 = share(two_elt_object("O", "x1", "x2", false, "c"));
    ConcreteGroupoid target = two_elt_object("P", "y1", "y2", true, "c");
    GroupoidMorphismSet h;
    h.source = g1;
    h.target = share(std::move(target));
    h.maps.push_back({"O", "P", Mapping({{"x1", "y1"}, {"x2", "y2"}})});
    h.maps.push_back({"O", "P", Mapping({{"x1", "y1"}, {"x2", "y1"}})});  // collapses
    h.finalize();
    auto res = check_condition_A(h);
    REQUIRE_FALSE(res.holds);
    REQUIRE(res.difference.has_value());
  }
}

TEST_CASE("condition (B') vs (B)") {
  SECTION("identity morphism satisfies both") {
    auto g = share(full_two_objects());
    auto res = check_condition_Bprime(identity_morphism_set(g));
    REQUIRE(res.b_prime);
    REQUIRE(res.b);
  }
  SECTION("restriction to one source object keeps (B) and loses (B')") {
    auto g = share(full_two_objects());
    GroupoidMorphismSet h = identity_morphism_set(g);
    std::erase_if(h.maps, [](const Morphism& m) { return m.src != "O1"; });
    h.finalize();
    auto res = check_condition_Bprime(h);
    REQUIRE(res.b);
    REQUIRE_FALSE(res.b_prime);
  }
  SECTION("toy inclusion morphism satisfies (B')") {
    REQUIRE(check_condition_Bprime(toy().inclusions.at({1, 2})).b_prime);
  }
}

TEST_CASE("relation compatibility") {
  SECTION("inclusion sets match the subset relation") {
    const auto& h = toy().inclusions.at({1, 2});
    std::set<std::pair<CompId, CompId>> want{{"a", "a,b"}, {"b", "a,b"}};
    REQUIRE(check_relation_compatibility(h, want));
  }
  SECTION("a stray cross-component map breaks compatibility") {
    GroupoidMorphismSet h = toy().inclusions.at({1, 2});
    std::set<std::pair<CompId, CompId>> want{{"a", "a,b"}};
    REQUIRE_FALSE(check_relation_compatibility(h, want));
  }
  SECTION("empty set only matches the empty relation") {
    GroupoidMorphismSet h;
    h.source = toy().degree(1);
    h.target = toy().degree(2);
    REQUIRE_FALSE(check_relation_compatibility(h, {{"a", "a,b"}}));
    REQUIRE_FALSE(validate_morphism_set(h).empty());
  }
}

TEST_CASE("glue_isomorphism") {
  SECTION("two one-object Z/2 groupoids glue to 2 objects and 8 morphisms") {
    auto g1 = share(two_elt_object("O1", "x1", "x2", true, "c"));
    auto g2 = share(two_elt_object("O2", "y1", "y2", true, "c"));
    GroupoidMorphismSet h;
    h.source = g1;
    h.target = g2;
    h.maps.push_back({"O1", "O2", Mapping({{"x1", "y1"}, {"x2", "y2"}})});
    h.maps.push_back({"O1", "O2", Mapping({{"x1", "y2"}, {"x2", "y1"}})});
    h.finalize();
    auto glued = glue_isomorphism(h);
    REQUIRE(validate_groupoid(glued).empty());
    REQUIRE(glued.objects.size() == 2);
    REQUIRE(glued.morphisms.size() == 8);
    // embedding property: restricting to either side gives the input back
    for (const auto& m : g1->morphisms) REQUIRE(glued.has_morphism(m));
    for (const auto& m : g2->morphisms) REQUIRE(glued.has_morphism(m));
    REQUIRE(hom_set(glued, "O1", "O1").size() == g1->morphisms.size());
  }
  SECTION("gluing a groupoid to its disjoint copy doubles each component") {
    auto base = full_two_objects();
    auto copy = copy_groupoid(base, "k_");
    GroupoidMorphismSet h;
    h.source = share(base);
    h.target = share(copy.groupoid);
    for (const auto& m : base.morphisms) {
      std::vector<std::pair<Elem, Elem>> pairs;
      for (const auto& [x, y] : m.map.pairs) pairs.emplace_back(x, copy.elem_map.at(y));
      h.maps.push_back({m.src, copy.object_names.at(m.tgt), Mapping(std::move(pairs))});
    }
    h.finalize();
    auto glued = glue_isomorphism(h);
    REQUIRE(validate_groupoid(glued).empty());
    REQUIRE(glued.objects.size() == 4);
    std::set<CompId> comps;
    for (const auto& [o, c] : glued.component_of) comps.insert(c);
    REQUIRE(comps.size() == 1);
  }
  SECTION("degree-1 toy groupoid glued with its copy has 8 morphisms per component") {
    auto base = *toy().degree(1);
    auto copy = copy_groupoid(base, "k_");
    GroupoidMorphismSet h;
    h.source = share(base);
    h.target = share(copy.groupoid);
    for (const auto& m : base.morphisms) {
      std::vector<std::pair<Elem, Elem>> pairs;
      for (const auto& [x, y] : m.map.pairs) pairs.emplace_back(x, copy.elem_map.at(y));
      h.maps.push_back({m.src, copy.object_names.at(m.tgt), Mapping(std::move(pairs))});
    }
    h.finalize();
    auto glued = glue_isomorphism(h);
    REQUIRE(validate_groupoid(glued).empty());
    std::map<CompId, int> per_comp;
    for (const auto& m : glued.morphisms) ++per_comp[glued.component(m.src)];
    for (const auto& [c, count] : per_comp) REQUIRE(count == 8);
  }
  SECTION("precondition failures throw") {
    auto g1 = share(two_elt_object("O1", "x1", "x2", true, "c"));
    auto g2 = share(two_elt_object("O2", "y1", "y2", true, "c"));
    GroupoidMorphismSet h;
    h.source = g1;
    h.target = g2;
    h.maps.push_back({"O1", "O2", Mapping({{"x1", "y1"}, {"x2", "y2"}})});
    h.finalize();  // missing the other translate: (B') fails
    REQUIRE_THROWS_AS(glue_isomorphism(h), std::invalid_argument);
  }
}
