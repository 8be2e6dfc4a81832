#pragma once

#include "fgc/groupoid.hpp"

namespace fgc {

/// Simplicial groupoid over a finite base set A: one groupoid per degree,
/// components labeled by size-n subsets of A, with injective inclusion
/// morphism sets between degrees. No degeneracies.
struct SimplicialGroupoid {
  ElemSet base;
  std::map<int, GroupoidPtr> degrees;
  std::map<std::pair<int, int>, GroupoidMorphismSet> inclusions;  // n < m

  const GroupoidPtr& degree(int n) const {
    auto it = degrees.find(n);
    if (it == degrees.end()) throw std::out_of_range("no degree " + std::to_string(n));
    return it->second;
  }

  bool has_component(const ElemSet& subset) const {
    auto it = degrees.find(int(subset.size()));
    if (it == degrees.end()) return false;
    return it->second->component_label.count(subset_key(subset)) != 0;
  }

  std::vector<ObjId> component_objects(const ElemSet& subset) const {
    return degree(int(subset.size()))->objects_in_component(subset_key(subset));
  }

  /// Maps of the inclusion morphism ι_{|c|,|d|} from object o1 (component c)
  /// to object o2 (component d); for |c| == |d| the groupoid hom-set.
  std::vector<Mapping> inclusion_maps(int n, int m, const ObjId& o1, const ObjId& o2) const {
    if (n == m) return hom_maps(*degree(n), o1, o2);
    auto it = inclusions.find({n, m});
    if (it == inclusions.end()) throw std::out_of_range("no inclusion morphism set");
    return it->second.maps_between(o1, o2);
  }
};

inline std::vector<std::string> validate_simplicial(const SimplicialGroupoid& sg) {
  std::vector<std::string> report;
  auto fail = [&](const std::string& s) { report.push_back(s); };
  if (sg.base.empty()) fail("empty base set");

  for (const auto& [n, g] : sg.degrees) {
    if (n < 1 || size_t(n) > sg.base.size()) fail("degree " + std::to_string(n) + " out of range");
    for (const auto& r : validate_groupoid(*g)) fail("degree " + std::to_string(n) + ": " + r);
    for (const auto& [c, label] : g->component_label) {
      if (label.size() != size_t(n)) fail("degree " + std::to_string(n) + " component " + c + ": label size");
      if (!is_subset(label, sg.base)) fail("component " + c + ": label not in base");
      if (subset_key(label) != c) fail("component " + c + ": id is not the canonical subset key");
    }
  }

  // downward closure of the present component family
  for (const auto& [n, g] : sg.degrees)
    for (const auto& [c, label] : g->component_label)
      for (const auto& sub : nonempty_subsets(label))
        if (sub.size() < label.size() && !sg.has_component(sub))
          fail("component " + c + ": missing sub-component " + subset_key(sub));

  for (const auto& [nm, h] : sg.inclusions) {
    auto [n, m] = nm;
    std::string tag = "inclusion (" + std::to_string(n) + "," + std::to_string(m) + "): ";
    if (!sg.degrees.count(n) || !sg.degrees.count(m) || n >= m) {
      fail(tag + "bad degree pair");
      continue;
    }
    if (!(*h.source == *sg.degrees.at(n)) || !(*h.target == *sg.degrees.at(m)))
      fail(tag + "detached endpoints");
    for (const auto& r : validate_morphism_set(h)) fail(tag + r);
    for (const auto& mp : h.maps)
      if (!mp.map.injective()) fail(tag + "non-injective map " + mp.src + "->" + mp.tgt);
    // compatible with the subset relation, restricted to present components
    std::set<std::pair<CompId, CompId>> want;
    for (const auto& [c1, l1] : h.source->component_label)
      for (const auto& [c2, l2] : h.target->component_label)
        if (is_subset(l1, l2)) want.insert({c1, c2});
    if (!check_relation_compatibility(h, want)) fail(tag + "not compatible with the subset relation");
    if (!check_condition_A(h).holds) fail(tag + "condition (A) fails");
    auto b = check_condition_Bprime(h);
    if (!b.b_prime) fail(tag + "condition (B') fails");
  }

  // missing inclusion sets between present degrees
  std::vector<int> ds;
  for (const auto& [n, _] : sg.degrees) ds.push_back(n);
  for (size_t i = 0; i < ds.size(); ++i)
    for (size_t j = i + 1; j < ds.size(); ++j)
      if (!sg.inclusions.count({ds[i], ds[j]}))
        fail("missing inclusion morphism set (" + std::to_string(ds[i]) + "," + std::to_string(ds[j]) + ")");

  // composition compatibility as morphism sets
  for (size_t i = 0; i < ds.size(); ++i)
    for (size_t j = i + 1; j < ds.size(); ++j)
      for (size_t k = j + 1; k < ds.size(); ++k) {
        auto a = sg.inclusions.find({ds[i], ds[j]});
        auto b = sg.inclusions.find({ds[j], ds[k]});
        auto c = sg.inclusions.find({ds[i], ds[k]});
        if (a == sg.inclusions.end() || b == sg.inclusions.end() || c == sg.inclusions.end()) continue;
        auto comp = compose_morphism_sets(b->second, a->second);
        if (comp.maps != c->second.maps)
          fail("composition mismatch: (" + std::to_string(ds[j]) + "," + std::to_string(ds[k]) + ") . (" +
               std::to_string(ds[i]) + "," + std::to_string(ds[j]) + ") != (" + std::to_string(ds[i]) + "," +
               std::to_string(ds[k]) + ")");
      }
  return report;
}

inline bool is_valid_simplicial(const SimplicialGroupoid& sg) { return validate_simplicial(sg).empty(); }

struct DisjointUnionReport {
  bool holds = true;
  std::string counterexample;
};

/// For every component d̄, every partition into parts, every choice of part
/// objects and inclusion legs, the combined map is a bijection onto the top
/// object.
inline DisjointUnionReport check_disjoint_union_property(const SimplicialGroupoid& sg) {
  DisjointUnionReport rep;
  for (const auto& [m, g] : sg.degrees) {
    if (m < 2) continue;
    for (const auto& [dkey, dlabel] : g->component_label) {
      for (const auto& top : g->objects_in_component(dkey)) {
        const auto& top_elems = g->elements_of(top);
        for (const auto& parts : proper_partitions(dlabel)) {
          // choices: per part, an object and a leg map
          std::vector<std::vector<Morphism>> legs(parts.size());
          bool feasible = true;
          for (size_t p = 0; p < parts.size(); ++p) {
            if (!sg.has_component(parts[p])) { feasible = false; break; }
            for (const auto& o : sg.component_objects(parts[p]))
              for (const auto& mp : sg.inclusion_maps(int(parts[p].size()), m, o, top))
                legs[p].push_back({o, top, mp});
            if (legs[p].empty()) feasible = false;
          }
          if (!feasible) {
            rep.holds = false;
            rep.counterexample = "no inclusion legs for a partition of " + dkey;
            return rep;
          }
          std::vector<size_t> pick(parts.size(), 0);
          for (;;) {
            std::set<Elem> image;
            size_t total = 0;
            bool disjoint = true;
            for (size_t p = 0; p < parts.size(); ++p) {
              const auto& leg = legs[p][pick[p]];
              for (const auto& [x, y] : leg.map.pairs) {
                disjoint &= image.insert(y).second;
                ++total;
              }
            }
            if (!disjoint || total != top_elems.size()) {
              rep.holds = false;
              rep.counterexample = "legs over partition of " + dkey + " onto " + top +
                                   (disjoint ? " do not cover" : " overlap");
              return rep;
            }
            size_t p = 0;
            for (; p < parts.size(); ++p) {
              if (pick[p] + 1 < legs[p].size()) { ++pick[p]; break; }
              pick[p] = 0;
            }
            if (p == parts.size()) break;
          }
        }
      }
    }
  }
  return rep;
}

/// The unique inclusion ι4 with ι3 ∘ ι4 = ι1, found by exhaustive scan of
/// the relevant hom-set. Requires ι1, ι3 to be inclusion maps of sg and the
/// components to nest.
inline Morphism fill_square(const SimplicialGroupoid& sg, const Morphism& i1, const Morphism& i3) {
  if (i1.tgt != i3.tgt) throw std::invalid_argument("fill_square: different top objects");
  auto find_degree = [&](const ObjId& o) {
    for (const auto& [n, g] : sg.degrees)
      if (g->has_object(o)) return n;
    throw std::invalid_argument("fill_square: unknown object " + o);
  };
  int n1 = find_degree(i1.src), n3 = find_degree(i3.src), nt = find_degree(i1.tgt);
  const auto& l1 = sg.degree(n1)->component_label.at(sg.degree(n1)->component(i1.src));
  const auto& l3 = sg.degree(n3)->component_label.at(sg.degree(n3)->component(i3.src));
  if (!is_subset(l1, l3) || l1 == l3) throw std::invalid_argument("fill_square: components do not nest");
  auto in_set = [&](int n, int m, const Morphism& mor) {
    auto it = sg.inclusions.find({n, m});
    return it != sg.inclusions.end() && it->second.has_map(mor);
  };
  if (!in_set(n1, nt, i1) || !in_set(n3, nt, i3))
    throw std::invalid_argument("fill_square: maps are not inclusion maps of the simplicial groupoid");

  std::vector<Morphism> solutions;
  for (const auto& cand : sg.inclusion_maps(n1, n3, i1.src, i3.src))
    if (compose(i3.map, cand) == i1.map) solutions.push_back({i1.src, i3.src, cand});
  if (solutions.size() != 1)
    throw std::logic_error("fill_square: expected a unique solution, found " +
                           std::to_string(solutions.size()));
  return solutions.front();
}

struct ChoiceRecord {
  std::string kind;  // "object" | "map"
  std::string key;   // subset key or "c|d"
  std::string value;
  int alternatives = 1;
};

/// One chosen object per component with a single commuting inclusion per
/// containment pair.
struct InclusionSystem {
  ElemSet base_points;
  std::map<std::string, ObjId> chosen;                          // subset key -> object
  std::map<std::pair<std::string, std::string>, Morphism> maps; // (c key, d key), c ⊂ d
  std::vector<ChoiceRecord> choices;

  const ObjId& object(const ElemSet& c) const { return chosen.at(subset_key(c)); }
  const Morphism& map(const ElemSet& c, const ElemSet& d) const {
    return maps.at({subset_key(c), subset_key(d)});
  }
  bool has_map(const ElemSet& c, const ElemSet& d) const {
    return maps.count({subset_key(c), subset_key(d)}) != 0;
  }
};

inline std::vector<std::string> validate_inclusion_system(const SimplicialGroupoid& sg,
                                                          const InclusionSystem& sys) {
  std::vector<std::string> report;
  auto subsets = nonempty_subsets(sys.base_points);
  for (const auto& c : subsets) {
    if (!sg.has_component(c)) continue;
    if (!sys.chosen.count(subset_key(c))) report.push_back("no chosen object for " + subset_key(c));
  }
  for (const auto& c : subsets)
    for (const auto& d : subsets) {
      if (!is_subset(c, d) || c == d) continue;
      if (!sg.has_component(c) || !sg.has_component(d)) continue;
      if (!sys.has_map(c, d)) {
        report.push_back("missing map " + subset_key(c) + " -> " + subset_key(d));
        continue;
      }
      const auto& m = sys.map(c, d);
      if (m.src != sys.object(c) || m.tgt != sys.object(d))
        report.push_back("map " + subset_key(c) + " -> " + subset_key(d) + " endpoints mismatch");
      auto cands = sg.inclusion_maps(int(c.size()), int(d.size()), m.src, m.tgt);
      if (std::find(cands.begin(), cands.end(), m.map) == cands.end())
        report.push_back("map " + subset_key(c) + " -> " + subset_key(d) + " is not an inclusion map");
    }
  // commutativity over all triples
  for (const auto& c : subsets)
    for (const auto& d : subsets)
      for (const auto& e : subsets) {
        if (!(is_subset(c, d) && is_subset(d, e) && c != d && d != e)) continue;
        if (!sys.has_map(c, d) || !sys.has_map(d, e) || !sys.has_map(c, e)) continue;
        if (compose(sys.map(d, e).map, sys.map(c, d).map) != sys.map(c, e).map)
          report.push_back("triple " + subset_key(c) + " < " + subset_key(d) + " < " + subset_key(e) +
                           " does not commute");
      }
  return report;
}

/// Build a commuting system of inclusions on the given points (defaults to
/// the whole base). Free choices are resolved lexicographically-least and
/// logged; a partial seed system overrides them.
inline InclusionSystem build_inclusion_system(const SimplicialGroupoid& sg, const InclusionSystem& seed = {},
                                              ElemSet points = {}) {
  InclusionSystem sys;
  sys.base_points = points.empty() ? sg.base : points;
  auto all_subsets = nonempty_subsets(sys.base_points);
  std::vector<ElemSet> present;
  for (const auto& c : all_subsets)
    if (sg.has_component(c)) present.push_back(c);
  if (present.empty()) throw std::invalid_argument("build_inclusion_system: no components present");

  // Points not touched by any multi-point component are isolated: they only
  // contribute a chosen object. The rest must form a full subset lattice.
  ElemSet core;
  for (const auto& c : present)
    if (c.size() >= 2) core = set_union(core, c);
  for (const auto& c : nonempty_subsets(core))
    if (!sg.has_component(c))
      throw std::invalid_argument("build_inclusion_system: partial component families are unsupported");

  // chosen objects: seed, else lexicographically least object id
  for (const auto& c : present) {
    std::string key = subset_key(c);
    auto objs = sg.component_objects(c);
    std::sort(objs.begin(), objs.end());
    if (auto it = seed.chosen.find(key); it != seed.chosen.end()) {
      if (std::find(objs.begin(), objs.end(), it->second) == objs.end())
        throw std::invalid_argument("seed: unknown object " + it->second + " for " + key);
      sys.chosen[key] = it->second;
    } else {
      sys.chosen[key] = objs.front();
      sys.choices.push_back({"object", key, objs.front(), int(objs.size())});
    }
  }
  // seed maps force their endpoints
  for (const auto& [cd, m] : seed.maps) {
    auto check = [&](const std::string& key, const ObjId& o) {
      if (sys.chosen.count(key) && sys.chosen.at(key) != o)
        throw std::invalid_argument("seed: map endpoints conflict with chosen object for " + key);
    };
    check(cd.first, m.src);
    check(cd.second, m.tgt);
  }
  if (core.empty()) return sys;  // isolated points only: no maps to build

  const ElemSet top = core;
  auto subsets = nonempty_subsets(core);
  const std::string top_key = subset_key(top);
  // arms into the top object, processed by decreasing subset size
  std::map<std::string, Morphism> arm;
  arm[top_key] = {sys.chosen[top_key], sys.chosen[top_key],
                  Mapping::identity(sg.degree(int(top.size()))->elements_of(sys.chosen[top_key]))};
  for (auto it = subsets.rbegin(); it != subsets.rend(); ++it) {
    const ElemSet& c = *it;
    if (c == top) continue;
    std::string key = subset_key(c);
    std::optional<Morphism> chosen_arm;
    if (auto sm = seed.maps.find({key, top_key}); sm != seed.maps.end()) chosen_arm = sm->second;
    // a seeded map (c, d) with d's arm known determines c's arm
    for (const auto& [cd, m] : seed.maps) {
      if (cd.first != key || cd.second == top_key) continue;
      auto ita = arm.find(cd.second);
      if (ita == arm.end()) continue;
      Morphism derived{m.src, ita->second.tgt, compose(ita->second.map, m.map)};
      if (chosen_arm && !(*chosen_arm == derived))
        throw std::invalid_argument("inconsistent seed at " + key);
      chosen_arm = derived;
    }
    if (!chosen_arm) {
      auto cands = sg.inclusion_maps(int(c.size()), int(top.size()), sys.chosen[key], sys.chosen[top_key]);
      if (cands.empty()) throw std::logic_error("no inclusion maps from " + key + " to top");
      std::sort(cands.begin(), cands.end());
      chosen_arm = Morphism{sys.chosen[key], sys.chosen[top_key], cands.front()};
      sys.choices.push_back({"map", key + "|" + top_key, "candidate 0", int(cands.size())});
    }
    arm[key] = *chosen_arm;
    sys.maps[{key, top_key}] = *chosen_arm;
  }
  // remaining maps are uniquely determined: ι_{c,d} solves arm_d ∘ x = arm_c
  for (const auto& c : subsets)
    for (const auto& d : subsets) {
      if (!is_subset(c, d) || c == d || d == top) continue;
      std::string ck = subset_key(c), dk = subset_key(d);
      std::vector<Morphism> sols;
      for (const auto& cand : sg.inclusion_maps(int(c.size()), int(d.size()), sys.chosen[ck], sys.chosen[dk]))
        if (compose(arm[dk].map, cand) == arm[ck].map)
          sols.push_back({sys.chosen[ck], sys.chosen[dk], cand});
      if (sols.size() != 1)
        throw std::logic_error("derived inclusion " + ck + " -> " + dk + " not unique (" +
                               std::to_string(sols.size()) + ")");
      if (auto sm = seed.maps.find({ck, dk}); sm != seed.maps.end() && !(sm->second == sols.front()))
        throw std::invalid_argument("inconsistent seed at " + ck + " -> " + dk);
      sys.maps[{ck, dk}] = sols.front();
    }
  auto rep = validate_inclusion_system(sg, sys);
  if (!rep.empty()) throw std::logic_error("built system invalid: " + rep.front());
  return sys;
}

/// Extend a commuting system on A' by one new point: the system on the old
/// points is kept, one map from the old top into the new top is chosen
/// freely (with the arms of the fresh subsets), and everything else is
/// uniquely determined.
inline InclusionSystem extend_inclusion_system(const SimplicialGroupoid& sg, const InclusionSystem& sys,
                                               const Elem& new_point, const InclusionSystem& seed = {}) {
  if (set_contains(sys.base_points, new_point))
    throw std::invalid_argument("extend_inclusion_system: point already present");
  if (!set_contains(sg.base, new_point))
    throw std::invalid_argument("extend_inclusion_system: point not in base");
  InclusionSystem merged_seed = seed;
  merged_seed.choices.clear();
  for (const auto& [k, o] : sys.chosen) merged_seed.chosen[k] = o;
  for (const auto& [cd, m] : sys.maps) merged_seed.maps[cd] = m;
  InclusionSystem out =
      build_inclusion_system(sg, merged_seed, set_union(sys.base_points, ElemSet{new_point}));
  // restriction to the old points must reproduce the input system
  for (const auto& [k, o] : sys.chosen)
    if (out.chosen.at(k) != o) throw std::logic_error("extension changed a chosen object");
  for (const auto& [cd, m] : sys.maps)
    if (!(out.maps.at(cd) == m)) throw std::logic_error("extension changed an old map");
  return out;
}

/// A morphism of simplicial groupoids: one groupoid morphism set per degree.
struct SimplicialMorphism {
  std::map<int, GroupoidMorphismSet> degrees;
};

inline std::vector<std::string> validate_simplicial_morphism(const SimplicialMorphism& h,
                                                             const SimplicialGroupoid& sg1,
                                                             const SimplicialGroupoid& sg2) {
  std::vector<std::string> report;
  auto fail = [&](const std::string& s) { report.push_back(s); };
  for (const auto& [n, hn] : h.degrees) {
    std::string tag = "degree " + std::to_string(n) + ": ";
    if (!sg1.degrees.count(n) || !sg2.degrees.count(n)) {
      fail(tag + "degree missing in a simplicial groupoid");
      continue;
    }
    for (const auto& r : validate_morphism_set(hn)) fail(tag + r);
    // compatible with the equality relation on component labels
    std::set<std::pair<CompId, CompId>> eq;
    for (const auto& [c1, l1] : hn.source->component_label)
      for (const auto& [c2, l2] : hn.target->component_label)
        if (l1 == l2) eq.insert({c1, c2});
    if (!check_relation_compatibility(hn, eq)) fail(tag + "not compatible with equality of components");
    if (!check_condition_A(hn).holds) fail(tag + "condition (A) fails");
    if (!check_condition_Bprime(hn).b_prime) fail(tag + "condition (B') fails");
  }
  // squares with inclusions commute as sets of maps
  for (const auto& [n, hn] : h.degrees)
    for (const auto& [m, hm] : h.degrees) {
      if (n >= m) continue;
      auto i1 = sg1.inclusions.find({n, m});
      auto i2 = sg2.inclusions.find({n, m});
      if (i1 == sg1.inclusions.end() || i2 == sg2.inclusions.end()) continue;
      auto lhs = compose_morphism_sets(i2->second, hn);
      auto rhs = compose_morphism_sets(hm, i1->second);
      if (lhs.maps != rhs.maps)
        fail("square (" + std::to_string(n) + "," + std::to_string(m) + ") does not commute");
    }
  return report;
}

inline SimplicialMorphism identity_simplicial_morphism(const SimplicialGroupoid& sg) {
  SimplicialMorphism h;
  for (const auto& [n, g] : sg.degrees) h.degrees[n] = identity_morphism_set(g);
  return h;
}

inline bool is_simplicial_isomorphism(const SimplicialMorphism& h, const SimplicialGroupoid& sg1,
                                      const SimplicialGroupoid& sg2) {
  if (!validate_simplicial_morphism(h, sg1, sg2).empty()) return false;
  for (const auto& [n, hn] : h.degrees) {
    for (const auto& m : hn.maps)
      if (!m.map.bijection_onto(hn.target->elements_of(m.tgt))) return false;
    GroupoidMorphismSet inv;
    inv.source = hn.target;
    inv.target = hn.source;
    for (const auto& m : hn.maps) inv.maps.push_back({m.tgt, m.src, m.map.inverse()});
    inv.finalize();
    if (!check_condition_A(inv).holds || !check_condition_Bprime(inv).b_prime) return false;
  }
  return true;
}

/// Degree-1 maps of a morphism, with stored higher-degree witnesses.
struct CoherentFamily {
  ElemSet points;                             // B, the supported subset of A
  std::map<Elem, Morphism> degree1;           // a -> m_a
  std::map<std::string, Morphism> witnesses;  // subset key (size >= 2) -> h_c
  std::vector<ChoiceRecord> choices;
};

/// The unique higher-degree map agreeing with each m_a under the inclusion
/// legs of the two systems: assembled fiberwise through the disjoint union
/// decomposition, then checked to belong to H. Throws if no leg covers an
/// element or the assembled map is not in H (family not coherent at c).
inline Morphism coherence_witness(const SimplicialMorphism& h, const InclusionSystem& sys1,
                                  const InclusionSystem& sys2, const CoherentFamily& family,
                                  const ElemSet& c) {
  const int n = int(c.size());
  auto hn = h.degrees.find(n);
  if (hn == h.degrees.end()) throw std::invalid_argument("coherence_witness: no degree " + std::to_string(n));
  const ObjId& src = sys1.object(c);
  const ObjId& tgt = sys2.object(c);
  const ElemSet& src_elems = hn->second.source->elements_of(src);

  std::vector<std::pair<Elem, Elem>> assembled;
  std::set<Elem> covered;
  for (const auto& a : c) {
    Morphism leg1 = n == 1 ? Morphism{src, src, Mapping::identity(src_elems)} : sys1.map({a}, c);
    Morphism leg2 = n == 1 ? Morphism{tgt, tgt, Mapping::identity(hn->second.target->elements_of(tgt))}
                           : sys2.map({a}, c);
    const Morphism& ma = family.degree1.at(a);
    for (const auto& [x, y] : leg1.map.pairs) {
      if (!covered.insert(y).second)
        throw std::logic_error("coherence_witness: legs overlap (no disjoint union property)");
      assembled.emplace_back(y, leg2.map.at(ma.map.at(x)));
    }
  }
  if (covered.size() != src_elems.size())
    throw std::logic_error("coherence_witness: legs do not cover the object");
  Morphism out{src, tgt, Mapping(std::move(assembled))};
  if (!hn->second.has_map(out))
    throw std::invalid_argument("coherence_witness: family not coherent at " + subset_key(c));
  return out;
}

/// Extend a partial coherent family to all of the systems' points, one point
/// at a time; each new degree-1 map is the lexicographically-least candidate
/// whose assembled lifts stay inside H on every subset.
inline CoherentFamily find_coherent_family(const SimplicialMorphism& h, const InclusionSystem& sys1,
                                           const InclusionSystem& sys2, const CoherentFamily& partial = {}) {
  if (sys1.base_points != sys2.base_points)
    throw std::invalid_argument("find_coherent_family: systems span different points");
  CoherentFamily fam = partial;
  fam.witnesses.clear();
  // verify the partial family is coherent before extending
  for (const auto& c : nonempty_subsets(fam.points)) {
    if (c.size() < 2 || !sys1.chosen.count(subset_key(c))) continue;
    fam.witnesses[subset_key(c)] = coherence_witness(h, sys1, sys2, fam, c);
  }
  for (const auto& d : sys1.base_points) {
    if (set_contains(fam.points, d)) continue;
    auto h1 = h.degrees.find(1);
    if (h1 == h.degrees.end()) throw std::invalid_argument("find_coherent_family: no degree-1 morphisms");
    auto cands = h1->second.maps_between(sys1.object({d}), sys2.object({d}));
    std::sort(cands.begin(), cands.end());
    bool placed = false;
    for (size_t ci = 0; ci < cands.size() && !placed; ++ci) {
      CoherentFamily trial = fam;
      trial.points = set_union(fam.points, ElemSet{d});
      trial.degree1[d] = {sys1.object({d}), sys2.object({d}), cands[ci]};
      try {
        CoherentFamily probe = trial;
        for (const auto& c : nonempty_subsets(trial.points)) {
          if (c.size() < 2 || !set_contains(c, d) || !sys1.chosen.count(subset_key(c))) continue;
          probe.witnesses[subset_key(c)] = coherence_witness(h, sys1, sys2, probe, c);
        }
        fam = probe;
        fam.choices.push_back({"map", d, "candidate " + std::to_string(ci), int(cands.size())});
        placed = true;
      } catch (const std::invalid_argument&) {
        // candidate rejected; try the next one
      }
    }
    if (!placed)
      throw std::invalid_argument("find_coherent_family: no coherent extension at point " + d);
  }
  return fam;
}

/// Restriction of a simplicial groupoid to a subset of its base.
inline SimplicialGroupoid restrict_simplicial(const SimplicialGroupoid& sg, const ElemSet& b) {
  SimplicialGroupoid out;
  out.base = b;
  std::map<int, std::set<ObjId>> kept;
  for (const auto& [n, g] : sg.degrees) {
    ConcreteGroupoid rg;
    for (const auto& [o, elems] : g->objects) {
      const auto& label = g->component_label.at(g->component(o));
      if (!is_subset(label, b)) continue;
      rg.add_object(o, g->component(o), elems);
      rg.component_label[g->component(o)] = label;
      kept[n].insert(o);
    }
    if (rg.objects.empty()) continue;
    for (const auto& m : g->morphisms)
      if (kept[n].count(m.src) && kept[n].count(m.tgt)) rg.morphisms.push_back(m);
    rg.finalize();
    out.degrees[n] = share(std::move(rg));
  }
  for (const auto& [nm, h] : sg.inclusions) {
    auto [n, m] = nm;
    if (!out.degrees.count(n) || !out.degrees.count(m)) continue;
    GroupoidMorphismSet rh;
    rh.source = out.degrees.at(n);
    rh.target = out.degrees.at(m);
    for (const auto& mp : h.maps)
      if (kept[n].count(mp.src) && kept[m].count(mp.tgt)) rh.maps.push_back(mp);
    rh.finalize();
    if (!rh.maps.empty()) out.inclusions[{n, m}] = std::move(rh);
  }
  return out;
}

/// Finite-level projective system of groupoids over a join-semilattice of
/// indices; structure maps are functors from finer to coarser levels.
struct ProjectiveGroupoidSystem {
  std::vector<std::string> indices;
  std::map<std::pair<std::string, std::string>, std::string> joins;
  std::map<std::string, GroupoidPtr> levels;
  struct StructureMap {
    std::map<ObjId, ObjId> objects;
    std::map<int, int> morphisms;  // morphism index at finer level -> index at coarser level
  };
  std::map<std::pair<std::string, std::string>, StructureMap> projections;  // (i, j), i <= j: level j -> level i

  bool leq(const std::string& i, const std::string& j) const {
    auto it = joins.find({i, j});
    return it != joins.end() && it->second == j;
  }
};

inline const ConcreteGroupoid& project_system(const ProjectiveGroupoidSystem& p, const std::string& i) {
  auto it = p.levels.find(i);
  if (it == p.levels.end()) throw std::out_of_range("unknown index " + i);
  return *it->second;
}

inline std::vector<std::string> validate_system(const ProjectiveGroupoidSystem& p) {
  std::vector<std::string> report;
  auto fail = [&](const std::string& s) { report.push_back(s); };
  for (const auto& i : p.indices)
    if (!p.levels.count(i)) fail("missing level " + i);
  // join closure and semilattice laws
  for (const auto& i : p.indices)
    for (const auto& j : p.indices) {
      auto it = p.joins.find({i, j});
      if (it == p.joins.end()) { fail("missing join (" + i + "," + j + ")"); continue; }
      if (!p.joins.count({j, i}) || p.joins.at({j, i}) != it->second) fail("join not commutative at (" + i + "," + j + ")");
      if (i == j && it->second != i) fail("join not idempotent at " + i);
    }
  auto apply = [&](const ProjectiveGroupoidSystem::StructureMap& f, const ConcreteGroupoid& from,
                   const ConcreteGroupoid& to, const std::string& tag) {
    for (const auto& [o, _] : from.objects)
      if (!f.objects.count(o) || !to.has_object(f.objects.at(o))) {
        fail(tag + ": object map not total/valid at " + o);
        return false;
      }
    for (size_t mi = 0; mi < from.morphisms.size(); ++mi) {
      auto it = f.morphisms.find(int(mi));
      if (it == f.morphisms.end() || it->second < 0 || size_t(it->second) >= to.morphisms.size()) {
        fail(tag + ": morphism map not total/valid at " + std::to_string(mi));
        return false;
      }
      const auto& m = from.morphisms[mi];
      const auto& im = to.morphisms[it->second];
      if (im.src != f.objects.at(m.src) || im.tgt != f.objects.at(m.tgt)) {
        fail(tag + ": morphism map breaks endpoints at " + std::to_string(mi));
        return false;
      }
    }
    // functoriality on compositions
    for (size_t a = 0; a < from.morphisms.size(); ++a)
      for (size_t b = 0; b < from.morphisms.size(); ++b) {
        const auto& m1 = from.morphisms[a];
        const auto& m2 = from.morphisms[b];
        if (m1.tgt != m2.src) continue;
        int ci = from.morphism_index({m1.src, m2.tgt, compose(m2.map, m1.map)});
        const auto& i1 = to.morphisms[f.morphisms.at(int(a))];
        const auto& i2 = to.morphisms[f.morphisms.at(int(b))];
        int di = to.morphism_index({i1.src, i2.tgt, compose(i2.map, i1.map)});
        if (f.morphisms.at(ci) != di) {
          fail(tag + ": functoriality fails");
          return false;
        }
      }
    return true;
  };
  for (const auto& i : p.indices)
    for (const auto& j : p.indices) {
      if (i == j || !p.leq(i, j)) continue;
      auto it = p.projections.find({i, j});
      if (it == p.projections.end()) { fail("missing projection (" + i + "," + j + ")"); continue; }
      apply(it->second, *p.levels.at(j), *p.levels.at(i), "projection (" + i + "," + j + ")");
    }
  // composition of projections
  for (const auto& i : p.indices)
    for (const auto& j : p.indices)
      for (const auto& k : p.indices) {
        if (i == j || j == k || !p.leq(i, j) || !p.leq(j, k)) continue;
        auto pij = p.projections.find({i, j});
        auto pjk = p.projections.find({j, k});
        auto pik = p.projections.find({i, k});
        if (pij == p.projections.end() || pjk == p.projections.end() || pik == p.projections.end()) continue;
        for (const auto& [o, mid] : pjk->second.objects)
          if (pij->second.objects.at(mid) != pik->second.objects.at(o))
            fail("projection composition fails on objects at (" + i + "," + j + "," + k + ")");
        for (const auto& [m, mid] : pjk->second.morphisms)
          if (pij->second.morphisms.at(mid) != pik->second.morphisms.at(m))
            fail("projection composition fails on morphisms at (" + i + "," + j + "," + k + ")");
      }
  return report;
}

}  // namespace fgc
