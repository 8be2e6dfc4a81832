#pragma once

#include <functional>
#include <memory>
#include <numeric>
#include <sstream>

#include "fgc/mapping.hpp"

namespace fgc {

using ObjId = std::string;
using CompId = std::string;

struct Morphism {
  ObjId src, tgt;
  Mapping map;
  auto operator<=>(const Morphism&) const = default;
};

/// A finite concrete groupoid: disjoint finite objects indexed by connected
/// components, morphisms as explicit bijections. Morphism identity is
/// (src, tgt, graph); ids are positions in the sorted morphism list.
struct ConcreteGroupoid {
  std::map<ObjId, ElemSet> objects;
  std::map<ObjId, CompId> component_of;
  std::map<CompId, ElemSet> component_label;
  std::vector<Morphism> morphisms;

  bool operator==(const ConcreteGroupoid&) const = default;

  void add_object(const ObjId& id, const CompId& comp, ElemSet elems) {
    objects[id] = std::move(elems);
    component_of[id] = comp;
    if (!component_label.count(comp)) component_label[comp] = {};
  }

  void add_morphism(ObjId src, ObjId tgt, Mapping m) {
    morphisms.push_back({std::move(src), std::move(tgt), std::move(m)});
  }

  /// Sort and deduplicate morphisms; must be called after hand-construction.
  void finalize() {
    std::sort(morphisms.begin(), morphisms.end());
    morphisms.erase(std::unique(morphisms.begin(), morphisms.end()), morphisms.end());
  }

  bool has_object(const ObjId& o) const { return objects.count(o) != 0; }

  const ElemSet& elements_of(const ObjId& o) const {
    auto it = objects.find(o);
    if (it == objects.end()) throw std::out_of_range("unknown object " + o);
    return it->second;
  }

  const CompId& component(const ObjId& o) const {
    auto it = component_of.find(o);
    if (it == component_of.end()) throw std::out_of_range("unknown object " + o);
    return it->second;
  }

  bool has_morphism(const Morphism& m) const {
    return std::binary_search(morphisms.begin(), morphisms.end(), m);
  }

  int morphism_index(const Morphism& m) const {
    auto it = std::lower_bound(morphisms.begin(), morphisms.end(), m);
    if (it == morphisms.end() || *it != m) return -1;
    return int(it - morphisms.begin());
  }

  std::vector<ObjId> object_ids() const {
    std::vector<ObjId> ids;
    for (const auto& [o, _] : objects) ids.push_back(o);
    return ids;
  }

  std::vector<ObjId> objects_in_component(const CompId& c) const {
    std::vector<ObjId> ids;
    for (const auto& [o, comp] : component_of)
      if (comp == c) ids.push_back(o);
    return ids;
  }
};

using GroupoidPtr = std::shared_ptr<const ConcreteGroupoid>;

inline GroupoidPtr share(ConcreteGroupoid g) {
  g.finalize();
  return std::make_shared<const ConcreteGroupoid>(std::move(g));
}

/// Diagnostic scan of all groupoid invariants; empty report iff valid.
inline std::vector<std::string> validate_groupoid(const ConcreteGroupoid& g) {
  std::vector<std::string> report;
  auto fail = [&](const std::string& s) { report.push_back(s); };

  // object element sets pairwise disjoint
  std::map<Elem, ObjId> owner;
  for (const auto& [o, elems] : g.objects) {
    if (!std::is_sorted(elems.begin(), elems.end()))
      fail("object " + o + ": element set not sorted/canonical");
    for (const auto& x : elems) {
      auto [it, fresh] = owner.emplace(x, o);
      if (!fresh) fail("element " + x + " shared by objects " + it->second + " and " + o);
    }
    if (!g.component_of.count(o)) fail("object " + o + ": no component");
  }
  for (const auto& [o, c] : g.component_of)
    if (!g.component_label.count(c)) fail("component " + c + ": no label");

  for (size_t i = 1; i < g.morphisms.size(); ++i)
    if (g.morphisms[i] == g.morphisms[i - 1]) fail("duplicate morphism at index " + std::to_string(i));

  for (size_t i = 0; i < g.morphisms.size(); ++i) {
    const auto& m = g.morphisms[i];
    if (!g.has_object(m.src) || !g.has_object(m.tgt)) {
      fail("morphism " + std::to_string(i) + ": unknown endpoint");
      continue;
    }
    if (m.map.domain() != g.elements_of(m.src))
      fail("morphism " + std::to_string(i) + ": domain is not all of " + m.src);
    else if (!m.map.bijection_onto(g.elements_of(m.tgt)))
      fail("morphism " + std::to_string(i) + ": not a bijection onto " + m.tgt);
    else {
      if (!g.has_morphism({m.tgt, m.src, m.map.inverse()}))
        fail("inverse missing for morphism " + std::to_string(i));
      if (g.component(m.src) != g.component(m.tgt))
        fail("morphism " + std::to_string(i) + " crosses components " + g.component(m.src) +
             " and " + g.component(m.tgt));
    }
  }
  if (!report.empty()) return report;

  for (const auto& [o, elems] : g.objects)
    if (!g.has_morphism({o, o, Mapping::identity(elems)})) fail("identity missing for object " + o);

  // composition closure
  for (const auto& m1 : g.morphisms)
    for (const auto& m2 : g.morphisms) {
      if (m1.tgt != m2.src) continue;
      if (!g.has_morphism({m1.src, m2.tgt, compose(m2.map, m1.map)}))
        fail("composition missing: " + m1.src + "->" + m1.tgt + "->" + m2.tgt);
    }

  // two objects connected iff same component
  std::map<std::pair<ObjId, ObjId>, bool> linked;
  for (const auto& m : g.morphisms) linked[{m.src, m.tgt}] = true;
  for (const auto& [o1, c1] : g.component_of)
    for (const auto& [o2, c2] : g.component_of) {
      bool has = linked.count({o1, o2}) != 0;
      if (has && c1 != c2) fail("objects " + o1 + ", " + o2 + " linked across components");
      if (!has && c1 == c2) fail("objects " + o1 + ", " + o2 + " share component " + c1 + " but Hom is empty");
    }
  return report;
}

inline bool is_valid_groupoid(const ConcreteGroupoid& g) { return validate_groupoid(g).empty(); }

/// Morphism ids with declared source O1 and target O2.
inline std::vector<int> hom_set(const ConcreteGroupoid& g, const ObjId& o1, const ObjId& o2) {
  g.elements_of(o1);
  g.elements_of(o2);
  std::vector<int> ids;
  for (size_t i = 0; i < g.morphisms.size(); ++i)
    if (g.morphisms[i].src == o1 && g.morphisms[i].tgt == o2) ids.push_back(int(i));
  return ids;
}

inline std::vector<Mapping> hom_maps(const ConcreteGroupoid& g, const ObjId& o1, const ObjId& o2) {
  std::vector<Mapping> maps;
  for (int i : hom_set(g, o1, o2)) maps.push_back(g.morphisms[i].map);
  return maps;
}

/// Aut(O) = Hom(O, O), checked closed under composition and inverse.
inline std::vector<Mapping> aut_group(const ConcreteGroupoid& g, const ObjId& o) {
  auto auts = hom_maps(g, o, o);
  std::set<Mapping> s(auts.begin(), auts.end());
  for (const auto& a : auts) {
    if (!s.count(a.inverse())) throw std::logic_error("aut_group: not closed under inverse");
    for (const auto& b : auts)
      if (!s.count(compose(a, b))) throw std::logic_error("aut_group: not closed under composition");
  }
  return auts;
}

struct FaithfulnessWitness {
  bool finitely_faithful = true;
  std::map<ObjId, ElemSet> witness;  // minimal tuple with trivial pointwise stabilizer
};

/// For finite concrete groupoids the full element tuple always has trivial
/// stabilizer, so the search is for a minimal witness per object.
inline FaithfulnessWitness is_finitely_faithful(const ConcreteGroupoid& g) {
  FaithfulnessWitness out;
  for (const auto& [o, elems] : g.objects) {
    auto auts = aut_group(g, o);
    auto stabilizer_trivial = [&](const ElemSet& tuple) {
      for (const auto& a : auts) {
        bool fixes = true;
        for (const auto& x : tuple) fixes &= (a.at(x) == x);
        if (fixes && a != Mapping::identity(elems)) return false;
      }
      return true;
    };
    bool found = false;
    for (size_t k = 0; k <= elems.size() && !found; ++k) {
      // lexicographically least k-subset with trivial stabilizer
      std::vector<size_t> idx(k);
      std::iota(idx.begin(), idx.end(), 0);
      while (!found) {
        ElemSet tuple;
        for (size_t i : idx) tuple.push_back(elems[i]);
        if (stabilizer_trivial(tuple)) {
          out.witness[o] = tuple;
          found = true;
          break;
        }
        // next combination
        size_t i = k;
        while (i > 0 && idx[i - 1] == elems.size() - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
    if (!found) out.finitely_faithful = false;  // unreachable for valid finite groupoids
  }
  return out;
}

inline bool is_canonical(const ConcreteGroupoid& g) {
  std::map<CompId, int> counts;
  for (const auto& [o, c] : g.component_of) ++counts[c];
  for (const auto& [c, n] : counts)
    if (n != 1) return false;
  return true;
}

/// A set of maps between two groupoids: the data of a morphism of groupoids.
struct GroupoidMorphismSet {
  GroupoidPtr source, target;
  std::vector<Morphism> maps;  // src object in *source, tgt object in *target
  std::set<std::pair<CompId, CompId>> relation;

  void finalize() {
    std::sort(maps.begin(), maps.end());
    maps.erase(std::unique(maps.begin(), maps.end()), maps.end());
    relation.clear();
    for (const auto& m : maps) relation.insert({source->component(m.src), target->component(m.tgt)});
  }

  bool has_map(const Morphism& m) const { return std::binary_search(maps.begin(), maps.end(), m); }

  std::vector<Mapping> maps_between(const ObjId& o1, const ObjId& o2) const {
    std::vector<Mapping> out;
    for (const auto& m : maps)
      if (m.src == o1 && m.tgt == o2) out.push_back(m.map);
    return out;
  }
};

inline std::vector<std::string> validate_morphism_set(const GroupoidMorphismSet& h) {
  std::vector<std::string> report;
  if (h.maps.empty()) report.push_back("morphism set is empty");
  for (size_t i = 0; i < h.maps.size(); ++i) {
    const auto& m = h.maps[i];
    if (!h.source->has_object(m.src) || !h.target->has_object(m.tgt)) {
      report.push_back("map " + std::to_string(i) + ": unknown endpoint");
      continue;
    }
    if (m.map.domain() != h.source->elements_of(m.src))
      report.push_back("map " + std::to_string(i) + ": domain is not all of " + m.src);
    else if (!is_subset(m.map.image(), h.target->elements_of(m.tgt)))
      report.push_back("map " + std::to_string(i) + ": image leaves " + m.tgt);
  }
  return report;
}

/// The identity morphism of a groupoid: the set of all its morphisms.
inline GroupoidMorphismSet identity_morphism_set(const GroupoidPtr& g) {
  GroupoidMorphismSet h;
  h.source = h.target = g;
  h.maps = g->morphisms;
  h.finalize();
  return h;
}

struct ConditionAResult {
  bool holds = true;
  // offending pair of maps (indices into H.maps) and a function present on
  // only one side of the hom-set equation
  int pair_first = -1, pair_second = -1;
  std::optional<Morphism> difference;
};

/// Condition (A), per pair of maps linking the same component pair: for
/// h_p : O1i -> O2j and h_m : O1k -> O2l, the map sets
/// h_p . Hom(O1k, O1i) and Hom(O2l, O2j) . h_m agree.
inline ConditionAResult check_condition_A(const GroupoidMorphismSet& h) {
  ConditionAResult res;
  for (size_t p = 0; p < h.maps.size(); ++p)
    for (size_t q = 0; q < h.maps.size(); ++q) {
      const auto& hp = h.maps[p];
      const auto& hm = h.maps[q];
      if (h.source->component(hp.src) != h.source->component(hm.src)) continue;
      if (h.target->component(hp.tgt) != h.target->component(hm.tgt)) continue;
      std::set<Mapping> lhs, rhs;
      for (const auto& g : hom_maps(*h.source, hm.src, hp.src)) lhs.insert(compose(hp.map, g));
      for (const auto& f : hom_maps(*h.target, hm.tgt, hp.tgt)) rhs.insert(compose(f, hm.map));
      if (lhs == rhs) continue;
      res.holds = false;
      res.pair_first = int(p);
      res.pair_second = int(q);
      std::vector<Mapping> diff;
      std::set_symmetric_difference(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
                                    std::back_inserter(diff));
      res.difference = Morphism{hm.src, hp.tgt, diff.front()};
      return res;
    }
  return res;
}

struct ConditionBResult {
  bool b_prime = true;  // closed under pre- and post-composition
  bool b = true;        // closed under post-composition only
  std::optional<Morphism> missing;
};

inline ConditionBResult check_condition_Bprime(const GroupoidMorphismSet& h) {
  ConditionBResult res;
  for (const auto& m : h.maps) {
    for (const auto& f : h.target->morphisms) {
      if (f.src != m.tgt) continue;
      Morphism comp{m.src, f.tgt, compose(f.map, m.map)};
      if (!h.has_map(comp)) {
        res.b = res.b_prime = false;
        if (!res.missing) res.missing = comp;
      }
    }
    for (const auto& g : h.source->morphisms) {
      if (g.tgt != m.src) continue;
      Morphism comp{g.src, m.tgt, compose(m.map, g.map)};
      if (!h.has_map(comp)) {
        res.b_prime = false;
        if (!res.missing) res.missing = comp;
      }
    }
  }
  return res;
}

/// Maps exist from component a to component b exactly when (a, b) is in R.
/// An empty map set only matches an empty R (and is flagged separately by
/// validate_morphism_set as malformed).
inline bool check_relation_compatibility(const GroupoidMorphismSet& h,
                                         const std::set<std::pair<CompId, CompId>>& r) {
  std::set<std::pair<CompId, CompId>> actual;
  for (const auto& m : h.maps)
    actual.insert({h.source->component(m.src), h.target->component(m.tgt)});
  return actual == r;
}

/// Compose morphism sets: { h2 . h1 : composable pairs }.
inline GroupoidMorphismSet compose_morphism_sets(const GroupoidMorphismSet& h2,
                                                 const GroupoidMorphismSet& h1) {
  GroupoidMorphismSet out;
  out.source = h1.source;
  out.target = h2.target;
  for (const auto& m1 : h1.maps)
    for (const auto& m2 : h2.maps)
      if (m2.src == m1.tgt) out.maps.push_back({m1.src, m2.tgt, compose(m2.map, m1.map)});
  out.finalize();
  return out;
}

/// Glue an isomorphism of groupoids into a single groupoid on the disjoint
/// union of the objects, with cross morphisms the maps of H and their
/// inverses. Requires (A), (B'), bijectivity, and disjointness.
inline ConcreteGroupoid glue_isomorphism(const GroupoidMorphismSet& h) {
  if (!check_condition_A(h).holds) throw std::invalid_argument("glue: condition (A) fails");
  if (!check_condition_Bprime(h).b_prime) throw std::invalid_argument("glue: condition (B') fails");
  for (const auto& m : h.maps)
    if (!m.map.bijection_onto(h.target->elements_of(m.tgt)))
      throw std::invalid_argument("glue: non-bijective map in H");

  const auto& g1 = *h.source;
  const auto& g2 = *h.target;
  for (const auto& [o, _] : g1.objects)
    if (g2.objects.count(o)) throw std::invalid_argument("glue: object id collision " + o);
  {
    std::set<Elem> e1;
    for (const auto& [o, elems] : g1.objects) e1.insert(elems.begin(), elems.end());
    for (const auto& [o, elems] : g2.objects)
      for (const auto& x : elems)
        if (e1.count(x)) throw std::invalid_argument("glue: element collision " + x);
  }

  ConcreteGroupoid g;
  // union-find over objects to recompute components
  std::map<ObjId, ObjId> parent;
  std::function<ObjId(ObjId)> find = [&](ObjId o) {
    while (parent[o] != o) o = parent[o] = parent[parent[o]];
    return o;
  };
  for (const auto& [o, elems] : g1.objects) { g.objects[o] = elems; parent[o] = o; }
  for (const auto& [o, elems] : g2.objects) { g.objects[o] = elems; parent[o] = o; }
  auto unite = [&](const ObjId& a, const ObjId& b) { parent[find(a)] = find(b); };

  for (const auto& m : g1.morphisms) { g.morphisms.push_back(m); unite(m.src, m.tgt); }
  for (const auto& m : g2.morphisms) { g.morphisms.push_back(m); unite(m.src, m.tgt); }
  for (const auto& m : h.maps) {
    g.morphisms.push_back(m);
    g.morphisms.push_back({m.tgt, m.src, m.map.inverse()});
    unite(m.src, m.tgt);
  }
  g.finalize();

  // close under composition (H satisfying (A)/(B') keeps this a fixpoint of
  // at most a couple of rounds)
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<Morphism> add;
    for (const auto& m1 : g.morphisms)
      for (const auto& m2 : g.morphisms) {
        if (m1.tgt != m2.src) continue;
        Morphism c{m1.src, m2.tgt, compose(m2.map, m1.map)};
        if (!g.has_morphism(c)) add.push_back(c);
      }
    if (!add.empty()) {
      grew = true;
      g.morphisms.insert(g.morphisms.end(), add.begin(), add.end());
      g.finalize();
    }
  }

  // component ids: prefer the source groupoid's id for merged classes
  std::map<ObjId, CompId> class_comp;
  for (const auto& [o, _] : g1.objects) {
    ObjId root = find(o);
    if (!class_comp.count(root)) class_comp[root] = g1.component(o);
  }
  for (const auto& [o, _] : g2.objects) {
    ObjId root = find(o);
    if (!class_comp.count(root)) class_comp[root] = g2.component(o);
  }
  std::set<CompId> used;
  std::map<ObjId, CompId> final_comp;
  for (auto& [root, c] : class_comp) {
    CompId name = c;
    while (used.count(name)) name += "'";
    used.insert(name);
    final_comp[root] = name;
    auto l1 = g1.component_label.find(c);
    g.component_label[name] = l1 != g1.component_label.end() ? l1->second
                                                             : g2.component_label.at(c);
  }
  for (const auto& [o, _] : g.objects) g.component_of[o] = final_comp.at(find(o));
  return g;
}

/// Disjoint isomorphic copy with renamed elements and objects; returns the
/// copy plus the element bijection original -> copy.
struct GroupoidCopy {
  ConcreteGroupoid groupoid;
  std::map<ObjId, ObjId> object_names;
  Mapping elem_map;
};

inline GroupoidCopy copy_groupoid(const ConcreteGroupoid& g, const std::string& prefix) {
  GroupoidCopy out;
  std::vector<std::pair<Elem, Elem>> pairs;
  for (const auto& [o, elems] : g.objects) {
    ObjId o2 = prefix + o;
    out.object_names[o] = o2;
    ElemSet copied;
    for (const auto& x : elems) {
      copied.push_back(prefix + x);
      pairs.emplace_back(x, prefix + x);
    }
    out.groupoid.add_object(o2, g.component(o), make_set(copied));
  }
  out.groupoid.component_label = g.component_label;
  out.elem_map = Mapping(std::move(pairs));
  for (const auto& m : g.morphisms) {
    std::vector<std::pair<Elem, Elem>> copied;
    for (const auto& [x, y] : m.map.pairs) copied.emplace_back(prefix + x, prefix + y);
    out.groupoid.add_morphism(out.object_names.at(m.src), out.object_names.at(m.tgt),
                              Mapping(std::move(copied)));
  }
  out.groupoid.finalize();
  return out;
}

}  // namespace fgc
