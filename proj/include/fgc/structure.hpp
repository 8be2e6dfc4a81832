#pragma once

#include "fgc/mapping.hpp"

namespace fgc {

struct Sort {
  std::string name;
  ElemSet elements;
  bool operator==(const Sort&) const = default;
};

struct Relation {
  std::string name;
  std::vector<std::string> signature;       // sort names
  std::set<std::vector<Elem>> tuples;
  bool operator==(const Relation&) const = default;
};

struct FiberMap {
  std::string s_sort;
  ElemSet base_elements;  // the set A inside the base sorts
  Mapping map;            // total on the S sort, onto base_elements
  bool operator==(const FiberMap&) const = default;
};

/// Finite multi-sorted relational structure with distinguished base sorts
/// (the copy of the ground structure) and an optional fiber map S -> A.
struct MultiSortedStructure {
  std::vector<Sort> sorts;
  std::vector<Relation> relations;
  std::vector<std::string> base_sorts;
  std::optional<FiberMap> fiber;

  bool operator==(const MultiSortedStructure&) const = default;

  const Sort& sort(const std::string& name) const {
    for (const auto& s : sorts)
      if (s.name == name) return s;
    throw std::out_of_range("unknown sort " + name);
  }
  bool has_sort(const std::string& name) const {
    for (const auto& s : sorts)
      if (s.name == name) return true;
    return false;
  }
  bool is_base(const std::string& name) const {
    return std::find(base_sorts.begin(), base_sorts.end(), name) != base_sorts.end();
  }
  const Relation* relation(const std::string& name) const {
    for (const auto& r : relations)
      if (r.name == name) return &r;
    return nullptr;
  }
  Relation& add_relation(std::string name, std::vector<std::string> sig) {
    relations.push_back({std::move(name), std::move(sig), {}});
    return relations.back();
  }
  const std::string& sort_of(const Elem& x) const {
    for (const auto& s : sorts)
      if (set_contains(s.elements, x)) return s.name;
    throw std::out_of_range("element " + x + " not in any sort");
  }
};

inline std::vector<std::string> validate_structure(const MultiSortedStructure& m) {
  std::vector<std::string> report;
  std::set<Elem> seen;
  for (const auto& s : m.sorts) {
    for (const auto& x : s.elements)
      if (!seen.insert(x).second) report.push_back("element " + x + " appears in two sorts");
  }
  for (const auto& b : m.base_sorts)
    if (!m.has_sort(b)) report.push_back("base sort " + b + " undeclared");
  for (const auto& r : m.relations)
    for (const auto& t : r.tuples) {
      if (t.size() != r.signature.size()) {
        report.push_back("relation " + r.name + ": arity mismatch");
        break;
      }
      for (size_t i = 0; i < t.size(); ++i)
        if (!m.has_sort(r.signature[i]) || !set_contains(m.sort(r.signature[i]).elements, t[i])) {
          report.push_back("relation " + r.name + ": tuple leaves sort " + r.signature[i]);
          break;
        }
    }
  if (m.fiber) {
    if (!m.has_sort(m.fiber->s_sort)) report.push_back("fiber sort undeclared");
    else {
      if (m.fiber->map.domain() != m.sort(m.fiber->s_sort).elements)
        report.push_back("fiber map not total on " + m.fiber->s_sort);
      if (m.fiber->map.image() != m.fiber->base_elements)
        report.push_back("fiber map not onto its base set");
      ElemSet base_pool;
      for (const auto& b : m.base_sorts) base_pool = set_union(base_pool, m.sort(b).elements);
      if (!is_subset(m.fiber->base_elements, base_pool))
        report.push_back("fiber base set leaves the base sorts");
    }
  }
  return report;
}

/// Per-sort family of bijections.
struct Automorphism {
  std::map<std::string, Mapping> per_sort;
  bool operator==(const Automorphism&) const = default;
  auto operator<=>(const Automorphism&) const = default;

  const Elem& apply(const MultiSortedStructure& m, const Elem& x) const {
    return per_sort.at(m.sort_of(x)).at(x);
  }
  static Automorphism identity(const MultiSortedStructure& m) {
    Automorphism a;
    for (const auto& s : m.sorts) a.per_sort[s.name] = Mapping::identity(s.elements);
    return a;
  }
};

inline Automorphism compose(const Automorphism& outer, const Automorphism& inner) {
  Automorphism out;
  for (const auto& [s, m] : inner.per_sort) out.per_sort[s] = compose(outer.per_sort.at(s), m);
  return out;
}

inline Automorphism inverse(const Automorphism& a) {
  Automorphism out;
  for (const auto& [s, m] : a.per_sort) out.per_sort[s] = m.inverse();
  return out;
}

struct SearchOptions {
  std::vector<std::string> fix_sorts_pointwise;
  std::vector<std::pair<std::string, ElemSet>> fix_sets;  // setwise-invariant subsets
  std::map<Elem, Elem> preassigned;                       // from-element -> to-element
  size_t limit = SIZE_MAX;                                // stop after this many solutions
};

namespace detail {

struct SearchIndex {
  // global element indexing for `from`, and per-sort candidate pools in `to`
  std::vector<std::pair<int, Elem>> elems;  // (sort index, element), declared order
  std::map<Elem, int> index_of;
  std::vector<std::vector<int>> rel_tuples;             // per relation: flattened from-tuples
  std::vector<int> rel_arity;
  std::vector<std::set<std::vector<Elem>>> to_tuples;   // target tuple sets
  std::vector<std::vector<std::vector<int>>> touching;  // elem -> list of (rel, tuple offset) pairs
};

}  // namespace detail

/// All sort-respecting bijection families `from -> to` preserving every
/// relation (and the fiber map, treated as the graph relation), subject to
/// the given constraints. Exhaustive backtracking in declared element order;
/// output order is deterministic.
inline std::vector<Automorphism> structure_bijections(const MultiSortedStructure& from,
                                                      const MultiSortedStructure& to,
                                                      const SearchOptions& opts = {}) {
  std::vector<Automorphism> out;
  if (from.sorts.size() != to.sorts.size()) return out;
  for (size_t i = 0; i < from.sorts.size(); ++i) {
    if (from.sorts[i].name != to.sorts[i].name) return out;
    if (from.sorts[i].elements.size() != to.sorts[i].elements.size()) return out;
  }

  // collect relations, augmenting with fiber graphs
  auto collect = [](const MultiSortedStructure& m) {
    std::vector<Relation> rels = m.relations;
    if (m.fiber) {
      Relation g{"__fiber", {m.fiber->s_sort, ""}, {}};
      for (const auto& [x, y] : m.fiber->map.pairs) g.tuples.insert({x, y});
      rels.push_back(std::move(g));
    }
    return rels;
  };
  auto rels_from = collect(from);
  auto rels_to = collect(to);
  if (rels_from.size() != rels_to.size()) return out;
  for (size_t r = 0; r < rels_from.size(); ++r) {
    if (rels_from[r].name != rels_to[r].name) return out;
    if (rels_from[r].tuples.size() != rels_to[r].tuples.size()) return out;
  }

  // element order: sorts by declared order, elements by index
  std::vector<Elem> order;
  std::map<Elem, const ElemSet*> candidates_pool;
  for (size_t si = 0; si < from.sorts.size(); ++si)
    for (const auto& x : from.sorts[si].elements) {
      order.push_back(x);
      candidates_pool[x] = &to.sorts[si].elements;
    }

  std::map<Elem, int> pos;
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = int(i);

  // tuples indexed by the last-assigned position for incremental checks
  struct TupleRef {
    size_t rel;
    const std::vector<Elem>* tuple;
  };
  std::vector<std::vector<TupleRef>> check_at(order.size());
  for (size_t r = 0; r < rels_from.size(); ++r)
    for (const auto& t : rels_from[r].tuples) {
      int last = -1;
      for (const auto& x : t) last = std::max(last, pos.at(x));
      if (last >= 0) check_at[last].push_back({r, &t});
    }

  std::map<Elem, Elem> asg = opts.preassigned;
  std::set<Elem> used;
  for (const auto& [k, v] : asg) used.insert(v);

  // constraint tables
  std::set<Elem> fixed_pointwise;
  for (const auto& s : opts.fix_sorts_pointwise)
    for (const auto& x : from.sort(s).elements) fixed_pointwise.insert(x);
  std::map<Elem, int> set_class;  // element -> fix_sets index
  for (size_t i = 0; i < opts.fix_sets.size(); ++i)
    for (const auto& x : opts.fix_sets[i].second) set_class[x] = int(i);

  std::function<void(size_t)> rec = [&](size_t i) {
    if (out.size() >= opts.limit) return;
    if (i == order.size()) {
      Automorphism a;
      for (size_t si = 0; si < from.sorts.size(); ++si) {
        std::vector<std::pair<Elem, Elem>> pairs;
        for (const auto& x : from.sorts[si].elements) pairs.emplace_back(x, asg.at(x));
        a.per_sort[from.sorts[si].name] = Mapping(std::move(pairs));
      }
      out.push_back(std::move(a));
      return;
    }
    const Elem& x = order[i];
    auto try_value = [&](const Elem& v) {
      if (used.count(v)) return;
      auto sc = set_class.find(x);
      auto scv = set_class.find(v);
      bool x_in = sc != set_class.end(), v_in = scv != set_class.end();
      if (x_in != v_in || (x_in && sc->second != scv->second)) return;
      asg[x] = v;
      used.insert(v);
      bool ok = true;
      for (const auto& ref : check_at[i]) {
        std::vector<Elem> image;
        image.reserve(ref.tuple->size());
        for (const auto& e : *ref.tuple) image.push_back(asg.at(e));
        if (!rels_to[ref.rel].tuples.count(image)) {
          ok = false;
          break;
        }
      }
      if (ok) rec(i + 1);
      asg.erase(x);
      used.erase(v);
    };
    if (auto it = opts.preassigned.find(x); it != opts.preassigned.end()) {
      // already assigned; still run the relation checks for this position
      bool ok = true;
      for (const auto& ref : check_at[i]) {
        std::vector<Elem> image;
        for (const auto& e : *ref.tuple) image.push_back(asg.at(e));
        if (!rels_to[ref.rel].tuples.count(image)) {
          ok = false;
          break;
        }
      }
      if (ok) rec(i + 1);
      return;
    }
    if (fixed_pointwise.count(x)) {
      try_value(x);
      return;
    }
    for (const auto& v : *candidates_pool[x]) try_value(v);
  };
  rec(0);
  return out;
}

/// Exactly the relation-preserving bijection families meeting the
/// constraints; deterministic order.
inline std::vector<Automorphism> automorphism_group(const MultiSortedStructure& m,
                                                    const SearchOptions& opts = {}) {
  return structure_bijections(m, m, opts);
}

inline bool is_automorphism(const MultiSortedStructure& m, const Automorphism& a) {
  for (const auto& s : m.sorts) {
    auto it = a.per_sort.find(s.name);
    if (it == a.per_sort.end() || it->second.domain() != s.elements ||
        !it->second.bijection_onto(s.elements))
      return false;
  }
  auto check_tuples = [&](const std::set<std::vector<Elem>>& tuples,
                          const std::vector<std::string>& sig) {
    for (const auto& t : tuples) {
      std::vector<Elem> image;
      image.reserve(t.size());
      for (size_t i = 0; i < t.size(); ++i) image.push_back(a.apply(m, t[i]));
      if (!tuples.count(image)) return false;
    }
    (void)sig;
    return true;
  };
  for (const auto& r : m.relations)
    if (!check_tuples(r.tuples, r.signature)) return false;
  if (m.fiber) {
    std::set<std::vector<Elem>> graph;
    for (const auto& [x, y] : m.fiber->map.pairs) graph.insert({x, y});
    if (!check_tuples(graph, {})) return false;
  }
  return true;
}

/// Plain reduct: keep the named sorts and the relations whose signatures
/// stay inside them. No induced structure is added.
inline MultiSortedStructure reduct(const MultiSortedStructure& m, const std::vector<std::string>& keep) {
  MultiSortedStructure out;
  auto kept = [&](const std::string& s) {
    return std::find(keep.begin(), keep.end(), s) != keep.end();
  };
  for (const auto& s : m.sorts)
    if (kept(s.name)) out.sorts.push_back(s);
  for (const auto& b : m.base_sorts)
    if (kept(b)) out.base_sorts.push_back(b);
  for (const auto& r : m.relations) {
    bool ok = true;
    for (const auto& s : r.signature) ok &= kept(s);
    if (ok) out.relations.push_back(r);
  }
  if (m.fiber && kept(m.fiber->s_sort)) out.fiber = m.fiber;
  return out;
}

/// Restriction of a structure to element subsets of its sorts, with the
/// finite-scale proxy for parameter-definability: named relations restricted,
/// a fiber predicate per parameter, and the orbit relations of
/// Aut(M / parameters) up to the arity bound.
struct RestrictSpec {
  std::map<std::string, ElemSet> kept;  // sort -> kept elements; absent sort is dropped
  ElemSet parameters;                   // elements of M fixed pointwise for the orbit proxy
  int orbit_arity = 2;
};

inline MultiSortedStructure restrict_structure(const MultiSortedStructure& m, const RestrictSpec& spec) {
  for (const auto& p : spec.parameters) m.sort_of(p);  // throws on foreign parameters
  MultiSortedStructure out;
  for (const auto& s : m.sorts) {
    auto it = spec.kept.find(s.name);
    if (it == spec.kept.end()) continue;
    if (!is_subset(it->second, s.elements))
      throw std::invalid_argument("restrict_structure: kept elements leave sort " + s.name);
    out.sorts.push_back({s.name, it->second});
  }
  for (const auto& b : m.base_sorts)
    if (spec.kept.count(b)) out.base_sorts.push_back(b);
  auto elem_kept = [&](const Elem& x) {
    for (const auto& s : out.sorts)
      if (set_contains(s.elements, x)) return true;
    return false;
  };
  for (const auto& r : m.relations) {
    Relation rr{r.name, r.signature, {}};
    bool sig_ok = true;
    for (const auto& s : r.signature) sig_ok &= spec.kept.count(s) != 0;
    if (!sig_ok) continue;
    for (const auto& t : r.tuples) {
      bool ok = true;
      for (const auto& x : t) ok &= elem_kept(x);
      if (ok) rr.tuples.insert(t);
    }
    out.relations.push_back(std::move(rr));
  }
  if (m.fiber && spec.kept.count(m.fiber->s_sort)) {
    FiberMap f;
    f.s_sort = m.fiber->s_sort;
    f.map = m.fiber->map.restrict(spec.kept.at(m.fiber->s_sort));
    f.base_elements = f.map.image();
    out.fiber = f;
    for (const auto& p : spec.parameters) {
      if (!set_contains(m.fiber->base_elements, p)) continue;
      Relation pred{"fiber_" + p, {f.s_sort}, {}};
      for (const auto& [x, y] : f.map.pairs)
        if (y == p) pred.tuples.insert({x});
      out.relations.push_back(std::move(pred));
    }
  }

  // orbit relations of Aut(M / parameters) on kept tuples, one per orbit
  SearchOptions opts;
  for (const auto& p : spec.parameters) opts.preassigned[p] = p;
  auto group = automorphism_group(m, opts);
  std::vector<std::map<Elem, Elem>> flat;  // merged per-sort maps, for fast apply
  flat.reserve(group.size());
  for (const auto& g : group) {
    std::map<Elem, Elem> f;
    for (const auto& [s, mp] : g.per_sort) f.insert(mp.pairs.begin(), mp.pairs.end());
    flat.push_back(std::move(f));
  }
  ElemSet pool;
  for (const auto& s : out.sorts) pool = set_union(pool, s.elements);
  for (int k = 1; k <= spec.orbit_arity; ++k) {
    std::set<std::vector<Elem>> unseen;
    std::vector<std::vector<Elem>> all;
    {
      std::vector<Elem> t(k);
      std::function<void(int)> gen = [&](int i) {
        if (i == k) {
          all.push_back(t);
          return;
        }
        for (const auto& x : pool) {
          t[i] = x;
          gen(i + 1);
        }
      };
      gen(0);
    }
    unseen.insert(all.begin(), all.end());
    int orbit_id = 0;
    for (const auto& t : all) {
      if (!unseen.count(t)) continue;
      Relation orb{"orbit" + std::to_string(k) + "_" + std::to_string(orbit_id++), {}, {}};
      for (const auto& x : t) orb.signature.push_back(m.sort_of(x));
      // the orbit is {g(t) : g in the full group}; keep its kept-tuple part
      for (const auto& g : flat) {
        std::vector<Elem> img;
        img.reserve(t.size());
        bool inside = true;
        for (const auto& x : t) {
          const Elem& y = g.at(x);
          inside &= elem_kept(y);
          if (!inside) break;
          img.push_back(y);
        }
        if (inside) {
          orb.tuples.insert(img);
          unseen.erase(img);
        }
      }
      out.relations.push_back(std::move(orb));
    }
  }
  return out;
}

/// Convenience: restrict to the base sorts plus the union of fibers over a
/// subset of A, with the fiber points as parameters.
inline MultiSortedStructure restrict_to_fibers(const MultiSortedStructure& m, const ElemSet& points,
                                               int orbit_arity = 0) {
  if (!m.fiber) throw std::invalid_argument("restrict_to_fibers: structure has no fiber map");
  RestrictSpec spec;
  for (const auto& b : m.base_sorts) spec.kept[b] = m.sort(b).elements;
  ElemSet s_kept;
  for (const auto& [x, y] : m.fiber->map.pairs)
    if (set_contains(points, y)) s_kept.push_back(x);
  spec.kept[m.fiber->s_sort] = make_set(std::move(s_kept));
  spec.parameters = points;
  spec.orbit_arity = orbit_arity > 0 ? orbit_arity : std::max(2, int(points.size()));
  return restrict_structure(m, spec);
}

struct StableEmbeddingReport {
  bool stably_embedded = true;
  std::optional<Automorphism> non_lifting;  // witness automorphism of sub
};

/// Every automorphism of `sub` (a structure over element subsets of `m`'s
/// sorts) must extend to an automorphism of `m`.
inline StableEmbeddingReport check_stable_embedding(const MultiSortedStructure& m,
                                                    const MultiSortedStructure& sub) {
  StableEmbeddingReport rep;
  for (const auto& s : sub.sorts)
    if (!m.has_sort(s.name) || !is_subset(s.elements, m.sort(s.name).elements))
      throw std::invalid_argument("check_stable_embedding: sub is not inside the structure");
  for (const auto& sigma : automorphism_group(sub)) {
    SearchOptions opts;
    opts.limit = 1;
    for (const auto& [sname, mp] : sigma.per_sort)
      for (const auto& [x, y] : mp.pairs) opts.preassigned[x] = y;
    if (structure_bijections(m, m, opts).empty()) {
      rep.stably_embedded = false;
      rep.non_lifting = sigma;
      return rep;
    }
  }
  return rep;
}

/// τ ∪ id_base is an automorphism iff its restriction to every finite set of
/// fibers is one of the restricted structure (the local-to-global criterion;
/// both sides are computed and compared).
inline bool local_global_check(const MultiSortedStructure& m, const Mapping& tau) {
  if (!m.fiber) throw std::invalid_argument("local_global_check: no fiber map");
  const auto& s_sort = m.fiber->s_sort;
  if (tau.domain() != m.sort(s_sort).elements)
    throw std::invalid_argument("local_global_check: tau is not total on " + s_sort);
  for (const auto& [x, y] : tau.pairs)
    if (m.fiber->map.at(x) != m.fiber->map.at(y))
      throw std::invalid_argument("local_global_check: tau does not respect the fiber map");

  // global side: τ ∪ id on the base extends to an automorphism of all of M
  SearchOptions gopt;
  gopt.limit = 1;
  for (const auto& b : m.base_sorts) gopt.fix_sorts_pointwise.push_back(b);
  for (const auto& [x, y] : tau.pairs) gopt.preassigned[x] = y;
  bool global = !structure_bijections(m, m, gopt).empty();

  bool local = true;
  for (const auto& c : nonempty_subsets(m.fiber->base_elements)) {
    auto sub = restrict_to_fibers(m, c);
    Automorphism r = Automorphism::identity(sub);
    r.per_sort[s_sort] = tau.restrict(sub.sort(s_sort).elements);
    if (!is_automorphism(sub, r)) {
      local = false;
      break;
    }
  }
  if (global != local)
    throw std::logic_error("local_global_check: local and global verdicts disagree");
  return global;
}

/// Turn the fiber-map field into an explicit graph relation, so structure
/// unions can carry several fibered sorts at once.
inline MultiSortedStructure materialize_fiber(MultiSortedStructure m) {
  if (!m.fiber) return m;
  Relation g{"fiber_of_" + m.fiber->s_sort, {m.fiber->s_sort, ""}, {}};
  for (const auto& [x, y] : m.fiber->map.pairs) {
    g.signature[1] = m.sort_of(y);
    g.tuples.insert({x, y});
  }
  m.relations.push_back(std::move(g));
  m.fiber.reset();
  return m;
}

/// Rename the non-base sorts, their elements, and every relation touching
/// them, producing a disjoint presentation of the same cover over the same
/// base. Used to put two copies of a cover side by side.
inline MultiSortedStructure rename_cover_part(const MultiSortedStructure& m, const std::string& suffix) {
  MultiSortedStructure out;
  std::map<Elem, Elem> ren;
  auto renamed = [&](const Elem& x) {
    auto it = ren.find(x);
    return it == ren.end() ? x : it->second;
  };
  for (const auto& s : m.sorts) {
    if (m.is_base(s.name)) {
      out.sorts.push_back(s);
      continue;
    }
    Sort s2{s.name + suffix, {}};
    for (const auto& x : s.elements) {
      ren[x] = x + suffix;
      s2.elements.push_back(x + suffix);
    }
    s2.elements = make_set(std::move(s2.elements));
    out.sorts.push_back(std::move(s2));
  }
  out.base_sorts = m.base_sorts;
  for (const auto& r : m.relations) {
    bool touches = false;
    for (const auto& s : r.signature) touches |= !m.is_base(s);
    Relation r2{touches ? r.name + suffix : r.name, r.signature, {}};
    for (auto& s : r2.signature)
      if (!m.is_base(s)) s += suffix;
    for (const auto& t : r.tuples) {
      std::vector<Elem> t2;
      t2.reserve(t.size());
      for (const auto& x : t) t2.push_back(renamed(x));
      r2.tuples.insert(std::move(t2));
    }
    out.relations.push_back(std::move(r2));
  }
  if (m.fiber) {
    FiberMap f;
    f.s_sort = m.fiber->s_sort + suffix;
    f.base_elements = m.fiber->base_elements;
    std::vector<std::pair<Elem, Elem>> pairs;
    for (const auto& [x, y] : m.fiber->map.pairs) pairs.emplace_back(renamed(x), y);
    f.map = Mapping(std::move(pairs));
    out.fiber = std::move(f);
  }
  return out;
}

/// Union of two structures sharing their base part, with the graph of
/// h : S1 -> S2 adjoined as a relation. Fiber maps are materialized as graph
/// relations so both sides keep their fibering. If the two structures are
/// the same object the graph is simply added to it.
inline MultiSortedStructure combine_over_base(const MultiSortedStructure& m1,
                                              const MultiSortedStructure& m2, const Mapping& h,
                                              const std::string& s1_sort, const std::string& s2_sort,
                                              const std::string& graph_name = "h_graph") {
  MultiSortedStructure out = materialize_fiber(m1);
  if (!(m1 == m2)) {
    MultiSortedStructure b = materialize_fiber(m2);
    for (const auto& s : b.sorts) {
      if (out.has_sort(s.name)) {
        if (!(out.sort(s.name) == s))
          throw std::invalid_argument("combine_over_base: shared sort " + s.name + " differs");
        continue;
      }
      out.sorts.push_back(s);
    }
    for (const auto& r : b.relations) {
      const Relation* mine = out.relation(r.name);
      if (mine) {
        if (!(*mine == r)) throw std::invalid_argument("combine_over_base: relation " + r.name + " differs");
        continue;
      }
      out.relations.push_back(r);
    }
    for (const auto& bs : b.base_sorts)
      if (!out.is_base(bs)) out.base_sorts.push_back(bs);
  }
  Relation g{graph_name, {s1_sort, s2_sort}, {}};
  for (const auto& [x, y] : h.pairs) g.tuples.insert({x, y});
  out.relations.push_back(std::move(g));
  return out;
}

}  // namespace fgc
