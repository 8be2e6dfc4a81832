#pragma once

#include <random>

#include "fgc/simplicial.hpp"

namespace fgc::fixtures {

/// Close a set of permutations of omega under composition and inverse.
inline std::vector<Mapping> close_group(const ElemSet& omega, std::vector<Mapping> gens) {
  std::set<Mapping> group;
  group.insert(Mapping::identity(omega));
  std::vector<Mapping> frontier(group.begin(), group.end());
  for (auto& g : gens) frontier.push_back(std::move(g));
  while (!frontier.empty()) {
    std::vector<Mapping> next;
    for (const auto& f : frontier) {
      if (!group.insert(f).second) continue;
      next.push_back(f);
    }
    frontier.clear();
    for (const auto& f : next)
      for (const auto& g : group) {
        Mapping fg = compose(f, g), gf = compose(g, f);
        if (!group.count(fg)) frontier.push_back(fg);
        if (!group.count(gf)) frontier.push_back(gf);
        Mapping fi = f.inverse();
        if (!group.count(fi)) frontier.push_back(fi);
      }
  }
  return {group.begin(), group.end()};
}

/// Data for the standard fibered construction: reference fibers F_a and a
/// fiber-preserving permutation group of their union. Component groups are
/// the coordinate restrictions, so all restriction maps are onto and the
/// resulting simplicial groupoid is valid with the disjoint union property.
struct FiberedFamily {
  ElemSet base;
  std::map<Elem, ElemSet> fibers;
  std::vector<Mapping> group;  // all of Γ, acting on the union of the fibers
};

inline ElemSet fiber_union(const FiberedFamily& fam, const ElemSet& subset) {
  ElemSet omega;
  for (const auto& a : subset) omega = set_union(omega, fam.fibers.at(a));
  return omega;
}

/// One groupoid per degree, objects_per_component copies in each component,
/// each identified with the reference fiber union by a twist bijection;
/// morphisms and inclusions are the Γ-translates.
inline SimplicialGroupoid build_fibered_simplicial(
    const FiberedFamily& fam, const std::map<std::string, int>& objects_per_component = {},
    const std::map<std::string, std::vector<Mapping>>& twists = {}) {
  SimplicialGroupoid sg;
  sg.base = fam.base;
  auto subsets = nonempty_subsets(fam.base);

  struct ObjInfo {
    ObjId id;
    Mapping to_omega;  // bijection object elements -> reference fiber union
  };
  std::map<std::string, std::vector<ObjInfo>> objs;       // subset key -> objects
  std::map<std::string, std::vector<Mapping>> restricted; // subset key -> Γ restricted

  for (const auto& c : subsets) {
    std::string key = subset_key(c);
    ElemSet omega = fiber_union(fam, c);
    std::set<Mapping> gs;
    for (const auto& g : fam.group) gs.insert(g.restrict(omega));
    restricted[key] = {gs.begin(), gs.end()};

    int count = 1;
    if (auto it = objects_per_component.find(key); it != objects_per_component.end()) count = it->second;
    ObjId base_name = "P";
    for (const auto& a : c) base_name += a;
    for (int t = 0; t < count; ++t) {
      ObjId id = t == 0 ? base_name : base_name + ":" + std::to_string(t);
      std::vector<std::pair<Elem, Elem>> pairs;
      for (const auto& x : omega) pairs.emplace_back(id + ":" + x, x);
      Mapping naming(std::move(pairs));
      Mapping beta = naming;
      if (auto it = twists.find(key); it != twists.end() && t < int(it->second.size()))
        beta = compose(it->second[t], naming);  // twist permutes the reference set
      objs[key].push_back({id, beta});
    }
  }

  int max_degree = int(fam.base.size());
  for (int n = 1; n <= max_degree; ++n) {
    ConcreteGroupoid g;
    for (const auto& c : subsets) {
      if (int(c.size()) != n) continue;
      std::string key = subset_key(c);
      g.component_label[key] = c;
      for (const auto& o : objs[key]) g.add_object(o.id, key, o.to_omega.domain());
      for (const auto& o1 : objs[key])
        for (const auto& o2 : objs[key])
          for (const auto& sigma : restricted[key])
            g.add_morphism(o1.id, o2.id, compose(o2.to_omega.inverse(), compose(sigma, o1.to_omega)));
    }
    g.finalize();
    sg.degrees[n] = share(std::move(g));
  }

  for (int n = 1; n <= max_degree; ++n)
    for (int m = n + 1; m <= max_degree; ++m) {
      GroupoidMorphismSet h;
      h.source = sg.degrees.at(n);
      h.target = sg.degrees.at(m);
      for (const auto& c : subsets) {
        if (int(c.size()) != n) continue;
        for (const auto& d : subsets) {
          if (int(d.size()) != m || !is_subset(c, d)) continue;
          for (const auto& o1 : objs[subset_key(c)])
            for (const auto& o2 : objs[subset_key(d)])
              for (const auto& tau : restricted[subset_key(d)]) {
                // beta2^-1 . tau . iota0 . beta1, with iota0 the set inclusion
                Mapping up = compose(tau, o1.to_omega);
                std::vector<std::pair<Elem, Elem>> pairs;
                Mapping back = o2.to_omega.inverse();
                for (const auto& [x, y] : up.pairs) pairs.emplace_back(x, back.at(y));
                h.maps.push_back({o1.id, o2.id, Mapping(std::move(pairs))});
              }
        }
      }
      h.finalize();
      sg.inclusions[{n, m}] = std::move(h);
    }
  return sg;
}

/// Full fiberwise-swap group on 2-element fibers indexed by the base.
inline FiberedFamily swap_family(const ElemSet& base, const std::map<Elem, ElemSet>& fibers) {
  FiberedFamily fam{base, fibers, {}};
  ElemSet omega = fiber_union(fam, base);
  std::vector<Mapping> gens;
  for (const auto& [a, f] : fibers) {
    if (f.size() < 2) continue;
    // generate the full symmetric group on each fiber
    for (size_t i = 0; i + 1 < f.size(); ++i) {
      Mapping m = Mapping::identity(omega);
      for (auto& [k, v] : m.pairs) {
        if (k == f[i]) v = f[i + 1];
        else if (k == f[i + 1]) v = f[i];
      }
      gens.push_back(std::move(m));
    }
  }
  fam.group = close_group(omega, std::move(gens));
  return fam;
}

/// Two-point base, two-element fibers, independent swaps: degree-1 automorphism
/// groups of order 2, the degree-2 group of order 4, translate inclusions.
inline SimplicialGroupoid sg_toy() {
  return build_fibered_simplicial(
      swap_family({"a", "b"}, {{"a", {"p1", "p2"}}, {"b", {"q1", "q2"}}}));
}

/// Three-point variant of sg_toy.
inline SimplicialGroupoid sg_toy3() {
  return build_fibered_simplicial(
      swap_family({"a", "b", "c"}, {{"a", {"p1", "p2"}}, {"b", {"q1", "q2"}}, {"c", {"s1", "s2"}}}));
}

inline Mapping random_permutation(const ElemSet& s, std::mt19937_64& rng) {
  ElemSet img = s;
  std::shuffle(img.begin(), img.end(), rng);
  std::vector<std::pair<Elem, Elem>> pairs;
  for (size_t i = 0; i < s.size(); ++i) pairs.emplace_back(s[i], img[i]);
  return Mapping(std::move(pairs));
}

/// Random valid simplicial groupoid at desk scale: |A| <= 4, at most 3
/// objects per component, fibers of size <= 4.
inline SimplicialGroupoid random_simplicial(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return int(lo + rng() % uint64_t(hi - lo + 1)); };
  int n = pick(2, 4);
  if (pick(0, 9) == 0) n = 1;
  static const char* names[] = {"a", "b", "c", "d"};
  ElemSet base;
  for (int i = 0; i < n; ++i) base.push_back(names[i]);

  FiberedFamily fam;
  fam.base = base;
  ElemSet omega;
  for (const auto& a : base) {
    int size = n >= 4 ? pick(1, 2) : (pick(0, 3) == 0 ? pick(3, 4) : pick(1, 2));
    ElemSet f;
    for (int i = 0; i < size; ++i) f.push_back(a + std::to_string(i));
    fam.fibers[a] = f;
    omega = set_union(omega, f);
  }
  const size_t group_cap = n >= 4 ? 32 : 64;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<Mapping> gens;
    int k = attempt < 4 ? pick(1, 2) : 1;
    for (int i = 0; i < k; ++i) {
      std::vector<Mapping> parts;
      for (const auto& [a, f] : fam.fibers) parts.push_back(random_permutation(f, rng));
      gens.push_back(disjoint_union(parts));
    }
    auto grp = close_group(omega, gens);
    if (grp.size() <= group_cap) {
      fam.group = std::move(grp);
      break;
    }
  }
  if (fam.group.empty()) fam.group = {Mapping::identity(omega)};

  std::map<std::string, int> counts;
  std::map<std::string, std::vector<Mapping>> twists;
  for (const auto& c : nonempty_subsets(base)) {
    std::string key = subset_key(c);
    int count = pick(0, 3) == 0 ? pick(2, 3) : 1;
    if (n >= 4 && c.size() >= 3) count = 1;
    counts[key] = count;
    ElemSet omega_c = fiber_union(fam, c);
    std::vector<Mapping> tw;
    for (int t = 0; t < count; ++t)
      tw.push_back(pick(0, 1) ? random_permutation(omega_c, rng) : Mapping::identity(omega_c));
    twists[key] = std::move(tw);
  }
  return build_fibered_simplicial(fam, counts, twists);
}

inline std::vector<SimplicialGroupoid> fuzz_corpus(int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SimplicialGroupoid> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(random_simplicial(rng));
  return out;
}

}  // namespace fgc::fixtures
