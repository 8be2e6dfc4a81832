#pragma once

#include "fgc/intlat.hpp"
#include "fgc/simplicial.hpp"
#include "fgc/structure.hpp"

namespace fgc::exactseq {

/// The two-sorted cover 0 -> (Z/2)^n -> (Z/4)^n -> (Z/2)^n -> 0 at finite n:
/// base sort U with its addition, sort S with its addition, and the graphs
/// of the injection and projection. Fibered over A = U via the projection.
struct Z4Cover {
  int n = 1;
  MultiSortedStructure structure;
};

namespace detail {

inline std::vector<int> unrank(int code, int base, int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = code % base;
    code /= base;
  }
  return v;
}

inline std::string vec_name(char prefix, const std::vector<int>& v) {
  std::string s(1, prefix);
  for (int x : v) s += char('0' + x);
  return s;
}

}  // namespace detail

inline Z4Cover build_z4_example(int n) {
  if (n < 1 || n > 3) throw std::invalid_argument("build_z4_example: n must be 1..3");
  Z4Cover z;
  z.n = n;
  const int un = 1 << n;        // |U| = 2^n
  const int sn = 1 << (2 * n);  // |S| = 4^n

  ElemSet u_elems, s_elems;
  for (int i = 0; i < un; ++i) u_elems.push_back(detail::vec_name('u', detail::unrank(i, 2, n)));
  for (int i = 0; i < sn; ++i) s_elems.push_back(detail::vec_name('s', detail::unrank(i, 4, n)));
  z.structure.sorts = {{"U", make_set(u_elems)}, {"S", make_set(s_elems)}};
  z.structure.base_sorts = {"U"};

  auto u_name = [&](const std::vector<int>& v) { return detail::vec_name('u', v); };
  auto s_name = [&](const std::vector<int>& v) { return detail::vec_name('s', v); };

  Relation u_add{"U_add", {"U", "U", "U"}, {}};
  for (int a = 0; a < un; ++a)
    for (int b = 0; b < un; ++b) {
      auto va = detail::unrank(a, 2, n), vb = detail::unrank(b, 2, n), vc = va;
      for (int i = 0; i < n; ++i) vc[i] = (va[i] + vb[i]) % 2;
      u_add.tuples.insert({u_name(va), u_name(vb), u_name(vc)});
    }
  Relation s_add{"S_add", {"S", "S", "S"}, {}};
  for (int a = 0; a < sn; ++a)
    for (int b = 0; b < sn; ++b) {
      auto va = detail::unrank(a, 4, n), vb = detail::unrank(b, 4, n), vc = va;
      for (int i = 0; i < n; ++i) vc[i] = (va[i] + vb[i]) % 4;
      s_add.tuples.insert({s_name(va), s_name(vb), s_name(vc)});
    }
  Relation iota{"iota", {"U", "S"}, {}};
  for (int a = 0; a < un; ++a) {
    auto v = detail::unrank(a, 2, n), w = v;
    for (int i = 0; i < n; ++i) w[i] = 2 * v[i];
    iota.tuples.insert({u_name(v), s_name(w)});
  }
  Relation pi{"pi", {"S", "U"}, {}};
  std::vector<std::pair<Elem, Elem>> fiber_pairs;
  for (int a = 0; a < sn; ++a) {
    auto v = detail::unrank(a, 4, n), w = v;
    for (int i = 0; i < n; ++i) w[i] = v[i] % 2;
    pi.tuples.insert({s_name(v), u_name(w)});
    fiber_pairs.emplace_back(s_name(v), u_name(w));
  }
  z.structure.relations = {u_add, s_add, iota, pi};
  z.structure.fiber = FiberMap{"S", make_set(u_elems), Mapping(std::move(fiber_pairs))};

  // exactness, checked by enumeration
  std::set<Elem> image_iota, kernel_pi;
  for (const auto& t : iota.tuples) image_iota.insert(t[1]);
  if (image_iota.size() != iota.tuples.size()) throw std::logic_error("z4: iota not injective");
  Elem u_zero = u_name(std::vector<int>(n, 0));
  for (const auto& t : pi.tuples)
    if (t[1] == u_zero) kernel_pi.insert(t[0]);
  if (image_iota != kernel_pi) throw std::logic_error("z4: image(iota) != kernel(pi)");
  std::set<Elem> image_pi;
  for (const auto& t : pi.tuples) image_pi.insert(t[1]);
  if (image_pi.size() != size_t(un)) throw std::logic_error("z4: pi not surjective");
  return z;
}

/// Per-fiber automorphism groups of (U, S_c) over U, for every subset c of A
/// up to size k; keys are subset keys.
inline std::map<std::string, std::vector<Mapping>> fiber_groups(const MultiSortedStructure& m, int k) {
  if (!m.fiber) throw std::invalid_argument("fiber_groups: no fiber map");
  std::map<std::string, std::vector<Mapping>> out;
  for (const auto& c : nonempty_subsets(m.fiber->base_elements)) {
    if (int(c.size()) > k) continue;
    auto sub = restrict_to_fibers(m, c);
    SearchOptions opts;
    opts.fix_sorts_pointwise = sub.base_sorts;
    std::vector<Mapping> maps;
    for (const auto& a : automorphism_group(sub, opts)) maps.push_back(a.per_sort.at(m.fiber->s_sort));
    out[subset_key(c)] = std::move(maps);
  }
  return out;
}

/// Families (σ_a) whose union over every subset of size <= k lies in the
/// corresponding fiber group: the depth-k projective limit, returned as
/// global maps on S.
inline std::vector<Mapping> depth_limit_maps(const MultiSortedStructure& m, int k) {
  auto groups = fiber_groups(m, k);
  const ElemSet& a_set = m.fiber->base_elements;
  std::vector<std::vector<Mapping>> pools;
  for (const auto& a : a_set) pools.push_back(groups.at(subset_key({a})));

  std::vector<Mapping> out;
  std::vector<size_t> pick(a_set.size(), 0);
  for (;;) {
    std::vector<Mapping> parts;
    for (size_t i = 0; i < a_set.size(); ++i) parts.push_back(pools[i][pick[i]]);
    Mapping global = disjoint_union(parts);
    bool ok = true;
    for (const auto& c : nonempty_subsets(a_set)) {
      if (c.size() < 2 || int(c.size()) > k) continue;
      ElemSet dom;
      for (const auto& a : c)
        for (const auto& [x, y] : m.fiber->map.pairs)
          if (y == a) dom.push_back(x);
      dom = make_set(std::move(dom));
      Mapping assembled = global.restrict(dom);
      const auto& pool = groups.at(subset_key(c));
      if (std::find(pool.begin(), pool.end(), assembled) == pool.end()) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(std::move(global));
    size_t i = 0;
    for (; i < pools.size(); ++i) {
      if (pick[i] + 1 < pools[i].size()) { ++pick[i]; break; }
      pick[i] = 0;
    }
    if (i == pools.size()) break;
  }
  return out;
}

struct DeterminacyReport {
  bool determined = false;       // every depth-k family is a full automorphism
  size_t family_count = 0;       // depth-k families
  size_t automorphism_count = 0; // true Aut(S/U)
  bool identities_hold = false;  // each σ is a translation family with x_{a+b} = x_a + x_b, x_0 = 0
};

/// Depth-k determinacy of the z4 cover: the depth-k limit coincides with the
/// restriction of Aut(S/U), and the translation identities from the exact
/// sequence hold for every family.
inline DeterminacyReport z4_depth_determinacy(const Z4Cover& z, int depth = 3) {
  DeterminacyReport rep;
  auto fams = depth_limit_maps(z.structure, depth);
  rep.family_count = fams.size();

  SearchOptions opts;
  opts.fix_sorts_pointwise = {"U"};
  auto auts = automorphism_group(z.structure, opts);
  rep.automorphism_count = auts.size();
  std::set<Mapping> truth;
  for (const auto& a : auts) truth.insert(a.per_sort.at("S"));
  std::set<Mapping> limit(fams.begin(), fams.end());
  rep.determined = limit == truth;

  // translation identities, via the S_add relation: σ(x) = x + t_a on fiber a,
  // t_{a+b} = t_a + t_b, t_0 = 0
  const Relation* s_add = z.structure.relation("S_add");
  const Relation* u_add = z.structure.relation("U_add");
  auto add_s = [&](const Elem& x, const Elem& y) -> Elem {
    for (const auto& t : s_add->tuples)
      if (t[0] == x && t[1] == y) return t[2];
    throw std::logic_error("S_add not total");
  };
  auto diff_s = [&](const Elem& x, const Elem& y) -> Elem {  // x - y
    for (const auto& t : s_add->tuples)
      if (t[1] == y && t[2] == x) return t[0];
    throw std::logic_error("S_add not total");
  };
  rep.identities_hold = !fams.empty();
  for (const auto& f : truth) {
    std::map<Elem, Elem> translation;  // fiber point a -> t_a (an element of S_0)
    for (const auto& [x, y] : f.pairs) {
      Elem d = diff_s(y, x);
      auto [it, fresh] = translation.emplace(z.structure.fiber->map.at(x), d);
      if (!fresh && it->second != d) rep.identities_hold = false;
    }
    for (const auto& ta : u_add->tuples) {
      Elem lhs = translation.at(ta[2]);
      Elem rhs = add_s(translation.at(ta[0]), translation.at(ta[1]));
      if (lhs != rhs) rep.identities_hold = false;
    }
  }
  return rep;
}

/// K = Z^free_rank ⊕ ⊕_i Z/torsion_i : the coefficient group of the abelian
/// toolkit.
struct AbelianGroupSpec {
  int free_rank = 0;
  std::vector<long long> torsion;

  bool operator==(const AbelianGroupSpec&) const = default;
};

struct KElem {
  lat::Vec free;
  lat::Vec tors;
  bool operator==(const KElem&) const = default;
};

inline KElem k_zero(const AbelianGroupSpec& k) {
  return {lat::Vec(k.free_rank, 0), lat::Vec(k.torsion.size(), 0)};
}

inline KElem k_normalize(const AbelianGroupSpec& k, KElem x) {
  for (size_t i = 0; i < k.torsion.size(); ++i) {
    x.tors[i] %= k.torsion[i];
    if (x.tors[i] < 0) x.tors[i] += k.torsion[i];
  }
  return x;
}

inline KElem k_scale_add(const AbelianGroupSpec& k, KElem acc, long long c, const KElem& x) {
  for (int i = 0; i < k.free_rank; ++i) acc.free[i] += c * x.free[i];
  for (size_t i = 0; i < k.torsion.size(); ++i) acc.tors[i] += c * x.tors[i];
  return k_normalize(k, std::move(acc));
}

inline bool k_is_zero(const AbelianGroupSpec& k, const KElem& x) {
  return k_normalize(k, x) == k_zero(k);
}

/// Elements of the base group C = Z^m with coefficient group K; relation
/// lattices are the integer kernels of the evaluation maps.
struct AbelianPresentation {
  int base_rank = 1;
  AbelianGroupSpec k;
};

struct RelationLattice {
  std::vector<lat::Vec> tuple;  // the elements c_1..c_n of Z^m
  lat::Mat basis;               // hermite basis of {k : Σ k_i c_i = 0}
};

inline RelationLattice relation_lattice(const std::vector<lat::Vec>& tuple) {
  return RelationLattice{tuple, lat::left_kernel(tuple)};
}

struct ExtensionCheck {
  bool extends = false;
  RelationLattice lattice;
  std::optional<lat::Vec> violated;  // kernel relation broken by f
};

/// A map on B = {b_1..b_n} extends to a group morphism <B> -> K iff it kills
/// the relation lattice of B; the extension is then Σ n_i b_i -> Σ n_i f(b_i).
inline ExtensionCheck morphism_extension_check(const AbelianPresentation& p,
                                               const std::vector<lat::Vec>& b,
                                               const std::vector<KElem>& f) {
  if (b.size() != f.size()) throw std::invalid_argument("morphism_extension_check: |B| != |f|");
  for (const auto& v : b)
    if (int(v.size()) != p.base_rank) throw std::invalid_argument("morphism_extension_check: rank mismatch");
  ExtensionCheck out;
  out.lattice = relation_lattice(b);
  out.extends = true;
  for (const auto& rel : out.lattice.basis) {
    KElem acc = k_zero(p.k);
    for (size_t i = 0; i < b.size(); ++i) acc = k_scale_add(p.k, std::move(acc), rel[i], f[i]);
    if (!k_is_zero(p.k, acc)) {
      out.extends = false;
      out.violated = rel;
      break;
    }
  }
  return out;
}

/// Evaluate the unique extension on a combination Σ n_i b_i.
inline KElem evaluate_extension(const AbelianPresentation& p, const std::vector<KElem>& f,
                                const lat::Vec& coeffs) {
  KElem acc = k_zero(p.k);
  for (size_t i = 0; i < coeffs.size(); ++i) acc = k_scale_add(p.k, std::move(acc), coeffs[i], f[i]);
  return acc;
}

struct BoundedLattice {
  RelationLattice full;
  lat::Mat bounded_basis;  // lattice generated by kernel vectors of max-norm <= N
  bool strict = false;     // bounded is a proper sublattice of the full kernel
  std::optional<lat::Vec> missing_relation;
  // fiberwise translation exponents in Q/Z killing every bounded relation but
  // not the missing one (the "generic pair" witness at lattice level)
  std::optional<std::vector<lat::Rat>> witness_translation;
};

inline BoundedLattice bounded_relation_lattice(const std::vector<lat::Vec>& tuple, long long n_bound) {
  if (n_bound < 1) throw std::invalid_argument("bounded_relation_lattice: bound must be >= 1");
  BoundedLattice out;
  out.full = relation_lattice(tuple);
  out.bounded_basis = lat::hermite_basis(lat::box_kernel(tuple, n_bound));
  out.strict = !lat::lattice_subset(out.full.basis, out.bounded_basis);
  if (out.strict) {
    for (const auto& v : out.full.basis)
      if (!lat::lattice_member(out.bounded_basis, v)) {
        out.missing_relation = v;
        out.witness_translation = lat::separating_character(out.bounded_basis, v);
        break;
      }
  }
  return out;
}

/// One level of the canonical groupoid for a tuple c̄ over K = Z/q: a single
/// object per component (the disjoint union of copies of K indexed by the
/// tuple entries), morphisms the fiberwise translations satisfying the
/// bounded relations at level N.
inline ConcreteGroupoid canonical_dcf_groupoid(const std::vector<lat::Vec>& tuple, long long q,
                                               long long level) {
  if (q < 1) throw std::invalid_argument("canonical_dcf_groupoid: K must be a finite Z/q");
  for (size_t i = 0; i < tuple.size(); ++i)
    for (size_t j = i + 1; j < tuple.size(); ++j)
      if (tuple[i] == tuple[j])
        throw std::invalid_argument("canonical_dcf_groupoid: tuple entries must be pairwise distinct");
  const size_t n = tuple.size();
  auto bounded = lat::hermite_basis(lat::box_kernel(tuple, level));

  auto entry_label = [&](size_t i) {
    std::string s = "c";
    for (long long x : tuple[i]) s += (x < 0 ? "m" + std::to_string(-x) : std::to_string(x));
    return s + "@" + std::to_string(i);
  };
  ConcreteGroupoid g;
  ElemSet label;
  for (size_t i = 0; i < n; ++i) label.push_back(entry_label(i));
  label = make_set(std::move(label));
  std::string comp = subset_key(label);
  ElemSet elems;
  for (size_t i = 0; i < n; ++i)
    for (long long v = 0; v < q; ++v) elems.push_back("t" + std::to_string(i) + ":" + std::to_string(v));
  g.add_object("O", comp, make_set(elems));
  g.component_label[comp] = label;

  // translations t with Σ k_i t_i ≡ 0 (mod q) for every bounded relation k
  lat::Vec t(n, 0);
  for (;;) {
    bool ok = true;
    for (const auto& k : bounded) {
      long long s = 0;
      for (size_t i = 0; i < n; ++i) s += k[i] * t[i];
      if (s % q != 0) { ok = false; break; }
    }
    if (ok) {
      std::vector<std::pair<Elem, Elem>> pairs;
      for (size_t i = 0; i < n; ++i)
        for (long long v = 0; v < q; ++v)
          pairs.emplace_back("t" + std::to_string(i) + ":" + std::to_string(v),
                             "t" + std::to_string(i) + ":" + std::to_string((v + t[i]) % q));
      g.add_morphism("O", "O", Mapping(std::move(pairs)));
    }
    size_t i = 0;
    for (; i < n; ++i) {
      if (t[i] + 1 < q) { ++t[i]; break; }
      t[i] = 0;
    }
    if (i == n) break;
  }
  g.finalize();
  return g;
}

/// Formal product Π_i h_i^{q_i} of coherent root symbols, one primitive
/// symbol h_i per generator; (x_{kl})^k = x_l is enforced by keeping the
/// exponents as reduced rationals.
struct RootWord {
  std::map<int, lat::Rat> expo;
  bool operator==(const RootWord&) const = default;
};

inline RootWord word_mul(const RootWord& a, const RootWord& b) {
  RootWord out = a;
  for (const auto& [i, q] : b.expo) {
    auto [it, fresh] = out.expo.emplace(i, q);
    if (!fresh) it->second = it->second + q;
    if (it->second == lat::Rat(0)) out.expo.erase(i);
  }
  return out;
}

inline RootWord word_pow(const RootWord& a, long long k) {
  RootWord out;
  for (const auto& [i, q] : a.expo)
    if (!(k * q == lat::Rat(0))) out.expo[i] = k * q;
  return out;
}

/// Symbolic sections of 1 -> K -> S -> C -> 0 on the Q-span of a finitely
/// generated subgroup: values are products of formal coherent roots of the
/// generator images.
struct SectionToolkit {
  int base_rank = 1;               // C = Z^m at lattice level
  std::vector<lat::Vec> gens;      // the Z-basis g_i of G, inside Z^m
};

/// Build the toolkit; claimed_pi are the declared projections of the given
/// section values s(g_i) and must equal the generators themselves.
inline SectionToolkit make_section_toolkit(int base_rank, std::vector<lat::Vec> gens,
                                           const std::vector<lat::Vec>& claimed_pi) {
  if (gens.size() != claimed_pi.size())
    throw std::invalid_argument("make_section_toolkit: generator/value count mismatch");
  for (size_t i = 0; i < gens.size(); ++i)
    if (gens[i] != claimed_pi[i])
      throw std::invalid_argument("make_section_toolkit: s is not a section on generator " +
                                  std::to_string(i));
  return SectionToolkit{base_rank, std::move(gens)};
}

/// s(Σ (a_i/b_i) g_i) = Π h_{i,1/b_i}^{a_i}, in reduced form.
inline RootWord section_value(const SectionToolkit& t, const std::vector<lat::Rat>& lambda) {
  if (lambda.size() != t.gens.size())
    throw std::invalid_argument("section_value: coordinate count mismatch");
  RootWord w;
  for (size_t i = 0; i < lambda.size(); ++i)
    if (!(lambda[i] == lat::Rat(0))) w.expo[int(i)] = lambda[i];
  return w;
}

/// The same value computed from explicit unreduced exponent pairs
/// h_{i,1/b}^a, combined over a common denominator the way the displayed
/// computation does, then reduced. Cross-checks well-definedness of the
/// formula: a/b = c/d must give the same word.
inline RootWord section_value_from_pairs(const SectionToolkit& t,
                                         const std::vector<std::vector<std::pair<long long, long long>>>& factors) {
  RootWord w;
  for (size_t i = 0; i < factors.size(); ++i) {
    long long num = 0, den = 1;
    for (const auto& [a, b] : factors[i]) {
      if (b <= 0) throw std::invalid_argument("section_value_from_pairs: root index must be positive");
      // h_{1/den}^num * h_{1/b}^a = h_{1/(den*b)}^(num*b + a*den)
      num = num * b + a * den;
      den = den * b;
    }
    lat::Rat q(num, den);
    if (!(q == lat::Rat(0))) w.expo[int(i)] = q;
  }
  (void)t;
  return w;
}

/// π(Π h_i^{q_i}) = Σ q_i g_i ∈ Q^m.
inline std::vector<lat::Rat> pi_image(const SectionToolkit& t, const RootWord& w) {
  std::vector<lat::Rat> out(t.base_rank, lat::Rat(0));
  for (const auto& [i, q] : w.expo)
    for (int j = 0; j < t.base_rank; ++j) out[j] = out[j] + t.gens[i][j] * q;
  return out;
}

/// Assemble the levels N_1 <= N_2 <= ... into a projective system: finer
/// levels (larger bounds, more relations) inject into coarser ones.
inline ProjectiveGroupoidSystem dcf_level_system(const std::vector<lat::Vec>& tuple, long long q,
                                                 std::vector<long long> levels) {
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  ProjectiveGroupoidSystem p;
  auto name = [](long long n) { return "N" + std::to_string(n); };
  for (long long n : levels) {
    p.indices.push_back(name(n));
    p.levels[name(n)] = share(canonical_dcf_groupoid(tuple, q, n));
  }
  for (long long a : levels)
    for (long long b : levels) p.joins[{name(a), name(b)}] = name(std::max(a, b));
  for (size_t i = 0; i < levels.size(); ++i)
    for (size_t j = i + 1; j < levels.size(); ++j) {
      // coarse level i <= fine level j: map morphisms of level j into level i
      ProjectiveGroupoidSystem::StructureMap f;
      const auto& fine = *p.levels.at(name(levels[j]));
      const auto& coarse = *p.levels.at(name(levels[i]));
      for (const auto& [o, _] : fine.objects) f.objects[o] = o;
      for (size_t mi = 0; mi < fine.morphisms.size(); ++mi) {
        int target = coarse.morphism_index(fine.morphisms[mi]);
        if (target < 0) throw std::logic_error("dcf_level_system: levels are not nested");
        f.morphisms[int(mi)] = target;
      }
      p.projections[{name(levels[i]), name(levels[j])}] = std::move(f);
    }
  return p;
}

}  // namespace fgc::exactseq
