#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgc {

using Elem = std::string;
using ElemSet = std::vector<Elem>;  // kept sorted, no duplicates

inline ElemSet make_set(std::vector<Elem> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return elems;
}

inline bool set_contains(const ElemSet& s, const Elem& x) {
  return std::binary_search(s.begin(), s.end(), x);
}

inline ElemSet set_union(const ElemSet& a, const ElemSet& b) {
  ElemSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool is_subset(const ElemSet& a, const ElemSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// A finite function, stored as a sorted (domain-key) list of pairs.
/// Total on its recorded domain; composition and inverse are exact and
/// throw on domain mismatches rather than silently truncating.
struct Mapping {
  std::vector<std::pair<Elem, Elem>> pairs;  // sorted by first, unique keys

  Mapping() = default;
  explicit Mapping(std::vector<std::pair<Elem, Elem>> p) : pairs(std::move(p)) {
    std::sort(pairs.begin(), pairs.end());
    for (size_t i = 1; i < pairs.size(); ++i)
      if (pairs[i].first == pairs[i - 1].first)
        throw std::invalid_argument("Mapping: duplicate key " + pairs[i].first);
  }

  static Mapping identity(const ElemSet& dom) {
    Mapping m;
    m.pairs.reserve(dom.size());
    for (const auto& x : dom) m.pairs.emplace_back(x, x);
    return m;
  }

  size_t size() const { return pairs.size(); }

  bool defined_on(const Elem& x) const {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), x,
                               [](const auto& p, const Elem& k) { return p.first < k; });
    return it != pairs.end() && it->first == x;
  }

  const Elem& at(const Elem& x) const {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), x,
                               [](const auto& p, const Elem& k) { return p.first < k; });
    if (it == pairs.end() || it->first != x)
      throw std::out_of_range("Mapping: undefined on " + x);
    return it->second;
  }

  ElemSet domain() const {
    ElemSet d;
    d.reserve(pairs.size());
    for (const auto& [k, v] : pairs) d.push_back(k);
    return d;
  }

  ElemSet image() const {
    ElemSet im;
    im.reserve(pairs.size());
    for (const auto& [k, v] : pairs) im.push_back(v);
    return make_set(std::move(im));
  }

  bool injective() const { return image().size() == pairs.size(); }

  /// Bijective onto the given codomain.
  bool bijection_onto(const ElemSet& codomain) const {
    return injective() && image() == codomain;
  }

  Mapping inverse() const {
    Mapping inv;
    inv.pairs.reserve(pairs.size());
    for (const auto& [k, v] : pairs) inv.pairs.emplace_back(v, k);
    std::sort(inv.pairs.begin(), inv.pairs.end());
    for (size_t i = 1; i < inv.pairs.size(); ++i)
      if (inv.pairs[i].first == inv.pairs[i - 1].first)
        throw std::invalid_argument("Mapping::inverse: not injective");
    return inv;
  }

  /// Restriction to a sub-domain (must be contained in the domain).
  Mapping restrict(const ElemSet& sub) const {
    Mapping r;
    for (const auto& x : sub) r.pairs.emplace_back(x, at(x));
    return r;
  }

  auto operator<=>(const Mapping&) const = default;
};

/// outer ∘ inner; domains must match exactly (image of inner inside domain of outer).
inline Mapping compose(const Mapping& outer, const Mapping& inner) {
  Mapping c;
  c.pairs.reserve(inner.pairs.size());
  for (const auto& [k, v] : inner.pairs) c.pairs.emplace_back(k, outer.at(v));
  return c;
}

/// Union of mappings with pairwise disjoint domains.
inline Mapping disjoint_union(const std::vector<Mapping>& parts) {
  std::vector<std::pair<Elem, Elem>> all;
  for (const auto& m : parts) all.insert(all.end(), m.pairs.begin(), m.pairs.end());
  return Mapping(std::move(all));
}

inline std::string subset_key(const ElemSet& s) {
  std::string k;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) k += ',';
    k += s[i];
  }
  return k;
}

inline ElemSet parse_subset_key(const std::string& key) {
  ElemSet s;
  std::string cur;
  for (char ch : key) {
    if (ch == ',') { s.push_back(cur); cur.clear(); }
    else cur += ch;
  }
  if (!cur.empty()) s.push_back(cur);
  return make_set(std::move(s));
}

/// All nonempty subsets of pts, sorted by (size, lexicographic).
inline std::vector<ElemSet> nonempty_subsets(const ElemSet& pts) {
  std::vector<ElemSet> out;
  const size_t n = pts.size();
  for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
    ElemSet s;
    for (size_t i = 0; i < n; ++i)
      if (mask & (size_t(1) << i)) s.push_back(pts[i]);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const ElemSet& a, const ElemSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

/// Set partitions of s into at least two nonempty parts.
inline std::vector<std::vector<ElemSet>> proper_partitions(const ElemSet& s) {
  std::vector<std::vector<ElemSet>> out;
  std::vector<int> part(s.size(), 0);
  std::function<void(size_t, int)> rec = [&](size_t i, int used) {
    if (i == s.size()) {
      if (used < 2) return;
      std::vector<ElemSet> parts(used);
      for (size_t j = 0; j < s.size(); ++j) parts[part[j]].push_back(s[j]);
      out.push_back(std::move(parts));
      return;
    }
    for (int p = 0; p <= used; ++p) {
      part[i] = p;
      rec(i + 1, std::max(used, p + 1));
    }
  };
  if (!s.empty()) rec(1, 1);  // element 0 always in part 0
  return out;
}

}  // namespace fgc
