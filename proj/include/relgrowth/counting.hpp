// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Exact weighted path counting.  N(n, w) is the number of length-n paths
// from '*' whose edge weights sum to w; by the strong Markov bijection it
// equals the number of group elements of word length n with phi(g) = w.

#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "automaton.hpp"
#include "core.hpp"

namespace relgrowth {

//! Edge weights f(u, v) = phi(label(u, v)) in Z^nu.
class EdgeWeighting {
 public:
  struct WeightedEdge {
    Vertex from;
    Vertex to;
    Weight weight;
  };

  //! Uses the automaton's "hom:" data.  Throws ValidationError if a
  //! generator has no image ("homomorphism incomplete") or if
  //! phi(s^-1) != -phi(s) for some generator s.
  static EdgeWeighting from_homomorphism(Automaton const& a) {
    std::vector<Weight> images;
    for (std::size_t g = 0; g < a.num_generators(); ++g) {
      auto const& h = a.homomorphism()[g];
      if (!h) {
        throw ValidationError("homomorphism incomplete: no image for generator '"
                              + a.generators()[g].name + "'");
      }
      images.push_back(*h);
    }
    return EdgeWeighting(a, images);
  }

  //! generator_images[g] is phi of the g-th generator of a.
  EdgeWeighting(Automaton const& a, std::span<Weight const> generator_images)
      : _num_vertices(a.num_vertices()) {
    if (generator_images.size() != a.num_generators()) {
      throw ValidationError("homomorphism incomplete: expected "
                            + std::to_string(a.num_generators())
                            + " generator images");
    }
    if (generator_images.empty()) {
      throw ValidationError("homomorphism incomplete: no generators");
    }
    _rank = generator_images.front().size();
    if (_rank == 0) {
      throw ValidationError("homomorphism must have rank nu >= 1");
    }
    for (std::size_t g = 0; g < generator_images.size(); ++g) {
      if (generator_images[g].size() != _rank) {
        throw ValidationError("homomorphism images disagree on the rank nu");
      }
      auto const& inv = generator_images[a.inverse_of(g)];
      if (generator_images[g] + inv != zero_weight(_rank)) {
        throw ValidationError("homomorphism not compatible with inverses: phi("
                              + a.generators()[g].name + ") = "
                              + to_string(generator_images[g]) + " but phi("
                              + a.generators()[g].inverse
                              + ") = " + to_string(inv));
      }
    }
    for (auto const& e : a.edges()) {
      _edges.push_back({e.from, e.to, generator_images[e.label]});
      _max_norm = std::max(_max_norm, max_norm(_edges.back().weight));
    }
    _out.assign(_num_vertices, {});
    for (std::size_t e = 0; e < _edges.size(); ++e) {
      _out[_edges[e].from].push_back(e);
    }
  }

  std::size_t rank() const noexcept {
    return _rank;
  }
  std::size_t num_vertices() const noexcept {
    return _num_vertices;
  }
  std::vector<WeightedEdge> const& edges() const noexcept {
    return _edges;
  }
  std::vector<std::size_t> const& out_edges(Vertex v) const {
    return _out.at(v);
  }
  // F: the largest |f(e)|_inf over all edges.
  std::int64_t max_norm_bound() const noexcept {
    return _max_norm;
  }

 private:
  std::size_t                           _rank         = 0;
  std::size_t                           _num_vertices = 0;
  std::vector<WeightedEdge>             _edges;
  std::vector<std::vector<std::size_t>> _out;
  std::int64_t                          _max_norm = 0;
};

struct CountOptions {
  std::size_t   max_rank          = 4;
  std::uint64_t max_table_entries = 100'000'000;
};

//! Exact counts N(n, w) for 0 <= n <= n_max together with the totals
//! T(n) = sum_w N(n, w) = #W_n.
class CountTable {
 public:
  using Layer = std::map<Weight, BigInt>;

  std::size_t n_max() const noexcept {
    return _layers.size() - 1;
  }
  std::size_t rank() const noexcept {
    return _rank;
  }

  Layer const& layer(std::size_t n) const {
    return _layers.at(n);
  }

  BigInt const& total(std::size_t n) const {
    return _totals.at(n);
  }

  BigInt count(std::size_t n, Weight const& w) const {
    auto const& l  = _layers.at(n);
    auto        it = l.find(w);
    return it == l.end() ? BigInt(0) : it->second;
  }

  BigInt zero_count(std::size_t n) const {
    return count(n, zero_weight(_rank));
  }

 private:
  friend CountTable count_by_weight(Automaton const&,
                                    EdgeWeighting const&,
                                    std::size_t,
                                    CountOptions const&);

  std::size_t         _rank = 0;
  std::vector<Layer>  _layers;
  std::vector<BigInt> _totals;
};

//! Worst-case table size (2 F n + 1)^nu |V| used for the memory budget.
inline long double estimated_table_entries(EdgeWeighting const& w,
                                           std::size_t          n) {
  long double side = 2.0L * static_cast<long double>(w.max_norm_bound())
                         * static_cast<long double>(n)
                     + 1.0L;
  return std::pow(side, static_cast<long double>(w.rank()))
         * static_cast<long double>(w.num_vertices());
}

//! Largest n_max whose estimated table fits in the budget.
inline std::size_t max_affordable_length(EdgeWeighting const& w,
                                         CountOptions const&  opts = {}) {
  std::size_t n = 0;
  while (n < (1U << 20)
         && estimated_table_entries(w, n + 1)
                <= static_cast<long double>(opts.max_table_entries)) {
    ++n;
  }
  return n;
}

//! Forward dynamic programme on (vertex, weight) states.  Only weights that
//! are reachable at step n are materialised.  Throws BudgetExceeded when the
//! estimated table size or the rank exceeds the configured caps.
inline CountTable count_by_weight(Automaton const&     a,
                                  EdgeWeighting const& w,
                                  std::size_t          n_max,
                                  CountOptions const&  opts = {}) {
  if (w.num_vertices() != a.num_vertices()) {
    throw std::invalid_argument("count_by_weight: weighting built for a "
                                "different automaton");
  }
  if (w.rank() > opts.max_rank) {
    throw BudgetExceeded("rank nu = " + std::to_string(w.rank())
                         + " exceeds the cap " + std::to_string(opts.max_rank));
  }
  if (estimated_table_entries(w, n_max)
      > static_cast<long double>(opts.max_table_entries)) {
    throw BudgetExceeded(
        "estimated weight table for n_max = " + std::to_string(n_max)
        + " exceeds the cap of " + std::to_string(opts.max_table_entries)
        + " entries; largest affordable n_max is "
        + std::to_string(max_affordable_length(w, opts)));
  }

  std::size_t const nv = a.num_vertices();
  using Frontier = std::unordered_map<Weight, std::vector<BigInt>, WeightHash>;

  CountTable t;
  t._rank = w.rank();
  t._layers.reserve(n_max + 1);

  Frontier cur;
  cur[zero_weight(w.rank())].assign(nv, BigInt(0));
  cur[zero_weight(w.rank())][a.initial()] = 1;

  auto record = [&](Frontier const& f) {
    CountTable::Layer layer;
    BigInt            total = 0;
    for (auto const& [wt, per_vertex] : f) {
      BigInt s = 0;
      for (auto const& c : per_vertex) {
        s += c;
      }
      if (s != 0) {
        total += s;
        layer.emplace(wt, std::move(s));
      }
    }
    t._layers.push_back(std::move(layer));
    t._totals.push_back(std::move(total));
  };
  record(cur);

  for (std::size_t n = 1; n <= n_max; ++n) {
    Frontier next;
    next.reserve(cur.size() * 2);
    for (auto const& [wt, per_vertex] : cur) {
      for (Vertex u = 0; u < nv; ++u) {
        if (per_vertex[u] == 0) {
          continue;
        }
        for (auto e : w.out_edges(u)) {
          auto const& edge = w.edges()[e];
          auto&       slot = next[wt + edge.weight];
          if (slot.empty()) {
            slot.assign(nv, BigInt(0));
          }
          slot[edge.to] += per_vertex[u];
        }
      }
    }
    cur = std::move(next);
    record(cur);
  }
  return t;
}

//! T(n) = number of paths of length n from '*', without weights.
inline std::vector<BigInt> sphere_sizes(Automaton const& a, std::size_t n_max) {
  std::vector<BigInt> at(a.num_vertices(), BigInt(0)), next;
  at[a.initial()] = 1;
  std::vector<BigInt> out{BigInt(1)};
  for (std::size_t n = 1; n <= n_max; ++n) {
    next.assign(a.num_vertices(), BigInt(0));
    for (auto const& e : a.edges()) {
      next[e.to] += at[e.from];
    }
    at.swap(next);
    BigInt s = 0;
    for (auto const& c : at) {
      s += c;
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct GrowthSequences {
  std::vector<BigInt> relative;  // N(n, target), target 0 by default
  std::vector<BigInt> totals;    // T(n) = #W_n
};

//! n -> #(W_n cap phi^{-1}(target)) and n -> #W_n.
inline GrowthSequences relative_growth(CountTable const& t,
                                       Weight const&     target) {
  if (target.size() != t.rank()) {
    throw std::invalid_argument("relative_growth: target has wrong rank");
  }
  GrowthSequences g;
  for (std::size_t n = 0; n <= t.n_max(); ++n) {
    g.relative.push_back(t.count(n, target));
    g.totals.push_back(t.total(n));
  }
  return g;
}

inline GrowthSequences relative_growth(CountTable const& t) {
  return relative_growth(t, zero_weight(t.rank()));
}

//! sum_{|g| = n} e^{2 pi i <t, phi(g)>} evaluated from the exact table.
inline std::complex<double> character_sum_from_table(CountTable const& table,
                                                     std::span<double const> t,
                                                     std::size_t n) {
  std::complex<double> s = 0.0;
  for (auto const& [wt, c] : table.layer(n)) {
    s += c.convert_to<double>() * character(t, wt);
  }
  return s;
}

}  // namespace relgrowth
