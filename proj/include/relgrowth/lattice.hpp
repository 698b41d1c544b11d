// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Integer lattices in Hermite normal form, and the cycle-weight groups of a
// maximal component: Gamma (generated by all cycle weights), Delta (Krieger's
// group, generated by differences of equal-length cycle weights), the
// generator c of Gamma / Delta, its order D, the dual point set of Delta and
// the cohomology test for t-twisted weights.
//
// HNF convention: basis vectors are stored as rows in row-echelon form.  Each
// row's leading (pivot) entry is positive and every entry above a pivot lies
// in [0, pivot).  This is the column-style HNF of the transposed matrix; two
// lattices are equal iff their bases are identical.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "counting.hpp"

namespace relgrowth {

namespace detail {

  inline std::int64_t narrow(__int128 x) {
    if (x > INT64_MAX || x < INT64_MIN) {
      throw std::overflow_error("integer lattice arithmetic overflowed 64 bits");
    }
    return static_cast<std::int64_t>(x);
  }

  // g = gcd(a, b) >= 0 with s a + t b = g.
  inline void ext_gcd(std::int64_t  a,
                      std::int64_t  b,
                      std::int64_t& g,
                      std::int64_t& s,
                      std::int64_t& t) {
    std::int64_t old_r = a, r = b, old_s = 1, s1 = 0, old_t = 0, t1 = 1;
    while (r != 0) {
      auto q = old_r / r;
      auto tmp = old_r - q * r;
      old_r = r;
      r     = tmp;
      tmp   = old_s - q * s1;
      old_s = s1;
      s1    = tmp;
      tmp   = old_t - q * t1;
      old_t = t1;
      t1    = tmp;
    }
    if (old_r < 0) {
      old_r = -old_r;
      old_s = -old_s;
      old_t = -old_t;
    }
    g = old_r;
    s = old_s;
    t = old_t;
  }

  inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    auto q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
      --q;
    }
    return q;
  }

  // x := a x + b y
  inline Weight combine(std::int64_t a, Weight const& x, std::int64_t b,
                        Weight const& y) {
    Weight r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      r[i] = narrow(static_cast<__int128>(a) * x[i]
                    + static_cast<__int128>(b) * y[i]);
    }
    return r;
  }

}  // namespace detail

//! Hermite normal form of the lattice spanned by the given rows, zero rows
//! removed.
inline std::vector<Weight> hermite_normal_form(std::vector<Weight> rows,
                                               std::size_t         dim) {
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < dim && pivot_row < rows.size(); ++col) {
    for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
      if (rows[r][col] == 0) {
        continue;
      }
      auto a = rows[pivot_row][col];
      auto b = rows[r][col];
      if (a == 0) {
        std::swap(rows[pivot_row], rows[r]);
        continue;
      }
      std::int64_t g, s, t;
      detail::ext_gcd(a, b, g, s, t);
      auto new_p = detail::combine(s, rows[pivot_row], t, rows[r]);
      auto new_r = detail::combine(a / g, rows[r], -(b / g), rows[pivot_row]);
      rows[pivot_row] = std::move(new_p);
      rows[r]         = std::move(new_r);
    }
    auto& p = rows[pivot_row];
    if (p[col] == 0) {
      continue;
    }
    if (p[col] < 0) {
      p = -p;
    }
    for (std::size_t r = 0; r < pivot_row; ++r) {
      auto q = detail::floor_div(rows[r][col], p[col]);
      if (q != 0) {
        rows[r] = detail::combine(1, rows[r], -q, p);
      }
    }
    ++pivot_row;
  }
  rows.resize(pivot_row);
  return rows;
}

//! A subgroup of Z^dim held as an HNF basis.
class IntegerLattice {
 public:
  explicit IntegerLattice(std::size_t dim = 0) : _dim(dim) {}

  static IntegerLattice generated_by(std::size_t             dim,
                                     std::span<Weight const> generators) {
    IntegerLattice l(dim);
    for (auto const& g : generators) {
      l.add(g);
    }
    return l;
  }

  // Adds a generator; returns true if the lattice grew.
  bool add(Weight const& w) {
    if (w.size() != _dim) {
      throw std::invalid_argument("IntegerLattice::add: wrong dimension");
    }
    if (contains(w)) {
      return false;
    }
    auto rows = _basis;
    rows.push_back(w);
    _basis = hermite_normal_form(std::move(rows), _dim);
    return true;
  }

  bool contains(Weight const& v) const {
    if (v.size() != _dim) {
      return false;
    }
    Weight      w   = v;
    std::size_t col = 0;
    for (auto const& row : _basis) {
      auto pc = pivot_column(row);
      for (; col < pc; ++col) {
        if (w[col] != 0) {
          return false;
        }
      }
      if (w[pc] % row[pc] != 0) {
        return false;
      }
      w   = detail::combine(1, w, -(w[pc] / row[pc]), row);
      col = pc + 1;
    }
    return is_zero(w);
  }

  std::size_t dim() const noexcept {
    return _dim;
  }
  std::size_t rank() const noexcept {
    return _basis.size();
  }
  bool full_rank() const noexcept {
    return _basis.size() == _dim;
  }
  std::vector<Weight> const& basis() const noexcept {
    return _basis;
  }

  //! [Z^dim : L] for a full-rank lattice (product of the pivots).
  std::optional<std::int64_t> index() const {
    if (!full_rank()) {
      return std::nullopt;
    }
    __int128 d = 1;
    for (std::size_t i = 0; i < _basis.size(); ++i) {
      d *= _basis[i][i];
    }
    return detail::narrow(d);
  }

  bool operator==(IntegerLattice const& o) const {
    return _dim == o._dim && _basis == o._basis;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < _basis.size(); ++i) {
      s += (i ? ", " : "") + relgrowth::to_string(_basis[i]);
    }
    return s + "}";
  }

  static std::size_t pivot_column(Weight const& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] != 0) {
        return i;
      }
    }
    return row.size();
  }

 private:
  std::size_t         _dim;
  std::vector<Weight> _basis;
};

////////////////////////////////////////////////////////////////////////
// Cycle weights
////////////////////////////////////////////////////////////////////////

//! by_length[l] holds the weights of the closed paths of length l inside the
//! component through `base` (index 0 is unused and empty).
struct CycleWeights {
  std::vector<std::set<Weight>> by_length;
};

namespace detail {

  struct ComponentGraph {
    std::vector<Vertex>                           vertices;  // sorted
    std::vector<std::vector<std::pair<std::size_t, Weight>>> out;

    std::size_t pos(Vertex v) const {
      auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
      if (it == vertices.end() || *it != v) {
        throw std::invalid_argument("vertex not in component");
      }
      return static_cast<std::size_t>(it - vertices.begin());
    }
  };

  inline ComponentGraph component_graph(EdgeWeighting const&    w,
                                        std::span<Vertex const> component) {
    ComponentGraph g;
    g.vertices.assign(component.begin(), component.end());
    std::sort(g.vertices.begin(), g.vertices.end());
    g.out.resize(g.vertices.size());
    for (auto const& e : w.edges()) {
      if (std::binary_search(g.vertices.begin(), g.vertices.end(), e.from)
          && std::binary_search(g.vertices.begin(), g.vertices.end(), e.to)) {
        g.out[g.pos(e.from)].emplace_back(g.pos(e.to), e.weight);
      }
    }
    return g;
  }

  inline CycleWeights cycle_weights(ComponentGraph const& g,
                                    std::size_t           base,
                                    std::size_t           rank,
                                    std::size_t           max_length,
                                    std::uint64_t         budget) {
    CycleWeights                  cw;
    std::vector<std::set<Weight>> cur(g.vertices.size()), next;
    cur[base].insert(zero_weight(rank));
    cw.by_length.emplace_back();
    std::uint64_t states = 0;
    for (std::size_t l = 1; l <= max_length; ++l) {
      next.assign(g.vertices.size(), {});
      for (std::size_t u = 0; u < cur.size(); ++u) {
        for (auto const& wt : cur[u]) {
          for (auto const& [v, f] : g.out[u]) {
            if (next[v].insert(wt + f).second && ++states > budget) {
              throw BudgetExceeded("cycle-weight sets exceed the budget of "
                                   + std::to_string(budget) + " states");
            }
          }
        }
      }
      cur.swap(next);
      cw.by_length.push_back(cur[base]);
    }
    return cw;
  }

}  // namespace detail

inline constexpr std::uint64_t kDefaultCycleBudget = 20'000'000;

inline CycleWeights cycle_weight_data(EdgeWeighting const&    w,
                                      std::span<Vertex const> component,
                                      Vertex                  base,
                                      std::size_t             max_length,
                                      std::uint64_t budget = kDefaultCycleBudget) {
  auto g = detail::component_graph(w, component);
  return detail::cycle_weights(g, g.pos(base), w.rank(), max_length, budget);
}

//! Gamma and Delta of one irreducible component, read off cycles of length
//! at most max_length.  weights_by_length is the union over all base
//! vertices of the component, up to max_length + |component|.
struct CycleLattices {
  IntegerLattice                gamma;
  IntegerLattice                delta;
  std::size_t                   max_length = 0;
  std::size_t                   period     = 0;
  std::vector<std::set<Weight>> weights_by_length;
};

namespace detail {

  inline std::vector<std::set<Weight>>
  all_cycle_weights(ComponentGraph const& g,
                    std::size_t           rank,
                    std::size_t           max_length,
                    std::uint64_t         budget) {
    std::vector<std::set<Weight>> out(max_length + 1);
    for (std::size_t b = 0; b < g.vertices.size(); ++b) {
      auto cw = cycle_weights(g, b, rank, max_length, budget);
      for (std::size_t l = 1; l <= max_length; ++l) {
        out[l].insert(cw.by_length[l].begin(), cw.by_length[l].end());
      }
    }
    return out;
  }

  inline std::pair<IntegerLattice, IntegerLattice>
  lattices_up_to(std::vector<std::set<Weight>> const& by_length,
                 std::size_t                          rank,
                 std::size_t                          max_length) {
    IntegerLattice gamma(rank), delta(rank);
    for (std::size_t l = 1; l <= max_length && l < by_length.size(); ++l) {
      auto const& s = by_length[l];
      if (s.empty()) {
        continue;
      }
      for (auto const& wt : s) {
        gamma.add(wt);
        delta.add(wt - *s.begin());
      }
    }
    return {gamma, delta};
  }

}  // namespace detail

//! Computes Gamma and Delta from cycles of length <= L, starting at
//! L = 2|component| and growing L by |component| until both lattices are
//! unchanged between L and L + |component|.  Throws ValidationError if they
//! have not stabilised by L = 8 |component|.
inline CycleLattices cycle_lattices(EdgeWeighting const&    w,
                                    std::span<Vertex const> component,
                                    std::uint64_t budget = kDefaultCycleBudget) {
  auto g = detail::component_graph(w, component);
  auto const s = g.vertices.size();
  bool nontrivial = std::any_of(g.out.begin(), g.out.end(),
                                [](auto const& o) { return !o.empty(); });
  if (!nontrivial) {
    throw std::invalid_argument("cycle_lattices: trivial component has no cycles");
  }
  CycleLattices res;
  for (std::size_t L = 2 * s; L + s <= 8 * s; L += s) {
    auto by_length = detail::all_cycle_weights(g, w.rank(), L + s, budget);
    auto [g1, d1]  = detail::lattices_up_to(by_length, w.rank(), L);
    auto [g2, d2]  = detail::lattices_up_to(by_length, w.rank(), L + s);
    if (g1 == g2 && d1 == d2) {
      res.gamma      = std::move(g1);
      res.delta      = std::move(d1);
      res.max_length = L;
      std::size_t p  = 0;
      for (std::size_t l = 1; l < by_length.size(); ++l) {
        if (!by_length[l].empty()) {
          p = std::gcd(p, l);
        }
      }
      res.period            = p;
      res.weights_by_length = std::move(by_length);
      return res;
    }
  }
  throw ValidationError("Delta group did not stabilise by cycle length "
                        + std::to_string(8 * s)
                        + "; supply a larger bound manually");
}

inline IntegerLattice delta_group(EdgeWeighting const&    w,
                                  std::span<Vertex const> component,
                                  std::uint64_t budget = kDefaultCycleBudget) {
  return cycle_lattices(w, component, budget).delta;
}

//! Gamma_j, Delta_j, the generator c_j of Gamma_j / Delta_j and its order
//! D_j (empty when no k <= [Z^nu : Delta_j] has k c_j in Delta_j, which can
//! only happen for rank-deficient Delta_j).
struct GroupIndices {
  IntegerLattice              gamma;
  IntegerLattice              delta;
  Weight                      c;
  std::optional<std::int64_t> order;
  std::size_t                 period     = 0;
  std::size_t                 max_length = 0;
  // Lengths of the cycle pair defining c: (shorter, shorter + period).
  std::size_t c_length = 0;
};

//! c = (lexicographically smallest weight at length l + p) - (smallest
//! weight at length l) for the shortest l admitting cycles of both lengths.
inline std::optional<std::pair<Weight, std::size_t>>
cycle_pair_generator(CycleLattices const& cl, bool largest = false) {
  auto const& s = cl.weights_by_length;
  auto const  p = cl.period;
  if (largest) {
    for (std::size_t l = s.size(); l-- > 1;) {
      if (l + p < s.size() && !s[l].empty() && !s[l + p].empty()) {
        return std::pair(*s[l + p].rbegin() - *s[l].rbegin(), l);
      }
    }
    return std::nullopt;
  }
  for (std::size_t l = 1; l + p < s.size(); ++l) {
    if (!s[l].empty() && !s[l + p].empty()) {
      return std::pair(*s[l + p].begin() - *s[l].begin(), l);
    }
  }
  return std::nullopt;
}

inline GroupIndices group_indices(CycleLattices const& cl) {
  auto const nu = cl.gamma.dim();
  if (cl.gamma.rank() < nu) {
    throw ValidationError(
        "cycle-weight group Gamma has rank " + std::to_string(cl.gamma.rank())
        + " < nu = " + std::to_string(nu)
        + ": some nonzero <t, f> is cohomologous to a constant, which cannot "
          "happen for a Z^nu quotient of a hyperbolic group");
  }
  GroupIndices gi;
  gi.gamma      = cl.gamma;
  gi.delta      = cl.delta;
  gi.period     = cl.period;
  gi.max_length = cl.max_length;
  auto pair     = cycle_pair_generator(cl);
  if (!pair) {
    throw ValidationError("no pair of cycles with length difference equal to "
                          "the period was found");
  }
  gi.c        = pair->first;
  gi.c_length = pair->second;
  if (auto bound = cl.delta.index()) {
    for (std::int64_t k = 1; k <= *bound; ++k) {
      if (cl.delta.contains(k * gi.c)) {
        gi.order = k;
        break;
      }
    }
  }
  return gi;
}

inline GroupIndices group_indices(EdgeWeighting const&    w,
                                  std::span<Vertex const> component,
                                  std::uint64_t budget = kDefaultCycleBudget) {
  return group_indices(cycle_lattices(w, component, budget));
}

//! Common periods for the phases e^{2 pi i n (r / D_j + k / p_j)}:
//! lcm = lcm_j lcm(p_j, D_j) and product = prod_j p_j D_j.
struct GlobalPeriod {
  std::int64_t lcm     = 1;
  std::int64_t product = 1;
};

inline GlobalPeriod global_period(std::span<GroupIndices const> indices) {
  GlobalPeriod gp;
  for (auto const& gi : indices) {
    if (!gi.order) {
      throw ValidationError("global period undefined: some D_j is infinite");
    }
    auto p  = static_cast<std::int64_t>(gi.period);
    auto dj = *gi.order;
    gp.lcm     = std::lcm(gp.lcm, std::lcm(p, dj));
    gp.product = detail::narrow(static_cast<__int128>(gp.product) * p * dj);
  }
  return gp;
}

//! Points t of Q^nu / Z^nu with <t, delta> in Z for every delta in the
//! lattice, each coordinate in [0, 1), sorted lexicographically.  There are
//! exactly [Z^nu : lattice] of them.
inline std::vector<RationalPoint> dual_points(IntegerLattice const& delta) {
  if (!delta.full_rank()) {
    throw ValidationError("rank-deficient Delta (rank "
                          + std::to_string(delta.rank()) + " < "
                          + std::to_string(delta.dim())
                          + ") has infinitely many dual points");
  }
  auto const&                B  = delta.basis();
  auto const                 nu = delta.dim();
  std::vector<RationalPoint> out;
  RationalPoint              t(nu, Fraction(0));
  // Row i has pivot in column i: B[i][i] t_i + sum_{j > i} B[i][j] t_j in Z.
  auto solve = [&](auto&& self, std::size_t i) -> void {
    Fraction rest(0);
    for (std::size_t j = i + 1; j < nu; ++j) {
      rest += B[i][j] * t[j];
    }
    for (std::int64_t k = 0; k < B[i][i]; ++k) {
      t[i] = mod_one((Fraction(k) - rest) / B[i][i]);
      if (i == 0) {
        out.push_back(t);
      } else {
        self(self, i - 1);
      }
    }
  };
  solve(solve, nu - 1);
  std::sort(out.begin(), out.end());
  return out;
}

inline Fraction pairing(RationalPoint const& t, Weight const& w) {
  Fraction s(0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    s += t[i] * w[i];
  }
  return s;
}

struct CohomologyResult {
  bool                    cohomologous = false;
  std::optional<Fraction> constant;  // in [0, 1)
};

//! <t, f> restricted to the component is cohomologous to a constant (mod 1)
//! iff <t, delta> is an integer for every delta in Delta.  The constant is
//! reported as <t, w(g0)> / l(g0) mod 1 for the shortest cycle g0 with the
//! lexicographically smallest weight.
inline CohomologyResult cohomology_test(RationalPoint const& t,
                                        CycleLattices const& cl) {
  if (t.size() != cl.delta.dim()) {
    throw std::invalid_argument("cohomology_test: torus point has wrong rank");
  }
  CohomologyResult r;
  for (auto const& d : cl.delta.basis()) {
    if (pairing(t, d).denominator() != 1) {
      return r;
    }
  }
  r.cohomologous = true;
  for (std::size_t l = 1; l < cl.weights_by_length.size(); ++l) {
    if (!cl.weights_by_length[l].empty()) {
      auto const& w0 = *cl.weights_by_length[l].begin();
      r.constant     = mod_one(pairing(t, w0) / static_cast<std::int64_t>(l));
      break;
    }
  }
  return r;
}

inline CohomologyResult cohomology_test(RationalPoint const&    t,
                                        EdgeWeighting const&    w,
                                        std::span<Vertex const> component) {
  return cohomology_test(t, cycle_lattices(w, component));
}

}  // namespace relgrowth
