// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// End-to-end structure analysis of one automaton with edge weights:
// components, periods, cycle-weight lattices, the global period and the
// comparison between the dual point set of Delta_j and the torus points
// where C_j(t) attains spectral radius lambda.

#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "automaton.hpp"
#include "components.hpp"
#include "counting.hpp"
#include "lattice.hpp"
#include "spectral.hpp"

namespace relgrowth {

struct StructureOptions {
  bool          scan            = true;
  std::size_t   min_grid        = 16;
  double        level_tolerance = 1e-6;
  double        exclusion       = 0.1;
  std::uint64_t cycle_budget    = kDefaultCycleBudget;
};

struct MaximalComponentReport {
  std::size_t                component = 0;  // index into components()
  std::size_t                period    = 0;
  CycleLattices              lattices;
  GroupIndices               indices;
  std::vector<RationalPoint> dual;
  std::optional<SpectralScan> scan;
  bool                       scan_matches_dual = false;
};

struct StructureReport {
  ComponentAnalysis                   components;
  std::vector<MaximalComponentReport> maximal;
  GlobalPeriod                        period;

  bool cross_check_pass() const {
    for (auto const& m : maximal) {
      if (!m.scan || !m.scan_matches_dual) {
        return false;
      }
    }
    return true;
  }
};

//! Smallest multiple of every denominator in `points` that is >= min_grid.
inline std::size_t grid_containing(std::vector<RationalPoint> const& points,
                                   std::size_t                       min_grid) {
  std::int64_t l = 1;
  for (auto const& p : points) {
    for (auto const& q : p) {
      l = std::lcm(l, q.denominator());
    }
  }
  auto g = static_cast<std::size_t>(l);
  return ((std::max<std::size_t>(min_grid, 1) + g - 1) / g) * g;
}

//! True iff the scan's near-maximal grid indices are exactly the dual points
//! (each of which must lie on the grid).
inline bool near_maximal_matches(SpectralScan const&               scan,
                                 std::vector<RationalPoint> const& dual) {
  std::vector<std::vector<std::size_t>> expected;
  auto const M = static_cast<std::int64_t>(scan.grid);
  for (auto const& p : dual) {
    std::vector<std::size_t> k;
    for (auto const& q : p) {
      auto x = q * M;
      if (x.denominator() != 1) {
        return false;
      }
      k.push_back(static_cast<std::size_t>(x.numerator()));
    }
    expected.push_back(std::move(k));
  }
  std::sort(expected.begin(), expected.end());
  auto got = scan.near_maximal;
  std::sort(got.begin(), got.end());
  return got == expected;
}

inline StructureReport analyze_structure(Automaton const&        a,
                                         EdgeWeighting const&    w,
                                         StructureOptions const& opts = {}) {
  StructureReport r{decompose(a), {}, {}};
  std::vector<GroupIndices> all;
  for (std::size_t j = 0; j < r.components.num_maximal(); ++j) {
    auto const&            comp = r.components.maximal_component(j);
    MaximalComponentReport m;
    m.component = r.components.maximal()[j];
    m.period    = comp.cyclic->period;
    m.lattices  = cycle_lattices(w, comp.vertices, opts.cycle_budget);
    if (m.lattices.period != m.period) {
      throw std::logic_error("period from cycle lengths disagrees with BFS period");
    }
    m.indices = group_indices(m.lattices);
    all.push_back(m.indices);
    if (m.lattices.delta.full_rank()) {
      m.dual = dual_points(m.lattices.delta);
    }
    if (opts.scan && !m.dual.empty()) {
      ScanOptions so;
      so.level_tolerance = opts.level_tolerance;
      so.exclusion       = opts.exclusion;
      for (auto const& p : m.dual) {
        so.special_points.push_back(to_torus(p));
      }
      auto cj  = build_cj(a, r.components, j);
      auto M   = grid_containing(m.dual, opts.min_grid);
      m.scan   = torus_scan(cj, w, M, so);
      m.scan_matches_dual = near_maximal_matches(*m.scan, m.dual);
    }
    r.maximal.push_back(std::move(m));
  }
  r.period = global_period(all);
  return r;
}

}  // namespace relgrowth
