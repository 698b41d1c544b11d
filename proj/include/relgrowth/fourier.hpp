// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Character sums over spheres, evaluated through masked transfer matrices,
// and recovery of #(W_n cap N) by exact quadrature on the torus.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "automaton.hpp"
#include "components.hpp"
#include "core.hpp"
#include "counting.hpp"

namespace relgrowth {

namespace detail {

  // Row vector e_* M^n summed, where M(u, v) = e^{2 pi i <t, f(u,v)>} on
  // edges with both endpoints allowed and 0 elsewhere.
  inline std::complex<double> masked_path_sum(EdgeWeighting const&    w,
                                              std::vector<bool> const& allowed,
                                              Vertex                  initial,
                                              std::span<double const> t,
                                              std::size_t             n) {
    std::vector<std::complex<double>> phase(w.edges().size());
    for (std::size_t e = 0; e < w.edges().size(); ++e) {
      phase[e] = character(t, w.edges()[e].weight);
    }
    std::vector<std::complex<double>> x(w.num_vertices(), 0.0), y;
    if (!allowed[initial]) {
      return 0.0;
    }
    x[initial] = 1.0;
    for (std::size_t step = 0; step < n; ++step) {
      y.assign(w.num_vertices(), 0.0);
      for (std::size_t e = 0; e < w.edges().size(); ++e) {
        auto const& edge = w.edges()[e];
        if (allowed[edge.from] && allowed[edge.to]) {
          y[edge.to] += x[edge.from] * phase[e];
        }
      }
      x.swap(y);
    }
    std::complex<double> s = 0.0;
    for (auto const& v : x) {
      s += v;
    }
    return s;
  }

}  // namespace detail

//! The character sum split by maximal component: per_component[j] is
//! <e_* C_j(t)^n, 1>, non_maximal is the same quantity for paths that never
//! enter a maximal component.  Paths meeting no maximal component are
//! counted once in every C_j, so
//!   total = sum_j per_component[j] - (m - 1) non_maximal.
struct CharacterSumParts {
  std::vector<std::complex<double>> per_component;
  std::complex<double>              non_maximal = 0.0;
  std::complex<double>              total       = 0.0;
};

inline CharacterSumParts character_sum_parts(Automaton const&         a,
                                             ComponentAnalysis const& ca,
                                             EdgeWeighting const&     w,
                                             std::span<double const>  t,
                                             std::size_t              n) {
  if (t.size() != w.rank()) {
    throw std::invalid_argument("character_sum: torus point has wrong rank");
  }
  CharacterSumParts parts;
  auto const        m = ca.num_maximal();
  std::vector<bool> in_maximal(a.num_vertices(), false);
  for (std::size_t j = 0; j < m; ++j) {
    for (auto v : ca.maximal_component(j).vertices) {
      in_maximal[v] = true;
    }
  }
  std::vector<bool> none(a.num_vertices());
  for (Vertex v = 0; v < a.num_vertices(); ++v) {
    none[v] = !in_maximal[v];
  }
  parts.non_maximal = detail::masked_path_sum(w, none, a.initial(), t, n);
  for (std::size_t j = 0; j < m; ++j) {
    auto allowed = none;
    for (auto v : ca.maximal_component(j).vertices) {
      allowed[v] = true;
    }
    parts.per_component.push_back(
        detail::masked_path_sum(w, allowed, a.initial(), t, n));
    parts.total += parts.per_component.back();
  }
  parts.total -= static_cast<double>(m - 1) * parts.non_maximal;
  return parts;
}

//! sum_{|g| = n} e^{2 pi i <t, phi(g)>} through the masked matrices C_j(t).
//! See character_sum_from_table() for the exact route.
inline std::complex<double> character_sum(Automaton const&         a,
                                          ComponentAnalysis const& ca,
                                          EdgeWeighting const&     w,
                                          std::span<double const>  t,
                                          std::size_t              n) {
  return character_sum_parts(a, ca, w, t, n).total;
}

struct FourierResult {
  BigInt      count;
  double      value    = 0.0;  // real part of the grid average
  double      imag     = 0.0;
  double      residual = 0.0;  // |value - count|
  std::size_t grid     = 0;
};

// Smallest grid M with M > 2 F n.
inline std::size_t minimal_fourier_grid(EdgeWeighting const& w,
                                        std::size_t          n) {
  return 2 * static_cast<std::size_t>(w.max_norm_bound()) * n + 1;
}

//! #(W_n cap N) as the average of the character sum over the uniform
//! M^nu grid.  The character sum is a trigonometric polynomial of degree at
//! most F n in each coordinate, so the average is exact when M > 2 F n.
inline FourierResult fourier_count(Automaton const&     a,
                                   EdgeWeighting const& w,
                                   std::size_t          n,
                                   std::size_t          M) {
  if (M < 1 || M <= 2 * static_cast<std::size_t>(w.max_norm_bound()) * n) {
    throw std::invalid_argument("fourier_count: grid M = " + std::to_string(M)
                                + " too small for n = " + std::to_string(n)
                                + "; minimal valid M is "
                                + std::to_string(minimal_fourier_grid(w, n)));
  }
  auto ca = decompose(a);
  auto nu = w.rank();

  std::size_t total = 1;
  for (std::size_t i = 0; i < nu; ++i) {
    total *= M;
  }
  std::complex<double> acc = 0.0;
  TorusPoint           t(nu);
  for (std::size_t flat = 0; flat < total; ++flat) {
    auto rem = flat;
    for (std::size_t i = nu; i-- > 0;) {
      t[i] = static_cast<double>(rem % M) / static_cast<double>(M);
      rem /= M;
    }
    acc += character_sum(a, ca, w, t, n);
  }
  acc /= static_cast<double>(total);

  FourierResult r;
  r.grid  = M;
  r.value = acc.real();
  r.imag  = acc.imag();
  double rounded = std::nearbyint(r.value);
  r.residual     = std::abs(r.value - rounded);
  r.count        = BigInt(rounded);
  return r;
}

}  // namespace relgrowth
