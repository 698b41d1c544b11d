// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Strongly connected components of the transition graph, maximal
// components, cyclic periods and the masked matrices C_j.

#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "automaton.hpp"
#include "core.hpp"

namespace relgrowth {

// Relative tolerance for classifying a component as maximal.
inline constexpr double kMaximalRelTol = 1e-9;

//! Strongly connected components listed so that every edge between distinct
//! components goes from a later component to an earlier one.  Reordering
//! vertices by this list makes the transition matrix block lower-triangular.
inline std::vector<std::vector<Vertex>>
strongly_connected_components(Automaton const& a) {
  // Iterative Tarjan; components come out sinks first.
  std::size_t const                n = a.num_vertices();
  constexpr std::size_t            kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t>         index(n, kNone), low(n, 0);
  std::vector<bool>                on_stack(n, false);
  std::vector<Vertex>              stack;
  std::vector<std::vector<Vertex>> out;
  std::size_t                      counter = 0;

  struct Frame {
    Vertex      v;
    std::size_t next;
  };
  for (Vertex root = 0; root < n; ++root) {
    if (index[root] != kNone) {
      continue;
    }
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f    = call.back();
      auto& outs = a.out_edges(f.v);
      if (f.next < outs.size()) {
        Vertex w = a.edges()[outs[f.next++]].to;
        if (index[w] == kNone) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      Vertex v = f.v;
      call.pop_back();
      if (!call.empty()) {
        low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
      if (low[v] == index[v]) {
        std::vector<Vertex> comp;
        Vertex              w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

// Transition matrix restricted to the given vertices (in the given order).
inline Eigen::MatrixXd submatrix(Eigen::MatrixXd const&     A,
                                 std::span<Vertex const> vertices) {
  auto const      k = vertices.size();
  Eigen::MatrixXd S(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      S(i, j) = A(vertices[i], vertices[j]);
    }
  }
  return S;
}

inline double real_spectral_radius(Eigen::MatrixXd const& M) {
  if (M.size() == 0) {
    return 0.0;
  }
  if (M.rows() == 1) {
    return std::abs(M(0, 0));
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigensolver did not converge on a component block");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

//! The cyclic structure of an irreducible component: its period p and, for
//! each vertex of the component, the class k in [0, p) such that every edge
//! inside the component goes from class k to class k + 1 mod p.
struct CyclicStructure {
  std::size_t              period = 0;
  std::vector<Vertex>      vertices;  // sorted
  std::vector<std::size_t> vertex_class;  // aligned with vertices

  std::size_t class_of(Vertex v) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    return vertex_class.at(static_cast<std::size_t>(it - vertices.begin()));
  }
};

//! Period of a strongly connected component: the gcd, over edges (u, v)
//! inside the component, of depth(u) + 1 - depth(v) where depth is the BFS
//! distance from the smallest vertex.  Throws std::invalid_argument for a
//! trivial component (one vertex, no self-loop), whose period is undefined.
inline CyclicStructure cyclic_period(Automaton const&        a,
                                     std::span<Vertex const> component) {
  if (component.empty()) {
    throw std::invalid_argument("cyclic_period: empty component");
  }
  std::vector<Vertex> verts(component.begin(), component.end());
  std::sort(verts.begin(), verts.end());
  auto inside = [&](Vertex v) {
    return std::binary_search(verts.begin(), verts.end(), v);
  };
  auto pos = [&](Vertex v) {
    return static_cast<std::size_t>(
        std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
  };

  constexpr std::int64_t    kUnseen = -1;
  std::vector<std::int64_t> depth(verts.size(), kUnseen);
  std::deque<Vertex>        queue{verts.front()};
  depth[0] = 0;
  std::int64_t g = 0;
  bool         any_edge = false;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (auto e : a.out_edges(u)) {
      Vertex v = a.edges()[e].to;
      if (!inside(v)) {
        continue;
      }
      any_edge = true;
      if (depth[pos(v)] == kUnseen) {
        depth[pos(v)] = depth[pos(u)] + 1;
        queue.push_back(v);
      } else {
        g = std::gcd(g, depth[pos(u)] + 1 - depth[pos(v)]);
      }
    }
  }
  if (!any_edge) {
    throw std::invalid_argument("cyclic_period: trivial component {"
                                + a.vertex_name(verts.front())
                                + "} has undefined period");
  }
  if (std::any_of(depth.begin(), depth.end(),
                  [](auto d) { return d == kUnseen; })) {
    throw std::invalid_argument(
        "cyclic_period: vertices are not strongly connected");
  }
  CyclicStructure cs;
  cs.period   = static_cast<std::size_t>(g < 0 ? -g : g);
  cs.vertices = verts;
  for (auto d : depth) {
    cs.vertex_class.push_back(static_cast<std::size_t>(d) % cs.period);
  }
  return cs;
}

////////////////////////////////////////////////////////////////////////
// Validation
////////////////////////////////////////////////////////////////////////

struct ValidationIssue {
  enum class Kind {
    edge_into_initial,
    unreachable_vertex,
    connected_maximal_components,
    no_cycles
  };
  Kind                     kind;
  std::string              message;
  std::vector<std::string> witness;  // offending edge or path, vertex names
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool valid() const noexcept {
    return issues.empty();
  }

  std::string to_string() const {
    if (issues.empty()) {
      return "valid\n";
    }
    std::string s;
    for (auto const& i : issues) {
      s += "invalid: " + i.message;
      if (!i.witness.empty()) {
        s += " [witness:";
        for (auto const& w : i.witness) {
          s += " " + w;
        }
        s += "]";
      }
      s += "\n";
    }
    return s;
  }
};

namespace detail {

  struct RawComponents {
    std::vector<std::vector<Vertex>> components;
    std::vector<double>              radii;
    double                           lambda = 0.0;
    std::vector<bool>                maximal;
  };

  inline RawComponents raw_components(Automaton const& a) {
    RawComponents rc;
    rc.components = strongly_connected_components(a);
    auto A        = a.transition_matrix();
    for (auto const& c : rc.components) {
      rc.radii.push_back(real_spectral_radius(submatrix(A, c)));
      rc.lambda = std::max(rc.lambda, rc.radii.back());
    }
    for (auto r : rc.radii) {
      rc.maximal.push_back(rc.lambda > 0.0
                           && std::abs(r - rc.lambda)
                                  <= kMaximalRelTol * rc.lambda);
    }
    return rc;
  }

}  // namespace detail

//! Checks (i) no edge ends at the initial vertex, (ii) every vertex is
//! reachable from it, (iii) no directed path joins two distinct maximal
//! components.  Each violation carries a witness.
inline ValidationReport validate(Automaton const& a) {
  ValidationReport r;
  auto const       star = a.initial();
  for (auto const& e : a.edges()) {
    if (e.to == star) {
      r.issues.push_back({ValidationIssue::Kind::edge_into_initial,
                          "edge ends at the initial vertex",
                          {a.vertex_name(e.from), a.vertex_name(e.to)}});
    }
  }

  std::vector<bool>  seen(a.num_vertices(), false);
  std::deque<Vertex> queue{star};
  seen[star] = true;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto e : a.out_edges(u)) {
      auto v = a.edges()[e].to;
      if (!seen[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
    }
  }
  for (Vertex v = 0; v < a.num_vertices(); ++v) {
    if (!seen[v]) {
      r.issues.push_back({ValidationIssue::Kind::unreachable_vertex,
                          "vertex not reachable from '*': " + a.vertex_name(v),
                          {a.vertex_name(v)}});
    }
  }

  auto rc = detail::raw_components(a);
  if (rc.lambda == 0.0) {
    r.issues.push_back({ValidationIssue::Kind::no_cycles,
                        "automaton has no cycles (finitely many paths)",
                        {}});
    return r;
  }
  std::vector<std::size_t> comp_of(a.num_vertices());
  for (std::size_t c = 0; c < rc.components.size(); ++c) {
    for (auto v : rc.components[c]) {
      comp_of[v] = c;
    }
  }
  // BFS from each maximal component, recording parents for the witness.
  for (std::size_t c = 0; c < rc.components.size(); ++c) {
    if (!rc.maximal[c]) {
      continue;
    }
    constexpr Vertex    kNone = static_cast<Vertex>(-1);
    std::vector<Vertex> parent(a.num_vertices(), kNone);
    std::vector<bool>   vis(a.num_vertices(), false);
    std::deque<Vertex>  q;
    for (auto v : rc.components[c]) {
      vis[v] = true;
      q.push_back(v);
    }
    std::optional<Vertex> hit;
    while (!q.empty() && !hit) {
      auto u = q.front();
      q.pop_front();
      for (auto e : a.out_edges(u)) {
        auto v = a.edges()[e].to;
        if (vis[v]) {
          continue;
        }
        vis[v]    = true;
        parent[v] = u;
        if (rc.maximal[comp_of[v]] && comp_of[v] != c) {
          hit = v;
          break;
        }
        q.push_back(v);
      }
    }
    if (hit) {
      std::vector<std::string> path;
      for (Vertex v = *hit; v != kNone; v = parent[v]) {
        path.push_back(a.vertex_name(v));
      }
      std::reverse(path.begin(), path.end());
      r.issues.push_back(
          {ValidationIssue::Kind::connected_maximal_components,
           "path joins two maximal components; the input cannot come from a "
           "hyperbolic group with purely exponential growth",
           path});
    }
  }
  return r;
}

////////////////////////////////////////////////////////////////////////
// Decomposition
////////////////////////////////////////////////////////////////////////

struct Component {
  std::vector<Vertex>            vertices;  // sorted
  double                         radius  = 0.0;
  bool                           maximal = false;
  std::optional<CyclicStructure> cyclic;  // set for maximal components
};

//! SCC decomposition with spectral radii, maximal flags and periods.
class ComponentAnalysis {
 public:
  std::vector<Component> const& components() const noexcept {
    return _components;
  }

  double lambda() const noexcept {
    return _lambda;
  }

  // Indices into components() of the maximal components, in order.
  std::vector<std::size_t> const& maximal() const noexcept {
    return _maximal;
  }

  std::size_t num_maximal() const noexcept {
    return _maximal.size();
  }

  Component const& maximal_component(std::size_t j) const {
    if (j >= _maximal.size()) {
      throw std::out_of_range("maximal component index out of range");
    }
    return _components[_maximal[j]];
  }

  std::size_t component_of(Vertex v) const {
    return _component_of.at(v);
  }

  // Vertex order listing components in sequence.
  std::vector<Vertex> block_order() const {
    std::vector<Vertex> order;
    for (auto const& c : _components) {
      order.insert(order.end(), c.vertices.begin(), c.vertices.end());
    }
    return order;
  }

 private:
  friend ComponentAnalysis decompose(Automaton const&);

  std::vector<Component>   _components;
  double                   _lambda = 0.0;
  std::vector<std::size_t> _maximal;
  std::vector<std::size_t> _component_of;
};

//! Decomposes a valid automaton.  Throws ValidationError (carrying the
//! validation report text) when validate() rejects it.
inline ComponentAnalysis decompose(Automaton const& a) {
  auto report = validate(a);
  if (!report.valid()) {
    throw ValidationError(report.to_string());
  }
  auto              rc = detail::raw_components(a);
  ComponentAnalysis ca;
  ca._lambda = rc.lambda;
  ca._component_of.assign(a.num_vertices(), 0);
  for (std::size_t c = 0; c < rc.components.size(); ++c) {
    Component comp;
    comp.vertices = rc.components[c];
    comp.radius   = rc.radii[c];
    comp.maximal  = rc.maximal[c];
    if (comp.maximal) {
      comp.cyclic = cyclic_period(a, comp.vertices);
      ca._maximal.push_back(c);
    }
    for (auto v : comp.vertices) {
      ca._component_of[v] = c;
    }
    ca._components.push_back(std::move(comp));
  }
  return ca;
}

//! C_j: the transition matrix with the rows and columns of every maximal
//! component other than the j-th (0-based) zeroed.
inline Eigen::MatrixXd build_cj(Automaton const&         a,
                                ComponentAnalysis const& ca,
                                std::size_t              j) {
  if (j >= ca.num_maximal()) {
    throw std::out_of_range("build_cj: maximal index " + std::to_string(j)
                            + " out of range (have "
                            + std::to_string(ca.num_maximal()) + ")");
  }
  Eigen::MatrixXd C = a.transition_matrix();
  for (std::size_t k = 0; k < ca.num_maximal(); ++k) {
    if (k == j) {
      continue;
    }
    for (auto v : ca.maximal_component(k).vertices) {
      C.row(v).setZero();
      C.col(v).setZero();
    }
  }
  return C;
}

//! A with every maximal component zeroed: it counts the paths from '*'
//! that never enter a maximal component.
inline Eigen::MatrixXd build_non_maximal(Automaton const&         a,
                                         ComponentAnalysis const& ca) {
  Eigen::MatrixXd C = a.transition_matrix();
  for (std::size_t k = 0; k < ca.num_maximal(); ++k) {
    for (auto v : ca.maximal_component(k).vertices) {
      C.row(v).setZero();
      C.col(v).setZero();
    }
  }
  return C;
}

}  // namespace relgrowth
