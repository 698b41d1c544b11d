// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Labelled directed graphs with a distinguished initial vertex, and the
// line-oriented text format they are read from.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"

namespace relgrowth {

// A letter of the symmetric generating set together with its inverse.
struct Generator {
  std::string name;
  std::string inverse;
};

//! A strongly Markov automaton: a finite directed graph with at most one
//! edge per ordered pair of vertices, edges labelled by generators, and an
//! initial vertex named "*".
//!
//! Instances are immutable once built; use Automaton::Builder.  The builder
//! enforces the involution and the single-edge rule but does not reject
//! edges into the initial vertex, so that validate() can report them.
class Automaton {
 public:
  struct Edge {
    Vertex      from;
    Vertex      to;
    std::size_t label;  // index into generators()
  };

  class Builder;

  static constexpr std::string_view kInitialName = "*";

  std::size_t num_vertices() const noexcept {
    return _vertex_names.size();
  }
  std::size_t num_edges() const noexcept {
    return _edges.size();
  }
  std::size_t num_generators() const noexcept {
    return _generators.size();
  }

  Vertex initial() const noexcept {
    return _initial;
  }

  std::string const& vertex_name(Vertex v) const {
    return _vertex_names.at(v);
  }

  std::optional<Vertex> find_vertex(std::string_view name) const {
    auto it = std::find(_vertex_names.begin(), _vertex_names.end(), name);
    if (it == _vertex_names.end()) {
      return std::nullopt;
    }
    return static_cast<Vertex>(it - _vertex_names.begin());
  }

  std::vector<Generator> const& generators() const noexcept {
    return _generators;
  }

  std::optional<std::size_t> find_generator(std::string_view name) const {
    for (std::size_t i = 0; i < _generators.size(); ++i) {
      if (_generators[i].name == name) {
        return i;
      }
    }
    return std::nullopt;
  }

  std::size_t inverse_of(std::size_t g) const {
    return _inverse.at(g);
  }

  std::vector<Edge> const& edges() const noexcept {
    return _edges;
  }

  // Indices into edges() of the edges leaving v, ordered by target.
  std::vector<std::size_t> const& out_edges(Vertex v) const {
    return _out.at(v);
  }

  std::optional<std::size_t> find_edge(Vertex from, Vertex to) const {
    for (auto e : _out.at(from)) {
      if (_edges[e].to == to) {
        return e;
      }
    }
    return std::nullopt;
  }

  // Images of generators under the homomorphism to Z^nu, as declared by
  // "hom:" lines.  Entries are empty for generators without a line.
  std::vector<std::optional<Weight>> const& homomorphism() const noexcept {
    return _hom;
  }

  bool has_homomorphism_data() const noexcept {
    return std::any_of(_hom.begin(), _hom.end(),
                       [](auto const& h) { return h.has_value(); });
  }

  // The 0/1 transition matrix indexed by V x V.
  Eigen::MatrixXd transition_matrix() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(num_vertices(), num_vertices());
    for (auto const& e : _edges) {
      A(e.from, e.to) = 1.0;
    }
    return A;
  }

  // Concatenated generator names along a vertex path.
  std::string label_of_path(std::vector<Vertex> const& path) const {
    std::string s;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto e = find_edge(path[i], path[i + 1]);
      if (e) {
        if (!s.empty()) {
          s += ' ';
        }
        s += _generators[_edges[*e].label].name;
      }
    }
    return s;
  }

 private:
  Automaton() = default;

  std::vector<std::string>              _vertex_names;
  Vertex                                _initial = 0;
  std::vector<Generator>                _generators;
  std::vector<std::size_t>              _inverse;
  std::vector<Edge>                     _edges;
  std::vector<std::vector<std::size_t>> _out;
  std::vector<std::optional<Weight>>    _hom;
};

class Automaton::Builder {
 public:
  // Declares a generator.  Its inverse is set by pair().
  Builder& generator(std::string name) {
    if (name == kInitialName) {
      throw ParseError("'*' is reserved and cannot name a generator");
    }
    if (_gen_index.count(name)) {
      throw ParseError("generator declared twice: " + name);
    }
    _gen_index.emplace(name, _gens.size());
    _gens.push_back(std::move(name));
    _inv.push_back(kUnset);
    return *this;
  }

  // Declares s and t to be mutually inverse; s == t is a self-inverse letter.
  Builder& pair(std::string const& s, std::string const& t) {
    auto i = gen(s);
    auto j = gen(t);
    if (_inv[i] != kUnset || _inv[j] != kUnset) {
      throw ParseError("involution not a pairing: generator paired twice in '"
                       + s + " " + t + "'");
    }
    _inv[i] = j;
    _inv[j] = i;
    return *this;
  }

  Builder& vertex(std::string name) {
    if (_vtx_index.count(name)) {
      throw ParseError("vertex declared twice: " + name);
    }
    _vtx_index.emplace(name, _vtx.size());
    _vtx.push_back(std::move(name));
    return *this;
  }

  Builder& edge(std::string const& from,
                std::string const& to,
                std::string const& label) {
    auto u = vtx(from);
    auto v = vtx(to);
    auto g = gen(label);
    if (!_edge_set.emplace(u, v).second) {
      throw ParseError("duplicate edge " + from + " -> " + to);
    }
    _edges.push_back({u, v, g});
    return *this;
  }

  Builder& hom(std::string const& generator, Weight image) {
    auto g = gen(generator);
    if (_hom.size() < _gens.size()) {
      _hom.resize(_gens.size());
    }
    if (_hom[g]) {
      throw ParseError("homomorphism image declared twice for " + generator);
    }
    _hom[g] = std::move(image);
    return *this;
  }

  Automaton build() const {
    for (std::size_t i = 0; i < _gens.size(); ++i) {
      if (_inv[i] == kUnset) {
        throw ParseError("involution not a pairing: generator '" + _gens[i]
                         + "' has no inverse");
      }
    }
    auto it = _vtx_index.find(std::string(kInitialName));
    if (it == _vtx_index.end()) {
      throw ParseError("missing initial vertex '*'");
    }
    std::optional<std::size_t> rank;
    for (auto const& h : _hom) {
      if (!h) {
        continue;
      }
      if (rank && *rank != h->size()) {
        throw ParseError("hom lines disagree on the rank nu");
      }
      rank = h->size();
    }
    if (rank && *rank == 0) {
      throw ParseError("hom lines must carry at least one integer");
    }

    Automaton a;
    a._vertex_names = _vtx;
    a._initial      = it->second;
    for (std::size_t i = 0; i < _gens.size(); ++i) {
      a._generators.push_back({_gens[i], _gens[_inv[i]]});
    }
    a._inverse = _inv;
    a._edges   = _edges;
    std::sort(a._edges.begin(), a._edges.end(), [](Edge const& x, Edge const& y) {
      return std::pair(x.from, x.to) < std::pair(y.from, y.to);
    });
    a._out.assign(_vtx.size(), {});
    for (std::size_t e = 0; e < a._edges.size(); ++e) {
      a._out[a._edges[e].from].push_back(e);
    }
    a._hom = _hom;
    a._hom.resize(_gens.size());
    return a;
  }

 private:
  static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

  std::size_t gen(std::string const& name) const {
    auto it = _gen_index.find(name);
    if (it == _gen_index.end()) {
      throw ParseError("unknown generator: " + name);
    }
    return it->second;
  }

  std::size_t vtx(std::string const& name) const {
    auto it = _vtx_index.find(name);
    if (it == _vtx_index.end()) {
      throw ParseError("unknown vertex: " + name);
    }
    return it->second;
  }

  std::vector<std::string>              _gens;
  std::map<std::string, std::size_t>    _gen_index;
  std::vector<std::size_t>              _inv;
  std::vector<std::string>              _vtx;
  std::map<std::string, std::size_t>    _vtx_index;
  std::vector<Automaton::Edge>          _edges;
  std::set<std::pair<Vertex, Vertex>>   _edge_set;
  std::vector<std::optional<Weight>>    _hom;
};

namespace detail {

  inline bool is_identifier(std::string const& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0]))
                       || s[0] == '_')) {
      return false;
    }
    return std::all_of(s.begin(), s.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
  }

  inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream       is{std::string(s)};
    std::string              tok;
    while (is >> tok) {
      out.push_back(tok);
    }
    return out;
  }

}  // namespace detail

//! Parses the automaton text format:
//!
//!     generators: a A b B
//!     involution: a A
//!     involution: b B
//!     vertices: * a A b B
//!     initial: *
//!     edge: * a a
//!     hom: a 1 0
//!
//! '#' starts a comment.  Names are ASCII identifiers; '*' is reserved for
//! the initial vertex.  Edges into '*' are rejected here.
inline Automaton parse_automaton(std::string_view text) {
  Automaton::Builder       b;
  std::istringstream       in{std::string(text)};
  std::string              line;
  std::size_t              lineno = 0;
  bool                     seen_initial = false;
  bool                     seen_vertices = false;

  auto fail = [&](std::string const& msg) -> ParseError {
    return ParseError("line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    auto colon = line.find(':');
    auto toks  = detail::split_ws(line);
    if (toks.empty()) {
      continue;
    }
    if (colon == std::string::npos) {
      throw fail("expected '<key>: ...'");
    }
    auto key  = detail::split_ws(line.substr(0, colon));
    auto args = detail::split_ws(line.substr(colon + 1));
    if (key.size() != 1) {
      throw fail("malformed key");
    }
    try {
      if (key[0] == "generators") {
        for (auto& g : args) {
          if (!detail::is_identifier(g)) {
            throw fail("generator name is not an identifier: " + g);
          }
          b.generator(g);
        }
      } else if (key[0] == "involution") {
        if (args.size() != 2) {
          throw fail("involution expects two generators");
        }
        b.pair(args[0], args[1]);
      } else if (key[0] == "vertices") {
        for (auto& v : args) {
          if (v != Automaton::kInitialName && !detail::is_identifier(v)) {
            throw fail("vertex name is not an identifier: " + v);
          }
          b.vertex(v);
        }
        seen_vertices = true;
      } else if (key[0] == "initial") {
        if (args.size() != 1 || args[0] != Automaton::kInitialName) {
          throw fail("initial vertex must be '*'");
        }
        seen_initial = true;
      } else if (key[0] == "edge") {
        if (args.size() != 3) {
          throw fail("edge expects <from> <to> <generator>");
        }
        if (args[1] == Automaton::kInitialName) {
          throw fail("edge into the initial vertex: " + args[0] + " -> *");
        }
        b.edge(args[0], args[1], args[2]);
      } else if (key[0] == "hom") {
        if (args.size() < 2) {
          throw fail("hom expects <generator> <int>+");
        }
        Weight w;
        for (std::size_t i = 1; i < args.size(); ++i) {
          std::size_t pos = 0;
          long long   x   = 0;
          try {
            x = std::stoll(args[i], &pos);
          } catch (std::exception const&) {
            pos = 0;
          }
          if (pos != args[i].size()) {
            throw fail("not an integer: " + args[i]);
          }
          w.push_back(x);
        }
        b.hom(args[0], std::move(w));
      } else {
        throw fail("unknown key: " + key[0]);
      }
    } catch (ParseError const& e) {
      std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) {
        throw;
      }
      throw fail(msg);
    }
  }
  if (!seen_vertices) {
    throw ParseError("missing 'vertices:' line");
  }
  if (!seen_initial) {
    throw ParseError("missing initial vertex declaration 'initial: *'");
  }
  return b.build();
}

}  // namespace relgrowth
