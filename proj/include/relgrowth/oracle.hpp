// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Built-in free groups and a brute-force Cayley-ball oracle, independent of
// the automaton machinery, used to check automata and exact counts.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "automaton.hpp"
#include "core.hpp"

namespace relgrowth {

//! Free group of rank k >= 2 with a homomorphism to Z^nu given on the
//! positive generators (phi(s^-1) = -phi(s)).
//!
//! Letters are numbered 2i (the i-th generator) and 2i + 1 (its inverse).
struct FreeGroupSpec {
  std::vector<std::string> names;          // positive generators
  std::vector<std::string> inverse_names;  // aligned with names
  std::vector<Weight>      images;         // phi of positive generators

  //! Generators a, b, c, ... with inverses A, B, C, ...; images default to
  //! the abelianisation Z^k.
  static FreeGroupSpec standard(std::size_t k, std::vector<Weight> images = {}) {
    if (k < 2) {
      throw ValidationError("free group rank must be >= 2 (non-elementary)");
    }
    if (k > 26) {
      throw std::invalid_argument("free group rank too large for a-z names");
    }
    FreeGroupSpec s;
    for (std::size_t i = 0; i < k; ++i) {
      s.names.emplace_back(1, static_cast<char>('a' + i));
      s.inverse_names.emplace_back(1, static_cast<char>('A' + i));
    }
    if (images.empty()) {
      for (std::size_t i = 0; i < k; ++i) {
        Weight w(k, 0);
        w[i] = 1;
        images.push_back(w);
      }
    }
    s.images = std::move(images);
    s.check();
    return s;
  }

  void check() const {
    if (names.size() < 2) {
      throw ValidationError("free group rank must be >= 2 (non-elementary)");
    }
    if (inverse_names.size() != names.size() || images.size() != names.size()) {
      throw std::invalid_argument("FreeGroupSpec: inconsistent sizes");
    }
    for (auto const& w : images) {
      if (w.empty() || w.size() != images.front().size()) {
        throw ValidationError("FreeGroupSpec: images must share a rank nu >= 1");
      }
    }
  }

  std::size_t rank() const noexcept {
    return names.size();
  }
  std::size_t nu() const noexcept {
    return images.front().size();
  }
  std::size_t num_letters() const noexcept {
    return 2 * names.size();
  }
  static std::size_t inverse_letter(std::size_t x) noexcept {
    return x ^ 1U;
  }
  std::string const& letter_name(std::size_t x) const {
    return (x & 1U) ? inverse_names.at(x / 2) : names.at(x / 2);
  }
  Weight letter_image(std::size_t x) const {
    return (x & 1U) ? -images.at(x / 2) : images.at(x / 2);
  }
};

//! Reduced-word automaton: '*' plus one vertex per letter (named after the
//! letter); '*' -> x for every letter and x -> y iff y != x^-1, each edge
//! labelled by its target letter.  Carries the homomorphism as hom data.
inline Automaton build_free_group_automaton(FreeGroupSpec const& spec) {
  spec.check();
  Automaton::Builder b;
  for (std::size_t x = 0; x < spec.num_letters(); ++x) {
    b.generator(spec.letter_name(x));
  }
  for (std::size_t i = 0; i < spec.rank(); ++i) {
    b.pair(spec.names[i], spec.inverse_names[i]);
  }
  b.vertex(std::string(Automaton::kInitialName));
  for (std::size_t x = 0; x < spec.num_letters(); ++x) {
    b.vertex(spec.letter_name(x));
  }
  for (std::size_t x = 0; x < spec.num_letters(); ++x) {
    b.edge(std::string(Automaton::kInitialName), spec.letter_name(x),
           spec.letter_name(x));
  }
  for (std::size_t x = 0; x < spec.num_letters(); ++x) {
    for (std::size_t y = 0; y < spec.num_letters(); ++y) {
      if (y != FreeGroupSpec::inverse_letter(x)) {
        b.edge(spec.letter_name(x), spec.letter_name(y), spec.letter_name(y));
      }
    }
  }
  for (std::size_t x = 0; x < spec.num_letters(); ++x) {
    b.hom(spec.letter_name(x), spec.letter_image(x));
  }
  return b.build();
}

//! For each n <= n_max, the weights phi(g) over |g| = n with multiplicity.
struct OracleBall {
  std::size_t                          nu = 0;
  std::vector<std::map<Weight, BigInt>> layers;
  std::vector<BigInt>                  totals;

  std::size_t n_max() const {
    return layers.size() - 1;
  }
  BigInt count(std::size_t n, Weight const& w) const {
    auto it = layers.at(n).find(w);
    return it == layers.at(n).end() ? BigInt(0) : it->second;
  }
  BigInt const& total(std::size_t n) const {
    return totals.at(n);
  }
};

inline constexpr std::uint64_t kDefaultWordBudget = 10'000'000;

// Number of reduced words of length <= n_max, saturating at UINT64_MAX.
inline std::uint64_t reduced_words_up_to(std::size_t k, std::size_t n_max) {
  long double total = 1.0L, layer = 1.0L;
  for (std::size_t n = 1; n <= n_max; ++n) {
    layer *= (n == 1) ? static_cast<long double>(2 * k)
                      : static_cast<long double>(2 * k - 1);
    total += layer;
  }
  return total > 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(total);
}

namespace detail {

  // Depth-first enumeration of reduced words; visit(word, weight) is called
  // for every word including the empty one.
  template <typename Visit>
  void enumerate_reduced(FreeGroupSpec const&      spec,
                         std::size_t               n_max,
                         std::vector<std::size_t>& word,
                         Weight&                   weight,
                         Visit&&                   visit) {
    visit(word, weight);
    if (word.size() == n_max) {
      return;
    }
    for (std::size_t x = 0; x < spec.num_letters(); ++x) {
      if (!word.empty() && x == FreeGroupSpec::inverse_letter(word.back())) {
        continue;
      }
      auto f = spec.letter_image(x);
      word.push_back(x);
      weight = weight + f;
      enumerate_reduced(spec, n_max, word, weight, visit);
      weight = weight - f;
      word.pop_back();
    }
  }

  inline void check_word_budget(FreeGroupSpec const& spec,
                                std::size_t          n_max,
                                std::uint64_t        budget) {
    auto need = reduced_words_up_to(spec.rank(), n_max);
    if (need > budget) {
      throw BudgetExceeded("oracle enumeration of " + std::to_string(need)
                           + " reduced words exceeds the budget of "
                           + std::to_string(budget));
    }
  }

}  // namespace detail

//! Exhaustive enumeration of reduced words of length <= n_max, accumulating
//! phi-weights.  Throws BudgetExceeded if more than word_budget words would
//! be visited.
inline OracleBall oracle_counts(FreeGroupSpec const& spec,
                                std::size_t          n_max,
                                std::uint64_t word_budget = kDefaultWordBudget) {
  spec.check();
  detail::check_word_budget(spec, n_max, word_budget);
  std::vector<std::map<Weight, std::uint64_t>> raw(n_max + 1);
  std::vector<std::size_t>                     word;
  Weight                                       weight = zero_weight(spec.nu());
  detail::enumerate_reduced(spec, n_max, word, weight,
                            [&](auto const& wd, Weight const& wt) {
                              ++raw[wd.size()][wt];
                            });
  OracleBall ball;
  ball.nu = spec.nu();
  for (auto const& layer : raw) {
    std::map<Weight, BigInt> l;
    BigInt                   total = 0;
    for (auto const& [wt, c] : layer) {
      l.emplace(wt, BigInt(c));
      total += c;
    }
    ball.layers.push_back(std::move(l));
    ball.totals.push_back(std::move(total));
  }
  return ball;
}

//! Outcome of comparing the words read along paths from '*' with the
//! oracle's reduced words, length by length.
struct MarkovCheckReport {
  enum class Failure { none, injectivity, geodesic, surjectivity };

  bool        ok             = true;
  std::size_t checked_up_to  = 0;
  Failure     failure        = Failure::none;
  std::size_t failure_length = 0;
  std::string witness;
  std::string message;
};

//! Certifies, up to length n_max, that path -> word is a bijection onto the
//! sphere of each radius and that every emitted word is geodesic (freely
//! reduced).  The first failure at the shortest length is reported with a
//! witness word.
inline MarkovCheckReport verify_strong_markov(Automaton const&     a,
                                              FreeGroupSpec const& spec,
                                              std::size_t          n_max,
                                              std::uint64_t word_budget
                                              = kDefaultWordBudget) {
  spec.check();
  detail::check_word_budget(spec, n_max, word_budget);

  std::map<std::string, std::size_t> letter_of;
  for (std::size_t x = 0; x < spec.num_letters(); ++x) {
    letter_of.emplace(spec.letter_name(x), x);
  }
  std::vector<std::size_t> label_letter;
  for (auto const& g : a.generators()) {
    auto it = letter_of.find(g.name);
    if (it == letter_of.end()) {
      throw std::invalid_argument("verify_strong_markov: automaton generator '"
                                  + g.name + "' is not a letter of the group");
    }
    label_letter.push_back(it->second);
  }

  using Word = std::vector<std::size_t>;
  std::vector<std::vector<Word>> from_paths(n_max + 1), from_oracle(n_max + 1);
  {
    std::uint64_t visited = 0;
    Word          word;
    auto dfs = [&](auto&& self, Vertex v) -> void {
      if (++visited > word_budget) {
        throw BudgetExceeded("path enumeration exceeds the word budget");
      }
      from_paths[word.size()].push_back(word);
      if (word.size() == n_max) {
        return;
      }
      for (auto e : a.out_edges(v)) {
        word.push_back(label_letter[a.edges()[e].label]);
        self(self, a.edges()[e].to);
        word.pop_back();
      }
    };
    dfs(dfs, a.initial());
  }
  {
    Word   word;
    Weight weight = zero_weight(spec.nu());
    detail::enumerate_reduced(spec, n_max, word, weight,
                              [&](Word const& wd, Weight const&) {
                                from_oracle[wd.size()].push_back(wd);
                              });
  }

  auto spell = [&](Word const& w) {
    std::string s;
    for (auto x : w) {
      s += (s.empty() ? "" : " ") + spec.letter_name(x);
    }
    return s.empty() ? std::string("(empty)") : s;
  };

  MarkovCheckReport rep;
  for (std::size_t n = 0; n <= n_max; ++n) {
    auto& paths  = from_paths[n];
    auto& oracle = from_oracle[n];
    std::sort(paths.begin(), paths.end());
    std::sort(oracle.begin(), oracle.end());
    auto fail = [&](MarkovCheckReport::Failure f, Word const& w,
                    std::string msg) {
      rep.ok             = false;
      rep.failure        = f;
      rep.failure_length = n;
      rep.witness        = spell(w);
      rep.message        = std::move(msg) + " at length " + std::to_string(n)
                    + ": " + rep.witness;
      return rep;
    };
    if (auto it = std::adjacent_find(paths.begin(), paths.end());
        it != paths.end()) {
      return fail(MarkovCheckReport::Failure::injectivity, *it,
                  "two paths from '*' spell the same word");
    }
    for (auto const& w : paths) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (w[i + 1] == FreeGroupSpec::inverse_letter(w[i])) {
          return fail(MarkovCheckReport::Failure::geodesic, w,
                      "path spells a word that is not geodesic");
        }
      }
    }
    std::vector<Word> missing;
    std::set_difference(oracle.begin(), oracle.end(), paths.begin(),
                        paths.end(), std::back_inserter(missing));
    if (!missing.empty()) {
      return fail(MarkovCheckReport::Failure::surjectivity, missing.front(),
                  "group element of this length is not read by any path");
    }
    rep.checked_up_to = n;
  }
  return rep;
}

}  // namespace relgrowth
