#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <relgrowth/automaton.hpp>

namespace testing_support {

inline std::string fixture_path(std::string const& name) {
  return std::string(RELGROWTH_FIXTURES) + "/" + name;
}

inline std::string read_fixture(std::string const& name) {
  std::ifstream in(fixture_path(name));
  if (!in) {
    throw std::runtime_error("cannot open fixture " + name);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline relgrowth::Automaton load(std::string const& name) {
  return relgrowth::parse_automaton(read_fixture(name));
}

// Fixtures that parse and pass validation.
inline std::vector<std::string> const& valid_fixtures() {
  static std::vector<std::string> const names{
      "f2.aut",           "f2_nu1.aut",         "f3.aut",
      "period2_cycle.aut", "period2_bipartite.aut", "two_chains.aut",
      "two_disjoint_loops.aut", "six_cycle_chord.aut"};
  return names;
}

// Valid fixtures with a symmetric generating set and phi(s^-1) = -phi(s).
inline std::vector<std::string> const& symmetric_fixtures() {
  static std::vector<std::string> const names{"f2.aut", "f2_nu1.aut", "f3.aut",
                                              "two_disjoint_loops.aut"};
  return names;
}

}  // namespace testing_support
