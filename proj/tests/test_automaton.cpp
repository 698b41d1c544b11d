#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include <relgrowth/components.hpp>

#include "fixtures.hpp"

using namespace relgrowth;
using testing_support::load;
using testing_support::valid_fixtures;

namespace {

std::string parse_error(std::string const& text) {
  try {
    parse_automaton(text);
  } catch (ParseError const& e) {
    return e.what();
  }
  return {};
}

Vertex vtx(Automaton const& a, std::string const& name) {
  auto v = a.find_vertex(name);
  EXPECT_TRUE(v.has_value()) << name;
  return *v;
}

}  // namespace

TEST(Parse, FreeGroupFixture) {
  auto a = load("f2.aut");
  EXPECT_EQ(a.num_vertices(), 5U);
  EXPECT_EQ(a.num_edges(), 16U);
  EXPECT_EQ(a.num_generators(), 4U);
  EXPECT_EQ(a.vertex_name(a.initial()), "*");
  auto ga = *a.find_generator("a");
  EXPECT_EQ(a.generators()[a.inverse_of(ga)].name, "A");
  EXPECT_EQ(a.inverse_of(a.inverse_of(ga)), ga);
  EXPECT_TRUE(a.has_homomorphism_data());
}

TEST(Parse, EdgeIntoInitialRejected) {
  auto msg = parse_error(testing_support::read_fixture("edge_into_star.aut"));
  EXPECT_NE(msg.find("initial"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 8"), std::string::npos) << msg;
}

TEST(Parse, IncompleteInvolutionRejected) {
  auto msg = parse_error(testing_support::read_fixture("incomplete_involution.aut"));
  EXPECT_NE(msg.find("involution"), std::string::npos) << msg;
}

TEST(Parse, Errors) {
  std::string const head = "generators: a A\ninvolution: a A\nvertices: * x\n"
                           "initial: *\n";
  EXPECT_NE(parse_error(head + "edge: * x a\nedge: * x A\n").find("duplicate"),
            std::string::npos);
  EXPECT_NE(parse_error(head + "edge: * x q\n").find("unknown generator"),
            std::string::npos);
  EXPECT_NE(parse_error(head + "edge: * y a\n").find("unknown vertex"),
            std::string::npos);
  EXPECT_NE(parse_error("generators: a A\ninvolution: a A\nvertices: * x\n")
                .find("initial"),
            std::string::npos);
  EXPECT_NE(parse_error("generators: a A\ninvolution: a A\nvertices: x\n"
                        "initial: *\n")
                .find("'*'"),
            std::string::npos);
  EXPECT_FALSE(parse_error(head + "hom: a 1x\n").empty());
  EXPECT_FALSE(parse_error(head + "colour: red\n").empty());
  EXPECT_FALSE(parse_error(head + "edge: * x\n").empty());
}

TEST(Parse, SelfPairedGeneratorAndComments) {
  auto a = parse_automaton("# leading comment\n"
                           "generators: s   # one letter\n"
                           "involution: s s\n"
                           "vertices: * u\n"
                           "initial: *\n"
                           "\n"
                           "edge: * u s\n"
                           "edge: u u s\n");
  EXPECT_EQ(a.inverse_of(0), 0U);
  EXPECT_FALSE(a.has_homomorphism_data());
}

TEST(Validate, FreeGroupValid) {
  auto rep = validate(load("f2.aut"));
  EXPECT_TRUE(rep.valid()) << rep.to_string();
  auto ca = decompose(load("f2.aut"));
  ASSERT_EQ(ca.num_maximal(), 1U);
  EXPECT_EQ(ca.maximal_component(0).vertices.size(), 4U);
}

TEST(Validate, ConnectedMaximalComponentsHaveWitness) {
  auto a   = load("two_max_connected.aut");
  auto rep = validate(a);
  ASSERT_FALSE(rep.valid());
  auto const& issue = rep.issues.front();
  EXPECT_EQ(issue.kind, ValidationIssue::Kind::connected_maximal_components);
  ASSERT_GE(issue.witness.size(), 2U);
  EXPECT_TRUE(issue.witness.front() == "u1" || issue.witness.front() == "u2");
  EXPECT_TRUE(issue.witness.back() == "v1" || issue.witness.back() == "v2");
  for (std::size_t i = 0; i + 1 < issue.witness.size(); ++i) {
    EXPECT_TRUE(a.find_edge(vtx(a, issue.witness[i]), vtx(a, issue.witness[i + 1])))
        << "witness is not a path";
  }
  EXPECT_THROW(decompose(a), ValidationError);
}

TEST(Validate, UnreachableVertexNamed) {
  auto rep = validate(load("unreachable.aut"));
  ASSERT_FALSE(rep.valid());
  EXPECT_EQ(rep.issues.front().kind, ValidationIssue::Kind::unreachable_vertex);
  EXPECT_EQ(rep.issues.front().witness, std::vector<std::string>{"z"});
  EXPECT_NE(rep.to_string().find("z"), std::string::npos);
}

TEST(Validate, BuilderEdgeIntoInitialReported) {
  Automaton::Builder b;
  b.generator("s").pair("s", "s").vertex("*").vertex("x");
  b.edge("*", "x", "s").edge("x", "x", "s").edge("x", "*", "s");
  auto rep = validate(b.build());
  ASSERT_FALSE(rep.valid());
  EXPECT_EQ(rep.issues.front().kind, ValidationIssue::Kind::edge_into_initial);
  EXPECT_EQ(rep.issues.front().witness, (std::vector<std::string>{"x", "*"}));
}

TEST(Validate, AcyclicRejected) {
  Automaton::Builder b;
  b.generator("s").pair("s", "s").vertex("*").vertex("x").edge("*", "x", "s");
  auto rep = validate(b.build());
  ASSERT_FALSE(rep.valid());
  EXPECT_EQ(rep.issues.front().kind, ValidationIssue::Kind::no_cycles);
}

TEST(Decompose, FreeGroup) {
  auto a  = load("f2.aut");
  auto ca = decompose(a);
  ASSERT_EQ(ca.components().size(), 2U);
  EXPECT_NEAR(ca.lambda(), 3.0, 1e-9);
  auto const& star = ca.components()[ca.component_of(a.initial())];
  EXPECT_EQ(star.vertices.size(), 1U);
  EXPECT_EQ(star.radius, 0.0);
  EXPECT_FALSE(star.maximal);
  EXPECT_EQ(ca.maximal_component(0).cyclic->period, 1U);
}

TEST(Decompose, FreeGroupRankThree) {
  auto ca = decompose(load("f3.aut"));
  EXPECT_NEAR(ca.lambda(), 5.0, 1e-9);
  EXPECT_EQ(ca.maximal_component(0).vertices.size(), 6U);
}

TEST(Decompose, PeriodTwoCycle) {
  auto ca = decompose(load("period2_cycle.aut"));
  ASSERT_EQ(ca.num_maximal(), 1U);
  EXPECT_NEAR(ca.maximal_component(0).radius, 1.0, 1e-12);
  EXPECT_EQ(ca.maximal_component(0).cyclic->period, 2U);
}

TEST(Decompose, NonMaximalFeeder) {
  auto a  = load("two_chains.aut");
  auto ca = decompose(a);
  auto const& t = ca.components()[ca.component_of(vtx(a, "t"))];
  EXPECT_FALSE(t.maximal);
  EXPECT_NEAR(t.radius, 1.0, 1e-12);
  EXPECT_NEAR(ca.lambda(), 3.0, 1e-9);
  EXPECT_EQ(ca.num_maximal(), 1U);
}

TEST(CyclicPeriod, Examples) {
  auto f2 = load("f2.aut");
  std::vector<Vertex> block{vtx(f2, "a"), vtx(f2, "A"), vtx(f2, "b"), vtx(f2, "B")};
  EXPECT_EQ(cyclic_period(f2, block).period, 1U);

  auto p2 = load("period2_cycle.aut");
  std::vector<Vertex> uv{vtx(p2, "u"), vtx(p2, "v")};
  auto cs = cyclic_period(p2, uv);
  EXPECT_EQ(cs.period, 2U);
  EXPECT_NE(cs.class_of(vtx(p2, "u")), cs.class_of(vtx(p2, "v")));

  auto six = load("six_cycle_chord.aut");
  auto ca  = decompose(six);
  EXPECT_EQ(ca.maximal_component(0).vertices.size(), 6U);
  EXPECT_EQ(cyclic_period(six, ca.maximal_component(0).vertices).period, 2U);

  std::vector<Vertex> star{f2.initial()};
  EXPECT_THROW(cyclic_period(f2, star), std::invalid_argument);
}

TEST(BuildCj, SingleMaximalComponentIsA) {
  auto a  = load("f2.aut");
  auto ca = decompose(a);
  EXPECT_EQ(build_cj(a, ca, 0), a.transition_matrix());
  EXPECT_THROW(build_cj(a, ca, 1), std::out_of_range);
}

TEST(BuildCj, DisjointLoops) {
  auto a  = load("two_disjoint_loops.aut");
  auto ca = decompose(a);
  ASSERT_EQ(ca.num_maximal(), 2U);
  auto u = vtx(a, "u"), v = vtx(a, "v");
  for (std::size_t j = 0; j < 2; ++j) {
    auto C     = build_cj(a, ca, j);
    auto other = ca.maximal_component(1 - j).vertices.front();
    auto self  = ca.maximal_component(j).vertices.front();
    EXPECT_EQ(C.row(other).sum(), 0.0);
    EXPECT_EQ(C.col(other).sum(), 0.0);
    EXPECT_EQ(C(self, self), 1.0);
    EXPECT_TRUE((other == u && self == v) || (other == v && self == u));
  }
}

TEST(BuildCj, MaskOnlyZeroes) {
  for (auto const& name : valid_fixtures()) {
    auto a  = load(name);
    auto ca = decompose(a);
    auto A  = a.transition_matrix();
    for (std::size_t j = 0; j < ca.num_maximal(); ++j) {
      auto C = build_cj(a, ca, j);
      for (Eigen::Index r = 0; r < A.rows(); ++r) {
        EXPECT_LE(C.row(r).sum(), A.row(r).sum()) << name;
        for (Eigen::Index c = 0; c < A.cols(); ++c) {
          EXPECT_TRUE(C(r, c) == 0.0 || C(r, c) == A(r, c)) << name;
          EXPECT_TRUE(C(r, c) == 0.0 || C(r, c) == 1.0) << name;
        }
      }
    }
  }
}

// Invariants over every valid fixture.

TEST(ComponentInvariants, BlockLowerTriangular) {
  for (auto const& name : valid_fixtures()) {
    auto a  = load(name);
    auto ca = decompose(a);
    for (auto const& e : a.edges()) {
      EXPECT_LE(ca.component_of(e.to), ca.component_of(e.from)) << name;
    }
    auto order = ca.block_order();
    auto A     = a.transition_matrix();
    for (std::size_t r = 0; r < order.size(); ++r) {
      for (std::size_t c = r + 1; c < order.size(); ++c) {
        if (ca.component_of(order[r]) != ca.component_of(order[c])) {
          EXPECT_EQ(A(order[r], order[c]), 0.0)
              << name << ": entry above diagonal blocks";
        }
      }
    }
  }
}

TEST(ComponentInvariants, LambdaIsSpectralRadiusOfA) {
  for (auto const& name : valid_fixtures()) {
    auto a  = load(name);
    auto ca = decompose(a);
    EXPECT_NEAR(ca.lambda(), real_spectral_radius(a.transition_matrix()), 1e-9)
        << name;
    for (auto const& c : ca.components()) {
      EXPECT_EQ(c.maximal, std::abs(c.radius - ca.lambda()) <= 1e-9 * ca.lambda())
          << name;
    }
    EXPECT_GE(ca.num_maximal(), 1U);
  }
}

TEST(ComponentInvariants, CyclicClassesAdvance) {
  for (auto const& name : valid_fixtures()) {
    auto a  = load(name);
    auto ca = decompose(a);
    for (std::size_t j = 0; j < ca.num_maximal(); ++j) {
      auto const& comp = ca.maximal_component(j);
      auto const& cs   = *comp.cyclic;
      for (auto const& e : a.edges()) {
        if (ca.component_of(e.from) == ca.maximal()[j]
            && ca.component_of(e.to) == ca.maximal()[j]) {
          EXPECT_EQ(cs.class_of(e.to), (cs.class_of(e.from) + 1) % cs.period)
              << name;
        }
      }
    }
  }
}

TEST(ComponentInvariants, PathCountsMatchMatrixPowers) {
  for (auto const& name : valid_fixtures()) {
    auto a = load(name);
    auto A = a.transition_matrix().cast<long long>().eval();
    Eigen::Matrix<long long, 1, Eigen::Dynamic> row =
        Eigen::Matrix<long long, 1, Eigen::Dynamic>::Zero(A.cols());
    row(a.initial()) = 1;
    std::vector<BigInt> at(a.num_vertices(), 0);
    at[a.initial()] = 1;
    for (int n = 0; n <= 12; ++n) {
      BigInt dp = 0;
      for (auto const& c : at) {
        dp += c;
      }
      EXPECT_EQ(dp, BigInt(row.sum())) << name << " n=" << n;
      std::vector<BigInt> next(a.num_vertices(), 0);
      for (auto const& e : a.edges()) {
        next[e.to] += at[e.from];
      }
      at.swap(next);
      row = (row * A).eval();
    }
  }
}
