#include <gtest/gtest.h>

#include <random>

#include <relgrowth/analysis.hpp>
#include <relgrowth/lattice.hpp>

#include "fixtures.hpp"

using namespace relgrowth;
using testing_support::load;

namespace {

struct Loaded {
  Automaton         a;
  EdgeWeighting     w;
  ComponentAnalysis ca;

  explicit Loaded(std::string const& name)
      : a(load(name)), w(EdgeWeighting::from_homomorphism(a)), ca(decompose(a)) {}

  std::vector<Vertex> const& block(std::size_t j = 0) const {
    return ca.maximal_component(j).vertices;
  }
};

RationalPoint rp(std::initializer_list<Fraction> xs) {
  return RationalPoint(xs);
}

IntegerLattice lattice(std::size_t dim, std::vector<Weight> gens) {
  return IntegerLattice::generated_by(dim, gens);
}

// Brute-force closed walks of exactly `len` edges from base back to base
// inside the component.
std::set<Weight> closed_walk_weights(Loaded const& s, Vertex base, std::size_t len) {
  std::set<Weight> out;
  auto const&      comp = s.block();
  auto inside = [&](Vertex v) {
    return std::find(comp.begin(), comp.end(), v) != comp.end();
  };
  auto walk = [&](auto&& self, Vertex v, std::size_t left, Weight acc) -> void {
    if (left == 0) {
      if (v == base) {
        out.insert(acc);
      }
      return;
    }
    for (auto e : s.w.out_edges(v)) {
      auto const& edge = s.w.edges()[e];
      if (inside(edge.to)) {
        self(self, edge.to, left - 1, acc + edge.weight);
      }
    }
  };
  walk(walk, base, len, zero_weight(s.w.rank()));
  return out;
}

}  // namespace

TEST(HermiteNormalForm, EvenSumLattice) {
  auto l = lattice(2, {Weight{1, -1}, Weight{1, 1}, Weight{2, 0}});
  EXPECT_EQ(l.basis(), (std::vector<Weight>{Weight{1, 1}, Weight{0, 2}}));
  EXPECT_EQ(l.index(), 2);
  EXPECT_TRUE(l.contains(Weight{3, 1}));
  EXPECT_FALSE(l.contains(Weight{1, 0}));
  EXPECT_EQ(l.to_string(), "{(1,1), (0,2)}");
}

TEST(HermiteNormalForm, ZeroAndDegenerate) {
  auto zero = lattice(2, {Weight{0, 0}});
  EXPECT_EQ(zero.rank(), 0U);
  EXPECT_FALSE(zero.index().has_value());
  auto line = lattice(3, {Weight{0, 2, 4}, Weight{0, -3, -6}});
  EXPECT_EQ(line.basis(), (std::vector<Weight>{Weight{0, 1, 2}}));
  EXPECT_THROW(line.add(Weight{1, 2}), std::invalid_argument);
}

// Random bases: HNF is a fixed point, canonical under reordering and
// contains every generator.
TEST(HermiteNormalForm, RandomProperties) {
  std::mt19937_64                             rng(2718);
  std::uniform_int_distribution<std::int64_t> coord(-9, 9);
  std::uniform_int_distribution<std::size_t>  count(1, 6);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t         dim = 1 + trial % 4;
    std::vector<Weight> gens(count(rng), Weight(dim, 0));
    for (auto& g : gens) {
      for (auto& x : g) {
        x = coord(rng);
      }
    }
    auto h = hermite_normal_form(gens, dim);
    EXPECT_EQ(hermite_normal_form(h, dim), h);
    auto shuffled = gens;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(hermite_normal_form(shuffled, dim), h);
    auto l = lattice(dim, gens);
    EXPECT_EQ(l.basis(), h);
    for (auto const& g : gens) {
      EXPECT_TRUE(l.contains(g));
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
      auto pc = IntegerLattice::pivot_column(h[i]);
      EXPECT_GT(h[i][pc], 0);
      for (std::size_t r = 0; r < i; ++r) {
        EXPECT_GE(h[r][pc], 0);
        EXPECT_LT(h[r][pc], h[i][pc]);
      }
    }
    if (l.full_rank()) {
      EXPECT_EQ(static_cast<std::int64_t>(dual_points(l).size()), *l.index());
    }
  }
}

TEST(DualPoints, Examples) {
  auto even = lattice(2, {Weight{1, 1}, Weight{0, 2}});
  EXPECT_EQ(dual_points(even),
            (std::vector<RationalPoint>{rp({0, 0}), rp({Fraction(1, 2), Fraction(1, 2)})}));
  EXPECT_EQ(dual_points(lattice(1, {Weight{1}})), (std::vector<RationalPoint>{rp({0})}));
  EXPECT_EQ(dual_points(lattice(2, {Weight{2, 0}, Weight{0, 1}})),
            (std::vector<RationalPoint>{rp({0, 0}), rp({Fraction(1, 2), 0})}));
  EXPECT_THROW(dual_points(lattice(2, {Weight{1, 1}})), ValidationError);
}

TEST(DualPoints, RoundTrip) {
  auto l   = lattice(3, {Weight{2, 1, 0}, Weight{0, 3, 1}, Weight{1, 0, 4}});
  auto pts = dual_points(l);
  EXPECT_EQ(static_cast<std::int64_t>(pts.size()), *l.index());
  for (auto const& t : pts) {
    for (auto const& b : l.basis()) {
      EXPECT_EQ(pairing(t, b).denominator(), 1);
    }
    for (auto const& q : t) {
      EXPECT_GE(q, 0);
      EXPECT_LT(q, 1);
    }
  }
  EXPECT_TRUE(std::adjacent_find(pts.begin(), pts.end()) == pts.end());
}

TEST(CycleWeightData, FreeGroupBaseA) {
  Loaded s("f2.aut");
  auto  a  = *s.a.find_vertex("a");
  auto  cw = cycle_weight_data(s.w, s.block(), a, 4);
  EXPECT_EQ(cw.by_length[1], (std::set<Weight>{Weight{1, 0}}));
  // a -> a -> a, a -> b -> a and a -> B -> a.
  EXPECT_EQ(cw.by_length[2],
            (std::set<Weight>{Weight{1, -1}, Weight{1, 1}, Weight{2, 0}}));
  for (std::size_t l = 1; l <= 4; ++l) {
    EXPECT_EQ(cw.by_length[l], closed_walk_weights(s, a, l)) << l;
  }
}

TEST(CycleWeightData, LengthsAreMultiplesOfPeriod) {
  for (auto const& name : {"period2_cycle.aut", "six_cycle_chord.aut"}) {
    Loaded s(name);
    auto  cw = cycle_weight_data(s.w, s.block(), s.block().front(), 12);
    for (std::size_t l = 1; l <= 12; ++l) {
      if (l % 2 != 0) {
        EXPECT_TRUE(cw.by_length[l].empty()) << name << " l=" << l;
      }
    }
    EXPECT_FALSE(cw.by_length[12].empty());
  }
}

TEST(DeltaGroup, Examples) {
  Loaded f2("f2.aut");
  EXPECT_EQ(delta_group(f2.w, f2.block()).basis(),
            (std::vector<Weight>{Weight{1, 1}, Weight{0, 2}}));
  Loaded nu1("f2_nu1.aut");
  EXPECT_EQ(delta_group(nu1.w, nu1.block()).basis(), (std::vector<Weight>{Weight{1}}));
  Loaded p2("period2_cycle.aut");
  EXPECT_EQ(delta_group(p2.w, p2.block()).rank(), 0U);
}

TEST(GroupIndices, FreeGroupAbelianisation) {
  Loaded s("f2.aut");
  auto  gi = group_indices(s.w, s.block());
  EXPECT_EQ(gi.gamma.basis(), (std::vector<Weight>{Weight{1, 0}, Weight{0, 1}}));
  EXPECT_EQ(gi.delta.index(), 2);
  ASSERT_TRUE(gi.order.has_value());
  EXPECT_EQ(*gi.order, 2);
  EXPECT_NE((gi.c[0] + gi.c[1]) % 2, 0);
  EXPECT_EQ(gi.period, 1U);
}

TEST(GroupIndices, RankOneImage) {
  Loaded s("f2_nu1.aut");
  auto  gi = group_indices(s.w, s.block());
  EXPECT_EQ(gi.gamma.basis(), (std::vector<Weight>{Weight{1}}));
  EXPECT_EQ(gi.delta.basis(), (std::vector<Weight>{Weight{1}}));
  EXPECT_EQ(gi.order, 1);
}

TEST(GroupIndices, RankObstruction) {
  Loaded s("zero_weight.aut");
  try {
    group_indices(s.w, s.block());
    FAIL() << "expected ValidationError";
  } catch (ValidationError const& e) {
    EXPECT_NE(std::string(e.what()).find("cohomologous"), std::string::npos);
  }
}

TEST(GroupIndices, InfiniteOrderWhenDeltaDeficient) {
  Loaded s("two_disjoint_loops.aut");
  auto  gi = group_indices(s.w, s.block(0));
  EXPECT_EQ(gi.delta.rank(), 0U);
  EXPECT_FALSE(gi.order.has_value());
  std::vector<GroupIndices> all{gi};
  EXPECT_THROW(global_period(all), ValidationError);
}

TEST(GroupIndices, InvariantsOnFixtures) {
  for (auto const& name : {"f2.aut", "f2_nu1.aut", "f3.aut", "two_chains.aut"}) {
    Loaded s(name);
    auto  cl = cycle_lattices(s.w, s.block());
    auto  gi = group_indices(cl);
    EXPECT_EQ(gi.gamma.rank(), s.w.rank()) << name;
    for (auto const& d : gi.delta.basis()) {
      EXPECT_TRUE(gi.gamma.contains(d)) << name;
    }
    ASSERT_TRUE(gi.order.has_value()) << name;
    EXPECT_TRUE(gi.delta.contains(*gi.order * gi.c));
    for (std::int64_t k = 1; k < *gi.order; ++k) {
      EXPECT_FALSE(gi.delta.contains(k * gi.c)) << name;
    }
    // Another cycle pair with length difference p gives the same coset.
    auto other = cycle_pair_generator(cl, true);
    ASSERT_TRUE(other.has_value());
    EXPECT_TRUE(gi.delta.contains(gi.c - other->first)) << name;
    // Delta together with c generates Gamma.
    auto spanned = gi.delta;
    spanned.add(gi.c);
    EXPECT_EQ(spanned, gi.gamma) << name;
  }
}

TEST(CycleLattices, Stabilised) {
  for (auto const& name : testing_support::valid_fixtures()) {
    Loaded s(name);
    for (std::size_t j = 0; j < s.ca.num_maximal(); ++j) {
      auto cl = cycle_lattices(s.w, s.block(j));
      auto n  = s.block(j).size();
      EXPECT_GE(cl.max_length, 2 * n);
      auto later = detail::lattices_up_to(cl.weights_by_length, s.w.rank(),
                                          cl.max_length + n);
      EXPECT_EQ(later.first, cl.gamma) << name;
      EXPECT_EQ(later.second, cl.delta) << name;
      EXPECT_EQ(cl.period, s.ca.maximal_component(j).cyclic->period) << name;
    }
  }
}

TEST(GlobalPeriod, Examples) {
  Loaded f2("f2.aut");
  std::vector<GroupIndices> a{group_indices(f2.w, f2.block())};
  EXPECT_EQ(global_period(a).lcm, 2);
  EXPECT_EQ(global_period(a).product, 2);

  Loaded nu1("f2_nu1.aut");
  std::vector<GroupIndices> b{group_indices(nu1.w, nu1.block())};
  EXPECT_EQ(global_period(b).lcm, 1);

  GroupIndices x, y;
  x.period = 2;
  x.order  = 1;
  y.period = 1;
  y.order  = 3;
  std::vector<GroupIndices> c{x, y};
  EXPECT_EQ(global_period(c).lcm, 6);
  EXPECT_EQ(global_period(c).product, 6);
}

TEST(Cohomology, Examples) {
  Loaded s("f2.aut");
  auto  cl   = cycle_lattices(s.w, s.block());
  auto  zero = cohomology_test(rp({0, 0}), cl);
  EXPECT_TRUE(zero.cohomologous);
  EXPECT_EQ(zero.constant, Fraction(0));

  auto half = cohomology_test(rp({Fraction(1, 2), Fraction(1, 2)}), cl);
  EXPECT_TRUE(half.cohomologous);
  EXPECT_EQ(half.constant, Fraction(1, 2));

  auto third = cohomology_test(rp({Fraction(1, 3), 0}), s.w, s.block());
  EXPECT_FALSE(third.cohomologous);
  EXPECT_FALSE(third.constant.has_value());
}

// The grid points where C_j(t) reaches lambda are exactly the characters
// trivial on Delta_j.
TEST(LevelSet, NearMaximalPointsAreDualToDelta) {
  for (auto const& name : testing_support::valid_fixtures()) {
    Loaded s(name);
    if (s.w.rank() > 2) {
      continue;  // covered by the dedicated rank-three test below
    }
    for (std::size_t j = 0; j < s.ca.num_maximal(); ++j) {
      auto cl = cycle_lattices(s.w, s.block(j));
      std::size_t M = 16;
      if (cl.delta.full_rank()) {
        M = grid_containing(dual_points(cl.delta), 16);
      }
      auto scan = torus_scan(build_cj(s.a, s.ca, j), s.w, M);
      std::size_t expected = 0;
      for (std::size_t i = 0; i < scan.indices.size(); ++i) {
        RationalPoint t;
        for (auto k : scan.indices[i]) {
          t.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(M));
        }
        bool dual = std::all_of(cl.delta.basis().begin(), cl.delta.basis().end(),
                                [&](auto const& d) {
                                  return pairing(t, d).denominator() == 1;
                                });
        bool near = std::find(scan.near_maximal.begin(), scan.near_maximal.end(),
                              scan.indices[i])
                    != scan.near_maximal.end();
        EXPECT_EQ(dual, near) << name << " point " << i;
        expected += dual;
      }
      if (cl.delta.full_rank()) {
        EXPECT_EQ(static_cast<std::int64_t>(expected), *cl.delta.index());
        EXPECT_TRUE(near_maximal_matches(scan, dual_points(cl.delta))) << name;
      }
    }
  }
}

TEST(LevelSet, RankThree) {
  Loaded s("f3.aut");
  auto  r = analyze_structure(s.a, s.w, {.min_grid = 8});
  ASSERT_EQ(r.maximal.size(), 1U);
  EXPECT_EQ(r.maximal[0].dual.size(), 2U);
  EXPECT_TRUE(r.cross_check_pass());
}

TEST(Parity, KernelOnlyOnEvenSpheres) {
  Loaded s("f2.aut");
  auto  t = count_by_weight(s.a, s.w, 120);
  for (std::size_t n = 1; n <= 120; n += 2) {
    EXPECT_EQ(t.zero_count(n), 0) << n;
  }
  EXPECT_GT(t.zero_count(120), 0);
}

TEST(AnalyzeStructure, FreeGroupFixtures) {
  Loaded s("f2.aut");
  auto  r = analyze_structure(s.a, s.w);
  EXPECT_NEAR(r.components.lambda(), 3.0, 1e-9);
  ASSERT_EQ(r.maximal.size(), 1U);
  EXPECT_EQ(r.maximal[0].period, 1U);
  EXPECT_EQ(r.maximal[0].indices.order, 2);
  EXPECT_EQ(r.period.lcm, 2);
  EXPECT_EQ(r.period.product, 2);
  EXPECT_EQ(r.maximal[0].dual,
            (std::vector<RationalPoint>{rp({0, 0}), rp({Fraction(1, 2), Fraction(1, 2)})}));
  EXPECT_TRUE(r.cross_check_pass());
  EXPECT_EQ(r.maximal[0].scan->grid, 16U);

  Loaded one("f2_nu1.aut");
  auto  r1 = analyze_structure(one.a, one.w);
  EXPECT_EQ(r1.period.lcm, 1);
  EXPECT_EQ(r1.maximal[0].dual, (std::vector<RationalPoint>{rp({0})}));
  EXPECT_TRUE(r1.cross_check_pass());

  Loaded zero("zero_weight.aut");
  EXPECT_THROW(analyze_structure(zero.a, zero.w), ValidationError);
}
