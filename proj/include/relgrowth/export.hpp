// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// CSV and plain-text writers.  Floating-point values carry 12 significant
// digits; integers are printed exactly.

#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "counting.hpp"
#include "oracle.hpp"
#include "series.hpp"
#include "spectral.hpp"

namespace relgrowth {

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace detail {

  inline void weight_header(std::ostream& os, std::size_t nu) {
    for (std::size_t i = 1; i <= nu; ++i) {
      os << ",w" << i;
    }
  }

  inline void weight_cells(std::ostream& os, Weight const& w) {
    for (auto x : w) {
      os << ',' << x;
    }
  }

}  // namespace detail

// Rows (n, w1..w_nu, count).
inline void write_count_table_csv(std::ostream& os, CountTable const& t) {
  os << 'n';
  detail::weight_header(os, t.rank());
  os << ",count\n";
  for (std::size_t n = 0; n <= t.n_max(); ++n) {
    for (auto const& [w, c] : t.layer(n)) {
      os << n;
      detail::weight_cells(os, w);
      os << ',' << c << '\n';
    }
  }
}

// Rows (n, total, zero_weight_count, ratio).
inline void write_growth_csv(std::ostream& os, GrowthSequences const& g) {
  os << "n,total,zero_weight_count,ratio\n";
  for (std::size_t n = 0; n < g.totals.size(); ++n) {
    os << n << ',' << g.totals[n] << ',' << g.relative[n] << ','
       << format_double(ratio(g.relative[n], g.totals[n])) << '\n';
  }
}

// Same, with an extra target_count column for a nonzero target weight.
inline void write_growth_csv(std::ostream&           os,
                             GrowthSequences const&  zero,
                             std::vector<BigInt> const& target) {
  os << "n,total,zero_weight_count,ratio,target_count\n";
  for (std::size_t n = 0; n < zero.totals.size(); ++n) {
    os << n << ',' << zero.totals[n] << ',' << zero.relative[n] << ','
       << format_double(ratio(zero.relative[n], zero.totals[n])) << ','
       << target.at(n) << '\n';
  }
}

inline void write_oracle_csv(std::ostream& os, OracleBall const& ball) {
  os << 'n';
  detail::weight_header(os, ball.nu);
  os << ",count\n";
  for (std::size_t n = 0; n < ball.layers.size(); ++n) {
    for (auto const& [w, c] : ball.layers[n]) {
      os << n;
      detail::weight_cells(os, w);
      os << ',' << c << '\n';
    }
  }
}

// Rows (t1..t_nu, radius_1..radius_m); all scans must share grid and rank.
inline void write_scan_csv(std::ostream& os,
                           std::span<SpectralScan const> scans) {
  if (scans.empty()) {
    return;
  }
  auto const nu = scans.front().rank;
  for (std::size_t i = 1; i <= nu; ++i) {
    os << (i > 1 ? "," : "") << 't' << i;
  }
  for (std::size_t j = 1; j <= scans.size(); ++j) {
    os << ",radius_" << j;
  }
  os << '\n';
  for (std::size_t p = 0; p < scans.front().radii.size(); ++p) {
    auto t = scans.front().point(p);
    for (std::size_t i = 0; i < nu; ++i) {
      os << (i ? "," : "") << format_double(t[i]);
    }
    for (auto const& s : scans) {
      os << ',' << format_double(s.radii.at(p));
    }
    os << '\n';
  }
}

// gnuplot-ready: log n, log(a_n lambda^-n).
inline void write_fit_data(std::ostream& os, FitResult const& f) {
  os << "# log_n log_scaled_count\n";
  for (std::size_t i = 0; i < f.log_n.size(); ++i) {
    os << format_double(f.log_n[i]) << ' ' << format_double(f.log_scaled[i])
       << '\n';
  }
}

}  // namespace relgrowth
