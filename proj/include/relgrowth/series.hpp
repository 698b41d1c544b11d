// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Sequence diagnostics: exact linear-recurrence mining, power-corrected
// exponential fits, density decay and the purely-exponential bracket.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace relgrowth {

//! a_n = sum_{i=1}^{order} coefficients[i-1] a_{n-i} for all n >= order.
struct RecurrenceResult {
  bool                     found = false;
  std::size_t              order = 0;  // linear complexity of the input
  std::vector<BigRational> coefficients;
  std::size_t              verified_horizon = 0;
};

//! Shortest linear recurrence with constant rational coefficients satisfied
//! by the whole sequence (Berlekamp-Massey over Q), followed by an exact
//! verification pass.  found is true iff that order is <= max_order.
inline RecurrenceResult min_recurrence(std::span<BigInt const> seq,
                                       std::size_t             max_order) {
  if (seq.size() < 2 * max_order + 4) {
    throw std::invalid_argument("min_recurrence: need at least "
                                + std::to_string(2 * max_order + 4)
                                + " terms for max order "
                                + std::to_string(max_order) + ", got "
                                + std::to_string(seq.size()));
  }
  std::vector<BigRational> C{BigRational(1)}, B{BigRational(1)};
  std::size_t              L = 0, m = 1;
  BigRational              b = 1;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    BigRational d = seq[n];
    for (std::size_t i = 1; i <= L && i < C.size(); ++i) {
      d += C[i] * seq[n - i];
    }
    if (d == 0) {
      ++m;
      continue;
    }
    auto coef = d / b;
    auto T    = C;
    if (C.size() < B.size() + m) {
      C.resize(B.size() + m, BigRational(0));
    }
    for (std::size_t i = 0; i < B.size(); ++i) {
      C[i + m] -= coef * B[i];
    }
    if (2 * L <= n) {
      L = n + 1 - L;
      B = std::move(T);
      b = d;
      m = 1;
    } else {
      ++m;
    }
  }
  C.resize(L + 1, BigRational(0));

  RecurrenceResult r;
  r.order = L;
  if (L > max_order) {
    return r;
  }
  for (std::size_t i = 1; i <= L; ++i) {
    r.coefficients.push_back(-C[i]);
  }
  for (std::size_t n = L; n < seq.size(); ++n) {
    BigRational s = 0;
    for (std::size_t i = 1; i <= L; ++i) {
      s += r.coefficients[i - 1] * seq[n - i];
    }
    if (s != BigRational(seq[n])) {
      throw std::logic_error("min_recurrence: verification pass failed");
    }
  }
  r.found            = true;
  r.verified_horizon = seq.size() - L;
  return r;
}

//! Least-squares line through (log n, log a_n - n log lambda) for n = D k in
//! [n0, n1].  slope estimates -nu/2 and constant = exp(intercept) estimates
//! the leading constant.
struct FitResult {
  std::size_t         step = 0;
  std::size_t         n0 = 0, n1 = 0;
  double              slope     = 0.0;
  double              intercept = 0.0;
  double              constant  = 0.0;
  double              residual  = 0.0;
  std::vector<double> log_n, log_scaled;
};

inline FitResult asymptotic_fit(std::span<BigInt const> seq,
                                double                  lambda,
                                std::size_t             step,
                                std::size_t             n0,
                                std::size_t             n1) {
  if (step == 0) {
    throw std::invalid_argument("asymptotic_fit: step D must be >= 1");
  }
  FitResult f;
  f.step = step;
  f.n0   = n0;
  f.n1   = n1;
  double const log_lambda = std::log(lambda);
  for (std::size_t n = ((std::max<std::size_t>(n0, 1) + step - 1) / step) * step;
       n <= n1; n += step) {
    if (n >= seq.size()) {
      throw std::invalid_argument("asymptotic_fit: window end "
                                  + std::to_string(n1)
                                  + " beyond the sequence");
    }
    if (seq[n] <= 0) {
      throw std::invalid_argument("asymptotic_fit: nonpositive term at n = "
                                  + std::to_string(n));
    }
    f.log_n.push_back(std::log(static_cast<double>(n)));
    f.log_scaled.push_back(log_abs(seq[n]) - static_cast<double>(n) * log_lambda);
  }
  auto const k = f.log_n.size();
  if (k < 8) {
    throw std::invalid_argument("asymptotic_fit: window has "
                                + std::to_string(k)
                                + " points, need at least 8");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += f.log_n[i];
    my += f.log_scaled[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (f.log_n[i] - mx) * (f.log_scaled[i] - my);
    sxx += (f.log_n[i] - mx) * (f.log_n[i] - mx);
  }
  f.slope     = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.constant  = std::exp(f.intercept);
  for (std::size_t i = 0; i < k; ++i) {
    f.residual = std::max(
        f.residual,
        std::abs(f.log_scaled[i] - (f.intercept + f.slope * f.log_n[i])));
  }
  return f;
}

//! r(n) = rel(n) / tot(n).  The range 1..N-1 is cut into two equal windows
//! at its end; the sequence is judged to decay when the mean of r over the
//! last window is below half its mean over the window before.
struct DensityResult {
  std::vector<double> ratios;
  double              last_window_mean    = 0.0;
  double              earlier_window_mean = 0.0;
  bool                decays              = false;

  std::string verdict() const {
    return decays ? "decays" : "no decay";
  }
};

inline DensityResult density_ratio(std::span<BigInt const> rel,
                                   std::span<BigInt const> tot) {
  if (rel.size() != tot.size()) {
    throw std::invalid_argument("density_ratio: length mismatch");
  }
  DensityResult d;
  for (std::size_t n = 0; n < tot.size(); ++n) {
    if (tot[n] <= 0) {
      throw std::invalid_argument("density_ratio: nonpositive total at n = "
                                  + std::to_string(n));
    }
    d.ratios.push_back(ratio(rel[n], tot[n]));
  }
  auto const N = d.ratios.size();
  auto const W = N > 1 ? (N - 1) / 2 : 0;
  if (W == 0) {
    return d;
  }
  for (std::size_t n = N - W; n < N; ++n) {
    d.last_window_mean += d.ratios[n];
  }
  for (std::size_t n = N - 2 * W; n < N - W; ++n) {
    d.earlier_window_mean += d.ratios[n];
  }
  d.last_window_mean /= static_cast<double>(W);
  d.earlier_window_mean /= static_cast<double>(W);
  d.decays = d.last_window_mean < 0.5 * d.earlier_window_mean;
  return d;
}

//! Bracket [lower, upper] of tot(n) / lambda^n over n = first, first + step,
//! ...  stable when the relative spread of the last 20 sampled values is
//! below 1%.
struct CoornaertBracket {
  double lower  = 0.0;
  double upper  = 0.0;
  double spread = 0.0;
  bool   stable = false;
};

inline CoornaertBracket coornaert_check(std::span<BigInt const> tot,
                                        double                  lambda,
                                        std::size_t             step  = 1,
                                        std::size_t             first = 1) {
  if (step == 0) {
    throw std::invalid_argument("coornaert_check: step must be >= 1");
  }
  std::vector<double> v;
  double const        log_lambda = std::log(lambda);
  for (std::size_t n = first; n < tot.size(); n += step) {
    v.push_back(tot[n] == 0 ? 0.0
                            : std::exp(log_abs(tot[n])
                                       - static_cast<double>(n) * log_lambda));
  }
  if (v.size() < 20) {
    throw std::invalid_argument("coornaert_check: need at least 20 terms");
  }
  CoornaertBracket c;
  c.lower   = *std::min_element(v.begin(), v.end());
  c.upper   = *std::max_element(v.begin(), v.end());
  auto tail = std::span<double const>(v).last(20);
  auto lo   = *std::min_element(tail.begin(), tail.end());
  auto hi   = *std::max_element(tail.begin(), tail.end());
  c.spread  = hi > 0.0 ? (hi - lo) / hi : 0.0;
  c.stable  = c.spread < 0.01;
  return c;
}

}  // namespace relgrowth
