// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Character-weighted transfer matrices C_j(t), their spectra, leading
// eigenprojections, torus scans and the curvature of log lambda_j(t).

#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "counting.hpp"

namespace relgrowth {

using ComplexMatrix = Eigen::MatrixXcd;

//! C_j(t)(u, v) = e^{2 pi i <t, f(u, v)>} C_j(u, v).
struct WeightedMatrix {
  ComplexMatrix matrix;
  TorusPoint    t;
  std::size_t   component = 0;
};

inline WeightedMatrix weighted_matrix(Eigen::MatrixXd const&  cj,
                                      EdgeWeighting const&    w,
                                      std::span<double const> t,
                                      std::size_t             component = 0) {
  auto const n = static_cast<Eigen::Index>(w.num_vertices());
  if (cj.rows() != n || cj.cols() != n) {
    throw std::invalid_argument("weighted_matrix: mask is "
                                + std::to_string(cj.rows()) + "x"
                                + std::to_string(cj.cols())
                                + " but the weighting has "
                                + std::to_string(n) + " vertices");
  }
  if (t.size() != w.rank()) {
    throw std::invalid_argument("weighted_matrix: torus point has wrong rank");
  }
  WeightedMatrix m{ComplexMatrix::Zero(n, n), TorusPoint(t.begin(), t.end()),
                   component};
  for (auto const& e : w.edges()) {
    auto const c = cj(e.from, e.to);
    if (c != 0.0) {
      m.matrix(e.from, e.to) = c * character(t, e.weight);
    }
  }
  return m;
}

//! Eigenvalues sorted by decreasing modulus.
inline std::vector<std::complex<double>>
eigenvalues_by_modulus(ComplexMatrix const& m) {
  if (m.size() == 0) {
    return {};
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("complex eigensolver did not converge");
  }
  std::vector<std::complex<double>> ev(es.eigenvalues().begin(),
                                       es.eigenvalues().end());
  std::stable_sort(ev.begin(), ev.end(), [](auto const& a, auto const& b) {
    return std::abs(a) > std::abs(b);
  });
  return ev;
}

inline double spectral_radius(ComplexMatrix const& m) {
  auto ev = eigenvalues_by_modulus(m);
  return ev.empty() ? 0.0 : std::abs(ev.front());
}

inline double spectral_radius(WeightedMatrix const& m) {
  return spectral_radius(m.matrix);
}

//! The p maximal eigenvalues of a weighted matrix with their spectral data.
//! eigenvalues[k] = lambda(t) e^{i phase} e^{2 pi i k / p}, with phase in
//! [0, 2 pi / p).  projections[k] = u v^* / (v^* u) for right and left
//! eigenvectors u, v, and coefficients[k] = <e_* Q_k, 1> (row sum of Q_k at
//! the initial vertex).
struct EigenData {
  std::vector<std::complex<double>> eigenvalues;
  double                            modulus = 0.0;
  double                            phase   = 0.0;
  double                            gap     = 0.0;
  double                            rotation_defect = 0.0;
  std::vector<ComplexMatrix>        projections;
  std::vector<std::complex<double>> coefficients;
};

inline EigenData max_eigendata(WeightedMatrix const& m,
                               std::size_t           p,
                               Vertex                initial,
                               double                gap_threshold = 1e-6) {
  auto const& M = m.matrix;
  auto const  n = static_cast<std::size_t>(M.rows());
  if (p == 0 || p > n) {
    throw std::invalid_argument("max_eigendata: period out of range");
  }
  auto ev = eigenvalues_by_modulus(M);

  EigenData d;
  d.modulus = std::abs(ev[0]);
  d.gap     = d.modulus - (p < n ? std::abs(ev[p]) : 0.0);
  if (d.gap <= gap_threshold) {
    throw NumericalError("degenerate leading eigenvalue: modulus "
                         + std::to_string(d.modulus) + " of eigenvalue "
                         + std::to_string(p) + " collides with modulus "
                         + std::to_string(std::abs(ev[p])));
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      if (std::abs(ev[a] - ev[b]) <= 1e-8 * std::max(1.0, d.modulus)) {
        throw NumericalError("degenerate leading eigenvalue: eigenvalues "
                             + std::to_string(a) + " and " + std::to_string(b)
                             + " coincide (modulus "
                             + std::to_string(std::abs(ev[a])) + ")");
      }
    }
  }

  // Base eigenvalue: smallest argument in [0, 2 pi).
  auto arg01 = [](std::complex<double> z) {
    double a = std::arg(z);
    return a < 0.0 ? a + kTwoPi : a;
  };
  std::size_t base = 0;
  for (std::size_t a = 1; a < p; ++a) {
    if (arg01(ev[a]) < arg01(ev[base])) {
      base = a;
    }
  }
  d.phase = std::fmod(arg01(ev[base]), kTwoPi / static_cast<double>(p));

  std::vector<bool> used(p, false);
  for (std::size_t k = 0; k < p; ++k) {
    auto target = ev[base]
                  * std::polar(1.0, kTwoPi * static_cast<double>(k)
                                        / static_cast<double>(p));
    std::size_t best = p;
    for (std::size_t a = 0; a < p; ++a) {
      if (!used[a]
          && (best == p
              || std::abs(ev[a] - target) < std::abs(ev[best] - target))) {
        best = a;
      }
    }
    used[best] = true;
    d.rotation_defect = std::max(d.rotation_defect, std::abs(ev[best] - target));
    d.eigenvalues.push_back(ev[best]);
  }

  for (auto const& mu : d.eigenvalues) {
    ComplexMatrix shifted = M - mu * ComplexMatrix::Identity(n, n);
    Eigen::JacobiSVD<ComplexMatrix> svd(shifted,
                                        Eigen::ComputeFullU
                                            | Eigen::ComputeFullV);
    Eigen::VectorXcd right = svd.matrixV().col(n - 1);
    Eigen::VectorXcd left  = svd.matrixU().col(n - 1);
    auto             denom = left.dot(right);  // left^* right
    if (std::abs(denom) < 1e-12) {
      throw NumericalError("eigenprojection undefined: left and right "
                           "eigenvectors are orthogonal");
    }
    ComplexMatrix Q = right * left.adjoint() / denom;
    d.coefficients.push_back(Q.row(initial).sum());
    d.projections.push_back(std::move(Q));
  }
  return d;
}

////////////////////////////////////////////////////////////////////////
// Torus scans
////////////////////////////////////////////////////////////////////////

// Distance in R^nu / Z^nu.
inline double torus_distance(std::span<double const> a,
                             std::span<double const> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fmod(std::abs(a[i] - b[i]), 1.0);
    d        = std::min(d, 1.0 - d);
    s += d * d;
  }
  return std::sqrt(s);
}

struct ScanOptions {
  double                  level_tolerance = 1e-6;
  std::vector<TorusPoint> special_points;  // expected near-maximal points
  double                  exclusion       = 0.1;
};

//! Spectral radii of C_j(t) on the uniform grid t = k / M, k in [0, M)^nu,
//! listed in lexicographic order of k.
struct SpectralScan {
  std::size_t                           grid = 0;
  std::size_t                           rank = 0;
  double                                lambda = 0.0;
  std::vector<std::vector<std::size_t>> indices;
  std::vector<double>                   radii;
  double                                max_radius = 0.0;
  // Grid indices with radius > lambda - level_tolerance.
  std::vector<std::vector<std::size_t>> near_maximal;
  // lambda - max radius over grid points at distance >= exclusion from
  // every special point; empty when no special points were supplied or no
  // grid point is that far away.
  std::optional<double> epsilon;

  TorusPoint point(std::size_t i) const {
    TorusPoint t;
    for (auto k : indices[i]) {
      t.push_back(static_cast<double>(k) / static_cast<double>(grid));
    }
    return t;
  }
};

inline SpectralScan torus_scan(Eigen::MatrixXd const& cj,
                               EdgeWeighting const&   w,
                               std::size_t            M,
                               ScanOptions const&     opts = {}) {
  if (M < 8) {
    throw std::invalid_argument("torus_scan: grid size must be >= 8");
  }
  SpectralScan s;
  s.grid = M;
  s.rank = w.rank();
  s.lambda
      = spectral_radius(weighted_matrix(cj, w, TorusPoint(w.rank(), 0.0)));

  std::size_t total = 1;
  for (std::size_t i = 0; i < s.rank; ++i) {
    total *= M;
  }
  double far_max = -1.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<std::size_t> k(s.rank);
    auto                     rem = flat;
    for (std::size_t i = s.rank; i-- > 0;) {
      k[i] = rem % M;
      rem /= M;
    }
    TorusPoint t;
    for (auto ki : k) {
      t.push_back(static_cast<double>(ki) / static_cast<double>(M));
    }
    double r = spectral_radius(weighted_matrix(cj, w, t));
    s.max_radius = std::max(s.max_radius, r);
    if (r > s.lambda - opts.level_tolerance) {
      s.near_maximal.push_back(k);
    }
    if (!opts.special_points.empty()) {
      bool far = std::all_of(
          opts.special_points.begin(), opts.special_points.end(),
          [&](auto const& sp) { return torus_distance(t, sp) >= opts.exclusion; });
      if (far) {
        far_max = std::max(far_max, r);
      }
    }
    s.indices.push_back(std::move(k));
    s.radii.push_back(r);
  }
  if (far_max >= 0.0) {
    s.epsilon = s.lambda - far_max;
  }
  return s;
}

////////////////////////////////////////////////////////////////////////
// Curvature of log lambda_j(t)
////////////////////////////////////////////////////////////////////////

struct HessianResult {
  Eigen::MatrixXd hessian;         // Richardson combination of the two below
  Eigen::MatrixXd hessian_coarse;  // step h
  Eigen::MatrixXd hessian_fine;    // step h / 2
  double          disagreement = 0.0;  // max |coarse - fine|
  bool            flagged      = false;
  double          log_lambda_at_t0 = 0.0;
  std::vector<std::pair<TorusPoint, double>> stencil;  // (t, lambda_j(t))
};

//! Central-difference Hessian of t -> log |leading eigenvalue of C_j(t)| at
//! t0, refined by Richardson extrapolation from steps h and h/2.  Throws
//! NumericalError if a stencil point loses the gap between the p maximal
//! eigenvalues and the rest of the spectrum.
inline HessianResult lambda_curve_and_hessian(Eigen::MatrixXd const&  cj,
                                              EdgeWeighting const&    w,
                                              std::span<double const> t0,
                                              std::size_t             period,
                                              double                  h = 1e-3,
                                              double gap_threshold = 1e-6) {
  auto const nu = w.rank();
  if (t0.size() != nu) {
    throw std::invalid_argument("lambda_curve_and_hessian: wrong rank");
  }
  HessianResult res;
  auto log_lambda = [&](TorusPoint const& t) {
    auto ev = eigenvalues_by_modulus(weighted_matrix(cj, w, t).matrix);
    double top  = std::abs(ev.at(0));
    double rest = period < ev.size() ? std::abs(ev[period]) : 0.0;
    if (top - rest <= gap_threshold) {
      throw NumericalError(
          "stencil leaves the perturbation regime: spectral gap collapses");
    }
    res.stencil.emplace_back(t, top);
    return std::log(top);
  };
  TorusPoint base(t0.begin(), t0.end());
  double     g0 = log_lambda(base);
  res.log_lambda_at_t0 = g0;

  auto shifted = [&](std::size_t i, double di, std::size_t j, double dj) {
    TorusPoint t = base;
    t[i] += di;
    t[j] += dj;
    return log_lambda(t);
  };
  auto hessian_at = [&](double step) {
    Eigen::MatrixXd H(nu, nu);
    for (std::size_t i = 0; i < nu; ++i) {
      H(i, i) = (shifted(i, step, i, 0.0) - 2.0 * g0 + shifted(i, -step, i, 0.0))
                / (step * step);
      for (std::size_t j = i + 1; j < nu; ++j) {
        H(i, j) = (shifted(i, step, j, step) - shifted(i, step, j, -step)
                   - shifted(i, -step, j, step) + shifted(i, -step, j, -step))
                  / (4.0 * step * step);
        H(j, i) = H(i, j);
      }
    }
    return H;
  };
  res.hessian_coarse = hessian_at(h);
  res.hessian_fine   = hessian_at(h / 2.0);
  res.hessian        = (4.0 * res.hessian_fine - res.hessian_coarse) / 3.0;
  res.disagreement
      = (res.hessian_coarse - res.hessian_fine).cwiseAbs().maxCoeff();
  res.flagged = res.disagreement > 1e-3;
  return res;
}

}  // namespace relgrowth
