#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "dirlab/lattice.hpp"
#include "dirlab/rng.hpp"

namespace testutil {

// Random real shears times a det-1 diagonal.
inline Eigen::MatrixXd random_unimodular_basis(dirlab::Substream& rng, int d, double shear = 1.0, double spread = 1.0) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(d, d);
  for (int k = 0; k < 2 * d; ++k) {
    const int i = static_cast<int>(rng.uniform() * d);
    int j = static_cast<int>(rng.uniform() * (d - 1));
    if (j >= i) ++j;
    Eigen::MatrixXd E = Eigen::MatrixXd::Identity(d, d);
    E(i, j) = rng.uniform(-shear, shear);
    B = E * B;
  }
  std::vector<double> l(d);
  double mean = 0.0;
  for (auto& x : l) {
    x = rng.uniform(-spread, spread);
    mean += x / d;
  }
  for (int i = 0; i < d; ++i) B.row(i) *= std::exp(l[i] - mean);
  return B;
}

// Visit every integer coefficient vector c with B c possibly inside the box
// centered at `center` with half-widths `half` (sup-norm bound through B^{-1}).
inline void brute_force_box(const Eigen::MatrixXd& B, const std::vector<double>& center, const std::vector<double>& half,
                            const std::function<void(const Eigen::VectorXd&, const std::vector<long long>&)>& visit) {
  const int d = static_cast<int>(B.rows());
  const Eigen::MatrixXd Bi = B.inverse();
  std::vector<long long> lo(d), hi(d), c(d);
  for (int i = 0; i < d; ++i) {
    double mid = 0.0, rad = 0.0;
    for (int j = 0; j < d; ++j) {
      mid += Bi(i, j) * center[j];
      rad += std::abs(Bi(i, j)) * half[j];
    }
    lo[i] = static_cast<long long>(std::floor(mid - rad - 1));
    hi[i] = static_cast<long long>(std::ceil(mid + rad + 1));
  }
  c = lo;
  while (true) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = static_cast<double>(c[i]);
    visit(B * x, c);
    int k = 0;
    while (k < d && ++c[k] > hi[k]) {
      c[k] = lo[k];
      ++k;
    }
    if (k == d) break;
  }
}

// min sup norm of B c over nonzero integer c, by brute force.
inline double brute_force_shortest(const Eigen::MatrixXd& B) {
  const int d = static_cast<int>(B.rows());
  double best = 1e300;
  for (int j = 0; j < d; ++j) best = std::min(best, B.col(j).cwiseAbs().maxCoeff());
  best = std::min(best, 1.0);
  brute_force_box(B, std::vector<double>(d, 0.0), std::vector<double>(d, best), [&](const Eigen::VectorXd& v, const std::vector<long long>& c) {
    bool zero = true;
    for (auto x : c) zero = zero && x == 0;
    if (!zero) best = std::min(best, v.cwiseAbs().maxCoeff());
  });
  return best;
}

}  // namespace testutil
