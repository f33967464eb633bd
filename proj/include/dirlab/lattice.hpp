#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "dirlab/approx_functions.hpp"

namespace dirlab {

/// Weight vectors (α, β) for the quasi-norms and the diagonal flow.
class WeightPair {
 public:
  WeightPair(std::vector<double> alpha, std::vector<double> beta);
  static WeightPair uniform(const DimensionParams& dims);

  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& beta() const { return beta_; }
  int m() const { return static_cast<int>(alpha_.size()); }
  int n() const { return static_cast<int>(beta_.size()); }
  DimensionParams dims() const { return DimensionParams(m(), n()); }

  /// max{m α_i, n β_j}
  double omega1() const;
  /// min{m α_i, n β_j}
  double omega2() const;
  double alpha_min() const;
  double alpha_max() const;
  double beta_min() const;
  double beta_max() const;

  /// Exponent of coordinate i under g_s: α_i for i < m, -β_{i-m} after.
  double rate(int i) const { return i < m() ? alpha_[i] : -beta_[i - m()]; }

  friend bool operator==(const WeightPair&, const WeightPair&) = default;

 private:
  std::vector<double> alpha_;
  std::vector<double> beta_;
};

/// max |x_i|^{1/w_i}
double weighted_quasi_norm(const std::vector<double>& x, const std::vector<double>& weights);

/// Matrix of dyadic rationals numerator / 2^bits. Doubles convert exactly.
class DyadicMatrix {
 public:
  DyadicMatrix(int rows, int cols, int bits);
  DyadicMatrix(const Eigen::MatrixXd& a);  // NOLINT: exact, implicit by design

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int bits() const { return bits_; }
  const mpz_class& numerator(int i, int j) const { return num_[i * cols_ + j]; }
  void set_numerator(int i, int j, mpz_class v) { num_[i * cols_ + j] = std::move(v); }
  /// Value as a double (truncated).
  double operator()(int i, int j) const;
  Eigen::MatrixXd to_double() const;
  /// Same values with a finer denominator (bits can only grow).
  DyadicMatrix with_bits(int bits) const;

 private:
  int rows_, cols_, bits_;
  std::vector<mpz_class> num_;
};

/// Half-open/closed interval endpoints for one box coordinate.
struct BoxSide {
  double lo;
  double hi;
  bool lo_closed = false;
  bool hi_closed = false;
};

class Box {
 public:
  explicit Box(std::vector<BoxSide> sides);
  /// Open cube (-h, h)^d.
  static Box cube(int d, double h);

  int dim() const { return static_cast<int>(sides_.size()); }
  const BoxSide& side(int i) const { return sides_[i]; }
  const std::vector<BoxSide>& sides() const { return sides_; }

  struct Membership {
    bool inside = false;
    bool boundary = false;
  };
  /// Open faces test `value < bound - tol`, closed faces `value <= bound + tol`
  /// with tol = 1e-12 max(1, |bound|). A point inside the band of some face
  /// (and not clearly outside another) is flagged as boundary.
  Membership classify(const std::vector<double>& v) const;

 private:
  std::vector<BoxSide> sides_;
};

double boundary_tolerance(double bound);

/// A lattice of rank d = m + n, stored exactly as diag(e^{l_1}, ..., e^{l_d})
/// N / 2^bits with an integer generator matrix N (columns are basis vectors).
///
/// The flow only touches the log-scales l, so arbitrarily long orbits lose no
/// precision; coordinates of lattice vectors are evaluated from exact integers.
class UnimodularLattice {
 public:
  /// Columns of `basis` are the basis vectors; converted exactly.
  static UnimodularLattice from_basis(const Eigen::MatrixXd& basis, const DimensionParams& dims);
  static UnimodularLattice identity(const DimensionParams& dims);
  UnimodularLattice(DimensionParams dims, int bits, std::vector<mpz_class> generator, std::vector<double> log_scale);

  int dim() const { return dims_.d(); }
  const DimensionParams& dims() const { return dims_; }
  int bits() const { return bits_; }
  /// Row-major d×d; entry (i, j) is coordinate i of generator column j.
  const std::vector<mpz_class>& generator() const { return gen_; }
  const std::vector<double>& log_scale() const { return ell_; }
  /// Log-scales at which the generator is known to be well reduced.
  const std::vector<double>& reduced_at() const { return ell_ref_; }

  Eigen::MatrixXd basis() const;
  double det() const;
  /// Coordinates of the vector with integer generator coordinates y (length d).
  std::vector<double> coordinates(const std::vector<mpz_class>& y) const;
  double coordinate(int i, const mpz_class& y) const;
  /// Lattice vector sum_j c_j b_j in basis coefficients.
  std::vector<double> point(const std::vector<long long>& coeffs) const;

  /// Same lattice with the log-scales shifted by `dl`.
  UnimodularLattice scaled(const std::vector<double>& dl) const;
  /// Same lattice and scales, new generator (Y = N U for unimodular U).
  UnimodularLattice with_generator(std::vector<mpz_class> gen, std::vector<double> reduced_at) const;

  /// Row-major basis with 17 significant digits.
  std::string to_string() const;

 private:
  DimensionParams dims_;
  int bits_;
  std::vector<mpz_class> gen_;
  std::vector<double> ell_;
  std::vector<double> ell_ref_;
};

/// Basis [[I_m, A], [0, I_n]].
UnimodularLattice lattice_from_matrix(const DyadicMatrix& A);
/// diag(e^{α s}, e^{-β s}) L. Throws DomainError for |s| > 500.
UnimodularLattice apply_flow(const UnimodularLattice& L, double s, const WeightPair& w);
/// Same lattice with an LLL-reduced generator at its own scales.
UnimodularLattice reduced(const UnimodularLattice& L);

constexpr int kMaxEnumDim = 6;

struct LatticePoint {
  std::vector<mpz_class> coeffs;  // in the lattice's basis
  std::vector<double> coords;
};

struct EnumerationResult {
  std::vector<LatticePoint> points;    // inside under the tolerance policy
  std::vector<LatticePoint> boundary;  // every point within a tolerance band
};

/// All nonzero lattice points in the box. Throws CapExceeded beyond `cap`.
EnumerationResult enumerate_in_box(const UnimodularLattice& L, const Box& box, std::size_t cap);

struct BoxQuery {
  bool found = false;     // some nonzero point inside under the tolerance policy
  bool boundary = false;  // some nonzero point in a tolerance band
};
/// Early-exit existence query.
BoxQuery box_has_point(const UnimodularLattice& L, const Box& box);

/// Coordinates of all nonzero points in the box, one of each ±v pair when
/// the box is symmetric about 0 and `half` is set.
std::vector<std::vector<double>> box_points(const UnimodularLattice& L, const Box& box, std::size_t cap,
                                            bool half = false);

/// min ‖v‖_∞ over nonzero v.
double shortest_sup_norm(const UnimodularLattice& L);
/// -log shortest_sup_norm.
double delta(const UnimodularLattice& L);

}  // namespace dirlab
