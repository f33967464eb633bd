#include "dirlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dirlab/errors.hpp"
#include "reduction.hpp"

namespace dirlab {

WeightPair::WeightPair(std::vector<double> alpha, std::vector<double> beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  auto check = [](const std::vector<double>& w, const char* name) {
    if (w.empty()) throw ValidationError(std::string("weights: ") + name + " is empty");
    double sum = 0.0;
    for (double x : w) {
      if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(std::string("weights: ") + name + " entries must be positive");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ValidationError(std::string("weights: ") + name + " must sum to 1");
  };
  check(alpha_, "alpha");
  check(beta_, "beta");
}

WeightPair WeightPair::uniform(const DimensionParams& dims) {
  return WeightPair(std::vector<double>(dims.m(), 1.0 / dims.m()), std::vector<double>(dims.n(), 1.0 / dims.n()));
}

double WeightPair::omega1() const {
  double w = 0.0;
  for (double a : alpha_) w = std::max(w, m() * a);
  for (double b : beta_) w = std::max(w, n() * b);
  return w;
}

double WeightPair::omega2() const {
  double w = std::numeric_limits<double>::infinity();
  for (double a : alpha_) w = std::min(w, m() * a);
  for (double b : beta_) w = std::min(w, n() * b);
  return w;
}

double WeightPair::alpha_min() const { return *std::min_element(alpha_.begin(), alpha_.end()); }
double WeightPair::alpha_max() const { return *std::max_element(alpha_.begin(), alpha_.end()); }
double WeightPair::beta_min() const { return *std::min_element(beta_.begin(), beta_.end()); }
double WeightPair::beta_max() const { return *std::max_element(beta_.begin(), beta_.end()); }

double weighted_quasi_norm(const std::vector<double>& x, const std::vector<double>& weights) {
  if (x.size() != weights.size()) throw ValidationError("weighted_quasi_norm: size mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(weights[i] > 0.0)) throw ValidationError("weighted_quasi_norm: weights must be positive");
    out = std::max(out, std::pow(std::abs(x[i]), 1.0 / weights[i]));
  }
  return out;
}

// ---------------------------------------------------------------- dyadic

namespace {

// Smallest k >= 0 with x 2^k an integer, or -(something) for large integers.
int exact_bits(double x) {
  if (x == 0.0) return 0;
  int e;
  const double f = std::frexp(x, &e);
  auto mant = static_cast<long long>(std::ldexp(std::abs(f), 53));
  const int tz = __builtin_ctzll(static_cast<unsigned long long>(mant));
  return 53 - tz - e;
}

mpz_class scaled_integer(double x, int bits) {
  if (x == 0.0) return 0;
  int e;
  const double f = std::frexp(x, &e);
  mpz_class m(std::ldexp(f, 53));
  const int shift = bits + e - 53;
  if (shift >= 0) {
    mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), shift);
  } else {
    mpz_tdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), -shift);
  }
  return m;
}

constexpr int kMaxBits = 1100;

}  // namespace

DyadicMatrix::DyadicMatrix(int rows, int cols, int bits)
    : rows_(rows), cols_(cols), bits_(bits), num_(static_cast<std::size_t>(rows) * cols) {
  if (rows < 1 || cols < 1 || bits < 0) throw ValidationError("DyadicMatrix: bad shape");
}

DyadicMatrix::DyadicMatrix(const Eigen::MatrixXd& a)
    : rows_(static_cast<int>(a.rows())), cols_(static_cast<int>(a.cols())), bits_(0) {
  if (rows_ < 1 || cols_ < 1) throw ValidationError("DyadicMatrix: empty matrix");
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) {
      if (!std::isfinite(a(i, j))) throw ValidationError("matrix entries must be finite");
      bits_ = std::max(bits_, exact_bits(a(i, j)));
    }
  if (bits_ > kMaxBits) throw ValidationError("matrix entry too small to represent exactly");
  num_.resize(static_cast<std::size_t>(rows_) * cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) num_[i * cols_ + j] = scaled_integer(a(i, j), bits_);
}

double DyadicMatrix::operator()(int i, int j) const { return detail::eval_coord(numerator(i, j), 1.0, bits_); }

Eigen::MatrixXd DyadicMatrix::to_double() const {
  Eigen::MatrixXd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
  return out;
}

DyadicMatrix DyadicMatrix::with_bits(int bits) const {
  if (bits < bits_) throw ValidationError("DyadicMatrix: cannot reduce precision");
  DyadicMatrix out(rows_, cols_, bits);
  for (std::size_t k = 0; k < num_.size(); ++k) mpz_mul_2exp(out.num_[k].get_mpz_t(), num_[k].get_mpz_t(), bits - bits_);
  return out;
}

// ---------------------------------------------------------------- box

double boundary_tolerance(double bound) { return 1e-12 * std::max(1.0, std::abs(bound)); }

Box::Box(std::vector<BoxSide> sides) : sides_(std::move(sides)) {
  if (sides_.empty()) throw ValidationError("box: no coordinates");
  for (const auto& s : sides_)
    if (!(s.lo < s.hi) || !std::isfinite(s.lo) || !std::isfinite(s.hi))
      throw ValidationError("box: every side needs finite lo < hi");
}

Box Box::cube(int d, double h) { return Box(std::vector<BoxSide>(d, BoxSide{-h, h, false, false})); }

Box::Membership Box::classify(const std::vector<double>& v) const {
  Membership out{true, false};
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    const BoxSide& s = sides_[i];
    const double tl = boundary_tolerance(s.lo), th = boundary_tolerance(s.hi);
    const double dl = v[i] - s.lo, dh = s.hi - v[i];
    if (dl < -tl || dh < -th) return Membership{false, false};
    if (std::abs(dl) <= tl) {
      out.boundary = true;
      if (!s.lo_closed) out.inside = false;
    }
    if (std::abs(dh) <= th) {
      out.boundary = true;
      if (!s.hi_closed) out.inside = false;
    }
  }
  return out;
}

// ---------------------------------------------------------------- lattice

UnimodularLattice::UnimodularLattice(DimensionParams dims, int bits, std::vector<mpz_class> generator,
                                     std::vector<double> log_scale)
    : dims_(dims), bits_(bits), gen_(std::move(generator)), ell_(std::move(log_scale)) {
  const std::size_t d = dims_.d();
  if (gen_.size() != d * d || ell_.size() != d) throw ValidationError("lattice: generator shape mismatch");
  ell_ref_.assign(d, 0.0);
}

UnimodularLattice UnimodularLattice::from_basis(const Eigen::MatrixXd& basis, const DimensionParams& dims) {
  const int d = dims.d();
  if (basis.rows() != d || basis.cols() != d) throw ValidationError("lattice: basis must be d x d");
  const DyadicMatrix q(basis);
  std::vector<mpz_class> gen(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gen[i * d + j] = q.numerator(i, j);
  UnimodularLattice L(dims, q.bits(), std::move(gen), std::vector<double>(d, 0.0));
  const double det = L.det();
  if (!(std::abs(std::abs(det) - 1.0) <= 1e-9)) throw ValidationError("lattice: |det(basis)| must be 1 within 1e-9");
  return L;
}

UnimodularLattice UnimodularLattice::identity(const DimensionParams& dims) {
  const int d = dims.d();
  std::vector<mpz_class> gen(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) gen[i * d + i] = 1;
  return UnimodularLattice(dims, 0, std::move(gen), std::vector<double>(d, 0.0));
}

double UnimodularLattice::coordinate(int i, const mpz_class& y) const {
  return detail::eval_coord(y, std::exp(ell_[i]), bits_);
}

std::vector<double> UnimodularLattice::coordinates(const std::vector<mpz_class>& y) const {
  const int d = dim();
  std::vector<double> out(d);
  for (int i = 0; i < d; ++i) out[i] = coordinate(i, y[i]);
  return out;
}

std::vector<double> UnimodularLattice::point(const std::vector<long long>& coeffs) const {
  const int d = dim();
  if (static_cast<int>(coeffs.size()) != d) throw ValidationError("lattice: coefficient vector has wrong length");
  std::vector<mpz_class> y(d);
  mpz_class c;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      c = static_cast<long>(coeffs[j]);
      y[i] += gen_[i * d + j] * c;
    }
  return coordinates(y);
}

Eigen::MatrixXd UnimodularLattice::basis() const {
  const int d = dim();
  Eigen::MatrixXd B(d, d);
  for (int i = 0; i < d; ++i) {
    const double sc = std::exp(ell_[i]);
    for (int j = 0; j < d; ++j) B(i, j) = detail::eval_coord(gen_[i * d + j], sc, bits_);
  }
  return B;
}

double UnimodularLattice::det() const {
  // fraction-free Gaussian elimination (Bareiss)
  const int d = dim();
  std::vector<mpz_class> M = gen_;
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k < d - 1; ++k) {
    if (M[k * d + k] == 0) {
      int p = k + 1;
      while (p < d && M[p * d + k] == 0) ++p;
      if (p == d) return 0.0;
      for (int j = 0; j < d; ++j) std::swap(M[k * d + j], M[p * d + j]);
      sign = -sign;
    }
    for (int i = k + 1; i < d; ++i)
      for (int j = k + 1; j < d; ++j) {
        M[i * d + j] = M[i * d + j] * M[k * d + k] - M[i * d + k] * M[k * d + j];
        mpz_divexact(M[i * d + j].get_mpz_t(), M[i * d + j].get_mpz_t(), prev.get_mpz_t());
      }
    prev = M[k * d + k];
  }
  const mpz_class& det = M[(d - 1) * d + (d - 1)];
  if (det == 0) return 0.0;
  long e;
  const double m = mpz_get_d_2exp(&e, det.get_mpz_t());
  const double lsum = std::accumulate(ell_.begin(), ell_.end(), 0.0);
  return sign * std::ldexp(m * std::exp(lsum), static_cast<int>(e) - bits_ * d);
}

UnimodularLattice UnimodularLattice::scaled(const std::vector<double>& dl) const {
  UnimodularLattice out = *this;
  for (int i = 0; i < dim(); ++i) {
    out.ell_[i] += dl[i];
    if (!(std::abs(out.ell_[i]) <= 700.0)) throw DomainError("lattice: coordinate scale overflow (|log scale| > 700)");
  }
  return out;
}

UnimodularLattice UnimodularLattice::with_generator(std::vector<mpz_class> gen, std::vector<double> reduced_at) const {
  UnimodularLattice out = *this;
  out.gen_ = std::move(gen);
  out.ell_ref_ = std::move(reduced_at);
  return out;
}

std::string UnimodularLattice::to_string() const {
  const Eigen::MatrixXd B = basis();
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < B.rows(); ++i) {
    if (i) os << "; ";
    for (int j = 0; j < B.cols(); ++j) os << (j ? " " : "") << B(i, j);
  }
  return os.str();
}

UnimodularLattice lattice_from_matrix(const DyadicMatrix& A) {
  const int m = A.rows(), n = A.cols(), d = m + n;
  std::vector<mpz_class> gen(static_cast<std::size_t>(d) * d);
  mpz_class one;
  mpz_ui_pow_ui(one.get_mpz_t(), 2, A.bits());
  for (int i = 0; i < d; ++i) gen[i * d + i] = one;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) gen[i * d + m + j] = A.numerator(i, j);
  return UnimodularLattice(DimensionParams(m, n), A.bits(), std::move(gen), std::vector<double>(d, 0.0));
}

UnimodularLattice apply_flow(const UnimodularLattice& L, double s, const WeightPair& w) {
  if (!(std::abs(s) <= 500.0)) throw DomainError("apply_flow: |s| > 500");
  if (w.m() != L.dims().m() || w.n() != L.dims().n()) throw ValidationError("apply_flow: weights do not match (m, n)");
  std::vector<double> dl(L.dim());
  for (int i = 0; i < L.dim(); ++i) dl[i] = w.rate(i) * s;
  return L.scaled(dl);
}

UnimodularLattice reduced(const UnimodularLattice& L) {
  detail::Reduction r = detail::reduce_progressive(L, {});
  return L.with_generator(std::move(r.Y), L.log_scale());
}

// ---------------------------------------------------------------- reduction

namespace detail {

double eval_coord(const mpz_class& y, double scale, int bits) {
  if (sgn(y) == 0) return 0.0;
  long e;
  const double m = mpz_get_d_2exp(&e, y.get_mpz_t());
  return std::ldexp(m * scale, static_cast<int>(e) - bits);
}

namespace {

class Lll {
 public:
  Lll(Reduction& r, const std::vector<double>& scale) : r_(r), sc_(scale), d_(r.d) {
    bstar_.assign(static_cast<std::size_t>(d_) * d_, 0.0);
    bn_.assign(d_, 0.0);
  }

  void run() {
    for (int j = 0; j < d_; ++j) eval(j);
    if (d_ < 2) return;
    gso(0);
    int k = 1;
    long iter = 0;
    const long cap = 100000L * d_ * d_;
    while (k < d_) {
      if (++iter > cap) throw NumericalError("lattice reduction did not converge");
      size_reduce(k);
      gso(k);
      const double mu = dot_star(k, k - 1) / bn_[k - 1];
      if (bn_[k] >= (0.99 - mu * mu) * bn_[k - 1]) {
        ++k;
      } else {
        swap_cols(k, k - 1);
        gso(k - 1);
        k = std::max(k - 1, 1);
        if (k == 1) gso(0);
      }
    }
  }

 private:
  double& b(int i, int j) { return r_.b[j * d_ + i]; }
  double& bs(int i, int j) { return bstar_[j * d_ + i]; }

  void eval(int j) {
    for (int i = 0; i < d_; ++i) b(i, j) = eval_coord(r_.Y[i * d_ + j], sc_[i], r_.bits);
  }

  double dot_star(int k, int j) {
    double s = 0.0;
    for (int i = 0; i < d_; ++i) s += b(i, k) * bs(i, j);
    return s;
  }

  void gso(int k) {
    for (int i = 0; i < d_; ++i) bs(i, k) = b(i, k);
    for (int j = 0; j < k; ++j) {
      const double mu = dot_star(k, j) / bn_[j];
      for (int i = 0; i < d_; ++i) bs(i, k) -= mu * bs(i, j);
    }
    double n = 0.0;
    for (int i = 0; i < d_; ++i) n += bs(i, k) * bs(i, k);
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("lattice reduction lost precision (degenerate basis)");
    bn_[k] = n;
  }

  void size_reduce(int k) {
    for (int pass = 0;; ++pass) {
      if (pass > 100) throw NumericalError("size reduction did not converge");
      bool changed = false;
      for (int j = k - 1; j >= 0; --j) {
        const double mu = dot_star(k, j) / bn_[j];
        if (!std::isfinite(mu)) throw NumericalError("lattice reduction lost precision");
        if (std::abs(mu) <= 0.501) continue;
        q_ = std::rint(mu);
        for (int i = 0; i < d_; ++i) {
          mpz_submul(r_.Y[i * d_ + k].get_mpz_t(), q_.get_mpz_t(), r_.Y[i * d_ + j].get_mpz_t());
          mpz_submul(r_.U[i * d_ + k].get_mpz_t(), q_.get_mpz_t(), r_.U[i * d_ + j].get_mpz_t());
        }
        eval(k);
        changed = true;
      }
      if (!changed) return;
    }
  }

  void swap_cols(int a, int c) {
    for (int i = 0; i < d_; ++i) {
      std::swap(r_.Y[i * d_ + a], r_.Y[i * d_ + c]);
      std::swap(r_.U[i * d_ + a], r_.U[i * d_ + c]);
      std::swap(b(i, a), b(i, c));
    }
  }

  Reduction& r_;
  const std::vector<double>& sc_;
  int d_;
  std::vector<double> bstar_;
  std::vector<double> bn_;
  mpz_class q_;
};

}  // namespace

Reduction reduce_progressive(const UnimodularLattice& L, const std::vector<double>& extra) {
  const int d = L.dim();
  Reduction r;
  r.d = d;
  r.bits = L.bits();
  r.Y = L.generator();
  r.U.assign(static_cast<std::size_t>(d) * d, 0);
  for (int i = 0; i < d; ++i) r.U[i * d + i] = 1;
  r.b.assign(static_cast<std::size_t>(d) * d, 0.0);

  std::vector<double> target = L.log_scale();
  if (!extra.empty())
    for (int i = 0; i < d; ++i) target[i] += extra[i];
  const std::vector<double>& start = L.reduced_at();
  double span = 0.0;
  for (int i = 0; i < d; ++i) span = std::max(span, std::abs(target[i] - start[i]));
  const int steps = std::max(1, static_cast<int>(std::ceil(span / 1.5)));
  std::vector<double> sc(d);
  for (int step = 1; step <= steps; ++step) {
    const double f = static_cast<double>(step) / steps;
    for (int i = 0; i < d; ++i) sc[i] = std::exp(start[i] + (target[i] - start[i]) * f);
    Lll(r, sc).run();
  }
  r.ell = target;
  return r;
}

Enumerator::Enumerator(const Reduction& red, std::vector<double> center, std::vector<double> half, bool half_space)
    : d_(red.d), half_space_(half_space), c_(std::move(center)), h_(std::move(half)) {
  const int d = d_;
  std::vector<double> bs(static_cast<std::size_t>(d) * d);
  Q_.assign(static_cast<std::size_t>(d) * d, 0.0);
  T_.assign(static_cast<std::size_t>(d) * d, 0.0);
  auto b = [&](int i, int j) { return red.b[j * d + i]; };
  // modified Gram-Schmidt
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) bs[i * d + k] = b(i, k);
    for (int j = 0; j < k; ++j) {
      double t = 0.0;
      for (int i = 0; i < d; ++i) t += Q_[i * d + j] * bs[i * d + k];
      for (int i = 0; i < d; ++i) bs[i * d + k] -= t * Q_[i * d + j];
    }
    double n = 0.0;
    for (int i = 0; i < d; ++i) n += bs[i * d + k] * bs[i * d + k];
    n = std::sqrt(n);
    if (!(n > 0.0)) throw NumericalError("enumeration: degenerate basis");
    for (int i = 0; i < d; ++i) Q_[i * d + k] = bs[i * d + k] / n;
  }
  for (int k = 0; k < d; ++k)
    for (int j = k; j < d; ++j) {
      double t = 0.0;
      for (int i = 0; i < d; ++i) t += Q_[i * d + k] * b(i, j);
      T_[k * d + j] = t;
    }
  z_.assign(d, 0.0);
  proj_.assign(d, 0.0);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i) {
      z_[k] += Q_[i * d + k] * c_[i];
      proj_[k] += std::abs(Q_[i * d + k]) * h_[i];
    }
  x_.assign(d, 0);
  partial_.assign(d, 0.0);
}

}  // namespace detail

// ---------------------------------------------------------------- queries

namespace {

struct Prepared {
  detail::Reduction red;
  std::vector<double> center;  // scaled
  std::vector<double> half;    // scaled
  std::vector<double> scale;   // e^{ell} of the original lattice
};

Prepared prepare(const UnimodularLattice& L, const Box& box) {
  const int d = L.dim();
  if (d > kMaxEnumDim) throw DimensionTooLarge("enumeration is exact only for d <= 6");
  if (box.dim() != d) throw ValidationError("box dimension does not match the lattice");
  Prepared p;
  std::vector<double> c(d), h(d);
  for (int i = 0; i < d; ++i) {
    const BoxSide& s = box.side(i);
    c[i] = 0.5 * (s.lo + s.hi);
    h[i] = 0.5 * (s.hi - s.lo);
    // widen slightly so that points in the tolerance band are visited
    h[i] += 2.0 * std::max(boundary_tolerance(s.lo), boundary_tolerance(s.hi));
  }
  const auto [mn, mx] = std::minmax_element(h.begin(), h.end());
  std::vector<double> extra;
  if (*mx > 8.0 * *mn) {
    double mean = 0.0;
    for (double x : h) mean += std::log(x);
    mean /= d;
    extra.resize(d);
    for (int i = 0; i < d; ++i) extra[i] = mean - std::log(h[i]);
  }
  p.red = detail::reduce_progressive(L, extra);
  p.center = c;
  p.half = h;
  if (!extra.empty())
    for (int i = 0; i < d; ++i) {
      const double f = std::exp(extra[i]);
      p.center[i] *= f;
      p.half[i] *= f;
    }
  p.scale.resize(d);
  for (int i = 0; i < d; ++i) p.scale[i] = std::exp(L.log_scale()[i]);
  return p;
}

bool symmetric(const Box& box) {
  for (const auto& s : box.sides())
    if (s.lo != -s.hi || s.lo_closed != s.hi_closed) return false;
  return true;
}

// Exact coordinates of Y x in the original scales.
struct LeafEval {
  const Prepared& p;
  int d;
  std::vector<mpz_class> y;
  std::vector<double> v;
  mpz_class c;

  explicit LeafEval(const Prepared& prep) : p(prep), d(prep.red.d), y(d), v(d) {}

  const std::vector<double>& operator()(const std::vector<long long>& x) {
    for (int i = 0; i < d; ++i) {
      y[i] = 0;
      for (int j = 0; j < d; ++j) {
        if (x[j] == 0) continue;
        c = static_cast<long>(x[j]);
        mpz_addmul(y[i].get_mpz_t(), p.red.Y[i * d + j].get_mpz_t(), c.get_mpz_t());
      }
      v[i] = detail::eval_coord(y[i], p.scale[i], p.red.bits);
    }
    return v;
  }

  std::vector<mpz_class> coeffs(const std::vector<long long>& x) const {
    std::vector<mpz_class> out(d);
    mpz_class cc;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        cc = static_cast<long>(x[j]);
        out[i] += p.red.U[i * d + j] * cc;
      }
    return out;
  }
};

}  // namespace

EnumerationResult enumerate_in_box(const UnimodularLattice& L, const Box& box, std::size_t cap) {
  if (cap < 1) throw ValidationError("enumerate_in_box: cap must be >= 1");
  const Prepared p = prepare(L, box);
  detail::Enumerator en(p.red, p.center, p.half, false);
  LeafEval ev(p);
  EnumerationResult out;
  en.run([&](const std::vector<long long>& x) {
    const auto& v = ev(x);
    const auto mem = box.classify(v);
    if (!mem.inside && !mem.boundary) return true;
    LatticePoint pt{ev.coeffs(x), v};
    if (mem.boundary) out.boundary.push_back(pt);
    if (mem.inside) {
      out.points.push_back(std::move(pt));
      if (out.points.size() > cap) throw CapExceeded("enumerate_in_box: more than " + std::to_string(cap) + " points");
    }
    return true;
  });
  return out;
}

BoxQuery box_has_point(const UnimodularLattice& L, const Box& box) {
  const Prepared p = prepare(L, box);
  detail::Enumerator en(p.red, p.center, p.half, symmetric(box));
  LeafEval ev(p);
  BoxQuery q;
  // reduced basis vectors first: on a nearly degenerate lattice the shortest
  // one settles the query before any coefficient range can overflow
  std::vector<long long> unit(p.red.d, 0);
  for (int i = 0; i < p.red.d; ++i) {
    for (long long sign : {1LL, -1LL}) {
      unit[i] = sign;
      if (box.classify(ev(unit)).inside) {
        q.found = true;
        return q;
      }
    }
    unit[i] = 0;
  }
  en.run([&](const std::vector<long long>& x) {
    const auto mem = box.classify(ev(x));
    q.boundary = q.boundary || mem.boundary;
    if (mem.inside) {
      q.found = true;
      return false;
    }
    return true;
  });
  return q;
}

std::vector<std::vector<double>> box_points(const UnimodularLattice& L, const Box& box, std::size_t cap, bool half) {
  const Prepared p = prepare(L, box);
  detail::Enumerator en(p.red, p.center, p.half, half && symmetric(box));
  LeafEval ev(p);
  std::vector<std::vector<double>> out;
  en.run([&](const std::vector<long long>& x) {
    const auto& v = ev(x);
    const auto mem = box.classify(v);
    if (mem.inside || mem.boundary) {
      out.push_back(v);
      if (out.size() > cap) throw CapExceeded("box_points: more than " + std::to_string(cap) + " points");
    }
    return true;
  });
  return out;
}

double shortest_sup_norm(const UnimodularLattice& L) {
  const int d = L.dim();
  if (d > kMaxEnumDim) throw DimensionTooLarge("shortest_sup_norm is exact only for d <= 6");
  // Minkowski: some nonzero point has sup norm <= 1
  const Box box(std::vector<BoxSide>(d, BoxSide{-1.0, 1.0, true, true}));
  const Prepared p = prepare(L, box);
  LeafEval ev(p);
  double best = std::numeric_limits<double>::infinity();
  std::vector<long long> e(d, 0);
  for (int j = 0; j < d; ++j) {
    e.assign(d, 0);
    e[j] = 1;
    const auto& v = ev(e);
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    best = std::min(best, m);
  }
  detail::Enumerator en(p.red, p.center, p.half, true);
  en.shrink = std::min(1.0, best);
  en.run([&](const std::vector<long long>& x) {
    const auto& v = ev(x);
    double m = 0.0;
    for (double c : v) m = std::max(m, std::abs(c));
    if (m < best) {
      best = m;
      if (best < en.shrink) en.shrink = best;
    }
    return true;
  });
  return best;
}

double delta(const UnimodularLattice& L) { return -std::log(shortest_sup_norm(L)); }

}  // namespace dirlab
