#include "rabi/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rabi/errors.hpp"

namespace rabi {

SymmetricBandMatrix::SymmetricBandMatrix(int dimension, int bandwidth)
    : dim_(dimension), band_(bandwidth) {
  if (dimension < 1 || bandwidth < 0) {
    throw Error(ErrorCode::InvalidArgument, "band matrix needs dimension >= 1 and bandwidth >= 0");
  }
  band_ = std::min(bandwidth, dimension - 1);
  data_.assign(static_cast<std::size_t>(band_ + 1) * dim_, 0.0);
}

double SymmetricBandMatrix::operator()(int i, int j) const noexcept {
  if (i < j) std::swap(i, j);
  const int k = i - j;
  if (k > band_) return 0.0;
  return data_[static_cast<std::size_t>(k) * dim_ + j];
}

void SymmetricBandMatrix::set(int i, int j, double value) {
  if (i < j) std::swap(i, j);
  const int k = i - j;
  if (k > band_ || j < 0 || i >= dim_) {
    throw Error(ErrorCode::InvalidArgument, "element outside the band");
  }
  data_[static_cast<std::size_t>(k) * dim_ + j] = value;
}

double SymmetricBandMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> SymmetricBandMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(dim_), 0.0);
  for (int j = 0; j < dim_; ++j) {
    y[j] += data_[j] * x[j];
    for (int k = 1; k <= band_ && j + k < dim_; ++k) {
      const double v = data_[static_cast<std::size_t>(k) * dim_ + j];
      y[j + k] += v * x[j];
      y[j] += v * x[j + k];
    }
  }
  return y;
}

DenseMatrix DenseMatrix::identity(int size) {
  DenseMatrix m(size);
  for (int i = 0; i < size; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_band(const SymmetricBandMatrix& band) {
  const int n = band.dimension();
  DenseMatrix m(n);
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - band.bandwidth()); i <= std::min(n - 1, j + band.bandwidth()); ++i) {
      m(i, j) = band(i, j);
    }
  }
  return m;
}

namespace {

// Lower band with one spare diagonal for the bulge.
class WorkBand {
 public:
  WorkBand(const SymmetricBandMatrix& src)
      : n_(src.dimension()), w_(src.bandwidth() + 1),
        data_(static_cast<std::size_t>(w_ + 1) * n_, 0.0) {
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k <= src.bandwidth() && j + k < n_; ++k) at(j + k, j) = src(j + k, j);
    }
  }

  double get(int i, int j) const {
    if (i < j) std::swap(i, j);
    if (i - j > w_) return 0.0;
    return data_[static_cast<std::size_t>(i - j) * n_ + j];
  }

  double& at(int i, int j) {
    if (i < j) std::swap(i, j);
    return data_[static_cast<std::size_t>(i - j) * n_ + j];
  }

  void put(int i, int j, double v) {
    if (std::abs(i - j) > w_) return;  // stays zero by construction
    at(i, j) = v;
  }

  // Rotation in the plane (p - 1, p) chosen to zero element (p, col).
  void annihilate(int p, int col) {
    const double x = get(p - 1, col);
    const double y = get(p, col);
    if (y == 0.0) return;
    const double r = std::hypot(x, y);
    const double c = x / r;
    const double s = y / r;
    const int lo = std::max(0, p - 1 - w_);
    const int hi = std::min(n_ - 1, p + w_);
    for (int k = lo; k <= hi; ++k) {
      if (k == p - 1 || k == p) continue;
      const double u = get(p - 1, k);
      const double v = get(p, k);
      put(p - 1, k, c * u + s * v);
      put(p, k, -s * u + c * v);
    }
    const double a = get(p - 1, p - 1);
    const double b = get(p, p);
    const double m = get(p, p - 1);
    at(p - 1, p - 1) = c * c * a + 2.0 * c * s * m + s * s * b;
    at(p, p) = s * s * a - 2.0 * c * s * m + c * c * b;
    at(p, p - 1) = (c * c - s * s) * m + c * s * (b - a);
    at(p, col) = 0.0;
  }

  int n() const { return n_; }

 private:
  int n_;
  int w_;
  std::vector<double> data_;
};

}  // namespace

Tridiagonal band_to_tridiagonal(const SymmetricBandMatrix& band) {
  const int n = band.dimension();
  const int b = band.bandwidth();
  Tridiagonal t;
  t.diag.resize(static_cast<std::size_t>(n));
  t.off.assign(static_cast<std::size_t>(n), 0.0);
  if (b <= 1) {
    for (int i = 0; i < n; ++i) {
      t.diag[i] = band(i, i);
      if (i + 1 < n) t.off[i] = band(i + 1, i);
    }
    return t;
  }
  WorkBand w(band);
  for (int j = 0; j + 2 < n; ++j) {
    for (int k = std::min(b, n - 1 - j); k >= 2; --k) {
      int p = j + k;
      w.annihilate(p, j);
      // Chase the bulge that appeared at (p + b, p - 1).
      int row = p + b;
      int col = p - 1;
      while (row < n) {
        w.annihilate(row, col);
        col = row - 1;
        row += b;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    t.diag[i] = w.get(i, i);
    if (i + 1 < n) t.off[i] = w.get(i + 1, i);
  }
  return t;
}

Tridiagonal householder_tridiagonalize(const DenseMatrix& input, DenseMatrix* q) {
  const int n = input.n;
  DenseMatrix a = input;
  if (q != nullptr) *q = DenseMatrix::identity(n);
  std::vector<double> v(static_cast<std::size_t>(n));
  std::vector<double> p(static_cast<std::size_t>(n));
  for (int k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (int i = k + 1; i < n; ++i) norm = std::hypot(norm, a(i, k));
    if (norm == 0.0) continue;
    const double alpha = a(k + 1, k) > 0.0 ? -norm : norm;
    std::fill(v.begin(), v.end(), 0.0);
    for (int i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vv = 0.0;
    for (int i = k + 1; i < n; ++i) vv += v[i] * v[i];
    if (vv == 0.0) continue;
    const double beta = 2.0 / vv;
    // A <- H A H with H = I - beta v v^T.
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      p[i] = beta * s;
    }
    double pv = 0.0;
    for (int i = k + 1; i < n; ++i) pv += p[i] * v[i];
    const double half = 0.5 * beta * pv;
    for (int i = 0; i < n; ++i) p[i] -= half * v[i];
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) a(i, j) -= v[i] * p[j] + p[i] * v[j];
    }
    if (q != nullptr) {
      DenseMatrix& m = *q;
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = k + 1; j < n; ++j) s += m(i, j) * v[j];
        s *= beta;
        for (int j = k + 1; j < n; ++j) m(i, j) -= s * v[j];
      }
    }
  }
  Tridiagonal t;
  t.diag.resize(static_cast<std::size_t>(n));
  t.off.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    t.diag[i] = a(i, i);
    if (i + 1 < n) t.off[i] = a(i + 1, i);
  }
  return t;
}

std::vector<double> tridiagonal_eigen(Tridiagonal t, DenseMatrix* vectors) {
  std::vector<double>& d = t.diag;
  std::vector<double>& e = t.off;
  const int n = static_cast<int>(d.size());
  if (n == 0) return {};
  e.resize(static_cast<std::size_t>(n), 0.0);
  e[n - 1] = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iter > 60) {
        throw Error(ErrorCode::ConvergenceFailure,
                    "implicit QL did not converge for eigenvalue " + std::to_string(l));
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool deflated = false;
      for (int i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (vectors != nullptr) {
          DenseMatrix& z = *vectors;
          for (int k = 0; k < z.n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return d[x] < d[y]; });
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) values[i] = d[order[i]];
  if (vectors != nullptr) {
    DenseMatrix sorted(vectors->n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < vectors->n; ++i) sorted(i, j) = (*vectors)(i, order[j]);
    }
    *vectors = std::move(sorted);
  }
  return values;
}

DenseEigen symmetric_eigen(const DenseMatrix& a) {
  DenseEigen out;
  out.vectors = DenseMatrix(a.n);
  Tridiagonal t = householder_tridiagonalize(a, &out.vectors);
  out.values = tridiagonal_eigen(std::move(t), &out.vectors);
  return out;
}

std::vector<double> band_eigenvalues(const SymmetricBandMatrix& band) {
  return tridiagonal_eigen(band_to_tridiagonal(band));
}

}  // namespace rabi
