#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace levysim {

/// Ambient dimensions supported by the sphere quadrature (S^0, S^1, S^2).
inline constexpr int kMaxDim = 3;

/// Small fixed-capacity vector used for states, jump marks and drifts.
/// Value semantics, no allocation.
class Vec {
 public:
  Vec() : dim_(0) {}
  explicit Vec(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Vec: dimension must be 1..3");
  }
  static Vec zero(int dim) { return Vec(dim); }

  int dim() const { return dim_; }
  double operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return a_[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) a_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += a_[i] * o.a_[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  double norm_inf() const {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(a_[i]));
    return m;
  }
  bool finite() const {
    for (int i = 0; i < dim_; ++i)
      if (!std::isfinite(a_[i])) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> a_{};
  int dim_;
};

/// Square matrix up to 3x3, row-major.
class Mat {
 public:
  Mat() : dim_(0) {}
  explicit Mat(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Mat: dimension must be 1..3");
  }
  static Mat zero(int dim) { return Mat(dim); }
  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * dim_ + j)]; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * dim_ + j)]; }

  Mat& operator+=(const Mat& o) {
    for (int i = 0; i < dim_ * dim_; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Mat& operator*=(double s) {
    for (int i = 0; i < dim_ * dim_; ++i) a_[i] *= s;
    return *this;
  }
  friend Mat operator*(Mat m, double s) { return m *= s; }
  friend Mat operator*(double s, Mat m) { return m *= s; }

  Vec apply(const Vec& x) const {
    Vec y(dim_);
    for (int i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  double det() const {
    switch (dim_) {
      case 1:
        return a_[0];
      case 2:
        return a_[0] * a_[3] - a_[1] * a_[2];
      default: {
        const Mat& m = *this;
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
      }
    }
  }

  double frobenius() const {
    double s = 0.0;
    for (int i = 0; i < dim_ * dim_; ++i) s += a_[i] * a_[i];
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < dim_ * dim_; ++i) m = std::max(m, std::abs(a_[i]));
    return m;
  }

  bool finite() const {
    for (int i = 0; i < dim_ * dim_; ++i)
      if (!std::isfinite(a_[i])) return false;
    return true;
  }

  /// Lower-triangular Cholesky factor of a symmetric PSD matrix. Zero
  /// diagonal blocks (semi-definite input) are tolerated.
  Mat cholesky() const {
    Mat L(dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = (*this)(i, j);
        for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
        if (i == j) {
          if (s < -1e-12) throw std::runtime_error("cholesky: matrix not PSD");
          L(i, j) = std::sqrt(std::max(s, 0.0));
        } else {
          L(i, j) = L(j, j) > 0.0 ? s / L(j, j) : 0.0;
        }
      }
    }
    return L;
  }

 private:
  std::array<double, static_cast<std::size_t>(kMaxDim* kMaxDim)> a_{};
  int dim_;
};

/// Kahan-compensated accumulator for one scalar; long Euler recursions keep
/// rounding far below statistical error this way.
struct KahanAccumulator {
  double value = 0.0;
  double compensation = 0.0;

  void add(double term) {
    const double y = term - compensation;
    const double t = value + y;
    compensation = (t - value) - y;
    value = t;
  }
};

}  // namespace levysim
