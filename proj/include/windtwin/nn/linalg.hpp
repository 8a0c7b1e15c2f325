#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "windtwin/errors.hpp"

namespace windtwin::nn {

using Vec = std::vector<double>;

// Small row-major dense matrix. All networks here are tiny; plain loops are
// deliberate so gradients stay transparent and testable.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

inline void check_dims(bool ok, const char* what) {
  if (!ok) throw Error(std::string("dimension mismatch in ") + what);
}

inline Vec matvec(const Matrix& m, const Vec& x) {
  check_dims(m.cols() == x.size(), "matvec");
  Vec y(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

// y = m^T x
inline Vec matvec_transposed(const Matrix& m, const Vec& x) {
  check_dims(m.rows() == x.size(), "matvec_transposed");
  Vec y(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double xr = x[r];
    for (std::size_t c = 0; c < m.cols(); ++c) y[c] += m(r, c) * xr;
  }
  return y;
}

// acc += u v^T
inline void add_outer(Matrix& acc, const Vec& u, const Vec& v) {
  check_dims(acc.rows() == u.size() && acc.cols() == v.size(), "add_outer");
  for (std::size_t r = 0; r < u.size(); ++r) {
    for (std::size_t c = 0; c < v.size(); ++c) acc(r, c) += u[r] * v[c];
  }
}

inline void add_inplace(Vec& acc, const Vec& x) {
  check_dims(acc.size() == x.size(), "add_inplace");
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

}  // namespace windtwin::nn
