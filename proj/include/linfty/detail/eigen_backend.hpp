#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "linfty/matrix.hpp"

namespace linfty::detail {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int r = 0; r < e.rows(); ++r)
    for (int c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  return m;
}

struct Svd {
  Matrix u;          // rows x rank-space (full U, rows x rows)
  Vec sigma;         // min(rows, cols) singular values, descending
  Matrix v;          // cols x cols
};

inline Svd svd(const Matrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> dec(to_eigen(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Svd out;
  out.u = from_eigen(dec.matrixU());
  out.v = from_eigen(dec.matrixV());
  const auto& s = dec.singularValues();
  out.sigma.assign(s.data(), s.data() + s.size());
  return out;
}

inline double determinant(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::domain_error("determinant: matrix not square");
  return to_eigen(m).determinant();
}

inline Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::domain_error("inverse: matrix not square");
  return from_eigen(to_eigen(m).inverse());
}

}  // namespace linfty::detail
