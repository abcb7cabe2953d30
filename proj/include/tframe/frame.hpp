#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tframe/errors.hpp"
#include "tframe/linalg.hpp"
#include "tframe/rng.hpp"

namespace tframe {

// Sorted set of distinct column indices inside {0, ..., ambient-1}.
class SupportSet {
 public:
  static SupportSet of(std::vector<int> indices, int ambient) {
    if (ambient < 0) throw invalid_input("SupportSet: negative ambient dimension");
    std::sort(indices.begin(), indices.end());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (indices[i] < 0 || indices[i] >= ambient)
        throw invalid_input("SupportSet: index " + std::to_string(indices[i]) +
                            " outside [0, " + std::to_string(ambient) + ")");
      if (i > 0 && indices[i] == indices[i - 1])
        throw invalid_input("SupportSet: duplicate index " + std::to_string(indices[i]));
    }
    SupportSet s;
    s.indices_ = std::move(indices);
    s.ambient_ = ambient;
    return s;
  }

  const std::vector<int>& indices() const { return indices_; }
  int ambient() const { return ambient_; }
  int size() const { return static_cast<int>(indices_.size()); }

  SupportSet complement() const {
    std::vector<bool> in(static_cast<std::size_t>(ambient_), false);
    for (int i : indices_) in[static_cast<std::size_t>(i)] = true;
    std::vector<int> rest;
    rest.reserve(static_cast<std::size_t>(ambient_) - indices_.size());
    for (int i = 0; i < ambient_; ++i)
      if (!in[static_cast<std::size_t>(i)]) rest.push_back(i);
    return of(std::move(rest), ambient_);
  }

 private:
  std::vector<int> indices_;
  int ambient_ = 0;
};

// max |(D D^T - I)_{ij}|, zero exactly when D is a Parseval tight frame.
inline double tightness_residual(const Matrix& d) {
  const Matrix gram = d * d.transpose();
  return (gram - Matrix::Identity(d.rows(), d.rows())).cwiseAbs().maxCoeff();
}

// A tight frame for R^p given by the p x d matrix whose d columns are the
// frame vectors, validated to satisfy D D^T = I at construction.
class Frame {
 public:
  Frame(Matrix d, std::string label) : d_(std::move(d)), label_(std::move(label)) {
    if (d_.rows() < 1) throw invalid_input("Frame: need at least one row");
    if (d_.cols() < d_.rows())
      throw invalid_input("Frame: need d >= p, got p=" + std::to_string(d_.rows()) +
                          " d=" + std::to_string(d_.cols()));
    if (!d_.allFinite()) throw invalid_input("Frame: matrix has non-finite entries");
    const double resid = tightness_residual(d_);
    if (resid > 1e-10)
      throw invalid_input("Frame: D D^T deviates from identity by " + format_sci(resid));
  }

  const Matrix& matrix() const { return d_; }
  const std::string& label() const { return label_; }
  int p() const { return static_cast<int>(d_.rows()); }
  int d() const { return static_cast<int>(d_.cols()); }

 private:
  static std::string format_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
  }

  Matrix d_;
  std::string label_;
};

inline Frame identity_frame(int p) {
  if (p < 1) throw invalid_input("identity_frame: p must be at least 1");
  return Frame(Matrix::Identity(p, p), "identity");
}

// Three unit-spaced vectors in the plane scaled to a Parseval tight frame.
inline Frame mercedes_benz_frame() {
  const double s = std::sqrt(2.0 / 3.0);
  const double h = std::sqrt(3.0) / 2.0;
  Matrix d(2, 3);
  d << 1.0, -0.5, -0.5,
       0.0, h, -h;
  return Frame(s * d, "mercedes_benz");
}

// Nearest tight frame to a Gaussian draw: D = U V^T from the thin SVD.
inline Frame random_tight_frame(int p, int d, SeededRng& rng) {
  if (p < 1 || d < p) throw invalid_input("random_tight_frame: need d >= p >= 1");
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Matrix g = rng.normal_matrix(p, d);
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    if (sigma(sigma.size() - 1) <= 1e-10 * sigma(0)) continue;  // degenerate draw
    return Frame(svd.matrixU() * svd.matrixV().transpose(), "random_tight");
  }
  throw std::runtime_error("random_tight_frame: 8 degenerate draws in a row");
}

// D^T x: frame coefficients of x.
inline Vector analysis(const Frame& f, const Vector& x) {
  if (x.size() != f.p())
    throw invalid_input("analysis: vector has size " + std::to_string(x.size()) +
                        ", frame has p=" + std::to_string(f.p()));
  return f.matrix().transpose() * x;
}

// D v: synthesize a signal from coefficients.
inline Vector synthesis(const Frame& f, const Vector& v) {
  if (v.size() != f.d())
    throw invalid_input("synthesis: vector has size " + std::to_string(v.size()) +
                        ", frame has d=" + std::to_string(f.d()));
  return f.matrix() * v;
}

// D_S: keep the columns in S, zero out the rest. Same shape as D.
inline Matrix restrict_columns(const Frame& f, const SupportSet& s) {
  if (s.ambient() != f.d())
    throw invalid_input("restrict_columns: support ambient " + std::to_string(s.ambient()) +
                        " does not match frame d=" + std::to_string(f.d()));
  Matrix out = Matrix::Zero(f.p(), f.d());
  for (int j : s.indices()) out.col(j) = f.matrix().col(j);
  return out;
}

// Indices of the k largest-magnitude entries, ties broken toward lower index.
inline SupportSet top_k_support(const Vector& coeffs, int k) {
  const int d = static_cast<int>(coeffs.size());
  if (k < 1 || k > d)
    throw invalid_input("top_k_support: need 1 <= k <= " + std::to_string(d) + ", got k=" +
                        std::to_string(k));
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(coeffs(a)), mb = std::abs(coeffs(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  order.resize(static_cast<std::size_t>(k));
  return SupportSet::of(std::move(order), d);
}

}  // namespace tframe
