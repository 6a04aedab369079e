#pragma once

// Shift-invert Lanczos for the lowest eigenpairs of a real symmetric sparse
// matrix. Full reorthogonalisation keeps the Krylov basis orthonormal to
// machine precision; blocks here are small enough (a few thousand rows) that
// storing the whole basis is cheap.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "toroid/errors.hpp"

namespace toroid {

struct LanczosOptions {
  double ritz_tolerance = 1e-13;    // |beta_k y_k| relative to theta
  double residual_tolerance = 1e-8;  // absolute bound on ||S x - E x||
  int max_krylov = 400;
};

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

// All eigenpairs with value <= cutoff (and at least min_count when available).
// `shift` must lie below the lowest wanted eigenvalue.
inline EigenPairs lowest_eigenpairs(const Eigen::SparseMatrix<double>& s_matrix, double shift,
                                    double cutoff, int min_count = 1,
                                    const LanczosOptions& opt = {}) {
  const int n = static_cast<int>(s_matrix.rows());
  if (n == 0) return {};

  Eigen::SparseMatrix<double> shifted = s_matrix;
  for (int k = 0; k < n; ++k) shifted.coeffRef(k, k) -= shift;
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success)
    throw NumericalError("lanczos: factorisation of shifted operator failed");

  const int max_dim = std::min(n, opt.max_krylov);
  Eigen::MatrixXd basis(n, max_dim);
  std::vector<double> alpha, beta;

  // Deterministic, structureless start vector.
  Eigen::VectorXd v(n);
  for (int k = 0; k < n; ++k) v(k) = 1.0 + 0.37 * std::sin(1.618 * k + 0.3) + 0.11 * std::cos(0.577 * k * k);
  v.normalize();

  auto orthogonalise = [&](Eigen::VectorXd& w, int count) {
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = basis.leftCols(count).transpose() * w;
      w.noalias() -= basis.leftCols(count) * c;
    }
  };

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  int dim = 0;
  std::vector<int> wanted;
  while (true) {
    basis.col(dim) = v;
    Eigen::VectorXd w = factor.solve(v);
    const double a = v.dot(w);
    alpha.push_back(a);
    w -= a * v;
    if (dim > 0) w -= beta.back() * basis.col(dim - 1);
    orthogonalise(w, dim + 1);
    double b = w.norm();
    ++dim;

    const bool check = dim >= 4 && (dim % 4 == 0 || dim == max_dim || b < 1e-14);
    if (check) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
      for (int k = 0; k < dim; ++k) t(k, k) = alpha[k];
      for (int k = 0; k + 1 < dim; ++k) t(k, k + 1) = t(k + 1, k) = beta[k];
      tri.compute(t);
      // Largest theta <-> lowest eigenvalue.
      wanted.clear();
      bool all_converged = true;
      bool guarded = false;
      int below = 0;
      for (int k = dim - 1; k >= 0; --k) {
        const double theta = tri.eigenvalues()(k);
        const double value = shift + 1.0 / theta;
        const double est = std::abs(b * tri.eigenvectors()(dim - 1, k));
        const bool converged = est <= opt.ritz_tolerance * std::abs(theta);
        const bool needed = value <= cutoff || below < min_count;
        if (!needed) {
          // One converged value above the cutoff guards against a missed level.
          if (!converged) all_converged = false;
          guarded = true;
          break;
        }
        wanted.push_back(k);
        ++below;
        if (!converged) all_converged = false;
      }
      const bool exhausted = dim == n;
      if ((all_converged && guarded) || exhausted) break;
      if (dim == max_dim)
        throw NumericalError("lanczos: no convergence within " + std::to_string(max_dim) +
                             " Krylov vectors");
    }
    if (b < 1e-14) {
      // Invariant subspace: continue from a fresh orthogonal direction.
      Eigen::VectorXd fresh(n);
      for (int k = 0; k < n; ++k) fresh(k) = std::cos(2.399 * k * (dim + 1) + dim);
      orthogonalise(fresh, dim);
      b = 0.0;
      beta.push_back(0.0);
      v = fresh.normalized();
      continue;
    }
    beta.push_back(b);
    v = w / b;
  }

  EigenPairs out;
  out.values.resize(static_cast<Eigen::Index>(wanted.size()));
  out.vectors.resize(n, static_cast<Eigen::Index>(wanted.size()));
  for (std::size_t q = 0; q < wanted.size(); ++q) {
    const int k = wanted[q];
    Eigen::VectorXd x = basis.leftCols(dim) * tri.eigenvectors().col(k);
    x.normalize();
    const double value = x.dot(s_matrix * x);  // Rayleigh quotient
    const double residual = (s_matrix * x - value * x).norm();
    if (residual > opt.residual_tolerance) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "lanczos: eigenpair residual %.3e above tolerance %.1e", residual,
                    opt.residual_tolerance);
      throw NumericalError(msg);
    }
    out.values(static_cast<Eigen::Index>(q)) = value;
    out.vectors.col(static_cast<Eigen::Index>(q)) = x;
  }
  // Drop the guard level(s) above the cutoff beyond min_count.
  Eigen::Index keep = 0;
  for (Eigen::Index q = 0; q < out.values.size(); ++q)
    if (out.values(q) <= cutoff || q < min_count) keep = q + 1;
  out.values.conservativeResize(keep);
  out.vectors.conservativeResize(Eigen::NoChange, keep);
  return out;
}

}  // namespace toroid
