/*
  Copyright (c) SDBE project contributors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#include "solver_l2.hpp"

#include <Eigen/Cholesky>

namespace sdbe {

namespace {

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

void check_inputs(const Matrix& d, double lambda) {
  if (d.size() == 0) fail(ErrorCode::EmptyInput, "fit_ridge: empty dictionary");
  if (!d.allFinite())
    fail(ErrorCode::InvalidArgument, "fit_ridge: non-finite dictionary entry");
  if (!(lambda > 0.0))
    fail(ErrorCode::InvalidArgument,
         "fit_ridge: lambda must be strictly positive");
}

Eigen::LLT<Matrix> spd_factor(const Matrix& lhs, const char* what) {
  Eigen::LLT<Matrix> llt(lhs);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::NumericalFailure,
         std::string(what) + ": Cholesky factorization failed");
  return llt;
}

// A plain double factorization of the regularized Gram matrix leaves a
// forward error near cond * eps, which for small lambda can reach 1e-8.
// Two refinement passes with residuals accumulated in extended precision
// push the error down to the extended-precision floor.
constexpr int kRefinePasses = 2;

}  // namespace

Matrix ridge_operator_primal(const Matrix& d, double lambda) {
  check_inputs(d, lambda);
  Matrix gram = d.transpose() * d;
  gram.diagonal().array() += lambda;
  const Eigen::LLT<Matrix> llt = spd_factor(gram, "ridge_operator_primal");
  Matrix p = llt.solve(d.transpose());

  const LongMatrix dl = d.cast<long double>();
  const long double ll = lambda;
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    const LongMatrix pl = p.cast<long double>();
    const LongMatrix residual =
        dl.transpose() - dl.transpose() * (dl * pl) - ll * pl;
    p += llt.solve(Matrix(residual.cast<double>()));
  }
  return p;
}

Matrix ridge_operator_dual(const Matrix& d, double lambda) {
  check_inputs(d, lambda);
  const Index m = d.rows();
  Matrix outer = d * d.transpose();
  outer.diagonal().array() += lambda;
  const Eigen::LLT<Matrix> llt = spd_factor(outer, "ridge_operator_dual");
  Matrix y = llt.solve(Matrix::Identity(m, m));

  const LongMatrix dl = d.cast<long double>();
  const long double ll = lambda;
  LongMatrix yl = y.cast<long double>();
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    const LongMatrix residual =
        LongMatrix::Identity(m, m) - dl * (dl.transpose() * yl) - ll * yl;
    y += llt.solve(Matrix(residual.cast<double>()));
    yl = y.cast<long double>();
  }
  return (dl.transpose() * yl).cast<double>();
}

RidgeOperator fit_ridge(const Matrix& d, double lambda, Index split_index) {
  check_inputs(d, lambda);
  if (split_index < 0 || split_index > d.cols())
    fail(ErrorCode::InvalidArgument, "fit_ridge: split index out of range");

  RidgeOperator op;
  op.lambda = lambda;
  op.split_index = split_index;
  op.p = (d.cols() > d.rows()) ? ridge_operator_dual(d, lambda)
                               : ridge_operator_primal(d, lambda);

  // Certify (D^T D + lambda I) P = D^T before handing the operator out.
  // The residual is accumulated in extended precision so the check measures
  // the operator, not the rounding of the check itself, and it is scaled as
  // a backward error: no double-precision representation of P can promise a
  // residual below roughly eps * (|A| |P| + |D^T|).
  const LongMatrix dl = d.cast<long double>();
  const LongMatrix pl = op.p.cast<long double>();
  const LongMatrix residual = dl.transpose() - dl.transpose() * (dl * pl) -
                              static_cast<long double>(lambda) * pl;
  const long double gram_norm = (dl * dl.transpose()).norm() + lambda;
  const long double scale = gram_norm * pl.norm() + dl.norm();
  const double rel = static_cast<double>(residual.norm() / scale);
  if (!(rel <= 1e-10))
    fail(ErrorCode::NumericalFailure,
         "fit_ridge: normal equation residual above tolerance");
  return op;
}

Vector solve_l2(const RidgeOperator& op, const Vector& v) {
  if (v.size() != op.dim())
    fail(ErrorCode::DimensionMismatch, "solve_l2: query length mismatch");
  if (!v.allFinite())
    fail(ErrorCode::InvalidArgument, "solve_l2: non-finite query entry");
  return op.p * v;
}

}  // namespace sdbe
