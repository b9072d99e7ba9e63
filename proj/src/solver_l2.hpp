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

#pragma once

#include "types.hpp"

namespace sdbe {

inline constexpr double kDefaultLambda = 0.005;

// Precomputed ridge solution operator P = (D^T D + lambda I)^-1 D^T.
// omega_hat = P v minimizes |v - D omega|_2^2 + lambda |omega|_2^2.
struct RidgeOperator {
  Matrix p;               // (n_A + p_B) x m
  double lambda = kDefaultLambda;
  Index split_index = 0;  // rows of p that belong to the class part

  Index cols() const { return p.rows(); }
  Index dim() const { return p.cols(); }
  auto p_alpha() const { return p.topRows(split_index); }
};

// Assemble P by Cholesky factorization of the symmetric positive definite
// normal matrix. When D has more columns than rows the dual identity
// P = D^T (D D^T + lambda I)^-1 is used so the factored system stays at the
// smaller size. lambda must be strictly positive.
RidgeOperator fit_ridge(const Matrix& d, double lambda, Index split_index = 0);

// Both assembly routes, exposed so their agreement can be verified.
Matrix ridge_operator_primal(const Matrix& d, double lambda);
Matrix ridge_operator_dual(const Matrix& d, double lambda);

// omega_hat = P v.
Vector solve_l2(const RidgeOperator& op, const Vector& v);

}  // namespace sdbe
