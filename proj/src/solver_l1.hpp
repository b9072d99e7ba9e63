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

struct L1Settings {
  double lambda = 0.005;
  std::int64_t max_iters = 10000;
  double kkt_tol = 1e-6;
  double obj_tol = 1e-10;   // relative objective-change stop
  bool record_trace = false;
};

struct L1Solution {
  Vector omega;
  std::int64_t iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  double objective = 0.0;
  std::vector<double> objective_trace;  // filled when record_trace is set
};

// Minimize |v - D omega|_2^2 + lambda |omega|_1 by accelerated proximal
// gradient descent (FISTA, Beck & Teboulle 2009) with function-value
// adaptive restart (O'Donoghue & Candes 2015). Zero start, constant step
// 1/L with L = 2 sigma_max(D)^2 estimated by power iteration.
L1Solution solve_l1(const Matrix& d, const Vector& v,
                    const L1Settings& settings = {});

// Same solver with the Gram matrix D^T D supplied by the caller, for batch
// use against a fixed dictionary.
L1Solution solve_l1(const Matrix& d, const Vector& v,
                    const L1Settings& settings, const Matrix& gram);

// Stationarity certificate: with g = 2 D^T (D omega - v), returns
//   max_j  |g_j + lambda sign(omega_j)|        where omega_j != 0,
//          max(0, |g_j| - lambda)              where omega_j == 0.
// Zero at an exact minimizer.
double kkt_residual(const Matrix& d, const Vector& v, double lambda,
                    const Vector& omega);

// Upper bound 2 sigma_max(D)^2 on the gradient Lipschitz constant, from 50
// power iterations (tol 1e-10) on the smaller of D^T D and D D^T.
double lipschitz_upper(const Matrix& d);

}  // namespace sdbe
