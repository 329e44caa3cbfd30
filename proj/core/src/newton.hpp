// Copyright 2026 The MPPI-CBF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MPPI_CBF_SRC_NEWTON_HPP_
#define MPPI_CBF_SRC_NEWTON_HPP_

#include <Eigen/Dense>

namespace mppi_cbf::internal {

// Damped Newton centering of tau * f + barrier. Returns false when the step
// budget is exhausted.
template <typename Model, typename Vec, typename Mat>
bool center(const Model& model, Vec& z, double tau, int max_steps,
            int& steps_used) {
  Vec grad;
  Mat hess;
  for (int it = 0; it < max_steps; ++it) {
    const double value = model.evaluate(z, tau, &grad, &hess);
    Eigen::LLT<Mat> llt(hess);
    Vec dz;
    if (llt.info() == Eigen::Success) {
      dz = -llt.solve(grad);
    } else {
      Mat reg = hess;
      reg.diagonal().array() += 1e-10 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      dz = -reg.ldlt().solve(grad);
    }
    ++steps_used;
    const double decrement = -grad.dot(dz);
    if (!(decrement > 2e-10)) return true;

    double alpha = 1.0;
    double trial = model.evaluate(z + alpha * dz, tau, nullptr, nullptr);
    int halvings = 0;
    while (!(trial <= value + 0.25 * alpha * grad.dot(dz)) && halvings < 60) {
      alpha *= 0.5;
      trial = model.evaluate(z + alpha * dz, tau, nullptr, nullptr);
      ++halvings;
    }
    if (halvings == 60) return true;  // no further progress at this tau
    z += alpha * dz;
    // Steps below rounding level make no further progress either.
    if (alpha * dz.norm() <= 1e-13 * (1.0 + z.norm())) return true;
  }
  return false;
}

}  // namespace mppi_cbf::internal

#endif  // MPPI_CBF_SRC_NEWTON_HPP_
