// Copyright 2026 The Teleop Authors
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

// Classical fourth-order Runge-Kutta step for fixed-size Eigen states.

#ifndef TELEOP_RK4_HPP
#define TELEOP_RK4_HPP

namespace teleop {

/// One step of x' = f(t, x). `f` is called at t, t + h/2 (twice) and t + h;
/// `first` (when non-null) receives the derivative at the start of the step.
template <class Vector, class F>
Vector rk4_step(F&& f, double t, const Vector& x, double h, Vector* first = nullptr) {
  const Vector k1 = f(t, x);
  if (first != nullptr) *first = k1;
  const Vector k2 = f(t + 0.5 * h, Vector(x + 0.5 * h * k1));
  const Vector k3 = f(t + 0.5 * h, Vector(x + 0.5 * h * k2));
  const Vector k4 = f(t + h, Vector(x + h * k3));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace teleop

#endif  // TELEOP_RK4_HPP
