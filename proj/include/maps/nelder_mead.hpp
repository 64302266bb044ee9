/*
 * Copyright 2026 The MAPs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef MAPS_NELDER_MEAD_HPP
#define MAPS_NELDER_MEAD_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Core>

namespace maps {

// Bounded Nelder-Mead minimizer in fixed dimension. Vertices are projected
// onto the box; non-finite objective values count as +inf.
template <int Dim> class NelderMead {
public:
  using Point = Eigen::Matrix<double, Dim, 1>;

  struct Result {
    Point x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
  };

  NelderMead(Point lower, Point upper) : lower_(lower), upper_(upper) {}

  Result minimize(const std::function<double(const Point &)> &f, Point start,
                  double step, double tolerance, int max_iterations) const {
    Result result;
    auto eval = [&](const Point &p) {
      ++result.evaluations;
      const double v = f(p);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::array<Point, Dim + 1> x;
    std::array<double, Dim + 1> fx;
    x[0] = project(start);
    for (int i = 0; i < Dim; ++i) {
      x[i + 1] = x[0];
      x[i + 1](i) += step;
      x[i + 1] = project(x[i + 1]);
      if (x[i + 1](i) == x[0](i))
        x[i + 1](i) = project_coord(x[0](i) - step, i);
    }
    for (int i = 0; i <= Dim; ++i)
      fx[i] = eval(x[i]);

    std::array<int, Dim + 1> order;
    for (;;) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return fx[a] < fx[b]; });
      {
        auto xs = x;
        auto fs = fx;
        for (int i = 0; i <= Dim; ++i) {
          x[i] = xs[order[i]];
          fx[i] = fs[order[i]];
        }
      }

      double diameter = 0.0;
      for (int i = 1; i <= Dim; ++i)
        diameter = std::max(diameter, (x[i] - x[0]).norm());
      if (diameter < tolerance) {
        result.converged = true;
        break;
      }
      if (result.iterations >= max_iterations)
        break;
      ++result.iterations;

      Point centroid = Point::Zero();
      for (int i = 0; i < Dim; ++i)
        centroid += x[i];
      centroid /= Dim;

      const Point xr = project(centroid + (centroid - x[Dim]));
      const double fr = eval(xr);
      if (fr < fx[0]) {
        const Point xe = project(centroid + 2.0 * (centroid - x[Dim]));
        const double fe = eval(xe);
        if (fe < fr) {
          x[Dim] = xe;
          fx[Dim] = fe;
        } else {
          x[Dim] = xr;
          fx[Dim] = fr;
        }
        continue;
      }
      if (fr < fx[Dim - 1]) {
        x[Dim] = xr;
        fx[Dim] = fr;
        continue;
      }
      if (fr < fx[Dim]) {
        const Point xc = project(centroid + 0.5 * (xr - centroid));
        const double fc = eval(xc);
        if (fc <= fr) {
          x[Dim] = xc;
          fx[Dim] = fc;
          continue;
        }
      } else {
        const Point xc = project(centroid + 0.5 * (x[Dim] - centroid));
        const double fc = eval(xc);
        if (fc < fx[Dim]) {
          x[Dim] = xc;
          fx[Dim] = fc;
          continue;
        }
      }
      for (int i = 1; i <= Dim; ++i) {
        x[i] = x[0] + 0.5 * (x[i] - x[0]);
        fx[i] = eval(x[i]);
      }
    }

    result.x = x[0];
    result.value = fx[0];
    return result;
  }

private:
  double project_coord(double v, int i) const {
    return std::clamp(v, lower_(i), upper_(i));
  }
  Point project(Point p) const { return p.cwiseMax(lower_).cwiseMin(upper_); }

  Point lower_;
  Point upper_;
};

} // namespace maps

#endif
