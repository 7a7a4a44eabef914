/*
 * Copyright 2026 The Dendrite Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>

namespace dwb {

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Sum of squared residuals.
  double residual = 0.0;
};

/// Throws DegenerateFitError unless at least two distinct x values exist.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fits y = a * x^b by least squares on (ln x, ln y). All inputs must be
/// strictly positive. The returned intercept is ln a.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

} // namespace dwb
