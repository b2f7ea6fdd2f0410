#pragma once

#include <vector>

#include "fermat/scenario.hpp"

namespace fermat {

// Built-in scenarios used by tests, examples and the acceptance suite.

Scenario flat_scenario(int n, const std::vector<double>& drift = {}, double beta = 1.0);
// round sphere of radius rho with rotational drift eps * (-p2, p1, 0) in R^3
Scenario sphere_scenario(double rho = 1.0, double eps = 0.0, double beta = 1.0);
// sphere with beta = base + amp * exp(-|p - c|^2 / w^2)
Scenario sphere_varying_beta(double eps, double base, double amp, double width, const std::vector<double>& center);
Scenario torus_scenario(const std::vector<double>& periods, const std::vector<double>& drift = {});
// flat R^2 with drift amp * exp(-|x - c|^2 / w^2) * rot(x - c)
Scenario bump_drift_scenario(double amp, double width, double cx, double cy, double beta = 1.0);
// flat R^2 with beta = 1 - depth * exp(-|x|^2 / w^2): a converging lens
Scenario lens_scenario(double depth = 0.5, double width = 1.0, const std::vector<double>& drift = {});

}  // namespace fermat
