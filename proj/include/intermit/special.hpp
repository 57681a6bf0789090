#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace intermit {

// Regularized incomplete beta I_x(a,b) via the continued fraction of the
// incomplete beta function (modified Lentz evaluation).
double reg_inc_beta(double a, double b, double x);

// Complement of the Kolmogorov distribution: P[sqrt(n) D > lambda] for the
// one- or two-sample KS statistic in its asymptotic regime.
double kolmogorov_pvalue(double lambda);

// Adaptive Simpson quadrature on [a,b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 48);

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace intermit
