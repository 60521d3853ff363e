#pragma once

#include <cstddef>
#include <functional>

namespace alignbounds {

// Closed-form density/CDF/quantile triple for a continuous real law.
// quantile(0) and quantile(1) may be infinite; integrators clamp.
struct ContinuousLaw {
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
};

ContinuousLaw exponential_law();                  // Exp(1)
ContinuousLaw exp_order_stat_law(std::size_t n);  // max of n iid Exp(1)
ContinuousLaw gaussian_law(double mean, double variance);
ContinuousLaw gamma_law(double shape, double scale);

// (1/p) * integral of the quantile over (0, p]; p = 1 gives the mean.
double tvar(const ContinuousLaw& law, double p);

// Centered log-MGFs for the closed-form tail families.
std::function<double(double)> gaussian_log_mgf(double variance);
std::function<double(double)> gamma_log_mgf(double shape, double scale);

}  // namespace alignbounds
