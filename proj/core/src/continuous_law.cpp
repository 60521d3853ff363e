#include "alignbounds/continuous_law.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "alignbounds/quadrature.hpp"

namespace alignbounds {

namespace {

constexpr double kQuantileClamp = 1e-15;

}  // namespace

ContinuousLaw exp_order_stat_law(std::size_t n) {
  if (n == 0) throw std::invalid_argument("order statistic requires n >= 1");
  const double nn = static_cast<double>(n);
  ContinuousLaw law;
  law.density = [nn](double x) {
    if (x < 0.0) return 0.0;
    const double u = -std::expm1(-x);  // 1 - exp(-x)
    return nn * std::pow(u, nn - 1.0) * std::exp(-x);
  };
  law.cdf = [nn](double x) {
    if (x < 0.0) return 0.0;
    return std::pow(-std::expm1(-x), nn);
  };
  law.quantile = [nn](double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("quantile level must lie in [0, 1]");
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-std::pow(p, 1.0 / nn));
  };
  return law;
}

ContinuousLaw exponential_law() { return exp_order_stat_law(1); }

ContinuousLaw gaussian_law(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("variance must be positive");
  const double sigma = std::sqrt(variance);
  ContinuousLaw law;
  law.density = [mean, sigma](double x) {
    return boost::math::pdf(boost::math::normal_distribution<double>(mean, sigma), x);
  };
  law.cdf = [mean, sigma](double x) {
    return boost::math::cdf(boost::math::normal_distribution<double>(mean, sigma), x);
  };
  law.quantile = [mean, sigma](double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("quantile level must lie in [0, 1]");
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return boost::math::quantile(
        boost::math::normal_distribution<double>(mean, sigma), p);
  };
  return law;
}

ContinuousLaw gamma_law(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("gamma shape and scale must be positive");
  const double log_norm = std::lgamma(shape) + shape * std::log(scale);
  ContinuousLaw law;
  law.density = [shape, scale, log_norm](double x) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
      if (shape > 1.0) return 0.0;
      if (shape == 1.0) return 1.0 / scale;
      return std::numeric_limits<double>::infinity();
    }
    return std::exp((shape - 1.0) * std::log(x) - x / scale - log_norm);
  };
  law.cdf = [shape, scale](double x) {
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(shape, x / scale);
  };
  law.quantile = [shape, scale](double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("quantile level must lie in [0, 1]");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return scale * boost::math::gamma_p_inv(shape, p);
  };
  return law;
}

double tvar(const ContinuousLaw& law, double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("tvar level must lie in (0, 1]");
  auto integrand = [&law](double t) {
    const double tc =
        std::min(std::max(t, kQuantileClamp), 1.0 - kQuantileClamp);
    return law.quantile(tc);
  };
  return integrate_or_throw(integrand, 0.0, p, 1e-10, 60, "tvar") / p;
}

std::function<double(double)> gaussian_log_mgf(double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("variance must be positive");
  return [variance](double lambda) { return lambda * lambda * variance / 2.0; };
}

std::function<double(double)> gamma_log_mgf(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("gamma shape and scale must be positive");
  return [shape, scale](double lambda) {
    if (lambda * scale >= 1.0) return std::numeric_limits<double>::infinity();
    // Centered: log E exp(lambda (X - k theta)).
    return -shape * std::log1p(-lambda * scale) - shape * scale * lambda;
  };
}

}  // namespace alignbounds
