#include "mlqst/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlqst/error.hpp"

namespace mlqst {

namespace {

constexpr int kMaxTerms = 100000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// x^a e^-x / Gamma(a), in log space.
double log_gamma_prefactor(double a, double x) {
  return a * std::log(x) - x - std::lgamma(a);
}

// Power series for P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxTerms; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_gamma_prefactor(a, x));
}

// Continued fraction for Q(a, x) (modified Lentz); used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_gamma_prefactor(a, x)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::NegativeArgument, "incomplete gamma of negative x");
  if (!(a > 0.0)) throw Error(ErrorCode::NegativeArgument, "incomplete gamma needs a > 0");
}

void check_dof(Chi2Params params) {
  if (params.dof < 1) {
    throw Error(ErrorCode::NegativeArgument, "chi-squared degrees of freedom must be >= 1");
  }
}

void check_significance(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange, "significance must lie in (0, 1)");
  }
}

double chi2_pdf(double x, Chi2Params params) {
  if (x <= 0.0) return params.dof == 2 ? 0.5 : (params.dof < 2 ? std::numeric_limits<double>::infinity() : 0.0);
  const double k = 0.5 * params.dof;
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::log(2.0) - std::lgamma(k));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_cdf(double x, Chi2Params params) {
  check_dof(params);
  if (!(x >= 0.0)) throw Error(ErrorCode::NegativeArgument, "chi-squared CDF of negative x");
  return regularized_gamma_p(0.5 * params.dof, 0.5 * x);
}

double chi2_survival(double x, Chi2Params params) {
  check_dof(params);
  if (!(x >= 0.0)) throw Error(ErrorCode::NegativeArgument, "chi-squared survival of negative x");
  return regularized_gamma_q(0.5 * params.dof, 0.5 * x);
}

double chi2_quantile(double p, Chi2Params params) {
  check_dof(params);
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange, "quantile probability must lie in (0, 1)");
  }
  // Root of an increasing function; the upper-tail form keeps precision for
  // p close to one.
  const bool upper = p > 0.5;
  const double q = 1.0 - p;
  auto g = [&](double x) {
    return upper ? q - chi2_survival(x, params) : chi2_cdf(x, params) - p;
  };

  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(params.dof));
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    const double gx = g(x);
    if (gx == 0.0) return x;
    if (gx < 0.0) lo = x; else hi = x;
    const double slope = chi2_pdf(x, params);
    double next = x - gx / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * next || hi - lo <= 1e-15 * hi) return next;
    x = next;
  }
  return x;
}

int state_dof(int dim) {
  if (dim < 2) throw Error(ErrorCode::InvalidDimension, "state dimension must be at least 2");
  return dim * dim - 1;
}

double point_estimate_threshold(int dim, double s) {
  check_significance(s);
  return 0.5 * chi2_quantile(1.0 - s, {state_dof(dim)});
}

RegionReport state_region_report(int dim, double s, double r_k) {
  check_significance(s);
  if (!(r_k >= 0.0)) throw Error(ErrorCode::NegativeArgument, "r_k must be non-negative");
  const Chi2Params params{state_dof(dim)};
  const double t = chi2_quantile(1.0 - s, params);
  // At r_k = 0 report s exactly rather than survival(quantile(1 - s)).
  const double worst = r_k == 0.0 ? s : std::min(s, chi2_survival(t + 2.0 * r_k, params));
  return {t, s, worst};
}

double state_region_rule_of_thumb(int dim) {
  return std::sqrt(0.5 * state_dof(dim));
}

double expectation_ci_rule_of_thumb() { return std::sqrt(2.0); }

double r_threshold_for(const StoppingContext& ctx, double fraction) {
  check_significance(ctx.significance);
  switch (ctx.kind) {
    case StoppingKind::point_estimate:
      return point_estimate_threshold(ctx.dim, ctx.significance);
    case StoppingKind::state_region:
      if (!(fraction > 0.0)) throw Error(ErrorCode::InvalidStopSpec, "fraction must be positive");
      return fraction * state_region_rule_of_thumb(ctx.dim);
    case StoppingKind::expectation_ci:
      if (!(fraction > 0.0)) throw Error(ErrorCode::InvalidStopSpec, "fraction must be positive");
      return fraction * expectation_ci_rule_of_thumb();
  }
  return 0.0;
}

double ci_worst_case_pvalue(double t, double r_rho, double r_phi) {
  if (!(t >= 0.0 && r_rho >= 0.0 && r_phi >= 0.0)) {
    throw Error(ErrorCode::NegativeArgument, "threshold and bounds must be non-negative");
  }
  return chi2_survival(t + 2.0 * r_phi + 2.0 * r_rho, {1});
}

}  // namespace mlqst
