#pragma once

// Chi-squared distribution functions and the likelihood-ratio stopping
// thresholds built on them.
//
// Convention: a state (or expectation value) is in the confidence region at
// significance s when its statistic D = 2 [L_ML - L] is at most
// t = chi2_quantile(1 - s, dof). Because D(rho_k) <= 2 r_k, every r_k
// threshold below is t / 2 or a fraction of a chi-squared standard deviation.

namespace mlqst {

struct Chi2Params {
  int dof;
};

/// Regularized lower / upper incomplete gamma functions P(a, x), Q(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// P(chi2(dof) <= x). NegativeArgument for x < 0.
double chi2_cdf(double x, Chi2Params params);
/// P(chi2(dof) >= x), evaluated directly in the upper tail.
double chi2_survival(double x, Chi2Params params);
/// Inverse of chi2_cdf. ProbabilityOutOfRange unless 0 < p < 1.
double chi2_quantile(double p, Chi2Params params);

enum class StoppingKind { point_estimate, state_region, expectation_ci };

struct StoppingContext {
  StoppingKind kind;
  int dim;
  double significance;
};

/// Degrees of freedom of the full-state problem, d^2 - 1.
int state_dof(int dim);

/// chi2_quantile(1 - s, d^2 - 1) / 2: stopping at r_k below this keeps rho_k
/// inside the likelihood-ratio confidence region at significance s.
double point_estimate_threshold(int dim, double s);

struct RegionReport {
  double threshold_t;
  double nominal_pvalue;
  double worst_case_pvalue;
};

/// Region {rho : 2 [L(rho_k) - L(rho)] <= t} built from a non-optimal rho_k.
/// Members can have true statistic up to t + 2 r_k, hence the worst-case
/// p-value survival(t + 2 r_k).
RegionReport state_region_report(int dim, double s, double r_k);

/// sqrt((d^2 - 1) / 2), the chi2(d^2 - 1) standard deviation.
double state_region_rule_of_thumb(int dim);
/// sqrt(2), the chi2(1) standard deviation.
double expectation_ci_rule_of_thumb();

/// r_k threshold for a context. point_estimate ignores `fraction`; the other
/// two return fraction times the matching standard deviation.
double r_threshold_for(const StoppingContext& ctx, double fraction);

/// Lowest p-value an expectation-value interval built from D_lb can admit:
/// survival(t + 2 r_phi + 2 r_rho) for chi2(1).
double ci_worst_case_pvalue(double t, double r_rho, double r_phi);

}  // namespace mlqst
