#pragma once

// Likelihood-ratio confidence intervals for f = Tr(rho A).
//
// The profile likelihood max{L(rho) : Tr(rho A) = f} is traced out by
// maximizing K(rho, lambda) = L(rho) + lambda Tr(rho A) for a sequence of
// multipliers; f at the maximizer is non-decreasing in lambda. Each accepted
// endpoint carries the certificates
//   D_lb = 2 [L(rho_k) - L(phi) - r(phi)]  <=  D  <=  D_ub = 2 [L(rho_k) + r(rho_k) - L(phi)].

#include <array>
#include <optional>

#include "mlqst/optimizer.hpp"

namespace mlqst {

/// Upper limit on D_lb - t accepted for an endpoint.
inline constexpr double kCiSlack = 0.1;
inline constexpr double kMaxAbsLambda = 1e6;

struct ConstrainedFit {
  DensityMatrix state;
  double lambda;
  double f_value;
  double loglik;
  double r_phi;
  StopReason stop_reason;
  std::int64_t iterations;
};

struct EndpointReport {
  double lambda;
  double f;
  double d_lb;
  double d_ub;
  double pvalue_lb;  ///< survival(D_ub): lowest p-value the endpoint can have
  double pvalue_ub;  ///< survival(D_lb)
};

struct ConfidenceInterval {
  double f_lo;
  double f_hi;
  double s;
  double t;
  EndpointReport lower;
  EndpointReport upper;
};

double k_objective(const Dataset& data, const DensityMatrix& rho, double lambda,
                   const HermitianOperator& a);

/// max eig[R(rho) + lambda A] - N - lambda Tr(rho A): bounds K(sigma) - K(rho)
/// over all states sigma, and so L(phi_ML,f) - L(rho) at f = Tr(rho A).
double constrained_bound(const Dataset& data, const DensityMatrix& rho, double lambda,
                         const HermitianOperator& a);

/// Maximizes K(., lambda) until constrained_bound <= stop.r_threshold.
ConstrainedFit maximize_constrained(const Dataset& data, double lambda,
                                    const HermitianOperator& a, const StopSpec& stop,
                                    const std::optional<DensityMatrix>& rho0 = std::nullopt,
                                    Algorithm algo = Algorithm::rhor);

/// Searches lambda > 0 and lambda < 0 for endpoints with t <= D_lb <= t + kCiSlack,
/// t = chi2_quantile(1 - s, 1). Constrained fits start from unconstrained.state.
/// BracketFailure if |lambda| passes kMaxAbsLambda before D_lb reaches t.
ConfidenceInterval expectation_ci(const Dataset& data, const HermitianOperator& a, double s,
                                  const FitResult& unconstrained, const StopSpec& stop);

/// True iff D_lb - tol <= exact_d[i] <= D_ub + tol at the lower (i = 0) and
/// upper (i = 1) endpoints.
bool sandwich_check(const ConfidenceInterval& ci, const std::array<double, 2>& exact_d,
                    double tol = 0.0);

}  // namespace mlqst
