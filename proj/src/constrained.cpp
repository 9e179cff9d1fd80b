#include "mlqst/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlqst/confidence.hpp"

namespace mlqst {

namespace {

constexpr int kMaxBisections = 100;

void check_observable(const Dataset& data, const HermitianOperator& a) {
  if (a.dim() != data.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "observable dimension does not match dataset");
  }
}

}  // namespace

double k_objective(const Dataset& data, const DensityMatrix& rho, double lambda,
                   const HermitianOperator& a) {
  check_observable(data, a);
  return log_likelihood(data, rho) + lambda * expectation(rho, a);
}

double constrained_bound(const Dataset& data, const DensityMatrix& rho, double lambda,
                         const HermitianOperator& a) {
  check_observable(data, a);
  const HermitianOperator r = r_matrix(data, rho);
  const ComplexMatrix m = r.matrix() + lambda * a.matrix();
  const double top = max_eig_hermitian(HermitianOperator::from_matrix(m)).value;
  return top - static_cast<double>(data.n_total()) - lambda * expectation(rho, a);
}

ConstrainedFit maximize_constrained(const Dataset& data, double lambda,
                                    const HermitianOperator& a, const StopSpec& stop,
                                    const std::optional<DensityMatrix>& rho0, Algorithm algo) {
  check_observable(data, a);
  FitResult fit = maximize(data, algo, stop, rho0, LinearTerm{lambda, a});
  const double f = expectation(fit.state, a);
  const auto iterations = static_cast<std::int64_t>(fit.trace.size());
  return ConstrainedFit{std::move(fit.state), lambda,          f, fit.final_loglik,
                        fit.final_r,          fit.stop_reason, iterations};
}

ConfidenceInterval expectation_ci(const Dataset& data, const HermitianOperator& a, double s,
                                  const FitResult& unconstrained, const StopSpec& stop) {
  check_observable(data, a);
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange, "significance must lie in (0, 1)");
  }
  const double t = chi2_quantile(1.0 - s, {1});
  const double loglik_k = unconstrained.final_loglik;
  const double r_k = unconstrained.final_r;

  auto fit_at = [&](double lambda) {
    return maximize_constrained(data, lambda, a, stop, unconstrained.state);
  };
  auto lower_stat = [&](const ConstrainedFit& fit) {
    return 2.0 * (loglik_k - fit.loglik - fit.r_phi);
  };

  auto search = [&](double direction) {
    double inside = 0.0;  // multiplier whose fit has D_lb < t
    double outside = direction;
    ConstrainedFit best = fit_at(outside);
    while (lower_stat(best) < t) {
      inside = outside;
      outside *= 2.0;
      if (std::abs(outside) > kMaxAbsLambda) {
        std::ostringstream os;
        os << "no multiplier with |lambda| <= " << kMaxAbsLambda << " in the "
           << (direction > 0 ? "positive" : "negative")
           << " direction reaches D_lb >= t; the observable may be flat near the maximum";
        throw Error(ErrorCode::BracketFailure, os.str());
      }
      best = fit_at(outside);
    }
    for (int i = 0; i < kMaxBisections && lower_stat(best) > t + kCiSlack; ++i) {
      const double mid = 0.5 * (inside + outside);
      ConstrainedFit fit = fit_at(mid);
      if (lower_stat(fit) < t) {
        inside = mid;
      } else {
        outside = mid;
        best = std::move(fit);
      }
    }
    const double d_lb = lower_stat(best);
    const double d_ub = 2.0 * (loglik_k + r_k - best.loglik);
    return EndpointReport{best.lambda,
                          best.f_value,
                          d_lb,
                          d_ub,
                          chi2_survival(std::max(d_ub, 0.0), {1}),
                          chi2_survival(std::max(d_lb, 0.0), {1})};
  };

  const EndpointReport upper = search(1.0);
  const EndpointReport lower = search(-1.0);
  return ConfidenceInterval{lower.f, upper.f, s, t, lower, upper};
}

bool sandwich_check(const ConfidenceInterval& ci, const std::array<double, 2>& exact_d,
                    double tol) {
  const auto holds = [tol](const EndpointReport& e, double d) {
    return e.d_lb - tol <= d && d <= e.d_ub + tol;
  };
  return holds(ci.lower, exact_d[0]) && holds(ci.upper, exact_d[1]);
}

}  // namespace mlqst
