#pragma once

// Iterative likelihood maximizers instrumented with the gradient bound r_k.
//
// Both maximizers work on the objective K(rho) = L(rho) + lambda Tr(rho A).
// The unconstrained problem is lambda = 0; the gradient of K is
// M = R(rho) + lambda A, and r = max eig M - N - lambda Tr(rho A) bounds
// max_sigma K(sigma) - K(rho).

#include <cstdint>
#include <optional>
#include <vector>

#include "mlqst/likelihood.hpp"

namespace mlqst {

enum class Algorithm { rhor, gradient_ascent };
enum class StepKind { rhor, gradient_ascent };
enum class StopReason { rule_satisfied, max_iters, stalled };

std::string_view to_string(Algorithm a);
std::string_view to_string(StepKind s);
std::string_view to_string(StopReason s);

struct IterationRecord {
  std::int64_t k = 0;
  double loglik = 0.0;
  /// K at this iterate; equals loglik when there is no linear term.
  double objective = 0.0;
  double r_k = 0.0;
  std::optional<double> trace_dist_prev;
  StepKind step_kind = StepKind::rhor;
  std::optional<double> epsilon;
};

struct StopSpec {
  double r_threshold = 1e-6;
  std::int64_t max_iters = 10000;
  double stall_trace_dist = 1e-12;
  int stall_window = 50;

  /// InvalidStopSpec unless r_threshold > 0, max_iters >= 1, stall_window >= 1.
  void validate() const;
};

struct FitResult {
  DensityMatrix state;
  std::vector<IterationRecord> trace;
  StopReason stop_reason;
  double final_r;
  double final_loglik;
};

/// The lambda A term of K. A zero lambda reproduces plain likelihood.
struct LinearTerm {
  double lambda;
  HermitianOperator observable;
};

/// R rho R / Tr(R rho R).
/// Errors: ZeroProbability, DegenerateUpdate (normalization below 1e-300).
DensityMatrix rhor_step(const Dataset& data, const DensityMatrix& rho);
/// M rho M / Tr(M rho M) with M = R + lambda A. Additionally
/// NonPositiveUpdate when the top eigenvalue of M is not positive.
DensityMatrix rhor_step(const Dataset& data, const DensityMatrix& rho,
                        const LinearTerm& term);

struct LineSearchStep {
  DensityMatrix state;
  double epsilon;
};

/// Moves toward the top eigenvector sigma of the gradient:
/// (1 - eps) rho + eps |sigma><sigma|, eps in [0, 1] chosen by golden-section
/// search (tolerance 1e-10). Never decreases the objective.
LineSearchStep gradient_ascent_step(const Dataset& data, const DensityMatrix& rho);
LineSearchStep gradient_ascent_step(const Dataset& data, const DensityMatrix& rho,
                                    const LinearTerm& term);

/// Iterates until r_k <= r_threshold, max_iters, or a stall. For rhor, any
/// update that would lower the objective is replaced by a line-search step,
/// so the recorded objective is non-decreasing. rho0 defaults to I/d.
FitResult maximize(const Dataset& data, Algorithm algo, const StopSpec& stop,
                   const std::optional<DensityMatrix>& rho0 = std::nullopt);
FitResult maximize(const Dataset& data, Algorithm algo, const StopSpec& stop,
                   const std::optional<DensityMatrix>& rho0, const LinearTerm& term);

}  // namespace mlqst
