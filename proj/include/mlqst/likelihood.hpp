#pragma once

// Log-likelihood of a density matrix over a set of observed POVM elements,
// the R-matrix (gradient of the log-likelihood), and the gradient bound
// r(rho) = max eig R(rho) - N on L(rho_ML) - L(rho).

#include <cstdint>
#include <span>
#include <vector>

#include "mlqst/quantum_core.hpp"

namespace mlqst {

/// Tr(Pi rho) at or below this value is treated as an impossible event.
inline constexpr double kProbabilityFloor = 1e-300;

struct PovmElement {
  HermitianOperator op;
  std::int64_t weight = 1;  ///< number of events sharing this element
};

/// Validates weight >= 1 and op positive semidefinite within 1e-10.
PovmElement make_povm_element(HermitianOperator op, std::int64_t weight = 1);

/// Immutable collection of observed POVM elements. N = n_total() is the
/// number of events (sum of weights).
class Dataset {
 public:
  /// Validates every element (PSD, weight >= 1, common dimension).
  Dataset(int dim, std::vector<PovmElement> elements);

  int dim() const { return dim_; }
  std::span<const PovmElement> elements() const { return elements_; }
  std::int64_t n_total() const { return n_total_; }
  std::size_t size() const { return elements_.size(); }

  /// Tr(Pi_i X) for every element, X Hermitian of matching dimension.
  Eigen::VectorXd traces_with(const ComplexMatrix& x) const;
  /// sum_i c_i Pi_i.
  ComplexMatrix weighted_sum(const Eigen::VectorXd& coefficients) const;
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  int dim_;
  std::vector<PovmElement> elements_;
  std::int64_t n_total_ = 0;
  Eigen::VectorXd weights_;
  // Row i holds [Re vec(Pi_i), Im vec(Pi_i)] so traces against a Hermitian
  // matrix reduce to one real matrix-vector product.
  Eigen::MatrixXd packed_;
};

/// Tr(Pi_i rho) for every element. Throws ZeroProbability if any value is at
/// or below kProbabilityFloor, DimensionMismatch on size mismatch.
Eigen::VectorXd event_probabilities(const Dataset& data, const DensityMatrix& rho);

double log_likelihood(const Dataset& data, const DensityMatrix& rho);

/// sum_i w_i Pi_i / Tr(rho Pi_i).
HermitianOperator r_matrix(const Dataset& data, const DensityMatrix& rho);

/// d/d eps L((1-eps) rho + eps sigma) at eps = 0, i.e. Tr[sigma R(rho)] - N.
double directional_derivative(const Dataset& data, const DensityMatrix& rho,
                              const DensityMatrix& sigma);

/// r(rho) = max eig R(rho) - N, an upper bound on L(rho_ML) - L(rho).
double gradient_bound(const Dataset& data, const DensityMatrix& rho);

/// e^r, the bound on the likelihood ratio L_ML / L(rho). Overflow for r > 700.
double likelihood_ratio_bound(double r);

}  // namespace mlqst
