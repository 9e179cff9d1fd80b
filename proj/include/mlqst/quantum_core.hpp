#pragma once

// Finite-dimensional Hilbert-space primitives: validated Hermitian
// operators, density matrices and pure states in a truncated Fock basis,
// the bosonic pure-loss channel and its dual.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mlqst/error.hpp"

namespace mlqst {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kEigenvalueTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kNormTol = 1e-12;
inline constexpr int kMaxDim = 256;

/// Throws InvalidDimension / DimensionTooLarge unless 1 <= dim <= kMaxDim.
void check_dimension(Eigen::Index dim);

class HermitianOperator {
 public:
  /// Validates self-adjointness within kHermitianTol and stores the exactly
  /// symmetrized matrix (m + m^dagger) / 2.
  static HermitianOperator from_matrix(const ComplexMatrix& m);
  static HermitianOperator identity(int dim);
  static HermitianOperator diagonal(const std::vector<double>& entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

 private:
  explicit HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class StateVector {
 public:
  /// Requires unit norm within kNormTol.
  static StateVector from_amplitudes(const ComplexVector& v);
  /// Rescales to unit norm; DegenerateState if the norm is below 1e-12.
  static StateVector normalized(const ComplexVector& v);
  static StateVector basis(int dim, int index);

  int dim() const { return static_cast<int>(v_.size()); }
  const ComplexVector& amplitudes() const { return v_; }
  Complex operator[](Eigen::Index n) const { return v_(n); }

 private:
  explicit StateVector(ComplexVector v) : v_(std::move(v)) {}
  ComplexVector v_;
};

class DensityMatrix {
 public:
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix pure(const StateVector& psi);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  HermitianOperator as_operator() const { return HermitianOperator::from_matrix(m_); }

 private:
  friend DensityMatrix make_density(const ComplexMatrix& m);
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Validates m as a state. Eigenvalues in [-1e-10, 0) are clamped to zero and
/// the trace renormalized to exactly one.
/// Errors: NotSquare, NotHermitian, NotPositive, TraceNotOne.
DensityMatrix make_density(const ComplexMatrix& m);

struct EigenPair {
  double value;
  StateVector vector;
};

/// Largest eigenvalue and a unit eigenvector of h.
EigenPair max_eig_hermitian(const HermitianOperator& h);
/// Ascending eigenvalues of h.
Eigen::VectorXd eigenvalues(const HermitianOperator& h);

/// (1/2) Tr|a - b|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Real part of Tr(rho A); exact for Hermitian arguments up to rounding.
double expectation(const DensityMatrix& rho, const HermitianOperator& a);
double purity(const DensityMatrix& rho);
double mean_photon_number(const DensityMatrix& rho);
double fidelity_with_pure(const DensityMatrix& rho, const StateVector& psi);

/// Coherent state |alpha> truncated to `dim` Fock levels and renormalized.
StateVector coherent_state(Complex alpha, int dim);
/// Normalized |alpha> + |-alpha> in the truncated Fock basis.
StateVector even_cat_state(Complex alpha, int dim);

/// Kraus operators A_k, k = 0..dim-1, of the pure-loss channel with
/// transmissivity eta: <n-k|A_k|n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k).
std::vector<ComplexMatrix> loss_kraus_operators(double eta, int dim);

DensityMatrix loss_channel(const DensityMatrix& rho, double eta);
/// Heisenberg-picture image sum_k A_k^dagger op A_k.
HermitianOperator adjoint_loss_on_operator(const HermitianOperator& op, double eta);

}  // namespace mlqst
