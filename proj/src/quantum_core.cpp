#include "mlqst/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlqst {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::TraceNotOne: return "TraceNotOne";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::EtaOutOfRange: return "EtaOutOfRange";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DegenerateUpdate: return "DegenerateUpdate";
    case ErrorCode::NonPositiveUpdate: return "NonPositiveUpdate";
    case ErrorCode::InvalidStopSpec: return "InvalidStopSpec";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

void check_dimension(Eigen::Index dim) {
  if (dim < 1) {
    throw Error(ErrorCode::InvalidDimension, "dimension must be at least 1");
  }
  if (dim > kMaxDim) {
    std::ostringstream os;
    os << "dimension " << dim << " exceeds the supported maximum " << kMaxDim;
    throw Error(ErrorCode::DimensionTooLarge, os.str());
  }
}

namespace {

void check_square(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NotSquare, "matrix is not square");
  }
  check_dimension(m.rows());
}

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw Error(ErrorCode::EtaOutOfRange, "transmissivity must lie in [0, 1]");
  }
}

Eigen::SelfAdjointEigenSolver<ComplexMatrix> solve(const ComplexMatrix& m,
                                                    bool vectors) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::SolverFailure, "Hermitian eigensolver did not converge");
  }
  return es;
}

}  // namespace

HermitianOperator HermitianOperator::from_matrix(const ComplexMatrix& m) {
  check_square(m);
  if (hermiticity_defect(m) > kHermitianTol) {
    throw Error(ErrorCode::NotHermitian, "operator is not self-adjoint");
  }
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

HermitianOperator HermitianOperator::identity(int dim) {
  check_dimension(dim);
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(const std::vector<double>& entries) {
  check_dimension(static_cast<Eigen::Index>(entries.size()));
  const auto d = static_cast<Eigen::Index>(entries.size());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = entries[static_cast<size_t>(i)];
  return HermitianOperator(std::move(m));
}

StateVector StateVector::from_amplitudes(const ComplexVector& v) {
  check_dimension(v.size());
  if (std::abs(v.norm() - 1.0) > kNormTol) {
    throw Error(ErrorCode::NotNormalized, "state vector does not have unit norm");
  }
  return StateVector(v);
}

StateVector StateVector::normalized(const ComplexVector& v) {
  check_dimension(v.size());
  const double n = v.norm();
  if (!(n >= 1e-12)) {
    throw Error(ErrorCode::DegenerateState, "cannot normalize a (near-)zero vector");
  }
  return StateVector(v / n);
}

StateVector StateVector::basis(int dim, int index) {
  check_dimension(dim);
  if (index < 0 || index >= dim) {
    throw Error(ErrorCode::InvalidDimension, "basis index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  check_dimension(dim);
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const ComplexVector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix make_density(const ComplexMatrix& m) {
  check_square(m);
  if (hermiticity_defect(m) > kHermitianTol) {
    throw Error(ErrorCode::NotHermitian, "density matrix is not self-adjoint");
  }
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (!(std::abs(tr - 1.0) <= kTraceTol)) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " differs from 1";
    throw Error(ErrorCode::TraceNotOne, os.str());
  }

  const auto values = solve(h, false).eigenvalues();
  const double min_eig = values.minCoeff();
  if (min_eig < -kEigenvalueTol) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << min_eig;
    throw Error(ErrorCode::NotPositive, os.str());
  }
  if (min_eig < 0.0) {
    const auto es = solve(h, true);
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
    h = es.eigenvectors() * clamped.cast<Complex>().asDiagonal() *
        es.eigenvectors().adjoint();
    h = 0.5 * (h + h.adjoint()).eval();
  }
  h /= h.trace().real();
  return DensityMatrix(std::move(h));
}

EigenPair max_eig_hermitian(const HermitianOperator& h) {
  const auto es = solve(h.matrix(), true);
  const Eigen::Index top = h.dim() - 1;
  return {es.eigenvalues()(top), StateVector::normalized(es.eigenvectors().col(top))};
}

Eigen::VectorXd eigenvalues(const HermitianOperator& h) {
  return solve(h.matrix(), false).eigenvalues();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "trace distance of states with different dimensions");
  }
  const ComplexMatrix diff = a.matrix() - b.matrix();
  const double d = 0.5 * solve(0.5 * (diff + diff.adjoint()), false).eigenvalues().cwiseAbs().sum();
  return std::clamp(d, 0.0, 1.0);
}

double expectation(const DensityMatrix& rho, const HermitianOperator& a) {
  if (rho.dim() != a.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
  }
  // Tr(rho A) = sum_ij rho_ij conj(A_ij) for Hermitian A.
  return (rho.matrix().array() * a.matrix().array().conjugate()).sum().real();
}

double purity(const DensityMatrix& rho) {
  return rho.matrix().cwiseAbs2().sum();
}

double mean_photon_number(const DensityMatrix& rho) {
  double n = 0.0;
  for (int i = 0; i < rho.dim(); ++i) n += i * rho.matrix()(i, i).real();
  return n;
}

double fidelity_with_pure(const DensityMatrix& rho, const StateVector& psi) {
  if (rho.dim() != psi.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state dimensions differ");
  }
  const ComplexVector& v = psi.amplitudes();
  return (v.adjoint() * rho.matrix() * v)(0, 0).real();
}

namespace {

ComplexVector coherent_amplitudes(Complex alpha, int dim) {
  ComplexVector v(dim);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

}  // namespace

StateVector coherent_state(Complex alpha, int dim) {
  check_dimension(dim);
  return StateVector::normalized(coherent_amplitudes(alpha, dim));
}

StateVector even_cat_state(Complex alpha, int dim) {
  check_dimension(dim);
  ComplexVector v = coherent_amplitudes(alpha, dim) + coherent_amplitudes(-alpha, dim);
  // Parity cancellation is exact in exact arithmetic; remove rounding residue.
  for (int n = 1; n < dim; n += 2) v(n) = 0.0;
  return StateVector::normalized(v);
}

std::vector<ComplexMatrix> loss_kraus_operators(double eta, int dim) {
  check_eta(eta);
  check_dimension(dim);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(static_cast<size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
    for (int n = k; n < dim; ++n) {
      // log C(n,k) via lgamma keeps large n finite.
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      const double pe = std::pow(eta, n - k);
      const double pl = std::pow(1.0 - eta, k);
      a(n - k, n) = std::sqrt(std::exp(log_binom) * pe * pl);
    }
    kraus.push_back(std::move(a));
  }
  return kraus;
}

DensityMatrix loss_channel(const DensityMatrix& rho, double eta) {
  const auto kraus = loss_kraus_operators(eta, rho.dim());
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& a : kraus) out.noalias() += a * rho.matrix() * a.adjoint();
  return make_density(out);
}

HermitianOperator adjoint_loss_on_operator(const HermitianOperator& op, double eta) {
  const auto kraus = loss_kraus_operators(eta, op.dim());
  ComplexMatrix out = ComplexMatrix::Zero(op.dim(), op.dim());
  for (const auto& a : kraus) out.noalias() += a.adjoint() * op.matrix() * a;
  return HermitianOperator::from_matrix(out);
}

}  // namespace mlqst
