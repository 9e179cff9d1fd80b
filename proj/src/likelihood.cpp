#include "mlqst/likelihood.hpp"

#include <cmath>
#include <sstream>

namespace mlqst {

PovmElement make_povm_element(HermitianOperator op, std::int64_t weight) {
  if (weight < 1) {
    throw Error(ErrorCode::InvalidDataset, "POVM element weight must be at least 1");
  }
  if (eigenvalues(op).minCoeff() < -kEigenvalueTol) {
    throw Error(ErrorCode::NotPositive, "POVM element is not positive semidefinite");
  }
  return PovmElement{std::move(op), weight};
}

Dataset::Dataset(int dim, std::vector<PovmElement> elements)
    : dim_(dim), elements_(std::move(elements)) {
  check_dimension(dim);
  if (elements_.empty()) {
    throw Error(ErrorCode::InvalidDataset, "dataset has no elements");
  }
  const Eigen::Index d2 = static_cast<Eigen::Index>(dim) * dim;
  const auto count = static_cast<Eigen::Index>(elements_.size());
  packed_.resize(count, 2 * d2);
  weights_.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const PovmElement& e = elements_[static_cast<size_t>(i)];
    if (e.op.dim() != dim) {
      std::ostringstream os;
      os << "element " << i << " has dimension " << e.op.dim() << ", expected " << dim;
      throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (e.weight < 1) {
      throw Error(ErrorCode::InvalidDataset, "POVM element weight must be at least 1");
    }
    if (eigenvalues(e.op).minCoeff() < -kEigenvalueTol) {
      std::ostringstream os;
      os << "element " << i << " is not positive semidefinite";
      throw Error(ErrorCode::NotPositive, os.str());
    }
    const Eigen::Map<const Eigen::VectorXcd> flat(e.op.matrix().data(), d2);
    packed_.row(i).head(d2) = flat.real();
    packed_.row(i).tail(d2) = flat.imag();
    weights_(i) = static_cast<double>(e.weight);
    n_total_ += e.weight;
  }
}

Eigen::VectorXd Dataset::traces_with(const ComplexMatrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "matrix dimension does not match dataset");
  }
  const Eigen::Index d2 = static_cast<Eigen::Index>(dim_) * dim_;
  const Eigen::Map<const Eigen::VectorXcd> flat(x.data(), d2);
  Eigen::VectorXd packed_x(2 * d2);
  packed_x.head(d2) = flat.real();
  packed_x.tail(d2) = flat.imag();
  return packed_ * packed_x;
}

ComplexMatrix Dataset::weighted_sum(const Eigen::VectorXd& coefficients) const {
  const Eigen::Index d2 = static_cast<Eigen::Index>(dim_) * dim_;
  const Eigen::VectorXd flat = packed_.transpose() * coefficients;
  ComplexMatrix out(dim_, dim_);
  for (Eigen::Index k = 0; k < d2; ++k) out.data()[k] = Complex(flat(k), flat(d2 + k));
  return out;
}

Eigen::VectorXd event_probabilities(const Dataset& data, const DensityMatrix& rho) {
  if (rho.dim() != data.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state dimension does not match dataset");
  }
  Eigen::VectorXd p = data.traces_with(rho.matrix());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) > kProbabilityFloor)) {
      std::ostringstream os;
      os << "event " << i << " has probability " << p(i) << " under the candidate state";
      throw Error(ErrorCode::ZeroProbability, os.str());
    }
  }
  return p;
}

double log_likelihood(const Dataset& data, const DensityMatrix& rho) {
  const Eigen::VectorXd p = event_probabilities(data, rho);
  return data.weights().dot(p.array().log().matrix());
}

HermitianOperator r_matrix(const Dataset& data, const DensityMatrix& rho) {
  const Eigen::VectorXd p = event_probabilities(data, rho);
  const Eigen::VectorXd c = data.weights().cwiseQuotient(p);
  return HermitianOperator::from_matrix(data.weighted_sum(c));
}

double directional_derivative(const Dataset& data, const DensityMatrix& rho,
                              const DensityMatrix& sigma) {
  const HermitianOperator r = r_matrix(data, rho);
  return expectation(sigma, r) - static_cast<double>(data.n_total());
}

double gradient_bound(const Dataset& data, const DensityMatrix& rho) {
  return max_eig_hermitian(r_matrix(data, rho)).value - static_cast<double>(data.n_total());
}

double likelihood_ratio_bound(double r) {
  if (!std::isfinite(r)) {
    throw Error(ErrorCode::Overflow, "likelihood ratio bound of a non-finite r");
  }
  if (r > 700.0) {
    throw Error(ErrorCode::Overflow, "e^r overflows for r > 700");
  }
  return std::exp(r);
}

}  // namespace mlqst
