#include <doctest.h>

#include <cmath>

#include "mlqst/likelihood.hpp"
#include "test_support.hpp"

using namespace mlqst;
using namespace mlqst::testing;

namespace {

Dataset identity_dataset(int dim, int weight) {
  std::vector<PovmElement> e;
  e.push_back(PovmElement{HermitianOperator::identity(dim), weight});
  return Dataset(dim, std::move(e));
}

// Independent evaluation: explicit trace per element, no packing.
double direct_loglik(const Dataset& data, const ComplexMatrix& rho) {
  double total = 0.0;
  for (const auto& e : data.elements()) {
    total += static_cast<double>(e.weight) * std::log((e.op.matrix() * rho).trace().real());
  }
  return total;
}

}  // namespace

TEST_CASE("log_likelihood closed-form values") {
  const Dataset ones = identity_dataset(3, 7);
  std::mt19937_64 rng(1);
  CHECK(log_likelihood(ones, random_density(rng, 3)) == doctest::Approx(0.0));

  const Dataset data = qubit_three_one();
  CHECK(data.n_total() == 4);
  CHECK(log_likelihood(data, DensityMatrix::maximally_mixed(2)) == doctest::Approx(4.0 * std::log(0.5)));
  CHECK(log_likelihood(data, DensityMatrix::maximally_mixed(2)) == doctest::Approx(-2.77259).epsilon(1e-5));
  CHECK(log_likelihood(data, diag_state({0.75, 0.25})) == doctest::Approx(-2.24934).epsilon(1e-5));
}

TEST_CASE("log_likelihood matches a direct per-element sum") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 4;
    const Dataset data = random_dataset(rng, dim, 40);
    const auto rho = random_density(rng, dim);
    CHECK(log_likelihood(data, rho) == doctest::Approx(direct_loglik(data, rho.matrix())).epsilon(1e-12));
  }
}

TEST_CASE("log_likelihood error paths") {
  const Dataset data = qubit_three_one();
  try {
    log_likelihood(data, diag_state({0.0, 1.0}));
    FAIL("expected ZeroProbability");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroProbability);
  }
  try {
    log_likelihood(data, DensityMatrix::maximally_mixed(3));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("Dataset validation") {
  std::vector<PovmElement> bad;
  bad.push_back(PovmElement{HermitianOperator::diagonal({1.0, -0.5}), 1});
  CHECK_THROWS_AS(Dataset(2, std::move(bad)), Error);
  std::vector<PovmElement> zero_weight;
  zero_weight.push_back(PovmElement{HermitianOperator::identity(2), 0});
  CHECK_THROWS_AS(Dataset(2, std::move(zero_weight)), Error);
  std::vector<PovmElement> mixed_dim;
  mixed_dim.push_back(PovmElement{HermitianOperator::identity(2), 1});
  mixed_dim.push_back(PovmElement{HermitianOperator::identity(3), 1});
  CHECK_THROWS_AS(Dataset(2, std::move(mixed_dim)), Error);
  CHECK_THROWS_AS(Dataset(2, {}), Error);
}

TEST_CASE("r_matrix examples") {
  const auto r_id = r_matrix(identity_dataset(2, 5), DensityMatrix::maximally_mixed(2));
  CHECK((r_id.matrix() - 5.0 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  const Dataset data = qubit_three_one();
  const auto r_mixed = r_matrix(data, DensityMatrix::maximally_mixed(2));
  CHECK(r_mixed.matrix()(0, 0).real() == doctest::Approx(6.0));
  CHECK(r_mixed.matrix()(1, 1).real() == doctest::Approx(2.0));
  CHECK(std::abs(r_mixed.matrix()(0, 1)) == 0.0);

  const auto r_ml = r_matrix(data, diag_state({0.75, 0.25}));
  CHECK(r_ml.matrix()(0, 0).real() == doctest::Approx(4.0));
  CHECK(r_ml.matrix()(1, 1).real() == doctest::Approx(4.0));
}

TEST_CASE("Tr[rho R(rho)] = N") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 4;
    const Dataset data = random_dataset(rng, dim, 50);
    const auto rho = random_density(rng, dim);
    const double n = static_cast<double>(data.n_total());
    CHECK(std::abs(expectation(rho, r_matrix(data, rho)) - n) <= 1e-8 * n);
  }
}

TEST_CASE("directional_derivative examples") {
  const Dataset data = qubit_three_one();
  const auto mixed = DensityMatrix::maximally_mixed(2);
  CHECK(directional_derivative(data, mixed, mixed) == doctest::Approx(0.0));
  CHECK(directional_derivative(data, mixed, diag_state({1.0, 0.0})) == doctest::Approx(2.0));
}

TEST_CASE("directional_derivative matches central finite differences") {
  std::mt19937_64 rng(4);
  const double h = 1e-5;
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 3;
    const Dataset data = random_dataset(rng, dim, 50);
    const auto rho = random_density(rng, dim, 0.2);
    const auto sigma = trial % 2 ? random_pure(rng, dim) : random_density(rng, dim);
    const double analytic = directional_derivative(data, rho, sigma);
    const double numeric =
        (direct_loglik(data, mix(rho, sigma, h)) - direct_loglik(data, mix(rho, sigma, -h))) / (2.0 * h);
    CHECK(std::abs(numeric - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("gradient_bound examples") {
  std::mt19937_64 rng(5);
  CHECK(gradient_bound(identity_dataset(3, 9), random_density(rng, 3)) == doctest::Approx(0.0).epsilon(1e-12));
  const Dataset data = qubit_three_one();
  CHECK(gradient_bound(data, DensityMatrix::maximally_mixed(2)) == doctest::Approx(2.0));
  CHECK(std::abs(gradient_bound(data, diag_state({0.75, 0.25}))) < 1e-12);
}

TEST_CASE("gradient_bound dominates every likelihood increase") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 2 + trial % 3;
    const Dataset data = random_dataset(rng, dim, 50);
    const auto rho = random_density(rng, dim);
    const auto sigma = trial % 3 == 0 ? random_pure(rng, dim) : random_density(rng, dim);
    const double r = gradient_bound(data, rho);
    const double n = static_cast<double>(data.n_total());
    CHECK(r >= -1e-8 * n);
    CHECK(r >= directional_derivative(data, rho, sigma) - 1e-9);
    if (trial % 3 != 0) CHECK(log_likelihood(data, sigma) - log_likelihood(data, rho) <= r + 1e-9);
  }
}

TEST_CASE("log_likelihood is concave along segments") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = 2 + trial % 3;
    const Dataset data = random_dataset(rng, dim, 30);
    const auto rho = random_density(rng, dim);
    const auto sigma = random_density(rng, dim);
    const double eps = u(rng);
    const double mid = log_likelihood(data, make_density(mix(rho, sigma, eps)));
    const double chord = (1.0 - eps) * log_likelihood(data, rho) + eps * log_likelihood(data, sigma);
    CHECK(mid >= chord - 1e-10);
  }
}

TEST_CASE("likelihood_ratio_bound") {
  CHECK(likelihood_ratio_bound(0.0) == 1.0);
  CHECK(likelihood_ratio_bound(2.0) == doctest::Approx(7.389056));
  CHECK(likelihood_ratio_bound(0.1) == doctest::Approx(1.105171));
  CHECK_THROWS_AS(likelihood_ratio_bound(701.0), Error);
}
