#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mlqst/quantum_core.hpp"
#include "test_support.hpp"

using namespace mlqst;
using namespace mlqst::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an mlqst::Error");
  return ErrorCode::ConfigError;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

TEST_CASE("make_density accepts valid states") {
  const DensityMatrix mixed = make_density(ComplexMatrix::Identity(2, 2) / 2.0);
  const auto ev = eigenvalues(mixed.as_operator());
  CHECK(ev(0) == doctest::Approx(0.5));
  CHECK(ev(1) == doctest::Approx(0.5));
  CHECK_NOTHROW(diag_state({0.75, 0.25}));
}

TEST_CASE("make_density rejects invalid matrices") {
  CHECK(code_of([] { diag_state({1.1, -0.1}); }) == ErrorCode::NotPositive);
  CHECK(code_of([] { diag_state({0.5, 0.4}); }) == ErrorCode::TraceNotOne);
  ComplexMatrix m = ComplexMatrix::Identity(2, 2) / 2.0;
  m(0, 1) = 0.1;
  CHECK(code_of([&] { make_density(m); }) == ErrorCode::NotHermitian);
  CHECK(code_of([] { make_density(ComplexMatrix::Zero(2, 3)); }) == ErrorCode::NotSquare);
  CHECK(code_of([] { DensityMatrix::maximally_mixed(kMaxDim + 1); }) == ErrorCode::DimensionTooLarge);
}

TEST_CASE("make_density clamps negative dust and renormalizes") {
  const DensityMatrix rho = diag_state({1.0 + 5e-11, -5e-11});
  CHECK(rho.matrix()(1, 1).real() == 0.0);
  CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("max_eig_hermitian on small spectra") {
  {
    const auto top = max_eig_hermitian(HermitianOperator::diagonal({6.0, 2.0}));
    CHECK(top.value == doctest::Approx(6.0));
    CHECK(std::abs(top.vector[0]) == doctest::Approx(1.0));
  }
  {
    const auto top = max_eig_hermitian(HermitianOperator::identity(3));
    CHECK(top.value == doctest::Approx(1.0));
    CHECK(top.vector.amplitudes().norm() == doctest::Approx(1.0));
  }
  {
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    const auto top = max_eig_hermitian(HermitianOperator::from_matrix(x));
    CHECK(top.value == doctest::Approx(1.0));
    CHECK(std::abs(top.vector[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(top.vector[0] - top.vector[1]) < 1e-12);
  }
}

TEST_CASE("max_eig_hermitian residual on random Hermitian matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 32;
    const HermitianOperator h = random_hermitian(rng, dim);
    const auto top = max_eig_hermitian(h);
    const ComplexVector& v = top.vector.amplitudes();
    const double residual = (h.matrix() * v - top.value * v).norm();
    const double scale = h.matrix().operatorNorm();
    CHECK(residual <= 1e-9 * scale);
    CHECK(top.value >= eigenvalues(h).maxCoeff() - 1e-12 * scale);
  }
}

TEST_CASE("trace_distance examples") {
  const DensityMatrix a = diag_state({0.75, 0.25});
  const DensityMatrix b = DensityMatrix::maximally_mixed(2);
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
  CHECK(trace_distance(diag_state({1.0, 0.0}), diag_state({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(trace_distance(a, b) == doctest::Approx(0.25));
  CHECK(code_of([&] { trace_distance(a, DensityMatrix::maximally_mixed(3)); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("trace_distance is a metric on random triples") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 5;
    const auto a = random_density(rng, dim);
    const auto b = trial % 3 == 0 ? random_pure(rng, dim) : random_density(rng, dim);
    const auto c = random_density(rng, dim);
    const double ab = trace_distance(a, b);
    CHECK(ab == doctest::Approx(trace_distance(b, a)).epsilon(1e-10));
    CHECK(trace_distance(a, c) <= ab + trace_distance(b, c) + 1e-10);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("coherent_state amplitudes follow the Poisson law") {
  const StateVector vac = coherent_state(0.0, 5);
  CHECK(std::abs(vac[0]) == doctest::Approx(1.0));
  for (int n = 1; n < 5; ++n) CHECK(std::abs(vac[n]) == 0.0);

  // Truncated at 11 levels: amplitude_n = e^{-1/2}/sqrt(n!) / norm.
  double norm2 = 0.0;
  for (int n = 0; n < 11; ++n) norm2 += std::exp(-1.0) / factorial(n);
  const StateVector psi = coherent_state(1.0, 11);
  for (int n = 0; n < 11; ++n) {
    CHECK(psi[n].real() == doctest::Approx(std::exp(-0.5) / std::sqrt(factorial(n)) / std::sqrt(norm2)).epsilon(1e-13));
  }

  const StateVector wide = coherent_state(1.0, 40);
  double total = 0.0;
  for (int n = 0; n < 40; ++n) {
    const double poisson = std::exp(-1.0) / factorial(n);
    CHECK(std::abs(std::norm(wide[n]) - poisson) <= 1e-12);
    total += std::norm(wide[n]);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("even_cat_state parity and amplitude ratio") {
  const StateVector vac = even_cat_state(0.0, 6);
  CHECK(std::abs(vac[0]) == doctest::Approx(1.0));
  const StateVector cat = even_cat_state(1.0, 11);
  for (int n = 1; n < 11; n += 2) CHECK(cat[n] == Complex(0.0, 0.0));
  CHECK((cat[2] / cat[0]).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(cat.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("loss_channel examples") {
  std::mt19937_64 rng(3);
  const auto rho = random_density(rng, 6);
  CHECK((loss_channel(rho, 1.0).matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-14);

  const auto vac = DensityMatrix::pure(StateVector::basis(6, 0));
  CHECK((loss_channel(vac, 0.3).matrix() - vac.matrix()).cwiseAbs().maxCoeff() < 1e-14);

  // Coherent states are mapped to attenuated coherent states.
  const auto coh = DensityMatrix::pure(coherent_state(1.0, 20));
  const auto out = loss_channel(coh, 0.8);
  CHECK(fidelity_with_pure(out, coherent_state(std::sqrt(0.8), 20)) >= 1.0 - 1e-10);

  CHECK(code_of([&] { loss_channel(rho, 1.2); }) == ErrorCode::EtaOutOfRange);
  CHECK(code_of([&] { loss_channel(rho, -0.1); }) == ErrorCode::EtaOutOfRange);
}

TEST_CASE("loss_channel preserves trace and positivity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 11;
    const auto rho = trial % 4 == 0 ? random_pure(rng, dim) : random_density(rng, dim);
    const auto out = loss_channel(rho, u(rng));
    CHECK(std::abs(out.matrix().trace().real() - 1.0) <= 1e-12);
    CHECK(eigenvalues(out.as_operator()).minCoeff() >= -1e-10);
  }
}

TEST_CASE("adjoint_loss_on_operator is the dual channel") {
  CHECK((adjoint_loss_on_operator(HermitianOperator::identity(7), 0.4).matrix() -
         ComplexMatrix::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(23);
  const auto op = random_hermitian(rng, 5);
  CHECK((adjoint_loss_on_operator(op, 1.0).matrix() - op.matrix()).cwiseAbs().maxCoeff() < 1e-14);

  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 10;
    const double eta = trial == 0 ? 0.7 : u(rng);
    const auto a = random_hermitian(rng, dim);
    const auto rho = random_density(rng, dim);
    const double heisenberg = expectation(rho, adjoint_loss_on_operator(a, eta));
    const double schrodinger = expectation(loss_channel(rho, eta), a);
    CHECK(std::abs(heisenberg - schrodinger) <= 1e-10);
  }
  CHECK(code_of([&] { adjoint_loss_on_operator(op, 2.0); }) == ErrorCode::EtaOutOfRange);
}

TEST_CASE("StateVector validation") {
  ComplexVector v(2);
  v << 1.0, 1.0;
  CHECK(code_of([&] { StateVector::from_amplitudes(v); }) == ErrorCode::NotNormalized);
  CHECK(code_of([] { StateVector::normalized(ComplexVector::Zero(3)); }) == ErrorCode::DegenerateState);
  CHECK(StateVector::normalized(v).amplitudes().norm() == doctest::Approx(1.0));
}
