#include "mlqst/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mlqst {

void Scenario::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidScenario, what); };
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) fail("transmissivity must lie in [0, 1]");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) fail("efficiency must lie in (0, 1]");
  if (dim < 2 || dim > kMaxDim) fail("dim must lie in [2, 256]");
  if (n_samples < 1) fail("n_samples must be at least 1");
  if (phases.empty()) fail("at least one phase is required");
  for (double theta : phases) {
    if (!(theta >= 0.0 && theta < std::numbers::pi)) fail("phases must lie in [0, pi)");
  }
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) fail("alpha must be finite");
}

std::vector<double> uniform_phases(int count) {
  std::vector<double> phases(static_cast<size_t>(count));
  for (int j = 0; j < count; ++j) phases[static_cast<size_t>(j)] = j * std::numbers::pi / count;
  return phases;
}

Scenario lossy_cat_scenario(std::uint64_t seed) {
  Scenario s;
  s.phases = uniform_phases(8);
  s.seed = seed;
  return s;
}

std::vector<double> hermite_functions(double x, int dim) {
  check_dimension(dim);
  std::vector<double> psi(static_cast<size_t>(dim));
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (dim > 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 1; n + 1 < dim; ++n) {
    const auto k = static_cast<size_t>(n);
    psi[k + 1] = std::sqrt(2.0 / (n + 1)) * x * psi[k] - std::sqrt(static_cast<double>(n) / (n + 1)) * psi[k - 1];
  }
  return psi;
}

ComplexVector quadrature_ket(double x, double theta, int dim) {
  const auto psi = hermite_functions(x, dim);
  ComplexVector v(dim);
  for (int n = 0; n < dim; ++n) v(n) = std::polar(psi[static_cast<size_t>(n)], n * theta);
  return v;
}

HermitianOperator quadrature_projector(double x, double theta, int dim) {
  const ComplexVector v = quadrature_ket(x, theta, dim);
  return HermitianOperator::from_matrix(v * v.adjoint());
}

namespace {

void check_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorCode::EtaOutOfRange, "detector efficiency must lie in (0, 1]");
  }
}

// sum_k A_k^dagger |v><v| A_k = sum_k w_k w_k^dagger with w_k = A_k^dagger v.
HermitianOperator dual_loss_of_ket(const std::vector<ComplexMatrix>& kraus, const ComplexVector& v) {
  const auto dim = v.size();
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (const auto& a : kraus) {
    const ComplexVector w = a.adjoint() * v;
    out.noalias() += w * w.adjoint();
  }
  return HermitianOperator::from_matrix(out);
}

}  // namespace

PovmElement efficient_povm(double x, double theta, double eta, int dim) {
  check_efficiency(eta);
  const auto kraus = loss_kraus_operators(eta, dim);
  return make_povm_element(dual_loss_of_ket(kraus, quadrature_ket(x, theta, dim)), 1);
}

std::vector<double> homodyne_pdf(const DensityMatrix& rho, double theta, double eta,
                                 std::span<const double> grid) {
  check_efficiency(eta);
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "pdf grid must be strictly increasing");
    }
  }
  // Tr[rho Pi_eta] = Tr[loss(rho) |x><x|].
  const DensityMatrix transmitted = loss_channel(rho, eta);
  std::vector<double> out(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const ComplexVector v = quadrature_ket(grid[i], theta, rho.dim());
    out[i] = std::max(0.0, (v.adjoint() * transmitted.matrix() * v)(0, 0).real());
  }
  return out;
}

Dataset HomodyneData::materialize() const {
  check_efficiency(efficiency);
  const auto kraus = loss_kraus_operators(efficiency, dim);
  std::vector<PovmElement> elements;
  elements.reserve(records.size());
  for (const auto& rec : records) {
    elements.push_back(PovmElement{dual_loss_of_ket(kraus, quadrature_ket(rec.x, rec.theta, dim)), 1});
  }
  return Dataset(dim, std::move(elements));
}

namespace {

// Cumulative trapezoid integral of a pdf on the sampling grid.
struct TabulatedCdf {
  std::vector<double> x;
  std::vector<double> cumulative;

  double invert(double u) const {
    const double target = u * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.begin()) return x.front();
    if (it == cumulative.end()) return x.back();
    const auto j = static_cast<size_t>(it - cumulative.begin()) - 1;
    const double mass = cumulative[j + 1] - cumulative[j];
    const double frac = mass > 0.0 ? (target - cumulative[j]) / mass : 0.5;
    return x[j] + frac * (x[j + 1] - x[j]);
  }
};

std::vector<double> sampling_grid() {
  std::vector<double> grid(kGridPoints);
  const double h = (kGridMax - kGridMin) / (kGridPoints - 1);
  for (int i = 0; i < kGridPoints; ++i) grid[static_cast<size_t>(i)] = kGridMin + i * h;
  return grid;
}

TabulatedCdf tabulate(const DensityMatrix& rho, double theta, double eta) {
  TabulatedCdf cdf;
  cdf.x = sampling_grid();
  const auto pdf = homodyne_pdf(rho, theta, eta, cdf.x);
  cdf.cumulative.assign(cdf.x.size(), 0.0);
  for (size_t i = 1; i < cdf.x.size(); ++i) {
    cdf.cumulative[i] = cdf.cumulative[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * (cdf.x[i] - cdf.x[i - 1]);
  }
  return cdf;
}

}  // namespace

HomodyneData sample_homodyne_records(const Scenario& scenario, const DensityMatrix& rho_true) {
  scenario.validate();
  if (rho_true.dim() != scenario.dim) {
    throw Error(ErrorCode::DimensionMismatch, "truth state dimension does not match scenario");
  }
  std::vector<TabulatedCdf> tables;
  tables.reserve(scenario.phases.size());
  for (double theta : scenario.phases) tables.push_back(tabulate(rho_true, theta, scenario.efficiency));

  // mt19937_64 output is fixed by the standard; the 53-bit conversion below
  // avoids the implementation-defined distribution classes.
  std::mt19937_64 rng(scenario.seed);
  HomodyneData data{scenario.dim, scenario.efficiency, {}};
  data.records.reserve(static_cast<size_t>(scenario.n_samples));
  for (std::int64_t i = 0; i < scenario.n_samples; ++i) {
    const auto phase = static_cast<size_t>(i % static_cast<std::int64_t>(scenario.phases.size()));
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    data.records.push_back({scenario.phases[phase], tables[phase].invert(u)});
  }
  return data;
}

Dataset sample_homodyne(const Scenario& scenario, const DensityMatrix& rho_true) {
  return sample_homodyne_records(scenario, rho_true).materialize();
}

DensityMatrix scenario_truth(const Scenario& scenario) {
  scenario.validate();
  const DensityMatrix cat = DensityMatrix::pure(even_cat_state(scenario.alpha, scenario.dim));
  return loss_channel(cat, scenario.transmissivity);
}

}  // namespace mlqst
