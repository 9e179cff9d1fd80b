#pragma once

// Simulated balanced-homodyne tomography.
//
// Quadrature convention: x_theta = (a e^{-i theta} + a^dagger e^{i theta}) / sqrt(2),
// so the vacuum has variance 1/2. Detector efficiency eta is modeled as a
// pure-loss channel ahead of an ideal detector and folded into the POVM
// through the dual channel.

#include <cstdint>
#include <span>
#include <vector>

#include "mlqst/likelihood.hpp"

namespace mlqst {

inline constexpr double kGridMin = -8.0;
inline constexpr double kGridMax = 8.0;
inline constexpr int kGridPoints = 4096;

struct HomodyneRecord {
  double theta;
  double x;
};

struct Scenario {
  Complex alpha{1.0, 0.0};
  double transmissivity = 0.8;
  double efficiency = 0.9;
  int dim = 11;
  std::int64_t n_samples = 10000;
  std::vector<double> phases;
  std::uint64_t seed = 1;

  /// InvalidScenario on out-of-range fields.
  void validate() const;
};

/// theta_j = j pi / count, j = 0..count-1.
std::vector<double> uniform_phases(int count);

/// Cat state alpha = 1 through 80% transmission, 90% efficient detection,
/// 10-photon truncation, 8 phases, 10^4 samples.
Scenario lossy_cat_scenario(std::uint64_t seed = 1);

/// psi_n(x) = pi^{-1/4} (2^n n!)^{-1/2} H_n(x) e^{-x^2/2}, n = 0..dim-1, via
/// the three-term recurrence.
std::vector<double> hermite_functions(double x, int dim);

/// <n|x_theta> = e^{i n theta} psi_n(x).
ComplexVector quadrature_ket(double x, double theta, int dim);

/// |x_theta><x_theta| truncated to dim.
HermitianOperator quadrature_projector(double x, double theta, int dim);

/// Dual-loss image of the ideal projector; weight 1. EtaOutOfRange unless 0 < eta <= 1.
PovmElement efficient_povm(double x, double theta, double eta, int dim);

/// Tr[rho Pi_eta(x|theta)] at each grid point, negatives clamped to 0.
/// InvalidArgument if the grid is not strictly increasing.
std::vector<double> homodyne_pdf(const DensityMatrix& rho, double theta, double eta,
                                 std::span<const double> grid);

/// Unbinned homodyne events plus the detector model needed to turn them into
/// POVM elements.
struct HomodyneData {
  int dim;
  double efficiency;
  std::vector<HomodyneRecord> records;

  Dataset materialize() const;
};

HomodyneData sample_homodyne_records(const Scenario& scenario, const DensityMatrix& rho_true);
Dataset sample_homodyne(const Scenario& scenario, const DensityMatrix& rho_true);

/// loss_channel(|cat(alpha)><cat(alpha)|, transmissivity).
DensityMatrix scenario_truth(const Scenario& scenario);

}  // namespace mlqst
