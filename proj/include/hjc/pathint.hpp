#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjc/dynamics.hpp"

namespace hjc {

/// Boundary data and discretization for the time-sliced path integral.
struct SlicingPlan {
  std::vector<int> slices{64, 128, 256, 512, 1024};
  double t0 = 0.0;
  double t1 = 1.0;
  std::map<Symbol, double> initial;  // reduced coordinates at t0
  std::map<Symbol, double> final;    // reduced coordinates at t1
  /// Parameter endpoints (default 0 -> 0).
  std::map<Symbol, std::pair<double, double>> parameter_endpoints;
  /// Optional shape g(s) on [0, 1] with g(0) = 0, g(1) = 1, written in the
  /// symbol `s`; the parameter runs from a to b as a + (b - a) g(s).
  /// Missing entries interpolate linearly.
  std::map<Symbol, Expr> interpolation;
};

struct PropagatorResult {
  std::string regime;    // gaussian-exact | euclidean-mc
  std::string quantity;  // amplitude | ground-state-energy
  std::complex<double> value;
  double error = 0.0;
  std::vector<int> n_sequence;
  std::vector<std::complex<double>> raw;  // value per entry of n_sequence
  std::vector<std::string> warnings;
  double acceptance = 0.0;  // Monte Carlo only
};

/// The symbol used for the slice fraction in interpolation shapes.
Symbol slice_fraction_symbol();

/// Throws AnalysisError unless every parameterized H_alpha is at most
/// quadratic in the reduced variables.
void check_quadratic(const ConstraintSet& cs, const NumericContext& ctx);

/// Exact Gaussian reduction at a single slice count. Throws AnalysisError
/// ("caustic") on a singular slice matrix.
std::complex<double> quadratic_amplitude(const ConstraintSet& cs, const NumericContext& ctx,
                                         const SlicingPlan& plan, int slices);

/// Amplitudes over `plan.slices`, Romberg-extrapolated in 1/N^2.
PropagatorResult propagate_quadratic(const ConstraintSet& cs, const NumericContext& ctx,
                                     const SlicingPlan& plan);

struct MonteCarloOptions {
  int slices = 64;
  double beta = 8.0;
  long sweeps = 100000;
  long thermalization = 10000;
  std::uint64_t seed = 1;
  int bins = 50;
};

/// Periodic imaginary-time lattice, single-site Metropolis, primitive energy
/// estimator. The reduced Hamiltonian must be sum p^2/(2m) + U(q).
PropagatorResult propagate_euclidean_mc(const ConstraintSet& cs, const NumericContext& ctx,
                                        const MonteCarloOptions& opts);

}  // namespace hjc
