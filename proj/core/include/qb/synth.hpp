#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qb/panel.hpp"
#include "qb/random.hpp"
#include "qb/theory.hpp"

namespace qb {

enum class GenMode { gibrat, static_nongibrat, quasistatic };
const char* to_string(GenMode m);
GenMode gen_mode_from_string(const std::string& s);

struct GeneratorSpec {
  std::size_t n_entities = 100000;
  double theta = 0.9;
  double log10_a = 0.2;
  double alpha = 1.0;
  double mu1 = 2.0;
  double x0 = 3.0e5;
  double x_min = 100.0;
  double kernel_sum = 60.0;  ///< t+(x0) + t-(x0)
  std::uint64_t seed = 1;
  GenMode mode = GenMode::quasistatic;
  unsigned threads = 1;
};

/// Applies mode overrides: gibrat sets alpha = 0; static sets theta = 1, a = 1.
GeneratorSpec effective_spec(GeneratorSpec spec);
void validate(const GeneratorSpec& spec);

struct GroundTruth {
  GenMode mode = GenMode::quasistatic;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double theta = 1.0;
  double log10_a = 0.0;
  double alpha = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;  ///< mu1 / theta, the tail index of the generated x2
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double t_plus_x0 = 0.0;
  double t_minus_x0 = 0.0;
  double x0 = 0.0;
  double x_min = 0.0;
  double gamma = 0.0;  ///< NaN when indeterminate
};

struct SynthPanel {
  PairedPanel panel;
  GroundTruth truth;
};

/// Kernel used by the generator: t+(x0) - t-(x0) = mu1/theta.
TentKernelParams generator_kernel(const GeneratorSpec& spec);

/// Samples x1 from x^-(mu+1) exp(-kappa ln^2(x/x0)) on [x_min, x0) joined to a
/// pure power law above x0, by composition with exact segment weights.
class InitialSampler {
 public:
  InitialSampler(double mu, double kappa, double x0, double x_min);
  double operator()(Engine& g) const;
  double lower_weight() const { return p_low_; }

 private:
  double sample_low(Engine& g) const;

  double mu_, kappa_, x0_, x_min_;
  double zmin_;   // ln(x_min/x0)
  double zm_, s_; // Gaussian centre and scale in z = ln(x/x0)
  double a_, b_;  // standardised segment bounds
  double phi_a_, phi_b_;
  bool use_complement_;
  double p_low_;
};

double sample_initial(double mu, double kappa, double x0, double x_min, Engine& g);
double sample_kernel(double x1, const TentKernelParams& kernel, Engine& g);
/// Draw with fixed slopes.
double sample_tent(double t_plus, double t_minus, Engine& g);

SynthPanel gen_panel(const GeneratorSpec& spec);

std::vector<Observation> to_observations(const PairedPanel& panel);

struct GrowthLaw {
  enum class Kind { constant, log_uniform, tent } kind = Kind::constant;
  double value = 1.0;             ///< constant R
  double log_lo = 0.0, log_hi = 0.0;  ///< ln R bounds for log_uniform
  double t_plus = 2.0, t_minus = 2.0;
};

struct Trajectory {
  std::vector<double> x;      ///< x(0..n), product form
  std::vector<double> log_x;  ///< running sum of ln R
};

Trajectory sim_multiplicative(double x_init, std::size_t n_steps, const GrowthLaw& law,
                              std::uint64_t seed);

}  // namespace qb
