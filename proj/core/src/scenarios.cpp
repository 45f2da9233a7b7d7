#include "qb/scenarios.hpp"

#include <cmath>

namespace qb::scenarios {

GeneratorSpec static_spec(double alpha, std::uint64_t seed, std::size_t n) {
  GeneratorSpec s;
  s.mode = GenMode::static_nongibrat;
  s.n_entities = n;
  s.theta = 1.0;
  s.log10_a = 0.0;
  s.alpha = alpha;
  s.mu1 = 1.0;
  s.x0 = 4.0 * std::pow(10.0, 4.2);
  s.x_min = 4.0 * std::pow(10.0, 2.6);
  s.kernel_sum = 3.0;
  s.seed = seed;
  return s;
}

GeneratorSpec gibrat_spec(std::uint64_t seed, std::size_t n) {
  GeneratorSpec s = static_spec(0.0, seed, n);
  s.mode = GenMode::gibrat;
  return s;
}

RunConfig static_config() {
  RunConfig c;
  c.x0 = 4.0 * std::pow(10.0, 4.2);
  c.x_min = 4.0 * std::pow(10.0, 2.6);
  c.large = {c.x0, 1e12};
  c.middle = {c.x_min, c.x0};
  return c;
}

GeneratorSpec quasistatic_spec(std::uint64_t seed, std::size_t n) {
  GeneratorSpec s;
  s.mode = GenMode::quasistatic;
  s.n_entities = n;
  s.theta = 0.9;
  s.log10_a = 0.2;
  s.alpha = 1.0;
  s.mu1 = 2.0;
  s.x0 = 3.0e5;
  s.x_min = 100.0;
  s.kernel_sum = 60.0;
  s.seed = seed;
  return s;
}

RunConfig quasistatic_config() {
  RunConfig c;
  c.x0 = 3.0e5;
  c.x_min = 100.0;
  c.r_width = 0.005;
  c.r_max = 0.06;
  c.growth_mode = GrowthMode::modified;
  return c;
}

TheoryParams quasistatic_params() {
  TheoryParams p;
  p.mu1 = 2.0;
  p.theta = 0.9;
  p.log10_a = 0.2;
  p.alpha = 1.0;
  p.alpha_high = 0.0;
  p.x0 = 3.0e5;
  p.x_min = 100.0;
  return complete_params(p, Mu2Reading::mapped_mean);
}

}  // namespace qb::scenarios
