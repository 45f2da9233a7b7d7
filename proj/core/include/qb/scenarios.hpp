#pragma once

#include <cstddef>
#include <cstdint>

#include "qb/pipeline.hpp"
#include "qb/synth.hpp"
#include "qb/theory.hpp"

namespace qb::scenarios {

/// Profits-scale static system: grid (4, 1, 0.2, 20), x0 = 4*10^4.2, x_min = 4*10^2.6,
/// mu = 1, t+(x0) = 2, t-(x0) = 1.
GeneratorSpec static_spec(double alpha = 0.14, std::uint64_t seed = 1, std::size_t n = 100000);
GeneratorSpec gibrat_spec(std::uint64_t seed = 1, std::size_t n = 100000);
RunConfig static_config();

/// Land-price-scale quasistatic system: theta = 0.9, log10 a = 0.2, mu1 = 2, alpha = 1,
/// x0 = 3e5, x_min = 100, t+(x0) + t-(x0) = 60, default windows.
GeneratorSpec quasistatic_spec(std::uint64_t seed = 1, std::size_t n = 100000);
RunConfig quasistatic_config();

/// Theory parameters matching quasistatic_spec.
TheoryParams quasistatic_params();

}  // namespace qb::scenarios
