#include "qb/synth.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "parallel.hpp"
#include "qb/balance.hpp"
#include "qb/error.hpp"
#include "qb/stats.hpp"

namespace qb {

const char* to_string(GenMode m) {
  switch (m) {
    case GenMode::gibrat: return "gibrat";
    case GenMode::static_nongibrat: return "static_nongibrat";
    case GenMode::quasistatic: return "quasistatic";
  }
  return "unknown";
}

GenMode gen_mode_from_string(const std::string& s) {
  if (s == "gibrat") return GenMode::gibrat;
  if (s == "static_nongibrat" || s == "static") return GenMode::static_nongibrat;
  if (s == "quasistatic") return GenMode::quasistatic;
  throw ConfigError("unknown generator mode '" + s + "' (gibrat | static_nongibrat | quasistatic)");
}

GeneratorSpec effective_spec(GeneratorSpec spec) {
  switch (spec.mode) {
    case GenMode::gibrat:
      spec.alpha = 0.0;
      break;
    case GenMode::static_nongibrat:
      spec.theta = 1.0;
      spec.log10_a = 0.0;
      break;
    case GenMode::quasistatic: break;
  }
  return spec;
}

TentKernelParams generator_kernel(const GeneratorSpec& s) {
  const GeneratorSpec e = effective_spec(s);
  const double diff = e.mu1 / e.theta;
  TentKernelParams k;
  k.t_plus_x0 = 0.5 * (e.kernel_sum + diff);
  k.t_minus_x0 = 0.5 * (e.kernel_sum - diff);
  k.alpha = e.alpha;
  k.alpha_high = 0.0;
  k.x0 = e.x0;
  return k;
}

void validate(const GeneratorSpec& s) {
  const GeneratorSpec e = effective_spec(s);
  if (e.n_entities < 1) throw ConfigError("generator: n_entities must be at least 1");
  if (!(e.theta > 0.0) || !std::isfinite(e.theta)) throw ConfigError("generator: theta must be positive");
  if (!std::isfinite(e.log10_a)) throw ConfigError("generator: log10_a must be finite");
  if (!(e.mu1 > 0.0)) throw ConfigError("generator: mu1 must be positive");
  if (!(e.alpha >= 0.0)) throw ConfigError("generator: alpha must be non-negative");
  if (!(e.x_min > 0.0) || !(e.x0 > e.x_min)) throw ConfigError("generator: need 0 < x_min < x0");
  const TentKernelParams k = generator_kernel(e);
  if (!(k.t_minus_x0 > 0.0))
    throw ConfigError("generator: kernel_sum must exceed mu1/theta so that t-(x0) > 0");
  if (!(k.t_plus(e.x_min) > 0.0) || !(k.t_minus(k.cap()) > 0.0))
    throw ConfigError("generator: kernel slopes not positive over [x_min, x_cap]");
}

InitialSampler::InitialSampler(double mu, double kappa, double x0, double x_min)
    : mu_(mu), kappa_(kappa), x0_(x0), x_min_(x_min) {
  if (!(mu > 0.0) || !(kappa >= 0.0) || !(x_min > 0.0) || !(x0 > x_min))
    throw ConfigError("sample_initial: need mu > 0, kappa >= 0, 0 < x_min < x0");
  zmin_ = std::log(x_min / x0);
  double log_w1;
  if (kappa_ > 0.0) {
    zm_ = -mu_ / (2.0 * kappa_);
    s_ = 1.0 / std::sqrt(2.0 * kappa_);
    a_ = (zmin_ - zm_) / s_;
    b_ = -zm_ / s_;
    use_complement_ = a_ > 0.0;
    double log_mass;
    if (use_complement_) {
      const double la = log_normal_sf(a_), lb = log_normal_sf(b_);
      log_mass = la + std::log1p(-std::exp(lb - la));
      phi_a_ = std::exp(la);
      phi_b_ = std::exp(lb);
    } else {
      phi_a_ = normal_cdf(a_);
      phi_b_ = normal_cdf(b_);
      log_mass = std::log(phi_b_ - phi_a_);
    }
    log_w1 = mu_ * mu_ / (4.0 * kappa_) + 0.5 * std::log(std::numbers::pi / kappa_) + log_mass;
  } else {
    zm_ = s_ = a_ = b_ = phi_a_ = phi_b_ = 0.0;
    use_complement_ = false;
    log_w1 = -mu_ * zmin_ + std::log(-std::expm1(mu_ * zmin_)) - std::log(mu_);
  }
  const double log_w2 = -std::log(mu_);
  p_low_ = 1.0 / (1.0 + std::exp(log_w2 - log_w1));
}

double InitialSampler::sample_low(Engine& g) const {
  if (kappa_ == 0.0) {
    const double c = -std::expm1(mu_ * zmin_);
    return zmin_ - std::log1p(-uniform01(g) * c) / mu_;
  }
  static const boost::math::normal_distribution<> N;
  double t;
  if (a_ < 30.0) {
    const double u = uniform01(g);
    if (use_complement_) {
      const double p = phi_a_ - u * (phi_a_ - phi_b_);
      t = p > 0.0 ? boost::math::quantile(boost::math::complement(N, p)) : b_;
    } else {
      const double p = phi_a_ + u * (phi_b_ - phi_a_);
      t = p > 0.0 ? boost::math::quantile(N, std::min(p, 1.0 - 1e-16)) : a_;
    }
    t = std::clamp(t, a_, b_);
  } else {
    // Far tail: exponential envelope tangent at a.
    for (;;) {
      t = a_ - std::log(uniform01_open_low(g)) / a_;
      if (t > b_) continue;
      const double d = t - a_;
      if (uniform01(g) <= std::exp(-0.5 * d * d)) break;
    }
  }
  return std::min(zm_ + s_ * t, std::nextafter(0.0, -1.0));
}

double InitialSampler::operator()(Engine& g) const {
  double z;
  if (uniform01(g) < p_low_) {
    z = std::max(sample_low(g), zmin_);
  } else {
    z = -std::log(uniform01_open_low(g)) / mu_;
  }
  return std::max(x0_ * std::exp(z), x_min_);
}

double sample_initial(double mu, double kappa, double x0, double x_min, Engine& g) {
  return InitialSampler(mu, kappa, x0, x_min)(g);
}

double sample_tent(double t_plus, double t_minus, Engine& g) {
  if (!(t_plus > 0.0) || !(t_minus > 0.0)) throw DataError("sample_kernel: kernel not normalisable here");
  const bool up = uniform01(g) < t_minus / (t_plus + t_minus);
  const double U = uniform01_open_low(g);
  return up ? std::pow(U, -1.0 / t_plus) : std::pow(U, 1.0 / t_minus);
}

double sample_kernel(double x1, const TentKernelParams& kernel, Engine& g) {
  return sample_tent(kernel.t_plus(x1), kernel.t_minus(x1), g);
}

SynthPanel gen_panel(const GeneratorSpec& spec) {
  validate(spec);
  const GeneratorSpec e = effective_spec(spec);
  const TentKernelParams kernel = generator_kernel(e);
  const InitialSampler sampler(e.mu1, e.theta * e.alpha, e.x0, e.x_min);
  const double a = std::pow(10.0, e.log10_a);

  std::vector<Pair> pairs(e.n_entities);
  detail::parallel_for(e.n_entities, e.threads, [&](std::size_t b, std::size_t end) {
    for (std::size_t i = b; i < end; ++i) {
      Engine g = stream_engine(e.seed, i);
      const double x1 = sampler(g);
      const double R = sample_kernel(x1, kernel, g);
      const double base = e.theta == 1.0 ? x1 : std::pow(x1, e.theta);
      pairs[i] = {x1, a * base * R};
    }
  });

  SynthPanel out;
  out.panel = make_panel(std::move(pairs));
  GroundTruth& t = out.truth;
  t.mode = e.mode;
  t.seed = e.seed;
  t.n = e.n_entities;
  t.theta = e.theta;
  t.log10_a = e.log10_a;
  t.alpha = e.alpha;
  t.mu1 = e.mu1;
  t.mu2 = e.mu1 / e.theta;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  t.sigma1 = e.alpha > 0.0 ? 1.0 / std::sqrt(2.0 * e.theta * e.alpha) : nan;
  t.sigma2 = e.alpha > 0.0 ? std::sqrt(e.theta / (2.0 * e.alpha)) : nan;
  t.t_plus_x0 = kernel.t_plus_x0;
  t.t_minus_x0 = kernel.t_minus_x0;
  t.x0 = e.x0;
  t.x_min = e.x_min;
  const GammaResult gr = gamma_relation(e.theta, e.log10_a);
  t.gamma = gr.gamma;
  return out;
}

std::vector<Observation> to_observations(const PairedPanel& panel) {
  std::vector<Observation> obs;
  obs.reserve(2 * panel.count());
  for (std::size_t i = 0; i < panel.count(); ++i) {
    const std::string& id = panel.entities[i];
    obs.push_back({id, panel.period_1, panel.pairs[i].x1});
    obs.push_back({id, panel.period_2, panel.pairs[i].x2});
  }
  return obs;
}

Trajectory sim_multiplicative(double x_init, std::size_t n_steps, const GrowthLaw& law, std::uint64_t seed) {
  if (!(x_init > 0.0)) throw ConfigError("sim_multiplicative: x(0) must be positive");
  if (n_steps < 1) throw ConfigError("sim_multiplicative: need at least one step");
  if (law.kind == GrowthLaw::Kind::constant && !(law.value > 0.0))
    throw ConfigError("sim_multiplicative: constant R must be positive");
  if (law.kind == GrowthLaw::Kind::log_uniform && !(law.log_hi >= law.log_lo))
    throw ConfigError("sim_multiplicative: log-uniform bounds out of order");
  Engine g = stream_engine(seed, 0);
  Trajectory tr;
  tr.x.resize(n_steps + 1);
  tr.log_x.resize(n_steps + 1);
  tr.x[0] = x_init;
  tr.log_x[0] = std::log(x_init);
  for (std::size_t t = 0; t < n_steps; ++t) {
    double R = law.value;
    if (law.kind == GrowthLaw::Kind::log_uniform) {
      R = std::exp(law.log_lo + (law.log_hi - law.log_lo) * uniform01(g));
    } else if (law.kind == GrowthLaw::Kind::tent) {
      R = sample_tent(law.t_plus, law.t_minus, g);
    }
    tr.x[t + 1] = tr.x[t] * R;
    tr.log_x[t + 1] = tr.log_x[t] + std::log(R);
  }
  return tr;
}

}  // namespace qb
