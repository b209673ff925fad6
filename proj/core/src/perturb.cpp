#include "hysup/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hysup {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double cell_uniform(std::uint64_t seed, std::uint64_t cell, std::uint64_t component) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(cell ^ splitmix64(component + 1)));
  // Map to [-1, 1).
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

State DisturbanceChannel::eval(double t) const {
  State v(dim, 0.0);
  const double amp = std::clamp(amplitude > 0.0 ? amplitude : bound, 0.0, bound);
  switch (kind) {
    case Kind::Zero:
      break;
    case Kind::Constant:
      for (int i = 0; i < dim; ++i) {
        const double c = i < static_cast<int>(constant.size()) ? constant[i] : 0.0;
        v[i] = std::clamp(c, -bound, bound);
      }
      break;
    case Kind::Sinusoid:
      for (int i = 0; i < dim; ++i) {
        v[i] = amp * std::sin(2.0 * std::numbers::pi * frequency * t + phase + i);
      }
      break;
    case Kind::Noise: {
      const auto cell = static_cast<std::uint64_t>(std::floor(std::max(0.0, t) / grid_dt));
      for (int i = 0; i < dim; ++i) {
        v[i] = amp * cell_uniform(seed, cell, static_cast<std::uint64_t>(i));
      }
      break;
    }
  }
  return v;
}

Plant perturb_plant(const Plant& plant, const DisturbanceProfile& profile) {
  if (profile.all_zero()) return plant;
  if (profile.d1.kind != DisturbanceChannel::Kind::Zero && profile.d1.dim != plant.m_p)
    throw DimensionMismatch("perturb_plant: d1 must match the input dimension");
  if (profile.d2.kind != DisturbanceChannel::Kind::Zero && profile.d2.dim != plant.n_p)
    throw DimensionMismatch("perturb_plant: d2 must match the state dimension");

  const int n_p = plant.n_p;
  Plant out;
  out.n_p = n_p + 1;  // trailing clock state
  out.m_p = plant.m_p;

  out.f_p = [plant, profile, n_p](std::span<const double> xi, std::span<const double> u,
                                  std::span<double> dxi) {
    const double clock = xi[n_p];
    State u_eff(u.begin(), u.end());
    if (!profile.d1.is_zero()) {
      const State d1 = profile.d1.eval(clock);
      for (std::size_t i = 0; i < u_eff.size(); ++i) u_eff[i] += d1[i];
    }
    plant.f_p(xi.subspan(0, n_p), u_eff, dxi.subspan(0, n_p));
    if (!profile.d2.is_zero()) {
      const State d2 = profile.d2.eval(clock);
      for (int i = 0; i < n_p; ++i) dxi[i] += d2[i];
    }
    dxi[n_p] = 1.0;
  };

  for (std::size_t idx = 0; idx < plant.outputs.size(); ++idx) {
    const auto& base = plant.outputs[idx];
    const DisturbanceChannel* noise = nullptr;
    if (idx == 0 && !profile.d3.is_zero()) noise = &profile.d3;
    if (idx == 1 && !profile.d4.is_zero()) noise = &profile.d4;
    if (noise && noise->dim != base.dim)
      throw DimensionMismatch("perturb_plant: output noise dimension mismatch");

    PlantOutput po;
    po.dim = base.dim;
    if (noise) {
      const DisturbanceChannel channel = *noise;
      po.h = [base, channel, n_p](std::span<const double> xi) {
        State y = base.h(xi.subspan(0, n_p));
        const State d = channel.eval(xi[n_p]);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
        return y;
      };
    } else {
      po.h = [base, n_p](std::span<const double> xi) { return base.h(xi.subspan(0, n_p)); };
    }
    out.outputs.push_back(std::move(po));
  }
  return out;
}

namespace {

double sampled_lipschitz(const std::function<double(std::span<const double>)>& g, int dim,
                         const InflateConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  State x(dim), xp(dim);
  for (int s = 0; s < cfg.samples; ++s) {
    for (int i = 0; i < dim; ++i) x[i] = cfg.box_halfwidth * unit(rng);
    const double g0 = g(x);
    double grad2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      xp = x;
      xp[i] += cfg.fd_h;
      const double gi = (g(xp) - g0) / cfg.fd_h;
      grad2 += gi * gi;
    }
    worst = std::max(worst, std::sqrt(grad2));
  }
  return worst;
}

}  // namespace

HybridSystemDef inflate_system(const HybridSystemDef& system, double delta,
                               const InflateConfig& cfg) {
  if (delta < 0.0) throw InvalidParams("inflate_system: delta must be nonnegative");
  if (delta == 0.0 && !cfg.jump_offset) return system;

  HybridSystemDef out = system;
  if (delta > 0.0) {
    const double lc = sampled_lipschitz(system.flow_guard, system.dim, cfg);
    const double ld = sampled_lipschitz(system.jump_guard, system.dim, cfg);
    auto base_c = system.flow_guard;
    auto base_d = system.jump_guard;
    const double relax_c = delta * lc;
    const double relax_d = delta * ld;
    out.flow_guard = [base_c, relax_c](std::span<const double> x) { return base_c(x) + relax_c; };
    out.jump_guard = [base_d, relax_d](std::span<const double> x) { return base_d(x) + relax_d; };
  }
  if (delta > 0.0 || cfg.jump_offset) {
    auto base_g = system.jump_map;
    auto offset = cfg.jump_offset;
    const int dim = system.dim;
    out.jump_map = [base_g, offset, delta, dim](std::span<const double> x) {
      auto successors = base_g(x);
      // The inflated jump set fires up to delta early; per the set-inflation
      // reading G_delta(x) = G(x + delta B), enumerate successors of nearby
      // probe points when the point itself has none.
      if (successors.empty() && delta > 0.0) {
        State probe(x.begin(), x.end());
        for (double step : {delta, -delta, 2.0 * delta, -2.0 * delta}) {
          for (int i = 0; i < dim && successors.empty(); ++i) {
            probe[i] = x[i] + step;
            successors = base_g(probe);
            probe[i] = x[i];
          }
          if (!successors.empty()) break;
        }
      }
      if (offset) {
        const State off = offset(x);
        for (auto& s : successors) {
          for (std::size_t i = 0; i < s.size() && i < off.size(); ++i) s[i] += off[i];
        }
      }
      return successors;
    };
  }
  return out;
}

}  // namespace hysup
