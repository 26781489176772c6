#pragma once

// Time stepping for the kinetic system (exponential-OU and Euler-Maruyama)
// and the overdamped system, plus the coupled driver advancing both under a
// shared Brownian path.

#include <span>
#include <vector>

#include "overdamp/model.hpp"
#include "overdamp/noise.hpp"

namespace overdamp {

struct CoupledSnapshot {
    double t = 0;
    int step = 0;
    KineticEnsemble kinetic;
    OverdampedEnsemble overdamped;
};

// One exponential-OU step with the force frozen at the step start:
//   v <- e^{-a} v + (1/gamma)(1 - e^{-a}) F + sqrt(2) gamma iv
//   x <- x + (1/gamma)(1 - e^{-a}) v_old + [h - (1 - e^{-a})/gamma^2] F + sqrt(2) ix
// with a = gamma^2 h. Exact for the linear OU part; unconditionally stable.
KineticEnsemble step_underdamped_exp(const KineticEnsemble& state, const SimConfig& cfg, double h,
                                     std::span<const double> force, std::span<const double> ix,
                                     std::span<const double> iv);

// Euler-Maruyama for the kinetic system:
//   x <- x + gamma v h;  v <- v - gamma^2 v h + gamma F h + sqrt(2) gamma db
KineticEnsemble step_underdamped_em(const KineticEnsemble& state, const SimConfig& cfg, double h,
                                    std::span<const double> force, std::span<const double> db);

// Euler-Maruyama for the overdamped system: x <- x + F h + sqrt(2) db
OverdampedEnsemble step_overdamped_em(const OverdampedEnsemble& state, const SimConfig& cfg,
                                      double h, std::span<const double> force,
                                      std::span<const double> db);

// Draws X_0 (shared particle-by-particle between the two ensembles) and V_0
// from the product-Gaussian initial law in cfg.
std::pair<KineticEnsemble, OverdampedEnsemble> initial_sample(const SimConfig& cfg,
                                                              std::uint32_t replica = 0);

// `count` record times, uniform over (0, t_final] up to snapping onto the
// step grid, always including t_final.
std::vector<double> uniform_record_times(const SimConfig& cfg, int count);

// Number of EM substeps per macro step under the stability policy
// gamma^2 h_sub <= 0.5; 1 for the exponential integrator.
int em_substeps(const SimConfig& cfg);

// Advances both systems in lockstep under shared noise: the kinetic side
// consumes (ix, iv) (exponential) or per-substep db (EM), the overdamped side
// always consumes the macro-step dB from the same draw (for EM, the sum of
// the substep increments). Snapshots are taken at the requested record times,
// which must lie on the step grid; recording never perturbs stepping.
std::vector<CoupledSnapshot> simulate_coupled(const SimConfig& cfg,
                                              std::span<const double> record_times,
                                              std::uint32_t replica = 0);

// Kinetic system alone, same noise keys as the coupled driver.
std::vector<CoupledSnapshot> simulate_kinetic(const SimConfig& cfg,
                                              std::span<const double> record_times,
                                              std::uint32_t replica = 0);

}  // namespace overdamp
