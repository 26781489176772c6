#include "overdamp/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace overdamp {

namespace {

std::int64_t step_count(const SimConfig& cfg) {
    const double raw = cfg.t_final / cfg.dt;
    const std::int64_t steps = std::llround(raw);
    if (steps < 1 || std::abs(steps * cfg.dt - cfg.t_final) > 1e-9 * std::max(1.0, cfg.t_final))
        throw ConfigError("t_final must be an integer multiple of dt");
    return steps;
}

std::set<std::int64_t> record_indices(const SimConfig& cfg, std::span<const double> record_times,
                                      std::int64_t steps) {
    std::set<std::int64_t> idx;
    double prev = -1.0;
    for (double t : record_times) {
        if (t < prev) throw std::domain_error("record times must be sorted");
        prev = t;
        if (t < 0.0 || t > cfg.t_final + 1e-9)
            throw std::domain_error("record time outside [0, t_final]");
        const std::int64_t k = std::llround(t / cfg.dt);
        if (k < 0 || k > steps || std::abs(k * cfg.dt - t) > 1e-9 * std::max(1.0, t))
            throw std::domain_error("record time does not lie on the step grid");
        idx.insert(k);
    }
    return idx;
}

}  // namespace

KineticEnsemble step_underdamped_exp(const KineticEnsemble& state, const SimConfig& cfg, double h,
                                     std::span<const double> force, std::span<const double> ix,
                                     std::span<const double> iv) {
    const std::size_t m = state.x.size();
    if (force.size() != m || ix.size() != m || iv.size() != m)
        throw std::domain_error("step_underdamped_exp: shape mismatch");
    const double g = cfg.gamma;
    const double a = g * g * h;
    const double ea = std::exp(-a);
    const double em = -std::expm1(-a);  // 1 - e^{-a}
    const double cf_v = em / g;
    const double cf_x = h - em / (g * g);
    const double s2 = std::sqrt(2.0);

    KineticEnsemble out = state;
    for (std::size_t k = 0; k < m; ++k) {
        if (!std::isfinite(force[k]))
            throw std::domain_error("step_underdamped_exp: non-finite force");
        out.x[k] = state.x[k] + cf_v * state.v[k] + cf_x * force[k] + s2 * ix[k];
        out.v[k] = ea * state.v[k] + cf_v * force[k] + s2 * g * iv[k];
    }
    out.t = state.t + h;
    return out;
}

KineticEnsemble step_underdamped_em(const KineticEnsemble& state, const SimConfig& cfg, double h,
                                    std::span<const double> force, std::span<const double> db) {
    const std::size_t m = state.x.size();
    if (force.size() != m || db.size() != m)
        throw std::domain_error("step_underdamped_em: shape mismatch");
    const double g = cfg.gamma;
    if (g * g * h > 50.0) throw ConfigError("step_underdamped_em: gamma^2 h exceeds stability guard");
    const double s2g = std::sqrt(2.0) * g;

    KineticEnsemble out = state;
    for (std::size_t k = 0; k < m; ++k) {
        out.x[k] = state.x[k] + g * state.v[k] * h;
        out.v[k] = state.v[k] - g * g * state.v[k] * h + g * force[k] * h + s2g * db[k];
    }
    out.t = state.t + h;
    return out;
}

OverdampedEnsemble step_overdamped_em(const OverdampedEnsemble& state, const SimConfig& cfg,
                                      double h, std::span<const double> force,
                                      std::span<const double> db) {
    (void)cfg;
    const std::size_t m = state.x.size();
    if (force.size() != m || db.size() != m)
        throw std::domain_error("step_overdamped_em: shape mismatch");
    const double s2 = std::sqrt(2.0);
    OverdampedEnsemble out = state;
    for (std::size_t k = 0; k < m; ++k) {
        if (!std::isfinite(force[k])) throw std::domain_error("step_overdamped_em: non-finite force");
        out.x[k] = state.x[k] + force[k] * h + s2 * db[k];
    }
    out.t = state.t + h;
    return out;
}

std::pair<KineticEnsemble, OverdampedEnsemble> initial_sample(const SimConfig& cfg,
                                                              std::uint32_t replica) {
    cfg.validate();
    const int n = cfg.n_particles;
    const int d = cfg.dim;
    KineticEnsemble kin;
    kin.n = n;
    kin.d = d;
    kin.x.resize(static_cast<std::size_t>(n) * d);
    kin.v.resize(kin.x.size());
    const double sx = std::sqrt(cfg.x0_var);
    const double sv = std::sqrt(cfg.v0_var);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) {
            NoiseKey key{cfg.seed, replica, static_cast<std::uint32_t>(i), kStepInitialPosition,
                         static_cast<std::uint32_t>(c)};
            kin.x[static_cast<std::size_t>(i) * d + c] =
                cfg.x0_mean + sx * standard_normal_pair(key, 0).first;
            key.step = kStepInitialVelocity;
            kin.v[static_cast<std::size_t>(i) * d + c] =
                cfg.v0_mean + sv * standard_normal_pair(key, 0).first;
        }
    }
    OverdampedEnsemble od;
    od.n = n;
    od.d = d;
    od.x = kin.x;  // shared initial positions, particle by particle
    return {std::move(kin), std::move(od)};
}

std::vector<double> uniform_record_times(const SimConfig& cfg, int count) {
    if (count < 1) throw std::domain_error("uniform_record_times: count must be >= 1");
    const std::int64_t steps = step_count(cfg);
    std::vector<double> times;
    std::int64_t prev = 0;
    for (int j = 1; j <= count; ++j) {
        const std::int64_t k = std::llround(static_cast<double>(j) * steps / count);
        if (k > prev) times.push_back(k * cfg.dt);
        prev = k;
    }
    return times;
}

int em_substeps(const SimConfig& cfg) {
    if (cfg.integrator == Integrator::ExponentialOU) return 1;
    const double a = cfg.gamma * cfg.gamma * cfg.dt;
    return std::max(1, static_cast<int>(std::ceil(a / 0.5 - 1e-12)));
}

namespace {

std::vector<CoupledSnapshot> run_coupled(const SimConfig& cfg, std::span<const double> record_times,
                                         std::uint32_t replica, bool with_overdamped) {
    cfg.validate();
    const std::int64_t steps = step_count(cfg);
    const auto record = record_indices(cfg, record_times, steps);
    const int n = cfg.n_particles;
    const int d = cfg.dim;
    const std::size_t m = static_cast<std::size_t>(n) * d;

    auto [kin, od] = initial_sample(cfg, replica);
    std::vector<CoupledSnapshot> snaps;
    auto take = [&](std::int64_t s) {
        if (record.count(s)) snaps.push_back({s * cfg.dt, static_cast<int>(s), kin, od});
    };
    take(0);

    const bool exp_path = cfg.integrator == Integrator::ExponentialOU;
    const int n_sub = em_substeps(cfg);
    const double h_sub = cfg.dt / n_sub;
    CoupledIncrementChol chol;
    if (exp_path) chol = cholesky(ou_covariance(cfg.gamma, cfg.dt));

    std::vector<double> f_kin(m), f_od(m), db(m), ix(m), iv(m), db_sub(m);
    for (std::int64_t s = 0; s < steps; ++s) {
        try {
            if (exp_path) {
                mean_field_force_all(cfg.potential, cfg.kernel, kin.x, n, d, f_kin);
                for (int i = 0; i < n; ++i) {
                    for (int c = 0; c < d; ++c) {
                        const NoiseKey key{cfg.seed, replica, static_cast<std::uint32_t>(i),
                                           static_cast<std::uint32_t>(s),
                                           static_cast<std::uint32_t>(c)};
                        const auto inc = sample_coupled_increments(key, chol);
                        const std::size_t k = static_cast<std::size_t>(i) * d + c;
                        db[k] = inc.db;
                        ix[k] = inc.ix;
                        iv[k] = inc.iv;
                    }
                }
                kin = step_underdamped_exp(kin, cfg, cfg.dt, f_kin, ix, iv);
            } else {
                std::fill(db.begin(), db.end(), 0.0);
                for (int j = 0; j < n_sub; ++j) {
                    mean_field_force_all(cfg.potential, cfg.kernel, kin.x, n, d, f_kin);
                    const std::uint32_t sub = static_cast<std::uint32_t>(s * n_sub + j);
                    for (int i = 0; i < n; ++i) {
                        for (int c = 0; c < d; ++c) {
                            const NoiseKey key{cfg.seed, replica, static_cast<std::uint32_t>(i),
                                               sub, static_cast<std::uint32_t>(c)};
                            db_sub[static_cast<std::size_t>(i) * d + c] =
                                brownian_increment(key, h_sub);
                        }
                    }
                    kin = step_underdamped_em(kin, cfg, h_sub, f_kin, db_sub);
                    for (std::size_t k = 0; k < m; ++k) db[k] += db_sub[k];
                }
            }
            if (with_overdamped) {
                mean_field_force_all(cfg.potential, cfg.kernel, od.x, n, d, f_od);
                od = step_overdamped_em(od, cfg, cfg.dt, f_od, db);
            }
        } catch (const SingularityError& e) {
            throw SingularityError(std::string(e.what()) + " at t=" + std::to_string(s * cfg.dt),
                                   e.particle_i(), e.particle_j());
        }
        kin.t = (s + 1) * cfg.dt;
        if (with_overdamped) od.t = kin.t;
        take(s + 1);
    }
    return snaps;
}

}  // namespace

std::vector<CoupledSnapshot> simulate_coupled(const SimConfig& cfg,
                                              std::span<const double> record_times,
                                              std::uint32_t replica) {
    return run_coupled(cfg, record_times, replica, true);
}

std::vector<CoupledSnapshot> simulate_kinetic(const SimConfig& cfg,
                                              std::span<const double> record_times,
                                              std::uint32_t replica) {
    return run_coupled(cfg, record_times, replica, false);
}

}  // namespace overdamp
