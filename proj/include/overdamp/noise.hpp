#pragma once

// Reproducible Brownian increments and the jointly-Gaussian OU-filtered
// increments (dB, I_X, I_V) used by the exponential integrator and the
// synchronous coupling with the overdamped system.
//
// All draws are pure functions of a NoiseKey, backed by Philox4x32-10
// (Salmon et al., SC 2011), so identical keys give identical values on
// every platform and under any parallel schedule.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace overdamp {

struct NoiseKey {
    std::uint64_t seed = 0;
    std::uint32_t replica = 0;
    std::uint32_t particle = 0;
    std::uint32_t step = 0;
    std::uint32_t component = 0;
};

// Reserved step values for the initial-condition draws; time steps are
// capped well below these by any realistic run length.
inline constexpr std::uint32_t kStepInitialPosition = 0xFFFFFFFFu;
inline constexpr std::uint32_t kStepInitialVelocity = 0xFFFFFFFEu;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u;
    constexpr std::uint32_t M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

inline std::array<std::uint32_t, 2> derive_key(std::uint64_t seed, std::uint32_t replica) {
    const std::uint64_t mixed =
        splitmix64(splitmix64(seed) ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(replica) + 1)));
    return {static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
}

}  // namespace detail

// Two independent standard normals, pure in (key, draw).
inline std::pair<double, double> standard_normal_pair(const NoiseKey& key, std::uint32_t draw) {
    const auto out = detail::philox4x32_10({key.particle, key.step, key.component, draw},
                                           detail::derive_key(key.seed, key.replica));
    const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    // u1 in (0,1] so the log is finite; u2 in [0,1).
    const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

// N(0, h) Brownian increment over a step of length h.
inline double brownian_increment(const NoiseKey& key, double h) {
    if (!(h > 0.0)) throw std::domain_error("brownian_increment: step h must be positive");
    return std::sqrt(h) * standard_normal_pair(key, 0).first;
}

// Covariance of the per-step, per-component triple
//   dB  = int dB_s
//   I_X = int (1 - e^{-g^2(h-s)}) dB_s
//   I_V = int e^{-g^2(h-s)} dB_s
// over one step of length h, with a = gamma^2 h.
struct OuIncrementCovariance {
    double a = 0;
    double var_db = 0;
    double var_iv = 0;
    double var_ix = 0;
    double cov_db_iv = 0;
    double cov_db_ix = 0;
    double cov_ix_iv = 0;

    // Ordered (dB, I_X, I_V).
    std::array<std::array<double, 3>, 3> matrix() const {
        return {{{var_db, cov_db_ix, cov_db_iv},
                 {cov_db_ix, var_ix, cov_ix_iv},
                 {cov_db_iv, cov_ix_iv, var_iv}}};
    }
};

inline OuIncrementCovariance ou_covariance(double gamma, double h) {
    if (!(gamma > 0.0)) throw std::domain_error("ou_covariance: gamma must be positive");
    if (!(h > 0.0)) throw std::domain_error("ou_covariance: h must be positive");
    const double g2 = gamma * gamma;
    const double a = g2 * h;
    const double em = -std::expm1(-a);        // 1 - e^{-a}
    const double e2 = -std::expm1(-2.0 * a);  // 1 - e^{-2a}

    OuIncrementCovariance c;
    c.a = a;
    c.var_db = h;
    c.cov_db_iv = em / g2;
    c.var_iv = e2 / (2.0 * g2);
    c.cov_db_ix = h - em / g2;
    if (a < 1e-4) {
        // var_ix = h a^2 (1/3 - a/4 + 7a^2/60 - ...) is O(a^2 h) while the
        // individual terms are O(h); the direct difference cancels badly.
        c.var_ix = h * a * a * (1.0 / 3.0 - a / 4.0 + 7.0 * a * a / 60.0);
        c.cov_ix_iv = h * a * (0.5 - a / 2.0 + 7.0 * a * a / 24.0);
    } else {
        c.var_ix = h - 2.0 * em / g2 + e2 / (2.0 * g2);
        c.cov_ix_iv = em / g2 - e2 / (2.0 * g2);
    }
    return c;
}

// Lower-triangular factor of the 3x3 covariance, with tiny negative pivots
// (roundoff near the a->0 and a->infinity degeneracies) clamped to zero.
struct CoupledIncrementChol {
    // Row-major lower triangle: l00, l10, l11, l20, l21, l22.
    std::array<double, 6> l{};
};

inline CoupledIncrementChol cholesky(const OuIncrementCovariance& cov) {
    const auto m = cov.matrix();
    const double trace = m[0][0] + m[1][1] + m[2][2];
    const double clamp_tol = 1e-12 * trace;
    CoupledIncrementChol ch;
    double l00 = m[0][0];
    if (l00 < 0) {
        if (l00 < -clamp_tol) throw std::runtime_error("ou covariance not PSD (pivot 0)");
        l00 = 0;
    }
    l00 = std::sqrt(l00);
    const double l10 = l00 > 0 ? m[1][0] / l00 : 0.0;
    const double l20 = l00 > 0 ? m[2][0] / l00 : 0.0;
    double p1 = m[1][1] - l10 * l10;
    if (p1 < 0) {
        if (p1 < -clamp_tol) throw std::runtime_error("ou covariance not PSD (pivot 1)");
        p1 = 0;
    }
    const double l11 = std::sqrt(p1);
    const double l21 = l11 > 0 ? (m[2][1] - l20 * l10) / l11 : 0.0;
    double p2 = m[2][2] - l20 * l20 - l21 * l21;
    if (p2 < 0) {
        if (p2 < -clamp_tol) throw std::runtime_error("ou covariance not PSD (pivot 2)");
        p2 = 0;
    }
    const double l22 = std::sqrt(p2);
    ch.l = {l00, l10, l11, l20, l21, l22};
    return ch;
}

struct CoupledIncrements {
    double db = 0;
    double ix = 0;
    double iv = 0;
};

// One draw of (dB, I_X, I_V) from N(0, Sigma) using a precomputed factor.
inline CoupledIncrements sample_coupled_increments(const NoiseKey& key,
                                                   const CoupledIncrementChol& ch) {
    const auto [z0, z1] = standard_normal_pair(key, 0);
    const double z2 = standard_normal_pair(key, 1).first;
    CoupledIncrements inc;
    inc.db = ch.l[0] * z0;
    inc.ix = ch.l[1] * z0 + ch.l[2] * z1;
    inc.iv = ch.l[3] * z0 + ch.l[4] * z1 + ch.l[5] * z2;
    return inc;
}

inline CoupledIncrements sample_coupled_increments(const NoiseKey& key, double gamma, double h) {
    return sample_coupled_increments(key, cholesky(ou_covariance(gamma, h)));
}

}  // namespace overdamp
