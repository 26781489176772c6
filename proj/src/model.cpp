#include "overdamp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace overdamp {

namespace {

bool all_finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

double norm2(std::span<const double> x) {
    double r2 = 0;
    for (double xi : x) r2 += xi * xi;
    return r2;
}

// |x|^2 + eps^2 raised to d/2, cheap for the common dimensions.
inline double newtonian_denom(double r2e, int d) {
    switch (d) {
        case 1: return std::sqrt(r2e);
        case 2: return r2e;
        case 3: return r2e * std::sqrt(r2e);
        case 4: return r2e * r2e;
        default: return std::pow(r2e, 0.5 * d);
    }
}

}  // namespace

void ExternalPotential::grad(std::span<const double> x, std::span<double> out) const {
    if (out.size() != x.size()) throw std::domain_error("grad_phi: output size mismatch");
    if (!all_finite(x)) throw std::domain_error("grad_phi: non-finite input point");
    switch (kind) {
        case Kind::Zero:
            std::fill(out.begin(), out.end(), 0.0);
            break;
        case Kind::Harmonic:
            for (std::size_t k = 0; k < x.size(); ++k) out[k] = scale * x[k];
            break;
    }
}

void InteractionKernel::grad(std::span<const double> r, std::span<double> out) const {
    if (out.size() != r.size()) throw std::domain_error("grad_k: output size mismatch");
    if (!all_finite(r)) throw std::domain_error("grad_k: non-finite displacement");
    const int d = static_cast<int>(r.size());
    switch (kind) {
        case Kind::Zero:
            std::fill(out.begin(), out.end(), 0.0);
            break;
        case Kind::SmoothRegular: {
            const double w = std::exp(-norm2(r));
            for (int k = 0; k < d; ++k) out[k] = r[k] * w;
            break;
        }
        case Kind::RegularizedNewtonian: {
            const double r2 = norm2(r);
            if (r2 == 0.0 && eps == 0.0)
                throw SingularityError("grad_k: Newtonian kernel evaluated at the origin with eps=0", -1, -1);
            const double w = sign / newtonian_denom(r2 + eps * eps, d);
            for (int k = 0; k < d; ++k) out[k] = r[k] * w;
            break;
        }
        case Kind::PowerLaw: {
            const double r2e = norm2(r) + eps * eps;
            const double w = -alpha * std::pow(r2e, -0.5 * (alpha + 2.0));
            for (int k = 0; k < d; ++k) out[k] = r[k] * w;
            break;
        }
    }
}

double InteractionKernel::grad_sup(int d) const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::SmoothRegular:
            // max_s s e^{-s^2} at s = 1/sqrt(2)
            return std::exp(-0.5) / std::sqrt(2.0);
        case Kind::RegularizedNewtonian: {
            if (eps == 0.0) return std::numeric_limits<double>::infinity();
            if (d == 1) return 1.0;  // s / sqrt(s^2 + eps^2) -> 1
            // max_s s / (s^2 + eps^2)^{d/2} at s = eps / sqrt(d-1)
            const double s = eps / std::sqrt(static_cast<double>(d - 1));
            return s / newtonian_denom(s * s + eps * eps, d);
        }
        case Kind::PowerLaw: {
            // max_s alpha s (s^2 + eps^2)^{-(alpha+2)/2} at s = eps / sqrt(alpha+1)
            const double s = eps / std::sqrt(alpha + 1.0);
            return alpha * s * std::pow(s * s + eps * eps, -0.5 * (alpha + 2.0));
        }
    }
    return 0.0;
}

void SimConfig::validate() const {
    if (!(gamma >= 1.0)) throw ConfigError("gamma must be >= 1");
    if (n_particles < 1) throw ConfigError("n must be >= 1");
    if (dim < 1) throw ConfigError("dim must be >= 1");
    if (!(t_final > 0)) throw ConfigError("t_final must be positive");
    if (!(dt > 0)) throw ConfigError("dt must be positive");
    if (replicas < 1) throw ConfigError("replicas must be >= 1");
    if (!(x0_var >= 0) || !(v0_var >= 0)) throw ConfigError("initial variances must be >= 0");
    if (integrator == Integrator::EulerMaruyama && dt * gamma * gamma > 50.0)
        throw ConfigError("dt * gamma^2 must be <= 50 for the Euler-Maruyama integrator");
}

void grad_phi(const ExternalPotential& p, std::span<const double> x, std::span<double> out) {
    p.grad(x, out);
}

void grad_k(const InteractionKernel& k, std::span<const double> r, std::span<double> out) {
    k.grad(r, out);
}

void mean_field_force(const ExternalPotential& p, const InteractionKernel& k,
                      std::span<const double> xs, int n, int d, int i, std::span<double> out) {
    if (i < 0 || i >= n) throw std::domain_error("mean_field_force: particle index out of range");
    if (xs.size() != static_cast<std::size_t>(n) * d || out.size() != static_cast<std::size_t>(d))
        throw std::domain_error("mean_field_force: shape mismatch");

    std::vector<double> r(d), g(d), acc(d, 0.0);
    const double* xi = xs.data() + static_cast<std::size_t>(i) * d;
    if (k.kind != InteractionKernel::Kind::Zero) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* xj = xs.data() + static_cast<std::size_t>(j) * d;
            for (int c = 0; c < d; ++c) r[c] = xi[c] - xj[c];
            try {
                k.grad(r, g);
            } catch (const SingularityError& e) {
                throw SingularityError(std::string(e.what()) + " (pair " + std::to_string(i) + "," +
                                           std::to_string(j) + ")",
                                       i, j);
            }
            for (int c = 0; c < d; ++c) acc[c] += g[c];
        }
    }
    p.grad(std::span<const double>(xi, d), out);
    for (int c = 0; c < d; ++c) out[c] = -out[c] - acc[c] / n;
}

namespace {

// Pairwise accumulation, antisymmetry exploited, fixed lexicographic order.
// The additions into row i arrive in j = 0..n-1 order (skipping i), exactly
// matching the per-particle loop, and -grad K(-r) is bit-equal to grad K(r)
// for every built-in kernel, so the batched result equals n single calls.
template <typename GradFn>
void accumulate_pairs(GradFn&& grad_fn, std::span<const double> xs, int n, int d,
                      std::vector<double>& sums) {
    std::vector<double> r(d), g(d);
    for (int i = 0; i < n; ++i) {
        const double* xi = xs.data() + static_cast<std::size_t>(i) * d;
        double* si = sums.data() + static_cast<std::size_t>(i) * d;
        for (int j = i + 1; j < n; ++j) {
            const double* xj = xs.data() + static_cast<std::size_t>(j) * d;
            for (int c = 0; c < d; ++c) r[c] = xi[c] - xj[c];
            grad_fn(r.data(), g.data(), i, j);
            double* sj = sums.data() + static_cast<std::size_t>(j) * d;
            for (int c = 0; c < d; ++c) {
                si[c] += g[c];
                sj[c] -= g[c];
            }
        }
    }
}

}  // namespace

void mean_field_force_all(const ExternalPotential& p, const InteractionKernel& k,
                          std::span<const double> xs, int n, int d, std::span<double> out) {
    if (xs.size() != static_cast<std::size_t>(n) * d || out.size() != xs.size())
        throw std::domain_error("mean_field_force_all: shape mismatch");
    if (!std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); }))
        throw std::domain_error("mean_field_force_all: non-finite ensemble");

    std::vector<double> sums(xs.size(), 0.0);
    switch (k.kind) {
        case InteractionKernel::Kind::Zero:
            break;
        case InteractionKernel::Kind::SmoothRegular:
            accumulate_pairs(
                [d](const double* r, double* g, int, int) {
                    double r2 = 0;
                    for (int c = 0; c < d; ++c) r2 += r[c] * r[c];
                    const double w = std::exp(-r2);
                    for (int c = 0; c < d; ++c) g[c] = r[c] * w;
                },
                xs, n, d, sums);
            break;
        case InteractionKernel::Kind::RegularizedNewtonian: {
            const double eps2 = k.eps * k.eps;
            const double sign = k.sign;
            accumulate_pairs(
                [d, eps2, sign](const double* r, double* g, int i, int j) {
                    double r2 = 0;
                    for (int c = 0; c < d; ++c) r2 += r[c] * r[c];
                    if (r2 == 0.0 && eps2 == 0.0)
                        throw SingularityError("mean_field_force_all: coincident particles under "
                                               "unregularized Newtonian kernel (pair " +
                                                   std::to_string(i) + "," + std::to_string(j) + ")",
                                               i, j);
                    const double w = sign / newtonian_denom(r2 + eps2, d);
                    for (int c = 0; c < d; ++c) g[c] = r[c] * w;
                },
                xs, n, d, sums);
            break;
        }
        case InteractionKernel::Kind::PowerLaw: {
            const double eps2 = k.eps * k.eps;
            const double alpha = k.alpha;
            accumulate_pairs(
                [d, eps2, alpha](const double* r, double* g, int, int) {
                    double r2 = 0;
                    for (int c = 0; c < d; ++c) r2 += r[c] * r[c];
                    const double w = -alpha * std::pow(r2 + eps2, -0.5 * (alpha + 2.0));
                    for (int c = 0; c < d; ++c) g[c] = r[c] * w;
                },
                xs, n, d, sums);
            break;
        }
    }

    std::vector<double> gp(d);
    for (int i = 0; i < n; ++i) {
        const double* xi = xs.data() + static_cast<std::size_t>(i) * d;
        p.grad(std::span<const double>(xi, d), gp);
        double* oi = out.data() + static_cast<std::size_t>(i) * d;
        const double* si = sums.data() + static_cast<std::size_t>(i) * d;
        for (int c = 0; c < d; ++c) oi[c] = -gp[c] - si[c] / n;
    }
}

PhiValidationReport validate_assumption_phi(const ExternalPotential& p, double r,
                                            double probe_radius, int n_probes) {
    if (n_probes < 1) throw std::domain_error("validate_assumption_phi: n_probes must be >= 1");
    PhiValidationReport rep;
    rep.r = r;
    rep.probe_radius = probe_radius;
    rep.n_probes = n_probes;
    rep.min_value = std::numeric_limits<double>::infinity();

    double prev_x = 0, prev_g = 0;
    bool have_prev = false;
    for (int k = 0; k < n_probes; ++k) {
        const double x = n_probes == 1
                             ? 0.0
                             : -probe_radius + 2.0 * probe_radius * k / (n_probes - 1);
        const double pt[1] = {x};
        double g[1];
        p.grad(std::span<const double>(pt, 1), std::span<double>(g, 1));
        const double phi = p.value(std::span<const double>(pt, 1));
        const double gn = std::abs(g[0]);
        rep.min_value = std::min(rep.min_value, phi);
        rep.sup_weighted_grad = std::max(rep.sup_weighted_grad, std::pow(gn, r) * std::exp(-phi));
        rep.sup_growth_ratio = std::max(rep.sup_growth_ratio, gn / (1.0 + std::abs(x)));
        if (have_prev && x != prev_x)
            rep.sup_lipschitz_ratio =
                std::max(rep.sup_lipschitz_ratio, std::abs(g[0] - prev_g) / std::abs(x - prev_x));
        prev_x = x;
        prev_g = g[0];
        have_prev = true;
    }

    const double tol = 1.0 + 1e-9;
    rep.pass = rep.min_value >= 0.0 && std::isfinite(rep.sup_weighted_grad) &&
               rep.sup_growth_ratio <= p.c_phi * tol + 1e-300 &&
               rep.sup_lipschitz_ratio <= p.c_phi * tol + 1e-300;
    // Zero potential: both suprema are 0 and c_phi may be 0.
    if (p.kind == ExternalPotential::Kind::Zero) rep.pass = rep.min_value >= 0.0;
    return rep;
}

}  // namespace overdamp
