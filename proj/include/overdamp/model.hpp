#pragma once

// Domain types for the interacting particle system: external potentials,
// interaction kernels, position/velocity ensembles, and the mean-field
// force F(x, rho) = -grad Phi(x) - (grad K * rho)(x) evaluated against the
// empirical measure of an ensemble.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace overdamp {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SingularityError : public std::runtime_error {
  public:
    SingularityError(std::string msg, int i, int j) : std::runtime_error(std::move(msg)), i_(i), j_(j) {}
    int particle_i() const { return i_; }
    int particle_j() const { return j_; }

  private:
    int i_;
    int j_;
};

struct ExternalPotential {
    enum class Kind { Zero, Harmonic };

    Kind kind = Kind::Zero;
    double scale = 0;  // Harmonic: Phi(x) = scale |x|^2 / 2
    double c_phi = 0;  // claimed growth/Lipschitz constant

    static ExternalPotential zero() { return {Kind::Zero, 0.0, 0.0}; }

    static ExternalPotential harmonic(double s) {
        if (!(s > 0)) throw ConfigError("harmonic potential scale must be positive");
        return {Kind::Harmonic, s, s};
    }

    double value(std::span<const double> x) const {
        if (kind == Kind::Zero) return 0.0;
        double r2 = 0;
        for (double xi : x) r2 += xi * xi;
        return 0.5 * scale * r2;
    }

    void grad(std::span<const double> x, std::span<double> out) const;
};

struct InteractionKernel {
    enum class Kind { Zero, SmoothRegular, RegularizedNewtonian, PowerLaw };

    Kind kind = Kind::Zero;
    double sign = 0;   // Newtonian: +1 repulsive, -1 attractive
    double eps = 0;    // regularization length
    double alpha = 0;  // power-law exponent
    double grad_bound = 0;  // C_K-style bound where finite (SmoothRegular)

    static InteractionKernel zero() { return {}; }

    // grad K(x) = x e^{-|x|^2}; bounded by and Lipschitz with constant 1.
    static InteractionKernel smooth_regular() {
        InteractionKernel k;
        k.kind = Kind::SmoothRegular;
        k.grad_bound = 1.0;
        return k;
    }

    // grad K_eps(x) = sign * x / (|x|^2 + eps^2)^{d/2}
    static InteractionKernel regularized_newtonian(double sign, double eps) {
        if (sign != 1.0 && sign != -1.0) throw ConfigError("newtonian kernel sign must be +1 or -1");
        if (!(eps >= 0)) throw ConfigError("newtonian kernel eps must be >= 0");
        InteractionKernel k;
        k.kind = Kind::RegularizedNewtonian;
        k.sign = sign;
        k.eps = eps;
        return k;
    }

    // K_eps(x) = (|x|^2 + eps^2)^{-alpha/2}, grad K_eps(x) = -alpha x (|x|^2+eps^2)^{-(alpha+2)/2}
    static InteractionKernel power_law(double alpha, double eps) {
        if (!(alpha > 0)) throw ConfigError("power-law kernel alpha must be positive");
        if (!(eps > 0)) throw ConfigError("power-law kernel eps must be positive");
        InteractionKernel k;
        k.kind = Kind::PowerLaw;
        k.alpha = alpha;
        k.eps = eps;
        return k;
    }

    void grad(std::span<const double> r, std::span<double> out) const;

    // sup_x |grad K(x)| in dimension d, where finite.
    double grad_sup(int d) const;
};

struct KineticEnsemble {
    int n = 0;
    int d = 0;
    double t = 0;
    std::vector<double> x;  // n*d, row-major
    std::vector<double> v;  // n*d, row-major
};

struct OverdampedEnsemble {
    int n = 0;
    int d = 0;
    double t = 0;
    std::vector<double> x;  // n*d, row-major
};

enum class Integrator { ExponentialOU, EulerMaruyama };

struct SimConfig {
    double gamma = 1.0;
    int n_particles = 1;
    int dim = 1;
    double t_final = 1.0;
    double dt = 0.01;
    std::uint64_t seed = 0;
    int replicas = 1;
    ExternalPotential potential;
    InteractionKernel kernel;
    Integrator integrator = Integrator::ExponentialOU;
    // Product-Gaussian initial law f_0: X_0 ~ N(x0_mean, x0_var I), V_0 ~ N(v0_mean, v0_var I).
    double x0_mean = 0.0;
    double x0_var = 1.0;
    double v0_mean = 0.0;
    double v0_var = 1.0;

    void validate() const;
};

// grad Phi at a single point.
void grad_phi(const ExternalPotential& p, std::span<const double> x, std::span<double> out);

// grad K at a single displacement.
void grad_k(const InteractionKernel& k, std::span<const double> r, std::span<double> out);

// F_i = -grad Phi(x_i) - (1/N) sum_{j != i} grad K(x_i - x_j).
// The gamma prefactor of the kinetic SDE lives in the integrator.
void mean_field_force(const ExternalPotential& p, const InteractionKernel& k,
                      std::span<const double> xs, int n, int d, int i, std::span<double> out);

// All rows at once; the pairwise loop visits each (i,j) pair once and
// accumulates in fixed lexicographic order, so the result is bit-identical
// to n calls of mean_field_force and independent of worker count.
void mean_field_force_all(const ExternalPotential& p, const InteractionKernel& k,
                          std::span<const double> xs, int n, int d, std::span<double> out);

struct PhiValidationReport {
    double r = 0;
    double probe_radius = 0;
    int n_probes = 0;
    double sup_weighted_grad = 0;   // sup |grad Phi|^r e^{-Phi}
    double sup_growth_ratio = 0;    // sup |grad Phi| / (1 + |x|)
    double sup_lipschitz_ratio = 0; // over consecutive probe pairs
    double min_value = 0;           // min Phi over probes
    bool pass = false;
};

// Probes the external-potential assumptions (nonnegativity, linear gradient
// growth, gradient Lipschitz bound, finiteness of sup |grad Phi|^r e^{-Phi})
// on a deterministic 1-d grid of n_probes points in [-probe_radius, probe_radius].
PhiValidationReport validate_assumption_phi(const ExternalPotential& p, double r,
                                            double probe_radius, int n_probes);

}  // namespace overdamp
