#pragma once

// Empirical distances and moment statistics: the coupled mean-square
// displacement (the quantity whose sup-in-time the rate study bounds),
// exact 1D Wasserstein by sorting, exact small-N Wasserstein by optimal
// assignment, and the mean-square modulus-of-continuity probe.

#include <span>
#include <stdexcept>
#include <vector>

namespace overdamp {

class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct GapRecord {
    double t = 0;
    double msd = 0;
    double moment2_kinetic = 0;
    double moment2_overdamped = 0;
};

// (1/N) sum_i |a_i - b_i|^2 under index-wise pairing; upper-bounds the
// empirical W_2^2 by construction.
double coupled_msd(std::span<const double> a, std::span<const double> b, int n, int d);

// (1/N) sum_i |x_i|^2.
double second_moment(std::span<const double> xs, int n, int d);

// Exact W_2 between two equal-size 1D empirical measures (sorted pairing).
double w2_empirical_1d(std::span<const double> a, std::span<const double> b);

// Exact empirical W_p (p in {1,2}) via optimal assignment, N <= 512.
double wp_assignment_exact(std::span<const double> a, std::span<const double> b, int n, int d,
                           int p);

struct ModulusPoint {
    double delta = 0;
    double mean_square_increment = 0;
};

struct ModulusReport {
    std::vector<ModulusPoint> points;
    // Minimal c with msd(delta) <= c (delta + sqrt(delta)) over the grid.
    double c_fit = 0;
};

// Position frames on a uniform time grid (spacing inferred from `times`);
// for each delta, averages (1/N) sum_i |x_i(t+delta) - x_i(t)|^2 over all
// admissible start times.
ModulusReport modulus_probe(std::span<const double> times,
                            const std::vector<std::vector<double>>& frames, int n, int d,
                            std::span<const double> delta_grid);

}  // namespace overdamp
