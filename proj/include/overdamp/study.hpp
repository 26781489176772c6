#pragma once

// Rate-verification harness: sweep gamma, run replicated coupled
// simulations, aggregate the sup-in-time coupled MSD, and fit the log-log
// slope against gamma.

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "overdamp/model.hpp"

namespace overdamp {

struct RateStudySpec {
    SimConfig base;  // gamma is overridden per grid point
    std::vector<double> gamma_grid;
    int replicas = 8;
    int record_count = 64;

    void validate() const;
};

struct GammaPoint {
    double gamma = 0;
    double sup_msd = 0;        // mean over replicas of sup_t coupled MSD
    double mc_stderr = 0;      // standard error over replicas
    double sup_moment2_kinetic = 0;
    double sup_moment2_overdamped = 0;
};

struct FitLine {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

struct RateFitResult {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    std::vector<GammaPoint> per_gamma;
    std::string warning;  // nonempty when the top-gamma signal is noise-dominated
};

// Ordinary least squares on (log x, log y); zero-variance y reports slope 0
// and r^2 = 1 by convention.
FitLine fit_loglog_slope(std::span<const std::pair<double, double>> points);

// Runs the full sweep. Replicas and grid points run in parallel up to the
// OVERDAMP_THREADS cap; aggregation order is fixed, so the result is
// identical for any worker count.
RateFitResult run_rate_study(const RateStudySpec& spec);

// CSV rows per grid point: gamma,sup_msd,mc_stderr,n,dim,T,dt,integrator,eps
void emit_records(const RateFitResult& result, const RateStudySpec& spec, std::ostream& os);

// JSON summary: {slope, intercept, r_squared, warning, per_gamma:[...]}
void emit_summary_json(const RateFitResult& result, std::ostream& os);

// Worker cap from OVERDAMP_THREADS, falling back to hardware concurrency.
int worker_count();

}  // namespace overdamp
