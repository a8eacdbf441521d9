#pragma once

#include <cstdint>
#include <vector>

#include "permlc/density.hpp"

namespace permlc {

enum class Proposal { randomWalk, langevin };
enum class Method { direct, anneal };

struct SamplerConfig {
    std::uint64_t seed = 0;
    int chains = 4;
    int steps_per_phase = 5000;
    int burn_in = 1000;
    // beta_0 = 0 < beta_1 < ... < beta_K = 1; empty selects the default
    // schedule with K = max(8, n) and (1 - beta) halving each phase.
    std::vector<double> anneal_schedule;
    double step_size = 0.0;  // 0 selects the default 0.25 / sqrt(2n)
    Proposal proposal = Proposal::langevin;
    int threads = 0;  // 0 selects min(hardware threads, chains)
};

// A chain's walker: current point, cached log-density of the phase target,
// and which annealing phase it is in.
struct ChainState {
    PointC position;
    double cached_log_density = 0.0;
    std::size_t phase_index = 0;
};

struct EstimateReport {
    Method method = Method::direct;
    double estimate = 0.0;
    double std_error = 0.0;
    double rel_error_target = 0.05;  // the desk-scale accuracy the defaults aim at
    double effective_sample_size = 0.0;
    std::vector<double> acceptance_rates;  // one entry per annealing phase
    std::int64_t samples_used = 0;
    std::uint64_t seed = 0;
    double wall_clock_seconds = 0.0;
    std::vector<double> schedule;
};

struct Diagnostics {
    double effective_sample_size = 0.0;
    double split_rhat = 0.0;
    bool degenerate = false;  // all traces constant; ESS forced to 0, R-hat undefined
};

std::vector<double> default_anneal_schedule(std::size_t n);
double default_step_size(std::size_t n);

// count i.i.d. draws from the standard complex Gaussian pi^{-n} e^{-|z|^2}.
std::vector<PointC> sample_complex_gaussian(std::size_t n, std::int64_t count, std::uint64_t seed);

// Metropolis rule min(1, exp(delta)): accept iff u < min(1, exp(delta)).
bool mh_accept(double log_density_delta, double uniform_draw);

// per A as a plain Gaussian expectation of prod_j (1 + |ell_j(z)|^2),
// averaged in log space. Unbiased; variance grows quickly with n.
EstimateReport estimate_direct(const DensityModel& d, const SamplerConfig& cfg);

// Annealed importance sampling over f_beta propto e^{-|z|^2} prod(1 + beta |ell_j|^2):
// each phase target is log-concave, per A = prod_k E_k[ratio_k], std error by
// the delta method on the log-ratios.
EstimateReport estimate_anneal(const DensityModel& d, const SamplerConfig& cfg);

// Monte Carlo check of per B = E[|ell_1|^2 ... |ell_n|^2] with L = factor_psd(B).
EstimateReport wick_check(const HermitianMatrix& b, const SamplerConfig& cfg);

// ESS by initial-positive-sequence autocorrelation truncation and split R-hat
// over half chains. Needs >= 2 chains of >= 100 steps.
Diagnostics diagnostics(const std::vector<std::vector<double>>& chain_traces);

}  // namespace permlc
