#include "permlc/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "permlc/errors.hpp"
#include "permlc/rng.hpp"

namespace permlc {

namespace {

constexpr double kDivergenceBound = 1e3;

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_config(const SamplerConfig& cfg) {
    if (cfg.chains < 1) throw BadInput("sampler config: chains must be >= 1");
    if (cfg.steps_per_phase < 1) throw BadInput("sampler config: stepsPerPhase must be >= 1");
    if (cfg.burn_in < 0) throw BadInput("sampler config: burnIn must be >= 0");
    if (cfg.step_size < 0.0) throw BadInput("sampler config: stepSize must be positive");
    if (!cfg.anneal_schedule.empty()) {
        const std::vector<double>& s = cfg.anneal_schedule;
        if (s.size() < 2 || s.front() != 0.0 || s.back() != 1.0)
            throw BadInput("anneal schedule must start at 0 and end at 1");
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!(s[i] > s[i - 1])) throw BadInput("anneal schedule must be strictly ascending");
    }
}

std::vector<double> resolve_schedule(const SamplerConfig& cfg, std::size_t n) {
    if (!cfg.anneal_schedule.empty()) return cfg.anneal_schedule;
    return default_anneal_schedule(n);
}

double resolve_step_size(const SamplerConfig& cfg, std::size_t n) {
    return cfg.step_size > 0.0 ? cfg.step_size : default_step_size(n);
}

int resolve_threads(const SamplerConfig& cfg) {
    if (cfg.threads > 0) return std::min(cfg.threads, cfg.chains);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(cfg.chains)));
}

PointC gaussian_point(std::size_t n, Rng& rng) {
    PointC p = PointC::zero(n);
    for (std::size_t k = 0; k < n; ++k) p.z[k] = rng.complex_normal();
    return p;
}

void check_in_bounds(const PointC& z) {
    for (const Complex& c : z.z) {
        // negated form so NaN coordinates also count as divergence
        if (!(std::abs(c.real()) <= kDivergenceBound) || !(std::abs(c.imag()) <= kDivergenceBound))
            throw ChainDiverged("chain coordinate exceeded " + std::to_string(kDivergenceBound) +
                                "; reduce the step size");
    }
}

// log of the ratio prod_j (1 + b_next s_j) / (1 + b_cur s_j) at the current point
double log_phase_ratio(const std::vector<Complex>& ell, double beta_cur, double beta_next) {
    double w = 0.0;
    for (const Complex& lj : ell) {
        const double s = std::norm(lj);
        w += std::log1p(beta_next * s) - std::log1p(beta_cur * s);
    }
    return w;
}

struct ChainTraces {
    // phase_ratio[k][step] = ratio term exp(w) recorded at phase k
    std::vector<std::vector<double>> phase_ratio;
    std::vector<double> acceptance;  // per phase; phase 0 is i.i.d.
};

ChainTraces run_anneal_chain(const DensityModel& d, const SamplerConfig& cfg,
                             const std::vector<double>& schedule, double step_size,
                             int chain_index) {
    const std::size_t n = d.size();
    const std::size_t phases = schedule.size() - 1;
    const int keep = cfg.steps_per_phase;
    Rng rng(cfg.seed ^ static_cast<std::uint64_t>(chain_index));

    ChainTraces out;
    out.phase_ratio.assign(phases, {});
    out.acceptance.assign(phases, 0.0);

    ChainState state;
    state.position = gaussian_point(n, rng);
    state.phase_index = 0;

    // phase 0: beta = 0, the target is the standard Gaussian itself, so the
    // draws are exact and independent
    out.phase_ratio[0].reserve(keep);
    for (int step = 0; step < keep; ++step) {
        state.position = gaussian_point(n, rng);
        const std::vector<Complex> ell = eval_linear_forms(d, state.position);
        const double w = log_phase_ratio(ell, schedule[0], schedule[1]);
        const double ratio = std::exp(w);
        if (!std::isfinite(ratio)) throw NonFiniteWeight("non-finite annealing ratio at phase 0");
        out.phase_ratio[0].push_back(ratio);
    }
    out.acceptance[0] = 1.0;

    std::vector<double> x = state.position.to_real();
    std::vector<double> proposal(2 * n), noise(2 * n);

    for (std::size_t k = 1; k < phases; ++k) {
        const double beta = schedule[k];
        state.phase_index = k;
        state.cached_log_density = log_density_scaled(d, state.position, beta);
        out.phase_ratio[k].reserve(keep);

        std::vector<double> grad;
        if (cfg.proposal == Proposal::langevin)
            grad = grad_log_density_scaled(d, state.position, beta);

        long accepted = 0;
        const int total = cfg.burn_in + keep;
        for (int step = 0; step < total; ++step) {
            for (std::size_t i = 0; i < 2 * n; ++i) noise[i] = rng.normal();

            double log_hastings = 0.0;
            if (cfg.proposal == Proposal::randomWalk) {
                for (std::size_t i = 0; i < 2 * n; ++i)
                    proposal[i] = x[i] + step_size * noise[i];
            } else {
                // Euler step of the Langevin diffusion: drift step_size * grad,
                // noise sqrt(2 * step_size), with the Hastings correction for
                // the asymmetric proposal.
                const double sigma = std::sqrt(2.0 * step_size);
                for (std::size_t i = 0; i < 2 * n; ++i)
                    proposal[i] = x[i] + step_size * grad[i] + sigma * noise[i];
            }

            const PointC zp = PointC::from_real(proposal);
            const double logf_prop = log_density_scaled(d, zp, beta);

            std::vector<double> grad_prop;
            if (cfg.proposal == Proposal::langevin) {
                grad_prop = grad_log_density_scaled(d, zp, beta);
                double fwd = 0.0, back = 0.0;
                for (std::size_t i = 0; i < 2 * n; ++i) {
                    const double df = proposal[i] - x[i] - step_size * grad[i];
                    const double db = x[i] - proposal[i] - step_size * grad_prop[i];
                    fwd += df * df;
                    back += db * db;
                }
                log_hastings = (fwd - back) / (4.0 * step_size);
            }

            const double delta = logf_prop - state.cached_log_density + log_hastings;
            if (mh_accept(delta, rng.uniform())) {
                x = proposal;
                state.position = zp;
                state.cached_log_density = logf_prop;
                if (cfg.proposal == Proposal::langevin) grad = std::move(grad_prop);
                check_in_bounds(state.position);
                ++accepted;
            }

            if (step >= cfg.burn_in) {
                const std::vector<Complex> ell = eval_linear_forms(d, state.position);
                const double ratio = std::exp(log_phase_ratio(ell, beta, schedule[k + 1]));
                if (!std::isfinite(ratio))
                    throw NonFiniteWeight("non-finite annealing ratio at phase " +
                                          std::to_string(k));
                out.phase_ratio[k].push_back(ratio);
            }
        }
        out.acceptance[k] = static_cast<double>(accepted) / static_cast<double>(total);
    }
    return out;
}

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
    std::int64_t count = 0;
};

// Two-pass mean/variance over per-chain traces, combined in chain order so
// the result does not depend on scheduling.
MeanVar pooled_mean_var(const std::vector<const std::vector<double>*>& traces) {
    MeanVar mv;
    KahanSum sum;
    for (const auto* t : traces) {
        for (double v : *t) sum.add(v);
        mv.count += static_cast<std::int64_t>(t->size());
    }
    if (mv.count == 0) return mv;
    mv.mean = sum.value() / static_cast<double>(mv.count);
    KahanSum sq;
    for (const auto* t : traces) {
        for (double v : *t) {
            const double dev = v - mv.mean;
            sq.add(dev * dev);
        }
    }
    mv.variance = mv.count > 1 ? sq.value() / static_cast<double>(mv.count - 1) : 0.0;
    return mv;
}

// ESS of pooled chains; returns count for degenerate (zero-variance) input.
double pooled_ess(const std::vector<std::vector<double>>& traces) {
    if (traces.size() >= 2 && traces.front().size() >= 100) {
        const Diagnostics diag = diagnostics(traces);
        if (!diag.degenerate && std::isfinite(diag.effective_sample_size) &&
            diag.effective_sample_size > 0.0)
            return diag.effective_sample_size;
        std::int64_t count = 0;
        for (const auto& t : traces) count += static_cast<std::int64_t>(t.size());
        return diag.degenerate ? static_cast<double>(count) : 0.0;
    }
    std::int64_t count = 0;
    for (const auto& t : traces) count += static_cast<std::int64_t>(t.size());
    return static_cast<double>(count);
}

}  // namespace

std::vector<double> default_anneal_schedule(std::size_t n) {
    const std::size_t phases = std::max<std::size_t>(8, n);
    std::vector<double> schedule(phases + 1);
    double gap = 1.0;
    for (std::size_t k = 0; k < phases; ++k) {
        schedule[k] = 1.0 - gap;
        gap *= 0.5;
    }
    schedule[phases] = 1.0;
    return schedule;
}

double default_step_size(std::size_t n) {
    return 0.25 / std::sqrt(2.0 * static_cast<double>(n));
}

std::vector<PointC> sample_complex_gaussian(std::size_t n, std::int64_t count,
                                            std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PointC> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) out.push_back(gaussian_point(n, rng));
    return out;
}

bool mh_accept(double log_density_delta, double uniform_draw) {
    return uniform_draw < std::min(1.0, std::exp(log_density_delta));
}

EstimateReport estimate_direct(const DensityModel& d, const SamplerConfig& cfg) {
    validate_config(cfg);
    const auto start = Clock::now();
    const std::size_t n = d.size();
    const std::int64_t total =
        static_cast<std::int64_t>(cfg.chains) * static_cast<std::int64_t>(cfg.steps_per_phase);

    Rng rng(cfg.seed);
    std::vector<double> log_weights;
    log_weights.reserve(static_cast<std::size_t>(total));
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < total; ++i) {
        const PointC z = gaussian_point(n, rng);
        const std::vector<Complex> ell = eval_linear_forms(d, z);
        double s = 0.0;
        for (const Complex& lj : ell) s += std::log1p(std::norm(lj));
        log_weights.push_back(s);
        max_log = std::max(max_log, s);
    }

    // log-sum-exp: shift by the max, average the shifted weights
    KahanSum shifted_sum;
    for (double s : log_weights) shifted_sum.add(std::exp(s - max_log));
    const double mean_shifted = shifted_sum.value() / static_cast<double>(total);
    KahanSum sq;
    for (double s : log_weights) {
        const double dev = std::exp(s - max_log) - mean_shifted;
        sq.add(dev * dev);
    }
    const double sd_shifted =
        total > 1 ? std::sqrt(sq.value() / static_cast<double>(total - 1)) : 0.0;

    EstimateReport report;
    report.method = Method::direct;
    report.estimate = std::exp(max_log) * mean_shifted;
    report.std_error = std::exp(max_log) * sd_shifted / std::sqrt(static_cast<double>(total));
    report.effective_sample_size = static_cast<double>(total);
    report.samples_used = total;
    report.seed = cfg.seed;
    report.wall_clock_seconds = elapsed_seconds(start);
    return report;
}

EstimateReport estimate_anneal(const DensityModel& d, const SamplerConfig& cfg) {
    validate_config(cfg);
    const auto start = Clock::now();
    const std::size_t n = d.size();
    const std::vector<double> schedule = resolve_schedule(cfg, n);
    const double step_size = resolve_step_size(cfg, n);
    const std::size_t phases = schedule.size() - 1;
    const int threads = resolve_threads(cfg);

    std::vector<ChainTraces> chains(static_cast<std::size_t>(cfg.chains));
    std::exception_ptr failure;
    if (threads <= 1) {
        for (int c = 0; c < cfg.chains; ++c)
            chains[static_cast<std::size_t>(c)] = run_anneal_chain(d, cfg, schedule, step_size, c);
    } else {
        std::vector<std::thread> pool;
        std::mutex failure_mutex;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t]() {
                for (int c = t; c < cfg.chains; c += threads) {
                    try {
                        chains[static_cast<std::size_t>(c)] =
                            run_anneal_chain(d, cfg, schedule, step_size, c);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (std::thread& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    EstimateReport report;
    report.method = Method::anneal;
    report.seed = cfg.seed;
    report.schedule = schedule;
    report.acceptance_rates.resize(phases, 0.0);

    double estimate = 1.0;
    double log_variance = 0.0;
    double min_ess = std::numeric_limits<double>::infinity();
    std::int64_t samples = 0;
    for (std::size_t k = 0; k < phases; ++k) {
        std::vector<const std::vector<double>*> phase_traces;
        std::vector<std::vector<double>> ess_traces;
        phase_traces.reserve(chains.size());
        for (const ChainTraces& ct : chains) {
            phase_traces.push_back(&ct.phase_ratio[k]);
            ess_traces.push_back(ct.phase_ratio[k]);
        }
        const MeanVar mv = pooled_mean_var(phase_traces);
        samples += mv.count;
        estimate *= mv.mean;

        const double ess = k == 0 ? static_cast<double>(mv.count) : pooled_ess(ess_traces);
        if (mv.variance > 0.0) {
            // delta method: Var(log R_k) ~ Var(R_k) / R_k^2, with the mean's
            // variance taken as sample variance over the effective sample size
            log_variance += mv.variance / (std::max(ess, 1.0) * mv.mean * mv.mean);
            min_ess = std::min(min_ess, ess);
        }

        KahanSum acc;
        for (const ChainTraces& ct : chains) acc.add(ct.acceptance[k]);
        report.acceptance_rates[k] = acc.value() / static_cast<double>(chains.size());
    }

    report.estimate = estimate;
    report.std_error = estimate * std::sqrt(log_variance);
    report.effective_sample_size =
        std::isfinite(min_ess) ? min_ess
                               : static_cast<double>(cfg.chains) *
                                     static_cast<double>(cfg.steps_per_phase);
    report.samples_used = samples;
    report.wall_clock_seconds = elapsed_seconds(start);
    return report;
}

EstimateReport wick_check(const HermitianMatrix& b, const SamplerConfig& cfg) {
    validate_config(cfg);
    const auto start = Clock::now();
    const std::size_t n = b.size();
    if (n > 10) throw DimensionTooLarge("wick_check is limited to n <= 10");
    const LinearFormBundle l = factor_psd(b);
    const DensityModel d = DensityModel::from_forms_unchecked(l);

    const std::int64_t total =
        static_cast<std::int64_t>(cfg.chains) * static_cast<std::int64_t>(cfg.steps_per_phase);
    Rng rng(cfg.seed);
    std::vector<double> products;
    products.reserve(static_cast<std::size_t>(total));
    for (std::int64_t i = 0; i < total; ++i) {
        const PointC z = gaussian_point(n, rng);
        const std::vector<Complex> ell = eval_linear_forms(d, z);
        double prod = 1.0;
        for (const Complex& lj : ell) prod *= std::norm(lj);
        products.push_back(prod);
    }

    KahanSum sum;
    for (double p : products) sum.add(p);
    const double mean = sum.value() / static_cast<double>(total);
    KahanSum sq;
    for (double p : products) {
        const double dev = p - mean;
        sq.add(dev * dev);
    }
    const double sd = total > 1 ? std::sqrt(sq.value() / static_cast<double>(total - 1)) : 0.0;

    EstimateReport report;
    report.method = Method::direct;
    report.estimate = mean;
    report.std_error = sd / std::sqrt(static_cast<double>(total));
    report.effective_sample_size = static_cast<double>(total);
    report.samples_used = total;
    report.seed = cfg.seed;
    report.wall_clock_seconds = elapsed_seconds(start);
    return report;
}

Diagnostics diagnostics(const std::vector<std::vector<double>>& chain_traces) {
    if (chain_traces.size() < 2)
        throw InsufficientSamples("diagnostics needs at least 2 chains");
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto& t : chain_traces) len = std::min(len, t.size());
    if (len < 100) throw InsufficientSamples("diagnostics needs >= 100 steps per chain");

    const std::size_t n_chains = chain_traces.size();
    const double dn = static_cast<double>(len);

    const auto chain_mean_var = [len](const std::vector<double>& t, double& mean, double& var) {
        KahanSum s;
        for (std::size_t i = 0; i < len; ++i) s.add(t[i]);
        mean = s.value() / static_cast<double>(len);
        KahanSum q;
        for (std::size_t i = 0; i < len; ++i) {
            const double dev = t[i] - mean;
            q.add(dev * dev);
        }
        var = len > 1 ? q.value() / static_cast<double>(len - 1) : 0.0;
    };

    std::vector<double> means(n_chains), vars(n_chains);
    for (std::size_t c = 0; c < n_chains; ++c)
        chain_mean_var(chain_traces[c], means[c], vars[c]);

    double within = 0.0;
    for (double v : vars) within += v;
    within /= static_cast<double>(n_chains);

    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(n_chains);
    double between = 0.0;
    for (double m : means) between += (m - grand) * (m - grand);
    between = n_chains > 1 ? dn * between / static_cast<double>(n_chains - 1) : 0.0;

    const double var_plus = (dn - 1.0) / dn * within + between / dn;

    Diagnostics diag;
    if (var_plus <= 0.0) {
        diag.degenerate = true;
        diag.effective_sample_size = 0.0;
        diag.split_rhat = std::numeric_limits<double>::quiet_NaN();
        return diag;
    }

    // split R-hat over half chains
    {
        const std::size_t half = len / 2;
        std::vector<double> sm, sv;
        for (const auto& t : chain_traces) {
            for (int part = 0; part < 2; ++part) {
                KahanSum s;
                for (std::size_t i = 0; i < half; ++i)
                    s.add(t[static_cast<std::size_t>(part) * half + i]);
                const double m = s.value() / static_cast<double>(half);
                KahanSum q;
                for (std::size_t i = 0; i < half; ++i) {
                    const double dev = t[static_cast<std::size_t>(part) * half + i] - m;
                    q.add(dev * dev);
                }
                sm.push_back(m);
                sv.push_back(q.value() / static_cast<double>(half - 1));
            }
        }
        double w = 0.0;
        for (double v : sv) w += v;
        w /= static_cast<double>(sv.size());
        double g = 0.0;
        for (double m : sm) g += m;
        g /= static_cast<double>(sm.size());
        double bvar = 0.0;
        for (double m : sm) bvar += (m - g) * (m - g);
        bvar = static_cast<double>(half) * bvar / static_cast<double>(sm.size() - 1);
        const double dh = static_cast<double>(half);
        const double vp = (dh - 1.0) / dh * w + bvar / dh;
        diag.split_rhat =
            w > 0.0 ? std::sqrt(vp / w) : std::numeric_limits<double>::infinity();
    }

    // ESS by Geyer's initial positive sequence over the chain-averaged
    // autocorrelation: sum pairs (rho_{2m} + rho_{2m+1}) while positive,
    // tau = -1 + 2 * sum, ESS = total / tau.
    const auto rho_at = [&](std::size_t lag) {
        if (lag == 0) return 1.0;
        if (lag >= len) return 0.0;
        double acov = 0.0;
        for (std::size_t c = 0; c < n_chains; ++c) {
            const std::vector<double>& tr = chain_traces[c];
            double s = 0.0;
            for (std::size_t i = 0; i + lag < len; ++i)
                s += (tr[i] - means[c]) * (tr[i + lag] - means[c]);
            acov += s / dn;
        }
        acov /= static_cast<double>(n_chains);
        return 1.0 - (within - acov) / var_plus;
    };

    const double total = static_cast<double>(n_chains) * dn;
    double pair_sum = 0.0;
    for (std::size_t m = 0; 2 * m + 1 < len; ++m) {
        const double pair = rho_at(2 * m) + rho_at(2 * m + 1);
        if (pair <= 0.0) break;
        pair_sum += pair;
    }
    const double tau = std::max(-1.0 + 2.0 * pair_sum, 1e-12);
    diag.effective_sample_size = total / tau;
    return diag;
}

}  // namespace permlc
