// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here, in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "permlc/density.hpp"
#include "permlc/estimators.hpp"
#include "permlc/exact_permanent.hpp"
#include "permlc/hermitian_core.hpp"
#include "permlc/matrix_io.hpp"
#include "permlc/rng.hpp"

using namespace permlc;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double rel_err(double estimate, double truth) {
    return std::abs(estimate - truth) / std::max(1e-300, std::abs(truth));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// the shared instance set for criteria 1, 2, and 5b: 50 admissible matrices
// with n cycling through 1..12
std::vector<HermitianMatrix> instance_set() {
    std::vector<HermitianMatrix> out;
    out.reserve(50);
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 12);
        out.push_back(random_instance(n, 1.0, 2020 + static_cast<std::uint64_t>(i)));
    }
    return out;
}

// 1. annealed estimator vs Ryser: 5% relative error at 95% confidence under
//    default budgets, 50 instances, n in 1..12
void criterion_1(const std::vector<HermitianMatrix>& instances) {
    const auto start = std::chrono::steady_clock::now();
    int within = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const HermitianMatrix& a = instances[i];
        const double truth = permanent_ryser(a.matrix()).value.real();
        SamplerConfig cfg;
        cfg.seed = 9000 + i;
        const EstimateReport r = estimate_anneal(build_density(a), cfg);
        const double err = rel_err(r.estimate, truth);
        worst = std::max(worst, err);
        if (err <= 0.05) ++within;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // 95% confidence gate: at least 48 of 50 instances within 5%
    const bool pass = within >= 48 && seconds < 600.0;
    report(1, pass,
           "anneal vs Ryser, 50 instances n=1..12: " + std::to_string(within) +
               "/50 within 5% (worst rel err " + fmt(worst) + "), " + fmt(seconds) + " s");
}

// 2. direct estimator with N = 1e5 within 3 reported standard errors;
//    exactly 1 with zero variance for A = I
void criterion_2(const std::vector<HermitianMatrix>& instances) {
    int within = 0;
    double worst_sigma = 0.0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const HermitianMatrix& a = instances[i];
        const double truth = permanent_ryser(a.matrix()).value.real();
        SamplerConfig cfg;
        cfg.seed = 7000 + i;
        cfg.chains = 4;
        cfg.steps_per_phase = 25000;  // N = 1e5
        const EstimateReport r = estimate_direct(build_density(a), cfg);
        const double gap = std::abs(r.estimate - truth);
        const double sigmas = r.std_error > 0.0 ? gap / r.std_error : (gap == 0.0 ? 0.0 : 1e9);
        worst_sigma = std::max(worst_sigma, sigmas);
        if (sigmas <= 3.0) ++within;
    }

    SamplerConfig cfg;
    cfg.seed = 1;
    const EstimateReport eye = estimate_direct(build_density(HermitianMatrix::identity(4)), cfg);
    const bool eye_exact = eye.estimate == 1.0 && eye.std_error == 0.0;

    const bool pass = within == 50 && eye_exact;
    report(2, pass,
           "direct (N=1e5) vs Ryser: " + std::to_string(within) + "/50 within 3 sigma (worst " +
               fmt(worst_sigma) + " sigma); A=I exact: " + (eye_exact ? "yes" : "no"));
}

// 3. log-concavity: zero violations over 1e4 segment triples per matrix,
//    20 admissible matrices, n <= 10, tolerance 1e-9
void criterion_3() {
    int total_violations = 0;
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 10);
        const HermitianMatrix a = random_instance(n, 1.0, 3300 + static_cast<std::uint64_t>(i));
        total_violations +=
            check_logconcavity(build_density(a), 10000, 40 + static_cast<std::uint64_t>(i));
    }
    report(3, total_violations == 0,
           "log-concavity, 20 matrices x 1e4 triples: " + std::to_string(total_violations) +
               " violations");
}

// 4. Lemma suite: h = ln(1+q) - q midpoint-concave for 10 PSD forms
//    including rank-deficient and zero forms, 1e4 segments each
void criterion_4() {
    std::vector<QuadraticForm> forms;
    forms.push_back(QuadraticForm::zero(3));
    forms.push_back(QuadraticForm::identity(4));
    QuadraticForm rank_one = QuadraticForm::zero(5);
    rank_one.coeffs[0] = 2.0;
    forms.push_back(rank_one);

    Rng rng(4400);
    while (forms.size() < 10) {
        const std::size_t m = 2 + forms.size() % 5;
        const std::size_t rank = 1 + forms.size() % m;  // keep some rank-deficient
        QuadraticForm q = QuadraticForm::zero(m);
        std::vector<double> g(rank * m);
        for (double& v : g) v = rng.normal();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < rank; ++k) s += g[k * m + i] * g[k * m + j];
                q.coeffs[i * m + j] = s;
            }
        forms.push_back(std::move(q));
    }

    int total_violations = 0;
    for (std::size_t i = 0; i < forms.size(); ++i)
        total_violations += check_lemma_concavity(forms[i], 10000, 50 + i);
    report(4, total_violations == 0,
           "lemma concavity, 10 PSD forms x 1e4 segments: " + std::to_string(total_violations) +
               " violations");
}

// 5a. subset expansion equals per(I+B) within 1e-10 relative, 100 PSD B, n <= 10
// 5b. min eigenvalue of I - C is >= -1e-9 for every admissible instance
void criterion_5(const std::vector<HermitianMatrix>& instances) {
    double worst_rel = 0.0;
    Rng rng(5500);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 10);
        std::vector<double> spectrum(n);
        for (double& lambda : spectrum) lambda = rng.uniform();
        const HermitianMatrix b = random_with_spectrum(spectrum, rng.next_u64());
        const double lhs = subset_expansion(b).value.real();
        ComplexMatrix a = b.matrix();
        for (std::size_t j = 0; j < n; ++j) a(j, j) += 1.0;
        const double rhs = permanent_ryser(a).value.real();
        worst_rel = std::max(worst_rel, rel_err(lhs, rhs));
    }

    double min_eigenvalue = 1.0;
    for (const HermitianMatrix& a : instances)
        min_eigenvalue = std::min(min_eigenvalue, check_q_psd(build_density(a)));

    const bool pass = worst_rel <= 1e-10 && min_eigenvalue >= -1e-9;
    report(5, pass,
           "subset expansion vs per(I+B), 100 PSD B: worst rel " + fmt(worst_rel) +
               "; min eig(I-C) over instance set " + fmt(min_eigenvalue));
}

// 6. Wick formula: Monte Carlo per B within 3 standard errors of Ryser,
//    20 PSD B, n <= 8, N = 1e5
void criterion_6() {
    int within = 0;
    double worst_sigma = 0.0;
    Rng rng(6600);
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 8);
        std::vector<double> spectrum(n);
        for (double& lambda : spectrum) lambda = rng.uniform();
        const HermitianMatrix b = random_with_spectrum(spectrum, rng.next_u64());
        SamplerConfig cfg;
        cfg.seed = 600 + static_cast<std::uint64_t>(i);
        cfg.chains = 4;
        cfg.steps_per_phase = 25000;
        const EstimateReport r = wick_check(b, cfg);
        const double truth = permanent_ryser(b.matrix()).value.real();
        const double gap = std::abs(r.estimate - truth);
        const double sigmas = r.std_error > 0.0 ? gap / r.std_error : (gap == 0.0 ? 0.0 : 1e9);
        worst_sigma = std::max(worst_sigma, sigmas);
        if (sigmas <= 3.0) ++within;
    }
    report(6, within == 20,
           "Wick formula (N=1e5), 20 PSD B n<=8: " + std::to_string(within) +
               "/20 within 3 sigma (worst " + fmt(worst_sigma) + ")");
}

// 7. gradient vs central finite differences, max abs deviation <= 1e-6,
//    100 random points, n <= 8
void criterion_7() {
    Rng rng(7700);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 8);
        const DensityModel d = build_density(random_instance(n, 1.0, rng.next_u64()));
        PointC z = PointC::zero(n);
        for (std::size_t k = 0; k < n; ++k) z.z[k] = Complex{rng.normal(), rng.normal()};
        const auto g = grad_log_density(d, z);
        auto xy = z.to_real();
        for (std::size_t c = 0; c < xy.size(); ++c) {
            const double saved = xy[c];
            xy[c] = saved + 1e-5;
            const double up = log_density(d, PointC::from_real(xy));
            xy[c] = saved - 1e-5;
            const double down = log_density(d, PointC::from_real(xy));
            xy[c] = saved;
            worst = std::max(worst, std::abs(g[c] - (up - down) / 2e-5));
        }
    }
    report(7, worst <= 1e-6,
           "gradient vs finite differences, 100 points n<=8: max abs deviation " + fmt(worst));
}

// 8. permanent oracles agree within 1e-10 relative on 500 random complex
//    matrices n <= 7; per(ones) = n! for n <= 8
void criterion_8() {
    Rng rng(8800);
    double worst_rel = 0.0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 7);
        ComplexMatrix m(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) m(r, c) = Complex{rng.normal(), rng.normal()};
        const Complex a = permanent_ryser(m).value;
        const Complex b = permanent_definition(m).value;
        const double scale = std::max({1.0, std::abs(a), std::abs(b)});
        worst_rel = std::max(worst_rel, std::abs(a - b) / scale);
    }

    double worst_fact = 0.0;
    double factorial = 1.0;
    for (std::size_t n = 1; n <= 8; ++n) {
        factorial *= static_cast<double>(n);
        ComplexMatrix ones(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) ones(r, c) = 1.0;
        worst_fact = std::max(worst_fact, rel_err(permanent_ryser(ones).value.real(), factorial));
    }

    const bool pass = worst_rel <= 1e-10 && worst_fact <= 1e-10;
    report(8, pass,
           "oracle cross-check, 500 matrices n<=7: worst rel " + fmt(worst_rel) +
               "; per(ones)=n! worst rel " + fmt(worst_fact));
}

// 9. CLI determinism: repeated invocations with identical flags and seed
//    produce byte-identical primary output
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PERMLC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_9() {
    bool pass = true;
    std::string detail;

    pass &= run_cli("gen --n 4 --spread 1 --seed 3 --out acc9_gen_a.json") == 0;
    pass &= run_cli("gen --n 4 --spread 1 --seed 3 --out acc9_gen_b.json") == 0;
    const bool gen_same = slurp("acc9_gen_a.json") == slurp("acc9_gen_b.json");

    pass &= run_cli("estimate --input acc9_gen_a.json --method anneal --seed 5 --steps 800 "
                    "--out acc9_est_a.json") == 0;
    pass &= run_cli("estimate --input acc9_gen_a.json --method anneal --seed 5 --steps 800 "
                    "--out acc9_est_b.json") == 0;
    const bool est_same = slurp("acc9_est_a.json") == slurp("acc9_est_b.json");

    pass &= run_cli("exact --input acc9_gen_a.json --out acc9_ex_a.json") == 0;
    pass &= run_cli("exact --input acc9_gen_a.json --out acc9_ex_b.json") == 0;
    const bool exact_same = slurp("acc9_ex_a.json") == slurp("acc9_ex_b.json");

    pass &= run_cli("bench --n-list 2,3 --trials 1 --seed 7 --budget 500 --out acc9_csv_a.csv") ==
            0;
    pass &= run_cli("bench --n-list 2,3 --trials 1 --seed 7 --budget 500 --out acc9_csv_b.csv") ==
            0;
    const bool bench_same = slurp("acc9_csv_a.csv") == slurp("acc9_csv_b.csv");

    pass &= run_cli("verify --random 4 1 17 --trials 2000 --out acc9_ver_a.json") == 0;
    pass &= run_cli("verify --random 4 1 17 --trials 2000 --out acc9_ver_b.json") == 0;
    const bool verify_same = slurp("acc9_ver_a.json") == slurp("acc9_ver_b.json");

    for (const char* f :
         {"acc9_gen_a.json", "acc9_gen_b.json", "acc9_est_a.json", "acc9_est_b.json",
          "acc9_ex_a.json", "acc9_ex_b.json", "acc9_csv_a.csv", "acc9_csv_b.csv",
          "acc9_ver_a.json", "acc9_ver_b.json"})
        std::remove(f);

    pass = pass && gen_same && est_same && exact_same && bench_same && verify_same;
    detail = std::string("CLI byte determinism: gen ") + (gen_same ? "ok" : "DIFF") +
             ", estimate " + (est_same ? "ok" : "DIFF") + ", exact " + (exact_same ? "ok" : "DIFF") +
             ", bench " + (bench_same ? "ok" : "DIFF") + ", verify " +
             (verify_same ? "ok" : "DIFF");
    report(9, pass, detail);
}

// 10. n = 1 analytic case: for A = [a], a in {1, 1.5, 2}, both estimators
//     converge to a within 3 standard errors at N = 1e5
void criterion_10() {
    bool pass = true;
    std::string detail = "n=1 analytic:";
    for (double a : {1.0, 1.5, 2.0}) {
        ComplexMatrix m(1);
        m(0, 0) = a;
        const DensityModel d = build_density(HermitianMatrix::from_matrix(std::move(m)));
        SamplerConfig cfg;
        cfg.seed = 10 + static_cast<std::uint64_t>(a * 2);
        cfg.chains = 4;
        cfg.steps_per_phase = 25000;
        const EstimateReport direct = estimate_direct(d, cfg);
        const EstimateReport anneal = estimate_anneal(d, cfg);
        const auto ok = [a](const EstimateReport& r) {
            if (r.std_error == 0.0) return r.estimate == a;
            return std::abs(r.estimate - a) <= 3.0 * r.std_error;
        };
        const bool here = ok(direct) && ok(anneal);
        pass = pass && here;
        detail += " a=" + fmt(a) + (here ? " ok" : " FAIL");
        detail += " (direct " + fmt(direct.estimate) + ", anneal " + fmt(anneal.estimate) + ")";
    }
    report(10, pass, detail);
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<HermitianMatrix> instances = instance_set();

    criterion_1(instances);
    criterion_2(instances);
    criterion_3();
    criterion_4();
    criterion_5(instances);
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, seconds);
    return g_failures == 0 ? 0 : 1;
}
