// Command-line front end: add synthetic noise, denoise, score image pairs,
// and run benchmark sweeps that land in a CSV report.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sureshrink/bss.hpp"
#include "sureshrink/image.hpp"
#include "sureshrink/metrics.hpp"
#include "sureshrink/nlm.hpp"
#include "sureshrink/noise.hpp"
#include "sureshrink/threading.hpp"

using namespace sureshrink;

namespace {

std::string basename_of(const std::string& path) {
    const size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

// CSV-friendly number: fixed six decimals, "inf" for unbounded PSNR.
std::string csv_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void require_odd_window(int value, const char* name) {
    if (value < 1 || value % 2 == 0)
        throw std::runtime_error(std::string(name) + " must be a positive odd window size");
}

double auto_bandwidth(int patch_side, double sigma) {
    return patch_side * patch_side * sigma * sigma / 2.0;
}

CpwMode parse_cpw(const std::string& m) {
    if (m == "zero") return CpwMode::Zero;
    if (m == "std") return CpwMode::Std;
    if (m == "max") return CpwMode::Max;
    throw std::runtime_error("unknown method '" + m + "' (expected zero|std|max|bss)");
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        const size_t comma = s.find(',', start);
        const std::string tok = s.substr(start, comma == std::string::npos
                                                    ? std::string::npos
                                                    : comma - start);
        if (!tok.empty()) out.push_back(tok);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_positive_double(const std::string& s, const char* what) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("could not parse ") + what + " '" + s + "'");
    }
    if (used != s.size() || !(v > 0.0) || !std::isfinite(v))
        throw std::runtime_error(std::string(what) + " must be a positive number, got '" + s + "'");
    return v;
}

void write_text_map(const std::string& path, const GrayImage& shape,
                    const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << shape.width << " " << shape.height << "\n";
    char buf[64];
    for (int r = 0; r < shape.height; ++r) {
        for (int c = 0; c < shape.width; ++c) {
            std::snprintf(buf, sizeof(buf), "%.9g", values[static_cast<size_t>(r) * shape.width + c]);
            out << buf << (c + 1 == shape.width ? "" : " ");
        }
        out << "\n";
    }
}

// Difference image centered at mid-gray so positive and negative residuals
// both stay visible after the PGM clamp.
void write_diff_pgm(const std::string& path, const GrayImage& a, const GrayImage& b) {
    if (!a.same_size(b)) throw std::runtime_error("difference images must match in size");
    GrayImage diff = a;
    for (size_t i = 0; i < diff.data.size(); ++i)
        diff.data[i] = a.data[i] - b.data[i] + 128.0;
    save_pgm(diff, path);
}

// ---------------------------------------------------------------- add-noise

struct AddNoiseArgs {
    std::string input, output;
    double sigma = 0.0;
    uint64_t seed = 0;
};

int run_add_noise(const AddNoiseArgs& a) {
    const GrayImage clean = load_pgm(a.input);
    const GrayImage noisy = add_gaussian(clean, {a.sigma, a.seed});
    save_pgm(noisy, a.output);
    std::printf("add-noise: %s -> %s sigma=%.6f seed=%llu\n", a.input.c_str(),
                a.output.c_str(), a.sigma, static_cast<unsigned long long>(a.seed));
    return 0;
}

// ------------------------------------------------------------------ denoise

struct DenoiseArgs {
    std::string input, output;
    double sigma = -1.0;
    bool sigma_given = false;
    int patch = 3;
    int search = 15;
    std::string method = "bss";
    std::string h_spec = "auto";
    double h_frac = 0.0;
    bool h_frac_given = false;
    double tol = 1e-4;
    std::string reference;
    std::string dump_psure, dump_diff, dump_bss_diag;
};

int run_denoise(const DenoiseArgs& a) {
    require_odd_window(a.patch, "--patch");
    require_odd_window(a.search, "--search");
    const GrayImage noisy = load_pgm(a.input);

    double sigma = a.sigma;
    if (!a.sigma_given) {
        sigma = estimate_sigma(noisy);
        std::fprintf(stderr, "note: --sigma not given, estimated sigma=%.4f from the input\n",
                     sigma);
    }
    if (!(sigma >= 0.0)) throw std::runtime_error("--sigma must be non-negative");

    const double h_auto = auto_bandwidth(a.patch, sigma);
    double h = 0.0;
    if (a.h_frac_given) {
        if (!(a.h_frac > 0.0)) throw std::runtime_error("--h-frac must be positive");
        h = a.h_frac * h_auto;
    } else if (a.h_spec == "auto") {
        h = h_auto;
    } else {
        h = parse_positive_double(a.h_spec, "--h");
    }
    if (!(h > 0.0))
        throw std::runtime_error("bandwidth came out non-positive; give --h or --sigma explicitly");

    NlmParams params;
    params.patch_radius = (a.patch - 1) / 2;
    params.search_radius = (a.search - 1) / 2;
    params.bandwidth_h = h;

    const bool is_bss = (a.method == "bss");
    params.cpw_mode = is_bss ? CpwMode::Std : parse_cpw(a.method);
    const bool has_risk = (params.cpw_mode == CpwMode::Std);
    if (!a.dump_psure.empty() && !has_risk)
        throw std::runtime_error("--dump-psure needs method std or bss");
    if (!a.dump_bss_diag.empty() && !is_bss)
        throw std::runtime_error("--dump-bss-diag needs method bss");

    NlmTimings timings;
    const NlmOutput nlm = nlm_denoise(noisy, params, sigma, &timings);

    GrayImage result;
    int rounds = 0;
    std::vector<BssDiagRow> diag;
    if (is_bss) {
        BssResult res = bss_shrink(noisy, nlm, sigma, a.tol, 7, !a.dump_bss_diag.empty());
        rounds = res.rounds;
        diag = std::move(res.diagnostics);
        result = std::move(res.x);
    } else {
        result = nlm.x_hat;
    }
    save_pgm(result, a.output);

    if (!a.dump_psure.empty()) write_text_map(a.dump_psure, noisy, nlm.psure_map);
    if (!a.dump_diff.empty()) {
        const GrayImage ref = a.reference.empty() ? noisy : load_pgm(a.reference);
        write_diff_pgm(a.dump_diff, result, ref);
    }
    if (!a.dump_bss_diag.empty()) {
        std::ofstream out(a.dump_bss_diag);
        if (!out) throw std::runtime_error("cannot open '" + a.dump_bss_diag + "' for writing");
        out << "round,block_size,mean_bsure,mean_pstar,delta\n";
        char buf[160];
        for (const BssDiagRow& row : diag) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g\n", row.round,
                          row.block_size, row.mean_bsure, row.mean_pstar, row.delta);
            out << buf;
        }
    }

    if (has_risk)
        std::printf("denoise: %s -> %s method=%s h=%.6f sigma=%.6f sure=%.6f rounds=%d\n",
                    a.input.c_str(), a.output.c_str(), a.method.c_str(), h, sigma, nlm.sure,
                    rounds);
    else
        std::printf("denoise: %s -> %s method=%s h=%.6f sigma=%.6f\n", a.input.c_str(),
                    a.output.c_str(), a.method.c_str(), h, sigma);
    return 0;
}

// ------------------------------------------------------------------ metrics

struct MetricsArgs {
    std::string reference, test, report;
};

int run_metrics(const MetricsArgs& a) {
    const GrayImage ref = load_pgm(a.reference);
    const GrayImage test = load_pgm(a.test);
    const QualityReport q = quality_report(ref, test);
    const std::string row = basename_of(a.reference) + "," + basename_of(a.test) + "," +
                            csv_double(q.mse) + "," + csv_double(q.psnr) + "," +
                            csv_double(q.ssim);
    const std::string csv = "reference,test,mse,psnr_db,ssim\n" + row + "\n";
    std::fputs(csv.c_str(), stdout);
    if (!a.report.empty()) {
        std::ofstream out(a.report);
        if (!out) throw std::runtime_error("cannot open '" + a.report + "' for writing");
        out << csv;
    }
    return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    std::string input, report;
    double sigma = 20.0;
    uint64_t seed = 0;
    int patch = 3;
    int search = 15;
    std::string methods = "std,bss";
    std::string h_spec = "auto";
    double h_frac = 0.0;
    bool h_frac_given = false;
    std::string h_sweep;
    double tol = 1e-4;
};

struct BenchRow {
    double h_abs = 0.0, h_frac = 0.0;
    std::string method;
    double psnr = 0.0, ssim = 0.0;
    double nlm_s = 0.0, sure_s = 0.0, bss_round_s = 0.0;
    int bss_rounds = 0;
};

std::vector<double> sweep_fractions(const std::string& spec) {
    // lo:step:hi, all in fractions of the auto bandwidth.
    const size_t p1 = spec.find(':');
    const size_t p2 = p1 == std::string::npos ? std::string::npos : spec.find(':', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw std::runtime_error("--h-sweep expects lo:step:hi");
    const double lo = parse_positive_double(spec.substr(0, p1), "--h-sweep lo");
    const double step = parse_positive_double(spec.substr(p1 + 1, p2 - p1 - 1), "--h-sweep step");
    const double hi = parse_positive_double(spec.substr(p2 + 1), "--h-sweep hi");
    if (hi < lo) throw std::runtime_error("--h-sweep needs hi >= lo");
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> fracs;
    for (int k = 0; k <= n; ++k) fracs.push_back(lo + k * step);
    return fracs;
}

int run_benchmark(const BenchmarkArgs& a) {
    require_odd_window(a.patch, "--patch");
    require_odd_window(a.search, "--search");
    if (!(a.sigma > 0.0)) throw std::runtime_error("--sigma must be positive");

    const std::vector<std::string> methods = split_csv_list(a.methods);
    if (methods.empty()) throw std::runtime_error("--methods is empty");
    for (const std::string& m : methods)
        if (m != "bss") (void)parse_cpw(m);  // validates the name

    const GrayImage clean = load_pgm(a.input);
    const GrayImage noisy = add_gaussian(clean, {a.sigma, a.seed});
    const double h_auto = auto_bandwidth(a.patch, a.sigma);

    std::vector<double> fracs;
    if (!a.h_sweep.empty()) {
        fracs = sweep_fractions(a.h_sweep);
    } else if (a.h_frac_given) {
        if (!(a.h_frac > 0.0)) throw std::runtime_error("--h-frac must be positive");
        fracs = {a.h_frac};
    } else if (a.h_spec == "auto") {
        fracs = {1.0};
    } else {
        fracs = {parse_positive_double(a.h_spec, "--h") / h_auto};
    }

    std::vector<BenchRow> rows;
    for (const double frac : fracs) {
        const double h = frac * h_auto;
        for (const std::string& m : methods) {
            BenchRow row;
            row.h_abs = h;
            row.h_frac = frac;
            row.method = m;

            NlmParams params;
            params.patch_radius = (a.patch - 1) / 2;
            params.search_radius = (a.search - 1) / 2;
            params.bandwidth_h = h;
            params.cpw_mode = (m == "bss") ? CpwMode::Std : parse_cpw(m);

            NlmTimings timings;
            const NlmOutput nlm = nlm_denoise(noisy, params, a.sigma, &timings);
            row.nlm_s = timings.nlm_seconds;
            row.sure_s = timings.sure_seconds;

            GrayImage out;
            if (m == "bss") {
                BssResult res = bss_shrink(noisy, nlm, a.sigma, a.tol, 7);
                row.bss_round_s = res.mean_round_seconds;
                row.bss_rounds = res.rounds;
                out = std::move(res.x);
            } else {
                out = nlm.x_hat;
            }
            row.psnr = psnr(clean, out);
            row.ssim = ssim(clean, out);
            rows.push_back(std::move(row));
        }
    }

    // One extra row per method repeating its best grid entry (highest PSNR,
    // ties going to the smaller bandwidth).
    std::vector<size_t> best_rows;
    for (const std::string& m : methods) {
        size_t best = rows.size();
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].method != m) continue;
            if (best == rows.size() || rows[i].psnr > rows[best].psnr) best = i;
        }
        best_rows.push_back(best);
    }

    std::ofstream out(a.report);
    if (!out) throw std::runtime_error("cannot open '" + a.report + "' for writing");
    out << "image,sigma,patch,search,h_abs,h_frac,method,seed,psnr_db,ssim,"
           "nlm_s,sure_s,bss_round_s,bss_rounds\n";
    const std::string name = basename_of(a.input);
    auto emit = [&](const BenchRow& r) {
        out << name << "," << csv_double(a.sigma) << "," << a.patch << "," << a.search << ","
            << csv_double(r.h_abs) << "," << csv_double(r.h_frac) << "," << r.method << ","
            << a.seed << "," << csv_double(r.psnr) << "," << csv_double(r.ssim) << ","
            << csv_double(r.nlm_s) << "," << csv_double(r.sure_s) << ","
            << csv_double(r.bss_round_s) << "," << r.bss_rounds << "\n";
    };
    for (const BenchRow& r : rows) emit(r);
    for (size_t idx : best_rows) emit(rows[idx]);

    for (size_t k = 0; k < methods.size(); ++k) {
        const BenchRow& b = rows[best_rows[k]];
        std::printf("benchmark: best %s psnr=%.4f ssim=%.4f at h=%.2f (frac %.2f)\n",
                    methods[k].c_str(), b.psnr, b.ssim, b.h_abs, b.h_frac);
    }
    std::printf("benchmark: wrote %s (%zu rows)\n", a.report.c_str(),
                rows.size() + best_rows.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap_from_env();

    CLI::App app{"Non-local means denoiser with SURE-driven blockwise shrinkage"};
    app.require_subcommand(1);
    // --h is a real option below, so help must not squat on -h.
    app.set_help_flag("--help", "print help and exit");

    AddNoiseArgs an;
    CLI::App* c_noise = app.add_subcommand("add-noise", "Add white Gaussian noise to a PGM");
    c_noise->set_help_flag("--help", "print help and exit");
    c_noise->add_option("--input", an.input, "clean input PGM")->required();
    c_noise->add_option("--output", an.output, "noisy output PGM")->required();
    c_noise->add_option("--sigma", an.sigma, "noise standard deviation")->required();
    c_noise->add_option("--seed", an.seed, "RNG seed (default 0)");

    DenoiseArgs dn;
    CLI::App* c_den = app.add_subcommand("denoise", "Denoise a PGM image");
    c_den->set_help_flag("--help", "print help and exit");
    c_den->add_option("--input", dn.input, "noisy input PGM")->required();
    c_den->add_option("--output", dn.output, "denoised output PGM")->required();
    CLI::Option* o_sigma = c_den->add_option("--sigma", dn.sigma, "noise level (estimated if omitted)");
    c_den->add_option("--patch", dn.patch, "odd patch side (default 3)");
    c_den->add_option("--search", dn.search, "odd search window side (default 15)");
    c_den->add_option("--method", dn.method, "zero|std|max|bss (default bss)");
    CLI::Option* o_h = c_den->add_option("--h", dn.h_spec,
                                         "bandwidth, or 'auto' for patch^2*sigma^2/2");
    CLI::Option* o_hf = c_den->add_option("--h-frac", dn.h_frac, "bandwidth as fraction of auto");
    o_h->excludes(o_hf);
    c_den->add_option("--tol", dn.tol, "shrinkage stopping tolerance (default 1e-4)");
    c_den->add_option("--reference", dn.reference, "reference for --dump-diff");
    c_den->add_option("--dump-psure", dn.dump_psure, "write per-pixel risk map as text");
    c_den->add_option("--dump-diff", dn.dump_diff,
                      "write mid-gray-centered difference vs the input (or --reference)");
    c_den->add_option("--dump-bss-diag", dn.dump_bss_diag, "write per-round shrinkage diagnostics CSV");

    MetricsArgs mt;
    CLI::App* c_met = app.add_subcommand("metrics", "Score a test image against a reference");
    c_met->set_help_flag("--help", "print help and exit");
    c_met->add_option("--reference", mt.reference, "reference PGM")->required();
    c_met->add_option("--test", mt.test, "test PGM")->required();
    c_met->add_option("--report", mt.report, "also write the CSV here");

    BenchmarkArgs bm;
    CLI::App* c_ben = app.add_subcommand("benchmark", "Noise, denoise and score in one pass");
    c_ben->set_help_flag("--help", "print help and exit");
    c_ben->add_option("--input", bm.input, "clean input PGM")->required();
    c_ben->add_option("--report", bm.report, "CSV report path")->required();
    c_ben->add_option("--sigma", bm.sigma, "noise standard deviation (default 20)");
    c_ben->add_option("--seed", bm.seed, "RNG seed (default 0)");
    c_ben->add_option("--patch", bm.patch, "odd patch side (default 3)");
    c_ben->add_option("--search", bm.search, "odd search window side (default 15)");
    c_ben->add_option("--methods", bm.methods, "comma list of zero|std|max|bss (default std,bss)");
    CLI::Option* b_h = c_ben->add_option("--h", bm.h_spec, "bandwidth, or 'auto'");
    CLI::Option* b_hf = c_ben->add_option("--h-frac", bm.h_frac, "bandwidth as fraction of auto");
    CLI::Option* b_hs = c_ben->add_option("--h-sweep", bm.h_sweep, "fraction sweep lo:step:hi");
    b_h->excludes(b_hf);
    b_h->excludes(b_hs);
    b_hf->excludes(b_hs);
    c_ben->add_option("--tol", bm.tol, "shrinkage stopping tolerance (default 1e-4)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_noise->parsed()) return run_add_noise(an);
        if (c_den->parsed()) {
            dn.sigma_given = o_sigma->count() > 0;
            dn.h_frac_given = o_hf->count() > 0;
            return run_denoise(dn);
        }
        if (c_met->parsed()) return run_metrics(mt);
        if (c_ben->parsed()) {
            bm.h_frac_given = b_hf->count() > 0;
            return run_benchmark(bm);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
