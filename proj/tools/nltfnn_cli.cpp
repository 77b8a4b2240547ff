#include "ingest.hpp"

#include <nltfnn/nltfnn.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace {

using namespace nltfnn;

std::ofstream open_out(const std::string &path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    return os;
}

std::ifstream open_in(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    return is;
}

Tensor3 load_tensor(const std::string &path) {
    auto is = open_in(path);
    try {
        return read_tensor(is);
    } catch (const std::exception &e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

ObservationMask load_mask(const std::string &path) {
    auto is = open_in(path);
    try {
        return read_mask(is);
    } catch (const std::exception &e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_tensor(const std::string &path, const Tensor3 &x) {
    auto os = open_out(path, true);
    write_tensor(os, x);
    if (!os)
        throw std::runtime_error("failed writing " + path);
}

Dims to_dims(const std::vector<Index> &v) {
    for (Index n : v)
        if (n < 1)
            throw std::invalid_argument("dims must be positive");
    return {v[0], v[1], v[2]};
}

struct CompleteArgs {
    std::string observed, mask, out, trace;
    std::string method = "nltfnn";
    std::string surrogate, transform, spectral;
    double tau = 0, mu0 = 0, mumax = 0, rho = 0, eps = 0;
    std::vector<double> a;
    int max_iter       = 0;
    bool keep_observed = false;
    bool quiet         = false;
};

template <typename E>
E pick(const std::map<std::string, E> &table, const std::string &value, const char *flag) {
    auto it = table.find(value);
    if (it == table.end())
        throw std::invalid_argument(std::string("invalid value for ") + flag + ": " + value);
    return it->second;
}

int run_complete(const CompleteArgs &args, const CLI::App &cmd) {
    const Tensor3 observed     = load_tensor(args.observed);
    const ObservationMask mask = load_mask(args.mask);
    if (observed.dims() != mask.dims())
        throw std::invalid_argument("observed tensor and mask have different dims");

    SolverConfig cfg = preset(parse_method(args.method));
    // explicit flags override the preset
    if (cmd.count("--tau"))
        cfg.tau = args.tau;
    if (cmd.count("--a")) {
        const double sum = std::accumulate(args.a.begin(), args.a.end(), 0.0);
        if (!(sum > 0))
            throw std::invalid_argument("--a weights must have a positive sum");
        for (int i = 0; i < 3; ++i)
            cfg.a[i] = args.a[i] / sum;
    }
    if (cmd.count("--mu0"))
        cfg.mu0 = args.mu0;
    if (cmd.count("--mumax"))
        cfg.mu_max = args.mumax;
    if (cmd.count("--rho"))
        cfg.rho = args.rho;
    if (cmd.count("--eps"))
        cfg.eps = args.eps;
    if (cmd.count("--max-iter"))
        cfg.max_iter = args.max_iter;
    if (cmd.count("--surrogate"))
        cfg.surrogate = pick<Surrogate>({{"nuclear", Surrogate::nuclear}, {"logdet", Surrogate::logdet}},
                                        args.surrogate, "--surrogate");
    if (cmd.count("--transform"))
        cfg.transform_mode = pick<TransformMode>({{"learned", TransformMode::learned},
                                                  {"identity", TransformMode::identity},
                                                  {"dft", TransformMode::dft},
                                                  {"dct", TransformMode::dct}},
                                                 args.transform, "--transform");
    if (cmd.count("--spectral"))
        cfg.spectral = pick<SpectralMode>(
            {{"none", SpectralMode::none}, {"dft", SpectralMode::dft}, {"dct", SpectralMode::dct}}, args.spectral,
            "--spectral");
    cfg.validate();

    const Tensor3 b = project_mask(observed, mask, Keep::on_mask);
    auto progress   = [&](const ConvergenceRecord &r) {
        if (!args.quiet && (r.iter % 50 == 0 || r.iter == 1))
            std::cerr << "iter " << r.iter << "  mu " << r.mu << "  delta_inf " << r.delta_inf << "  objective "
                      << r.objective << '\n';
    };
    SolveResult result = solve(b, mask, cfg, std::nullopt, progress);

    Tensor3 recon = result.Z;
    if (args.keep_observed)
        recon = project_mask(recon, mask, Keep::off_mask) + b;
    save_tensor(args.out, recon);
    if (!args.trace.empty()) {
        auto os = open_out(args.trace, false);
        write_trace_csv(os, result.trace);
    }
    std::cout << "method " << args.method << ": " << result.trace.size() << " iterations, "
              << (result.converged ? "converged" : "stopped at max-iter") << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Low-rank tensor completion with learnable transforms, log-det fibered-rank surrogate and TV"};
    app.require_subcommand(1);

    // synth
    std::vector<Index> dims, ranks;
    std::uint64_t seed = 0;
    std::string out;
    auto *synth = app.add_subcommand("synth", "Generate a synthetic low-fibered-rank tensor in [0,1]");
    synth->add_option("--dims", dims, "N1 N2 N3")->expected(3)->required();
    synth->add_option("--ranks", ranks, "R1 R2 R3")->expected(3)->required();
    synth->add_option("--seed", seed, "RNG seed")->required();
    synth->add_option("--out", out, "Output tensor file")->required();

    // mask
    double sr = 0;
    auto *mask = app.add_subcommand("mask", "Sample an observation mask");
    mask->add_option("--dims", dims, "N1 N2 N3")->expected(3)->required();
    mask->add_option("--sr", sr, "Sampling rate in (0,1]")->required();
    mask->add_option("--seed", seed, "RNG seed")->required();
    mask->add_option("--out", out, "Output mask file")->required();

    // complete
    CompleteArgs cargs;
    auto *complete = app.add_subcommand("complete", "Complete a partially observed tensor");
    complete->add_option("--observed", cargs.observed, "Tensor file; entries off the mask are ignored")->required();
    complete->add_option("--mask", cargs.mask, "Mask file")->required();
    complete->add_option("--method", cargs.method, "nltfnn|ltfnn|tnn|tnndct|3dtnn|3dlogtnn")
        ->check(CLI::IsMember({"nltfnn", "ltfnn", "tnn", "tnndct", "3dtnn", "3dlogtnn"}));
    complete->add_option("--tau", cargs.tau, "TV weight (default 1e-5; 0 for the TNN presets)");
    complete->add_option("--a", cargs.a, "Mode weights A1 A2 A3, normalized to sum 1")->expected(3);
    complete->add_option("--mu0", cargs.mu0, "Initial penalty (default 1e-4)");
    complete->add_option("--mumax", cargs.mumax, "Maximum penalty (default 10)");
    complete->add_option("--rho", cargs.rho, "Penalty growth factor (default 1.1)");
    complete->add_option("--eps", cargs.eps, "Stopping tolerance on max-abs change of Z (default 1e-8)");
    complete->add_option("--max-iter", cargs.max_iter, "Iteration cap (default 500)");
    complete->add_option("--surrogate", cargs.surrogate, "Override: nuclear|logdet");
    complete->add_option("--transform", cargs.transform, "Override: learned|identity|dft|dct");
    complete->add_option("--spectral", cargs.spectral, "Override: none|dft|dct");
    complete->add_flag("--keep-observed", cargs.keep_observed, "Overwrite observed entries of the output with B");
    complete->add_flag("--quiet", cargs.quiet, "No progress on stderr");
    complete->add_option("--out", cargs.out, "Output tensor file")->required();
    complete->add_option("--trace", cargs.trace, "Convergence trace CSV");

    // eval
    std::string truth, recon, report, per_slice;
    auto *eval = app.add_subcommand("eval", "PSNR/SSIM/RSE of a reconstruction");
    eval->add_option("--truth", truth, "Ground-truth tensor file")->required();
    eval->add_option("--recon", recon, "Reconstructed tensor file")->required();
    eval->add_option("--report", report, "Output JSON report")->required();
    eval->add_option("--per-slice", per_slice, "Optional per-slice CSV");

    // ingest
    std::string dir;
    auto *ingest = app.add_subcommand("ingest", "Stack a directory of grayscale images into a tensor");
    ingest->add_option("--dir", dir, "Image directory")->required();
    ingest->add_option("--out", out, "Output tensor file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            save_tensor(out, synth_lowrank(to_dims(dims), {ranks[0], ranks[1], ranks[2]}, seed));
        } else if (*mask) {
            const ObservationMask m = sample_mask(to_dims(dims), sr, seed);
            auto os                 = open_out(out, true);
            write_mask(os, m);
        } else if (*complete) {
            return run_complete(cargs, *complete);
        } else if (*eval) {
            const Tensor3 t = load_tensor(truth), r = load_tensor(recon);
            const MetricReport rep = evaluate(t, r, !per_slice.empty());
            auto os                = open_out(report, false);
            os << report_to_json(rep).dump(2) << '\n';
            if (!per_slice.empty()) {
                auto cs = open_out(per_slice, false);
                write_per_slice_csv(cs, *rep.per_slice);
            }
            std::cout << "psnr " << rep.psnr << "  ssim " << rep.ssim << "  rse " << rep.rse << '\n';
        } else if (*ingest) {
            save_tensor(out, ingest_slices(dir));
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
