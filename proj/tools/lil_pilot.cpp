// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

// Calibrates the LIL band once. Runs the [analysis lil] section of a config
// with a pinned pilot seed and writes kappa_lo / kappa_hi as the 2.5% / 97.5%
// quantiles of the running max of |W_t|, scaled by sqrt(lambda), sqrt(Lambda).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "jumplab/config.hpp"
#include "jumplab/error.hpp"
#include "jumplab/estimators.hpp"
#include "jumplab/stats.hpp"

using namespace jumplab;

int main(int argc, char** argv)
{
    CLI::App app{"LIL band pilot calibration", "lil_pilot"};
    std::string config_path, out_path;
    std::uint64_t seed = 20260101;
    double lo_q = 0.025, hi_q = 0.975;
    app.add_option("config", config_path, "config with an [analysis lil] section")->required();
    app.add_option("--out,-o", out_path, "band file to write (default: stdout)");
    app.add_option("--seed", seed, "pilot seed (must differ from the analysis seed)");
    app.add_option("--lo-quantile", lo_q)->check(CLI::Range(0.0, 0.5));
    app.add_option("--hi-quantile", hi_q)->check(CLI::Range(0.5, 1.0));
    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = load_config(config_path);
        const AnalysisSpec* lil = nullptr;
        for (const auto& a : cfg.analyses)
            if (a.kind == "lil") lil = &a;
        if (!lil) throw ConfigError(0, "no [analysis lil] section");
        if (lil->seed && *lil->seed == seed) throw ConfigError(lil->line, "pilot seed equals the analysis seed");

        SimConfig sc = cfg.sim;
        sc.t_end = lil->t_end;
        sc.base_seed = seed;
        const double trunc = sc.small_jump_mode == SmallJumpMode::drop ? sc.epsilon : 0.0;
        const auto k = lil_constants(cfg.kernel, cfg.grid, trunc);
        LILOptions o;
        o.direction = lil->direction;
        o.checkpoints = dyadic_checkpoints(lil->t_end);
        o.band = {0.0, 0.0};
        o.lambda_hat = k.lambda_hat;
        o.Lambda_hat = k.Lambda_hat;
        o.keep_trajectories = false;
        const Simulator sim(cfg.kernel, sc, cfg.grid, cfg.x0);
        const auto rep = lil_statistics_streaming(sim, lil->n_paths, o, 1);

        const double qlo = quantile(rep.max_abs_w, lo_q), qhi = quantile(rep.max_abs_w, hi_q);
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "# pilot: %s, seed %llu, %zu paths, t_end %g, %zu checkpoints\n"
                      "# lambda_hat = %.17g, Lambda_hat = %.17g\n"
                      "# max|W| quantiles %g / %g: %.17g / %.17g\n"
                      "kappa_lo = %.6f\nkappa_hi = %.6f\n",
                      cfg.kernel_id.c_str(), static_cast<unsigned long long>(seed), rep.n_paths, lil->t_end,
                      rep.checkpoints.size(), k.lambda_hat, k.Lambda_hat, lo_q, hi_q, qlo, qhi,
                      std::floor(qlo / std::sqrt(k.lambda_hat) * 1e6) / 1e6,
                      std::ceil(qhi / std::sqrt(k.Lambda_hat) * 1e6) / 1e6);
        if (out_path.empty()) {
            std::cout << buf;
        } else {
            std::ofstream(out_path) << buf;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
