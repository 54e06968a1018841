// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/cli.hpp"

#include <ostream>

#include "CLI11.hpp"
#include "jumplab/error.hpp"
#include "jumplab/pipeline.hpp"

namespace jumplab {

int run_cli(int argc, const char* const* argv, std::ostream& log)
{
    CLI::App app{"Simulate and validate jump processes with state-dependent Levy kernels", "jumplab"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    RunOptions opts;
    opts.log = &log;
    std::string config;
    std::uint64_t seed = 0;

    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config, "experiment config file")->required();
        sub->add_flag("--force", opts.force, "continue when validation fails");
        sub->add_option("--jobs,-j", opts.jobs, "worker threads (results do not depend on it)")
            ->check(CLI::Range(1u, 1024u));
        sub->add_option("--out", opts.out_root, "output root directory");
        sub->add_option("--seed-override", seed, "replace the base seed of [sim]");
        return sub;
    };
    auto* validate = add("validate", "run the kernel validators");
    auto* simulate = add("simulate", "validate, then simulate the path ensemble");
    auto* analyze = add("analyze", "validate, then run the configured analyses");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, log, log);
        return rc == 0 ? kExitOk : kExitUsage;
    }
    for (auto* sub : {validate, simulate, analyze})
        if (sub->parsed() && sub->count("--seed-override")) opts.seed_override = seed;

    try {
        if (validate->parsed()) return cmd_validate(config, opts);
        if (simulate->parsed()) return cmd_simulate(config, opts);
        return cmd_analyze(config, opts);
    } catch (const ConfigError& e) {
        log << "error: " << config << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return kExitFail;
    }
}

}  // namespace jumplab
