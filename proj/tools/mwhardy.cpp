// mwhardy <command> --config path.json [--out dir] [--seed n] [--threads k]
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mwhardy/error.hpp"
#include "mwhardy/harness.hpp"
#include "mwhardy/parallel.hpp"

namespace {

constexpr int kFail = 1;
constexpr int kSchema = 2;

unsigned env_threads() {
    const char* v = std::getenv("MWHARDY_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 0) {
        std::fprintf(stderr, "mwhardy: ignoring MWHARDY_THREADS=%s\n", v);
        return 0;
    }
    return static_cast<unsigned>(n);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-weighted Hardy space toolkit"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir = "mwhardy-out", kernel;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool acceptance = false;
    for (const char* name : {"characteristic", "reduce", "maximal", "czd", "atoms", "czo", "verify", "oracle"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "overrides the configuration seed");
        sub->add_option("--threads", threads, "worker threads (default MWHARDY_THREADS, then all cores)");
        if (std::string(name) == "czo")
            sub->add_option("--kernel", kernel, "hilbert, riesz2d or user-json")
                ->check(CLI::IsMember({"hilbert", "riesz2d", "user-json"}));
        if (std::string(name) == "verify") sub->add_flag("--acceptance", acceptance, "also run the acceptance suite");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kSchema;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    mwhardy::set_thread_count(threads ? *threads : env_threads());

    mwhardy::RunConfig config;
    nlohmann::json doc;
    try {
        std::ifstream in(config_path);
        if (!in) throw mwhardy::SchemaError("cannot read " + config_path);
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw mwhardy::SchemaError(std::string("malformed JSON: ") + e.what());
        }
        if (seed) {
            if (!doc.is_object()) throw mwhardy::SchemaError("config: expected an object");
            doc["seed"] = *seed;
        }
        if (!kernel.empty() && kernel != "user-json") doc["kernel"] = kernel;
        if (kernel == "user-json" && !(doc.contains("kernel") && doc["kernel"].is_object()))
            throw mwhardy::SchemaError("--kernel user-json needs a kernel template object in the configuration");
        if (acceptance) doc["acceptance"] = true;
        config = mwhardy::parse_config(doc, command);
    } catch (const mwhardy::SchemaError& e) {
        std::fprintf(stderr, "mwhardy: schema error: %s\n", e.what());
        return kSchema;
    }

    mwhardy::Report report;
    try {
        report = mwhardy::run(config);
    } catch (const mwhardy::SchemaError& e) {
        std::fprintf(stderr, "mwhardy: schema error: %s\n", e.what());
        return kSchema;
    } catch (const mwhardy::PreconditionError& e) {
        std::fprintf(stderr, "mwhardy: precondition: %s\n", e.what());
        return kSchema;
    } catch (const mwhardy::Error& e) {
        std::fprintf(stderr, "mwhardy: %s\n", e.what());
        return kFail;
    }
    report.config = doc;
    mwhardy::write_report(report, out_dir);

    for (const auto& a : report.assertions)
        std::printf("%s  %s%s%s\n", a.passed ? "pass" : "FAIL", a.name.c_str(), a.detail.empty() ? "" : "  ",
                    a.detail.c_str());
    std::printf("%s: %s, %zu tables in %s (%.1f s)\n", command.c_str(), report.passed() ? "all assertions pass" : "assertion failures",
                report.tables.size(), out_dir.c_str(), report.seconds);
    return report.passed() ? 0 : kFail;
}
