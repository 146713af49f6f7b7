#include <CLI11.hpp>

#include <cstdlib>

#include "pipelines.hpp"

using namespace wiener;
using wiener::io::json;

namespace {

enum Exit { kOk = 0, kSchema = 2, kCertificate = 3, kResource = 4 };

struct Invocation {
    std::string pipeline;
    json params = json::object();
    std::string out = "out";
    std::filesystem::path base;
};

// Numbers given on the command line keep their text so that "1/4" stays exact.
json arg(const std::string& s) { return json(s); }

int report_failures(const std::vector<std::string>& failed) {
    if (failed.empty()) return kOk;
    for (const auto& f : failed) std::cerr << "certificate failed: " << f << "\n";
    return kCertificate;
}

Invocation from_config(const std::string& file) {
    json cfg = io::read_json(file);
    io::check_version(cfg, "$");
    Invocation inv;
    const auto& name = io::field(cfg, "pipeline", "$");
    if (!name.is_string()) throw SchemaError("$.pipeline", "expected a string");
    inv.pipeline = name.get<std::string>();
    if (cfg.contains("params")) inv.params = cfg["params"];
    if (cfg.contains("out")) {
        if (!cfg["out"].is_string()) throw SchemaError("$.out", "expected a string");
        inv.out = cfg["out"].get<std::string>();
    }
    if (cfg.contains("seed")) {
        const auto s = io::parse_int(cfg["seed"], "$.seed");
        if (s < 0) throw SchemaError("$.seed", "seed must be nonnegative");
        setenv("MASTER_SEED", std::to_string(s).c_str(), 1);
    }
    inv.base = std::filesystem::path(file).parent_path();
    return inv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Workbench for the Wiener closure-of-translates counterexample ingredients"};
    app.require_subcommand(1);
    std::string out = "out";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    app.add_option("--out", out, "artifact directory");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides MASTER_SEED)");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads (overrides WORKER_THREADS)")->check(CLI::Range(1u, 256u));

    Invocation inv;
    std::map<std::string, std::string> s;  // raw option text
    auto opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help, bool required = true) {
        auto* o = sub->add_option(flag, s[key], help);
        if (required) o->required();
        return o;
    };
    std::string check, config;
    bool exact = false, theoretical = false, write_series = false;

    auto* phi = app.add_subcommand("construct-phi", "flat auxiliary polynomial phi");
    opt(phi, "--q", "q", "exponent q > 2");
    opt(phi, "--gamma", "gamma", "target A_q norm");

    auto* kah = app.add_subcommand("kahane", "Kahane interpolation measure with exact moments");
    opt(kah, "--a", "a", "left end (rational)");
    opt(kah, "--b", "b", "right end (rational, < 1/2)");
    opt(kah, "--delta", "delta", "moment tolerance");
    opt(kah, "--kmax", "kmax", "largest moment reported", false);

    auto* ber = app.add_subcommand("bernstein", "tail battery against the Bernstein-type bound");
    ber->add_option("--config", config, "battery config JSON")->required();

    auto* rie = app.add_subcommand("riesz", "moment identities or L^2 concentration for a Riesz product");
    opt(rie, "--spec", "spec", "spec JSON (phi, w, N, nu)");
    opt(rie, "--s", "s", "product parameter s");
    rie->add_option("--check", check, "moments | concentration")->required()->check(CLI::IsMember({"moments", "concentration"}));
    rie->add_flag("--exact", exact, "rational arithmetic for moments");
    rie->add_flag("--theoretical", theoretical, "theoretical constants for concentration");
    opt(rie, "--c1", "c1", "concentration threshold c1", false);

    auto* pri = app.add_subcommand("principal", "principal lemma pipeline");
    pri->add_option("--config", config, "principal config JSON");

    auto* hel = app.add_subcommand("helson", "staged Helson construction");
    opt(hel, "--q", "q", "exponent q > 2", false);
    opt(hel, "--stages", "stages", "number of stages J", false);
    opt(hel, "--N", "N", "atoms per stage", false);
    opt(hel, "--window", "window", "coefficient window", false);
    opt(hel, "--trials", "trials", "sampled measures for the Helson certificate", false);
    hel->add_flag("--write-series", write_series, "also write S_J (truncated) to S.json");

    auto* ext = app.add_subcommand("extension-probe", "small-norm extension of data on K");
    opt(ext, "--k", "k", "arc set JSON");
    opt(ext, "--p", "p", "exponent p > 1");
    opt(ext, "--eps", "eps", "weight of the A_p term");
    opt(ext, "--d", "d", "degree budget");
    opt(ext, "--arcs", "arcs", "number of widest arcs sampled", false);

    auto* prb = app.add_subcommand("probe-cyclicity", "multiplier-deficit profile");
    opt(prb, "--f", "f", "coefficient sequence JSON");
    opt(prb, "--p", "p", "exponent p in (1, 2]");
    opt(prb, "--dmax", "dmax", "largest degree");

    auto* wit = app.add_subcommand("witness", "smooth witness vanishing on K with obstruction ladder");
    opt(wit, "--k", "k", "arc set JSON");
    opt(wit, "--s", "s", "annihilating sequence JSON");
    opt(wit, "--p", "p", "exponent p in (1, 2]");
    opt(wit, "--s-outside", "s_outside", "max |S| off K (else taken from the artifact or sampled)", false);
    opt(wit, "--eps-smooth", "eps_smooth", "smoothness excess", false);

    auto* dem = app.add_subcommand("demo-corollary", "non-cyclic smooth f and cyclic g sharing a zero set");
    opt(dem, "--q", "q", "exponent q > 2", false);
    opt(dem, "--p", "p", "conjugate exponent (checked)", false);
    opt(dem, "--stages", "stages", "number of stages J", false);
    opt(dem, "--N", "N", "atoms per stage", false);
    opt(dem, "--window", "window", "coefficient window", false);

    auto* run = app.add_subcommand("run", "run a pipeline from a config file");
    run->add_option("config", config, "config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kSchema;
    }

    try {
        if (*seed_opt) setenv("MASTER_SEED", std::to_string(seed).c_str(), 1);
        if (*threads_opt) setenv("WORKER_THREADS", std::to_string(threads).c_str(), 1);
        auto put = [&](const std::string& key, bool integer = false) {
            auto it = s.find(key);
            if (it == s.end() || it->second.empty()) return;
            if (integer) {
                std::size_t pos = 0;
                long long v = 0;
                try {
                    v = std::stoll(it->second, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos != it->second.size()) throw SchemaError("--" + key, "expected an integer");
                inv.params[key] = v;
            } else {
                inv.params[key] = arg(it->second);
            }
        };
        inv.out = out;
        if (*phi) {
            inv.pipeline = "phi";
            put("q"), put("gamma");
        } else if (*kah) {
            inv.pipeline = "kahane";
            put("a"), put("b"), put("delta"), put("kmax", true);
        } else if (*ber) {
            inv.pipeline = "bernstein";
            inv.params = io::read_json(config);
            io::check_version(inv.params, "$");
            inv.base = std::filesystem::path(config).parent_path();
        } else if (*rie) {
            inv.pipeline = "riesz";
            put("spec"), put("s"), put("c1");
            inv.params["check"] = check;
            if (exact) inv.params["exact"] = true;
            if (theoretical) inv.params["theoretical"] = true;
        } else if (*pri) {
            inv.pipeline = "principal";
            if (config.empty()) throw SchemaError("--config", "missing config file");
            inv.params = io::read_json(config);
            io::check_version(inv.params, "$");
            inv.base = std::filesystem::path(config).parent_path();
        } else if (*hel) {
            inv.pipeline = "helson";
            put("q"), put("stages", true), put("N", true), put("window", true), put("trials", true);
            if (write_series) inv.params["write_series"] = true;
        } else if (*ext) {
            inv.pipeline = "extension";
            put("k"), put("p"), put("eps"), put("d", true), put("arcs", true);
        } else if (*prb) {
            inv.pipeline = "probe";
            put("f"), put("p"), put("dmax", true);
        } else if (*wit) {
            inv.pipeline = "witness";
            put("k"), put("s"), put("p"), put("s_outside"), put("eps_smooth");
        } else if (*dem) {
            inv.pipeline = "demo-corollary";
            put("q"), put("p"), put("stages", true), put("N", true), put("window", true);
        } else if (*run) {
            const std::string cli_out = out;
            inv = from_config(config);
            if (app.get_option("--out")->count() > 0) inv.out = cli_out;
            if (*seed_opt) setenv("MASTER_SEED", std::to_string(seed).c_str(), 1);
        }
        return report_failures(cli::execute(inv.pipeline, inv.params, inv.out, inv.base));
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kSchema;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return kSchema;
    } catch (const CertificateError& e) {
        std::cerr << "certificate failed: " << e.inequality << " (lhs " << io::fmt(e.lhs) << ", rhs " << io::fmt(e.rhs) << ")\n";
        return kCertificate;
    } catch (const ResourceError& e) {
        std::cerr << "resource budget " << e.budget << " exceeded: " << e.what() << "\n";
        return kResource;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource budget memory exceeded\n";
        return kResource;
    }
}
