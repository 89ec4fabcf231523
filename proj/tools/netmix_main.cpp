#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "netmix/archive.hpp"
#include "netmix/hypothesis.hpp"
#include "netmix/io.hpp"
#include "netmix/report.hpp"
#include "netmix/sampler.hpp"

namespace {

using namespace netmix;
using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

std::string truth_json(const MixtureParameters& p, const std::vector<int>& components, std::uint64_t seed) {
    json j;
    j["seed"] = seed;
    j["nodes"] = p.nodes();
    j["pY1"] = p.pY1;
    j["T"] = p.T;
    j["nu0"] = vector_json(p.nu0);
    j["nu1"] = vector_json(p.nu1);
    j["Z"] = vector_json(p.Z);
    json comps = json::array();
    for (const auto& c : p.components) {
        json X = json::array();
        for (Eigen::Index v = 0; v < c.X.rows(); ++v)
            X.push_back(vector_json(c.X.row(v).transpose()));
        comps.push_back({{"lambda", vector_json(c.lambda)}, {"X", std::move(X)}});
    }
    j["components"] = std::move(comps);
    j["assignments"] = components;
    return j.dump(2) + "\n";
}

NodeMetadata synthetic_metadata(std::size_t V) {
    static constexpr const char* lobes[] = {"frontal", "parietal", "temporal", "occipital"};
    NodeMetadata m;
    const std::size_t half = V / 2;
    for (std::size_t v = 0; v < V; ++v) {
        const bool left = v < half;
        const std::size_t k = left ? v : v - half;
        const std::size_t per = std::max<std::size_t>(1, (left ? half : V - half) / 4 + 1);
        m.nodes.push_back({fmt::format("node{}", v + 1), left ? "L" : "R", lobes[std::min<std::size_t>(3, k / per)]});
    }
    return m;
}

RunConfig load_config(const std::string& path) { return path.empty() ? RunConfig{} : read_config(path); }

void require_checksum(const PosteriorDraws& draws, std::uint32_t checksum, const std::string& what) {
    if (draws.meta.data_checksum != checksum)
        throw NetmixError(ErrorKind::Checksum,
                          fmt::format("draw archive was fitted to different data (archive {:08x}, {} {:08x})",
                                      draws.meta.data_checksum, what, checksum));
}

int run(int argc, char** argv) {
    CLI::App app{"Mixture of low-rank network models: simulate, fit, test, predict, report"};
    app.require_subcommand(1);

    std::string config_path, out_dir, manifest, draws_path, out_path, train_manifest, format = "binary";
    std::string report_path, classification_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    double epsilon = kDefaultEpsilon, cutoff = kDefaultDecisionCutoff;

    auto* simulate = app.add_subcommand("simulate", "Draw a synthetic cohort and its ground truth");
    simulate->add_option("--config", config_path, "key = value configuration file");
    simulate->add_option("--seed", seed, "random seed (overrides the config)");
    simulate->add_option("--out-dir", out_dir, "output directory")->required();

    auto* fit = app.add_subcommand("fit", "Run the Gibbs sampler and write a draw archive");
    fit->add_option("--manifest", manifest, "dataset manifest")->required();
    fit->add_option("--config", config_path, "key = value configuration file");
    fit->add_option("--seed", seed, "random seed (overrides the config)");
    fit->add_option("--threads", threads, "worker threads (results do not depend on it)");
    fit->add_option("--out", out_path, "draw archive path")->required();
    fit->add_option("--format", format, "binary, csv or both")->check(CLI::IsMember({"binary", "csv", "both"}));

    auto* test = app.add_subcommand("test", "Global and per-edge group tests from a draw archive");
    test->add_option("--draws", draws_path, "draw archive")->required();
    test->add_option("--manifest", manifest, "dataset the archive was fitted to")->required();
    test->add_option("--epsilon", epsilon, "Cramer's V threshold of the interval null");
    test->add_option("--cutoff", cutoff, "posterior exceedance needed to flag an edge");
    test->add_option("--out-dir", out_dir, "output directory")->required();

    auto* predict = app.add_subcommand("predict", "Posterior group probabilities for networks");
    predict->add_option("--draws", draws_path, "draw archive")->required();
    predict->add_option("--manifest", manifest, "networks to classify")->required();
    predict->add_option("--train-manifest", train_manifest, "dataset the archive was fitted to (default: --manifest)");
    predict->add_option("--out-dir", out_dir, "output directory")->required();

    auto* report = app.add_subcommand("report", "Markdown summary of test and prediction outputs");
    report->add_option("--test-report", report_path, "test_report.json")->required();
    report->add_option("--classification", classification_path, "classification.json");
    report->add_option("--out", out_path, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        throw NetmixError(ErrorKind::Usage, e.what());
    }

    if (simulate->parsed()) {
        RunConfig cfg = load_config(config_path);
        const std::uint64_t s = seed.value_or(cfg.sampler.seed);
        auto hyper = cfg.hyper;
        hyper.V = cfg.simulation.nodes;
        Rng rng(s);
        auto truth = sample_prior(hyper, rng).params;
        if (cfg.simulation.T == 0) {
            truth.T = 0;
            truth.nu1 = truth.nu0;
        } else if (cfg.simulation.T == 1 && truth.T == 0) {
            truth.T = 1;
            truth.nu1 = dirichlet(rng, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(hyper.H), hyper.concentration()));
        }
        std::vector<int> components;
        const auto cohort = sample_cohort(truth, cfg.simulation.n0, cfg.simulation.n1, rng, components);
        const fs::path dir(out_dir);
        write_dataset(dir, cohort, hyper.V, synthetic_metadata(hyper.V));
        write_file_atomic(dir / "truth.json", truth_json(truth, components, s));
        return 0;
    }

    if (fit->parsed()) {
        RunConfig cfg = load_config(config_path);
        if (seed)
            cfg.sampler.seed = *seed;
        if (threads)
            cfg.sampler.threads = *threads;
        const Dataset data = load_dataset(manifest);
        const auto draws = run_chain(data.subjects, cfg.hyper, cfg.sampler);
        fs::path out(out_path);
        if (format == "binary" || format == "both")
            write_archive(out, draws);
        if (format == "csv" || format == "both") {
            fs::path csv = out;
            if (format == "both")
                csv.replace_extension(".csv");
            write_draws_csv(csv, draws);
        }
        return 0;
    }

    if (test->parsed()) {
        const auto draws = read_archive(draws_path);
        const Dataset data = load_dataset(manifest);
        if (data.nodes != draws.meta.nodes)
            throw NetmixError(ErrorKind::Dimension,
                              fmt::format("archive has V = {}, dataset has V = {}", draws.meta.nodes, data.nodes));
        require_checksum(draws, data_checksum(data.subjects), "dataset");
        const auto r = make_test_report(draws, epsilon, cutoff);
        write_test_report(out_dir, r, draws.meta.data_checksum, data.metadata);
        return 0;
    }

    if (predict->parsed()) {
        const auto draws = read_archive(draws_path);
        const Dataset target = load_dataset(manifest);
        const Dataset train = train_manifest.empty() ? target : load_dataset(train_manifest);
        for (const auto* d : {&target, &train})
            if (d->nodes != draws.meta.nodes)
                throw NetmixError(ErrorKind::Dimension,
                                  fmt::format("archive has V = {}, dataset has V = {}", draws.meta.nodes, d->nodes));
        require_checksum(draws, data_checksum(train.subjects), "training dataset");
        std::vector<NetworkObservation> all = train.subjects;
        HoldoutSpec holdout;
        for (std::size_t i = 0; i < train.subjects.size(); ++i)
            holdout.train.push_back(i);
        if (train_manifest.empty()) {
            holdout.test = holdout.train;
        } else {
            for (const auto& s : target.subjects) {
                holdout.test.push_back(all.size());
                all.push_back(s);
            }
        }
        const auto result = evaluate_classifier(all, draws, holdout);
        write_file_atomic(fs::path(out_dir) / "predictions.csv", predictions_csv(all, result));
        write_file_atomic(fs::path(out_dir) / "classification.json", classification_json(all, result));
        return 0;
    }

    if (report->parsed()) {
        std::optional<std::string> classification;
        if (!classification_path.empty())
            classification = read_file(classification_path);
        const std::string md = render_markdown(read_file(report_path), classification);
        if (out_path.empty())
            std::cout << md;
        else
            write_file_atomic(out_path, md);
        return 0;
    }
    return 0;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Config: return 3;
    case ErrorKind::MissingFile: return 4;
    case ErrorKind::Parse: return 5;
    case ErrorKind::Dimension: return 6;
    case ErrorKind::Checksum: return 7;
    case ErrorKind::Archive: return 8;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const netmix::NetmixError& e) {
        std::fprintf(stderr, "error: %s: %s\n", std::string(netmix::to_string(e.kind())).c_str(), e.what());
        return exit_code(e.kind());
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: invalid argument: %s\n", e.what());
        return 9;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 1;
    }
}
