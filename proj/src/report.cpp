#include "netmix/report.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <utility>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace netmix {

namespace {

using nlohmann::json;

std::size_t edge_count_of(const TestReport& r) {
    const std::size_t L = EdgeIndexMap::edge_count(r.nodes);
    if (static_cast<std::size_t>(r.rho_exceed.size()) != L || static_cast<std::size_t>(r.edge_diff.size()) != L ||
        r.significant_edges.size() != L)
        throw std::invalid_argument("test report arrays disagree with its node count");
    return L;
}

std::map<std::pair<std::string, std::string>, std::pair<int, int>> degree_groups(const std::vector<int>& degree,
                                                                                  const NodeMetadata& metadata) {
    std::map<std::pair<std::string, std::string>, std::pair<int, int>> groups;
    for (std::size_t v = 0; v < degree.size(); ++v) {
        auto& g = groups[{metadata.nodes[v].hemisphere, metadata.nodes[v].lobe}];
        g.first += 1;
        g.second += degree[v];
    }
    return groups;
}

const json& field(const json& j, const char* key, json::value_t type) {
    const auto it = j.find(key);
    if (it == j.end())
        throw NetmixError(ErrorKind::Parse, fmt::format("test report lacks field '{}'", key));
    const bool ok = type == json::value_t::number_float ? it->is_number() : it->type() == type ||
        (type == json::value_t::number_unsigned && it->is_number_integer() && *it >= 0);
    if (!ok)
        throw NetmixError(ErrorKind::Parse, fmt::format("test report field '{}' has the wrong type", key));
    return *it;
}

}  // namespace

std::string test_report_json(const TestReport& r, std::uint32_t checksum, const std::optional<NodeMetadata>& metadata) {
    const std::size_t L = edge_count_of(r);
    const EdgeIndexMap map(r.nodes);
    json j;
    j["format"] = kTestReportFormat;
    j["version"] = kTestReportVersion;
    j["nodes"] = r.nodes;
    j["edges"] = L;
    j["epsilon"] = r.epsilon;
    j["decision_cutoff"] = r.decision_cutoff;
    j["n_draws"] = r.n_draws;
    j["data_checksum"] = fmt::format("{:08x}", checksum);
    j["pr_H1"] = r.pr_H1;
    j["n_significant"] = r.significant_count();
    json rho = json::array(), diff = json::array(), sig = json::array();
    for (std::size_t l = 0; l < L; ++l) {
        rho.push_back(r.rho_exceed[static_cast<Eigen::Index>(l)]);
        diff.push_back(r.edge_diff[static_cast<Eigen::Index>(l)]);
        sig.push_back(static_cast<bool>(r.significant_edges[l]));
    }
    j["rho_exceed"] = std::move(rho);
    j["edge_diff"] = std::move(diff);
    j["significant"] = std::move(sig);
    const auto degree = test_degree(r, map);
    j["test_degree"] = degree;
    if (metadata) {
        json groups = json::array();
        for (const auto& [key, g] : degree_groups(degree, *metadata))
            groups.push_back({{"hemisphere", key.first}, {"lobe", key.second}, {"nodes", g.first}, {"test_degree", g.second}});
        j["degree_groups"] = std::move(groups);
    }
    return j.dump(2) + "\n";
}

void validate_test_report(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw NetmixError(ErrorKind::Parse, fmt::format("test report is not valid JSON: {}", e.what()));
    }
    if (!j.is_object())
        throw NetmixError(ErrorKind::Parse, "test report must be a JSON object");
    if (field(j, "format", json::value_t::string) != kTestReportFormat)
        throw NetmixError(ErrorKind::Parse, "test report has an unexpected format tag");
    if (field(j, "version", json::value_t::number_unsigned) != kTestReportVersion)
        throw NetmixError(ErrorKind::Parse, "test report has an unsupported version");
    const auto V = field(j, "nodes", json::value_t::number_unsigned).get<std::size_t>();
    const auto L = field(j, "edges", json::value_t::number_unsigned).get<std::size_t>();
    if (V < 2 || L != EdgeIndexMap::edge_count(V))
        throw NetmixError(ErrorKind::Parse, "test report node and edge counts disagree");
    const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    for (const char* key : {"epsilon", "decision_cutoff", "pr_H1"})
        if (!in_unit(field(j, key, json::value_t::number_float).get<double>()))
            throw NetmixError(ErrorKind::Parse, fmt::format("test report field '{}' lies outside [0, 1]", key));
    field(j, "n_draws", json::value_t::number_unsigned);
    field(j, "data_checksum", json::value_t::string);
    const auto n_sig = field(j, "n_significant", json::value_t::number_unsigned).get<std::size_t>();
    const auto& rho = field(j, "rho_exceed", json::value_t::array);
    const auto& diff = field(j, "edge_diff", json::value_t::array);
    const auto& sig = field(j, "significant", json::value_t::array);
    if (rho.size() != L || diff.size() != L || sig.size() != L)
        throw NetmixError(ErrorKind::Parse, "test report per-edge arrays have the wrong length");
    std::size_t count = 0;
    for (std::size_t l = 0; l < L; ++l) {
        if (!rho[l].is_number() || !in_unit(rho[l].get<double>()))
            throw NetmixError(ErrorKind::Parse, fmt::format("rho_exceed[{}] is not a probability", l));
        if (!diff[l].is_number() || std::abs(diff[l].get<double>()) > 1.0)
            throw NetmixError(ErrorKind::Parse, fmt::format("edge_diff[{}] lies outside [-1, 1]", l));
        if (!sig[l].is_boolean())
            throw NetmixError(ErrorKind::Parse, fmt::format("significant[{}] is not a boolean", l));
        count += sig[l].get<bool>() ? 1 : 0;
    }
    if (count != n_sig)
        throw NetmixError(ErrorKind::Parse, "n_significant disagrees with the significant flags");
    const auto& degree = field(j, "test_degree", json::value_t::array);
    if (degree.size() != V)
        throw NetmixError(ErrorKind::Parse, "test_degree has the wrong length");
    long total = 0;
    for (const auto& d : degree) {
        if (!d.is_number_integer())
            throw NetmixError(ErrorKind::Parse, "test_degree entries must be integers");
        total += d.get<long>();
    }
    if (total != 2 * static_cast<long>(n_sig))
        throw NetmixError(ErrorKind::Parse, "test degrees do not sum to twice the significant edge count");
}

std::string edge_tests_csv(const TestReport& r) {
    const std::size_t L = edge_count_of(r);
    const EdgeIndexMap map(r.nodes);
    std::string out = "l,v,u,rho_exceed,edge_diff,significant\n";
    auto it = std::back_inserter(out);
    for (std::size_t l = 0; l < L; ++l) {
        const auto [v, u] = map.pair(l);
        fmt::format_to(it, "{},{},{},{},{},{}\n", l + 1, v + 1, u + 1, r.rho_exceed[static_cast<Eigen::Index>(l)],
                       r.edge_diff[static_cast<Eigen::Index>(l)], r.significant_edges[l] ? 1 : 0);
    }
    return out;
}

std::string edge_difference_csv(const TestReport& r) {
    const std::size_t L = edge_count_of(r);
    const EdgeIndexMap map(r.nodes);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r.nodes), static_cast<Eigen::Index>(r.nodes));
    for (std::size_t l = 0; l < L; ++l) {
        const auto [v, u] = map.pair(l);
        m(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = r.edge_diff[static_cast<Eigen::Index>(l)];
        m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = r.edge_diff[static_cast<Eigen::Index>(l)];
    }
    std::string out;
    auto it = std::back_inserter(out);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            if (k)
                out += ',';
            fmt::format_to(it, "{}", m(i, k));
        }
        out += '\n';
    }
    return out;
}

std::string test_degree_csv(const TestReport& r, const std::optional<NodeMetadata>& metadata) {
    edge_count_of(r);
    const auto degree = test_degree(r, EdgeIndexMap(r.nodes));
    std::string out = "node,name,hemisphere,lobe,test_degree\n";
    auto it = std::back_inserter(out);
    for (std::size_t v = 0; v < degree.size(); ++v) {
        if (metadata)
            fmt::format_to(it, "{},{},{},{},{}\n", v + 1, metadata->nodes[v].name, metadata->nodes[v].hemisphere,
                           metadata->nodes[v].lobe, degree[v]);
        else
            fmt::format_to(it, "{},,,,{}\n", v + 1, degree[v]);
    }
    return out;
}

std::string test_degree_groups_csv(const TestReport& r, const NodeMetadata& metadata) {
    edge_count_of(r);
    if (metadata.nodes.size() != r.nodes)
        throw NetmixError(ErrorKind::Dimension, "node metadata and test report disagree on V");
    std::string out = "hemisphere,lobe,nodes,test_degree\n";
    auto it = std::back_inserter(out);
    for (const auto& [key, g] : degree_groups(test_degree(r, EdgeIndexMap(r.nodes)), metadata))
        fmt::format_to(it, "{},{},{},{}\n", key.first, key.second, g.first, g.second);
    return out;
}

void write_test_report(const std::filesystem::path& dir, const TestReport& r, std::uint32_t checksum,
                       const std::optional<NodeMetadata>& metadata) {
    if (metadata && metadata->nodes.size() != r.nodes)
        throw NetmixError(ErrorKind::Dimension, "node metadata and test report disagree on V");
    std::vector<std::pair<std::string, std::string>> files = {
        {"test_report.json", test_report_json(r, checksum, metadata)},
        {"edge_tests.csv", edge_tests_csv(r)},
        {"edge_difference.csv", edge_difference_csv(r)},
        {"test_degree.csv", test_degree_csv(r, metadata)},
    };
    if (metadata)
        files.emplace_back("test_degree_groups.csv", test_degree_groups_csv(r, *metadata));
    for (const auto& [name, content] : files)
        write_file_atomic(dir / name, content);
}

std::string predictions_csv(const std::vector<NetworkObservation>& data, const ClassificationResult& c) {
    std::string out = "subject_id,label,probability,predicted\n";
    auto it = std::back_inserter(out);
    for (std::size_t k = 0; k < c.subjects.size(); ++k)
        fmt::format_to(it, "{},{},{},{}\n", data.at(c.subjects[k]).subject_id, c.labels[k], c.probabilities[k],
                       c.predicted[k]);
    return out;
}

std::string classification_json(const std::vector<NetworkObservation>& data, const ClassificationResult& c) {
    json j;
    j["n"] = c.subjects.size();
    j["auc"] = c.auc;
    j["accuracy"] = c.accuracy;
    json subjects = json::array();
    for (std::size_t k = 0; k < c.subjects.size(); ++k)
        subjects.push_back({{"subject_id", data.at(c.subjects[k]).subject_id},
                            {"label", c.labels[k]},
                            {"probability", c.probabilities[k]},
                            {"predicted", c.predicted[k]}});
    j["subjects"] = std::move(subjects);
    return j.dump(2) + "\n";
}

std::string render_markdown(std::string_view report_text, const std::optional<std::string>& classification_text) {
    validate_test_report(report_text);
    const json j = json::parse(report_text);
    const auto V = j["nodes"].get<std::size_t>();
    const EdgeIndexMap map(V);
    std::string out = "# Network group comparison\n\n";
    auto it = std::back_inserter(out);
    fmt::format_to(it, "- Nodes: {} ({} edges)\n", V, j["edges"].get<std::size_t>());
    fmt::format_to(it, "- Posterior draws: {}\n", j["n_draws"].get<std::size_t>());
    fmt::format_to(it, "- Data checksum: {}\n\n", j["data_checksum"].get<std::string>());
    out += "## Global test\n\n";
    const double pr = j["pr_H1"].get<double>();
    fmt::format_to(it, "Pr(H1 | data) = {:.4f}: {}\n\n", pr,
                   pr > 0.5 ? "the groups differ in their network distributions"
                            : "no evidence that the groups differ");
    out += "## Local tests\n\n";
    fmt::format_to(it, "Edges with Pr(rho > {}) > {}: {} of {}\n\n", j["epsilon"].get<double>(),
                   j["decision_cutoff"].get<double>(), j["n_significant"].get<std::size_t>(),
                   j["edges"].get<std::size_t>());
    const auto& sig = j["significant"];
    const auto& rho = j["rho_exceed"];
    const auto& diff = j["edge_diff"];
    std::vector<std::size_t> hits;
    for (std::size_t l = 0; l < sig.size(); ++l)
        if (sig[l].get<bool>())
            hits.push_back(l);
    std::stable_sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(diff[a].get<double>()) > std::abs(diff[b].get<double>());
    });
    if (!hits.empty()) {
        out += "| edge | nodes | Pr(rho > eps) | case - control |\n|---|---|---|---|\n";
        for (auto l : hits) {
            const auto [v, u] = map.pair(l);
            fmt::format_to(it, "| {} | ({}, {}) | {:.3f} | {:+.3f} |\n", l + 1, v + 1, u + 1, rho[l].get<double>(),
                           diff[l].get<double>());
        }
        out += '\n';
    }
    if (j.contains("degree_groups")) {
        out += "## Test degree by hemisphere and lobe\n\n| hemisphere | lobe | nodes | test degree |\n|---|---|---|---|\n";
        for (const auto& g : j["degree_groups"])
            fmt::format_to(it, "| {} | {} | {} | {} |\n", g["hemisphere"].get<std::string>(),
                           g["lobe"].get<std::string>(), g["nodes"].get<int>(), g["test_degree"].get<int>());
        out += '\n';
    }
    if (classification_text) {
        json c;
        try {
            c = json::parse(*classification_text);
        } catch (const json::parse_error& e) {
            throw NetmixError(ErrorKind::Parse, fmt::format("classification result is not valid JSON: {}", e.what()));
        }
        out += "## Classification\n\n";
        fmt::format_to(it, "- Subjects: {}\n- AUC: {:.3f}\n- Accuracy: {:.3f}\n", c.at("n").get<std::size_t>(),
                       c.at("auc").get<double>(), c.at("accuracy").get<double>());
    }
    return out;
}

}  // namespace netmix
