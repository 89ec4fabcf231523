#include "netmix/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace netmix {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Config: return "config";
    case ErrorKind::MissingFile: return "missing file";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Dimension: return "dimension mismatch";
    case ErrorKind::Checksum: return "checksum mismatch";
    case ErrorKind::Archive: return "archive";
    }
    return "error";
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

AdjacencyMatrix read_edge_list(const fs::path& path, const std::vector<std::string>& lines, std::size_t header) {
    std::size_t V = 0;
    const auto head = trim(lines[header]);
    if (!parse_number(head.substr(2), V) || V < 2)
        throw NetmixError(ErrorKind::Parse, fmt::format("{}: line {}: bad node count '{}'", path.string(), header + 1, head));
    AdjacencyMatrix a = AdjacencyMatrix::Zero(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(V));
    for (std::size_t k = header + 1; k < lines.size(); ++k) {
        const auto line = trim(lines[k]);
        if (line.empty() || line.front() == '#')
            continue;
        const auto cells = split(line, ',');
        std::size_t v = 0, u = 0;
        if (cells.size() != 2 || !parse_number(cells[0], v) || !parse_number(cells[1], u))
            throw NetmixError(ErrorKind::Parse, fmt::format("{}: line {}: expected 'v,u', got '{}'", path.string(), k + 1, line));
        if (v < 1 || u < 1 || v > V || u > V)
            throw NetmixError(ErrorKind::Parse,
                              fmt::format("{}: line {}: node outside 1..{} in '{}'", path.string(), k + 1, V, line));
        if (v == u)
            continue;
        a(static_cast<Eigen::Index>(v - 1), static_cast<Eigen::Index>(u - 1)) = 1;
        a(static_cast<Eigen::Index>(u - 1), static_cast<Eigen::Index>(v - 1)) = 1;
    }
    return a;
}

AdjacencyMatrix read_dense(const fs::path& path, const std::vector<std::string>& lines) {
    std::vector<std::vector<int>> rows;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto line = trim(lines[k]);
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<int> row;
        const auto cells = split(line, ',');
        for (std::size_t c = 0; c < cells.size(); ++c) {
            int x = 0;
            if (!parse_number(cells[c], x))
                throw NetmixError(ErrorKind::Parse, fmt::format("{}: row {}, column {}: '{}' is not an integer",
                                                               path.string(), rows.size() + 1, c + 1, cells[c]));
            row.push_back(x);
        }
        rows.push_back(std::move(row));
    }
    const std::size_t V = rows.size();
    if (V < 2)
        throw NetmixError(ErrorKind::Parse, fmt::format("{}: adjacency needs at least 2 rows", path.string()));
    AdjacencyMatrix a(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(V));
    for (std::size_t r = 0; r < V; ++r) {
        if (rows[r].size() != V)
            throw NetmixError(ErrorKind::Dimension, fmt::format("{}: row {} has {} columns, expected {}",
                                                               path.string(), r + 1, rows[r].size(), V));
        for (std::size_t c = 0; c < V; ++c)
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = r == c ? 0 : rows[r][c];
    }
    for (std::size_t r = 0; r < V; ++r)
        for (std::size_t c = 0; c < V; ++c) {
            const int x = a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (x != 0 && x != 1)
                throw NetmixError(ErrorKind::Parse, fmt::format("{}: row {}, column {}: non-binary entry {}",
                                                               path.string(), r + 1, c + 1, x));
            if (x != a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)))
                throw NetmixError(ErrorKind::Parse, fmt::format("{}: row {}, column {}: matrix is not symmetric",
                                                               path.string(), r + 1, c + 1));
        }
    return a;
}

}  // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw NetmixError(ErrorKind::MissingFile, fmt::format("cannot open {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw NetmixError(ErrorKind::MissingFile, fmt::format("cannot write {}", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw NetmixError(ErrorKind::MissingFile, fmt::format("write to {} failed", tmp.string()));
    }
    fs::rename(tmp, path);
}

DatasetManifest read_manifest(const fs::path& path) {
    const auto lines = lines_of(read_file(path));
    const fs::path base = path.parent_path();
    DatasetManifest m;
    bool header_seen = false;
    std::set<std::string> ids;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto line = trim(lines[k]);
        if (line.empty())
            continue;
        if (line.front() == '#') {
            constexpr std::string_view directive = "#node_metadata=";
            if (line.starts_with(directive))
                m.node_metadata = base / fs::path(std::string(trim(line.substr(directive.size()))));
            continue;
        }
        const auto cells = split(line, ',');
        if (!header_seen) {
            if (cells.size() != 3 || cells[0] != "subject_id" || cells[1] != "label" || cells[2] != "path")
                throw NetmixError(ErrorKind::Parse,
                                  fmt::format("{}: expected header 'subject_id,label,path'", path.string()));
            header_seen = true;
            continue;
        }
        if (cells.size() != 3)
            throw NetmixError(ErrorKind::Parse, fmt::format("{}: line {}: expected 3 fields", path.string(), k + 1));
        ManifestEntry e;
        e.subject_id = std::string(cells[0]);
        if (e.subject_id.empty() || !ids.insert(e.subject_id).second)
            throw NetmixError(ErrorKind::Parse,
                              fmt::format("{}: line {}: duplicate or empty subject_id '{}'", path.string(), k + 1, e.subject_id));
        if (!parse_number(cells[1], e.label) || (e.label != 0 && e.label != 1))
            throw NetmixError(ErrorKind::Parse,
                              fmt::format("{}: line {}: label '{}' must be 0 or 1", path.string(), k + 1, cells[1]));
        e.path = base / fs::path(std::string(cells[2]));
        m.subjects.push_back(std::move(e));
    }
    if (!header_seen)
        throw NetmixError(ErrorKind::Parse, fmt::format("{}: empty manifest", path.string()));
    return m;
}

AdjacencyMatrix read_adjacency(const fs::path& path) {
    const auto lines = lines_of(read_file(path));
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto line = trim(lines[k]);
        if (line.empty() || line.front() == '#')
            continue;
        if (line.starts_with("V="))
            return read_edge_list(path, lines, k);
        break;
    }
    return read_dense(path, lines);
}

NodeMetadata read_node_metadata(const fs::path& path, std::size_t nodes) {
    const auto lines = lines_of(read_file(path));
    NodeMetadata m;
    bool header_seen = false;
    std::set<std::string> names;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto line = trim(lines[k]);
        if (line.empty() || line.front() == '#')
            continue;
        const auto cells = split(line, ',');
        if (!header_seen) {
            if (cells.size() != 3 || cells[0] != "name" || cells[1] != "hemisphere" || cells[2] != "lobe")
                throw NetmixError(ErrorKind::Parse, fmt::format("{}: expected header 'name,hemisphere,lobe'", path.string()));
            header_seen = true;
            continue;
        }
        if (cells.size() != 3)
            throw NetmixError(ErrorKind::Parse, fmt::format("{}: line {}: expected 3 fields", path.string(), k + 1));
        NodeInfo n{std::string(cells[0]), std::string(cells[1]), std::string(cells[2])};
        if (n.hemisphere != "L" && n.hemisphere != "R" && n.hemisphere != "other")
            throw NetmixError(ErrorKind::Parse, fmt::format("{}: line {}: hemisphere '{}' must be L, R or other",
                                                           path.string(), k + 1, n.hemisphere));
        if (n.name.empty() || !names.insert(n.name).second)
            throw NetmixError(ErrorKind::Parse, fmt::format("{}: line {}: duplicate or empty node name '{}'",
                                                           path.string(), k + 1, n.name));
        m.nodes.push_back(std::move(n));
    }
    if (m.nodes.size() != nodes)
        throw NetmixError(ErrorKind::Dimension,
                          fmt::format("{}: {} node rows, networks have V = {}", path.string(), m.nodes.size(), nodes));
    return m;
}

Dataset load_dataset(const fs::path& manifest_path) {
    const auto manifest = read_manifest(manifest_path);
    if (manifest.subjects.empty())
        throw NetmixError(ErrorKind::Parse, fmt::format("{}: manifest lists no subjects", manifest_path.string()));
    Dataset d;
    for (const auto& e : manifest.subjects) {
        const AdjacencyMatrix a = read_adjacency(e.path);
        const auto V = static_cast<std::size_t>(a.rows());
        if (d.nodes == 0)
            d.nodes = V;
        else if (V != d.nodes)
            throw NetmixError(ErrorKind::Dimension, fmt::format("subject {} ({}) has V = {}, earlier subjects have V = {}",
                                                               e.subject_id, e.path.string(), V, d.nodes));
        d.subjects.push_back({e.subject_id, e.label, vectorize(a)});
    }
    if (manifest.node_metadata)
        d.metadata = read_node_metadata(*manifest.node_metadata, d.nodes);
    return d;
}

void write_adjacency_csv(const fs::path& path, const AdjacencyMatrix& a) {
    std::string out;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (c)
                out += ',';
            out += fmt::format("{}", a(r, c));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_node_metadata(const fs::path& path, const NodeMetadata& metadata) {
    std::string out = "name,hemisphere,lobe\n";
    for (const auto& n : metadata.nodes)
        out += fmt::format("{},{},{}\n", n.name, n.hemisphere, n.lobe);
    write_file_atomic(path, out);
}

void write_dataset(const fs::path& dir, const std::vector<NetworkObservation>& subjects, std::size_t nodes,
                   const std::optional<NodeMetadata>& metadata) {
    const EdgeIndexMap map(nodes);
    std::string manifest;
    if (metadata) {
        write_node_metadata(dir / "nodes.csv", *metadata);
        manifest += "#node_metadata=nodes.csv\n";
    }
    manifest += "subject_id,label,path\n";
    for (const auto& s : subjects) {
        const fs::path rel = fs::path("networks") / (s.subject_id + ".csv");
        write_adjacency_csv(dir / rel, matricize(s.edges, map));
        manifest += fmt::format("{},{},{}\n", s.subject_id, s.label, rel.generic_string());
    }
    write_file_atomic(dir / "manifest.csv", manifest);
}

namespace {

using Setter = void (*)(RunConfig&, std::string_view, const std::string&);

template <class T>
T config_number(std::string_view value, const std::string& key) {
    T x{};
    if (!parse_number(value, x))
        throw NetmixError(ErrorKind::Config, fmt::format("config key '{}': cannot parse '{}'", key, value));
    return x;
}

const std::map<std::string, Setter, std::less<>>& config_setters() {
    static const std::map<std::string, Setter, std::less<>> setters = {
        {"H", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.H = config_number<std::size_t>(v, k); }},
        {"R", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.R = config_number<std::size_t>(v, k); }},
        {"a0", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.a0 = config_number<double>(v, k); }},
        {"a1", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.a1 = config_number<double>(v, k); }},
        {"z_mean", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.z_mean = config_number<double>(v, k); }},
        {"z_var", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.z_var = config_number<double>(v, k); }},
        {"mig_a1", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.mig_a1 = config_number<double>(v, k); }},
        {"mig_a2", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.mig_a2 = config_number<double>(v, k); }},
        {"dirichlet_conc", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.dirichlet_conc = config_number<double>(v, k); }},
        {"prior_T1", [](RunConfig& c, std::string_view v, const std::string& k) { c.hyper.prior_T1 = config_number<double>(v, k); }},
        {"n_iter", [](RunConfig& c, std::string_view v, const std::string& k) { c.sampler.n_iter = config_number<std::size_t>(v, k); }},
        {"burn_in", [](RunConfig& c, std::string_view v, const std::string& k) { c.sampler.burn_in = config_number<std::size_t>(v, k); }},
        {"thin", [](RunConfig& c, std::string_view v, const std::string& k) { c.sampler.thin = config_number<std::size_t>(v, k); }},
        {"seed", [](RunConfig& c, std::string_view v, const std::string& k) { c.sampler.seed = config_number<std::uint64_t>(v, k); }},
        {"record_pi", [](RunConfig& c, std::string_view v, const std::string& k) { c.sampler.record_pi = config_number<int>(v, k) != 0; }},
        {"threads", [](RunConfig& c, std::string_view v, const std::string& k) { c.sampler.threads = config_number<unsigned>(v, k); }},
        {"sim_V", [](RunConfig& c, std::string_view v, const std::string& k) { c.simulation.nodes = config_number<std::size_t>(v, k); }},
        {"sim_n0", [](RunConfig& c, std::string_view v, const std::string& k) { c.simulation.n0 = config_number<std::size_t>(v, k); }},
        {"sim_n1", [](RunConfig& c, std::string_view v, const std::string& k) { c.simulation.n1 = config_number<std::size_t>(v, k); }},
        {"sim_T", [](RunConfig& c, std::string_view v, const std::string& k) { c.simulation.T = config_number<int>(v, k); }},
    };
    return setters;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::size_t line_no = 0;
    for (const auto& raw : lines_of(std::string(text))) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw NetmixError(ErrorKind::Config, fmt::format("config line {}: expected key = value", line_no));
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        const auto it = config_setters().find(key);
        if (it == config_setters().end())
            throw NetmixError(ErrorKind::Config, fmt::format("config line {}: unknown key '{}'", line_no, key));
        it->second(cfg, value, key);
    }
    if (cfg.simulation.T < -1 || cfg.simulation.T > 1)
        throw NetmixError(ErrorKind::Config, "config key 'sim_T' must be -1, 0 or 1");
    try {
        cfg.hyper.validate();
        cfg.sampler.validate();
    } catch (const std::invalid_argument& e) {
        throw NetmixError(ErrorKind::Config, e.what());
    }
    return cfg;
}

RunConfig read_config(const fs::path& path) { return parse_config(read_file(path)); }

std::string format_config(const RunConfig& c) {
    std::string out;
    out += fmt::format("H = {}\nR = {}\n", c.hyper.H, c.hyper.R);
    out += fmt::format("a0 = {}\na1 = {}\nz_mean = {}\nz_var = {}\n", c.hyper.a0, c.hyper.a1, c.hyper.z_mean, c.hyper.z_var);
    out += fmt::format("mig_a1 = {}\nmig_a2 = {}\n", c.hyper.mig_a1, c.hyper.mig_a2);
    out += fmt::format("dirichlet_conc = {}\nprior_T1 = {}\n", c.hyper.concentration(), c.hyper.prior_T1);
    out += fmt::format("n_iter = {}\nburn_in = {}\nthin = {}\nseed = {}\nrecord_pi = {}\nthreads = {}\n",
                       c.sampler.n_iter, c.sampler.burn_in, c.sampler.thin, c.sampler.seed,
                       c.sampler.record_pi ? 1 : 0, c.sampler.threads);
    out += fmt::format("sim_V = {}\nsim_n0 = {}\nsim_n1 = {}\nsim_T = {}\n", c.simulation.nodes, c.simulation.n0,
                       c.simulation.n1, c.simulation.T);
    return out;
}

}  // namespace netmix
