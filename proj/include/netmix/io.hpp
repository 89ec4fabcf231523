#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netmix/edge_index.hpp"
#include "netmix/errors.hpp"
#include "netmix/network_model.hpp"
#include "netmix/priors.hpp"
#include "netmix/sampler.hpp"

namespace netmix {

namespace fs = std::filesystem;

struct NodeInfo {
    std::string name;
    std::string hemisphere;  // "L", "R" or "other"
    std::string lobe;
};

struct NodeMetadata {
    std::vector<NodeInfo> nodes;
};

struct ManifestEntry {
    std::string subject_id;
    int label = 0;
    fs::path path;  // resolved against the manifest directory
};

/// CSV with header `subject_id,label,path`. A `#node_metadata=<path>` line
/// names the optional node table; other `#` lines are comments.
struct DatasetManifest {
    std::vector<ManifestEntry> subjects;
    std::optional<fs::path> node_metadata;
};

struct Dataset {
    std::vector<NetworkObservation> subjects;
    std::size_t nodes = 0;
    std::optional<NodeMetadata> metadata;
};

DatasetManifest read_manifest(const fs::path& path);

/// Dense V x V CSV of 0/1 values, or an edge list whose first line is
/// `V=<count>` followed by one-based `v,u` pairs. Diagonal entries and
/// self-loops are ignored; asymmetric or non-binary matrices are rejected.
AdjacencyMatrix read_adjacency(const fs::path& path);

NodeMetadata read_node_metadata(const fs::path& path, std::size_t nodes);

Dataset load_dataset(const fs::path& manifest);

void write_adjacency_csv(const fs::path& path, const AdjacencyMatrix& adjacency);
void write_node_metadata(const fs::path& path, const NodeMetadata& metadata);

/// Writes manifest.csv plus networks/<subject_id>.csv (and nodes.csv when
/// metadata is given) under dir.
void write_dataset(const fs::path& dir, const std::vector<NetworkObservation>& subjects, std::size_t nodes,
                   const std::optional<NodeMetadata>& metadata);

struct SimulationSettings {
    std::size_t nodes = 20;
    std::size_t n0 = 50;
    std::size_t n1 = 50;
    int T = -1;  // -1 draws T from the prior; 0 or 1 forces it
};

struct RunConfig {
    HyperParameters hyper;
    SamplerConfig sampler;
    SimulationSettings simulation;
};

/// `key = value` lines; `#` starts a comment. Unknown keys are errors.
RunConfig parse_config(std::string_view text);
RunConfig read_config(const fs::path& path);
/// Every recognised key with its current value, in parse_config syntax.
std::string format_config(const RunConfig& config);

std::string read_file(const fs::path& path);
/// Writes to a temporary sibling and renames it over path.
void write_file_atomic(const fs::path& path, std::string_view content);

}  // namespace netmix
