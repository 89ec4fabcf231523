#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netmix/hypothesis.hpp"
#include "netmix/io.hpp"

namespace netmix {

inline constexpr std::string_view kTestReportFormat = "netmix-test-report";
inline constexpr int kTestReportVersion = 1;

/// Per-edge arrays are in edge order; test_degree is indexed by node.
std::string test_report_json(const TestReport& report, std::uint32_t data_checksum,
                             const std::optional<NodeMetadata>& metadata);

/// Throws NetmixError(Parse) naming the first field that is missing, mistyped or inconsistent.
void validate_test_report(std::string_view json_text);

/// Columns l,v,u,rho_exceed,edge_diff,significant with one-based l, v, u.
std::string edge_tests_csv(const TestReport& report);
/// Full symmetric V x V matrix of edge_diff with a zero diagonal.
std::string edge_difference_csv(const TestReport& report);
std::string test_degree_csv(const TestReport& report, const std::optional<NodeMetadata>& metadata);
/// Sum of test degrees per (hemisphere, lobe); requires metadata.
std::string test_degree_groups_csv(const TestReport& report, const NodeMetadata& metadata);

/// Renders every artifact first, then writes them; nothing is written on failure.
void write_test_report(const std::filesystem::path& dir, const TestReport& report, std::uint32_t data_checksum,
                       const std::optional<NodeMetadata>& metadata);

std::string predictions_csv(const std::vector<NetworkObservation>& data, const ClassificationResult& result);
std::string classification_json(const std::vector<NetworkObservation>& data, const ClassificationResult& result);

/// Markdown summary of a saved test report and, optionally, a classification result.
std::string render_markdown(std::string_view test_report_json,
                            const std::optional<std::string>& classification_json);

}  // namespace netmix
