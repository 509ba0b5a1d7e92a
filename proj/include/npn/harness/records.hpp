#pragma once

#include "npn/global_inference.hpp"
#include "npn/local_inference.hpp"
#include "npn/precision.hpp"
#include "npn/synthetic.hpp"

#include <json.hpp>

#include <string>

namespace npn::harness {

using Json = nlohmann::ordered_json;

/// Serializes with two-space indentation and every number printed with 17
/// significant digits. Non-finite numbers become null.
std::string dump_json(const Json& j);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

Json matrix_json(const Matrix& m);
Json matrix_json(const IndexMatrix& m);
Matrix matrix_from_json(const Json& j);

/// Vertex indices are 1-based in every serialized record.
Json edge_json(const Edge& e);
Json to_json(const EdgeTestReport& r);
Json to_json(const SubgraphReport& r);
Json to_json(const PrecisionEstimate& est);
Json to_json(const CrossValidationResult& cv);
Json to_json(const GroundTruth& truth);

PrecisionEstimate precision_from_json(const Json& j);

/// {command, version, config, payload, runtime: {threads, wall_time_s}}.
/// Only `runtime` depends on the thread count or the clock.
Json envelope(const std::string& command, const Json& config, Json payload, int threads, double wall_time_s);

/// Retained edges as an undirected DOT graph; edge labels are the uniform
/// interval endpoints. The config is embedded as // comments.
std::string subgraph_dot(const SubgraphReport& r, int d, const Json& config);

std::string version_string();

}  // namespace npn::harness
