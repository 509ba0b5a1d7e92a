#include "npn/harness/records.hpp"

#include "npn/harness/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace npn::harness {

namespace {

void emit(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        emit(it.value(), out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line so matrices read row by row.
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit(j[i], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(j[i], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) { write_text(path, dump_json(j)); }

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json matrix_json(const IndexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw DataError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw DataError("matrix rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw DataError("matrix entry is not a number");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Json edge_json(const Edge& e) { return Json::array({e.j + 1, e.k + 1}); }

Json to_json(const EdgeTestReport& r) {
  Json j;
  j["edge"] = edge_json({r.j, r.k});
  j["n"] = r.n;
  j["alpha"] = r.alpha;
  j["score"] = {{"score", r.score}, {"statistic", r.score_stat}, {"p_value", r.p_score}, {"reject", r.reject_score}};
  j["wald"] = {{"theta_w", r.theta_w},     {"statistic", r.wald_stat}, {"p_value", r.p_wald},
               {"reject", r.reject_wald},  {"ci_low", r.ci_low},       {"ci_high", r.ci_high}};
  j["sigma2_hat"] = r.sigma2_hat;
  j["h_partial"] = r.h_partial;
  j["variance_floored"] = r.variance_floored;
  return j;
}

Json to_json(const SubgraphReport& r) {
  Json j;
  j["alpha"] = r.alpha;
  j["n"] = r.n;
  j["n_bootstrap"] = r.n_bootstrap;
  j["seed"] = r.seed;
  j["c_w"] = r.c_w;
  j["critical_value"] = r.critical;
  j["contains_pointwise"] = r.contains_pointwise;
  Json retained = Json::array();
  for (const auto& e : r.retained_edges) retained.push_back(edge_json(e));
  j["retained_edges"] = std::move(retained);
  Json intervals = Json::array();
  for (const auto& iv : r.intervals) {
    intervals.push_back({{"edge", edge_json(iv.edge)},
                         {"theta_w", iv.theta_w},
                         {"L", iv.L},
                         {"low", iv.low},
                         {"high", iv.high},
                         {"degenerate", iv.degenerate},
                         {"retained", iv.retained}});
  }
  j["intervals"] = std::move(intervals);
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const PrecisionEstimate& est) {
  Json j;
  j["lambda"] = est.lambda;
  j["symmetrized"] = est.symmetrized;
  j["ridged"] = est.ridged;
  j["ridge"] = est.ridge;
  j["theta"] = matrix_json(est.theta);
  j["theta_inv"] = matrix_json(est.theta_inv);
  return j;
}

Json to_json(const CrossValidationResult& cv) {
  Json j;
  j["lambda"] = cv.lambda;
  j["grid"] = cv.grid;
  Json losses = Json::array();
  for (double v : cv.mean_loss) losses.push_back(v);
  j["mean_loss"] = std::move(losses);
  j["likelihood_folds"] = cv.likelihood_folds;
  Json failures = Json::array();
  for (const auto& [fold, idx] : cv.failures) failures.push_back({{"fold", fold + 1}, {"lambda", cv.grid[idx]}});
  j["failures"] = std::move(failures);
  return j;
}

Json to_json(const GroundTruth& truth) {
  Json j;
  j["d"] = truth.adjacency.rows();
  j["edge_count"] = truth.edge_set.size();
  Json edges = Json::array();
  for (const auto& e : truth.edge_set) edges.push_back(edge_json(e));
  j["edges"] = std::move(edges);
  j["adjacency"] = matrix_json(truth.adjacency);
  j["theta_star"] = matrix_json(truth.theta_star);
  j["sigma_star"] = matrix_json(truth.sigma_star);
  return j;
}

PrecisionEstimate precision_from_json(const Json& j) {
  const Json& body = j.contains("payload") ? j.at("payload").at("estimate") : j;
  try {
    PrecisionEstimate est;
    est.theta = matrix_from_json(body.at("theta"));
    est.lambda = body.at("lambda").get<double>();
    est.symmetrized = body.value("symmetrized", true);
    if (est.theta.rows() != est.theta.cols()) throw DataError("theta must be square");
    if (body.contains("theta_inv")) {
      est.theta_inv = matrix_from_json(body.at("theta_inv"));
      est.ridged = body.value("ridged", false);
      est.ridge = body.value("ridge", 0.0);
    } else {
      auto inv = invert_precision(est.theta);
      est.theta_inv = std::move(inv.inverse);
      est.ridged = inv.ridged;
      est.ridge = inv.ridge;
    }
    return est;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed precision estimate: ") + e.what());
  }
}

std::string version_string() { return std::string(NPN_VERSION) + "+" + NPN_GIT_REV; }

Json envelope(const std::string& command, const Json& config, Json payload, int threads, double wall_time_s) {
  Json j;
  j["command"] = command;
  j["version"] = version_string();
  j["config"] = config;
  j["payload"] = std::move(payload);
  j["runtime"] = {{"threads", threads}, {"wall_time_s", wall_time_s}};
  return j;
}

std::string subgraph_dot(const SubgraphReport& r, int d, const Json& config) {
  std::ostringstream s;
  s << "// config " << config.dump() << "\n";
  s << "// version " << version_string() << "\n";
  s << "graph confidence_subgraph {\n";
  for (int v = 1; v <= d; ++v) s << "  " << v << ";\n";
  for (const auto& iv : r.intervals) {
    if (!iv.retained) continue;
    s << "  " << iv.edge.j + 1 << " -- " << iv.edge.k + 1 << " [label=\"[" << format_double(iv.low) << ", "
      << format_double(iv.high) << "]\"];\n";
  }
  s << "}\n";
  return s.str();
}

}  // namespace npn::harness
