#include "crowdrank/serialize.hpp"

#include <nlohmann/json.hpp>

namespace crowdrank {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

ordered vector_json(const std::vector<double>& v) {
  return ordered(v);
}

ordered matrix_json(const Matrix& m) {
  ordered rows = ordered::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    ordered row = ordered::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row.push_back(m[r][c]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered parse(const std::string& text) {
  try {
    return ordered::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid model json: ") + e.what());
  }
}

std::vector<double> read_vector(const ordered& node, const char* field) {
  if (!node.contains(field) || !node[field].is_array()) {
    throw ParseError(std::string("model json: missing array '") + field + "'");
  }
  std::vector<double> out;
  out.reserve(node[field].size());
  for (const auto& cell : node[field]) {
    if (!cell.is_number()) {
      throw ParseError(std::string("model json: non-numeric entry in '") +
                       field + "'");
    }
    out.push_back(cell.get<double>());
  }
  return out;
}

Matrix read_matrix(const ordered& node, const char* field) {
  if (!node.contains(field) || !node[field].is_array() ||
      node[field].empty()) {
    throw ParseError(std::string("model json: missing matrix '") + field +
                     "'");
  }
  const auto& rows = node[field];
  std::size_t cols = 0;
  std::vector<std::vector<double>> data;
  for (const auto& row : rows) {
    if (!row.is_array()) {
      throw ParseError(std::string("model json: '") + field +
                       "' rows must be arrays");
    }
    std::vector<double> r;
    for (const auto& cell : row) {
      if (!cell.is_number()) {
        throw ParseError(std::string("model json: non-numeric entry in '") +
                         field + "'");
      }
      r.push_back(cell.get<double>());
    }
    if (data.empty()) {
      cols = r.size();
    } else if (r.size() != cols) {
      throw ParseError(std::string("model json: ragged matrix '") + field +
                       "'");
    }
    data.push_back(std::move(r));
  }
  if (cols == 0) {
    throw ParseError(std::string("model json: empty matrix '") + field + "'");
  }
  Matrix m(data.size(), cols);
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m[r][c] = data[r][c];
    }
  }
  return m;
}

template <typename T>
T read_scalar(const ordered& node, const char* field) {
  if (!node.contains(field)) {
    throw ParseError(std::string("model json: missing field '") + field + "'");
  }
  try {
    return node[field].get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("model json: bad field '") + field + "'");
  }
}

ordered weights_json(const RankerWeights& weights) {
  ordered node;
  node["w"] = vector_json(weights.w);
  node["iterations"] = weights.trained_iterations;
  node["final_cost"] = weights.final_cost;
  return node;
}

RankerWeights weights_from_node(const ordered& node) {
  RankerWeights weights;
  weights.w = read_vector(node, "w");
  weights.trained_iterations = read_scalar<std::size_t>(node, "iterations");
  weights.final_cost = read_scalar<double>(node, "final_cost");
  return weights;
}

}  // namespace

std::string to_json_string(const RankerWeights& weights) {
  return weights_json(weights).dump(2) + "\n";
}

std::string to_json_string(const IamModel& model) {
  ordered list = ordered::array();
  for (std::size_t k = 0; k < model.annotator_ids.size(); ++k) {
    ordered entry;
    entry["annotator"] = model.annotator_ids[k];
    ordered fit = weights_json(model.rankers[k]);
    for (auto& [key, value] : fit.items()) {
      entry[key] = std::move(value);
    }
    list.push_back(std::move(entry));
  }
  ordered node;
  node["annotators"] = std::move(list);
  return node.dump(2) + "\n";
}

std::string to_json_string(const JamModel& model) {
  ordered node;
  node["w"] = vector_json(model.w.w);
  node["r"] = vector_json(model.r);
  node["iterations"] = model.iterations;
  node["converged"] = model.converged;
  node["seed"] = model.seed;
  return node.dump(2) + "\n";
}

std::string to_json_string(const VrjamModel& model) {
  ordered node;
  node["w"] = vector_json(model.w.w);
  node["R"] = matrix_json(model.reliability);
  node["centroids"] = matrix_json(model.clusters.centroids);
  node["D"] = model.clusters.num_clusters();
  node["cluster_threshold"] = model.clusters.threshold_used;
  node["iterations"] = model.iterations;
  node["converged"] = model.converged;
  node["seed"] = model.seed;
  return node.dump(2) + "\n";
}

RankerWeights ranker_weights_from_json(const std::string& text) {
  return weights_from_node(parse(text));
}

JamModel jam_model_from_json(const std::string& text) {
  ordered node = parse(text);
  JamModel model;
  model.w.w = read_vector(node, "w");
  model.r = read_vector(node, "r");
  model.iterations = read_scalar<std::size_t>(node, "iterations");
  model.converged = read_scalar<bool>(node, "converged");
  model.seed = read_scalar<std::uint64_t>(node, "seed");
  return model;
}

VrjamModel vrjam_model_from_json(const std::string& text) {
  ordered node = parse(text);
  VrjamModel model;
  model.w.w = read_vector(node, "w");
  model.reliability = read_matrix(node, "R");
  model.clusters.centroids = read_matrix(node, "centroids");
  model.clusters.threshold_used = read_scalar<double>(node, "cluster_threshold");
  model.iterations = read_scalar<std::size_t>(node, "iterations");
  model.converged = read_scalar<bool>(node, "converged");
  model.seed = read_scalar<std::uint64_t>(node, "seed");
  const auto declared = read_scalar<std::size_t>(node, "D");
  if (declared != model.clusters.num_clusters() ||
      model.reliability.cols() != declared) {
    throw ParseError("model json: cluster count disagrees with matrices");
  }
  return model;
}

RegionSpec region_spec_from_json(const std::string& text) {
  ordered node = parse(text);
  RegionSpec spec;
  spec.regions.centroids = read_matrix(node, "centroids");
  spec.regions.threshold_used = 0.0;
  spec.B = read_matrix(node, "B");
  if (spec.B.cols() != spec.regions.num_clusters()) {
    throw ParseError(
        "region json: B columns must match the number of centroids");
  }
  return spec;
}

std::string to_json_string(const RegionSpec& spec) {
  ordered node;
  node["centroids"] = matrix_json(spec.regions.centroids);
  node["B"] = matrix_json(spec.B);
  return node.dump(2) + "\n";
}

}  // namespace crowdrank
