#include "pt/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pt/errors.hpp"

namespace pt {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw DataError("malformed JSON");
  return doc;
}

std::vector<double> as_vector(const json& j) {
  return j.get<std::vector<double>>();
}

std::vector<std::vector<double>> as_matrix(const json& j) {
  return j.get<std::vector<std::vector<double>>>();
}

Eigen::MatrixXd as_eigen(const json& j) {
  const auto rows = as_matrix(j);
  if (rows.empty()) throw DataError("empty matrix");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw DataError("ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

json eigen_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

HmmModel hmm_from_json(const std::string& text) {
  const json doc = parse(text);
  try {
    HmmModel model;
    model.num_states = doc.at("states").get<int>();
    model.init = as_vector(doc.at("init"));
    model.trans = as_matrix(doc.at("trans"));
    const json& emit = doc.at("emit");
    const std::string type = emit.at("type").get<std::string>();
    if (type == "discrete") {
      model.emit = DiscreteEmission{as_matrix(emit.at("table"))};
    } else if (type == "gaussian") {
      model.emit = GaussianEmission{as_vector(emit.at("mean")), as_vector(emit.at("var"))};
    } else {
      throw DataError("unknown emission type: " + type);
    }
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad HMM document: ") + e.what());
  }
}

std::string hmm_to_json(const HmmModel& model) {
  json doc;
  doc["states"] = model.num_states;
  doc["init"] = model.init;
  doc["trans"] = model.trans;
  if (const auto* d = std::get_if<DiscreteEmission>(&model.emit)) {
    doc["emit"] = {{"type", "discrete"}, {"table", d->table}};
  } else {
    const auto& g = std::get<GaussianEmission>(model.emit);
    doc["emit"] = {{"type", "gaussian"}, {"mean", g.mean}, {"var", g.var}};
  }
  return doc.dump(2) + "\n";
}

LinearGaussianModel linear_gaussian_from_json(const std::string& text) {
  const json doc = parse(text);
  try {
    LinearGaussianModel model;
    model.A = as_eigen(doc.at("A"));
    model.Q = as_eigen(doc.at("Q"));
    model.C = as_eigen(doc.at("C"));
    model.R = as_eigen(doc.at("R"));
    const auto mean = as_vector(doc.at("init_mean"));
    model.init_mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
    model.init_cov = as_eigen(doc.at("init_cov"));
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad linear-Gaussian document: ") + e.what());
  }
}

std::string linear_gaussian_to_json(const LinearGaussianModel& model) {
  json doc;
  doc["A"] = eigen_to_json(model.A);
  doc["Q"] = eigen_to_json(model.Q);
  doc["C"] = eigen_to_json(model.C);
  doc["R"] = eigen_to_json(model.R);
  doc["init_mean"] = std::vector<double>(model.init_mean.data(),
                                         model.init_mean.data() + model.init_mean.size());
  doc["init_cov"] = eigen_to_json(model.init_cov);
  return doc.dump(2) + "\n";
}

PairwiseModel pairwise_from_json(const std::string& text) {
  const json doc = parse(text);
  try {
    PairwiseModel model;
    model.domain_sizes = doc.at("domains").get<std::vector<int>>();
    model.unary = as_matrix(doc.at("unary"));
    for (const auto& e : doc.at("edges")) {
      PairwiseModel::Edge edge;
      edge.a = e.at("a").get<int>();
      edge.b = e.at("b").get<int>();
      const auto table = as_matrix(e.at("psi"));
      for (const auto& row : table)
        edge.psi.insert(edge.psi.end(), row.begin(), row.end());
      model.edges.push_back(std::move(edge));
    }
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad pairwise model document: ") + e.what());
  }
}

std::string pairwise_to_json(const PairwiseModel& model) {
  json doc;
  doc["domains"] = model.domain_sizes;
  doc["unary"] = model.unary;
  json edges = json::array();
  for (const auto& e : model.edges) {
    json table = json::array();
    const int lb = model.domain_sizes[e.b];
    for (int xa = 0; xa < model.domain_sizes[e.a]; ++xa) {
      json row = json::array();
      for (int xb = 0; xb < lb; ++xb) row.push_back(e.psi[xa * lb + xb]);
      table.push_back(std::move(row));
    }
    edges.push_back({{"a", e.a}, {"b", e.b}, {"psi", std::move(table)}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

std::string beliefs_to_json(const PairwiseModel& model,
                            const BeliefPropResult& result) {
  json doc;
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  doc["final_delta"] = result.final_delta;
  doc["vertex_beliefs"] = result.beliefs.vertex;
  json edges = json::array();
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    const int lb = model.domain_sizes[model.edges[e].b];
    json table = json::array();
    for (int xa = 0; xa < model.domain_sizes[model.edges[e].a]; ++xa) {
      json row = json::array();
      for (int xb = 0; xb < lb; ++xb)
        row.push_back(result.beliefs.edge[e][xa * lb + xb]);
      table.push_back(std::move(row));
    }
    edges.push_back({{"a", model.edges[e].a},
                     {"b", model.edges[e].b},
                     {"belief", std::move(table)}});
  }
  doc["edge_beliefs"] = std::move(edges);
  return doc.dump(2) + "\n";
}

Pcfg pcfg_from_json(const std::string& text) {
  const json doc = parse(text);
  try {
    Pcfg grammar;
    grammar.terminals = doc.at("terminals").get<std::vector<std::string>>();
    for (const auto& l : doc.at("labels")) {
      PcfgLabel label;
      label.name = l.at("name").get<std::string>();
      label.arity = l.at("arity").get<int>();
      if (label.arity == 0) {
        label.emission = as_vector(l.at("emit"));
      } else {
        label.child_dist = as_matrix(l.at("children"));
      }
      grammar.labels.push_back(std::move(label));
    }
    grammar.root = as_vector(doc.at("root"));
    const auto report = validate(grammar);
    if (!report.valid)
      throw DataError("invalid grammar: " + report.violations.front());
    return grammar;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad grammar document: ") + e.what());
  }
}

std::string pcfg_to_json(const Pcfg& grammar) {
  json doc;
  doc["terminals"] = grammar.terminals;
  json labels = json::array();
  for (const auto& l : grammar.labels) {
    json entry;
    entry["name"] = l.name;
    entry["arity"] = l.arity;
    if (l.arity == 0)
      entry["emit"] = l.emission;
    else
      entry["children"] = l.child_dist;
    labels.push_back(std::move(entry));
  }
  doc["labels"] = std::move(labels);
  doc["root"] = grammar.root;
  return doc.dump(2) + "\n";
}

TrackerSpec tracker_from_json(const std::string& text) {
  const json doc = parse(text);
  try {
    const std::string type = doc.at("type").get<std::string>();
    if (type == "hmm") return hmm_from_json(doc.at("model").dump());
    if (type != "clutter_tracker") throw DataError("unknown tracker type: " + type);
    ClutterTrackerSpec spec;
    spec.arena_size = doc.value("arena", spec.arena_size);
    spec.sigma_obs = doc.value("sigma_obs", spec.sigma_obs);
    spec.sigma_accel = doc.value("sigma_accel", spec.sigma_accel);
    spec.clutter_prob = doc.value("clutter_prob", spec.clutter_prob);
    if (doc.contains("init_mean")) {
      const auto v = as_vector(doc.at("init_mean"));
      if (v.size() != 4) throw DataError("init_mean must have 4 entries");
      for (int i = 0; i < 4; ++i) spec.init_mean[i] = v[i];
    }
    spec.init_pos_spread = doc.value("init_pos_spread", spec.init_pos_spread);
    spec.init_vel_spread = doc.value("init_vel_spread", spec.init_vel_spread);
    if (spec.arena_size <= 0.0 || spec.sigma_obs <= 0.0 ||
        spec.clutter_prob < 0.0 || spec.clutter_prob >= 1.0)
      throw DataError("invalid clutter tracker parameters");
    return spec;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad tracker document: ") + e.what());
  }
}

std::string tracker_to_json(const ClutterTrackerSpec& spec) {
  json doc;
  doc["type"] = "clutter_tracker";
  doc["arena"] = spec.arena_size;
  doc["sigma_obs"] = spec.sigma_obs;
  doc["sigma_accel"] = spec.sigma_accel;
  doc["clutter_prob"] = spec.clutter_prob;
  doc["init_mean"] = {spec.init_mean[0], spec.init_mean[1], spec.init_mean[2],
                      spec.init_mean[3]};
  doc["init_pos_spread"] = spec.init_pos_spread;
  doc["init_vel_spread"] = spec.init_vel_spread;
  return doc.dump(2) + "\n";
}

std::string load_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace pt
