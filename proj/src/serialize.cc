#include "foldtree/serialize.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "foldtree/error.h"

namespace foldtree {
namespace {

using nlohmann::json;

json put_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double get_real(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw DataError("bad real '" + s + "'");
  }
  return j.get<double>();
}

json put_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(put_real(v[i]));
  return out;
}

Eigen::VectorXd get_vector(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = get_real(j[i]);
  }
  return v;
}

json put_matrix(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(put_real(m(r, c)));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd get_matrix(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw DataError("matrix size does not match its data");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get_real(data[k++]);
  }
  return m;
}

json put_ulda(const UldaModel& m) {
  return {{"classes", m.classes},
          {"features", m.features},
          {"center", put_vector(m.center)},
          {"transform", put_matrix(m.transform)},
          {"centroids", put_matrix(m.centroids)},
          {"eigenvalues", put_vector(m.eigenvalues)},
          {"within_variance", put_vector(m.within_variance)},
          {"priors", put_vector(m.priors)},
          {"prior_mode", prior_mode_name(m.prior_mode)},
          {"trace", put_real(m.trace)},
          {"n_classes_total", m.n_classes_total}};
}

UldaModel get_ulda(const json& j) {
  UldaModel m;
  m.classes = j.at("classes").get<std::vector<int>>();
  m.features = j.at("features").get<std::vector<int>>();
  m.center = get_vector(j.at("center"));
  m.transform = get_matrix(j.at("transform"));
  m.centroids = get_matrix(j.at("centroids"));
  m.eigenvalues = get_vector(j.at("eigenvalues"));
  m.within_variance = get_vector(j.at("within_variance"));
  m.priors = get_vector(j.at("priors"));
  m.prior_mode = parse_prior_mode(j.at("prior_mode").get<std::string>());
  m.trace = get_real(j.at("trace"));
  m.n_classes_total = j.at("n_classes_total").get<int>();
  const auto q = m.transform.cols();
  if (m.transform.rows() != static_cast<Eigen::Index>(m.features.size()) ||
      m.center.size() != m.transform.rows() ||
      m.centroids.rows() != static_cast<Eigen::Index>(m.classes.size()) ||
      m.centroids.cols() != q || m.within_variance.size() != q ||
      m.priors.size() != static_cast<Eigen::Index>(m.classes.size())) {
    throw DataError("inconsistent discriminant model dimensions");
  }
  return m;
}

json put_imputation(const ImputationRecord& record) {
  json out = json::array();
  for (const auto& column : record.columns) {
    if (const auto* num = std::get_if<NumericImputation>(&column)) {
      out.push_back({{"type", "numeric"},
                     {"constant", put_real(num->constant)},
                     {"indicator", num->indicator},
                     {"root_fallback", num->root_fallback}});
    } else {
      const auto& cat = std::get<CategoricalImputation>(column);
      out.push_back({{"type", "categorical"},
                     {"levels", cat.levels},
                     {"missing_level", cat.missing_level}});
    }
  }
  return out;
}

ImputationRecord get_imputation(const json& j) {
  ImputationRecord record;
  for (const json& column : j) {
    const auto type = column.at("type").get<std::string>();
    if (type == "numeric") {
      NumericImputation num;
      num.constant = get_real(column.at("constant"));
      num.indicator = column.at("indicator").get<bool>();
      num.root_fallback = column.at("root_fallback").get<bool>();
      record.columns.emplace_back(num);
    } else if (type == "categorical") {
      CategoricalImputation cat;
      cat.levels = column.at("levels").get<std::vector<std::string>>();
      cat.missing_level = column.at("missing_level").get<bool>();
      record.columns.emplace_back(std::move(cat));
    } else {
      throw DataError("unknown imputation type '" + type + "'");
    }
  }
  return record;
}

json put_step(const SelectionStep& s) {
  return {{"column", s.column},
          {"gain", put_real(s.gain)},
          {"p_value", put_real(s.p_value)}};
}

SelectionStep get_step(const json& j) {
  return {j.at("column").get<int>(), get_real(j.at("gain")),
          get_real(j.at("p_value"))};
}

json put_node(const TreeNode& node) {
  json out = {{"id", node.id},
              {"depth", node.depth},
              {"parent", node.parent},
              {"n_rows", node.n_rows},
              {"class_counts", node.class_counts},
              {"imputation", put_imputation(node.imputation)},
              {"training_errors", node.training_errors}};
  if (const auto* plurality = std::get_if<PluralityModel>(&node.model)) {
    json proportions = json::array();
    for (double p : plurality->proportions) proportions.push_back(put_real(p));
    out["model"] = {{"kind", "plurality"},
                    {"label", plurality->label},
                    {"proportions", proportions}};
  } else {
    out["model"] = {{"kind", "ulda"},
                    {"ulda", put_ulda(std::get<UldaModel>(node.model))}};
  }
  if (node.selection) {
    json steps = json::array();
    for (const auto& s : node.selection->steps) steps.push_back(put_step(s));
    out["selection"] = {{"steps", steps}};
    if (node.selection->rejected) {
      out["selection"]["rejected"] = put_step(*node.selection->rejected);
    }
  }
  if (node.split) out["split"] = put_ulda(*node.split);
  json children = json::array();
  for (const auto& [cls, child] : node.children) {
    children.push_back({{"class", cls}, {"node", child}});
  }
  out["children"] = children;
  if (node.diagnostics) {
    const SplitDiagnostics& d = *node.diagnostics;
    out["diagnostics"] = {{"n_total", d.strength.n_total},
                          {"n_before", d.strength.n_before},
                          {"n_after", d.strength.n_after},
                          {"z", put_real(d.strength.z)},
                          {"p_value", put_real(d.strength.p_value)},
                          {"predicted_gini", put_real(d.predicted_gini)},
                          {"prior_path", prior_path_name(d.prior_path)},
                          {"accepted", d.accepted}};
  }
  return out;
}

TreeNode get_node(const json& j) {
  TreeNode node;
  node.id = j.at("id").get<int>();
  node.depth = j.at("depth").get<int>();
  node.parent = j.at("parent").get<int>();
  node.n_rows = j.at("n_rows").get<int>();
  node.class_counts = j.at("class_counts").get<std::vector<int>>();
  node.imputation = get_imputation(j.at("imputation"));
  node.training_errors = j.at("training_errors").get<int>();
  const json& model = j.at("model");
  const auto kind = model.at("kind").get<std::string>();
  if (kind == "plurality") {
    PluralityModel plurality;
    plurality.label = model.at("label").get<int>();
    for (const json& p : model.at("proportions")) {
      plurality.proportions.push_back(get_real(p));
    }
    node.model = std::move(plurality);
  } else if (kind == "ulda") {
    node.model = get_ulda(model.at("ulda"));
  } else {
    throw DataError("unknown node model kind '" + kind + "'");
  }
  if (j.contains("selection")) {
    SelectionTrace trace;
    for (const json& s : j["selection"].at("steps")) {
      trace.steps.push_back(get_step(s));
    }
    if (j["selection"].contains("rejected")) {
      trace.rejected = get_step(j["selection"]["rejected"]);
    }
    node.selection = std::move(trace);
  }
  if (j.contains("split")) node.split = get_ulda(j["split"]);
  for (const json& c : j.at("children")) {
    node.children[c.at("class").get<int>()] = c.at("node").get<int>();
  }
  if (j.contains("diagnostics")) {
    const json& d = j["diagnostics"];
    SplitDiagnostics diag;
    diag.strength.n_total = d.at("n_total").get<int>();
    diag.strength.n_before = d.at("n_before").get<int>();
    diag.strength.n_after = d.at("n_after").get<int>();
    diag.strength.z = get_real(d.at("z"));
    diag.strength.p_value = get_real(d.at("p_value"));
    diag.predicted_gini = get_real(d.at("predicted_gini"));
    diag.prior_path = parse_prior_path(d.at("prior_path").get<std::string>());
    diag.accepted = d.at("accepted").get<bool>();
    node.diagnostics = diag;
  }
  return node;
}

json put_config(const GrowthConfig& c) {
  return {{"method", method_name(c.method)},
          {"stopping", stopping_name(c.stopping)},
          {"prestop_threshold", put_real(c.prestop_threshold)},
          {"growth_threshold", put_real(c.growth_threshold)},
          {"forward_alpha", put_real(c.forward_alpha)},
          {"imputation", imputation_policy_name(c.imputation)},
          {"folds", c.folds},
          {"seed", c.seed},
          {"max_depth", c.max_depth},
          {"min_node_size", c.min_node_size}};
}

GrowthConfig get_config(const json& j) {
  GrowthConfig c;
  c.method = parse_method(j.at("method").get<std::string>());
  c.stopping = parse_stopping(j.at("stopping").get<std::string>());
  c.prestop_threshold = get_real(j.at("prestop_threshold"));
  c.growth_threshold = get_real(j.at("growth_threshold"));
  c.forward_alpha = get_real(j.at("forward_alpha"));
  c.imputation =
      parse_imputation_policy(j.at("imputation").get<std::string>());
  c.folds = j.at("folds").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_depth = j.at("max_depth").get<int>();
  c.min_node_size = j.at("min_node_size").get<int>();
  return c;
}

TreeModel parse_document(const json& doc) {
  if (!doc.is_object() || !doc.contains("format") ||
      doc["format"] != kModelFormat) {
    throw DataError("not a foldtree model file");
  }
  const int version = doc.at("version").get<int>();
  if (version != kModelVersion) {
    throw DataError("unsupported model version " + std::to_string(version) +
                    " (expected " + std::to_string(kModelVersion) + ")");
  }
  TreeModel tree;
  for (const json& col : doc.at("schema").at("columns")) {
    tree.schema.push_back({col.at("name").get<std::string>(),
                           parse_column_type(col.at("type").get<std::string>())});
  }
  tree.class_labels =
      doc.at("schema").at("class_labels").get<std::vector<std::string>>();
  tree.config = get_config(doc.at("config"));
  tree.training_accuracy = get_real(doc.at("training_accuracy"));
  for (const json& node : doc.at("nodes")) tree.nodes.push_back(get_node(node));
  if (doc.contains("pruning")) {
    const json& p = doc["pruning"];
    PruningReport report;
    report.folds = p.at("folds").get<int>();
    report.seed = p.at("seed").get<std::uint64_t>();
    report.chosen_leaves = p.at("chosen_leaves").get<int>();
    report.grown_leaves = p.at("grown_leaves").get<int>();
    for (const json& point : p.at("curve")) {
      report.curve.push_back({point.at("leaves").get<int>(),
                              get_real(point.at("accuracy")),
                              get_real(point.at("standard_error"))});
    }
    tree.pruning = std::move(report);
  }
  tree.validate();
  return tree;
}

}  // namespace

std::string model_to_json(const TreeModel& tree) {
  json columns = json::array();
  for (const auto& col : tree.schema) {
    columns.push_back({{"name", col.name}, {"type", column_type_name(col.type)}});
  }
  json nodes = json::array();
  for (const auto& node : tree.nodes) nodes.push_back(put_node(node));
  json doc = {{"format", kModelFormat},
              {"version", kModelVersion},
              {"schema", {{"columns", columns}, {"class_labels", tree.class_labels}}},
              {"config", put_config(tree.config)},
              {"training_accuracy", put_real(tree.training_accuracy)},
              {"nodes", nodes}};
  if (tree.pruning) {
    json curve = json::array();
    for (const auto& point : tree.pruning->curve) {
      curve.push_back({{"leaves", point.leaves},
                       {"accuracy", put_real(point.accuracy)},
                       {"standard_error", put_real(point.standard_error)}});
    }
    doc["pruning"] = {{"folds", tree.pruning->folds},
                      {"seed", tree.pruning->seed},
                      {"chosen_leaves", tree.pruning->chosen_leaves},
                      {"grown_leaves", tree.pruning->grown_leaves},
                      {"curve", curve}};
  }
  return doc.dump(1);
}

TreeModel model_from_json(const std::string& text) {
  try {
    return parse_document(json::parse(text));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kData) throw;
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TreeModel& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << model_to_json(tree) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

TreeModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace foldtree
