#include "metaband/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "metaband/error.hpp"

namespace metaband {

using nlohmann::json;

namespace {

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

// Field access with the document name in the error message.
template <typename T>
T get(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

json noise_to_json(const Noise& n) {
  if (n.kind == NoiseKind::bernoulli) return "bernoulli";
  return json{{"gaussian", n.sigma}};
}

Noise noise_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "bernoulli") return Noise::bernoulli();
  if (j.is_object() && j.contains("gaussian") && j.at("gaussian").is_number()) {
    return Noise::gaussian(j.at("gaussian").get<double>());
  }
  throw ParseError("collection: noise must be \"bernoulli\" or {\"gaussian\": sigma}");
}

json node_to_json(const DecisionTree& tree, std::size_t idx) {
  const TreeNode& n = tree.node(idx);
  json j;
  if (n.is_leaf) {
    j["leaf"] = n.task;
  } else {
    j["arm"] = n.arm;
    j["threshold"] = n.threshold;
    j["lambda"] = n.lambda;
    j["true"] = node_to_json(tree, static_cast<std::size_t>(n.true_child));
    j["false"] = node_to_json(tree, static_cast<std::size_t>(n.false_child));
  }
  j["tasks"] = n.tasks;
  return j;
}

int node_from_json(const json& j, std::vector<TreeNode>& nodes, std::size_t depth) {
  constexpr const char* what = "tree";
  if (depth > 64) throw ParseError("tree: nesting deeper than 64 levels");
  if (!j.is_object()) throw ParseError("tree: node must be an object");
  const int idx = static_cast<int>(nodes.size());
  nodes.emplace_back();
  TreeNode n;
  if (j.contains("tasks")) n.tasks = get<std::vector<std::size_t>>(j, "tasks", what);
  if (j.contains("leaf")) {
    n.task = get<std::size_t>(j, "leaf", what);
    if (n.tasks.empty()) n.tasks = {n.task};
    nodes[static_cast<std::size_t>(idx)] = std::move(n);
    return idx;
  }
  n.is_leaf = false;
  n.arm = get<std::size_t>(j, "arm", what);
  n.threshold = get<double>(j, "threshold", what);
  n.lambda = get<double>(j, "lambda", what);
  if (!j.contains("true") || !j.contains("false")) throw ParseError("tree: internal node needs 'true' and 'false'");
  nodes[static_cast<std::size_t>(idx)] = n;
  const int t = node_from_json(j.at("true"), nodes, depth + 1);
  const int f = node_from_json(j.at("false"), nodes, depth + 1);
  nodes[static_cast<std::size_t>(idx)].true_child = t;
  nodes[static_cast<std::size_t>(idx)].false_child = f;
  return idx;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string collection_to_json(const BanditCollection& coll) {
  json instances = json::array();
  for (const auto& inst : coll.instances()) {
    json noise = json::array();
    for (const auto& n : inst.noise) noise.push_back(noise_to_json(n));
    // A single entry stands for "same noise on every arm".
    const bool uniform = std::all_of(inst.noise.begin(), inst.noise.end(),
                                     [&](const Noise& n) { return n == inst.noise.front(); });
    instances.push_back({{"theta", inst.theta}, {"noise", uniform ? noise.front() : noise}});
  }
  json j{{"M", coll.num_tasks()},
         {"K", coll.num_arms()},
         {"d", coll.dim()},
         {"lambda", coll.lambda()},
         {"context", {{"support", coll.context().support()}, {"weights", coll.context().weights()}}},
         {"instances", instances}};
  return j.dump(2) + "\n";
}

BanditCollection collection_from_json(std::string_view text) {
  constexpr const char* what = "collection";
  const json j = parse(text, what);
  const auto m = get<std::size_t>(j, "M", what);
  const auto k = get<std::size_t>(j, "K", what);
  const auto d = get<std::size_t>(j, "d", what);
  const auto lambda = get<double>(j, "lambda", what);

  const json ctx = j.contains("context") ? j.at("context") : json{{"support", {{1.0}}}, {"weights", {1.0}}};
  auto support = get<std::vector<Vector>>(ctx, "support", what);
  auto weights = get<std::vector<double>>(ctx, "weights", what);
  ContextDistribution dist(std::move(support), std::move(weights));
  if (dist.dim() != d) throw ParseError("collection: context dimension differs from d");

  const auto& arr = j.contains("instances") ? j.at("instances") : throw ParseError("collection: missing 'instances'");
  if (!arr.is_array() || arr.size() != m) throw ParseError("collection: expected M instances");
  std::vector<BanditInstance> instances;
  for (const auto& item : arr) {
    BanditInstance inst;
    inst.theta = get<std::vector<Vector>>(item, "theta", what);
    if (inst.theta.size() != k) throw ParseError("collection: expected K theta rows per instance");
    for (const auto& row : inst.theta) {
      if (row.size() != d) throw ParseError("collection: theta row length differs from d");
    }
    const json noise = item.contains("noise") ? item.at("noise") : json("bernoulli");
    if (noise.is_array()) {
      if (noise.size() != k) throw ParseError("collection: noise list must have K entries");
      for (const auto& n : noise) inst.noise.push_back(noise_from_json(n));
    } else {
      inst.noise.assign(k, noise_from_json(noise));
    }
    instances.push_back(std::move(inst));
  }
  return BanditCollection(std::move(instances), std::move(dist), lambda);
}

std::string estimate_to_json(const EstimatedCollection& est) {
  json theta = json::array();
  json mu = json::array();
  for (std::size_t i = 0; i < est.tasks; ++i) {
    json trow = json::array();
    json mrow = json::array();
    for (std::size_t a = 0; a < est.arms; ++a) {
      trow.push_back(est.theta_hat(i, a));
      mrow.push_back(est.mu_hat(i, a));
    }
    theta.push_back(std::move(trow));
    mu.push_back(std::move(mrow));
  }
  json j{{"M", est.tasks}, {"K", est.arms},      {"d", est.dim}, {"n_est", est.n_est},
         {"seed", est.seed}, {"theta", theta}, {"mu", mu}};
  return j.dump(2) + "\n";
}

EstimatedCollection estimate_from_json(std::string_view text) {
  constexpr const char* what = "estimate";
  const json j = parse(text, what);
  EstimatedCollection est;
  est.tasks = get<std::size_t>(j, "M", what);
  est.arms = get<std::size_t>(j, "K", what);
  est.dim = get<std::size_t>(j, "d", what);
  est.n_est = j.contains("n_est") ? get<std::size_t>(j, "n_est", what) : 0;
  est.seed = j.contains("seed") ? get<std::uint64_t>(j, "seed", what) : 0;
  const auto theta = get<std::vector<std::vector<Vector>>>(j, "theta", what);
  const auto mu = get<std::vector<std::vector<double>>>(j, "mu", what);
  if (theta.size() != est.tasks || mu.size() != est.tasks) throw ParseError("estimate: expected M rows");
  for (std::size_t i = 0; i < est.tasks; ++i) {
    if (theta[i].size() != est.arms || mu[i].size() != est.arms) throw ParseError("estimate: expected K columns");
    for (std::size_t a = 0; a < est.arms; ++a) {
      est.theta.push_back(theta[i][a]);
      est.mu.push_back(mu[i][a]);
    }
  }
  try {
    est.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return est;
}

std::string tree_to_json(const DecisionTree& tree) {
  if (tree.empty()) throw InvalidArgument("tree_to_json: empty tree");
  return node_to_json(tree, 0).dump(2) + "\n";
}

DecisionTree tree_from_json(std::string_view text) {
  std::vector<TreeNode> nodes;
  node_from_json(parse(text, "tree"), nodes, 0);
  return DecisionTree(std::move(nodes));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace metaband
