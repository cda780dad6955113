#include "metaband/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "metaband/baselines.hpp"
#include "metaband/dtece.hpp"
#include "metaband/ece.hpp"
#include "metaband/error.hpp"
#include "metaband/io.hpp"

namespace metaband {

using nlohmann::json;

namespace {

constexpr double kZ95 = 1.96;

std::string ci_field(const CiPoint& p, double sign) {
  return p.has_ci ? format_double(p.mean + sign * p.half_width) : std::string();
}

}  // namespace

const char* algo_name(Algo a) {
  switch (a) {
    case Algo::ece:
      return "ece";
    case Algo::dtece:
      return "dtece";
    case Algo::mucb:
      return "mucb";
    case Algo::mts:
      return "mts";
    case Algo::oracle:
      return "oracle";
  }
  return "oracle";
}

Algo parse_algo(std::string_view name) {
  for (Algo a : {Algo::ece, Algo::dtece, Algo::mucb, Algo::mts, Algo::oracle}) {
    if (name == algo_name(a)) return a;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (algos.empty()) throw InvalidArgument("experiment: no algorithms");
  if (horizon == 0) throw InvalidArgument("experiment: horizon must be at least 1");
  if (runs == 0) throw InvalidArgument("experiment: runs must be at least 1");
  if (checkpoints == 0) throw InvalidArgument("experiment: need at least one checkpoint");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("experiment: delta must lie in (0, 1)");
}

ExperimentConfig experiment_config_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("experiment config: expected an object");

  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  ExperimentConfig cfg;
  try {
    if (!j.contains("env")) throw ParseError("experiment config: missing 'env'");
    cfg.env_file = resolve(j.at("env").get<std::string>());
    cfg.env_name = j.value("env_name", cfg.env_file.stem().string());
    for (const auto& a : j.at("algos")) cfg.algos.push_back(parse_algo(a.get<std::string>()));
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.runs = j.value("runs", cfg.runs);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.tasks = j.value("tasks", cfg.tasks);
    cfg.sup_over_tasks = j.value("sup_over_tasks", cfg.sup_over_tasks);
    cfg.realized = j.value("realized", cfg.realized);
    cfg.checkpoints = j.value("checkpoints", cfg.checkpoints);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.delta = j.value("delta", cfg.delta);
    if (j.contains("ece_lambda")) cfg.ece_lambda = j.at("ece_lambda").get<double>();
    if (j.contains("ece_n_cls")) cfg.ece_n_cls = j.at("ece_n_cls").get<std::size_t>();
    if (j.contains("lambda")) cfg.sep_lambda = j.at("lambda").get<double>();
    if (j.contains("tree_lambda")) cfg.tree_lambda = j.at("tree_lambda").get<double>();
    if (j.contains("gap")) cfg.gap = j.at("gap").get<double>();
    if (j.contains("n_est")) cfg.n_est = j.at("n_est").get<std::size_t>();
    if (j.contains("n_cls")) cfg.n_cls = j.at("n_cls").get<std::size_t>();
    cfg.short_constant = j.value("short_constant", cfg.short_constant);
    cfg.exact_estimate = j.value("exact_estimate", cfg.exact_estimate);
    if (j.contains("tree")) cfg.tree_file = resolve(j.at("tree").get<std::string>());
    if (j.contains("est")) cfg.est_file = resolve(j.at("est").get<std::string>());
    if (j.contains("out_csv")) cfg.csv_out = resolve(j.at("out_csv").get<std::string>());
    if (j.contains("out_aggregate")) cfg.aggregate_out = resolve(j.at("out_aggregate").get<std::string>());
    if (j.contains("out_summary")) cfg.summary_out = resolve(j.at("out_summary").get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<std::size_t> log_checkpoints(std::size_t horizon, std::size_t count) {
  if (horizon == 0 || count == 0) return {};
  const std::size_t n = std::min(count, horizon);
  std::vector<std::size_t> out;
  out.reserve(n);
  std::size_t prev = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double frac = n == 1 ? 1.0 : static_cast<double>(j) / static_cast<double>(n - 1);
    const auto target = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(horizon), frac)));
    // Leave room for the remaining checkpoints below the horizon.
    const std::size_t step = std::min(std::max(prev + 1, target), horizon - (n - 1 - j));
    out.push_back(step);
    prev = step;
  }
  return out;
}

std::uint64_t run_seed(std::uint64_t base, Algo algo, std::size_t task, std::size_t run) {
  std::uint64_t h = hash_combine(0, algo_name(algo));
  h = hash_combine(h, std::to_string(task));
  h = hash_combine(h, std::to_string(run));
  return base ^ h;
}

CiPoint aggregate_point(std::span<const double> values) {
  CiPoint p;
  p.n = values.size();
  if (values.empty()) return p;
  double sum = 0.0;
  for (double v : values) sum += v;
  p.mean = sum / static_cast<double>(p.n);
  if (p.n < 2) return p;
  double ss = 0.0;
  for (double v : values) ss += (v - p.mean) * (v - p.mean);
  const double sd = std::sqrt(ss / static_cast<double>(p.n - 1));
  p.half_width = kZ95 * sd / std::sqrt(static_cast<double>(p.n));
  p.has_ci = true;
  return p;
}

MetaTrainResult prepare_dtece(const BanditCollection& coll, const ExperimentConfig& cfg) {
  const double lambda = cfg.sep_lambda.value_or(coll.lambda());
  const double tree_lambda = cfg.tree_lambda.value_or(lambda / 2.0);
  if (cfg.tree_file || cfg.est_file) {
    if (!cfg.tree_file || !cfg.est_file) throw InvalidArgument("dtece: tree and estimate files go together");
    MetaTrainResult m;
    m.tree = load_tree(*cfg.tree_file);
    m.estimate = load_estimate(*cfg.est_file);
    m.n_est = m.estimate.n_est;
    m.lambda = lambda;
    m.tree_lambda = m.tree.root().is_leaf ? tree_lambda : m.tree.root().lambda;
    m.total_samples = static_cast<std::uint64_t>(m.estimate.tasks) * m.estimate.arms * m.n_est;
    if (m.estimate.tasks != coll.num_tasks() || m.estimate.arms != coll.num_arms()) {
      throw InvalidArgument("dtece: estimate does not match the environment");
    }
    return m;
  }
  if (cfg.exact_estimate) {
    MetaTrainResult m;
    m.estimate = exact_estimate(coll);
    m.lambda = lambda;
    m.tree_lambda = tree_lambda;
    m.tree = build_tree(coll.mean_table(), tree_lambda);
    return m;
  }
  MetaTrainConfig mc;
  mc.horizon = cfg.horizon;
  mc.gap = cfg.gap.value_or(coll.min_action_gap());
  mc.lambda = lambda;
  mc.tree_lambda = tree_lambda;
  mc.sigma = coll.noise_scale();
  mc.seed = cfg.seed;
  mc.n_est = cfg.n_est;
  return meta_train(simulators_for(coll), mc);
}

RegretTrace run_trial(const BanditCollection& coll, Algo algo, std::size_t task, std::size_t run,
                      const ExperimentConfig& cfg, const MetaTrainResult* meta) {
  RegretTrace trace;
  trace.algo = algo;
  trace.task = task;
  trace.run = run;
  trace.seed = run_seed(cfg.seed, algo, task, run);
  Rng rng(trace.seed);

  Episode ep;
  switch (algo) {
    case Algo::ece: {
      EceConfig ec;
      ec.delta = cfg.delta;
      ec.lambda = cfg.ece_lambda.value_or(implied_hellinger_level(coll));
      ec.n_cls = cfg.ece_n_cls;
      ep = run_ece(coll, task, ec, cfg.horizon, rng).episode;
      trace.misclassified = ep.classified != task;
      break;
    }
    case Algo::dtece: {
      if (meta == nullptr) throw InvalidArgument("run_trial: dtece needs a meta-trained tree");
      DtEceConfig dc;
      dc.horizon = cfg.horizon;
      dc.n_cls = cfg.n_cls;
      dc.short_constant = cfg.short_constant;
      dc.lambda = meta->lambda;
      ep = run_dtece(coll, task, meta->tree, meta->estimate, dc, rng).episode;
      trace.misclassified = ep.classified != task;
      break;
    }
    case Algo::mucb:
      ep = run_mucb(coll, task, cfg.horizon, rng);
      break;
    case Algo::mts:
      ep = run_mts(coll, task, cfg.horizon, rng);
      break;
    case Algo::oracle:
      for (std::size_t t = 0; t < cfg.horizon; ++t) {
        const std::size_t c = coll.context().sample_index(rng);
        const std::size_t arm = coll.best_arm_at(task, c);
        ep.steps.push_back({c, arm, sample_reward(coll.instance(task), coll.context().at(c), arm, rng), Phase::play});
      }
      break;
  }
  trace.classification_pulls = ep.classification_pulls;
  trace.truncated = ep.truncated;

  trace.cum.reserve(ep.steps.size());
  double total = 0.0;
  for (const Step& s : ep.steps) {
    if (cfg.realized) {
      total += coll.mean_at(task, s.context, coll.best_arm_at(task, s.context)) - s.reward;
    } else {
      total += pseudo_regret_step(coll, task, s.context, s.arm);
    }
    trace.cum.push_back(total);
  }
  return trace;
}

Experiment run_experiment(const BanditCollection& coll, const ExperimentConfig& cfg) {
  cfg.validate();
  Experiment exp;
  exp.config = cfg;
  if (exp.config.env_name.empty()) exp.config.env_name = cfg.env_file.empty() ? "env" : cfg.env_file.stem().string();
  exp.tasks = cfg.tasks;
  if (exp.tasks.empty()) {
    for (std::size_t i = 0; i < coll.num_tasks(); ++i) exp.tasks.push_back(i);
  }
  for (std::size_t t : exp.tasks) {
    if (t >= coll.num_tasks()) throw InvalidArgument("experiment: task " + std::to_string(t) + " out of range");
  }
  exp.checkpoints = log_checkpoints(cfg.horizon, cfg.checkpoints);
  if (std::find(cfg.algos.begin(), cfg.algos.end(), Algo::dtece) != cfg.algos.end()) {
    exp.meta = prepare_dtece(coll, cfg);
  }

  struct Job {
    Algo algo;
    std::size_t task;
    std::size_t run;
  };
  std::vector<Job> jobs;
  for (Algo a : cfg.algos) {
    for (std::size_t t : exp.tasks) {
      for (std::size_t r = 0; r < cfg.runs; ++r) jobs.push_back({a, t, r});
    }
  }

  std::vector<std::optional<RegretTrace>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size() && !failed; j = next++) {
      try {
        results[j] = run_trial(coll, jobs[j].algo, jobs[j].task, jobs[j].run, exp.config,
                               exp.meta ? &*exp.meta : nullptr);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (auto& r : results) {
    if (r) exp.traces.push_back(std::move(*r));
  }
  if (error) {
    // Keep what finished.
    if (cfg.csv_out) write_text(*cfg.csv_out, exp.csv());
    std::rethrow_exception(error);
  }
  return exp;
}

Experiment run_experiment(const ExperimentConfig& cfg) {
  const BanditCollection coll = load_collection(cfg.env_file);
  return run_experiment(coll, cfg);
}

std::vector<Curve> Experiment::curves() const {
  std::vector<Curve> out;
  for (Algo a : config.algos) {
    std::vector<Curve> per_task;
    for (std::size_t t : tasks) {
      std::vector<const RegretTrace*> group;
      for (const auto& tr : traces) {
        if (tr.algo == a && tr.task == t) group.push_back(&tr);
      }
      if (group.empty()) continue;
      Curve c{a, t, {}};
      std::vector<double> vals(group.size());
      for (std::size_t step : checkpoints) {
        for (std::size_t g = 0; g < group.size(); ++g) vals[g] = group[g]->cum[step - 1];
        c.points.push_back({step, aggregate_point(vals), t});
      }
      per_task.push_back(std::move(c));
    }
    if (config.sup_over_tasks && !per_task.empty()) {
      Curve worst{a, std::nullopt, per_task.front().points};
      for (std::size_t p = 0; p < worst.points.size(); ++p) {
        for (const Curve& c : per_task) {
          if (c.points[p].ci.mean > worst.points[p].ci.mean) worst.points[p] = c.points[p];
        }
      }
      out.insert(out.end(), per_task.begin(), per_task.end());
      out.push_back(std::move(worst));
    } else {
      out.insert(out.end(), per_task.begin(), per_task.end());
    }
  }
  return out;
}

std::string Experiment::csv() const {
  std::string s = "algo,env,task,run,step,cum_regret\n";
  for (const auto& tr : traces) {
    const std::string prefix = std::string(algo_name(tr.algo)) + "," + config.env_name + "," +
                               std::to_string(tr.task) + "," + std::to_string(tr.run) + ",";
    for (std::size_t step : checkpoints) {
      s += prefix;
      s += std::to_string(step);
      s += ',';
      s += format_double(tr.cum[step - 1]);
      s += '\n';
    }
  }
  return s;
}

std::string Experiment::aggregate_csv() const {
  std::string s = "algo,env,task,step,mean,ci_low,ci_high,n\n";
  for (const Curve& c : curves()) {
    const std::string task = c.task ? std::to_string(*c.task) : std::string("worst");
    for (const CurvePoint& p : c.points) {
      s += std::string(algo_name(c.algo)) + "," + config.env_name + "," + task + "," + std::to_string(p.step) + "," +
           format_double(p.ci.mean) + "," + ci_field(p.ci, -1.0) + "," + ci_field(p.ci, 1.0) + "," +
           std::to_string(p.ci.n) + "\n";
    }
  }
  return s;
}

std::string Experiment::summary_json() const {
  auto ci_json = [](const CiPoint& p) {
    json j{{"mean", p.mean}, {"n", p.n}};
    if (p.has_ci) {
      j["ci_half_width"] = p.half_width;
    } else {
      j["ci_half_width"] = nullptr;
      j["single_trace"] = true;
    }
    return j;
  };

  json groups = json::array();
  json worst = json::array();
  for (const Curve& c : curves()) {
    if (!c.task) {
      worst.push_back({{"algo", algo_name(c.algo)},
                       {"final", ci_json(c.points.back().ci)},
                       {"task", c.points.back().task}});
      continue;
    }
    std::size_t pulls_sum = 0;
    std::size_t pulls_max = 0;
    std::size_t mis = 0;
    std::size_t trunc = 0;
    std::size_t n = 0;
    for (const auto& tr : traces) {
      if (tr.algo != c.algo || tr.task != *c.task) continue;
      ++n;
      pulls_sum += tr.classification_pulls;
      pulls_max = std::max(pulls_max, tr.classification_pulls);
      mis += tr.misclassified ? 1 : 0;
      trunc += tr.truncated ? 1 : 0;
    }
    groups.push_back({{"algo", algo_name(c.algo)},
                      {"task", *c.task},
                      {"final", ci_json(c.points.back().ci)},
                      {"classification_pulls_mean", static_cast<double>(pulls_sum) / static_cast<double>(n)},
                      {"classification_pulls_max", pulls_max},
                      {"misclassified", mis},
                      {"truncated", trunc}});
  }

  json j{{"env", config.env_name},
         {"horizon", config.horizon},
         {"runs", config.runs},
         {"seed", config.seed},
         {"realized", config.realized},
         {"groups", groups}};
  if (config.sup_over_tasks) j["worst_case"] = worst;
  if (meta) {
    j["meta_train"] = {{"n_est", meta->n_est},
                       {"total_samples", meta->total_samples},
                       {"lambda", meta->lambda},
                       {"tree_lambda", meta->tree_lambda},
                       {"tree_depth", meta->tree.depth()},
                       {"tree_leaves", meta->tree.num_leaves()}};
  }
  return j.dump(2) + "\n";
}

void Experiment::write_outputs() const {
  if (config.csv_out) write_text(*config.csv_out, csv());
  if (config.aggregate_out) write_text(*config.aggregate_out, aggregate_csv());
  if (config.summary_out) write_text(*config.summary_out, summary_json());
}

}  // namespace metaband
