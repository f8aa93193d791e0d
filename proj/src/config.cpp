#include "byzpg/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace byzpg {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config: field '" + field + "' " + why);
}

void check_known_keys(const json& obj, const std::string& scope,
                      const std::set<std::string>& known) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key()))
      bad_field(scope.empty() ? item.key() : scope + "." + item.key(), "is not a recognized key");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::string env_kind_name(EnvConfig::Kind k) {
  return k == EnvConfig::Kind::cartpole ? "cartpole" : "chain";
}

EnvConfig::Kind parse_env_kind(const std::string& s) {
  if (s == "cartpole") return EnvConfig::Kind::cartpole;
  if (s == "chain") return EnvConfig::Kind::chain;
  bad_field("env.kind", "must be 'cartpole' or 'chain'");
}

AlgorithmKind parse_algorithm(const std::string& s) {
  if (s == "page_pg") return AlgorithmKind::page_pg;
  if (s == "fed_page_pg") return AlgorithmKind::fed_page_pg;
  if (s == "dec_page_pg") return AlgorithmKind::dec_page_pg;
  if (s == "byz_pg") return AlgorithmKind::byz_pg;
  if (s == "dec_byz_pg") return AlgorithmKind::dec_byz_pg;
  bad_field("algorithm.kind", "must be one of page_pg, fed_page_pg, dec_page_pg, byz_pg, dec_byz_pg");
}

AggregatorKind parse_aggregator(const std::string& s) {
  if (s == "mean") return AggregatorKind::mean;
  if (s == "krum") return AggregatorKind::krum;
  if (s == "rfa") return AggregatorKind::rfa;
  if (s == "bucketed_krum") return AggregatorKind::bucketed_krum;
  if (s == "bucketed_rfa") return AggregatorKind::bucketed_rfa;
  bad_field("aggregator.kind", "must be one of mean, krum, rfa, bucketed_krum, bucketed_rfa");
}

AgreementKind parse_agreement(const std::string& s) {
  if (s == "none") return AgreementKind::none;
  if (s == "mda") return AgreementKind::mda;
  if (s == "gda") return AgreementKind::gda;
  bad_field("agreement.kind", "must be one of none, mda, gda");
}

AttackKind parse_attack(const std::string& s) {
  if (s == "none") return AttackKind::none;
  if (s == "random_action") return AttackKind::random_action;
  if (s == "large_noise") return AttackKind::large_noise;
  if (s == "avg_zero") return AttackKind::avg_zero;
  bad_field("adversary.attack", "must be one of none, random_action, large_noise, avg_zero");
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "plain_ascent") return OptimizerKind::plain_ascent;
  if (s == "adam") return OptimizerKind::adam;
  bad_field("algorithm.optimizer", "must be 'plain_ascent' or 'adam'");
}

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "reinforce") return EstimatorKind::reinforce;
  if (s == "gpomdp") return EstimatorKind::gpomdp;
  bad_field("algorithm.estimator", "must be 'reinforce' or 'gpomdp'");
}

ChainOracleSpec chain_from_json(const json& j) {
  ChainOracleSpec spec;
  check_known_keys(j, "env.chain", {"states", "actions", "horizon", "discount", "reward_bound",
                                    "init", "transition", "reward"});
  spec.n_states = j.at("states").get<int>();
  spec.n_actions = j.at("actions").get<int>();
  spec.horizon = j.at("horizon").get<int>();
  spec.discount = j.at("discount").get<double>();
  spec.reward_bound = j.at("reward_bound").get<double>();
  spec.init_dist = j.at("init").get<std::vector<double>>();
  spec.transition = j.at("transition").get<std::vector<std::vector<std::vector<double>>>>();
  spec.reward = j.at("reward").get<std::vector<std::vector<double>>>();
  spec.validate();
  return spec;
}

json chain_to_json(const ChainOracleSpec& spec) {
  json j;
  j["states"] = spec.n_states;
  j["actions"] = spec.n_actions;
  j["horizon"] = spec.horizon;
  j["discount"] = spec.discount;
  j["reward_bound"] = spec.reward_bound;
  j["init"] = spec.init_dist;
  j["transition"] = spec.transition;
  j["reward"] = spec.reward;
  return j;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.env.kind = EnvConfig::Kind::cartpole;
  cfg.env.horizon = 500;
  cfg.env.discount = 0.999;
  cfg.policy.architecture = PolicyArch::mlp;
  cfg.policy.hidden_sizes = {16, 16};
  cfg.policy.hidden_activation = Activation::relu;
  cfg.policy.output_activation = OutputActivation::tanh;
  cfg.policy.input_dim = 4;
  cfg.policy.action_count = 2;
  cfg.algo.algorithm = AlgorithmKind::dec_byz_pg;
  cfg.algo.agents = 5;
  cfg.algo.large_batch = 50;
  cfg.algo.small_batch = 4;
  cfg.algo.switch_prob = 0.2;
  cfg.algo.step_size = 5e-3;
  cfg.algo.iterations = 200;
  cfg.algo.optimizer = OptimizerKind::adam;
  cfg.aggregator.kind = AggregatorKind::bucketed_rfa;
  cfg.agreement.kind = AgreementKind::mda;
  cfg.agreement.rounds = 4;
  cfg.adversary.attack = AttackKind::none;
  cfg.adversary.byzantine_count = 0;
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  ExperimentConfig cfg = default_config();
  std::string trimmed = json_text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (trimmed.empty()) {
    validate(cfg);
    return cfg;
  }
  json root = json::parse(json_text);
  check_known_keys(root, "", {"env", "policy", "algorithm", "aggregator", "agreement", "adversary",
                              "runs", "seed", "metric_every", "out", "max_traj_per_agent",
                              "track_checkpoints"});

  if (root.contains("env")) {
    const json& e = root["env"];
    check_known_keys(e, "env", {"kind", "horizon", "discount", "chain_table", "chain"});
    std::string kind = env_kind_name(cfg.env.kind);
    read(e, "kind", kind);
    cfg.env.kind = parse_env_kind(kind);
    read(e, "horizon", cfg.env.horizon);
    read(e, "discount", cfg.env.discount);
    read(e, "chain_table", cfg.env.chain_table);
    if (e.contains("chain")) cfg.env.chain_inline = chain_from_json(e["chain"]);
  }
  if (root.contains("policy")) {
    const json& p = root["policy"];
    check_known_keys(p, "policy", {"architecture", "hidden", "activation", "output_activation",
                                   "input_dim", "action_count"});
    if (p.contains("architecture")) {
      const std::string a = p["architecture"].get<std::string>();
      if (a == "linear") {
        cfg.policy.architecture = PolicyArch::linear;
        cfg.policy.hidden_sizes.clear();
      } else if (a == "mlp") {
        cfg.policy.architecture = PolicyArch::mlp;
      } else {
        bad_field("policy.architecture", "must be 'linear' or 'mlp'");
      }
    }
    if (p.contains("hidden")) cfg.policy.hidden_sizes = p["hidden"].get<std::vector<int>>();
    if (p.contains("activation")) {
      const std::string a = p["activation"].get<std::string>();
      if (a == "relu") cfg.policy.hidden_activation = Activation::relu;
      else if (a == "tanh") cfg.policy.hidden_activation = Activation::tanh;
      else bad_field("policy.activation", "must be 'relu' or 'tanh'");
    }
    if (p.contains("output_activation")) {
      const std::string a = p["output_activation"].get<std::string>();
      if (a == "identity") cfg.policy.output_activation = OutputActivation::identity;
      else if (a == "tanh") cfg.policy.output_activation = OutputActivation::tanh;
      else bad_field("policy.output_activation", "must be 'identity' or 'tanh'");
    }
    read(p, "input_dim", cfg.policy.input_dim);
    read(p, "action_count", cfg.policy.action_count);
  }
  if (root.contains("algorithm")) {
    const json& a = root["algorithm"];
    check_known_keys(a, "algorithm",
                     {"kind", "agents", "N", "B", "p", "eta", "T", "optimizer", "estimator",
                      "adam_beta1", "adam_beta2", "adam_eps", "baseline", "baseline_values"});
    if (a.contains("kind")) cfg.algo.algorithm = parse_algorithm(a["kind"].get<std::string>());
    read(a, "agents", cfg.algo.agents);
    read(a, "N", cfg.algo.large_batch);
    read(a, "B", cfg.algo.small_batch);
    read(a, "p", cfg.algo.switch_prob);
    read(a, "eta", cfg.algo.step_size);
    read(a, "T", cfg.algo.iterations);
    if (a.contains("optimizer")) cfg.algo.optimizer = parse_optimizer(a["optimizer"].get<std::string>());
    if (a.contains("estimator")) cfg.algo.estimator = parse_estimator(a["estimator"].get<std::string>());
    read(a, "adam_beta1", cfg.algo.adam.beta1);
    read(a, "adam_beta2", cfg.algo.adam.beta2);
    read(a, "adam_eps", cfg.algo.adam.eps);
    if (a.contains("baseline")) {
      const std::string b = a["baseline"].get<std::string>();
      if (b == "zero") cfg.algo.baseline.mode = BaselineConfig::Mode::zero;
      else if (b == "constant") cfg.algo.baseline.mode = BaselineConfig::Mode::constant;
      else if (b == "per_step_constant") cfg.algo.baseline.mode = BaselineConfig::Mode::per_step_constant;
      else bad_field("algorithm.baseline", "must be zero, constant or per_step_constant");
    }
    if (a.contains("baseline_values"))
      cfg.algo.baseline.values = a["baseline_values"].get<std::vector<double>>();
  }
  if (root.contains("aggregator")) {
    const json& g = root["aggregator"];
    check_known_keys(g, "aggregator",
                     {"kind", "alpha", "alpha_max", "weiszfeld_iters", "weiszfeld_smoothing"});
    if (g.contains("kind")) cfg.aggregator.kind = parse_aggregator(g["kind"].get<std::string>());
    // unset alpha/alpha_max are filled by validate from f/K and the mode
    cfg.aggregator.alpha = g.contains("alpha") ? g["alpha"].get<double>() : -1.0;
    cfg.aggregator.alpha_max = g.contains("alpha_max") ? g["alpha_max"].get<double>() : 0.0;
    read(g, "weiszfeld_iters", cfg.aggregator.weiszfeld_iters);
    read(g, "weiszfeld_smoothing", cfg.aggregator.weiszfeld_smoothing);
  } else {
    cfg.aggregator.alpha = -1.0;
    cfg.aggregator.alpha_max = 0.0;
  }
  if (root.contains("agreement")) {
    const json& g = root["agreement"];
    check_known_keys(g, "agreement", {"kind", "rounds", "alpha_bar", "mda_subset_cap"});
    if (g.contains("kind")) cfg.agreement.kind = parse_agreement(g["kind"].get<std::string>());
    read(g, "rounds", cfg.agreement.rounds);
    if (g.contains("alpha_bar")) cfg.agreement.alpha_bar = g["alpha_bar"].get<double>();
    else cfg.agreement.alpha_bar = -1.0;  // filled by validate
    read(g, "mda_subset_cap", cfg.agreement.mda_subset_cap);
  } else {
    cfg.agreement.alpha_bar = -1.0;
  }
  if (root.contains("adversary")) {
    const json& v = root["adversary"];
    check_known_keys(v, "adversary", {"attack", "f", "selection", "noise_std"});
    if (v.contains("attack")) cfg.adversary.attack = parse_attack(v["attack"].get<std::string>());
    read(v, "f", cfg.adversary.byzantine_count);
    if (v.contains("selection")) {
      const std::string s = v["selection"].get<std::string>();
      if (s == "static") cfg.adversary.selection = ByzSelection::static_set;
      else if (s == "per_round") cfg.adversary.selection = ByzSelection::per_round;
      else bad_field("adversary.selection", "must be 'static' or 'per_round'");
    }
    read(v, "noise_std", cfg.adversary.noise_std);
  }
  read(root, "runs", cfg.runs);
  read(root, "seed", cfg.seed);
  read(root, "metric_every", cfg.metric_every);
  read(root, "out", cfg.out_dir);
  read(root, "max_traj_per_agent", cfg.max_traj_per_agent);
  read(root, "track_checkpoints", cfg.track_checkpoints);

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(ExperimentConfig& cfg) {
  // environment
  if (cfg.env.horizon < 1) bad_field("env.horizon", "must be >= 1");
  if (!(cfg.env.discount > 0.0 && cfg.env.discount < 1.0)) bad_field("env.discount", "must be in (0,1)");
  if (cfg.env.kind == EnvConfig::Kind::chain) {
    if (!cfg.env.chain_inline && cfg.env.chain_table.empty())
      bad_field("env.chain_table", "is required for the chain environment");
  }

  // policy dims always follow the environment
  if (cfg.env.kind == EnvConfig::Kind::cartpole) {
    cfg.policy.input_dim = 4;
    cfg.policy.action_count = 2;
  } else if (cfg.env.chain_inline) {
    cfg.policy.input_dim = cfg.env.chain_inline->n_states;
    cfg.policy.action_count = cfg.env.chain_inline->n_actions;
  } else {
    const ChainOracleSpec spec = load_chain_spec(cfg.env.chain_table);
    cfg.policy.input_dim = spec.n_states;
    cfg.policy.action_count = spec.n_actions;
  }
  if (cfg.policy.architecture == PolicyArch::linear && !cfg.policy.hidden_sizes.empty())
    bad_field("policy.hidden", "must be empty for the linear architecture");
  if (cfg.policy.hidden_sizes.size() > 2) bad_field("policy.hidden", "supports at most two layers");

  // algorithm
  const AlgoConfig& a = cfg.algo;
  if (a.agents < 1) bad_field("algorithm.agents", "must be >= 1");
  if (a.algorithm == AlgorithmKind::page_pg && a.agents != 1)
    bad_field("algorithm.agents", "must be 1 for page_pg");
  if (a.small_batch < 1 || a.small_batch > a.large_batch)
    bad_field("algorithm.B", "must satisfy 1 <= B <= N");
  if (!(a.switch_prob > 0.0 && a.switch_prob <= 1.0)) bad_field("algorithm.p", "must be in (0,1]");
  if (!(a.step_size > 0.0)) bad_field("algorithm.eta", "must be positive");
  if (a.iterations < 1) bad_field("algorithm.T", "must be >= 1");

  // adversary vs mode cap
  const bool dec = is_decentralized(a.algorithm);
  const double mode_alpha_max = dec ? 0.25 : 0.5;
  const int f = cfg.adversary.byzantine_count;
  if (f < 0) bad_field("adversary.f", "must be nonnegative");
  if (a.algorithm == AlgorithmKind::page_pg && f > 0)
    bad_field("adversary.f", "must be 0 for the single-agent algorithm");
  const double frac = static_cast<double>(f) / static_cast<double>(a.agents);
  if (f > 0 && frac >= mode_alpha_max) {
    std::ostringstream why;
    why << "gives f/K = " << frac << " >= " << mode_alpha_max
        << (dec ? " (decentralized cap 1/4)" : " (centralized cap 1/2)");
    bad_field("adversary.f", why.str());
  }
  if (cfg.adversary.noise_std < 0.0) bad_field("adversary.noise_std", "must be >= 0 (0 = auto)");

  // aggregator: fill alpha from f/K and alpha_max from the mode when unset
  if (cfg.aggregator.alpha < 0.0) cfg.aggregator.alpha = frac;
  if (cfg.aggregator.alpha_max <= 0.0) cfg.aggregator.alpha_max = mode_alpha_max;
  if (cfg.aggregator.alpha >= cfg.aggregator.alpha_max)
    bad_field("aggregator.alpha", "must be smaller than aggregator.alpha_max");
  if (cfg.aggregator.weiszfeld_iters < 1) bad_field("aggregator.weiszfeld_iters", "must be >= 1");
  if (!(cfg.aggregator.weiszfeld_smoothing > 0.0))
    bad_field("aggregator.weiszfeld_smoothing", "must be positive");

  // agreement (decentralized only)
  if (dec) {
    if (cfg.agreement.rounds < 0) bad_field("agreement.rounds", "must be >= 0");
    if (cfg.agreement.alpha_bar < 0.0) {
      cfg.agreement.alpha_bar = frac + 0.01;  // alpha + eps_bar
    }
    if (cfg.agreement.kind == AgreementKind::mda && cfg.agreement.alpha_bar >= 0.25)
      bad_field("agreement.alpha_bar", "must be < 1/4 for mda");
    if (cfg.agreement.kind == AgreementKind::gda && cfg.agreement.alpha_bar >= 0.2)
      bad_field("agreement.alpha_bar", "must be < 1/5 for gda");
    cfg.agreement.subset_size = agreement_subset_size(cfg.agreement.alpha_bar, a.agents);
  } else {
    cfg.agreement.kind = AgreementKind::none;
    cfg.agreement.rounds = 0;
    cfg.agreement.alpha_bar = 0.0;
    cfg.agreement.subset_size = 0;
  }

  if (cfg.runs < 1) bad_field("runs", "must be >= 1");
  if (cfg.metric_every < 1) bad_field("metric_every", "must be >= 1");
  if (cfg.max_traj_per_agent < 0) bad_field("max_traj_per_agent", "must be >= 0");
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["env"]["kind"] = env_kind_name(cfg.env.kind);
  j["env"]["horizon"] = cfg.env.horizon;
  j["env"]["discount"] = cfg.env.discount;
  if (!cfg.env.chain_table.empty()) j["env"]["chain_table"] = cfg.env.chain_table;
  if (cfg.env.chain_inline) j["env"]["chain"] = chain_to_json(*cfg.env.chain_inline);

  j["policy"]["architecture"] = cfg.policy.architecture == PolicyArch::linear ? "linear" : "mlp";
  j["policy"]["hidden"] = cfg.policy.hidden_sizes;
  j["policy"]["activation"] = cfg.policy.hidden_activation == Activation::relu ? "relu" : "tanh";
  j["policy"]["output_activation"] =
      cfg.policy.output_activation == OutputActivation::identity ? "identity" : "tanh";
  j["policy"]["input_dim"] = cfg.policy.input_dim;
  j["policy"]["action_count"] = cfg.policy.action_count;

  j["algorithm"]["kind"] = algorithm_kind_name(cfg.algo.algorithm);
  j["algorithm"]["agents"] = cfg.algo.agents;
  j["algorithm"]["N"] = cfg.algo.large_batch;
  j["algorithm"]["B"] = cfg.algo.small_batch;
  j["algorithm"]["p"] = cfg.algo.switch_prob;
  j["algorithm"]["eta"] = cfg.algo.step_size;
  j["algorithm"]["T"] = cfg.algo.iterations;
  j["algorithm"]["optimizer"] =
      cfg.algo.optimizer == OptimizerKind::plain_ascent ? "plain_ascent" : "adam";
  j["algorithm"]["estimator"] =
      cfg.algo.estimator == EstimatorKind::reinforce ? "reinforce" : "gpomdp";
  j["algorithm"]["adam_beta1"] = cfg.algo.adam.beta1;
  j["algorithm"]["adam_beta2"] = cfg.algo.adam.beta2;
  j["algorithm"]["adam_eps"] = cfg.algo.adam.eps;
  switch (cfg.algo.baseline.mode) {
    case BaselineConfig::Mode::zero: j["algorithm"]["baseline"] = "zero"; break;
    case BaselineConfig::Mode::constant: j["algorithm"]["baseline"] = "constant"; break;
    case BaselineConfig::Mode::per_step_constant:
      j["algorithm"]["baseline"] = "per_step_constant";
      break;
  }
  if (!cfg.algo.baseline.values.empty()) j["algorithm"]["baseline_values"] = cfg.algo.baseline.values;

  j["aggregator"]["kind"] = aggregator_kind_name(cfg.aggregator.kind);
  j["aggregator"]["alpha"] = cfg.aggregator.alpha;
  j["aggregator"]["alpha_max"] = cfg.aggregator.alpha_max;
  j["aggregator"]["weiszfeld_iters"] = cfg.aggregator.weiszfeld_iters;
  j["aggregator"]["weiszfeld_smoothing"] = cfg.aggregator.weiszfeld_smoothing;

  j["agreement"]["kind"] = agreement_kind_name(cfg.agreement.kind);
  j["agreement"]["rounds"] = cfg.agreement.rounds;
  j["agreement"]["alpha_bar"] = cfg.agreement.alpha_bar;
  j["agreement"]["mda_subset_cap"] = cfg.agreement.mda_subset_cap;

  j["adversary"]["attack"] = attack_kind_name(cfg.adversary.attack);
  j["adversary"]["f"] = cfg.adversary.byzantine_count;
  j["adversary"]["selection"] =
      cfg.adversary.selection == ByzSelection::static_set ? "static" : "per_round";
  j["adversary"]["noise_std"] = cfg.adversary.noise_std;

  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  j["metric_every"] = cfg.metric_every;
  j["out"] = cfg.out_dir;
  j["max_traj_per_agent"] = cfg.max_traj_per_agent;
  j["track_checkpoints"] = cfg.track_checkpoints;
  return j.dump();
}

std::shared_ptr<const Environment> make_environment(const EnvConfig& cfg) {
  if (cfg.kind == EnvConfig::Kind::cartpole) {
    return std::make_shared<CartPoleEnv>(cfg.horizon, cfg.discount);
  }
  ChainOracleSpec spec = cfg.chain_inline ? *cfg.chain_inline : load_chain_spec(cfg.chain_table);
  // the experiment-level horizon/discount stay with the table's own values
  return std::make_shared<ChainEnv>(std::move(spec));
}

EngineInputs make_engine_inputs(const ExperimentConfig& cfg, std::uint64_t root_seed) {
  EngineInputs in;
  in.env = make_environment(cfg.env);
  in.policy = cfg.policy;
  in.algo = cfg.algo;
  in.aggregator = cfg.aggregator;
  in.agreement = cfg.agreement;
  in.adversary = cfg.adversary;
  in.root_seed = root_seed;
  in.metric_every = cfg.metric_every;
  in.max_traj_per_agent = cfg.max_traj_per_agent;
  in.track_checkpoints = cfg.track_checkpoints;
  return in;
}

}  // namespace byzpg
