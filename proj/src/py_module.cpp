#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "byzpg/algorithms.hpp"
#include "byzpg/conformance.hpp"
#include "byzpg/experiment.hpp"

namespace py = pybind11;
using namespace byzpg;

namespace {

PolicySpec make_policy(const std::string& architecture, const std::vector<int>& hidden,
                       const std::string& activation, const std::string& output_activation,
                       int input_dim, int action_count) {
  PolicySpec spec;
  spec.architecture = architecture == "linear" ? PolicyArch::linear : PolicyArch::mlp;
  spec.hidden_sizes = hidden;
  spec.hidden_activation = activation == "tanh" ? Activation::tanh : Activation::relu;
  spec.output_activation =
      output_activation == "tanh" ? OutputActivation::tanh : OutputActivation::identity;
  spec.input_dim = input_dim;
  spec.action_count = action_count;
  return spec;
}

py::dict record_to_dict(const IterationRecord& r) {
  py::dict d;
  d["iteration"] = r.iteration;
  d["coin"] = r.coin;
  d["traj_per_agent"] = r.traj_per_agent;
  d["mean_honest_return"] = r.mean_honest_return;
  d["mean_honest_return_disc"] = r.mean_honest_return_disc;
  d["honest_returns"] = r.honest_returns;
  d["max_importance_weight"] = r.max_importance_weight;
  d["honest_diameter"] = r.honest_diameter;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Byzantine fault-tolerant federated policy-gradient simulator";

  py::class_<PolicySpec>(m, "PolicySpec")
      .def(py::init(&make_policy), py::arg("architecture") = "linear",
           py::arg("hidden") = std::vector<int>{}, py::arg("activation") = "relu",
           py::arg("output_activation") = "identity", py::arg("input_dim") = 0,
           py::arg("action_count") = 0)
      .def_readonly("input_dim", &PolicySpec::input_dim)
      .def_readonly("action_count", &PolicySpec::action_count);

  m.def("param_count", &param_count);
  m.def(
      "init_params",
      [](const PolicySpec& spec, std::uint64_t seed) {
        RngStream rng = agent_stream(seed, kCommonAgent, "init", 0);
        return init_params(spec, rng);
      },
      py::arg("spec"), py::arg("seed"));
  m.def("action_log_probs", &action_log_probs, py::arg("spec"), py::arg("theta"), py::arg("state"));
  m.def("log_prob_gradient", &log_prob_gradient, py::arg("spec"), py::arg("theta"),
        py::arg("state"), py::arg("action"));

  m.def(
      "cartpole_step",
      [](const std::vector<double>& state, int action) {
        return cartpole_step(state, action);
      },
      py::arg("state"), py::arg("action"));

  py::class_<ChainOracleSpec>(m, "ChainOracleSpec")
      .def(py::init([](int states, int actions, int horizon, double discount, double reward_bound,
                       const std::vector<double>& init,
                       const std::vector<std::vector<std::vector<double>>>& transition,
                       const std::vector<std::vector<double>>& reward) {
             ChainOracleSpec spec;
             spec.n_states = states;
             spec.n_actions = actions;
             spec.horizon = horizon;
             spec.discount = discount;
             spec.reward_bound = reward_bound;
             spec.init_dist = init;
             spec.transition = transition;
             spec.reward = reward;
             spec.validate();
             return spec;
           }),
           py::arg("states"), py::arg("actions"), py::arg("horizon"), py::arg("discount"),
           py::arg("reward_bound"), py::arg("init"), py::arg("transition"), py::arg("reward"))
      .def_readonly("n_states", &ChainOracleSpec::n_states)
      .def_readonly("n_actions", &ChainOracleSpec::n_actions)
      .def_readonly("horizon", &ChainOracleSpec::horizon);

  m.def("load_chain_spec", &load_chain_spec, py::arg("path"));
  m.def("enumerate_expected_return", &enumerate_expected_return, py::arg("chain"),
        py::arg("policy"), py::arg("theta"));
  m.def("enumerate_exact_gradient", &enumerate_exact_gradient, py::arg("chain"), py::arg("policy"),
        py::arg("theta"));

  m.def(
      "krum",
      [](const std::vector<ParamVector>& inputs, double alpha) { return krum(inputs, alpha); },
      py::arg("inputs"), py::arg("alpha"));
  m.def(
      "rfa",
      [](const std::vector<ParamVector>& inputs, int iters, double smoothing) {
        AggregatorConfig cfg;
        cfg.kind = AggregatorKind::rfa;
        cfg.weiszfeld_iters = iters;
        cfg.weiszfeld_smoothing = smoothing;
        return rfa(inputs, cfg);
      },
      py::arg("inputs"), py::arg("iters") = 64, py::arg("smoothing") = 1e-8);
  m.def(
      "bucketize",
      [](const std::vector<ParamVector>& inputs, int bucket_size, std::uint64_t seed) {
        RngStream rng(seed);
        return bucketize(inputs, bucket_size, rng);
      },
      py::arg("inputs"), py::arg("bucket_size"), py::arg("seed"));

  m.def("mda_select", &mda_select, py::arg("received"), py::arg("subset_size"),
        py::arg("subset_cap") = 1000000);
  m.def("gda_select", &gda_select, py::arg("received"), py::arg("self_value"),
        py::arg("subset_size"));

  m.def("default_config_json", []() { return config_to_json(default_config()); });
  m.def(
      "run_experiment_json",
      [](const std::string& config_json, int max_parallel) {
        ExperimentConfig cfg = parse_config(config_json);
        ExperimentResult result = run_experiment(cfg, max_parallel);
        py::list runs;
        for (const RunResult& run : result.runs) {
          py::list records;
          for (const IterationRecord& rec : run.records) records.append(record_to_dict(rec));
          py::dict d;
          d["records"] = records;
          d["completed_rounds"] = run.completed_rounds;
          d["final_thetas"] = run.final_thetas;
          runs.append(d);
        }
        return runs;
      },
      py::arg("config_json"), py::arg("max_parallel") = 0,
      "Parse a config, run it, and return per-run iteration records.");
  m.def(
      "metrics_csv",
      [](const std::string& config_json, int max_parallel) {
        ExperimentConfig cfg = parse_config(config_json);
        return metrics_csv_text(cfg, run_experiment(cfg, max_parallel));
      },
      py::arg("config_json"), py::arg("max_parallel") = 0);

  m.def(
      "conformance",
      [](const std::string& suite, std::uint64_t seed, int trials) {
        if (suite == "aggregation") return format_report(aggregation_conformance(seed, trials));
        if (suite == "agreement") return format_report(agreement_conformance(seed, trials));
        if (suite == "estimators") return format_report(estimator_conformance(seed, trials));
        throw std::invalid_argument("unknown conformance suite: " + suite);
      },
      py::arg("suite"), py::arg("seed") = 1, py::arg("trials") = 1000);
}
