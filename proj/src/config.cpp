#include "netdac/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "netdac/errors.hpp"
#include "netdac/rng.hpp"

namespace netdac {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  // Shortest representation that parses back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> parse;
  std::function<std::string(const RunConfig&)> print;
};

[[noreturn]] void bad_value(const std::string& value) { throw std::invalid_argument("invalid value '" + value + "'"); }

double to_double(const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(v);
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(v);
  return out;
}

std::size_t to_count(const std::string& v) {
  if (!v.empty() && v[0] == '-') bad_value(v);
  return static_cast<std::size_t>(to_u64(v));
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(v);
}

template <typename E>
E to_enum(const std::string& v, const std::vector<std::pair<std::string, E>>& table) {
  for (const auto& [name, e] : table)
    if (name == v) return e;
  bad_value(v);
}

template <typename E>
std::string from_enum(E e, const std::vector<std::pair<std::string, E>>& table) {
  for (const auto& [name, x] : table)
    if (x == e) return name;
  return "?";
}

const std::vector<std::pair<std::string, ExperimentKind>> kExperiments{
    {"bandit", ExperimentKind::Bandit}, {"finite-mdp", ExperimentKind::FiniteMdp}, {"verify", ExperimentKind::Verify}};
const std::vector<std::pair<std::string, Algorithm>> kAlgorithms{{"alg1", Algorithm::OnPolicy},
                                                                 {"alg2", Algorithm::OffPolicy}};
const std::vector<std::pair<std::string, Schedule::Mode>> kSchedules{{"constant", Schedule::Mode::Constant},
                                                                     {"polynomial", Schedule::Mode::Polynomial}};
const std::vector<std::pair<std::string, Topology>> kTopologies{
    {"ring", Topology::Ring},         {"path", Topology::Path},         {"star", Topology::Star},
    {"complete", Topology::Complete}, {"edgeless", Topology::Edgeless}, {"random", Topology::Random},
    {"file", Topology::File}};
const std::vector<std::pair<std::string, FeatureKind>> kFeatures{
    {"compatible", FeatureKind::Compatible}, {"fourier", FeatureKind::Fourier}, {"tabular", FeatureKind::Tabular}};
const std::vector<std::pair<std::string, UpdateMode>> kModes{{"batch", UpdateMode::Batch},
                                                             {"online", UpdateMode::Online}};
const std::vector<std::pair<std::string, ActorGradient>> kActorGradients{
    {"batch_mean", ActorGradient::BatchMean}, {"last_sample", ActorGradient::LastSample}};

#define NETDAC_COUNT(name) \
  {#name, {[](RunConfig& c, const std::string& v) { c.name = to_count(v); }, [](const RunConfig& c) { return std::to_string(c.name); }}}
#define NETDAC_REAL(name) \
  {#name, {[](RunConfig& c, const std::string& v) { c.name = to_double(v); }, [](const RunConfig& c) { return fmt_double(c.name); }}}
#define NETDAC_BOOL(name) \
  {#name, {[](RunConfig& c, const std::string& v) { c.name = to_bool(v); }, [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); }}}
#define NETDAC_ENUM(name, table) \
  {#name, {[](RunConfig& c, const std::string& v) { c.name = to_enum(v, table); }, [](const RunConfig& c) { return from_enum(c.name, table); }}}
#define NETDAC_TEXT(name) \
  {#name, {[](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name; }}}

// Declaration order is the serialisation order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table{
      NETDAC_ENUM(experiment, kExperiments),
      NETDAC_ENUM(algorithm, kAlgorithms),
      NETDAC_COUNT(agents),
      NETDAC_COUNT(action_dim),
      NETDAC_COUNT(states),
      {"seeds",
       {[](RunConfig& c, const std::string& v) {
          c.seeds.clear();
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) c.seeds.push_back(to_u64(trim(item)));
        },
        [](const RunConfig& c) {
          std::string out;
          for (std::size_t k = 0; k < c.seeds.size(); ++k) out += (k ? "," : "") + std::to_string(c.seeds[k]);
          return out;
        }}},
      NETDAC_ENUM(schedule, kSchedules),
      NETDAC_REAL(critic_step),
      NETDAC_REAL(actor_step),
      NETDAC_REAL(critic_decay),
      NETDAC_REAL(actor_decay),
      NETDAC_REAL(noise_sigma),
      NETDAC_ENUM(topology, kTopologies),
      NETDAC_REAL(edge_prob),
      NETDAC_TEXT(edge_list),
      NETDAC_REAL(failure_prob),
      NETDAC_ENUM(features, kFeatures),
      NETDAC_COUNT(feature_dim),
      NETDAC_REAL(fourier_scale),
      NETDAC_BOOL(bias_feature),
      NETDAC_BOOL(center_features),
      NETDAC_COUNT(batch_size),
      NETDAC_COUNT(batches),
      NETDAC_ENUM(mode, kModes),
      NETDAC_BOOL(warm_start),
      NETDAC_ENUM(actor_gradient, kActorGradients),
      NETDAC_REAL(theta_lo),
      NETDAC_REAL(theta_hi),
      NETDAC_REAL(divergence_limit),
      NETDAC_COUNT(eval_rollout_steps),
      NETDAC_TEXT(run_id),
      NETDAC_TEXT(output),
  };
  return table;
}

#undef NETDAC_COUNT
#undef NETDAC_REAL
#undef NETDAC_BOOL
#undef NETDAC_ENUM
#undef NETDAC_TEXT

}  // namespace

void validate_config(const RunConfig& c) {
  auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
  if (c.agents < 1) fail("agents", "must be at least 1");
  if (c.action_dim < 1) fail("action_dim", "must be at least 1");
  if (c.states < 1) fail("states", "must be at least 1");
  if (c.seeds.empty()) fail("seeds", "must list at least one seed");
  if (c.batch_size < 1) fail("batch_size", "must be at least 1");
  if (!(c.noise_sigma >= 0.0)) fail("noise_sigma", "must be non-negative");
  if (!(c.failure_prob >= 0.0 && c.failure_prob < 1.0)) fail("failure_prob", "must lie in [0, 1)");
  if (!(c.edge_prob >= 0.0 && c.edge_prob <= 1.0)) fail("edge_prob", "must lie in [0, 1]");
  if (!(c.theta_lo <= c.theta_hi)) fail("theta_lo", "must not exceed theta_hi");
  if (!(c.critic_step >= 0.0)) fail("critic_step", "must be non-negative");
  if (!(c.actor_step >= 0.0)) fail("actor_step", "must be non-negative");
  if (!(c.divergence_limit > 0.0)) fail("divergence_limit", "must be positive");
  if (c.schedule == Schedule::Mode::Polynomial &&
      !(c.critic_decay > 0.5 && c.critic_decay < c.actor_decay && c.actor_decay <= 1.0)) {
    fail("critic_decay", "polynomial schedule needs 0.5 < critic_decay < actor_decay <= 1");
  }
  if (c.features == FeatureKind::Fourier && c.feature_dim < 1) fail("feature_dim", "must be at least 1");
  if (c.topology == Topology::File && c.edge_list.empty()) fail("edge_list", "required when topology = file");
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
    if (it == table.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      it->second.parse(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "': " + e.what());
    }
  }
  if (!seen.count("batch_size")) config.batch_size = 2 * config.action_dim;
  try {
    validate_config(config);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.print(config) + "\n";
  return out;
}

CommGraph build_graph(const RunConfig& c, std::uint64_t seed) {
  switch (c.topology) {
    case Topology::Ring: return CommGraph::ring(c.agents);
    case Topology::Path: return CommGraph::path(c.agents);
    case Topology::Star: return CommGraph::star(c.agents);
    case Topology::Complete: return CommGraph::complete(c.agents);
    case Topology::Edgeless: return CommGraph::edgeless(c.agents);
    case Topology::Random: return CommGraph::random_connected(c.agents, c.edge_prob, derive_seed(seed, "topology"));
    case Topology::File: return load_edge_list(c.edge_list, c.agents);
  }
  throw ConfigError("topology: unsupported value");
}

ExperimentSetup build_setup(const RunConfig& c, std::uint64_t seed) {
  validate_config(c);
  if (c.experiment == ExperimentKind::Verify) throw ConfigError("experiment: verify configs are not trainable");
  ExperimentSetup setup;
  setup.run_id = c.run_id;
  setup.seed = seed;
  setup.algorithm = c.algorithm;
  const std::uint64_t env_seed = derive_seed(seed, "environment");

  std::shared_ptr<PolicySet> policy;
  if (c.experiment == ExperimentKind::Bandit) {
    setup.mdp = std::make_shared<ContinuousBandit>(make_bandit(c.agents, c.action_dim, env_seed));
    policy = std::make_shared<PolicySet>(constant_policy(c.agents, c.action_dim, c.theta_lo, c.theta_hi));
  } else {
    setup.mdp = std::make_shared<FiniteTestMdp>(make_finite_mdp(c.states, c.agents, env_seed));
    policy = std::make_shared<PolicySet>(PolicyForm::Affine, c.states, std::vector<std::size_t>(c.agents, 1),
                                         c.theta_lo, c.theta_hi);
  }
  setup.initial_policy = policy;

  switch (c.features) {
    case FeatureKind::Compatible:
      if (c.algorithm == Algorithm::OnPolicy) {
        setup.features = std::make_shared<CompatibleQFeatures>(*policy, c.bias_feature, c.center_features);
      } else {
        setup.features = std::make_shared<CompatibleRFeatures>(*policy, c.bias_feature);
      }
      break;
    case FeatureKind::Fourier:
      setup.features = std::make_shared<FourierFeatures>(setup.mdp->state_count(), setup.mdp->action_dims(),
                                                         c.feature_dim, c.fourier_scale, derive_seed(seed, "features"));
      break;
    case FeatureKind::Tabular:
      setup.features = std::make_shared<TabularFeatures>(setup.mdp->state_count());
      break;
  }

  setup.graph = std::make_shared<CommGraph>(build_graph(c, seed));
  setup.failure_prob = c.failure_prob;
  setup.schedule = c.schedule == Schedule::Mode::Constant
                       ? Schedule::constant(c.critic_step, c.actor_step)
                       : Schedule::polynomial(c.critic_step, c.critic_decay, c.actor_step, c.actor_decay);
  setup.noise.sigma = c.noise_sigma;
  setup.mode = c.mode;
  setup.batch_size = c.batch_size;
  setup.batches = c.batches;
  setup.warm_start = c.warm_start;
  setup.actor_gradient = c.actor_gradient;
  setup.divergence_limit = c.divergence_limit;
  setup.eval_rollout_steps = c.eval_rollout_steps;
  return setup;
}

}  // namespace netdac
