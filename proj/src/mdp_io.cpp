#include "robust_mdp/mdp_io.hpp"

#include <fstream>

#include "robust_mdp/errors.hpp"

namespace robust_mdp::io {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

template <typename T>
json table(const std::vector<T>& flat, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    out.push_back(std::vector<T>(flat.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                 flat.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)));
  }
  return out;
}

template <typename T>
std::vector<T> flatten(const json& j, const char* key, std::size_t rows, std::size_t cols) {
  const auto nested = field<std::vector<std::vector<T>>>(j, key);
  if (nested.size() != rows) {
    throw Error(ErrorCode::DimensionMismatch, std::string("'") + key + "' must have " +
                                                  std::to_string(rows) + " rows");
  }
  std::vector<T> flat;
  flat.reserve(rows * cols);
  for (const auto& row : nested) {
    if (row.size() != cols) {
      throw Error(ErrorCode::DimensionMismatch, std::string("'") + key + "' rows must have " +
                                                    std::to_string(cols) + " entries");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

}  // namespace

json to_json(const TabularMDP& m) {
  return json{{"S", m.num_states},
              {"A", m.num_actions},
              {"gamma", m.discount},
              {"kernel", table(m.kernel, m.num_pairs(), m.num_states)},
              {"reward", m.reward}};
}

TabularMDP mdp_from_json(const json& j) {
  TabularMDP m;
  m.num_states = field<std::size_t>(j, "S");
  m.num_actions = field<std::size_t>(j, "A");
  m.discount = field<double>(j, "gamma");
  m.kernel = flatten<double>(j, "kernel", m.num_pairs(), m.num_states);
  m.reward = field<std::vector<double>>(j, "reward");
  validate_mdp(m);
  return m;
}

json to_json(const TransitionCounts& c) {
  return json{{"visit", c.visit}, {"next", table(c.next, c.num_pairs(), c.num_states)}};
}

TransitionCounts counts_from_json(const json& j) {
  TransitionCounts c;
  c.visit = field<std::vector<std::uint64_t>>(j, "visit");
  const auto next = field<std::vector<std::vector<std::uint64_t>>>(j, "next");
  if (next.empty() || next.size() != c.visit.size()) {
    throw Error(ErrorCode::DimensionMismatch, "'next' must have one row per visit entry");
  }
  c.num_states = next.front().size();
  if (c.num_states == 0 || c.visit.size() % c.num_states != 0) {
    throw Error(ErrorCode::DimensionMismatch, "visit length must be a multiple of S");
  }
  c.num_actions = c.visit.size() / c.num_states;
  c.next = flatten<std::uint64_t>(j, "next", c.num_pairs(), c.num_states);
  validate_counts(c);
  return c;
}

json to_json(const Policy& pi) {
  return json{{"probs", table(pi.probs(), pi.num_states(), pi.num_actions())}};
}

Policy policy_from_json(const json& j, std::size_t num_actions) {
  if (j.contains("actions")) {
    const auto actions = field<std::vector<std::size_t>>(j, "actions");
    return Policy::deterministic(num_actions, actions);
  }
  const auto nested = field<std::vector<std::vector<double>>>(j, "probs");
  return Policy(nested.size(), num_actions, flatten<double>(j, "probs", nested.size(), num_actions));
}

json to_json(const SolveReport& rep) {
  std::vector<std::size_t> actions(rep.policy.num_states());
  for (std::size_t s = 0; s < actions.size(); ++s) actions[s] = rep.policy.action(s);
  const std::size_t num_actions = rep.policy.num_actions();
  return json{{"q", table(rep.q_final, rep.q_final.size() / num_actions, num_actions)},
              {"v", rep.v_final},
              {"policy", actions},
              {"iterations", rep.iterations},
              {"residual", rep.residual},
              {"converged", rep.converged},
              {"policy_error_bound", rep.policy_error_bound}};
}

json to_json(const TvInstanceParams& params) {
  return json{{"divergence", "tv"},   {"S", params.num_states},   {"A", params.num_actions},
              {"gamma", params.gamma}, {"sigma", params.sigma},     {"epsilon", params.epsilon},
              {"c0", params.c0},       {"phi", params.phi},         {"p", params.p()},
              {"q", params.q()},       {"delta", params.delta()}};
}

json to_json(const Chi2InstanceParams& params) {
  return json{{"divergence", "chi2"},  {"S", params.num_states}, {"A", params.num_actions},
              {"gamma", params.gamma}, {"sigma", params.sigma},  {"epsilon", params.epsilon},
              {"phi", params.phi},     {"p", params.p()},        {"q", params.q()},
              {"delta", params.delta()}};
}

TvInstanceParams tv_params_from_json(const json& j) {
  TvInstanceParams params;
  params.num_states = field_or<std::size_t>(j, "S", params.num_states);
  params.num_actions = field_or<std::size_t>(j, "A", params.num_actions);
  params.gamma = field<double>(j, "gamma");
  params.sigma = field<double>(j, "sigma");
  params.epsilon = field<double>(j, "epsilon");
  params.c0 = field_or<double>(j, "c0", params.c0);
  params.phi = field_or<int>(j, "phi", params.phi);
  validate(params);
  return params;
}

Chi2InstanceParams chi2_params_from_json(const json& j) {
  Chi2InstanceParams params;
  params.num_states = field_or<std::size_t>(j, "S", params.num_states);
  params.num_actions = field_or<std::size_t>(j, "A", params.num_actions);
  params.gamma = field<double>(j, "gamma");
  params.sigma = field<double>(j, "sigma");
  params.epsilon = field<double>(j, "epsilon");
  params.phi = field_or<int>(j, "phi", params.phi);
  validate(params);
  return params;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

TabularMDP read_mdp(const std::filesystem::path& path) { return mdp_from_json(read_json(path)); }

void write_mdp(const std::filesystem::path& path, const TabularMDP& m) {
  write_json(path, to_json(m));
}

}  // namespace robust_mdp::io
