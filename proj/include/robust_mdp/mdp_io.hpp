#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "robust_mdp/drvi.hpp"
#include "robust_mdp/hard_instances.hpp"
#include "robust_mdp/mdp.hpp"
#include "robust_mdp/sampling.hpp"

namespace robust_mdp::io {

// MDP: {"S", "A", "gamma", "kernel": [[...S] x S*A], "reward": [S*A]}, row
// index s*A + a. Doubles are written in shortest round-trip form, so
// read -> write -> read is bit-exact.
nlohmann::json to_json(const TabularMDP& m);
TabularMDP mdp_from_json(const nlohmann::json& j);

// Counts: {"visit": [S*A], "next": [[...S] x S*A]}. S and A are implied by
// the shape and checked against the MDP when one is given.
nlohmann::json to_json(const TransitionCounts& c);
TransitionCounts counts_from_json(const nlohmann::json& j);

// Policy: {"probs": [[...A] x S]} or {"actions": [S]}.
nlohmann::json to_json(const Policy& pi);
Policy policy_from_json(const nlohmann::json& j, std::size_t num_actions);

nlohmann::json to_json(const SolveReport& rep);

// Instance sidecars: {"divergence", "S", "A", "gamma", "sigma", "epsilon",
// "c0" (TV only), "phi", plus the derived "p", "q", "delta"}.
nlohmann::json to_json(const TvInstanceParams& params);
nlohmann::json to_json(const Chi2InstanceParams& params);
TvInstanceParams tv_params_from_json(const nlohmann::json& j);
Chi2InstanceParams chi2_params_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

TabularMDP read_mdp(const std::filesystem::path& path);
void write_mdp(const std::filesystem::path& path, const TabularMDP& m);

}  // namespace robust_mdp::io
