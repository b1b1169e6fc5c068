#pragma once

#include <string>

#include "mmwsim/agent.hpp"

namespace mmwsim {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Versioned JSON weight dump: layer sizes + flat parameter vector + state
// encoding parameters. method is a free-form label ("proposed", "baseline2").
void save_policy(const QPolicy& policy, const std::string& method, const std::string& path);

struct LoadedPolicy {
  QPolicy policy;
  std::string method;
};

LoadedPolicy load_policy(const std::string& path);

}  // namespace mmwsim
