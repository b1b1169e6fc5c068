#include "mmwsim/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace mmwsim {

using nlohmann::json;

void save_policy(const QPolicy& policy, const std::string& method, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["method"] = method;
  j["num_bs"] = policy.num_bs;
  j["horizon"] = policy.horizon;
  j["action_offset"] = policy.action_offset;
  j["snr_min_db"] = policy.snr_min_db;
  j["snr_max_db"] = policy.snr_max_db;
  j["layer_sizes"] = policy.net.layer_sizes();
  j["params"] = policy.net.params();

  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  out << j.dump() << "\n";
}

LoadedPolicy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint parse error: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw CheckpointError("unsupported checkpoint version");
    LoadedPolicy lp;
    lp.method = j.at("method").get<std::string>();
    lp.policy.num_bs = j.at("num_bs").get<int>();
    lp.policy.horizon = j.at("horizon").get<int>();
    lp.policy.action_offset = j.at("action_offset").get<int>();
    lp.policy.snr_min_db = j.at("snr_min_db").get<double>();
    lp.policy.snr_max_db = j.at("snr_max_db").get<double>();
    const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    const auto params = j.at("params").get<std::vector<double>>();
    lp.policy.net = MlpNetwork(sizes, 0);
    if (lp.policy.net.num_params() != static_cast<int>(params.size()))
      throw CheckpointError("checkpoint parameter count mismatch");
    lp.policy.net.params() = params;
    return lp;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace mmwsim
