#include "aoi/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "aoi/channel.hpp"

namespace aoi {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ValidationError(where + ": unknown key '" + item.key() + "'");
  }
}

const json& required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing required key '" + key + "'");
  return *it;
}

double number(const json& value, const std::string& what) {
  if (!value.is_number()) throw ValidationError(what + " must be a number");
  return value.get<double>();
}

ChannelParams parse_channel(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  reject_unknown(obj, {"snr_db", "power", "noise", "distance", "pathloss", "rate_threshold"},
                 where);
  ChannelParams channel;
  if (obj.contains("rate_threshold")) {
    channel.rate_threshold = number(obj["rate_threshold"], where + ".rate_threshold");
  }
  const bool physical = obj.contains("power") || obj.contains("noise") ||
                        obj.contains("distance") || obj.contains("pathloss");
  if (obj.contains("snr_db")) {
    if (physical) throw ValidationError(where + ": give either snr_db or power/noise, not both");
    channel.snr = number(obj["snr_db"], where + ".snr_db");
  } else {
    ChannelParams::Physical phys;
    phys.power = number(required(obj, "power", where), where + ".power");
    phys.noise = number(required(obj, "noise", where), where + ".noise");
    if (obj.contains("distance")) phys.distance = number(obj["distance"], where + ".distance");
    if (obj.contains("pathloss")) phys.pathloss = number(obj["pathloss"], where + ".pathloss");
    channel.snr = phys;
  }
  return channel;
}

json channel_to_json(const ChannelParams& channel) {
  json out;
  if (const auto* db = std::get_if<double>(&channel.snr)) {
    out["snr_db"] = *db;
  } else {
    const auto& phys = std::get<ChannelParams::Physical>(channel.snr);
    out["power"] = phys.power;
    out["noise"] = phys.noise;
    out["distance"] = phys.distance;
    out["pathloss"] = phys.pathloss;
  }
  out["rate_threshold"] = channel.rate_threshold;
  return out;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown(root, {"horizon", "truncation", "seed", "nodes"}, "config");

  SystemConfig config;
  const auto& horizon = required(root, "horizon", "config");
  const auto& truncation = required(root, "truncation", "config");
  const auto& seed = required(root, "seed", "config");
  if (!horizon.is_number_integer()) throw ValidationError("config: horizon must be an integer");
  if (!truncation.is_number_integer()) {
    throw ValidationError("config: truncation must be an integer");
  }
  if (!seed.is_number_unsigned()) throw ValidationError("config: seed must be a non-negative integer");
  config.horizon = horizon.get<int>();
  config.truncation = truncation.get<int>();
  config.seed = seed.get<std::uint64_t>();

  const auto& nodes = required(root, "nodes", "config");
  if (!nodes.is_array()) throw ValidationError("config: nodes must be a list");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "config.nodes[" + std::to_string(i) + "]";
    const auto& n = nodes[i];
    if (!n.is_object()) throw ValidationError(where + " must be an object");
    reject_unknown(n, {"lambda", "weight", "success_prob", "channel"}, where);
    NodeParams node;
    node.lambda = number(required(n, "lambda", where), where + ".lambda");
    node.weight = number(required(n, "weight", where), where + ".weight");
    const bool direct = n.contains("success_prob");
    const bool derived = n.contains("channel");
    if (direct == derived) {
      throw ValidationError(where + ": exactly one of 'success_prob' or 'channel' is required");
    }
    if (direct) {
      node.success_prob = number(n["success_prob"], where + ".success_prob");
    } else {
      node.channel = parse_channel(n["channel"], where + ".channel");
      node.success_prob = success_probability(*node.channel);
    }
    config.nodes.push_back(node);
  }
  config.validate();
  return config;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const SystemConfig& config) {
  json root;
  root["horizon"] = config.horizon;
  root["truncation"] = config.truncation;
  root["seed"] = config.seed;
  root["nodes"] = json::array();
  for (const auto& node : config.nodes) {
    json n;
    n["lambda"] = node.lambda;
    n["weight"] = node.weight;
    if (node.channel) {
      n["channel"] = channel_to_json(*node.channel);
    } else {
      n["success_prob"] = node.success_prob;
    }
    root["nodes"].push_back(n);
  }
  return root.dump(2);
}

SystemConfig with_snr_db(SystemConfig config, double snr_db) {
  for (auto& node : config.nodes) {
    ChannelParams channel;
    channel.snr = snr_db;
    if (node.channel) channel.rate_threshold = node.channel->rate_threshold;
    node.success_prob = success_probability(channel);
    node.channel = channel;
  }
  config.validate();
  return config;
}

SystemConfig with_lambda(SystemConfig config, double lambda) {
  for (auto& node : config.nodes) node.lambda = lambda;
  config.validate();
  return config;
}

SystemConfig with_truncation(SystemConfig config, int truncation) {
  config.truncation = truncation;
  config.validate();
  return config;
}

}  // namespace aoi
