#include "aoi/channel.hpp"

#include <cmath>

namespace aoi {

double snr_linear(const ChannelParams& params) {
  if (const auto* db = std::get_if<double>(&params.snr)) {
    if (!std::isfinite(*db)) throw InvalidChannel("channel: snr_db must be finite");
    return std::pow(10.0, *db / 10.0);
  }
  const auto& phys = std::get<ChannelParams::Physical>(params.snr);
  if (!(phys.power > 0.0) || !(phys.noise > 0.0) || !(phys.distance > 0.0) ||
      !(phys.pathloss >= 0.0)) {
    throw InvalidChannel("channel: power, noise and distance must be positive, pathloss >= 0");
  }
  return std::pow(phys.distance, -phys.pathloss) * phys.power / phys.noise;
}

double success_probability(const ChannelParams& params) {
  if (!(params.rate_threshold > 0.0) || !std::isfinite(params.rate_threshold)) {
    throw InvalidChannel("channel: rate_threshold must be positive");
  }
  const double snr = snr_linear(params);
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    throw InvalidChannel("channel: linear SNR must be positive and finite");
  }
  return std::exp(-std::expm1(params.rate_threshold * std::log(2.0)) / snr);
}

}  // namespace aoi
