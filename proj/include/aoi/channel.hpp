#pragma once

#include "aoi/core_model.hpp"

namespace aoi {

class InvalidChannel : public Error {
 public:
  using Error::Error;
};

/// Linear SNR, either 10^(dB/10) or d^-tau * P / sigma^2.
double snr_linear(const ChannelParams& params);

/// Probability that a unit-mean Rayleigh-faded link clears the rate threshold:
/// exp(-(2^r_th - 1) / SNR).
double success_probability(const ChannelParams& params);

}  // namespace aoi
