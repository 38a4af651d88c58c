// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace edgesim {

/// Proxy-side view of one served segment, the classifier input.
/// bandwidth is the proxy's own EWMA of measured delivery throughput;
/// prev_switch is the signed representation-index step taken at this segment.
struct FeatureVector {
  static constexpr int kDim = 7;

  double bandwidth_mbps = 0.0;
  double bitrate_mbps = 0.0;
  double seg_size_bytes = 0.0;
  double download_time_s = 0.0;
  double inter_request_time_s = 0.0;
  double seg_index = 0.0;
  double prev_switch = 0.0;

  std::array<double, kDim> as_array() const {
    return {bandwidth_mbps, bitrate_mbps,      seg_size_bytes, download_time_s,
            inter_request_time_s, seg_index, prev_switch};
  }

  static FeatureVector from_array(const std::array<double, kDim>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }

  static constexpr std::array<std::string_view, kDim> names() {
    return {"bandwidth_mbps", "bitrate_mbps",         "seg_size_bytes", "download_time_s",
            "inter_request_time_s", "seg_index", "prev_switch"};
  }
};

/// One training example: features of segment i, label = bitrate the player
/// actually requested for segment i+1.
struct SessionRecord {
  FeatureVector features;
  double next_bitrate_mbps = 0.0;
};

struct LabeledRecord {
  int player_id = 0;
  SessionRecord record;
};

/// Predicts the bitrate of a session's next segment from its freshest
/// feature vector.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict_next_bitrate(const FeatureVector& fv) = 0;
};

}  // namespace edgesim
