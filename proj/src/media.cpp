// SPDX-License-Identifier: Apache-2.0
#include "edgesim/media.hpp"

#include <cmath>
#include <stdexcept>

namespace edgesim {

Manifest::Manifest(std::vector<Representation> ladder, double segment_duration_s,
                   double total_duration_s)
    : ladder_(std::move(ladder)),
      segment_duration_(segment_duration_s),
      total_duration_(total_duration_s) {
  if (ladder_.empty()) throw std::invalid_argument("Manifest: empty ladder");
  if (!(segment_duration_ > 0.0)) {
    throw std::invalid_argument("Manifest: segment duration must be > 0");
  }
  if (!(total_duration_ > 0.0)) {
    throw std::invalid_argument("Manifest: total duration must be > 0");
  }
  for (std::size_t i = 0; i < ladder_.size(); ++i) {
    if (ladder_[i].index != static_cast<int>(i) + 1) {
      throw std::invalid_argument("Manifest: ladder indices must be 1..R in order");
    }
    if (!(ladder_[i].bitrate_mbps > 0.0)) {
      throw std::invalid_argument("Manifest: bitrates must be positive");
    }
    if (i > 0 && !(ladder_[i].bitrate_mbps > ladder_[i - 1].bitrate_mbps)) {
      throw std::invalid_argument("Manifest: bitrates must be strictly increasing");
    }
  }
  segment_count_ = static_cast<int>(std::ceil(total_duration_ / segment_duration_));
}

const Representation& Manifest::rep(int rep_index) const {
  if (rep_index < 1 || rep_index > static_cast<int>(ladder_.size())) {
    throw std::out_of_range("Manifest: representation index out of range");
  }
  return ladder_[rep_index - 1];
}

double Manifest::duration_of(int seg_index) const {
  if (seg_index < 1 || seg_index > segment_count_) {
    throw std::out_of_range("Manifest: segment index out of range");
  }
  if (seg_index < segment_count_) return segment_duration_;
  return total_duration_ - (segment_count_ - 1) * segment_duration_;
}

void Manifest::require_valid(const SegmentId& seg) const {
  if (!valid_segment(seg)) {
    throw std::out_of_range("segment (" + std::to_string(seg.index) + ", rep " +
                            std::to_string(seg.rep) + ") outside manifest bounds");
  }
}

int Manifest::rep_for_bitrate(double bitrate_mbps) const {
  for (const auto& r : ladder_) {
    if (r.bitrate_mbps == bitrate_mbps) return r.index;
  }
  throw std::invalid_argument("no ladder representation with bitrate " +
                              std::to_string(bitrate_mbps) + " Mbps");
}

SegmentSizer::SegmentSizer(const Manifest& manifest, double jitter,
                           std::uint64_t size_seed)
    : manifest_(&manifest), jitter_(jitter), size_seed_(size_seed) {
  if (jitter < 0.0 || jitter >= 1.0) {
    throw std::invalid_argument("SegmentSizer: jitter must be in [0, 1)");
  }
}

std::uint64_t SegmentSizer::size_bytes(const SegmentId& seg) const {
  manifest_->require_valid(seg);
  double nominal = manifest_->rep(seg.rep).bitrate_mbps * 1e6 *
                   manifest_->duration_of(seg.index) / 8.0;
  double u = keyed_uniform01(size_seed_, static_cast<std::uint64_t>(seg.index),
                             static_cast<std::uint64_t>(seg.rep));
  double factor = 1.0 + jitter_ * (2.0 * u - 1.0);
  return static_cast<std::uint64_t>(std::llround(nominal * factor));
}

bool SegmentSizer::jitter_preserves_rep_order(
    const std::vector<Representation>& ladder, double jitter) {
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    double lo = ladder[i - 1].bitrate_mbps;
    double hi = ladder[i].bitrate_mbps;
    if (!(jitter < (hi - lo) / (hi + lo))) return false;
  }
  return true;
}

OriginTransfer origin_fetch(const Manifest& manifest, const SegmentSizer& sizer,
                            const SegmentId& seg) {
  manifest.require_valid(seg);
  return OriginTransfer{seg, sizer.size_bytes(seg)};
}

std::vector<Representation> default_ladder() {
  return {
      {1, "hevc", 0.5, 640, 360, 24.0},   {2, "hevc", 1.4, 1280, 720, 24.0},
      {3, "hevc", 5.5, 1920, 1080, 24.0}, {4, "hevc", 11.0, 3840, 2160, 24.0},
      {5, "hevc", 20.0, 5120, 2880, 24.0}, {6, "hevc", 27.5, 7680, 4320, 24.0},
  };
}

}  // namespace edgesim
