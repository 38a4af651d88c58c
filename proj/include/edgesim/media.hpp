// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgesim/sim.hpp"

namespace edgesim {

/// One encoding of the content. Indices are 1-based and bitrates must be
/// strictly increasing with index.
struct Representation {
  int index = 0;
  std::string codec;
  double bitrate_mbps = 0.0;
  int width = 0;
  int height = 0;
  double fps = 0.0;
};

/// Segment address: (media segment index, representation index), both 1-based.
struct SegmentId {
  int index = 0;
  int rep = 0;

  friend bool operator==(const SegmentId&, const SegmentId&) = default;
  friend auto operator<=>(const SegmentId&, const SegmentId&) = default;
};

/// The content universe: representation ladder plus segment timing.
///
/// The last segment carries the remainder of the total duration, so segment
/// durations always sum to total_duration exactly.
class Manifest {
 public:
  Manifest(std::vector<Representation> ladder, double segment_duration_s,
           double total_duration_s);

  const std::vector<Representation>& ladder() const { return ladder_; }
  const Representation& rep(int rep_index) const;
  double segment_duration() const { return segment_duration_; }
  double total_duration() const { return total_duration_; }
  int segment_count() const { return segment_count_; }

  /// Duration of one segment; only the last one may be shorter.
  double duration_of(int seg_index) const;

  bool valid_segment(const SegmentId& seg) const {
    return seg.index >= 1 && seg.index <= segment_count_ && seg.rep >= 1 &&
           seg.rep <= static_cast<int>(ladder_.size());
  }

  void require_valid(const SegmentId& seg) const;

  double min_bitrate() const { return ladder_.front().bitrate_mbps; }
  double max_bitrate() const { return ladder_.back().bitrate_mbps; }

  /// Representation index whose bitrate equals `bitrate_mbps` exactly; throws
  /// if no ladder entry matches.
  int rep_for_bitrate(double bitrate_mbps) const;

 private:
  std::vector<Representation> ladder_;
  double segment_duration_;
  double total_duration_;
  int segment_count_;
};

/// Deterministic per-segment sizes: nominal bitrate * duration, scaled by a
/// keyed jitter factor in [1-j, 1+j]. The factor depends only on
/// (size_seed, segment index, representation index), so a segment's size is
/// the same however often and in whatever order it is fetched.
class SegmentSizer {
 public:
  SegmentSizer(const Manifest& manifest, double jitter, std::uint64_t size_seed);

  std::uint64_t size_bytes(const SegmentId& seg) const;
  double jitter() const { return jitter_; }

  /// True when the jitter amplitude preserves strict size ordering across
  /// the ladder for every segment index, i.e. j < (b2-b1)/(b2+b1) for every
  /// adjacent bitrate pair.
  static bool jitter_preserves_rep_order(const std::vector<Representation>& ladder,
                                         double jitter);

 private:
  const Manifest* manifest_;
  double jitter_;
  std::uint64_t size_seed_;
};

/// Origin (media server / CDN) fetch descriptor: byte count to move over the
/// backhaul. The origin is always available.
struct OriginTransfer {
  SegmentId seg;
  std::uint64_t bytes = 0;
};

/// Describes the backhaul transfer needed to pull `seg` from the origin.
OriginTransfer origin_fetch(const Manifest& manifest, const SegmentSizer& sizer,
                            const SegmentId& seg);

/// Ladder from the shipped default configuration (six HEVC rungs,
/// 0.5 to 27.5 Mbps).
std::vector<Representation> default_ladder();

}  // namespace edgesim
