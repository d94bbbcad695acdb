#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tegra {

/// Simulated time in nanoseconds.
using Time = double;

enum class MemoryKind { DDR4, HBM2 };

std::string_view to_string(MemoryKind kind);

struct ChannelConfig {
  MemoryKind kind = MemoryKind::DDR4;
  double bandwidth = 19.2;        // bytes per ns, per pseudo-channel
  Time base_latency = 50.0;
  Time extra_latency = 0.0;       // disaggregation adder
  std::uint64_t capacity = 16ULL << 30;
  std::uint64_t access_granularity = 64;
  // Independent servers inside the channel, interleaved at access granularity.
  std::uint32_t pseudo_channels = 1;

  static ChannelConfig ddr4();
  static ChannelConfig hbm2();

  /// Throws ConfigError naming `field_prefix` on violation.
  void validate(std::string_view field_prefix) const;

  Time total_latency() const { return base_latency + extra_latency; }
};

struct MemRequest {
  std::uint32_t channel = 0;
  std::uint64_t address = 0;
  std::uint64_t size = 0;
  bool is_write = false;
  Time issue_time = 0;
};

struct BusyInterval {
  Time start = 0;
  Time end = 0;
};

struct ChannelStats {
  // One time-ordered, non-overlapping interval list per pseudo-channel.
  // Back-to-back beats are merged into one interval.
  std::vector<std::vector<BusyInterval>> lanes;
  std::uint64_t bytes_read = 0;       // transferred, after burst rounding
  std::uint64_t bytes_written = 0;
  std::uint64_t requested_read = 0;   // as asked by the requester
  std::uint64_t requested_written = 0;
  std::uint64_t request_count = 0;
  std::uint64_t beat_count = 0;
  // Bucket k counts beats whose queue wait, floored to whole ns, has bit width k.
  std::vector<std::uint64_t> queue_wait_histogram;

  Time busy_time() const;
};

/// Single bandwidth-limited channel. Latency is pipelined; only transfer
/// time occupies a lane.
class Channel {
 public:
  explicit Channel(ChannelConfig config);

  /// Returns the completion time of the last beat of the request.
  Time submit(std::uint64_t address, std::uint64_t size, bool is_write, Time now);

  const ChannelConfig& config() const { return config_; }
  const ChannelStats& stats() const { return stats_; }

 private:
  ChannelConfig config_;
  ChannelStats stats_;
  std::vector<Time> lane_free_;
};

/// Indexed set of channels.
class MemorySystem {
 public:
  std::uint32_t add_channel(ChannelConfig config, std::string name);

  /// Throws UnknownChannel or AddressOutOfRange.
  Time submit(const MemRequest& req, Time now);

  std::size_t size() const { return channels_.size(); }
  const Channel& channel(std::uint32_t i) const { return channels_.at(i); }
  const std::string& name(std::uint32_t i) const { return names_.at(i); }

 private:
  std::vector<Channel> channels_;
  std::vector<std::string> names_;
};

/// Busy fraction of [window_start, window_end), averaged over lanes.
/// Throws EmptyWindow if window_end <= window_start.
double utilization(const ChannelStats& stats, Time window_start, Time window_end);

/// One value per consecutive window covering [0, horizon); the last window
/// is clipped to the horizon.
std::vector<double> utilization_series(const ChannelStats& stats, Time window, Time horizon);

}  // namespace tegra
