#include "tegra/memory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "tegra/error.hpp"

namespace tegra {

std::string_view to_string(MemoryKind kind) {
  return kind == MemoryKind::DDR4 ? "ddr4" : "hbm2";
}

ChannelConfig ChannelConfig::ddr4() {
  return ChannelConfig{MemoryKind::DDR4, 19.2, 50.0, 0.0, 16ULL << 30, 64, 1};
}

ChannelConfig ChannelConfig::hbm2() {
  return ChannelConfig{MemoryKind::HBM2, 32.0, 30.0, 0.0, 4ULL << 30, 32, 8};
}

void ChannelConfig::validate(std::string_view field_prefix) const {
  auto fail = [&](std::string_view field, std::string_view why) {
    throw Error(ErrorCode::ConfigError,
                std::string(field_prefix) + "." + std::string(field) + ": " + std::string(why));
  };
  if (!(bandwidth > 0) || !std::isfinite(bandwidth)) fail("bandwidth", "must be > 0");
  if (!(base_latency >= 0) || !std::isfinite(base_latency)) fail("base_latency", "must be >= 0");
  if (!(extra_latency >= 0) || !std::isfinite(extra_latency)) fail("extra_latency", "must be >= 0");
  if (access_granularity == 0 || !std::has_single_bit(access_granularity)) {
    fail("granularity", "must be a power of two");
  }
  if (capacity < access_granularity) fail("capacity", "smaller than one access");
  if (pseudo_channels == 0) fail("pseudo_channels", "must be >= 1");
}

Time ChannelStats::busy_time() const {
  Time total = 0;
  for (const auto& lane : lanes) {
    for (const auto& iv : lane) total += iv.end - iv.start;
  }
  return total;
}

Channel::Channel(ChannelConfig config) : config_(config) {
  stats_.lanes.resize(config_.pseudo_channels);
  lane_free_.assign(config_.pseudo_channels, 0.0);
}

Time Channel::submit(std::uint64_t address, std::uint64_t size, bool is_write, Time now) {
  if (size == 0) throw Error(ErrorCode::AddressOutOfRange, "zero-sized request");
  if (address + size > config_.capacity || address + size < address) {
    throw Error(ErrorCode::AddressOutOfRange,
                "request [" + std::to_string(address) + ", +" + std::to_string(size) +
                    ") exceeds capacity " + std::to_string(config_.capacity));
  }
  const std::uint64_t g = config_.access_granularity;
  const std::uint64_t first = address / g;
  const std::uint64_t last = (address + size - 1) / g;
  const Time beat_time = static_cast<double>(g) / config_.bandwidth;

  Time completion = now;
  for (std::uint64_t beat = first; beat <= last; ++beat) {
    const auto lane = static_cast<std::size_t>(beat % config_.pseudo_channels);
    const Time start = std::max(now, lane_free_[lane]);
    const Time end = start + beat_time;
    lane_free_[lane] = end;

    auto& intervals = stats_.lanes[lane];
    if (!intervals.empty() && intervals.back().end == start) {
      intervals.back().end = end;
    } else {
      intervals.push_back({start, end});
    }

    auto bucket = static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(start - now)));
    if (stats_.queue_wait_histogram.size() <= bucket) stats_.queue_wait_histogram.resize(bucket + 1);
    ++stats_.queue_wait_histogram[bucket];
    ++stats_.beat_count;

    completion = std::max(completion, end + config_.total_latency());
  }

  const std::uint64_t moved = (last - first + 1) * g;
  if (is_write) {
    stats_.bytes_written += moved;
    stats_.requested_written += size;
  } else {
    stats_.bytes_read += moved;
    stats_.requested_read += size;
  }
  ++stats_.request_count;
  return completion;
}

std::uint32_t MemorySystem::add_channel(ChannelConfig config, std::string name) {
  channels_.emplace_back(config);
  names_.push_back(std::move(name));
  return static_cast<std::uint32_t>(channels_.size() - 1);
}

Time MemorySystem::submit(const MemRequest& req, Time now) {
  if (req.channel >= channels_.size()) {
    throw Error(ErrorCode::UnknownChannel, "channel " + std::to_string(req.channel));
  }
  return channels_[req.channel].submit(req.address, req.size, req.is_write, now);
}

double utilization(const ChannelStats& stats, Time window_start, Time window_end) {
  if (!(window_end > window_start)) {
    throw Error(ErrorCode::EmptyWindow, "window [" + std::to_string(window_start) + ", " +
                                            std::to_string(window_end) + ")");
  }
  if (stats.lanes.empty()) return 0.0;
  Time busy = 0;
  for (const auto& lane : stats.lanes) {
    auto it = std::upper_bound(lane.begin(), lane.end(), window_start,
                               [](Time t, const BusyInterval& iv) { return t < iv.end; });
    for (; it != lane.end() && it->start < window_end; ++it) {
      busy += std::min(it->end, window_end) - std::max(it->start, window_start);
    }
  }
  double u = busy / ((window_end - window_start) * static_cast<double>(stats.lanes.size()));
  return std::clamp(u, 0.0, 1.0);
}

std::vector<double> utilization_series(const ChannelStats& stats, Time window, Time horizon) {
  if (!(window > 0)) throw Error(ErrorCode::EmptyWindow, "window must be > 0");
  std::vector<double> out;
  if (!(horizon > 0)) return out;
  // Tolerate horizon/window landing a rounding error above an integer.
  auto count = static_cast<std::size_t>(std::ceil(horizon / window * (1.0 - 1e-12)));
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Time start = static_cast<double>(k) * window;
    Time end = (k + 1 == count) ? horizon : static_cast<double>(k + 1) * window;
    out.push_back(end > start ? utilization(stats, start, end) : 0.0);
  }
  return out;
}

}  // namespace tegra
