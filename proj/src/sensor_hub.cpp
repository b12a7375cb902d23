#include "vinesense/sensor_hub.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "vinesense/error.hpp"

namespace vinesense {

using ojson = nlohmann::ordered_json;

bool SensorHub::id_taken(std::string_view id) const {
  for (const auto* m : {&active_, &pending_})
    for (const auto& [k, slot] : *m)
      if (slot.address.logical_id == id) return true;
  return false;
}

void SensorHub::attach(const SensorAddress& address, PressureSource source) {
  if (address.mux_index < 0 || address.mux_index >= kMaxMultiplexers)
    throw Error(ErrorCode::InvalidArgument, "mux index out of range");
  if (address.channel < 0 || address.channel >= kChannelsPerMux)
    throw Error(ErrorCode::InvalidArgument, "channel out of range");
  if (!source) throw Error(ErrorCode::InvalidArgument, "sensor needs a pressure source");
  const Key key{address.mux_index, address.channel};
  if (active_.count(key) || pending_.count(key))
    throw Error(ErrorCode::AddressInUse,
                "mux " + std::to_string(key.first) + " channel " + std::to_string(key.second) + " is in use");
  if (id_taken(address.logical_id)) throw Error(ErrorCode::AddressInUse, "id " + address.logical_id + " is in use");
  if (size() >= static_cast<std::size_t>(kMaxSensors))
    throw Error(ErrorCode::CapacityExceeded, "hub holds at most 64 sensors");
  pending_.emplace(key, Slot{address, std::move(source), 0});
}

void SensorHub::detach(std::string_view logical_id) {
  for (auto it = pending_.begin(); it != pending_.end(); ++it) {
    if (it->second.address.logical_id == logical_id) {
      pending_.erase(it);
      return;
    }
  }
  pending_detach_.emplace_back(logical_id);
}

void SensorHub::apply_pending() {
  for (const auto& id : pending_detach_) {
    for (auto it = active_.begin(); it != active_.end(); ++it) {
      if (it->second.address.logical_id == id) {
        active_.erase(it);
        break;
      }
    }
  }
  pending_detach_.clear();
  active_.merge(pending_);
}

std::vector<SensorAddress> SensorHub::poll_order() const {
  std::map<Key, SensorAddress> next;
  for (const auto& [k, slot] : active_)
    if (std::find(pending_detach_.begin(), pending_detach_.end(), slot.address.logical_id) == pending_detach_.end())
      next.emplace(k, slot.address);
  for (const auto& [k, slot] : pending_) next.emplace(k, slot.address);
  std::vector<SensorAddress> out;
  for (auto& [k, a] : next) out.push_back(std::move(a));
  return out;
}

std::vector<SensorReading> SensorHub::poll_cycle(double now_s) {
  apply_pending();
  if (active_.empty()) throw Error(ErrorCode::EmptyHub, "no sensors attached");
  std::vector<SensorReading> out;
  out.reserve(active_.size());
  for (auto& [key, slot] : active_) {
    const double p = slot.source();
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "non-finite reading from " + slot.address.logical_id);
    out.push_back({slot.address.logical_id, p, now_s, slot.next_sequence++});
  }
  ++cycles_;
  return out;
}

std::string encode_frame(const Frame& frame) {
  std::string payload;
  ojson header;
  header["cycle"] = frame.cycle;
  header["n"] = frame.readings.size();
  header["dropped"] = frame.dropped;
  payload += header.dump();
  payload += '\n';
  for (const auto& r : frame.readings) {
    ojson rec;
    rec["id"] = r.logical_id;
    rec["t"] = r.timestamp_s;
    rec["seq"] = r.sequence;
    rec["p_kpa"] = r.gauge_pressure_kpa;
    payload += rec.dump();
    payload += '\n';
  }
  return std::to_string(payload.size()) + "\n" + payload;
}

std::optional<Frame> decode_frame(std::string& buffer) {
  const auto nl = buffer.find('\n');
  if (nl == std::string::npos) return std::nullopt;
  const std::size_t len = std::stoul(buffer.substr(0, nl));
  if (buffer.size() < nl + 1 + len) return std::nullopt;
  const std::string payload = buffer.substr(nl + 1, len);
  buffer.erase(0, nl + 1 + len);

  Frame f;
  std::size_t pos = 0;
  bool header = true;
  while (pos < payload.size()) {
    const auto end = payload.find('\n', pos);
    const auto rec = ojson::parse(payload.substr(pos, end - pos));
    pos = end == std::string::npos ? payload.size() : end + 1;
    if (header) {
      f.cycle = rec.at("cycle").get<std::uint64_t>();
      f.dropped = rec.at("dropped").get<std::uint64_t>();
      f.readings.reserve(rec.at("n").get<std::size_t>());
      header = false;
      continue;
    }
    f.readings.push_back({rec.at("id").get<std::string>(), rec.at("p_kpa").get<double>(), rec.at("t").get<double>(),
                          rec.at("seq").get<std::uint64_t>()});
  }
  return f;
}

FrameStreamer::FrameStreamer(SensorHub& hub, FrameSink& sink, std::size_t buffer_frames)
    : hub_(hub), sink_(sink), capacity_(buffer_frames) {
  if (capacity_ == 0) throw Error(ErrorCode::InvalidArgument, "frame buffer needs at least one slot");
}

bool FrameStreamer::cycle(double now_s) {
  if (closed_) return false;
  flush();  // the sink may have recovered since the last cycle
  if (closed_) return false;
  Frame frame;
  frame.cycle = hub_.cycles();
  frame.readings = hub_.poll_cycle(now_s);
  if (queue_.size() == capacity_) {
    queue_.pop_front();
    ++dropped_;
  }
  frame.dropped = dropped_;
  queue_.push_back(encode_frame(frame));
  flush();
  return !closed_;
}

void FrameStreamer::flush() {
  while (!queue_.empty()) {
    switch (sink_.offer(queue_.front())) {
      case SinkStatus::Accepted:
        queue_.pop_front();
        ++delivered_;
        break;
      case SinkStatus::Stalled:
        return;
      case SinkStatus::Closed:
        closed_ = true;
        queue_.clear();
        return;
    }
  }
}

PollLoopStats run_poll_loop(FrameStreamer& streamer, double rate_hz, double duration_s) {
  using clock = std::chrono::steady_clock;
  if (!(rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "poll rate must be positive");
  const auto period = std::chrono::duration<double>(1.0 / rate_hz);
  const auto n = static_cast<std::uint64_t>(std::llround(duration_s * rate_hz));
  PollLoopStats stats;
  const auto start = clock::now();
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto scheduled = start + std::chrono::duration_cast<clock::duration>(period * static_cast<double>(k));
    std::this_thread::sleep_until(scheduled);
    const auto actual = clock::now();
    const double jitter = std::abs(std::chrono::duration<double>(actual - scheduled).count());
    stats.max_jitter_s = std::max(stats.max_jitter_s, jitter);
    const bool open = streamer.cycle(std::chrono::duration<double>(actual - start).count());
    ++stats.cycles;
    if (!open) break;
  }
  stats.elapsed_s = std::chrono::duration<double>(clock::now() - start).count();
  return stats;
}

}  // namespace vinesense
