#pragma once

// Emulated pressure-sensor array behind bus multiplexers: addressed sensors,
// round-robin polling in address order, and a framed output stream with
// drop-oldest backpressure.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vinesense {

struct SensorAddress {
  int mux_index = 0;
  int channel = 0;  // 0..7
  std::string logical_id;
};

struct SensorReading {
  std::string logical_id;
  double gauge_pressure_kpa = 0.0;
  double timestamp_s = 0.0;
  std::uint64_t sequence = 0;
};

using PressureSource = std::function<double()>;

class SensorHub {
 public:
  static constexpr int kMaxSensors = 64;
  static constexpr int kMaxMultiplexers = 9;
  static constexpr int kChannelsPerMux = 8;

  // The sensor is polled from the next cycle on.
  void attach(const SensorAddress& address, PressureSource source);
  void detach(std::string_view logical_id);

  // One reading per attached sensor, ordered by (mux_index, channel).
  std::vector<SensorReading> poll_cycle(double now_s);

  std::size_t size() const { return active_.size() + pending_.size(); }
  std::uint64_t cycles() const { return cycles_; }
  // Addresses the next cycle will read, in read order.
  std::vector<SensorAddress> poll_order() const;

 private:
  struct Slot {
    SensorAddress address;
    PressureSource source;
    std::uint64_t next_sequence = 0;
  };
  using Key = std::pair<int, int>;

  void apply_pending();
  bool id_taken(std::string_view id) const;

  std::map<Key, Slot> active_;
  std::map<Key, Slot> pending_;
  std::vector<std::string> pending_detach_;
  std::uint64_t cycles_ = 0;
};

struct Frame {
  std::uint64_t cycle = 0;
  std::uint64_t dropped = 0;
  std::vector<SensorReading> readings;
};

// "<payload bytes>\n" followed by the payload: a header record
// {"cycle","n","dropped"} and one {"id","t","seq","p_kpa"} record per
// reading, each on its own line.
std::string encode_frame(const Frame& frame);

// Removes and decodes one complete frame from the front of `buffer`.
// Returns nullopt when the buffer does not yet hold a complete frame.
std::optional<Frame> decode_frame(std::string& buffer);

enum class SinkStatus { Accepted, Stalled, Closed };

class FrameSink {
 public:
  virtual ~FrameSink() = default;
  // Takes the whole frame or none of it.
  virtual SinkStatus offer(const std::string& frame_bytes) = 0;
};

class FrameStreamer {
 public:
  FrameStreamer(SensorHub& hub, FrameSink& sink, std::size_t buffer_frames = 4);

  // Polls once, queues the frame and flushes as much as the sink accepts.
  // Returns false once the sink has closed; no further frames are produced.
  bool cycle(double now_s);

  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t delivered() const { return delivered_; }
  std::size_t queued() const { return queue_.size(); }
  bool closed() const { return closed_; }

 private:
  void flush();

  SensorHub& hub_;
  FrameSink& sink_;
  std::size_t capacity_;
  std::deque<std::string> queue_;
  std::uint64_t dropped_ = 0;
  std::uint64_t delivered_ = 0;
  bool closed_ = false;
};

struct PollLoopStats {
  std::uint64_t cycles = 0;
  double max_jitter_s = 0.0;  // largest |actual - scheduled| cycle start
  double elapsed_s = 0.0;
};

// Drives the streamer on the wall clock at rate_hz for duration_s.
PollLoopStats run_poll_loop(FrameStreamer& streamer, double rate_hz, double duration_s);

}  // namespace vinesense
