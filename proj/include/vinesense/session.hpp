#pragma once

// One live simulation with snapshot fan-out and an ordered command queue.
// A single driver advances the world; commands are applied between ticks;
// every tick produces one snapshot record delivered to all subscribers.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vinesense/commands.hpp"
#include "vinesense/scenario.hpp"
#include "vinesense/snapshot.hpp"

namespace vinesense {

struct SessionOptions {
  double speed = 1.0;  // sim seconds per wall second; 0 runs unpaced
  std::optional<double> stop_at_s;
  bool start_paused = false;
};

using ClientId = std::uint64_t;
using SnapshotCallback = std::function<void(const std::shared_ptr<const std::string>&)>;

class Session {
 public:
  explicit Session(Scenario scenario, SessionOptions options = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Drives the simulation on the calling thread until stop_at_s or stop().
  void run();
  void start();
  void stop();
  void join();
  bool finished() const { return finished_; }

  std::uint64_t subscribe(SnapshotCallback cb);
  void unsubscribe(std::uint64_t id);
  std::size_t subscriber_count() const;

  ClientId new_client();
  // Checks ownership and queues the command. Returns the reply record.
  std::string submit(ClientId client, const Command& cmd);
  void release(ClientId client);

  void report_dropped(std::uint64_t n) { dropped_ += n; }
  const Scenario& scenario() const { return scenario_; }

 private:
  void apply(const Command& cmd);
  void broadcast(const std::shared_ptr<const std::string>& line);

  Scenario scenario_;
  SessionOptions options_;
  std::unique_ptr<Simulation> sim_;
  std::vector<std::string> pocket_ids_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Command> pending_;
  bool stop_ = false;
  std::optional<ClientId> owner_;
  ClientId next_client_ = 1;

  mutable std::mutex subs_mu_;
  std::map<std::uint64_t, SnapshotCallback> subs_;
  std::uint64_t next_sub_ = 1;

  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<bool> finished_{false};
  bool paused_ = false;
  std::uint64_t epoch_ = 0;
  std::uint64_t commands_ = 0;
  std::thread thread_;
};

// Runs a scenario to its end on the calling thread and hands every snapshot
// record to on_record. Returns the number of ticks run.
std::uint64_t run_headless(const Scenario& scenario, double speed,
                           const std::function<void(const std::string&)>& on_record);

}  // namespace vinesense
