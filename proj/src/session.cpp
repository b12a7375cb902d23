#include "vinesense/session.hpp"

#include <chrono>

namespace vinesense {

Session::Session(Scenario scenario, SessionOptions options)
    : scenario_(std::move(scenario)), options_(options), paused_(options.start_paused) {
  sim_ = std::make_unique<Simulation>(scenario_.setup);
  for (const auto& p : sim_->pockets()) pocket_ids_.push_back(p.pocket_id);
}

Session::~Session() {
  stop();
  join();
}

void Session::start() { thread_ = std::thread([this] { run(); }); }

void Session::stop() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
}

void Session::join() {
  if (thread_.joinable()) thread_.join();
}

std::uint64_t Session::subscribe(SnapshotCallback cb) {
  std::lock_guard lock(subs_mu_);
  const auto id = next_sub_++;
  subs_.emplace(id, std::move(cb));
  return id;
}

void Session::unsubscribe(std::uint64_t id) {
  std::lock_guard lock(subs_mu_);
  subs_.erase(id);
}

std::size_t Session::subscriber_count() const {
  std::lock_guard lock(subs_mu_);
  return subs_.size();
}

ClientId Session::new_client() {
  std::lock_guard lock(mu_);
  return next_client_++;
}

std::string Session::submit(ClientId client, const Command& cmd) {
  std::unique_lock lock(mu_);
  if (owner_ && *owner_ != client)
    return error_record(cmd.req, ErrorCode::NotOwner, "another client owns this session");
  if (cmd.kind == CommandKind::Touch && cmd.touch.pocket_id) {
    bool known = false;
    for (const auto& id : pocket_ids_) known = known || id == *cmd.touch.pocket_id;
    if (!known) return error_record(cmd.req, ErrorCode::MalformedCommand, "unknown pocket " + *cmd.touch.pocket_id);
  }
  owner_ = client;
  pending_.push_back(cmd);
  lock.unlock();
  cv_.notify_all();
  return ack_record(cmd.req, cmd.kind);
}

void Session::release(ClientId client) {
  std::lock_guard lock(mu_);
  if (owner_ == client) owner_.reset();
}

void Session::broadcast(const std::shared_ptr<const std::string>& line) {
  std::vector<SnapshotCallback> targets;
  {
    std::lock_guard lock(subs_mu_);
    for (const auto& [id, cb] : subs_) targets.push_back(cb);
  }
  for (const auto& cb : targets) cb(line);
}

void Session::apply(const Command& cmd) {
  ++commands_;
  switch (cmd.kind) {
    case CommandKind::Touch: sim_->apply_touch(cmd.touch); break;
    case CommandKind::Pause: paused_ = true; break;
    case CommandKind::Resume: paused_ = false; break;
    case CommandKind::Reset:
      sim_ = std::make_unique<Simulation>(scenario_.setup);
      ++epoch_;
      break;
    case CommandKind::Config: sim_->set_controller_config(cmd.config.applied_to(sim_->controller_config())); break;
  }
}

void Session::run() {
  using clock = std::chrono::steady_clock;
  const double dt = scenario_.setup.sim.dt;
  auto anchor = clock::now();
  std::uint64_t anchor_tick = sim_->ticks();
  std::uint64_t anchor_epoch = epoch_;

  for (;;) {
    std::deque<Command> batch;
    {
      std::unique_lock lock(mu_);
      if (paused_ && pending_.empty() && !stop_) cv_.wait_for(lock, std::chrono::milliseconds(50));
      if (stop_) break;
      batch.swap(pending_);
    }
    const bool was_paused = paused_;
    for (const auto& c : batch) apply(c);
    if (paused_) continue;
    if (was_paused || epoch_ != anchor_epoch) {
      anchor = clock::now();
      anchor_tick = sim_->ticks();
      anchor_epoch = epoch_;
    }
    if (options_.stop_at_s && sim_->time() >= *options_.stop_at_s - kTimeSlack) break;

    sim_->tick();
    SessionCounters counters;
    counters.epoch = epoch_;
    counters.commands = commands_;
    counters.dropped = dropped_;
    broadcast(std::make_shared<const std::string>(to_record(take_snapshot(*sim_, counters))));

    if (options_.speed > 0.0) {
      const auto target =
          anchor + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(
                       static_cast<double>(sim_->ticks() - anchor_tick) * dt / options_.speed));
      std::unique_lock lock(mu_);
      cv_.wait_until(lock, target, [this] { return stop_; });
    }
  }
  finished_ = true;
}

std::uint64_t run_headless(const Scenario& scenario, double speed,
                           const std::function<void(const std::string&)>& on_record) {
  SessionOptions opts;
  opts.speed = speed;
  opts.stop_at_s = scenario.duration_s;
  Session session(scenario, opts);
  std::uint64_t n = 0;
  session.subscribe([&](const std::shared_ptr<const std::string>& line) {
    ++n;
    on_record(*line);
  });
  session.run();
  return n;
}

}  // namespace vinesense
