#include <doctest.h>

#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <json.hpp>

#include "vinesense/cli.hpp"
#include "vinesense/commands.hpp"
#include "vinesense/server.hpp"
#include "vinesense/session.hpp"
#include "vinesense/snapshot.hpp"

using namespace vinesense;
using json = nlohmann::json;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

Scenario scenario_from(const std::string& text, const std::string& name = "inline") {
  std::istringstream in(text);
  return parse_scenario(in, name);
}

class WsClient {
 public:
  explicit WsClient(unsigned short port) {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }

  json read() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }

  std::string read_raw() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return beast::buffers_to_string(buf.data());
  }

  void send(const std::string& text) { ws_.write(net::buffer(text)); }

  // Reads until the reply to `req`, keeping the snapshots seen meanwhile.
  json reply_to(const std::string& req, std::vector<json>* snapshots = nullptr) {
    for (int i = 0; i < 100000; ++i) {
      auto msg = read();
      if (msg.contains("req")) {
        if (msg["req"] == req) return msg;
        continue;
      }
      if (snapshots) snapshots->push_back(std::move(msg));
    }
    FAIL("no reply to " << req);
    return {};
  }

  void close() { ws_.close(websocket::close_code::normal); }

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_{ioc_};
};

void wait_for(const std::function<bool()>& cond) {
  for (int i = 0; i < 500 && !cond(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  REQUIRE(cond());
}

ServerOptions ephemeral(std::size_t queue = 1024) {
  ServerOptions o;
  o.port = 0;
  o.send_queue_limit = queue;
  return o;
}

const char* kSearchRight =
    R"({"type":"world","seed":5,"initial_length_cm":27.5,"initial_state":"searching_right","duration_s":60})";

}  // namespace

TEST_CASE("command parsing") {
  auto c = parse_command(R"({"req":"a1","kind":"touch","force_n":3,"duration_s":2,"x":1.5,"y":-2})");
  CHECK(c.req == "a1");
  CHECK(c.kind == CommandKind::Touch);
  CHECK(c.touch.force_n == 3.0);
  CHECK(c.touch.duration_s == 2.0);
  CHECK(c.touch.position.x() == 1.5);
  CHECK_FALSE(c.touch.pocket_id);

  c = parse_command(R"({"req":7,"kind":"touch","force_n":1,"pocket":"R0"})");
  CHECK(c.req == "7");
  CHECK(*c.touch.pocket_id == "R0");

  c = parse_command(R"({"req":"c","kind":"config","contact_threshold_kpa":1.2})");
  CHECK(c.kind == CommandKind::Config);
  CHECK(c.config.applied_to({}).contact_threshold_kpa == 1.2);
  CHECK(c.config.applied_to({}).grow_timeout_s == 12.0);

  for (const char* k : {"pause", "resume", "reset"})
    CHECK_NOTHROW(parse_command(std::string(R"({"req":"x","kind":")") + k + "\"}"));
}

TEST_CASE("malformed commands") {
  auto code_and_req = [](const std::string& line) {
    try {
      parse_command(line);
    } catch (const CommandError& e) {
      return std::make_pair(e.code(), e.req());
    }
    FAIL("accepted " << line);
    return std::make_pair(ErrorCode::InvalidArgument, std::string());
  };
  CHECK(code_and_req("nope").first == ErrorCode::MalformedCommand);
  CHECK(code_and_req(R"({"req":"n","kind":"touch","force_n":-1,"pocket":"R0"})") ==
        std::make_pair(ErrorCode::MalformedCommand, std::string("n")));
  CHECK(code_and_req(R"({"req":"n","kind":"touch","force_n":51,"pocket":"R0"})").first == ErrorCode::MalformedCommand);
  CHECK(code_and_req(R"({"req":"n","kind":"touch","force_n":1,"duration_s":0,"pocket":"R0"})").first ==
        ErrorCode::MalformedCommand);
  CHECK(code_and_req(R"({"req":"n","kind":"touch","force_n":1,"x":3})").first == ErrorCode::MalformedCommand);
  CHECK(code_and_req(R"({"req":"n","kind":"fly"})").first == ErrorCode::MalformedCommand);
  CHECK(code_and_req(R"({"req":"n","kind":"config","grow_timeout_s":-2})").first == ErrorCode::MalformedCommand);

  const auto rec = json::parse(error_record("q", ErrorCode::NotOwner, "busy"));
  CHECK(rec["req"] == "q");
  CHECK(rec["error"] == "NOT_OWNER");
  CHECK(json::parse(ack_record("q", CommandKind::Reset))["ack"] == "reset");
}

TEST_CASE("snapshot record layout") {
  Simulation sim(scenario_from(kSearchRight).setup);
  sim.tick();
  const auto text = to_record(take_snapshot(sim, {}));
  CHECK(text.find('\n') == std::string::npos);
  const auto rec = json::parse(text);
  std::vector<std::string> keys;
  for (auto it = rec.begin(); it != rec.end(); ++it) keys.push_back(it.key());
  // nlohmann::json sorts keys; check presence rather than order here.
  for (const char* k : {"t", "state", "body", "pockets", "actuators", "counters"}) CHECK(rec.contains(k));
  CHECK(text.rfind("{\"t\":", 0) == 0);
  CHECK(rec["state"] == "searching_right");
  CHECK(rec["body"]["grown_length"].get<double>() == doctest::Approx(27.5));
  CHECK(rec["body"]["points"].size() == 29);
  REQUIRE(rec["pockets"].size() == 6);
  CHECK(rec["pockets"][3]["pocket_id"] == "R0");
  CHECK(rec["pockets"][3]["side"] == "right");
  const double p = rec["pockets"][3]["gauge_pressure"];
  const double f = rec["pockets"][3]["estimated_force"];
  CHECK(f == doctest::Approx((p - 0.4) / 0.38).epsilon(1e-12));
  CHECK(rec["actuators"]["grow"] == false);
  CHECK(rec["counters"]["tick"] == 1);
  CHECK(rec["counters"]["frames"] == 1);
}

TEST_CASE("session applies commands between ticks") {
  SessionOptions opts;
  opts.speed = 0.0;
  opts.stop_at_s = 2.0;
  opts.start_paused = true;
  Session session(scenario_from(kSearchRight), opts);
  std::vector<std::string> records;
  session.subscribe([&](const std::shared_ptr<const std::string>& r) { records.push_back(*r); });

  const auto a = session.new_client();
  const auto b = session.new_client();
  CHECK(json::parse(session.submit(a, parse_command(R"({"req":"1","kind":"touch","force_n":10,"pocket":"R0"})")))["ack"] ==
        "touch");
  const auto refused = json::parse(session.submit(b, parse_command(R"({"req":"2","kind":"pause"})")));
  CHECK(refused["error"] == "NOT_OWNER");
  const auto unknown = json::parse(session.submit(a, parse_command(R"({"req":"3","kind":"touch","force_n":1,"pocket":"Q9"})")));
  CHECK(unknown["error"] == "MALFORMED_COMMAND");
  session.submit(a, parse_command(R"({"req":"4","kind":"resume"})"));
  session.run();

  REQUIRE(records.size() == 40);
  const auto first = json::parse(records.front());
  CHECK(first["counters"]["commands"] == 2);
  bool grew = false;
  for (const auto& r : records) grew = grew || json::parse(r)["state"] == "growing_right";
  CHECK(grew);

  session.release(a);
  CHECK(json::parse(session.submit(b, parse_command(R"({"req":"5","kind":"pause"})")))["ack"] == "pause");
}

TEST_CASE("reset restarts the world and bumps the epoch") {
  SessionOptions opts;
  opts.speed = 0.0;
  opts.stop_at_s = 1.0;
  Session session(scenario_from(kSearchRight), opts);
  std::vector<json> records;
  const auto c = session.new_client();
  session.subscribe([&](const std::shared_ptr<const std::string>& r) {
    records.push_back(json::parse(*r));
    if (records.size() == 10) session.submit(c, parse_command(R"({"req":"r","kind":"reset"})"));
  });
  session.run();
  REQUIRE(records.size() == 30);
  CHECK(records[9]["counters"]["epoch"] == 0);
  CHECK(records[10]["counters"]["epoch"] == 1);
  CHECK(records[10]["counters"]["tick"] == 1);
  CHECK(records[10]["t"].get<double>() == doctest::Approx(0.05));
}

TEST_CASE("bind strings") {
  CHECK(parse_bind("127.0.0.1:9000").port == 9000);
  CHECK(parse_bind("9001").address == "0.0.0.0");
  CHECK(parse_bind("localhost:1").address == "127.0.0.1");
  CHECK_THROWS_AS(parse_bind("host:99999"), Error);
}

TEST_CASE("served touch during a right search turns into right growth") {
  SessionOptions opts;
  opts.speed = 5.0;
  Session session(scenario_from(kSearchRight), opts);
  Server server(session, ephemeral());
  server.start();
  WsClient client(server.port());
  wait_for([&] { return session.subscriber_count() == 1; });
  session.start();

  auto snap = client.read();
  while (snap.contains("req")) snap = client.read();
  CHECK(snap["state"] == "searching_right");

  client.send(R"({"req":"t1","kind":"touch","force_n":10,"duration_s":5,"pocket":"R0"})");
  std::vector<json> seen;
  const auto ack = client.reply_to("t1", &seen);
  CHECK(ack["ack"] == "touch");
  const std::uint64_t at_ack = seen.empty() ? snap["counters"]["tick"].get<std::uint64_t>()
                                            : seen.back()["counters"]["tick"].get<std::uint64_t>();
  std::optional<std::uint64_t> grew_at;
  for (int i = 0; i < 200 && !grew_at; ++i) {
    auto msg = client.read();
    if (msg.contains("req")) continue;
    if (msg["state"] == "growing_right") grew_at = msg["counters"]["tick"].get<std::uint64_t>();
  }
  REQUIRE(grew_at);
  // The pressure needs a few ticks to build through the pocket lag.
  CHECK(*grew_at - at_ack < 20);

  client.send(R"({"req":"bad","kind":"touch","force_n":-1,"pocket":"R0"})");
  const auto err = client.reply_to("bad");
  CHECK(err["error"] == "MALFORMED_COMMAND");
  // Still streaming afterwards.
  std::vector<json> after;
  client.send(R"({"req":"p","kind":"pause"})");
  CHECK(client.reply_to("p", &after)["ack"] == "pause");

  client.close();
  session.stop();
  session.join();
  server.stop();
}

TEST_CASE("a second client cannot take over command ownership") {
  SessionOptions opts;
  opts.speed = 2.0;
  Session session(scenario_from(kSearchRight), opts);
  Server server(session, ephemeral());
  server.start();
  session.start();
  {
    WsClient first(server.port());
    WsClient second(server.port());
    first.send(R"({"req":"a","kind":"pause"})");
    CHECK(first.reply_to("a")["ack"] == "pause");
    second.send(R"({"req":"b","kind":"resume"})");
    const auto refused = second.reply_to("b");
    CHECK(refused["error"] == "NOT_OWNER");
    first.close();
    // Ownership frees up once the owner disconnects.
    bool accepted = false;
    for (int i = 0; i < 50 && !accepted; ++i) {
      second.send(R"({"req":"c","kind":"resume"})");
      accepted = second.reply_to("c").contains("ack");
      if (!accepted) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    CHECK(accepted);
    second.close();
  }
  session.stop();
  session.join();
  server.stop();
}

TEST_CASE("served and headless runs produce the same trace") {
  auto sc = load_scenario(VINESENSE_SCENARIO_DIR "/small_object.jsonl");
  std::vector<std::string> headless;
  run_headless(sc, 0.0, [&](const std::string& r) { headless.push_back(r); });
  REQUIRE(headless.size() == 2400);

  SessionOptions opts;
  opts.speed = 0.0;
  opts.stop_at_s = sc.duration_s;
  Session session(sc, opts);
  Server server(session, ephemeral(1u << 20));
  server.start();
  WsClient client(server.port());
  wait_for([&] { return session.subscriber_count() == 1; });
  session.start();
  std::vector<std::string> served;
  while (served.size() < headless.size()) served.push_back(client.read_raw());
  session.join();
  CHECK(served == headless);
  client.close();
  server.stop();
}
