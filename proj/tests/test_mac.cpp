#include <doctest.h>

#include <stdexcept>

#include <memory>
#include <vector>

#include "rcs/mac.hpp"

using namespace rcs;

namespace {

constexpr double kRate = 6e6;

// Drives one EdcaMac against a scripted medium. Transmissions mark the
// medium busy for their airtime, mirroring the integrated wiring.
struct MacHarness {
  Engine engine;
  std::unique_ptr<EdcaMac> mac;
  std::vector<std::pair<FrameDescriptor, TimeNs>> sent;
  std::vector<FrameDescriptor> dropped;
  bool auto_busy_during_tx = true;

  explicit MacHarness(std::uint64_t seed = 7) {
    engine.set_handler([this](const Event& e) {
      if (e.kind == EventKind::kAccessAttempt) {
        mac->on_access_event(static_cast<int>(e.a), e.b, e.time);
      } else if (e.kind == EventKind::kTxEnd) {
        if (auto_busy_during_tx) mac->on_medium_busy(false, e.time);
        mac->on_own_tx_end(e.time);
      }
    });
    EdcaMac::Callbacks cb;
    cb.transmit = [this](const FrameDescriptor& f, TimeNs now) {
      sent.emplace_back(f, now);
      if (auto_busy_during_tx) mac->on_medium_busy(true, now);
      engine.schedule(now + airtime_ns(f.payload_bytes, kRate), EventKind::kTxEnd, 0);
    };
    cb.queue_drop = [this](const FrameDescriptor& f, TimeNs) { dropped.push_back(f); };
    mac = std::make_unique<EdcaMac>(
        engine, 0, RngStream::vehicle_stream(seed, 0, RngStream::Purpose::kBackoff),
        std::move(cb));
  }

  FrameDescriptor frame(TrafficClass tc, Service service, int payload,
                        std::uint64_t id) const {
    FrameDescriptor f;
    f.frame_id = id;
    f.sender = 0;
    f.payload_bytes = payload;
    f.traffic_class = tc;
    f.generated_at = engine.now();
    f.service = service;
    return f;
  }
};

// Same draw sequence the MAC will see for this (seed, node).
std::vector<std::uint32_t> expected_draws(std::uint64_t seed, int count, std::uint32_t bound) {
  RngStream rng = RngStream::vehicle_stream(seed, 0, RngStream::Purpose::kBackoff);
  std::vector<std::uint32_t> draws;
  for (int i = 0; i < count; ++i) draws.push_back(rng.next_below(bound));
  return draws;
}

}  // namespace

TEST_CASE("airtime arithmetic") {
  CHECK(airtime_ns(285, 6e6) == 424'000);
  CHECK(airtime_ns(301, 6e6) == 448'000);
  CHECK(airtime_ns(0, 6e6) == 48'000);  // one symbol carries service+tail
  CHECK(airtime_ns(285, 3e6) == 808'000);
  CHECK(airtime_ns(285, 12e6) == 232'000);
  CHECK_THROWS_AS(airtime_ns(100, 9e6), std::invalid_argument);
  CHECK_THROWS_AS(airtime_ns(-1, 6e6), std::invalid_argument);
}

TEST_CASE("EDCA profile ordering") {
  const auto& table = edca_table();
  CHECK(table[0].aifsn == 2);
  CHECK(table[1].aifsn == 3);
  CHECK(table[2].aifsn == 6);
  CHECK(table[3].aifsn == 9);
  for (const AccessCategory& ac : table) {
    CHECK(ac.aifsn >= 2);
    CHECK(ac.cw_min <= ac.cw_max);
  }
  CHECK(aifs_ns(table[1]) == 32'000 + 3 * 13'000);
  CHECK(ac_index_for(TrafficClass::kTc1) == 1);
  CHECK(ac_index_for(TrafficClass::kTc2) == 2);
}

TEST_CASE("idle-channel access delay is exactly AIFS + backoff slots") {
  const std::uint64_t seed = 21;
  MacHarness h(seed);
  const auto draw = expected_draws(seed, 1, 8)[0];  // AC_VI: cw_min 7

  h.mac->enqueue(h.frame(TrafficClass::kTc1, Service::kPcm, 301, 1), 0);
  h.engine.run_until(10'000'000);

  REQUIRE(h.sent.size() == 1);
  const TimeNs expected = aifs_ns(edca_table()[1]) + draw * kSlotNs;
  CHECK(h.sent[0].second == expected);
  // Latency to full reception on an idle channel: AIFS + backoff + airtime.
  CHECK(h.sent[0].second + airtime_ns(301, kRate) == expected + 448'000);
}

TEST_CASE("a node never overlaps its own transmissions") {
  MacHarness h(3);
  for (int i = 0; i < 5; ++i) {
    h.mac->enqueue(h.frame(TrafficClass::kTc1, Service::kPcm, 301, 10 + i), 0);
  }
  h.engine.run_until(100'000'000);
  REQUIRE(h.sent.size() == 5);
  for (std::size_t i = 1; i < h.sent.size(); ++i) {
    CHECK(h.sent[i].second >= h.sent[i - 1].second + airtime_ns(301, kRate));
  }
  // Broadcast frames go out exactly once each.
  for (int i = 0; i < 5; ++i) {
    int count = 0;
    for (const auto& [f, t] : h.sent) count += f.frame_id == 10ull + i;
    CHECK(count == 1);
  }
}

TEST_CASE("backoff freezes during busy and resumes after a fresh AIFS") {
  const std::uint64_t seed = 57;
  const auto draw = expected_draws(seed, 1, 8)[0];
  if (draw < 2) return;  // this scripted scenario needs at least two slots

  MacHarness h(seed);
  h.auto_busy_during_tx = false;  // medium fully scripted by hand below
  const TimeNs aifs = aifs_ns(edca_table()[1]);

  h.mac->enqueue(h.frame(TrafficClass::kTc1, Service::kPcm, 301, 1), 0);
  // Busy arrives one slot plus a fraction into the countdown.
  const TimeNs busy_at = aifs + kSlotNs + 5'000;
  const TimeNs idle_at = busy_at + 1'000'000;
  h.engine.run_until(busy_at);
  h.mac->on_medium_busy(true, busy_at);
  h.engine.run_until(idle_at);
  h.mac->on_medium_busy(false, idle_at);
  h.engine.run_until(idle_at + 10'000'000);

  REQUIRE(h.sent.size() == 1);
  // One full slot was consumed before the busy period; the fractional slot
  // does not count. The cycle resumes with a full AIFS.
  const TimeNs expected = idle_at + aifs + (draw - 1) * kSlotNs;
  CHECK(h.sent[0].second == expected);
}

TEST_CASE("enqueue on a busy medium defers until idle") {
  MacHarness h(5);
  h.auto_busy_during_tx = false;
  h.mac->on_medium_busy(true, 0);
  h.mac->enqueue(h.frame(TrafficClass::kTc1, Service::kPcm, 301, 1), 0);
  h.engine.run_until(5'000'000);
  CHECK(h.sent.empty());  // no attempt while busy
  h.mac->on_medium_busy(false, 5'000'000);
  h.engine.run_until(15'000'000);
  REQUIRE(h.sent.size() == 1);
  CHECK(h.sent[0].second >= 5'000'000 + aifs_ns(edca_table()[1]));
}

TEST_CASE("queue overflow drops the oldest frame") {
  MacHarness h(9);
  h.auto_busy_during_tx = false;
  h.mac->on_medium_busy(true, 0);  // hold everything in the queue
  for (int i = 0; i < EdcaMac::kQueueCap + 1; ++i) {
    h.mac->enqueue(h.frame(TrafficClass::kTc1, Service::kPcm, 301, 100 + i), 0);
  }
  REQUIRE(h.dropped.size() == 1);
  CHECK(h.dropped[0].frame_id == 100);  // oldest
  CHECK(h.mac->drops() == 1);
  h.mac->on_medium_busy(false, 1'000'000);
  h.engine.run_until(200'000'000);
  CHECK(h.sent.size() == EdcaMac::kQueueCap);
  CHECK(h.sent[0].first.frame_id == 101);
}

TEST_CASE("internal contention: higher priority wins, loser re-draws") {
  // Find a seed whose first two draws make AC_VO and AC_VI countdowns expire
  // at the same instant: AIFS_VO + k0*slot == AIFS_VI + k1*slot, i.e. k0 == k1 + 1.
  std::uint64_t seed = 0;
  bool found = false;
  for (std::uint64_t s = 0; s < 4000 && !found; ++s) {
    RngStream rng = RngStream::vehicle_stream(s, 0, RngStream::Purpose::kBackoff);
    const auto k0 = rng.next_below(4);
    const auto k1 = rng.next_below(8);
    if (k0 == k1 + 1) {
      seed = s;
      found = true;
    }
  }
  REQUIRE(found);

  MacHarness h(seed);
  h.mac->enqueue(h.frame(TrafficClass::kTc0, Service::kPcm, 301, 1), 0);
  h.mac->enqueue(h.frame(TrafficClass::kTc1, Service::kPcm, 301, 2), 0);
  h.engine.run_until(100'000'000);

  REQUIRE(h.sent.size() == 2);
  CHECK(h.sent[0].first.traffic_class == TrafficClass::kTc0);
  CHECK(h.sent[1].first.traffic_class == TrafficClass::kTc1);
  CHECK(h.sent[1].second > h.sent[0].second);
}

TEST_CASE("simultaneous PCM and CAM on an idle channel: PCM wins") {
  // AC_VI's AIFS (71 us) plus its worst draw (7 slots = 91 us) stays below
  // AC_BE's bare AIFS (110 us), so a PCM always beats a CAM queued together.
  MacHarness h(13);
  h.mac->enqueue(h.frame(TrafficClass::kTc2, Service::kCam, 285, 1), 0);
  h.mac->enqueue(h.frame(TrafficClass::kTc1, Service::kPcm, 301, 2), 0);
  h.engine.run_until(100'000'000);
  REQUIRE(h.sent.size() == 2);
  CHECK(h.sent[0].first.service == Service::kPcm);
}

TEST_CASE("unicast mode retries with CW doubling and gives up after 7") {
  MacHarness h(31);
  FrameDescriptor f = h.frame(TrafficClass::kTc1, Service::kPcm, 301, 1);
  f.broadcast = false;
  f.dest = 42;
  h.mac->enqueue(f, 0);

  int attempts = 0;
  for (int round = 0; round < 1 + EdcaMac::kMaxRetries; ++round) {
    h.engine.run_until(h.engine.now() + 50'000'000);
    REQUIRE(static_cast<int>(h.sent.size()) == attempts + 1);
    ++attempts;
    const auto result = h.mac->on_unicast_result(false, h.engine.now());
    if (round < EdcaMac::kMaxRetries) {
      CHECK(result == EdcaMac::UnicastResult::kRetry);
    } else {
      CHECK(result == EdcaMac::UnicastResult::kDropped);
    }
  }
  CHECK(attempts == 1 + EdcaMac::kMaxRetries);

  // An ACKed frame completes immediately.
  h.mac->enqueue(f, h.engine.now());
  h.engine.run_until(h.engine.now() + 50'000'000);
  CHECK(h.mac->on_unicast_result(true, h.engine.now()) == EdcaMac::UnicastResult::kCompleted);
}
