#include <doctest.h>

#include <stdexcept>

#include <vector>

#include "rcs/metrics.hpp"

using namespace rcs;

namespace {

RxRecord make(std::uint64_t frame, int rx, double dist, RxOutcome outcome, Service service,
              TimeNs gen = 0, TimeNs recv = -1, TxPath path = TxPath::kG5) {
  RxRecord r;
  r.frame_id = frame;
  r.sender = 0;
  r.receiver = rx;
  r.distance_m = dist;
  r.generated_at = gen;
  r.received_at = recv;
  r.outcome = outcome;
  r.service = service;
  r.path = path;
  return r;
}

}  // namespace

TEST_CASE("pdr over the distance filter") {
  std::vector<RxRecord> records;

  SUBCASE("zero expected receptions is absent, not 0 or 1") {
    CHECK_FALSE(pdr(records, Service::kPcm, 200.0).has_value());
    records.push_back(make(1, 1, 50.0, RxOutcome::kDelivered, Service::kCam));
    CHECK_FALSE(pdr(records, Service::kPcm, 200.0).has_value());  // wrong service
  }

  SUBCASE("all delivered") {
    records.push_back(make(1, 1, 50.0, RxOutcome::kDelivered, Service::kPcm, 0, 1000));
    records.push_back(make(1, 2, 150.0, RxOutcome::kDelivered, Service::kPcm, 0, 1000));
    CHECK(pdr(records, Service::kPcm, 200.0).value() == 1.0);
  }

  SUBCASE("the 200 m filter excludes far receivers entirely") {
    records.push_back(make(1, 1, 150.0, RxOutcome::kDelivered, Service::kPcm, 0, 1000));
    records.push_back(make(1, 2, 250.0, RxOutcome::kLostWeak, Service::kPcm));
    CHECK(pdr(records, Service::kPcm, 200.0).value() == 1.0);
    CHECK(pdr(records, Service::kPcm, 300.0).value() == 0.5);
  }

  SUBCASE("losses of every kind count against the denominator") {
    records.push_back(make(1, 1, 10.0, RxOutcome::kDelivered, Service::kPcm, 0, 1000));
    records.push_back(make(1, 2, 20.0, RxOutcome::kLostCollision, Service::kPcm));
    records.push_back(make(1, 3, 30.0, RxOutcome::kLostWeak, Service::kPcm));
    records.push_back(make(2, 1, 40.0, RxOutcome::kLostQueue, Service::kPcm));
    CHECK(pdr(records, Service::kPcm, 200.0).value() == doctest::Approx(0.25));
  }
}

TEST_CASE("latency mean over delivered records") {
  std::vector<RxRecord> records;
  CHECK_FALSE(latency_mean_s(records, Service::kPcm).has_value());

  records.push_back(make(1, 1, 10.0, RxOutcome::kDelivered, Service::kPcm, 0, 519'000));
  records.push_back(
      make(2, 1, 10.0, RxOutcome::kDelivered, Service::kPcm, 1'000'000, 1'719'000));
  records.push_back(make(3, 1, 10.0, RxOutcome::kLostCollision, Service::kPcm, 0, -1));
  const double mean = latency_mean_s(records, Service::kPcm).value();
  CHECK(mean == doctest::Approx((519e-6 + 719e-6) / 2).epsilon(1e-12));
}

TEST_CASE("smoothed CBR recurrence") {
  CHECK(scbr_update(0.0, 0.8, 0.8) == doctest::Approx(0.4));
  // A constant series is a fixed point.
  CHECK(scbr_update(0.55, 0.55, 0.55) == doctest::Approx(0.55));

  // Output is a convex combination: always within [min, max] of the inputs.
  RxRecord dummy;  // silence unused warnings in some doctest expansions
  (void)dummy;
  double s = 0.0;
  const double cs[] = {0.1, 0.9, 0.3, 0.7, 0.0, 1.0, 0.42};
  double c_prev = 0.0;
  for (double c : cs) {
    const double next = scbr_update(s, c, c_prev);
    const double lo = std::min({s, c, c_prev});
    const double hi = std::max({s, c, c_prev});
    CHECK(next >= lo - 1e-15);
    CHECK(next <= hi + 1e-15);
    c_prev = c;
    s = next;
  }
  // Converges to the plateau value.
  for (int i = 0; i < 60; ++i) s = scbr_update(s, 0.62, 0.62);
  CHECK(s == doctest::Approx(0.62).epsilon(1e-9));
}

TEST_CASE("collector counts match the definitional identity") {
  MetricsCollector collector(seconds_to_ns(10.0), seconds_to_ns(20.0), 200.0);

  collector.add(make(1, 1, 50.0, RxOutcome::kDelivered, Service::kPcm, seconds_to_ns(11.0),
                     seconds_to_ns(11.1)));
  collector.add(make(1, 2, 100.0, RxOutcome::kLostCollision, Service::kPcm, seconds_to_ns(11.0)));
  collector.add(make(2, 1, 100.0, RxOutcome::kLostQueue, Service::kPcm, seconds_to_ns(12.0)));
  // Outside the window or beyond the cap: ignored.
  collector.add(make(3, 1, 50.0, RxOutcome::kDelivered, Service::kPcm, seconds_to_ns(9.0),
                     seconds_to_ns(9.1)));
  collector.add(make(4, 1, 500.0, RxOutcome::kDelivered, Service::kPcm, seconds_to_ns(12.0),
                     seconds_to_ns(12.1)));

  const NetStats& s = collector.stats();
  const int pcm = static_cast<int>(Service::kPcm);
  const int g5 = static_cast<int>(TxPath::kG5);
  CHECK(s.expected[pcm][g5] == 3);
  CHECK(s.delivered[pcm][g5] + s.losses(Service::kPcm, TxPath::kG5) == s.expected[pcm][g5]);
  CHECK(s.pdr_of(Service::kPcm, TxPath::kG5).value() == doctest::Approx(1.0 / 3.0));
  CHECK(s.latency_mean_of(Service::kPcm, TxPath::kG5).value() == doctest::Approx(0.1));
}

TEST_CASE("merging replications combines raw counts, not ratios") {
  NetStats a, b;
  const int i = static_cast<int>(Service::kPcm);
  const int j = static_cast<int>(TxPath::kG5);
  a.expected[i][j] = 10;
  a.delivered[i][j] = 9;  // 0.9
  b.expected[i][j] = 1000;
  b.delivered[i][j] = 500;  // 0.5
  a.merge(b);
  // Pooled ratio is dominated by the larger sample: (9+500)/1010.
  CHECK(a.pdr_of(Service::kPcm, TxPath::kG5).value() == doctest::Approx(509.0 / 1010.0));

  NetStats c;
  c.scbr_sum = 1.2;
  c.scbr_n = 2;
  NetStats d;
  d.scbr_sum = 0.3;
  d.scbr_n = 1;
  c.merge(d);
  CHECK(c.scbr_mean().value() == doctest::Approx(0.5));
}
