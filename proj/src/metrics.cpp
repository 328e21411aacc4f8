#include "rcs/metrics.hpp"

namespace rcs {

std::optional<double> pdr(std::span<const RxRecord> records, Service service,
                          double max_distance_m, TxPath path) {
  std::uint64_t expected = 0, delivered = 0;
  for (const RxRecord& r : records) {
    if (r.service != service || r.path != path) continue;
    if (r.distance_m > max_distance_m) continue;
    ++expected;
    if (r.outcome == RxOutcome::kDelivered) ++delivered;
  }
  if (expected == 0) return std::nullopt;
  return static_cast<double>(delivered) / static_cast<double>(expected);
}

std::optional<double> latency_mean_s(std::span<const RxRecord> records, Service service,
                                     TxPath path) {
  std::int64_t sum_ns = 0;
  std::uint64_t n = 0;
  for (const RxRecord& r : records) {
    if (r.service != service || r.path != path) continue;
    if (r.outcome != RxOutcome::kDelivered) continue;
    sum_ns += r.received_at - r.generated_at;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return ns_to_seconds(sum_ns) / static_cast<double>(n);
}

double scbr_update(double prev_s, double c_now, double c_prev) {
  return 0.5 * prev_s + 0.25 * (c_now + c_prev);
}

std::optional<double> NetStats::pdr_of(Service s, TxPath p) const {
  const auto e = expected[static_cast<int>(s)][static_cast<int>(p)];
  if (e == 0) return std::nullopt;
  return static_cast<double>(delivered[static_cast<int>(s)][static_cast<int>(p)]) /
         static_cast<double>(e);
}

std::optional<double> NetStats::latency_mean_of(Service s, TxPath p) const {
  const auto n = delivered[static_cast<int>(s)][static_cast<int>(p)];
  if (n == 0) return std::nullopt;
  return ns_to_seconds(latency_sum_ns[static_cast<int>(s)][static_cast<int>(p)]) /
         static_cast<double>(n);
}

std::optional<double> NetStats::scbr_mean() const {
  if (scbr_n == 0) return std::nullopt;
  return scbr_sum / static_cast<double>(scbr_n);
}

std::uint64_t NetStats::losses(Service s, TxPath p) const {
  const int i = static_cast<int>(s), j = static_cast<int>(p);
  return lost_collision[i][j] + lost_weak[i][j] + lost_queue[i][j];
}

void NetStats::merge(const NetStats& other) {
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      expected[i][j] += other.expected[i][j];
      delivered[i][j] += other.delivered[i][j];
      lost_collision[i][j] += other.lost_collision[i][j];
      lost_weak[i][j] += other.lost_weak[i][j];
      lost_queue[i][j] += other.lost_queue[i][j];
      latency_sum_ns[i][j] += other.latency_sum_ns[i][j];
    }
  }
  scbr_sum += other.scbr_sum;
  scbr_n += other.scbr_n;
}

MetricsCollector::MetricsCollector(TimeNs window_start, TimeNs window_end, double distance_cap_m)
    : start_(window_start), end_(window_end), cap_(distance_cap_m) {}

bool MetricsCollector::in_window(TimeNs generated_at) const {
  return generated_at >= start_ && generated_at < end_;
}

void MetricsCollector::add(const RxRecord& r) {
  if (!in_window(r.generated_at)) return;
  if (r.distance_m > cap_) return;
  const int i = static_cast<int>(r.service);
  const int j = static_cast<int>(r.path);
  ++stats_.expected[i][j];
  switch (r.outcome) {
    case RxOutcome::kDelivered:
      ++stats_.delivered[i][j];
      stats_.latency_sum_ns[i][j] += r.received_at - r.generated_at;
      break;
    case RxOutcome::kLostCollision: ++stats_.lost_collision[i][j]; break;
    case RxOutcome::kLostWeak: ++stats_.lost_weak[i][j]; break;
    case RxOutcome::kLostQueue: ++stats_.lost_queue[i][j]; break;
  }
}

void MetricsCollector::add_scbr_sample(double smoothed) {
  stats_.scbr_sum += smoothed;
  ++stats_.scbr_n;
}

}  // namespace rcs
