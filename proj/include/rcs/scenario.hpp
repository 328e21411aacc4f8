#pragma once

#include <cstdint>
#include <vector>

#include "rcs/units.hpp"

namespace rcs {

/// ETSI kinematic CAM trigger thresholds.
struct CamRules {
  double heading_delta_deg = 4.0;
  double position_delta_m = 4.0;
  double speed_delta_mps = 0.5;
  double t_min_s = 0.1;
  double t_max_s = 1.0;

  void validate() const;
};

struct ScenarioConfig {
  double road_length_m = 5000.0;
  int lanes_per_direction = 4;
  double density_veh_per_km_lane = 30.0;
  double speed_mps = 22.2;
  int platoon_size = 4;
  double penetration_rate = 0.0;
  double warmup_s = 120.0;
  double measure_s = 30.0;
  std::uint64_t seed = 1;
  double pcm_period_s = 0.5;
  CamRules cam_rules;
  bool member_cam_suppression = true;
  double vehicle_length_m = 16.0;  // tractor-trailer
  double initial_gap_m = 20.0;     // intra-platoon bumper gap at build time

  void validate() const;  // throws std::invalid_argument
};

enum class Direction : std::uint8_t { kEast = 0, kWest = 1 };
enum class Role : std::uint8_t { kLeader = 0, kMember = 1 };

struct Vehicle {
  int id = -1;
  int lane = -1;  // lane index within its direction
  Direction direction = Direction::kEast;
  double position_m = 0.0;  // front bumper along the ring at t = 0
  double speed_mps = 0.0;
  double length_m = 16.0;
  Role role = Role::kMember;
  int platoon_id = -1;
  bool radcom_equipped = false;
};

struct Platoon {
  int id = -1;
  std::vector<int> ordered_members;  // front to back; index 0 is the leader
  std::vector<double> gaps_m;        // bumper gaps between consecutive members
  bool radcom_enabled = false;
};

/// Immutable snapshot of road, vehicles and platoons. Vehicles move at
/// constant speed on a circular track so positions at any time are analytic.
struct World {
  double road_length_m = 0.0;
  std::vector<Vehicle> vehicles;
  std::vector<Platoon> platoons;

  double signed_speed(int vehicle) const {
    const Vehicle& v = vehicles[static_cast<std::size_t>(vehicle)];
    return v.direction == Direction::kEast ? v.speed_mps : -v.speed_mps;
  }
};

double wrap_position(double x, double road_length);
double ring_distance(double a, double b, double road_length);

/// Builds the world deterministically from the configuration.
/// Throws std::invalid_argument when the requested packing cannot fit.
World build_world(const ScenarioConfig& config);

/// Enables RadCom on floor(rate * platoon_count) platoons chosen by a seeded
/// shuffle. The shuffle depends on the seed only, so enabled sets are nested
/// across rates (rate r1 < r2 implies enabled(r1) is a subset of enabled(r2)).
World assign_penetration(World world, double rate, std::uint64_t seed);

/// Sorted-by-position index over the two direction groups; answers
/// ring-range queries at any simulation time in O(log n + matches).
class RingIndex {
 public:
  explicit RingIndex(const World& world);

  double position_at(int vehicle, double t_s) const;
  double ring_distance_at(int a, int b, double t_s) const;

  /// Calls f(vehicle_id, distance) for every vehicle within `radius` of
  /// vehicle `ref` at time t_s, excluding ref itself. Iteration order is
  /// deterministic: east group ascending, then west group ascending.
  template <class F>
  void for_each_in_range(int ref, double t_s, double radius, F&& f) const {
    const double p = position_at(ref, t_s);
    for_each_in_group(east_, ref, p, t_s, radius, f);
    for_each_in_group(west_, ref, p, t_s, radius, f);
  }

  struct Group {
    double velocity = 0.0;  // signed along the ring
    std::vector<double> x0;
    std::vector<int> id;
  };

  const Group& east() const { return east_; }
  const Group& west() const { return west_; }
  const Group& group_of(int vehicle) const;
  double road_length() const { return length_; }

  template <class F>
  void for_each_in_group(const Group& g, int ref, double ref_pos, double t_s, double radius,
                         F&& f) const {
    const double shift = g.velocity * t_s;
    const std::size_t n = g.x0.size();
    if (n == 0) return;
    if (2.0 * radius >= length_) {
      for (std::size_t i = 0; i < n; ++i) {
        if (g.id[i] == ref) continue;
        const double d = ring_distance(g.x0[i] + shift, ref_pos, length_);
        if (d <= radius) f(g.id[i], d);
      }
      return;
    }
    const double lo = wrap_position(ref_pos - shift - radius, length_);
    const double hi_raw = lo + 2.0 * radius;
    auto visit_span = [&](double a, double b) {
      auto first = std::lower_bound(g.x0.begin(), g.x0.end(), a);
      auto last = std::upper_bound(g.x0.begin(), g.x0.end(), b);
      for (auto it = first; it != last; ++it) {
        const std::size_t i = static_cast<std::size_t>(it - g.x0.begin());
        if (g.id[i] == ref) continue;
        const double d = ring_distance(g.x0[i] + shift, ref_pos, length_);
        if (d <= radius) f(g.id[i], d);
      }
    };
    if (hi_raw < length_) {
      visit_span(lo, hi_raw);
    } else {
      visit_span(lo, length_);
      visit_span(0.0, hi_raw - length_);
    }
  }

 private:
  const World* world_;
  double length_;
  Group east_, west_;
};

}  // namespace rcs
