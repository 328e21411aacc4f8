#include "rcs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rcs/rng.hpp"

namespace rcs {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void CamRules::validate() const {
  require(t_min_s > 0.0 && t_min_s < t_max_s, "cam rules: need 0 < t_min < t_max");
  require(heading_delta_deg > 0.0 && position_delta_m > 0.0 && speed_delta_mps > 0.0,
          "cam rules: trigger thresholds must be positive");
}

void ScenarioConfig::validate() const {
  require(road_length_m > 0.0, "road_length must be > 0");
  require(lanes_per_direction >= 1, "lanes_per_direction must be >= 1");
  require(density_veh_per_km_lane > 0.0, "density must be > 0");
  require(platoon_size >= 2 && platoon_size <= 10, "platoon_size must be in [2, 10]");
  require(penetration_rate >= 0.0 && penetration_rate <= 1.0,
          "penetration_rate out of range [0, 1]");
  require(speed_mps >= 0.0, "speed must be >= 0");
  require(warmup_s >= 0.0 && measure_s > 0.0, "warmup must be >= 0 and measure > 0");
  require(pcm_period_s > 0.0, "pcm_period must be > 0");
  const double rate_hz = 1.0 / pcm_period_s;
  require(rate_hz >= 1.0 - 1e-12 && rate_hz <= 40.0 + 1e-12,
          "pcm rate 1/pcm_period must lie within [1, 40] Hz");
  require(vehicle_length_m > 0.0, "vehicle_length must be > 0");
  require(initial_gap_m > 0.0, "initial_gap must be > 0");
  cam_rules.validate();
}

double wrap_position(double x, double road_length) {
  double w = std::fmod(x, road_length);
  if (w < 0.0) w += road_length;
  return w;
}

double ring_distance(double a, double b, double road_length) {
  double d = std::fabs(std::fmod(a - b, road_length));
  if (d > road_length * 0.5) d = road_length - d;
  return d;
}

World build_world(const ScenarioConfig& config) {
  config.validate();

  const long long per_lane =
      std::llround(config.density_veh_per_km_lane * config.road_length_m / 1000.0);
  require(per_lane >= 2, "cannot form a platoon: fewer than 2 vehicles per lane");

  // Partition one lane's vehicles into consecutive platoons. A remainder of
  // one vehicle joins the last platoon; a remainder of two or more forms a
  // trailing shorter platoon.
  std::vector<int> platoon_sizes;
  {
    const long long full = per_lane / config.platoon_size;
    const long long rem = per_lane % config.platoon_size;
    for (long long i = 0; i < full; ++i) platoon_sizes.push_back(config.platoon_size);
    if (rem == 1) {
      require(!platoon_sizes.empty(), "cannot form a platoon from a single vehicle");
      platoon_sizes.back() += 1;
    } else if (rem >= 2) {
      platoon_sizes.push_back(static_cast<int>(rem));
    }
  }
  const std::size_t platoons_per_lane = platoon_sizes.size();

  double intra_gap_total = 0.0;
  for (int s : platoon_sizes) intra_gap_total += (s - 1) * config.initial_gap_m;
  const double occupied =
      static_cast<double>(per_lane) * config.vehicle_length_m + intra_gap_total;
  const double slack = config.road_length_m - occupied;
  // Keep at least one metre of clear road between consecutive platoons.
  require(slack >= static_cast<double>(platoons_per_lane) * 1.0,
          "platoon packing exceeds available road share per lane");
  const double inter_gap = slack / static_cast<double>(platoons_per_lane);

  World world;
  world.road_length_m = config.road_length_m;

  int vehicle_id = 0;
  int platoon_id = 0;
  for (int dir_i = 0; dir_i < 2; ++dir_i) {
    const Direction dir = dir_i == 0 ? Direction::kEast : Direction::kWest;
    // Positions advance along travel direction; a follower sits behind its
    // leader, i.e. at lower coordinates for eastbound and higher for westbound.
    const double behind = dir == Direction::kEast ? -1.0 : 1.0;
    for (int lane = 0; lane < config.lanes_per_direction; ++lane) {
      const std::uint64_t lane_stream_id =
          (static_cast<std::uint64_t>(dir_i * config.lanes_per_direction + lane) << 8) |
          static_cast<std::uint64_t>(RngStream::Purpose::kPlacement);
      RngStream placement(config.seed, lane_stream_id);
      double cursor = placement.next_unit() * config.road_length_m;

      for (std::size_t p = 0; p < platoons_per_lane; ++p) {
        Platoon platoon;
        platoon.id = platoon_id++;
        const int size = platoon_sizes[p];
        double pos = cursor;
        for (int m = 0; m < size; ++m) {
          Vehicle v;
          v.id = vehicle_id++;
          v.lane = lane;
          v.direction = dir;
          v.position_m = wrap_position(pos, config.road_length_m);
          v.speed_mps = config.speed_mps;
          v.length_m = config.vehicle_length_m;
          v.role = m == 0 ? Role::kLeader : Role::kMember;
          v.platoon_id = platoon.id;
          world.vehicles.push_back(v);
          platoon.ordered_members.push_back(v.id);
          if (m + 1 < size) {
            platoon.gaps_m.push_back(config.initial_gap_m);
            pos += behind * (config.vehicle_length_m + config.initial_gap_m);
          }
        }
        world.platoons.push_back(std::move(platoon));
        cursor = pos + behind * (config.vehicle_length_m + inter_gap);
      }
    }
  }

  // Co-located antennas would make the propagation model singular.
  {
    std::vector<double> positions;
    positions.reserve(world.vehicles.size());
    for (const Vehicle& v : world.vehicles) positions.push_back(v.position_m);
    std::sort(positions.begin(), positions.end());
    for (std::size_t i = 1; i < positions.size(); ++i) {
      require(positions[i] != positions[i - 1],
              "two vehicles share an exact position; change the seed");
    }
  }

  return world;
}

World assign_penetration(World world, double rate, std::uint64_t seed) {
  require(rate >= 0.0 && rate <= 1.0, "penetration rate out of range [0, 1]");

  const std::size_t count = world.platoons.size();
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;

  RngStream shuffle(seed, static_cast<std::uint64_t>(RngStream::Purpose::kPenetration));
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j = shuffle.next_below(static_cast<std::uint32_t>(i));
    std::swap(order[i - 1], order[j]);
  }

  const std::size_t enabled =
      static_cast<std::size_t>(std::floor(rate * static_cast<double>(count) + 1e-9));

  for (Platoon& p : world.platoons) {
    p.radcom_enabled = false;
  }
  for (std::size_t i = 0; i < enabled && i < count; ++i) {
    world.platoons[order[i]].radcom_enabled = true;
  }
  for (Vehicle& v : world.vehicles) {
    v.radcom_equipped =
        world.platoons[static_cast<std::size_t>(v.platoon_id)].radcom_enabled;
  }
  return world;
}

RingIndex::RingIndex(const World& world) : world_(&world), length_(world.road_length_m) {
  auto fill = [&](Group& g, Direction dir) {
    std::vector<std::pair<double, int>> items;
    for (const Vehicle& v : world.vehicles) {
      if (v.direction == dir) items.emplace_back(v.position_m, v.id);
    }
    std::sort(items.begin(), items.end());
    g.x0.reserve(items.size());
    g.id.reserve(items.size());
    for (auto& [x, id] : items) {
      g.x0.push_back(x);
      g.id.push_back(id);
    }
    if (!items.empty()) {
      const Vehicle& any = world.vehicles[static_cast<std::size_t>(items.front().second)];
      g.velocity = dir == Direction::kEast ? any.speed_mps : -any.speed_mps;
    }
  };
  fill(east_, Direction::kEast);
  fill(west_, Direction::kWest);
}

double RingIndex::position_at(int vehicle, double t_s) const {
  const Vehicle& v = world_->vehicles[static_cast<std::size_t>(vehicle)];
  const double vel = v.direction == Direction::kEast ? v.speed_mps : -v.speed_mps;
  return wrap_position(v.position_m + vel * t_s, length_);
}

double RingIndex::ring_distance_at(int a, int b, double t_s) const {
  return ring_distance(position_at(a, t_s), position_at(b, t_s), length_);
}

const RingIndex::Group& RingIndex::group_of(int vehicle) const {
  const Vehicle& v = world_->vehicles[static_cast<std::size_t>(vehicle)];
  return v.direction == Direction::kEast ? east_ : west_;
}

}  // namespace rcs
