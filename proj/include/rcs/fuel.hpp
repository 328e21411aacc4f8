#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rcs {

struct AeroParams {
  double mass_kg = 40000.0;
  double cd0 = 0.6;
  double frontal_area_m2 = 10.0;
  double air_density_kgm3 = 1.225;
  double c_rr = 0.005;
  double drivetrain_efficiency = 0.4;
  double fuel_energy_density_j_per_l = 35.8e6;  // diesel

  void validate() const;
};

enum class PlatoonPosition : std::uint8_t { kLeader = 0, kTrailing = 1 };

/// Piecewise-linear gap -> drag-reduction table. Below the first knot the
/// first value applies; beyond the last knot the reduction is zero.
struct DragReductionCurve {
  std::vector<std::pair<double, double>> knots;  // (gap m, phi), gap ascending

  double value(double gap_m) const;
  void validate() const;
};

struct DragCurves {
  DragReductionCurve leader;
  DragReductionCurve trailing;
};

DragCurves default_drag_curves();

/// Scales the trailing table's reduction values by `multiplier` (values are
/// clamped below 1). The leader table is left untouched.
DragCurves scale_trailing(const DragCurves& curves, double multiplier);

double drag_reduction(double gap_m, PlatoonPosition position, const DragCurves& curves);

/// Tractive power on a flat road:
///   P = [m g c_rr + 0.5 rho cd0 (1 - phi) A v^2] * v.
double tractive_power_w(double v_mps, double gap_m, PlatoonPosition position,
                        const AeroParams& params, const DragCurves& curves);

/// Fuel rate in litres/second at constant speed.
double fuel_rate_lps(double v_mps, double gap_m, PlatoonPosition position,
                     const AeroParams& params, const DragCurves& curves);

/// 1 - (new platoon fuel rate) / (baseline platoon fuel rate): vehicle 0 uses
/// the leader drag curve evaluated at the first gap; every trailing vehicle
/// uses the trailing curve at the gap directly ahead of it. The gap lists
/// must describe the same platoon (equal lengths).
double platoon_fuel_saving(std::span<const double> gaps_baseline_m,
                           std::span<const double> gaps_new_m, double v_mps,
                           const AeroParams& params, const DragCurves& curves);

}  // namespace rcs
