#ifndef PWLMILP_STHS_HPP
#define PWLMILP_STHS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwlmilp/milp.hpp"

namespace pwlmilp::sths {

/// One-reservoir pumped-storage scheduling scenario. Volumes in m^3,
/// flows in m^3/s over hourly periods, prices per MWh. Pump constants:
/// q_pump < 0 (water pushed back) and p_pump < 0 (power consumed).
struct Scenario {
  int periods = 0;
  std::vector<double> price;
  std::vector<double> inflow;
  double r_init = 0.0, r_final_min = 0.0;
  double r_min = 0.0, r_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  double q_pump = 0.0, p_pump = 0.0;

  void check() const;
};

/// Stand-in head-dependent hydropower function
///   phi(q, r) = scale * q * (k0 + k1*r + k2*r^2 - rho*q^2),
/// monotone and concave in q, increasing in r on the plant domain.
struct Hpf {
  double scale = 1.0;
  double k0 = 0.5;
  double k1 = 1.25e-6;
  double k2 = 0.0;
  double rho = 1e-4;

  double operator()(double q, double r) const {
    return scale * q * (k0 + k1 * r + k2 * r * r - rho * q * q);
  }
  /// Valid Lipschitz constant on [0,qmax]x[rmin,rmax] after rescaling
  /// both axes to [0,1] (closed-form bounds on both partials).
  double lipschitz_normalized(double qmax, double rmin, double rmax) const;
};

/// Time series from CSV with header "period,price,inflow"; plant bounds
/// and HPF coefficients from a key=value config file.
Scenario load_scenario_csv(const std::string& path);
struct PlantConfig {
  double r_init = 0.0, r_final_min = 0.0;
  double r_min = 0.0, r_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  double q_pump = 0.0, p_pump = 0.0;
  Hpf hpf;
};
PlantConfig load_plant_config(const std::string& path);
Scenario make_scenario(const PlantConfig& plant,
                       const std::vector<double>& price,
                       const std::vector<double>& inflow);

/// Per-period model: PWL power via the mesh vertex values, biclique
/// block, optional color block, turbine/pump mode exclusivity, water
/// balance with hourly conversion, and final-volume requirement. The
/// mesh must cover [q_min,q_max] x [r_min,r_max].
milp::MilpModel build_sths(const Scenario& sc,
                           const mesh::SimplicialPartition& hpf_mesh,
                           const biclique::BicliqueCover& cover,
                           const std::optional<blocking::Coloring>& coloring);

struct ScheduleEvaluation {
  double pwl_obj = 0.0;
  double nl_obj = 0.0;
  double rel_err = 0.0;
  double avg_abs_hpf_err = 0.0;
  int generating_periods = 0;
  double max_conservation_residual = 0.0;
};

/// Re-prices a solved schedule with the true HPF and checks water
/// conservation.
ScheduleEvaluation evaluate_schedule(
    const std::map<std::string, double>& solution, const Scenario& sc,
    const Hpf& hpf);

std::string evaluation_to_json(const ScheduleEvaluation& ev);

}  // namespace pwlmilp::sths

#endif  // PWLMILP_STHS_HPP
