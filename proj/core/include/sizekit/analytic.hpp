#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sizekit/evaluator.hpp"

namespace sizekit::eval {

/// Operating conditions and process constants of the two-stage op-amp model.
/// lambda_* are channel-length-modulation coefficients per unit length (lambda = lambda_x / L).
struct OpAmpConstants {
  double vdd = 1.2;
  double vcm = 0.6;
  double kp_n = 300e-6;
  double kp_p = 100e-6;
  double vth_n = 0.35;
  double vth_p = 0.35;
  double lambda_n = 0.08e-6;
  double lambda_p = 0.10e-6;
  double c_load = 5e-12;
  double cost = 1.0;
};

/// Self-biased subthreshold bandgap-style reference: PTAT current through R2 plus a CTAT gate-source voltage.
struct BgrConstants {
  double vdd = 1.8;
  double n = 1.3;
  double vth_n0 = 0.45;
  /// Threshold temperature coefficient (V/K); Vth falls with temperature.
  double kvt = 1.0e-3;
  /// Subthreshold specific current per square (A).
  double i_spec = 200e-9;
  double kp_p = 100e-6;
  double vth_p = 0.4;
  double lambda_p = 0.08e-6;
  double t_min_c = -20.0;
  double t_max_c = 85.0;
  double t_nom_c = 27.0;
  int sweep_points = 22;
  double cost = 1.0;
};

/// Low-dropout regulator: 5-transistor error amplifier driving a PMOS pass device with a resistive divider.
struct LdoConstants {
  double vdd = 1.4;
  double vref = 0.6;
  double i_load = 1e-3;
  double kp_n = 300e-6;
  double kp_p = 100e-6;
  double vth_n = 0.35;
  double vth_p = 0.35;
  double lambda_n = 0.08e-6;
  double lambda_p = 0.08e-6;
  double cost = 1.0;
};

/// Metric names produced by each model.
std::vector<std::string> opamp_metric_names();
std::vector<std::string> bgr_metric_names();
std::vector<std::string> ldo_metric_names();

/// Handles each template needs (M multipliers are optional and default to 1).
std::vector<Handle> opamp_required_handles();
std::vector<Handle> bgr_required_handles();
std::vector<Handle> ldo_required_handles();

/// Template devices: M1/M2 pair, M3/M4 load (M3 diode), M5 bias diode fed by IB, M6/M7 second stage, M8 tail, CC.
/// Metrics: gain_db, ugb_hz, pm_deg, psrr_db, cmrr_db, offset_v, slew_vps, power_w.
opt::Measurement eval_analytic_opamp(const space::Assignment& a, const OpAmpConstants& c = {});

/// Template devices: M1 (diode)/M2/M3 PMOS mirror, M4/M5 subthreshold NMOS pair with R1, M6 CTAT diode, R2.
/// Metrics: vref_v, tc_ppm, psr_db, power_w.
opt::Measurement eval_analytic_bgr(const space::Assignment& a, const BgrConstants& c = {});
/// Reference voltage at temperature t_c (Celsius).
double bgr_vref(const space::Assignment& a, const BgrConstants& c, double t_c);
/// Closed-form dVref/dT at temperature t_c.
double bgr_dvdt(const space::Assignment& a, const BgrConstants& c, double t_c);

/// Template devices: M1/M2 error-amp pair, M3 (diode)/M4 load, M5 tail, M6 bias diode fed by IB, MP pass device,
/// RF1 (out to fb), RF2 (fb to ground). Metrics: vout_v, load_reg_vpa, line_reg_vpv, psrr_db, power_w, loop_gain.
opt::Measurement eval_analytic_ldo(const space::Assignment& a, const LdoConstants& c = {});

class OpAmpEvaluator final : public Evaluator {
 public:
  explicit OpAmpEvaluator(OpAmpConstants c = {}) : c_(c) {}
  std::string name() const override { return "analytic-opamp"; }
  std::vector<std::string> metric_names() const override { return opamp_metric_names(); }
  opt::Measurement evaluate(const space::Assignment& a) const override { return eval_analytic_opamp(a, c_); }
  double nominal_cost() const override { return c_.cost; }
  void check_space(const space::ParameterSpace& space) const override;

 private:
  OpAmpConstants c_;
};

class BgrEvaluator final : public Evaluator {
 public:
  explicit BgrEvaluator(BgrConstants c = {}) : c_(c) {}
  std::string name() const override { return "analytic-bgr"; }
  std::vector<std::string> metric_names() const override { return bgr_metric_names(); }
  opt::Measurement evaluate(const space::Assignment& a) const override { return eval_analytic_bgr(a, c_); }
  double nominal_cost() const override { return c_.cost; }
  void check_space(const space::ParameterSpace& space) const override;

 private:
  BgrConstants c_;
};

class LdoEvaluator final : public Evaluator {
 public:
  explicit LdoEvaluator(LdoConstants c = {}) : c_(c) {}
  std::string name() const override { return "analytic-ldo"; }
  std::vector<std::string> metric_names() const override { return ldo_metric_names(); }
  opt::Measurement evaluate(const space::Assignment& a) const override { return eval_analytic_ldo(a, c_); }
  double nominal_cost() const override { return c_.cost; }
  void check_space(const space::ParameterSpace& space) const override;

 private:
  LdoConstants c_;
};

}  // namespace sizekit::eval
