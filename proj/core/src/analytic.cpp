#include "sizekit/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"

namespace sizekit::eval {

namespace {

constexpr double kBoltzmannOverQ = 8.617333262e-5;
constexpr double kKelvin = 273.15;

double get(const space::Assignment& a, const std::string& dev, const std::string& param) {
  auto it = a.find(Handle{dev, param});
  if (it == a.end()) throw EvaluationError("template device parameter missing: " + Handle{dev, param}.str());
  return it->second;
}

double multiplier(const space::Assignment& a, const std::string& dev) {
  auto it = a.find(Handle{dev, "M"});
  return it == a.end() ? 1.0 : it->second;
}

/// kp * M * W / L.
double beta(const space::Assignment& a, const std::string& dev, double kp) {
  return kp * multiplier(a, dev) * get(a, dev, "W") / get(a, dev, "L");
}

double length(const space::Assignment& a, const std::string& dev) { return get(a, dev, "L"); }

double db(double ratio) { return 20.0 * std::log10(std::max(ratio, 1e-300)); }

double rel_mismatch(double x, double y) { return (x - y) / (0.5 * (x + y)); }

std::vector<Handle> mos_handles(std::initializer_list<const char*> devs) {
  std::vector<Handle> out;
  for (const char* d : devs) {
    out.push_back({d, "L"});
    out.push_back({d, "W"});
  }
  return out;
}

void require(const space::ParameterSpace& space, const std::vector<Handle>& need, const std::string& model) {
  std::vector<std::string> missing;
  for (const auto& h : need) {
    if (std::find(space.handles().begin(), space.handles().end(), h) == space.handles().end()) missing.push_back(h.str());
  }
  if (!missing.empty()) throw ConfigError(model + ": template-device parameters missing: " + text::join(missing, ", "));
}

}  // namespace

std::vector<std::string> opamp_metric_names() {
  return {"gain_db", "ugb_hz", "pm_deg", "psrr_db", "cmrr_db", "offset_v", "slew_vps", "power_w"};
}
std::vector<std::string> bgr_metric_names() { return {"vref_v", "tc_ppm", "psr_db", "power_w"}; }
std::vector<std::string> ldo_metric_names() {
  return {"vout_v", "load_reg_vpa", "line_reg_vpv", "psrr_db", "power_w", "loop_gain"};
}

std::vector<Handle> opamp_required_handles() {
  auto h = mos_handles({"M1", "M2", "M3", "M4", "M5", "M6", "M7", "M8"});
  h.push_back({"IB", "DC"});
  h.push_back({"CC", "C"});
  return h;
}
std::vector<Handle> bgr_required_handles() {
  auto h = mos_handles({"M1", "M2", "M3", "M4", "M5", "M6"});
  h.push_back({"R1", "R"});
  h.push_back({"R2", "R"});
  return h;
}
std::vector<Handle> ldo_required_handles() {
  auto h = mos_handles({"M1", "M2", "M3", "M4", "M5", "M6", "MP"});
  h.push_back({"IB", "DC"});
  h.push_back({"RF1", "R"});
  h.push_back({"RF2", "R"});
  return h;
}

void OpAmpEvaluator::check_space(const space::ParameterSpace& s) const { require(s, opamp_required_handles(), name()); }
void BgrEvaluator::check_space(const space::ParameterSpace& s) const { require(s, bgr_required_handles(), name()); }
void LdoEvaluator::check_space(const space::ParameterSpace& s) const { require(s, ldo_required_handles(), name()); }

opt::Measurement eval_analytic_opamp(const space::Assignment& a, const OpAmpConstants& c) {
  const double b1 = beta(a, "M1", c.kp_n), b2 = beta(a, "M2", c.kp_n);
  const double b3 = beta(a, "M3", c.kp_p), b4 = beta(a, "M4", c.kp_p);
  const double b5 = beta(a, "M5", c.kp_n), b6 = beta(a, "M6", c.kp_p);
  const double b7 = beta(a, "M7", c.kp_n), b8 = beta(a, "M8", c.kp_n);
  const double ib = get(a, "IB", "DC");
  const double cc = get(a, "CC", "C");

  const double i_tail = ib * b8 / b5;
  const double i1 = 0.5 * i_tail;
  const double i7 = ib * b7 / b5;
  const double gm1 = std::sqrt(2.0 * 0.5 * (b1 + b2) * i1);
  const double gm3 = std::sqrt(2.0 * b3 * i1);
  const double gm6 = std::sqrt(2.0 * b6 * i7);
  const double gds2 = c.lambda_n / length(a, "M2") * i1;
  const double gds4 = c.lambda_p / length(a, "M4") * i1;
  const double gds6 = c.lambda_p / length(a, "M6") * i7;
  const double gds7 = c.lambda_n / length(a, "M7") * i7;
  const double gds8 = c.lambda_n / length(a, "M8") * i_tail;

  const double a1 = gm1 / (gds2 + gds4);
  const double a2 = gm6 / (gds6 + gds7);
  const double gain = a1 * a2;
  const double wu = gm1 / cc;
  const double p2 = gm6 / c.c_load;
  const double z = gm6 / cc;
  const double pm = 90.0 - (std::atan(wu / p2) + std::atan(wu / z)) * 180.0 / std::numbers::pi;

  // Input-referred offset: pair and load beta mismatch, plus the systematic term from the
  // second-stage current imbalance (M6 mirrors M4's current, M7 is set by the bias).
  const double vov1 = std::sqrt(2.0 * i1 / (0.5 * (b1 + b2)));
  const double d_pair = rel_mismatch(b1, b2);
  const double d_load = rel_mismatch(b3, b4);
  const double i6_natural = i1 * b6 / b4;
  const double vos_sys = (i6_natural - i7) / gm6 / a1;
  const double offset = std::fabs(0.5 * vov1 * d_pair) + std::fabs(0.5 * vov1 * d_load) + std::fabs(vos_sys);

  const double acm = gds8 / (2.0 * gm3) + 0.25 * (std::fabs(d_pair) + std::fabs(d_load));
  const double cmrr = a1 / acm;
  const double a_vdd = gds6 / (gds6 + gds7) + std::fabs(i6_natural - i7) / i7 * 1e-3;
  const double psrr = gain / a_vdd;

  // Saturation headroom of the input pair, its tail and the output stage.
  const double vov3 = std::sqrt(2.0 * i1 / b3);
  const double vov8 = std::sqrt(2.0 * i_tail / b8);
  const double vov6 = std::sqrt(2.0 * i7 / b6);
  const double vov7 = std::sqrt(2.0 * i7 / b7);
  const double head_tail = c.vcm - (c.vth_n + vov1) - vov8;
  const double head_pair = c.vdd - (c.vth_p + vov3) - (c.vcm - c.vth_n);
  const double head_out = c.vdd - vov6 - vov7;

  opt::Measurement m;
  m.metrics = {{"gain_db", db(gain)},
               {"ugb_hz", wu / (2.0 * std::numbers::pi)},
               {"pm_deg", pm},
               {"psrr_db", db(psrr)},
               {"cmrr_db", db(cmrr)},
               {"offset_v", offset},
               {"slew_vps", i_tail / cc},
               {"power_w", c.vdd * (ib + i_tail + i7)}};
  if (head_tail < 0.0 || head_pair < 0.0 || head_out < 0.0) {
    m.failed = true;
    m.note = "negative saturation headroom";
  }
  m.oscillation = pm <= 0.0;
  return m;
}

namespace {

struct BgrOp {
  double ratio;  // K / a, argument of the PTAT logarithm
  double a;      // branch current ratio M2/M1
  double c;      // I3 = c * T
  double s6;     // M6 aspect ratio (incl. multiplier)
  double r2;
  bool valid;
};

BgrOp bgr_op(const space::Assignment& a, const BgrConstants& c) {
  BgrOp op{};
  const double b1 = beta(a, "M1", 1.0), b2 = beta(a, "M2", 1.0), b3 = beta(a, "M3", 1.0);
  const double s4 = beta(a, "M4", 1.0), s5 = beta(a, "M5", 1.0);
  op.s6 = beta(a, "M6", 1.0);
  op.a = b2 / b1;
  const double k = s5 / s4;
  op.valid = k / op.a > 1.0 + 1e-6;
  op.ratio = std::max(k / op.a, 1.0 + 1e-6);
  const double r1 = get(a, "R1", "R");
  op.r2 = get(a, "R2", "R");
  op.c = (b3 / b1) * c.n * kBoltzmannOverQ * std::log(op.ratio) / (op.a * r1);
  return op;
}

double vref_at(const BgrOp& op, const BgrConstants& c, double t_c) {
  const double t = t_c + kKelvin;
  const double i3 = op.c * t;
  const double vth = c.vth_n0 - c.kvt * (t_c - c.t_nom_c);
  return i3 * op.r2 + vth + c.n * kBoltzmannOverQ * t * std::log(i3 / (c.i_spec * op.s6));
}

}  // namespace

double bgr_vref(const space::Assignment& a, const BgrConstants& c, double t_c) { return vref_at(bgr_op(a, c), c, t_c); }

double bgr_dvdt(const space::Assignment& a, const BgrConstants& c, double t_c) {
  const auto op = bgr_op(a, c);
  const double t = t_c + kKelvin;
  const double i3 = op.c * t;
  return op.c * op.r2 - c.kvt + c.n * kBoltzmannOverQ * (std::log(i3 / (c.i_spec * op.s6)) + 1.0);
}

opt::Measurement eval_analytic_bgr(const space::Assignment& a, const BgrConstants& c) {
  const auto op = bgr_op(a, c);
  const double vnom = vref_at(op, c, c.t_nom_c);
  double variation = 0.0;
  double prev = vref_at(op, c, c.t_min_c);
  const int np = std::max(c.sweep_points, 2);
  for (int i = 1; i < np; ++i) {
    const double t = c.t_min_c + (c.t_max_c - c.t_min_c) * i / (np - 1);
    const double v = vref_at(op, c, t);
    variation += std::fabs(v - prev);
    prev = v;
  }
  const double span = c.t_max_c - c.t_min_c;
  const double tc = 1e6 * variation / (std::max(std::fabs(vnom), 1e-12) * span);

  const double t = c.t_nom_c + kKelvin;
  const double i0 = op.c * t * beta(a, "M1", 1.0) / beta(a, "M3", 1.0);
  const double i3 = op.c * t;
  const double gds3 = c.lambda_p / length(a, "M3") * i3;
  const double gm6 = i3 / (c.n * kBoltzmannOverQ * t);
  const double psr = gds3 * (op.r2 + 1.0 / gm6);

  const double vov1 = std::sqrt(2.0 * i0 / beta(a, "M1", c.kp_p));
  const double vov3 = std::sqrt(2.0 * i3 / beta(a, "M3", c.kp_p));
  const double vgs4 = c.vth_n0 + c.n * kBoltzmannOverQ * t * std::log(i0 / (c.i_spec * beta(a, "M4", 1.0)));

  opt::Measurement m;
  m.metrics = {{"vref_v", vnom}, {"tc_ppm", tc}, {"psr_db", db(psr)}, {"power_w", c.vdd * (i0 * (1.0 + op.a) + i3)}};
  if (!op.valid) {
    m.failed = true;
    m.note = "no PTAT solution (K/a <= 1)";
  } else if (c.vdd - vnom < vov3 || c.vth_p + vov1 + vgs4 > c.vdd) {
    m.failed = true;
    m.note = "insufficient supply headroom";
  }
  return m;
}

opt::Measurement eval_analytic_ldo(const space::Assignment& a, const LdoConstants& c) {
  const double b1 = beta(a, "M1", c.kp_n), b2 = beta(a, "M2", c.kp_n);
  const double b3 = beta(a, "M3", c.kp_p), b4 = beta(a, "M4", c.kp_p);
  const double b5 = beta(a, "M5", c.kp_n), b6 = beta(a, "M6", c.kp_n);
  const double bp = beta(a, "MP", c.kp_p);
  const double ib = get(a, "IB", "DC");
  const double rf1 = get(a, "RF1", "R"), rf2 = get(a, "RF2", "R");

  const double i5 = ib * b5 / b6;
  const double i1 = 0.5 * i5;
  const double gm1 = std::sqrt(2.0 * 0.5 * (b1 + b2) * i1);
  const double gds2 = c.lambda_n / length(a, "M2") * i1;
  const double gds4 = c.lambda_p / length(a, "M4") * i1;
  const double a_ea = gm1 / (gds2 + gds4);

  const double r = rf2 / (rf1 + rf2);
  const double vov1 = std::sqrt(2.0 * i1 / (0.5 * (b1 + b2)));
  const double vos = 0.5 * vov1 * (rel_mismatch(b1, b2) + rel_mismatch(b3, b4));
  const double v_ideal = (c.vref + vos) / r;
  const double i_pass = c.i_load + v_ideal / (rf1 + rf2);
  const double gm_p = std::sqrt(2.0 * bp * i_pass);
  const double gds_p = c.lambda_p / length(a, "MP") * i_pass;
  const double r_out = 1.0 / (gds_p + 1.0 / (rf1 + rf2));
  const double loop = a_ea * gm_p * r_out * r;
  const double vout = v_ideal * loop / (1.0 + loop);
  const double load_reg = r_out / (1.0 + loop);
  const double line_reg = gds_p * r_out / (1.0 + loop);

  const double vov_p = std::sqrt(2.0 * i_pass / bp);
  const double vov5 = std::sqrt(2.0 * i5 / b5);
  const double head_pair = c.vref - (c.vth_n + vov1) - vov5;

  opt::Measurement m;
  m.metrics = {{"vout_v", vout},
               {"load_reg_vpa", load_reg},
               {"line_reg_vpv", line_reg},
               {"psrr_db", -db(line_reg)},
               {"power_w", c.vdd * (ib + i5 + vout / (rf1 + rf2))},
               {"loop_gain", loop}};
  if (c.vdd - vout < vov_p) {
    m.failed = true;
    m.note = "pass device in dropout";
  } else if (head_pair < 0.0) {
    m.failed = true;
    m.note = "negative error-amplifier headroom";
  }
  return m;
}

}  // namespace sizekit::eval
