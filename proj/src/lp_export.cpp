#include "adl/lp_export.hpp"

#include <charconv>

namespace adl {

namespace {

std::string fmt(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// Accumulates "coef name" terms of one linear expression with signs.
class Expr {
 public:
  void add(double coef, const std::string& name) {
    if (coef == 0.0) return;
    const bool negative = coef < 0.0;
    const double mag = negative ? -coef : coef;
    if (!text_.empty())
      text_ += negative ? " - " : " + ";
    else if (negative)
      text_ += "- ";
    if (mag != 1.0) text_ += fmt(mag) + " ";
    text_ += name;
  }

  void add_constant(double value) {
    if (text_.empty()) {
      text_ = fmt(value);
      return;
    }
    if (value == 0.0) return;
    text_ += value < 0.0 ? " - " + fmt(-value) : " + " + fmt(value);
  }

  bool empty() const { return text_.empty(); }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

}  // namespace

std::string lp_text(const PlanInstance& inst) {
  validate_instance(inst);
  const auto x = [](int i) { return "x_" + std::to_string(i + 1); };
  const auto y = [](int i) { return "y_" + std::to_string(i + 1); };
  const auto w = [](int i) { return "w_" + std::to_string(i + 1); };
  const auto u = [](int i, int j) { return "u_" + std::to_string(i + 1) + "_" + std::to_string(j + 1); };
  const auto u0 = [](int i) { return "u_" + std::to_string(i + 1) + "_0"; };

  std::string out = "\\ act-delegate-learn planning MIP (mode: " + mode_to_string(inst.mode) + ")\n";

  Expr obj;
  double constant = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    const CostVector& c = inst.costs[i];
    obj.add(c.c_demo - c.c_rob, x(i));
    obj.add(c.c_hum - c.c_rob, y(i));
    obj.add(c.c_fail, w(i));
    constant += c.c_rob;
  }
  obj.add_constant(constant);
  out += "Minimize\n obj: " + obj.str() + "\n";

  out += "Subject To\n";
  for (int i = 0; i < inst.n; ++i) {
    Expr onehot;
    onehot.add(1.0, x(i));
    onehot.add(1.0, y(i));
    out += " onehot_" + std::to_string(i + 1) + ": " + onehot.str() + " <= 1\n";

    Expr cover;
    cover.add(1.0, u0(i));
    for (int j = 0; j < i; ++j) cover.add(1.0, u(i, j));
    out += " cover_" + std::to_string(i + 1) + ": " + cover.str() + " <= 1\n";

    for (int j = 0; j < i; ++j) {
      Expr avail;
      avail.add(1.0, u(i, j));
      avail.add(-1.0, x(j));
      out += " avail_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + ": " + avail.str() +
             " <= 0\n";
    }

    Expr fail;
    fail.add(1.0, w(i));
    if (inst.mode == Mode::mdp_consistent) {
      fail.add(1.0, x(i));
    } else {
      fail.add(inst.rho[i][i], x(i));
    }
    fail.add(1.0, y(i));
    fail.add(inst.rho0[i], u0(i));
    for (int j = 0; j < i; ++j) fail.add(inst.rho[i][j], u(i, j));
    out += " fail_" + std::to_string(i + 1) + ": " + fail.str() + " >= 1\n";
  }

  out += "Bounds\n";
  for (int i = 0; i < inst.n; ++i) {
    out += " 0 <= " + w(i) + " <= 1\n";
    out += " 0 <= " + u0(i) + " <= 1\n";
    for (int j = 0; j < i; ++j) out += " 0 <= " + u(i, j) + " <= 1\n";
  }

  out += "Binaries\n";
  for (int i = 0; i < inst.n; ++i) out += " " + x(i) + " " + y(i) + "\n";
  out += "End\n";
  return out;
}

void export_mip(const PlanInstance& inst, const std::string& path) {
  write_file(path, lp_text(inst));
}

}  // namespace adl
