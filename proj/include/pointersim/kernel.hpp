#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pointersim/types.hpp"

namespace psim {

// Which variable pair a kernel lives on: (Q,r), (R,r) or (Q,q).
enum class KernelRep { PartialFt, Position, Momentum };

inline std::string to_string(KernelRep rep) {
  switch (rep) {
    case KernelRep::PartialFt: return "Qr";
    case KernelRep::Position: return "Rr";
    default: return "Qq";
  }
}

struct NonIntegrableError : std::domain_error {
  using std::domain_error::domain_error;
};

// exp(a_uu u^2 + a_vv v^2 + a_uv u v + b_u u + b_v v + c) with complex
// coefficients; bounded requires Re(a_uu) <= 0 and Re(a_vv) <= 0.
struct QuadExpKernel {
  cplx a_uu{}, a_vv{}, a_uv{}, b_u{}, b_v{}, c{};

  cplx exponent(double u, double v) const {
    return a_uu * u * u + a_vv * v * v + a_uv * u * v + b_u * u + b_v * v + c;
  }
  cplx eval(double u, double v) const { return std::exp(exponent(u, v)); }

  void validate() const {
    for (cplx x : {a_uu, a_vv, a_uv, b_u, b_v, c})
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
        throw std::invalid_argument("QuadExpKernel: non-finite coefficient");
    if (a_uu.real() > 1e-12 || a_vv.real() > 1e-12)
      throw std::invalid_argument("QuadExpKernel: Re(a_uu), Re(a_vv) must be <= 0");
  }

  // Exponent coefficients after (u, v) -> (u + shift_u, v + slope_vu*u + shift_v).
  QuadExpKernel substituted(double shift_u, double slope_vu, double shift_v) const {
    const double A = shift_u, s = slope_vu, C = shift_v;
    QuadExpKernel k;
    k.a_uu = a_uu + a_vv * s * s + a_uv * s;
    k.a_vv = a_vv;
    k.a_uv = 2.0 * a_vv * s + a_uv;
    k.b_u = 2.0 * a_uu * A + 2.0 * a_vv * s * C + a_uv * (C + A * s) + b_u + b_v * s;
    k.b_v = 2.0 * a_vv * C + a_uv * A + b_v;
    k.c = a_uu * A * A + a_vv * C * C + a_uv * A * C + b_u * A + b_v * C + c;
    return k;
  }

  QuadExpKernel with_linear_phase(cplx du, cplx dv, cplx dc) const {
    QuadExpKernel k = *this;
    k.b_u += du;
    k.b_v += dv;
    k.c += dc;
    return k;
  }

  QuadExpKernel transposed() const {
    QuadExpKernel k = *this;
    std::swap(k.a_uu, k.a_vv);
    std::swap(k.b_u, k.b_v);
    return k;
  }

  bool approx_equal(const QuadExpKernel& o, double tol) const {
    auto close = [tol](cplx x, cplx y) { return std::abs(x - y) <= tol; };
    return close(a_uu, o.a_uu) && close(a_vv, o.a_vv) && close(a_uv, o.a_uv) &&
           close(b_u, o.b_u) && close(b_v, o.b_v) && close(c, o.c);
  }
};

// A distributional line factor delta(k_u*u + k_v*v - c) with real coefficients.
struct DeltaFactor {
  double k_u = 0.0, k_v = 0.0, c = 0.0;

  void validate() const {
    if (k_u == 0.0 && k_v == 0.0)
      throw std::invalid_argument("DeltaFactor: (k_u, k_v) must not both vanish");
    if (!std::isfinite(k_u) || !std::isfinite(k_v) || !std::isfinite(c))
      throw std::invalid_argument("DeltaFactor: non-finite coefficient");
  }

  DeltaFactor substituted(double shift_u, double slope_vu, double shift_v) const {
    DeltaFactor d;
    d.k_u = k_u + k_v * slope_vu;
    d.k_v = k_v;
    d.c = c - k_u * shift_u - k_v * shift_v;
    return d;
  }

  DeltaFactor transposed() const { return {k_v, k_u, c}; }

  // Same line, allowing an overall (positive or negative) rescale.
  bool same_line(const DeltaFactor& o, double tol) const {
    const double n1 = std::hypot(k_u, k_v);
    const double n2 = std::hypot(o.k_u, o.k_v);
    if (n1 == 0.0 || n2 == 0.0) return false;
    const double cross = k_u * o.k_v - k_v * o.k_u;
    if (std::abs(cross) > tol * n1 * n2) return false;
    // align orientation, then compare offsets
    const double dot = (k_u * o.k_u + k_v * o.k_v) / (n1 * n2);
    const double sign = dot >= 0.0 ? 1.0 : -1.0;
    return std::abs(c / n1 - sign * o.c / n2) <= tol;
  }
};

// Closed-under-flow representation of a density-matrix block: one smooth
// Gaussian-exponential factor times up to two independent line deltas.
struct AnalyticKernel {
  KernelRep rep = KernelRep::PartialFt;
  QuadExpKernel smooth;
  std::vector<DeltaFactor> deltas;
  std::vector<std::string> provenance;

  void validate() const {
    smooth.validate();
    if (deltas.size() > 2)
      throw std::invalid_argument("AnalyticKernel: at most two delta factors");
    for (const auto& d : deltas) d.validate();
    if (deltas.size() == 2) {
      const double cross = deltas[0].k_u * deltas[1].k_v - deltas[0].k_v * deltas[1].k_u;
      if (std::abs(cross) < 1e-12)
        throw std::invalid_argument("AnalyticKernel: delta factors must be independent");
    }
  }

  bool smooth_only() const { return deltas.empty(); }

  cplx eval(double u, double v) const {
    if (!deltas.empty())
      throw std::domain_error("AnalyticKernel: pointwise eval undefined with deltas");
    return smooth.eval(u, v);
  }

  bool has_delta_in_u() const {
    for (const auto& d : deltas)
      if (std::abs(d.k_u) > 1e-14) return true;
    return false;
  }

  AnalyticKernel tagged(std::string tag) const {
    AnalyticKernel k = *this;
    k.provenance.push_back(std::move(tag));
    return k;
  }
};

// Coefficient-level Hermiticity of a diagonal block: rho(u,v) = conj(rho(-u,-v))
// requires real quadratic coefficients, imaginary linear ones, real constant.
inline bool is_hermitian_diagonal(const AnalyticKernel& k, double tol = 1e-12) {
  const auto& s = k.smooth;
  return std::abs(s.a_uu.imag()) <= tol && std::abs(s.a_vv.imag()) <= tol &&
         std::abs(s.a_uv.imag()) <= tol && std::abs(s.b_u.real()) <= tol &&
         std::abs(s.b_v.real()) <= tol && std::abs(s.c.imag()) <= tol;
}

inline nlohmann::json to_json(const cplx& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

inline nlohmann::json to_json(const AnalyticKernel& k) {
  nlohmann::json j;
  j["rep"] = to_string(k.rep);
  j["coefficients"] = {
      {"a_uu", to_json(k.smooth.a_uu)}, {"a_vv", to_json(k.smooth.a_vv)},
      {"a_uv", to_json(k.smooth.a_uv)}, {"b_u", to_json(k.smooth.b_u)},
      {"b_v", to_json(k.smooth.b_v)},   {"c", to_json(k.smooth.c)}};
  j["deltas"] = nlohmann::json::array();
  for (const auto& d : k.deltas)
    j["deltas"].push_back({{"k_u", d.k_u}, {"k_v", d.k_v}, {"c", d.c}});
  j["provenance"] = k.provenance;
  return j;
}

inline AnalyticKernel kernel_from_json(const nlohmann::json& j) {
  AnalyticKernel k;
  const std::string rep = j.at("rep").get<std::string>();
  k.rep = rep == "Qr"   ? KernelRep::PartialFt
          : rep == "Rr" ? KernelRep::Position
                        : KernelRep::Momentum;
  auto rc = [&](const char* name) {
    const auto& a = j.at("coefficients").at(name);
    return cplx{a.at(0).get<double>(), a.at(1).get<double>()};
  };
  k.smooth.a_uu = rc("a_uu");
  k.smooth.a_vv = rc("a_vv");
  k.smooth.a_uv = rc("a_uv");
  k.smooth.b_u = rc("b_u");
  k.smooth.b_v = rc("b_v");
  k.smooth.c = rc("c");
  for (const auto& d : j.at("deltas"))
    k.deltas.push_back({d.at("k_u").get<double>(), d.at("k_v").get<double>(),
                        d.at("c").get<double>()});
  if (j.contains("provenance"))
    k.provenance = j.at("provenance").get<std::vector<std::string>>();
  k.validate();
  return k;
}

}  // namespace psim
