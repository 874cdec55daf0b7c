#ifndef CHIRF_FIELDSIM_IMPL_HPP
#define CHIRF_FIELDSIM_IMPL_HPP

#include <stdexcept>

namespace chirf::fieldsim {

template <typename Sample>
ChiField<Sample>::ChiField(std::vector<Sample> components)
    : components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("ChiField: needs at least one component");
}

template <typename Sample>
template <typename... Args>
double ChiField<Sample>::phi(std::span<const double> u, Args... at) const {
  if (u.size() != components_.size())
    throw std::invalid_argument("ChiField::phi: direction dimension != k");
  double s = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i)
    s += u[i] * components_[i].value(at...);
  return s;
}

template <typename Sample>
template <typename... Args>
Jet2 ChiField<Sample>::jet_F(int order, Args... at) const {
  Jet2 out;
  out.order = order;
  out.hess = SymMatrix(2);
  for (const Sample& c : components_) {
    Jet2 j = c.eval(at..., order);
    out.value += 0.5 * j.value * j.value;
    if (order >= 1) {
      out.grad[0] += j.value * j.grad[0];
      out.grad[1] += j.value * j.grad[1];
    }
    if (order >= 2) {
      for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b)
          out.hess.at(a, b) +=
              j.grad[a] * j.grad[b] + j.value * j.hess(a, b);
    }
  }
  return out;
}

template <typename Sample>
template <typename... Args>
Jet2 ChiField<Sample>::jet_f(int order, Args... at) const {
  Jet2 F = jet_F(order, at...);
  double fval = std::sqrt(2.0 * F.value);
  if (order >= 1 && fval < 1e-12)
    throw std::domain_error(
        "ChiField::jet_f: evaluation within 1e-12 of the nodal set");
  Jet2 out;
  out.order = order;
  out.value = fval;
  out.hess = SymMatrix(2);
  if (order >= 1) {
    out.grad[0] = F.grad[0] / fval;
    out.grad[1] = F.grad[1] / fval;
  }
  if (order >= 2) {
    double inv3 = 1.0 / (fval * fval * fval);
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b)
        out.hess.at(a, b) =
            F.hess(a, b) / fval - F.grad[a] * F.grad[b] * inv3;
  }
  return out;
}

template <typename F>
Jet2 fd_jet_sphere(F&& field_value, const Vec3& p, double h) {
  TangentFrame fr = tangent_frame(p);
  Vec3 diag = normalized(fr.e1 + fr.e2);
  auto at = [&](const Vec3& u, double s) {
    return field_value(geodesic_step(p, u, s));
  };
  double f0 = field_value(p);
  double fe1p = at(fr.e1, h), fe1m = at(fr.e1, -h);
  double fe2p = at(fr.e2, h), fe2m = at(fr.e2, -h);
  double fdp = at(diag, h), fdm = at(diag, -h);
  Jet2 out;
  out.order = 2;
  out.value = f0;
  out.grad[0] = (fe1p - fe1m) / (2.0 * h);
  out.grad[1] = (fe2p - fe2m) / (2.0 * h);
  out.hess = SymMatrix(2);
  double h11 = (fe1p - 2.0 * f0 + fe1m) / (h * h);
  double h22 = (fe2p - 2.0 * f0 + fe2m) / (h * h);
  double hdd = (fdp - 2.0 * f0 + fdm) / (h * h);
  out.hess.at(0, 0) = h11;
  out.hess.at(1, 1) = h22;
  out.hess.at(0, 1) = hdd - 0.5 * (h11 + h22);
  return out;
}

template <typename F>
Jet2 fd_jet_planar(F&& field_value, double x, double y, double h) {
  double f0 = field_value(x, y);
  double fxp = field_value(x + h, y), fxm = field_value(x - h, y);
  double fyp = field_value(x, y + h), fym = field_value(x, y - h);
  double fpp = field_value(x + h, y + h), fmm = field_value(x - h, y - h);
  double fpm = field_value(x + h, y - h), fmp = field_value(x - h, y + h);
  Jet2 out;
  out.order = 2;
  out.value = f0;
  out.grad[0] = (fxp - fxm) / (2.0 * h);
  out.grad[1] = (fyp - fym) / (2.0 * h);
  out.hess = SymMatrix(2);
  out.hess.at(0, 0) = (fxp - 2.0 * f0 + fxm) / (h * h);
  out.hess.at(1, 1) = (fyp - 2.0 * f0 + fym) / (h * h);
  out.hess.at(0, 1) = (fpp + fmm - fpm - fmp) / (4.0 * h * h);
  return out;
}

}  // namespace chirf::fieldsim

#endif
