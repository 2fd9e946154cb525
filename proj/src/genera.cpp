#include "herm/genera.hpp"

namespace herm {

TruncSeries::TruncSeries(int order, std::vector<Rational> coeffs) {
  if (order < 0) throw invalid_input("TruncSeries: negative order");
  coeffs.resize(static_cast<size_t>(order) + 1);
  c_ = std::move(coeffs);
}

TruncSeries TruncSeries::zero(int order) { return TruncSeries(order, {}); }

TruncSeries TruncSeries::one(int order) { return constant(order, 1); }

TruncSeries TruncSeries::x(int order) {
  TruncSeries s = zero(order);
  if (order >= 1) s.c_[1] = 1;
  return s;
}

TruncSeries TruncSeries::constant(int order, const Rational& c) {
  TruncSeries s = zero(order);
  s.c_[0] = c;
  return s;
}

const Rational& TruncSeries::operator[](int k) const {
  if (k < 0 || k > order()) throw invalid_input("TruncSeries: coefficient index out of range");
  return c_[static_cast<size_t>(k)];
}

void TruncSeries::require_order(const TruncSeries& o) const {
  if (order() != o.order()) throw invalid_input("TruncSeries: mixed truncation orders");
}

TruncSeries TruncSeries::operator+(const TruncSeries& o) const {
  require_order(o);
  TruncSeries r = *this;
  for (size_t k = 0; k < c_.size(); ++k) r.c_[k] += o.c_[k];
  return r;
}

TruncSeries TruncSeries::operator-(const TruncSeries& o) const {
  require_order(o);
  TruncSeries r = *this;
  for (size_t k = 0; k < c_.size(); ++k) r.c_[k] -= o.c_[k];
  return r;
}

TruncSeries TruncSeries::operator*(const TruncSeries& o) const {
  require_order(o);
  TruncSeries r = zero(order());
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; i + j < c_.size(); ++j) r.c_[i + j] += c_[i] * o.c_[j];
  }
  return r;
}

TruncSeries TruncSeries::reciprocal() const {
  if (c_[0] == 0) throw invalid_input("TruncSeries: reciprocal needs a unit constant term");
  TruncSeries r = zero(order());
  Rational inv0 = Rational(1) / c_[0];
  r.c_[0] = inv0;
  for (size_t k = 1; k < c_.size(); ++k) {
    Rational acc = 0;
    for (size_t j = 1; j <= k; ++j) acc += c_[j] * r.c_[k - j];
    r.c_[k] = -inv0 * acc;
  }
  return r;
}

TruncSeries TruncSeries::operator/(const TruncSeries& o) const {
  require_order(o);
  return *this * o.reciprocal();
}

TruncSeries TruncSeries::compose(const TruncSeries& inner) const {
  require_order(inner);
  if (inner.c_[0] != 0)
    throw invalid_input("TruncSeries: composition needs zero constant term inside");
  TruncSeries r = constant(order(), c_.back());
  for (int k = order() - 1; k >= 0; --k) r = r * inner + constant(order(), c_[k]);
  return r;
}

TruncSeries TruncSeries::exp() const {
  if (c_[0] != 0) throw invalid_input("TruncSeries: exp needs zero constant term");
  TruncSeries r = one(order());
  TruncSeries term = one(order());
  for (int k = 1; k <= order(); ++k) {
    term = term * *this;
    term = term.scale(Rational(1, k));
    r = r + term;
  }
  return r;
}

TruncSeries TruncSeries::log() const {
  if (c_[0] != 1) throw invalid_input("TruncSeries: log needs constant term one");
  TruncSeries u = *this - one(order());
  TruncSeries r = zero(order());
  TruncSeries pw = one(order());
  for (int k = 1; k <= order(); ++k) {
    pw = pw * u;
    r = r + pw.scale(Rational((k % 2) ? 1 : -1, k));
  }
  return r;
}

TruncSeries TruncSeries::scale(const Rational& c) const {
  TruncSeries r = *this;
  for (auto& v : r.c_) v *= c;
  return r;
}

TruncSeries TruncSeries::derivative() const {
  TruncSeries r = zero(order());
  for (int k = 0; k + 1 <= order(); ++k) r.c_[k] = Rational(k + 1) * c_[k + 1];
  return r;
}

double TruncSeries::eval(double x) const {
  double r = 0.0;
  for (int k = order(); k >= 0; --k)
    r = r * x + c_[static_cast<size_t>(k)].convert_to<double>();
  return r;
}

TruncSeries todd_series(int order) {
  // x / (1 - e^{-x}) as the reciprocal of sum_k (-1)^k x^k / (k+1)!
  TruncSeries denom = TruncSeries::zero(order);
  std::vector<Rational> c(static_cast<size_t>(order) + 1);
  Rational fact = 1;
  for (int k = 0; k <= order; ++k) {
    fact *= k + 1;
    c[static_cast<size_t>(k)] = Rational((k % 2) ? -1 : 1) / fact;
  }
  return TruncSeries(order, std::move(c)).reciprocal();
}

TruncSeries multiplicative_correction_series(int order) {
  std::vector<Rational> c(static_cast<size_t>(order) + 1);
  Rational fact = 1;
  for (int k = 0; k <= order; ++k) {
    fact *= k + 1;
    c[static_cast<size_t>(k)] = Rational(1) / fact;
  }
  return TruncSeries(order, std::move(c));
}

GenusSpec additive_from_multiplicative(const GenusSpec& psi) {
  return {psi.series.log(), psi.point_scale};
}

GenusSpec multiplicative_from_additive(const GenusSpec& phi) {
  return {phi.series.exp(), phi.point_scale};
}

Rational genus_of_complex(const GenusSpec& g, const HermComplex& c) {
  long chi = 0;
  for (int i : c.degrees()) chi += ((i % 2) ? -1 : 1) * c.dim(i);
  return g.series[0] * chi;
}

double bott_chern_point(const GenusSpec& g, const KAClass& x) {
  return g.point_scale * x.coord;
}

double bott_chern_point(const GenusSpec& g, const Roof& iso, const Tol& tol) {
  return g.point_scale * class_of_iso(iso, tol);
}

double bott_chern_point(const GenusSpec& g, const HermTriangle& t, const Tol& tol) {
  return g.point_scale * class_of_triangle(t, tol);
}

double psi_m_tilde_point(const GenusSpec& psi, const KAClass& x) {
  // the correction series has constant term one, so at the point the
  // multiplicative secondary class reduces to the additive one of log(psi)
  return bott_chern_point(additive_from_multiplicative(psi), x);
}

}  // namespace herm
