#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "herm/derived.hpp"

namespace herm {

using Rational = boost::multiprecision::cpp_rational;

// Truncated one-variable power series with exact rational coefficients.
// Order N keeps coefficients of x^0..x^N; every operation truncates there.
class TruncSeries {
 public:
  TruncSeries() = default;
  TruncSeries(int order, std::vector<Rational> coeffs);
  static TruncSeries zero(int order);
  static TruncSeries one(int order);
  static TruncSeries x(int order);
  static TruncSeries constant(int order, const Rational& c);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const Rational& operator[](int k) const;
  const std::vector<Rational>& coeffs() const { return c_; }

  TruncSeries operator+(const TruncSeries& o) const;
  TruncSeries operator-(const TruncSeries& o) const;
  TruncSeries operator*(const TruncSeries& o) const;
  TruncSeries operator/(const TruncSeries& o) const;  // o must have nonzero constant term
  TruncSeries reciprocal() const;                     // nonzero constant term
  TruncSeries compose(const TruncSeries& inner) const;  // inner constant term must be 0
  TruncSeries exp() const;  // constant term must be 0
  TruncSeries log() const;  // constant term must be 1
  TruncSeries scale(const Rational& c) const;
  TruncSeries derivative() const;  // order drops by one, re-padded with zero

  bool operator==(const TruncSeries& o) const { return c_ == o.c_; }

  double eval(double x) const;  // Horner, floats only here

 private:
  std::vector<Rational> c_;  // c_[k] multiplies x^k
  void require_order(const TruncSeries& o) const;
};

// x / (1 - e^{-x}) up to the requested order.
TruncSeries todd_series(int order);

// The correction factor (e^t - 1)/t as a series in t: coefficients 1/(k+1)!.
TruncSeries multiplicative_correction_series(int order);

// An additive genus: a truncated series (the value on a line element) plus
// the scale tying its secondary class at the base point to the determinant
// norm. point_scale is configuration, defaulted so the secondary class of
// the Chern character coincides with tau.
struct GenusSpec {
  TruncSeries series;
  double point_scale = 1.0;
};

// Dictionary between additive and multiplicative normalizations:
// multiplicative specs have constant term 1, additive ones constant term 0.
GenusSpec additive_from_multiplicative(const GenusSpec& psi);
GenusSpec multiplicative_from_additive(const GenusSpec& phi);

// Value of an additive genus on a bounded hermitian complex at the base
// point: only the degree-zero characteristic form survives, so the value is
// the constant term times the alternating sum of ranks.
Rational genus_of_complex(const GenusSpec& g, const HermComplex& c);

// Secondary (Bott-Chern type) class at the base point: the genus sees an
// acyclic class, a derived isomorphism, or a distinguished triangle only
// through its determinant-norm coordinate, scaled by point_scale.
double bott_chern_point(const GenusSpec& g, const KAClass& x);
double bott_chern_point(const GenusSpec& g, const Roof& iso, const Tol& tol = default_tol());
double bott_chern_point(const GenusSpec& g, const HermTriangle& t, const Tol& tol = default_tol());

// Multiplicative-normalization secondary class at the base point. The series
// correction (e^t - 1)/t has constant term 1 and the higher coefficients pair
// with positive-degree forms, so at the point the value agrees with the
// additive one for log(psi); the series-level factor is exposed separately
// through multiplicative_correction_series.
double psi_m_tilde_point(const GenusSpec& psi, const KAClass& x);

}  // namespace herm
