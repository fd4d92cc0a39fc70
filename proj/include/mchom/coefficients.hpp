#pragma once

#include <string>
#include <vector>

#include "mchom/errors.hpp"

namespace mchom {

/// Macroscopic point.  The cell problems live on the unit cell in 2-D; the
/// macro domain may be 1-D (x2 stays 0) or 2-D.
struct Xpt {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Coefficient fields of the two-continuum medium: permeabilities K1, K2,
/// the inter-continuum exchange rate Q, and the porosity-style capacities
/// C11, C22 used by the macroscale solver.
enum class Field { K1, K2, Q, C11, C22 };

/// Uniform sample lattice for tabulated models: values on a grid over
/// [x_lo, x_hi] x [0,1]^2, trilinear interpolation between samples.
/// Layout: value(ix, iy1, iy2) = data[(ix * ny + iy1) * ny + iy2].
struct TabulatedField {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int nx = 0;  ///< sample count along x1 (>= 2)
  int ny = 0;  ///< sample count along each cell axis (>= 2)
  std::vector<double> data;
};

/// An evaluable coefficient model of the medium.  Immutable after
/// construction; evaluation is pure and reentrant, so one model instance is
/// safely shared across concurrent workers.
class CoefficientModel {
 public:
  enum class Kind { Paper4, Constant, Laminate, Tabulated };

  /// The trigonometric parametric family used by the reproduction runs:
  ///   K1 = (2 - a*x1) cos(2 pi y1) sin(2 pi y2) + 3
  ///   K2 = (2 - a*x1) sin(2 pi y1) cos(2 pi y2) + 3
  ///   Q  = (1 + a*x1) sin(2 pi y1) sin(2 pi y2) + 3
  /// with x1 in [0,1].  Requires a in [0, 2) so all fields stay positive.
  static CoefficientModel paper4(double a);

  /// x- and y-independent fields K1=k1, K2=k2, Q=q (all > 0).
  static CoefficientModel constant(double k1, double k2, double q);

  /// Layered medium varying in y1 only, identical in both continua, with
  /// constant exchange q.  Supported profile: "cosine" with
  /// K1 = K2 = 2 + cos(2 pi y1).  Its effective values have closed forms
  /// (harmonic mean across layers, arithmetic mean along them).
  static CoefficientModel laminate(const std::string& profile, double q);

  /// Multilinear interpolation of uniform samples; 1-D macro coordinate.
  static CoefficientModel tabulated(TabulatedField k1, TabulatedField k2,
                                    TabulatedField q);

  Kind kind() const { return kind_; }
  double param_a() const { return a_; }
  double param_k1() const { return k1_; }
  double param_k2() const { return k2_; }
  double param_q() const { return q_; }
  const std::string& profile() const { return profile_; }
  const TabulatedField& tab_k1() const { return tab_k1_; }
  const TabulatedField& tab_k2() const { return tab_k2_; }
  const TabulatedField& tab_q() const { return tab_q_; }

  /// Evaluate one field at macro point x and cell point y = (y1, y2).
  /// y is wrapped into [0,1) first, so evaluations are exactly periodic in y.
  double eval(Field f, const Xpt& x, double y1, double y2) const;

  /// Lower bound c > 0 with K1, K2, Q >= c on the whole domain; declared in
  /// closed form for the analytic families and estimated from the samples
  /// for tabulated ones.
  double coercivity() const { return coercivity_; }

  /// Upper estimate of the macro-Lipschitz constant
  ///   max over fields of sup_y |f(x,y) - f(x',y)| / |x - x'|,
  /// obtained by sampling difference quotients on a lattice.  An estimate,
  /// not a certified bound.
  double lipschitz_estimate() const;

 private:
  CoefficientModel() = default;

  Kind kind_ = Kind::Constant;
  double a_ = 0.0;                    // paper4 parameter
  double k1_ = 1.0, k2_ = 1.0, q_ = 1.0;  // constant model / laminate exchange
  std::string profile_;               // laminate profile id
  TabulatedField tab_k1_, tab_k2_, tab_q_;
  double coercivity_ = 1.0;
};

}  // namespace mchom
