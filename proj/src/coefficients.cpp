#include "mchom/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mchom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

/// Wrap a cell coordinate into [0, 1).  Makes evaluations exactly periodic:
/// f(x, 1) computes the same floating-point value as f(x, 0).
double wrap(double y) {
  double w = y - std::floor(y);
  return (w >= 1.0) ? w - 1.0 : w;
}

double tab_min(const TabulatedField& t) {
  return *std::min_element(t.data.begin(), t.data.end());
}

/// Trilinear interpolation in (x1, y1, y2) on the uniform sample lattice.
double tab_eval(const TabulatedField& t, double x1, double y1, double y2) {
  if (x1 < t.x_lo - 1e-12 || x1 > t.x_hi + 1e-12) {
    throw SolveError("tabulated coefficient query outside the sample hull");
  }
  const double tx = std::clamp((x1 - t.x_lo) / (t.x_hi - t.x_lo), 0.0, 1.0) *
                    (t.nx - 1);
  const double ty1 = y1 * (t.ny - 1);
  const double ty2 = y2 * (t.ny - 1);
  const int ix = std::min(static_cast<int>(tx), t.nx - 2);
  const int i1 = std::min(static_cast<int>(ty1), t.ny - 2);
  const int i2 = std::min(static_cast<int>(ty2), t.ny - 2);
  const double fx = tx - ix, f1 = ty1 - i1, f2 = ty2 - i2;
  auto at = [&](int a, int b, int c) {
    return t.data[(static_cast<size_t>(a) * t.ny + b) * t.ny + c];
  };
  double v = 0.0;
  for (int da = 0; da < 2; ++da) {
    for (int db = 0; db < 2; ++db) {
      for (int dc = 0; dc < 2; ++dc) {
        const double w = (da ? fx : 1.0 - fx) * (db ? f1 : 1.0 - f1) *
                         (dc ? f2 : 1.0 - f2);
        v += w * at(ix + da, i1 + db, i2 + dc);
      }
    }
  }
  return v;
}

void check_tab(const TabulatedField& t, const char* name) {
  if (t.nx < 2 || t.ny < 2) {
    throw ConfigError(std::string("tabulated field ") + name +
                      ": need at least 2 samples per axis");
  }
  if (t.data.size() != static_cast<size_t>(t.nx) * t.ny * t.ny) {
    throw ConfigError(std::string("tabulated field ") + name +
                      ": sample count does not match nx*ny*ny");
  }
  if (!(t.x_hi > t.x_lo)) {
    throw ConfigError(std::string("tabulated field ") + name +
                      ": empty x range");
  }
}

}  // namespace

CoefficientModel CoefficientModel::paper4(double a) {
  if (!(a >= 0.0)) throw ConfigError("paper4: parameter a must be >= 0");
  CoefficientModel m;
  m.kind_ = Kind::Paper4;
  m.a_ = a;
  // Amplitudes over x1 in [0,1]: |2 - a*x1| <= max(2, |2-a|) for the
  // permeabilities, |1 + a*x1| <= 1 + a for the exchange rate.
  const double amp_k = std::max(2.0, std::abs(2.0 - a));
  const double amp_q = 1.0 + a;
  m.coercivity_ = 3.0 - std::max(amp_k, amp_q);
  if (!(m.coercivity_ > 0.0)) {
    throw ConfigError("paper4: parameter a too large, fields lose positivity");
  }
  return m;
}

CoefficientModel CoefficientModel::constant(double k1, double k2, double q) {
  if (!(k1 > 0.0 && k2 > 0.0 && q > 0.0)) {
    throw ConfigError("constant model: k1, k2, q must all be positive");
  }
  CoefficientModel m;
  m.kind_ = Kind::Constant;
  m.k1_ = k1;
  m.k2_ = k2;
  m.q_ = q;
  m.coercivity_ = std::min({k1, k2, q});
  return m;
}

CoefficientModel CoefficientModel::laminate(const std::string& profile,
                                            double q) {
  if (profile != "cosine") {
    throw ConfigError("laminate: unknown profile '" + profile +
                      "' (supported: cosine)");
  }
  if (!(q > 0.0)) throw ConfigError("laminate: q must be positive");
  CoefficientModel m;
  m.kind_ = Kind::Laminate;
  m.profile_ = profile;
  m.q_ = q;
  m.coercivity_ = std::min(1.0, q);  // 2 + cos >= 1
  return m;
}

CoefficientModel CoefficientModel::tabulated(TabulatedField k1,
                                             TabulatedField k2,
                                             TabulatedField q) {
  check_tab(k1, "k1");
  check_tab(k2, "k2");
  check_tab(q, "q");
  const double c = std::min({tab_min(k1), tab_min(k2), tab_min(q)});
  if (!(c > 0.0)) {
    throw ConfigError("tabulated model: all samples must be positive");
  }
  CoefficientModel m;
  m.kind_ = Kind::Tabulated;
  m.tab_k1_ = std::move(k1);
  m.tab_k2_ = std::move(k2);
  m.tab_q_ = std::move(q);
  m.coercivity_ = c;
  return m;
}

double CoefficientModel::eval(Field f, const Xpt& x, double y1,
                              double y2) const {
  const double w1 = wrap(y1), w2 = wrap(y2);
  switch (f) {
    case Field::C11:
    case Field::C22:
      return 1.0;  // constant capacities unless a future model configures them
    default:
      break;
  }
  switch (kind_) {
    case Kind::Paper4: {
      const double s1 = std::sin(kTwoPi * w1), c1 = std::cos(kTwoPi * w1);
      const double s2 = std::sin(kTwoPi * w2), c2 = std::cos(kTwoPi * w2);
      switch (f) {
        case Field::K1: return (2.0 - a_ * x.x1) * c1 * s2 + 3.0;
        case Field::K2: return (2.0 - a_ * x.x1) * s1 * c2 + 3.0;
        case Field::Q:  return (1.0 + a_ * x.x1) * s1 * s2 + 3.0;
        default: break;
      }
      break;
    }
    case Kind::Constant:
      switch (f) {
        case Field::K1: return k1_;
        case Field::K2: return k2_;
        case Field::Q:  return q_;
        default: break;
      }
      break;
    case Kind::Laminate: {
      const double k = 2.0 + std::cos(kTwoPi * w1);
      switch (f) {
        case Field::K1:
        case Field::K2: return k;
        case Field::Q:  return q_;
        default: break;
      }
      break;
    }
    case Kind::Tabulated:
      switch (f) {
        case Field::K1: return tab_eval(tab_k1_, x.x1, w1, w2);
        case Field::K2: return tab_eval(tab_k2_, x.x1, w1, w2);
        case Field::Q:  return tab_eval(tab_q_, x.x1, w1, w2);
        default: break;
      }
      break;
  }
  throw ConfigError("unknown coefficient field id");
}

double CoefficientModel::lipschitz_estimate() const {
  if (kind_ == Kind::Constant) return 0.0;
  // Difference quotients between adjacent lattice abscissae, maximized over a
  // cell-point lattice that includes the extrema of the trigonometric
  // families (multiples of 1/16).
  const int nx = 33;
  const int ny = 17;
  double x_lo = 0.0, x_hi = 1.0;
  if (kind_ == Kind::Tabulated) {
    x_lo = tab_k1_.x_lo;
    x_hi = tab_k1_.x_hi;
  }
  const double dx = (x_hi - x_lo) / (nx - 1);
  double est = 0.0;
  for (Field f : {Field::K1, Field::K2, Field::Q}) {
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const Xpt xa{x_lo + ix * dx, 0.0};
      const Xpt xb{x_lo + (ix + 1) * dx, 0.0};
      for (int i = 0; i < ny; ++i) {
        for (int j = 0; j < ny; ++j) {
          const double y1 = static_cast<double>(i) / (ny - 1);
          const double y2 = static_cast<double>(j) / (ny - 1);
          const double d = std::abs(eval(f, xa, y1, y2) - eval(f, xb, y1, y2));
          est = std::max(est, d / dx);
        }
      }
    }
  }
  return est;
}

}  // namespace mchom
