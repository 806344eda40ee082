#ifndef CIRCLEABC_CIRCLE_MAP_HPP
#define CIRCLEABC_CIRCLE_MAP_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "circleabc/hhat.hpp"
#include "circleabc/jet.hpp"
#include "circleabc/real.hpp"

namespace abc {

// Orientation-preserving circle map as a composition tree. Every node
// evaluates as a degree-one lift F : R -> R with F(x+1) = F(x)+1, so circle
// values are read off mod 1 and rotation-number arithmetic stays exact.
class CircleMap;
using MapPtr = std::shared_ptr<const CircleMap>;

class CircleMap {
 public:
  enum class Kind { Identity, Rotation, LiftedHHat, Inverse, Compose };

  // --- constructors ----------------------------------------------------
  static MapPtr identity() {
    return std::shared_ptr<CircleMap>(new CircleMap(Kind::Identity));
  }
  static MapPtr rotation(const Rational& alpha) {
    auto m = std::shared_ptr<CircleMap>(new CircleMap(Kind::Rotation));
    m->alpha_ = alpha;
    return m;
  }
  // q-fold cyclic lift of h^(t); `inverted` selects the inverse kernel.
  // shrink_stage >= 1 selects the rescaled variant: identity outside
  // [0, 2^-(stage+1)], conjugate of h^(t) by x -> 2^(stage+1) x inside.
  static MapPtr lifted_hhat(const Rational& t, const Int& q,
                            bool inverted = false, int shrink_stage = 0) {
    if (q < 1) throw std::invalid_argument("lifted_hhat: q must be >= 1");
    auto m = std::shared_ptr<CircleMap>(new CircleMap(Kind::LiftedHHat));
    m->t_ = t;
    m->q_ = q;
    m->inverted_ = inverted;
    m->shrink_stage_ = shrink_stage;
    m->hh_ = std::make_shared<HHat>(t);
    return m;
  }
  static MapPtr inverse(const MapPtr& c) {
    switch (c->kind_) {
      case Kind::Identity:
        return c;
      case Kind::Rotation:
        return rotation(-c->alpha_);
      case Kind::LiftedHHat:
        return lifted_hhat(c->t_, c->q_, !c->inverted_, c->shrink_stage_);
      case Kind::Inverse:
        return c->left_;
      default:
        break;
    }
    auto m = std::shared_ptr<CircleMap>(new CircleMap(Kind::Inverse));
    m->left_ = c;
    return m;
  }
  // left AFTER right: (compose(l, r))(x) = l(r(x)).
  static MapPtr compose(const MapPtr& l, const MapPtr& r) {
    if (l->kind_ == Kind::Identity) return r;
    if (r->kind_ == Kind::Identity) return l;
    auto m = std::shared_ptr<CircleMap>(new CircleMap(Kind::Compose));
    m->left_ = l;
    m->right_ = r;
    return m;
  }

  Kind kind() const { return kind_; }
  const Rational& alpha() const { return alpha_; }
  const Rational& t() const { return t_; }
  const Int& q() const { return q_; }
  bool inverted() const { return inverted_; }
  int shrink_stage() const { return shrink_stage_; }
  const MapPtr& left() const { return left_; }
  const MapPtr& right() const { return right_; }
  const HHat& kernel() const { return *hh_; }

  // --- evaluation (lift on R) -------------------------------------------
  Real eval(const Real& x) const {
    switch (kind_) {
      case Kind::Identity:
        return x;
      case Kind::Rotation:
        return x + to_real(alpha_);
      case Kind::LiftedHHat: {
        Real qx = to_real(q_) * x;
        Int m = floor_real(qx);
        Real v = qx - to_real(Rational(m));
        Real w = inverted_ ? kernel_eval_inv(v) : kernel_eval(v);
        return (to_real(Rational(m)) + w) / to_real(q_);
      }
      case Kind::Inverse:
        return left_->eval_inverse(x);
      case Kind::Compose:
        return left_->eval(right_->eval(x));
    }
    throw std::logic_error("unreachable");
  }

  Real eval_inverse(const Real& y) const {
    switch (kind_) {
      case Kind::Identity:
        return y;
      case Kind::Rotation:
        return y - to_real(alpha_);
      case Kind::LiftedHHat: {
        Real qy = to_real(q_) * y;
        Int m = floor_real(qy);
        Real v = qy - to_real(Rational(m));
        Real w = inverted_ ? kernel_eval(v) : kernel_eval_inv(v);
        return (to_real(Rational(m)) + w) / to_real(q_);
      }
      case Kind::Inverse:
        return left_->eval(y);
      case Kind::Compose:
        return right_->eval_inverse(left_->eval_inverse(y));
    }
    throw std::logic_error("unreachable");
  }

  // Exact evaluation where the point avoids every smooth-step zone.
  std::optional<Rational> exact_eval(const Rational& x) const {
    switch (kind_) {
      case Kind::Identity:
        return x;
      case Kind::Rotation:
        return x + alpha_;
      case Kind::LiftedHHat: {
        Rational qx = Rational(q_) * x;
        Int m = floor_rat(qx);
        Rational v = qx - m;
        auto w = inverted_ ? kernel_exact_inv(v) : kernel_exact(v);
        if (!w) return std::nullopt;
        return (Rational(m) + *w) / Rational(q_);
      }
      case Kind::Inverse:
        return left_->exact_eval_inverse(x);
      case Kind::Compose: {
        auto mid = right_->exact_eval(x);
        if (!mid) return std::nullopt;
        return left_->exact_eval(*mid);
      }
    }
    throw std::logic_error("unreachable");
  }

  std::optional<Rational> exact_eval_inverse(const Rational& y) const {
    switch (kind_) {
      case Kind::Identity:
        return y;
      case Kind::Rotation:
        return y - alpha_;
      case Kind::LiftedHHat: {
        Rational qy = Rational(q_) * y;
        Int m = floor_rat(qy);
        Rational v = qy - m;
        auto w = inverted_ ? kernel_exact(v) : kernel_exact_inv(v);
        if (!w) return std::nullopt;
        return (Rational(m) + *w) / Rational(q_);
      }
      case Kind::Inverse:
        return left_->exact_eval(y);
      case Kind::Compose: {
        auto mid = left_->exact_eval_inverse(y);
        if (!mid) return std::nullopt;
        return right_->exact_eval_inverse(*mid);
      }
    }
    throw std::logic_error("unreachable");
  }

  // Exact local affine germ of the lift at a rational point: value, slope,
  // and a two-sided radius within which the germ stays valid (no kernel
  // changes piece). Present exactly when every kernel along the tree is
  // entered in a pure zone; all derivatives of order >= 2 vanish there.
  struct AffineGerm {
    Rational value;
    Rational slope;
    Rational margin;
  };

  std::optional<AffineGerm> affine_germ(const Rational& x) const {
    switch (kind_) {
      case Kind::Identity:
        return AffineGerm{x, 1, Rational(1)};
      case Kind::Rotation:
        return AffineGerm{x + alpha_, 1, Rational(1)};
      case Kind::LiftedHHat: {
        Rational qx = Rational(q_) * x;
        Int m = floor_rat(qx);
        Rational v = qx - m;
        Rational qr(q_);
        if (shrink_stage_ >= 1) {
          Rational c = pow_rat(Rational(2), shrink_stage_ + 1);
          if (v >= 1 / c) {
            Rational m = v - 1 / c, m2 = 1 - v;
            if (m2 < m) m = m2;
            return AffineGerm{x, 1, m / qr};
          }
          auto g = inverted_ ? hh_->affine_germ_inv(c * v)
                             : hh_->affine_germ(c * v);
          if (!g) return std::nullopt;
          return AffineGerm{(Rational(m) + g->value / c) / qr, g->slope,
                            g->margin / (c * qr)};
        }
        auto g = inverted_ ? hh_->affine_germ_inv(v) : hh_->affine_germ(v);
        if (!g) return std::nullopt;
        return AffineGerm{(Rational(m) + g->value) / qr, g->slope,
                          g->margin / qr};
      }
      case Kind::Inverse: {
        auto u = left_->exact_eval_inverse(x);
        if (!u) return std::nullopt;
        auto g = left_->affine_germ(*u);
        if (!g || g->slope == 0) return std::nullopt;
        return AffineGerm{*u, 1 / g->slope, g->margin * g->slope};
      }
      case Kind::Compose: {
        auto gr = right_->affine_germ(x);
        if (!gr) return std::nullopt;
        auto gl = left_->affine_germ(gr->value - floor_rat(gr->value));
        if (!gl) return std::nullopt;
        Rational m = gr->margin;
        if (gr->slope != 0) {
          Rational lm = gl->margin / abs(gr->slope);
          if (lm < m) m = lm;
        }
        return AffineGerm{gl->value + floor_rat(gr->value),
                          gl->slope * gr->slope, m};
      }
    }
    throw std::logic_error("unreachable");
  }

  // Mantissa (in bits) at which an order-k jet of this map, evaluated in
  // floating point, still resolves additive cancellation between samples:
  // every kernel contributes its slope range (den t, squared for the
  // transition argument) and cell count q at each order.
  unsigned long cancellation_base_bits() const {
    switch (kind_) {
      case Kind::Identity:
      case Kind::Rotation:
        return 0;
      case Kind::LiftedHHat:
        return 2 * bit_length(denominator(t_)) + bit_length(q_);
      case Kind::Inverse:
        return left_->cancellation_base_bits();
      case Kind::Compose:
        return left_->cancellation_base_bits() +
               right_->cancellation_base_bits();
    }
    return 0;
  }

  // --- jets --------------------------------------------------------------
  Jet jet(unsigned order, const Real& x) const {
    switch (kind_) {
      case Kind::Identity:
        return Jet::variable(order, x);
      case Kind::Rotation:
        return Jet::variable(order, x) + to_real(alpha_);
      case Kind::LiftedHHat: {
        Real qx = to_real(q_) * x;
        Int m = floor_real(qx);
        Real v = qx - to_real(Rational(m));
        Jet inner = kernel_jet(order, v, inverted_);
        // F(x) = (m + w(qx - m))/q: rescale the kernel jet.
        Jet r(order, (to_real(Rational(m)) + inner[0]) / to_real(q_));
        Real scale = 1;  // q^(j-1) net factor on coefficient j
        for (unsigned j = 1; j <= order; ++j) {
          scale *= to_real(q_);
          r[j] = inner[j] * scale / to_real(q_);
        }
        return r;
      }
      case Kind::Inverse: {
        Real xp = left_->eval_inverse(x);
        return left_->jet(order, xp).invert(xp);
      }
      case Kind::Compose: {
        Jet jr = right_->jet(order, x);
        Jet jl = left_->jet(order, jr.value());
        return jr.compose_outer(jl);
      }
    }
    throw std::logic_error("unreachable");
  }

  // Rational-argument jet: fractional parts and smooth-step arguments are
  // formed exactly before entering floating point, so accuracy does not
  // degrade with the feature scale t^2/q. Compose feeds the right factor's
  // (captured) rational value to the left factor, so in a finest-stage-first
  // composition every kernel is entered through the exact path.
  Jet jet_rat(unsigned order, const Rational& x) const {
    switch (kind_) {
      case Kind::Identity:
        return Jet::variable(order, to_real(x));
      case Kind::Rotation:
        return Jet::variable(order, to_real(x + alpha_));
      case Kind::LiftedHHat: {
        Rational qx = Rational(q_) * x;
        Int m = floor_rat(qx);
        Rational v = qx - m;
        Jet inner = kernel_jet_rat(order, v, inverted_);
        Jet r(order, (to_real(Rational(m)) + inner[0]) / to_real(q_));
        Real scale = 1;
        for (unsigned j = 1; j <= order; ++j) {
          scale *= to_real(q_);
          r[j] = inner[j] * scale / to_real(q_);
        }
        return r;
      }
      case Kind::Inverse: {
        Rational xp = left_->backward_rational(x);
        return left_->jet_rat(order, xp).invert(to_real(xp));
      }
      case Kind::Compose: {
        Jet jr = right_->jet_rat(order, x);
        Rational mid = real_to_rational(jr.value());
        Jet jl = left_->jet_rat(order, mid);
        return jr.compose_outer(jl);
      }
    }
    throw std::logic_error("unreachable");
  }

  // --- structure ----------------------------------------------------------
  MapPtr inverse_of() const;  // structural inverse tree

  static bool structurally_equal(const MapPtr& a, const MapPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind_ != b->kind_) return false;
    switch (a->kind_) {
      case Kind::Identity:
        return true;
      case Kind::Rotation:
        return a->alpha_ == b->alpha_;
      case Kind::LiftedHHat:
        return a->t_ == b->t_ && a->q_ == b->q_ &&
               a->inverted_ == b->inverted_ &&
               a->shrink_stage_ == b->shrink_stage_;
      case Kind::Inverse:
        return structurally_equal(a->left_, b->left_);
      case Kind::Compose:
        return structurally_equal(a->left_, b->left_) &&
               structurally_equal(a->right_, b->right_);
    }
    return false;
  }

  static bool is_inverse_pair(const MapPtr& a, const MapPtr& b) {
    return structurally_equal(a->inverse_of(), b);
  }

  // Largest denominator appearing in the tree; drives precision policies.
  Int max_q() const {
    switch (kind_) {
      case Kind::Identity:
        return 1;
      case Kind::Rotation:
        return denominator(alpha_);
      case Kind::LiftedHHat: {
        Int dq = q_ * denominator(t_);  // kernel features at scale t^2/q
        return dq;
      }
      case Kind::Inverse:
        return left_->max_q();
      case Kind::Compose: {
        Int a = left_->max_q(), b = right_->max_q();
        return a > b ? a : b;
      }
    }
    return 1;
  }

  // Candidate abscissas for derivative extrema, exploiting the 1/q
  // periodicity of lifted kernels. Compose pulls the left factor's
  // candidates back through the right factor.
  std::vector<Rational> critical_points() const {
    switch (kind_) {
      case Kind::Identity:
      case Kind::Rotation:
        return {Rational(0)};
      case Kind::LiftedHHat: {
        std::vector<Rational> out;
        Rational qr(q_);
        if (shrink_stage_ >= 1) {
          Rational c = pow_rat(Rational(1, 2), shrink_stage_ + 1);
          for (const Rational& p : hh_->critical_points())
            out.push_back(p * c / qr);
          out.push_back(c / qr);
        } else {
          for (const Rational& p : hh_->critical_points())
            out.push_back(p / qr);
        }
        if (inverted_) {
          // pull forward: extrema of the inverse sit at kernel images
          std::vector<Rational> img;
          img.reserve(out.size());
          for (const Rational& p : out) img.push_back(forward_rational(p));
          return img;
        }
        return out;
      }
      case Kind::Inverse: {
        std::vector<Rational> out;
        for (const Rational& p : left_->critical_points())
          out.push_back(left_->forward_rational(p));
        return out;
      }
      case Kind::Compose: {
        std::vector<Rational> out = right_->critical_points();
        for (const Rational& p : left_->critical_points())
          out.push_back(right_->backward_rational(p));
        return out;
      }
    }
    return {};
  }

  // Rational image/preimage: exact when available, else a dyadic rational
  // capture of the numeric value (only used to seed norm sampling).
  Rational forward_rational(const Rational& x) const {
    if (auto e = exact_eval(x)) return *e;
    return real_to_rational(eval(to_real(x)));
  }
  Rational backward_rational(const Rational& y) const {
    if (auto e = exact_eval_inverse(y)) return *e;
    return real_to_rational(eval_inverse(to_real(y)));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    switch (kind_) {
      case Kind::Identity:
        j["node"] = "identity";
        break;
      case Kind::Rotation:
        j["node"] = "rotation";
        j["alpha"] = rat_json(alpha_);
        break;
      case Kind::LiftedHHat:
        j["node"] = "lifted_hhat";
        j["t"] = rat_json(t_);
        j["q"] = int_to_string(q_);
        j["inverted"] = inverted_;
        if (shrink_stage_ >= 1) j["shrink_stage"] = shrink_stage_;
        break;
      case Kind::Inverse:
        j["node"] = "inverse";
        j["child"] = left_->to_json();
        break;
      case Kind::Compose:
        j["node"] = "compose";
        j["left"] = left_->to_json();
        j["right"] = right_->to_json();
        break;
    }
    return j;
  }

  static MapPtr from_json(const nlohmann::json& j) {
    const std::string node = j.at("node").get<std::string>();
    if (node == "identity") return identity();
    if (node == "rotation") return rotation(rat_from_json(j.at("alpha")));
    if (node == "lifted_hhat")
      return lifted_hhat(rat_from_json(j.at("t")),
                         Int(j.at("q").get<std::string>()),
                         j.value("inverted", false),
                         j.value("shrink_stage", 0));
    if (node == "inverse") return inverse(from_json(j.at("child")));
    if (node == "compose")
      return compose(from_json(j.at("left")), from_json(j.at("right")));
    throw std::invalid_argument("unknown circle-map node: " + node);
  }

  static nlohmann::json rat_json(const Rational& r) {
    return {{"num", int_to_string(numerator(r))},
            {"den", int_to_string(denominator(r))}};
  }
  static Rational rat_from_json(const nlohmann::json& j) {
    return Rational(Int(j.at("num").get<std::string>()),
                    Int(j.at("den").get<std::string>()));
  }

 private:
  explicit CircleMap(Kind k) : kind_(k) {}

  // Kernel dispatch honoring the rescaled (shrink) variant.
  Real kernel_eval(const Real& v) const {
    if (shrink_stage_ < 1) return hh_->eval(v);
    Real c = pow(Real(2), shrink_stage_ + 1);
    if (v >= 1 / c) return v;
    return hh_->eval(c * v) / c;
  }
  Real kernel_eval_inv(const Real& v) const {
    if (shrink_stage_ < 1) return hh_->eval_inv(v);
    Real c = pow(Real(2), shrink_stage_ + 1);
    if (v >= 1 / c) return v;
    return hh_->eval_inv(c * v) / c;
  }
  std::optional<Rational> kernel_exact(const Rational& v) const {
    if (shrink_stage_ < 1) return hh_->exact_eval(v);
    Rational c = pow_rat(Rational(2), shrink_stage_ + 1);
    if (v >= 1 / c) return v;
    auto w = hh_->exact_eval(c * v);
    if (!w) return std::nullopt;
    return *w / c;
  }
  std::optional<Rational> kernel_exact_inv(const Rational& v) const {
    if (shrink_stage_ < 1) return hh_->exact_eval_inv(v);
    Rational c = pow_rat(Rational(2), shrink_stage_ + 1);
    if (v >= 1 / c) return v;
    auto w = hh_->exact_eval_inv(c * v);
    if (!w) return std::nullopt;
    return *w / c;
  }
  Jet kernel_jet_rat(unsigned order, const Rational& v, bool inv) const {
    if (shrink_stage_ < 1)
      return inv ? hh_->jet_inv_rat(order, v) : hh_->jet_rat(order, v);
    Rational c = pow_rat(Rational(2), shrink_stage_ + 1);
    if (v >= 1 / c) return Jet::variable(order, to_real(v));
    Jet inner =
        inv ? hh_->jet_inv_rat(order, c * v) : hh_->jet_rat(order, c * v);
    Real cr = to_real(c);
    Jet r(order, inner[0] / cr);
    Real scale = 1;
    for (unsigned j = 1; j <= order; ++j) {
      scale *= cr;
      r[j] = inner[j] * scale / cr;
    }
    return r;
  }
  Jet kernel_jet(unsigned order, const Real& v, bool inv) const {
    if (shrink_stage_ < 1)
      return inv ? hh_->jet_inv(order, v) : hh_->jet(order, v);
    Real c = pow(Real(2), shrink_stage_ + 1);
    if (v >= 1 / c) return Jet::variable(order, v);
    Jet inner = inv ? hh_->jet_inv(order, c * v) : hh_->jet(order, c * v);
    Jet r(order, inner[0] / c);
    Real scale = 1;
    for (unsigned j = 1; j <= order; ++j) {
      scale *= c;
      r[j] = inner[j] * scale / c;
    }
    return r;
  }

  Kind kind_;
  Rational alpha_;
  Rational t_;
  Int q_ = 1;
  bool inverted_ = false;
  int shrink_stage_ = 0;
  MapPtr left_, right_;
  std::shared_ptr<HHat> hh_;
};

inline MapPtr CircleMap::inverse_of() const {
  switch (kind_) {
    case Kind::Identity:
      return identity();
    case Kind::Rotation:
      return rotation(-alpha_);
    case Kind::LiftedHHat:
      return lifted_hhat(t_, q_, !inverted_, shrink_stage_);
    case Kind::Inverse:
      return left_;
    case Kind::Compose:
      return compose(right_->inverse_of(), left_->inverse_of());
  }
  throw std::logic_error("unreachable");
}

}  // namespace abc

#endif  // CIRCLEABC_CIRCLE_MAP_HPP
