#include "pdmsym/coeff.hpp"

#include <map>
#include <mutex>

namespace pdm {

namespace {

struct KeyD {
    P3d p;
    int ord;
    bool operator<(const KeyD& o) const {
        if (ord != o.ord) return ord < o.ord;
        return p < o.p;
    }
};

struct KeyQ {
    P3q p;
    int ord;
    bool operator<(const KeyQ& o) const {
        if (ord != o.ord) return ord < o.ord;
        for (int a = 0; a < 3; ++a) {
            int c = cmp(p[a], o.p[a]);
            if (c != 0) return c < 0;
        }
        return false;
    }
};

}  // namespace

class CoeffImpl {
  public:
    std::function<CJet<double>(const P3d&, int)> fd;
    std::function<CJet<Rat>(const P3q&, int)> fq;  // empty when float-only
    CoeffTag tag = CoeffTag::Derived;

    CJet<double> eval(const P3d& p, int ord) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_d_.find({p, ord});
            if (it != cache_d_.end()) return it->second;
        }
        CJet<double> v = fd(p, ord);
        std::lock_guard<std::mutex> lk(mu_);
        return cache_d_.emplace(KeyD{p, ord}, std::move(v)).first->second;
    }

    CJet<Rat> eval(const P3q& p, int ord) {
        if (!fq) throw EvalError("coefficient is not available in rational mode");
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_q_.find({p, ord});
            if (it != cache_q_.end()) return it->second;
        }
        CJet<Rat> v = fq(p, ord);
        std::lock_guard<std::mutex> lk(mu_);
        return cache_q_.emplace(KeyQ{p, ord}, std::move(v)).first->second;
    }

    // Memoized derivative node so repeated cf_deriv calls share one cache.
    std::shared_ptr<CoeffImpl>& deriv_slot(int axis) {
        return deriv_[axis - 1];
    }
    std::mutex& mutex() { return mu_; }

  private:
    std::mutex mu_;
    std::map<KeyD, CJet<double>> cache_d_;
    std::map<KeyQ, CJet<Rat>> cache_q_;
    std::array<std::shared_ptr<CoeffImpl>, 3> deriv_;
};

namespace {

std::shared_ptr<CoeffImpl> make_impl(
    std::function<CJet<double>(const P3d&, int)> fd,
    std::function<CJet<Rat>(const P3q&, int)> fq, CoeffTag tag) {
    auto impl = std::make_shared<CoeffImpl>();
    impl->fd = std::move(fd);
    impl->fq = std::move(fq);
    impl->tag = tag;
    return impl;
}

}  // namespace

Coeff Coeff::wrap(std::shared_ptr<CoeffImpl> impl) {
    Coeff c;
    c.impl_ = std::move(impl);
    return c;
}

Coeff Coeff::from_functions(std::function<CJet<double>(const P3d&, int)> fd,
                            std::function<CJet<Rat>(const P3q&, int)> fq,
                            CoeffTag tag) {
    if (!fd) throw std::invalid_argument("coefficient needs a float evaluator");
    return wrap(make_impl(std::move(fd), std::move(fq), tag));
}

bool Coeff::rational_capable() const { return impl_ && impl_->fq != nullptr; }

CoeffTag Coeff::tag() const { return impl_ ? impl_->tag : CoeffTag::Derived; }

CJet<double> Coeff::eval(const P3d& p, int ord) const {
    if (!impl_) return CJet<double>::zero(p, ord);
    return impl_->eval(p, ord);
}

CJet<Rat> Coeff::eval(const P3q& p, int ord) const {
    if (!impl_) return CJet<Rat>::zero(p, ord);
    return impl_->eval(p, ord);
}

Coeff Coeff::deriv(int axis) const {
    if (axis < 1 || axis > 3) throw std::invalid_argument("axis out of range");
    if (!impl_) return Coeff();
    std::lock_guard<std::mutex> lk(impl_->mutex());
    auto& slot = impl_->deriv_slot(axis);
    if (!slot) {
        auto self = impl_;
        std::function<CJet<Rat>(const P3q&, int)> fq;
        if (self->fq)
            fq = [self, axis](const P3q& p, int ord) {
                return cjet_deriv(self->eval(p, ord + 1), axis);
            };
        slot = make_impl(
            [self, axis](const P3d& p, int ord) {
                return cjet_deriv(self->eval(p, ord + 1), axis);
            },
            std::move(fq), CoeffTag::Derived);
    }
    return wrap(slot);
}

Coeff Coeff::constant(const CRat& v) {
    if (v.is_zero()) return Coeff();
    double re = rat_d(v.re), im = rat_d(v.im);
    Rat qre = v.re, qim = v.im;
    return wrap(make_impl(
        [re, im](const P3d& p, int ord) {
            return CJet<double>{jet_const(re, p, ord), jet_const(im, p, ord)};
        },
        [qre, qim](const P3q& p, int ord) {
            return CJet<Rat>{jet_const(qre, p, ord), jet_const(qim, p, ord)};
        },
        CoeffTag::FromAst));
}

Coeff Coeff::from_field(FieldPtr e, std::shared_ptr<const Binding> b) {
    if (!e) throw std::invalid_argument("null field expression");
    if (!b) b = std::make_shared<const Binding>();
    return wrap(make_impl(
        [e, b](const P3d& p, int ord) {
            auto re = eval_field<double>(e, *b, p, ord);
            return CJet<double>{std::move(re), jet_const(0.0, p, ord)};
        },
        [e, b](const P3q& p, int ord) {
            auto re = eval_field<Rat>(e, *b, p, ord);
            return CJet<Rat>{std::move(re), jet_const(Rat(0), p, ord)};
        },
        CoeffTag::FromAst));
}

namespace {

// Derived node over two children; rational support only when both have it.
template <class Fn>
Coeff derived2(const std::shared_ptr<CoeffImpl>& ia,
               const std::shared_ptr<CoeffImpl>& ib, Fn fn) {
    std::function<CJet<Rat>(const P3q&, int)> q;
    if (ia->fq && ib->fq)
        q = [ia, ib, fn](const P3q& p, int ord) {
            return fn(ia->eval(p, ord), ib->eval(p, ord));
        };
    return Coeff::from_functions(
        [ia, ib, fn](const P3d& p, int ord) {
            return fn(ia->eval(p, ord), ib->eval(p, ord));
        },
        std::move(q), CoeffTag::Derived);
}

template <class Fn>
Coeff derived1(const std::shared_ptr<CoeffImpl>& ia, Fn fn) {
    std::function<CJet<Rat>(const P3q&, int)> q;
    if (ia->fq)
        q = [ia, fn](const P3q& p, int ord) { return fn(ia->eval(p, ord)); };
    return Coeff::from_functions(
        [ia, fn](const P3d& p, int ord) { return fn(ia->eval(p, ord)); },
        std::move(q), CoeffTag::Derived);
}

}  // namespace

Coeff cf_add(const Coeff& a, const Coeff& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return derived2(a.impl_, b.impl_,
                    [](const auto& x, const auto& y) { return cjet_add(x, y); });
}

Coeff cf_sub(const Coeff& a, const Coeff& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return cf_neg(b);
    return derived2(a.impl_, b.impl_,
                    [](const auto& x, const auto& y) { return cjet_sub(x, y); });
}

Coeff cf_neg(const Coeff& a) {
    if (a.is_zero()) return a;
    return derived1(a.impl_, [](const auto& x) { return cjet_neg(x); });
}

Coeff cf_mul(const Coeff& a, const Coeff& b) {
    if (a.is_zero() || b.is_zero()) return Coeff();
    return derived2(a.impl_, b.impl_,
                    [](const auto& x, const auto& y) { return cjet_mul(x, y); });
}

Coeff cf_div(const Coeff& a, const Coeff& b) {
    if (b.is_zero())
        throw std::invalid_argument("division by structural zero coefficient");
    if (a.is_zero()) return Coeff();
    return derived2(a.impl_, b.impl_,
                    [](const auto& x, const auto& y) { return cjet_div(x, y); });
}

Coeff cf_conj(const Coeff& a) {
    if (a.is_zero()) return a;
    return derived1(a.impl_, [](const auto& x) { return cjet_conj(x); });
}

Coeff cf_scale(const Coeff& a, const CRat& s) {
    if (a.is_zero() || s.is_zero()) return Coeff();
    if (s.re == Rat(1) && s.im == Rat(0)) return a;
    double sre = rat_d(s.re), sim = rat_d(s.im);
    Rat qre = s.re, qim = s.im;
    return derived1(a.impl_, [sre, sim, qre, qim](const auto& x) {
        using S = std::decay_t<decltype(x.re.c[0])>;
        S cre, cim;
        if constexpr (std::is_same_v<S, double>) {
            cre = sre;
            cim = sim;
        } else {
            cre = qre;
            cim = qim;
        }
        return CJet<S>{jet_sub(jet_scale(x.re, cre), jet_scale(x.im, cim)),
                       jet_add(jet_scale(x.im, cre), jet_scale(x.re, cim))};
    });
}

}  // namespace pdm
