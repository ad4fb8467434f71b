#pragma once

#include <cmath>
#include <cstdint>
#include <gmpxx.h>
#include <variant>
#include <vector>

#include "robzero/common.hpp"

namespace robzero {

enum class Norm { l1, l2, linf };

inline const char* norm_name(Norm p) {
    switch (p) {
        case Norm::l1: return "1";
        case Norm::l2: return "2";
        default: return "inf";
    }
}

// Exact magnitude key for |f(v)|_p.  The stored components are IEEE doubles,
// i.e. dyadic rationals, so sums and squares are exact in mpq; the l-inf case
// stays a plain double.  For p=2 the key is the squared magnitude (squaring
// preserves order, no root extraction).
class Mag {
public:
    Mag() : v_(0.0) {}
    static Mag linf(const double* f, int n) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(f[i]));
        return Mag(m);
    }
    static Mag l1(const double* f, int n) {
        mpq_class s = 0;
        for (int i = 0; i < n; ++i) s += mpq_class(std::fabs(f[i]));
        return Mag(s, false);
    }
    static Mag l2(const double* f, int n) {
        mpq_class s = 0;
        for (int i = 0; i < n; ++i) {
            mpq_class c(f[i]);
            s += c * c;
        }
        return Mag(s, true);
    }
    static Mag of(const double* f, int n, Norm p) {
        switch (p) {
            case Norm::l1: return l1(f, n);
            case Norm::l2: return l2(f, n);
            default: return linf(f, n);
        }
    }
    // Threshold alpha * n^(1/p) in the key's own scale.
    static Mag threshold(double alpha, int n, Norm p) {
        switch (p) {
            case Norm::l1: return Mag(mpq_class(alpha) * n, false);
            case Norm::l2: return Mag(mpq_class(alpha) * mpq_class(alpha) * n, true);
            default: return Mag(alpha);
        }
    }

    bool operator<(const Mag& o) const { return cmp(o) < 0; }
    bool operator==(const Mag& o) const { return cmp(o) == 0; }
    bool operator<=(const Mag& o) const { return cmp(o) <= 0; }

    bool is_zero() const {
        if (std::holds_alternative<double>(v_)) return std::get<double>(v_) == 0.0;
        return std::get<Rational>(v_).q == 0;
    }

    // Display value in the units of |f| (undoes the p=2 squaring).
    double display() const {
        if (std::holds_alternative<double>(v_)) return std::get<double>(v_);
        const Rational& r = std::get<Rational>(v_);
        double d = r.q.get_d();
        return r.squared ? std::sqrt(d) : d;
    }

private:
    struct Rational {
        mpq_class q;
        bool squared;
    };
    explicit Mag(double d) : v_(d) {}
    Mag(mpq_class q, bool squared) : v_(Rational{std::move(q), squared}) {}

    int cmp(const Mag& o) const {
        if (std::holds_alternative<double>(v_)) {
            double a = std::get<double>(v_), b = std::get<double>(o.v_);
            return a < b ? -1 : (a > b ? 1 : 0);
        }
        return ::cmp(std::get<Rational>(v_).q, std::get<Rational>(o.v_).q);
    }

    std::variant<double, Rational> v_;
};

inline double norm_value(const double* f, int n, Norm p) {
    switch (p) {
        case Norm::l1: {
            double s = 0;
            for (int i = 0; i < n; ++i) s += std::fabs(f[i]);
            return s;
        }
        case Norm::l2: {
            double s = 0;
            for (int i = 0; i < n; ++i) s += f[i] * f[i];
            return std::sqrt(s);
        }
        default: {
            double m = 0;
            for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(f[i]));
            return m;
        }
    }
}

} // namespace robzero
