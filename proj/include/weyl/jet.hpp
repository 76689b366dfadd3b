#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "weyl/error.hpp"
#include "weyl/multiindex.hpp"

namespace weyl {

/**
 * Truncated multivariate Taylor expansion of a smooth scalar at a point.
 *
 * Coefficients are Taylor coefficients, coeff(alpha) = d^alpha f / alpha!,
 * stored densely over the simplex |alpha| <= order in the graded ordering of
 * MultiIndexTable. Arithmetic is exact truncation: the result of any
 * operation carries the smallest order for which every coefficient is still
 * exact (a derivative loses one order, a product keeps the minimum of its
 * operands).
 */
class Jet {
public:
    Jet() = default;

    Jet(int nvars, int order, double value = 0.0)
        : n_(nvars), order_(check_order(order)), c_(simplex_size(nvars, order), 0.0) {
        c_[0] = value;
    }

    /// Jet of the coordinate function x_var at base value `value`.
    static Jet coordinate(int nvars, int order, int var, double value) {
        Jet j(nvars, order, value);
        if (order >= 1) j.c_[static_cast<std::size_t>(1 + var)] = 1.0; // grade-1 block is e_0..e_{n-1}
        return j;
    }

    static Jet constant(int nvars, int order, double value) { return Jet(nvars, order, value); }

    int nvars() const { return n_; }
    int order() const { return order_; }
    double value() const { return c_.empty() ? 0.0 : c_[0]; }

    std::span<const double> coeffs() const { return c_; }
    double coeff(int pos) const { return c_[static_cast<std::size_t>(pos)]; }

    /// Taylor coefficient of the given exponent tuple (0 when above order).
    double coeff(std::span<const int> alpha) const;

    /// Partial derivative d^alpha f / dx^alpha (coefficient times alpha!).
    double partial(std::span<const int> alpha) const;

    double& raw(int pos) { return c_[static_cast<std::size_t>(pos)]; }

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }
    Jet& operator*=(double s) { for (auto& x : c_) x *= s; return *this; }

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator+(Jet a, double s) { a += s; return a; }
    friend Jet operator+(double s, Jet a) { a += s; return a; }
    friend Jet operator-(Jet a, double s) { a -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { Jet r = -a; r += s; return r; }
    friend Jet operator*(Jet a, double s) { a *= s; return a; }
    friend Jet operator*(double s, Jet a) { a *= s; return a; }
    friend Jet operator/(Jet a, double s) { a *= 1.0 / s; return a; }
    friend Jet operator-(const Jet& a) {
        Jet r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

    /// d/dx_var as a jet of one lower order.
    Jet derivative(int var) const;

    static int simplex_size(int nvars, int order) {
        return MultiIndexTable::get(nvars).size(check_order(order));
    }

private:
    static int check_order(int order) {
        if (order < 0) throw NumericError("insufficient jet order for requested derivative");
        if (order > kMaxOrder) throw NumericError("jet order above supported maximum");
        return order;
    }
    void require_same(const Jet& o) const {
        if (n_ != o.n_) throw NumericError("jet variable count mismatch");
    }

    int n_ = 0;
    int order_ = 0;
    std::vector<double> c_;

    friend Jet truncate(Jet j, int order);
    friend Jet compose_series(const Jet& u, std::span<const double> series);
};

inline double Jet::coeff(std::span<const int> alpha) const {
    const auto& tab = MultiIndexTable::get(n_);
    int deg = 0;
    for (int a : alpha) deg += a;
    if (deg > order_) return 0.0;
    for (int p = 0; p < tab.size(order_); ++p) {
        auto e = tab.exponents(p);
        bool match = true;
        for (int v = 0; v < n_; ++v)
            if (e[static_cast<std::size_t>(v)] != alpha[static_cast<std::size_t>(v)]) { match = false; break; }
        if (match) return c_[static_cast<std::size_t>(p)];
    }
    return 0.0;
}

inline double Jet::partial(std::span<const int> alpha) const {
    double fact = 1.0;
    for (int a : alpha)
        for (int k = 2; k <= a; ++k) fact *= k;
    return coeff(alpha) * fact;
}

inline Jet& Jet::operator+=(const Jet& o) {
    require_same(o);
    if (o.order_ < order_) {
        order_ = o.order_;
        c_.resize(o.c_.size());
    }
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

inline Jet& Jet::operator-=(const Jet& o) {
    require_same(o);
    if (o.order_ < order_) {
        order_ = o.order_;
        c_.resize(o.c_.size());
    }
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

inline Jet truncate(Jet j, int order) {
    if (order > j.order_) throw NumericError("cannot extend jet order by truncation");
    j.order_ = order;
    j.c_.resize(static_cast<std::size_t>(Jet::simplex_size(j.n_, order)));
    return j;
}

inline Jet operator*(const Jet& a, const Jet& b) {
    a.require_same(b);
    const int order = std::min(a.order_, b.order_);
    Jet r(a.n_, order);
    const auto& tab = MultiIndexTable::get(a.n_);
    const int nc = tab.size(order);
    for (const auto& t : tab.mul_triples()) {
        if (t.c >= nc) break; // triples sorted by result position; later grades exceed order
        r.c_[static_cast<std::size_t>(t.c)] +=
            a.c_[static_cast<std::size_t>(t.a)] * b.c_[static_cast<std::size_t>(t.b)];
    }
    return r;
}

inline Jet Jet::derivative(int var) const {
    Jet r(n_, check_order(order_ - 1));
    const auto& tab = MultiIndexTable::get(n_);
    const int nr = tab.size(r.order_);
    for (int p = 0; p < nr; ++p) {
        const int q = tab.bump(p, var);
        r.c_[static_cast<std::size_t>(p)] =
            c_[static_cast<std::size_t>(q)] * (tab.exponents(q)[static_cast<std::size_t>(var)]);
    }
    return r;
}

/**
 * Composition f(u) where f is described by its univariate Taylor series at
 * u.value(): series[j] = f^(j)(u0)/j!. Evaluated by Horner in (u - u0).
 */
inline Jet compose_series(const Jet& u, std::span<const double> series) {
    Jet h = u; // u - u0, zero value part
    h.c_[0] = 0.0;
    Jet r(u.n_, u.order_, series[static_cast<std::size_t>(u.order_)]);
    for (int j = u.order_ - 1; j >= 0; --j) {
        r = r * h;
        r += series[static_cast<std::size_t>(j)];
    }
    return r;
}

namespace detail {

inline std::vector<double> series_buffer(int order) {
    return std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0);
}

} // namespace detail

inline Jet exp(const Jet& u) {
    auto s = detail::series_buffer(u.order());
    const double e = std::exp(u.value());
    double fact = 1.0;
    for (int j = 0; j <= u.order(); ++j) {
        if (j > 0) fact *= j;
        s[static_cast<std::size_t>(j)] = e / fact;
    }
    return compose_series(u, s);
}

inline Jet log(const Jet& u) {
    if (!(u.value() > 0.0)) throw DomainError("log of non-positive value");
    auto s = detail::series_buffer(u.order());
    s[0] = std::log(u.value());
    double p = 1.0; // (-1)^{j+1} / (j * u0^j)
    for (int j = 1; j <= u.order(); ++j) {
        p /= u.value();
        s[static_cast<std::size_t>(j)] = (j % 2 ? p : -p) / j;
    }
    return compose_series(u, s);
}

inline Jet sin(const Jet& u) {
    auto s = detail::series_buffer(u.order());
    const double sv = std::sin(u.value()), cv = std::cos(u.value());
    const double cycle[4] = {sv, cv, -sv, -cv};
    double fact = 1.0;
    for (int j = 0; j <= u.order(); ++j) {
        if (j > 0) fact *= j;
        s[static_cast<std::size_t>(j)] = cycle[j % 4] / fact;
    }
    return compose_series(u, s);
}

inline Jet cos(const Jet& u) {
    auto s = detail::series_buffer(u.order());
    const double sv = std::sin(u.value()), cv = std::cos(u.value());
    const double cycle[4] = {cv, -sv, -cv, sv};
    double fact = 1.0;
    for (int j = 0; j <= u.order(); ++j) {
        if (j > 0) fact *= j;
        s[static_cast<std::size_t>(j)] = cycle[j % 4] / fact;
    }
    return compose_series(u, s);
}

inline Jet sinh(const Jet& u) {
    auto s = detail::series_buffer(u.order());
    const double sv = std::sinh(u.value()), cv = std::cosh(u.value());
    double fact = 1.0;
    for (int j = 0; j <= u.order(); ++j) {
        if (j > 0) fact *= j;
        s[static_cast<std::size_t>(j)] = (j % 2 ? cv : sv) / fact;
    }
    return compose_series(u, s);
}

inline Jet cosh(const Jet& u) {
    auto s = detail::series_buffer(u.order());
    const double sv = std::sinh(u.value()), cv = std::cosh(u.value());
    double fact = 1.0;
    for (int j = 0; j <= u.order(); ++j) {
        if (j > 0) fact *= j;
        s[static_cast<std::size_t>(j)] = (j % 2 ? sv : cv) / fact;
    }
    return compose_series(u, s);
}

// tan and tanh via the ODE recurrences y' = 1 + y^2 and y' = 1 - y^2.
inline Jet tan(const Jet& u) {
    auto y = detail::series_buffer(u.order());
    y[0] = std::tan(u.value());
    for (int j = 0; j < u.order(); ++j) {
        double conv = 0.0;
        for (int i = 0; i <= j; ++i) conv += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j - i)];
        y[static_cast<std::size_t>(j + 1)] = ((j == 0 ? 1.0 : 0.0) + conv) / (j + 1);
    }
    return compose_series(u, y);
}

inline Jet tanh(const Jet& u) {
    auto y = detail::series_buffer(u.order());
    y[0] = std::tanh(u.value());
    for (int j = 0; j < u.order(); ++j) {
        double conv = 0.0;
        for (int i = 0; i <= j; ++i) conv += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j - i)];
        y[static_cast<std::size_t>(j + 1)] = ((j == 0 ? 1.0 : 0.0) - conv) / (j + 1);
    }
    return compose_series(u, y);
}

// atan via (1 + x^2) y' = 1 at x = u0 + h.
inline Jet atan(const Jet& u) {
    auto y = detail::series_buffer(u.order());
    const double x0 = u.value();
    const double q0 = 1.0 + x0 * x0;
    y[0] = std::atan(x0);
    if (u.order() >= 1) y[1] = 1.0 / q0;
    for (int j = 1; j < u.order(); ++j) {
        const double a = 2.0 * x0 * j * y[static_cast<std::size_t>(j)];
        const double b = (j - 1) * y[static_cast<std::size_t>(j - 1)];
        y[static_cast<std::size_t>(j + 1)] = -(a + b) / (q0 * (j + 1));
    }
    return compose_series(u, y);
}

/// Real power u^p via the binomial series; requires u.value() > 0.
inline Jet pow(const Jet& u, double p) {
    if (!(u.value() > 0.0)) throw DomainError("power of non-positive base");
    auto s = detail::series_buffer(u.order());
    double c = std::pow(u.value(), p);
    for (int j = 0; j <= u.order(); ++j) {
        s[static_cast<std::size_t>(j)] = c;
        c *= (p - j) / ((j + 1) * u.value());
    }
    return compose_series(u, s);
}

/// Reciprocal via the geometric series.
inline Jet recip(const Jet& u) {
    if (u.value() == 0.0) throw DomainError("division by zero value part");
    auto s = detail::series_buffer(u.order());
    double c = 1.0 / u.value();
    for (int j = 0; j <= u.order(); ++j) {
        s[static_cast<std::size_t>(j)] = c;
        c = -c / u.value();
    }
    return compose_series(u, s);
}

/// Integer power by repeated multiplication; any base, negative exponents
/// require a non-zero value part.
inline Jet powi(const Jet& u, long long e) {
    if (e < 0) return powi(recip(u), -e);
    Jet r = Jet::constant(u.nvars(), u.order(), 1.0);
    Jet base = u;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

inline Jet sqrt(const Jet& u) {
    if (!(u.value() > 0.0)) throw DomainError("sqrt of non-positive value");
    return pow(u, 0.5);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }

inline Jet operator/(double s, const Jet& b) {
    return Jet::constant(b.nvars(), b.order(), s) * recip(b);
}

} // namespace weyl
