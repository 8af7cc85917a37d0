#pragma once

#include <cmath>

namespace mltr {

// First-order dual number: v is the value, d the directional derivative.
// Pushing Dual<double> through templated gradient code yields exact
// Hessian-vector products by forward-mode differentiation.
template <class T>
struct Dual {
    T v = T(0);
    T d = T(0);

    Dual() = default;
    Dual(T value) : v(value), d(T(0)) {}
    Dual(T value, T deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) {
        v += o.v;
        d += o.d;
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        d -= o.d;
        return *this;
    }
};

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
    return {-a.v, -a.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    const T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
}

template <class T>
Dual<T> operator+(const T& s, const Dual<T>& a) {
    return {s + a.v, a.d};
}
template <class T>
Dual<T> operator+(const Dual<T>& a, const T& s) {
    return {a.v + s, a.d};
}
template <class T>
Dual<T> operator-(const T& s, const Dual<T>& a) {
    return {s - a.v, -a.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const T& s) {
    return {a.v - s, a.d};
}
template <class T>
Dual<T> operator*(const T& s, const Dual<T>& a) {
    return {s * a.v, s * a.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const T& s) {
    return {a.v * s, a.d * s};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const T& s) {
    return {a.v / s, a.d / s};
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    const T e = exp(a.v);
    return {e, e * a.d};
}

inline double value_of(double x) { return x; }
template <class T>
T value_of(const Dual<T>& a) {
    return a.v;
}

}  // namespace mltr
