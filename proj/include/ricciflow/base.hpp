#pragma once

// Small fixed-capacity vector (2 or 3 components) plus the error types shared
// by all modules. Everything downstream works in dimension 2 or 3, so a
// stack array beats std::vector here.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ricciflow {

// ---------------------------------------------------------------- errors --

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterOutOfRange     : Error { using Error::Error; };
struct UnknownFamily           : Error { using Error::Error; };
struct NonPositiveMetric       : Error { using Error::Error; };
struct DimensionMismatch       : Error { using Error::Error; };
struct InvalidStructureChoice  : Error { using Error::Error; };
struct InvalidConstraints      : Error { using Error::Error; };
struct InvalidMapForSpace      : Error { using Error::Error; };
struct StepUnderflow           : Error { using Error::Error; };
struct TooFewSamples           : Error { using Error::Error; };
struct UnsupportedFamily       : Error { using Error::Error; };
struct EmptyPlot               : Error { using Error::Error; };
struct ParseError              : Error { using Error::Error; };
struct MissingField            : Error { using Error::Error; };
struct ConflictingOptions      : Error { using Error::Error; };
struct IoError                 : Error { using Error::Error; };

// ------------------------------------------------------------------- Vec --

class Vec {
public:
    Vec() : n_(0), a_{0, 0, 0} {}
    Vec(double x, double y) : n_(2), a_{x, y, 0} {}
    Vec(double x, double y, double z) : n_(3), a_{x, y, z} {}

    static Vec zero(int n) {
        Vec v;
        v.n_ = n;
        return v;
    }

    int size() const { return n_; }
    double operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return a_[static_cast<std::size_t>(i)]; }

    const double* begin() const { return a_.data(); }
    const double* end() const { return a_.data() + n_; }

    Vec operator+(const Vec& o) const { return zip(o, [](double x, double y) { return x + y; }); }
    Vec operator-(const Vec& o) const { return zip(o, [](double x, double y) { return x - y; }); }
    Vec operator*(double s) const {
        Vec r = *this;
        for (int i = 0; i < n_; ++i) r[i] *= s;
        return r;
    }
    Vec operator-() const { return *this * -1.0; }

    double dot(const Vec& o) const {
        double s = 0;
        for (int i = 0; i < n_; ++i) s += a_[static_cast<std::size_t>(i)] * o[i];
        return s;
    }
    double norm() const { return std::sqrt(dot(*this)); }

    double min() const { return *std::min_element(begin(), end()); }
    double max() const { return *std::max_element(begin(), end()); }
    int argmin() const {
        return static_cast<int>(std::min_element(begin(), end()) - begin());
    }

    bool all_positive() const {
        for (int i = 0; i < n_; ++i)
            if (!(a_[static_cast<std::size_t>(i)] > 0.0)) return false;  // catches NaN too
        return true;
    }
    bool all_finite() const {
        for (int i = 0; i < n_; ++i)
            if (!std::isfinite(a_[static_cast<std::size_t>(i)])) return false;
        return true;
    }

    Vec normalized() const {
        double m = norm();
        return m > 0 ? *this * (1.0 / m) : *this;
    }

    bool operator==(const Vec& o) const {
        if (n_ != o.n_) return false;
        for (int i = 0; i < n_; ++i)
            if (a_[static_cast<std::size_t>(i)] != o[i]) return false;
        return true;
    }

private:
    template <class F>
    Vec zip(const Vec& o, F f) const {
        Vec r = *this;
        for (int i = 0; i < n_; ++i) r[i] = f(a_[static_cast<std::size_t>(i)], o[i]);
        return r;
    }

    int n_;
    std::array<double, 3> a_;
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

// Angle between directions, safe against roundoff outside [-1,1].
inline double angle_between(const Vec& u, const Vec& v) {
    double c = u.dot(v) / (u.norm() * v.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// Cross product (3D only), used to build tangent frames.
inline Vec cross(const Vec& u, const Vec& v) {
    return Vec(u[1] * v[2] - u[2] * v[1],
               u[2] * v[0] - u[0] * v[2],
               u[0] * v[1] - u[1] * v[0]);
}

// Tiny dense matrix (n x n, n <= 3), row-major.
class Mat {
public:
    explicit Mat(int n) : n_(n), a_{} {}
    int size() const { return n_; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    Vec apply(const Vec& v) const {
        Vec r = Vec::zero(n_);
        for (int i = 0; i < n_; ++i) {
            double s = 0;
            for (int j = 0; j < n_; ++j) s += at(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

private:
    int n_;
    std::array<double, 9> a_;
};

}  // namespace ricciflow
