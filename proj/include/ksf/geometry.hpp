#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "ksf/error.hpp"
#include "ksf/rng.hpp"

namespace ksf {

using Vec3 = Eigen::Vector3d;

inline constexpr double kDefaultOrthogonalityTolerance = 1e-9;

/// A ray on the unit sphere, stored as a unit vector whose first significant
/// component is positive. n and -n name the same switch position.
class Direction {
public:
    /// Components with magnitude at or below this are treated as zero when
    /// choosing the canonical sign.
    static constexpr double kSignificant = 1e-12;
    static constexpr double kUnitTolerance = 1e-12;

    /// Accepts a vector that is already unit within kUnitTolerance and keeps its
    /// bits (after the sign flip). Used when reading files so values round-trip.
    static Direction from_unit(const Vec3& v) {
        if (!(std::abs(v.norm() - 1.0) <= kUnitTolerance)) {
            throw ZeroVector("direction is not a unit vector within 1e-12");
        }
        return Direction(canonical_sign(v));
    }

    static Direction axis_x() { return Direction(Vec3::UnitX()); }
    static Direction axis_y() { return Direction(Vec3::UnitY()); }
    static Direction axis_z() { return Direction(Vec3::UnitZ()); }

    [[nodiscard]] const Vec3& vec() const noexcept { return v_; }
    [[nodiscard]] double x() const noexcept { return v_.x(); }
    [[nodiscard]] double y() const noexcept { return v_.y(); }
    [[nodiscard]] double z() const noexcept { return v_.z(); }

    [[nodiscard]] double dot(const Direction& other) const noexcept { return v_.dot(other.v_); }

    friend bool operator==(const Direction& a, const Direction& b) noexcept { return a.v_ == b.v_; }

    static Vec3 canonical_sign(const Vec3& v) noexcept {
        for (int i = 0; i < 3; ++i) {
            if (std::abs(v[i]) > kSignificant) {
                return v[i] < 0.0 ? Vec3(-v) : v;
            }
        }
        return v;
    }

private:
    friend Direction normalize(const Vec3& v);

    explicit Direction(const Vec3& v) : v_(v) {}

    Vec3 v_;
};

/// Scales v to unit length and picks the canonical ray representative.
/// Components below 1e-14 in magnitude are snapped to zero first, so cross
/// products of axis-aligned vectors come out exact.
inline Direction normalize(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 1e-12)) {
        throw ZeroVector("cannot normalize a vector of length <= 1e-12");
    }
    Vec3 u = v / n;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(u[i]) <= 1e-14) u[i] = 0.0;
    }
    u /= u.norm();
    return Direction(Direction::canonical_sign(u));
}

inline Direction normalize(double x, double y, double z) { return normalize(Vec3(x, y, z)); }

inline bool is_orthogonal(const Direction& a, const Direction& b,
                          double tol = kDefaultOrthogonalityTolerance) noexcept {
    return std::abs(a.dot(b)) <= tol;
}

/// Same ray up to sign, judged by the length of the cross product.
inline bool same_ray(const Direction& a, const Direction& b, double tol = kDefaultOrthogonalityTolerance) noexcept {
    return a.vec().cross(b.vec()).norm() <= tol;
}

/// A unit vector orthogonal to n, chosen deterministically from n alone.
inline Vec3 any_perpendicular(const Vec3& n) {
    int smallest = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(n[i]) < std::abs(n[smallest])) smallest = i;
    }
    Vec3 helper = Vec3::Zero();
    helper[smallest] = 1.0;
    return n.cross(helper).normalized();
}

/// Rotates n by a Normal(0, sigma^2) angle about an axis drawn uniformly from
/// the plane orthogonal to n. Consumes three draws (angle pair, axis) unless
/// sigma == 0, in which case n is returned untouched and nothing is drawn.
template <class Gen>
Direction jitter(const Direction& n, double sigma, Gen& gen) {
    if (sigma == 0.0) return n;
    const double theta = sigma * standard_normal(gen);
    const double phi = 2.0 * std::numbers::pi * uniform01(gen);
    const Vec3& v = n.vec();
    const Vec3 u = any_perpendicular(v);
    const Vec3 w = v.cross(u);
    const Vec3 axis = std::cos(phi) * u + std::sin(phi) * w;
    // Rodrigues with axis ⟂ v: v cosθ + (axis × v) sinθ.
    return normalize(std::cos(theta) * v + std::sin(theta) * axis.cross(v));
}

/// Third member of a triad: canonical normalize(a × b).
inline Direction cross_complete(const Direction& a, const Direction& b) {
    const Vec3 c = a.vec().cross(b.vec());
    if (c.norm() <= 1e-9) {
        throw DegeneratePair("cross_complete: directions are parallel");
    }
    return normalize(c);
}

using Frame = std::array<Direction, 3>;

/// Orthonormalizes (a, b, c) in that order. The first vector is a unchanged.
inline Frame gram_schmidt_frame(const Direction& a, const Direction& b, const Direction& c) {
    const Vec3& e1 = a.vec();
    Vec3 v2 = b.vec();
    for (int pass = 0; pass < 2; ++pass) v2 -= e1.dot(v2) * e1;
    if (v2.norm() <= 1e-9) throw DegenerateFrame("gram_schmidt_frame: second vector depends on the first");
    const Vec3 e2 = v2.normalized();
    Vec3 v3 = c.vec();
    for (int pass = 0; pass < 2; ++pass) {
        v3 -= e1.dot(v3) * e1;
        v3 -= e2.dot(v3) * e2;
    }
    if (v3.norm() <= 1e-9) throw DegenerateFrame("gram_schmidt_frame: third vector depends on the first two");
    return {a, normalize(e2), normalize(v3)};
}

}  // namespace ksf
