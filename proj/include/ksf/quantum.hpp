#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "ksf/error.hpp"
#include "ksf/geometry.hpp"
#include "ksf/rng.hpp"

namespace ksf {

using Complex = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;
using CVec3 = Eigen::Vector3cd;

/// Spin-1 state in the Cartesian basis, always held as a density matrix.
class QState {
public:
    static QState pure(const CVec3& psi) {
        if (!(std::abs(psi.norm() - 1.0) <= 1e-12)) throw InvalidState("pure state is not normalized within 1e-12");
        return QState(psi * psi.adjoint(), true);
    }

    /// The S²=0 eigenstate along n, i.e. the real vector n itself.
    static QState ray(const Direction& n) { return QState(zero_projector_of(n.vec()), true); }

    static QState maximally_mixed() { return QState(Mat3::Identity() / 3.0, false); }

    static QState mixed(const Mat3& rho) {
        if (!rho.allFinite()) throw InvalidState("density matrix has non-finite entries");
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidState("density matrix is not Hermitian");
        if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-12) throw InvalidState("density matrix trace is not 1");
        Eigen::SelfAdjointEigenSolver<Mat3> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) throw InvalidState("density matrix is not positive semidefinite");
        return QState(rho, false);
    }

    [[nodiscard]] const Mat3& density() const noexcept { return rho_; }
    [[nodiscard]] bool is_pure() const noexcept { return pure_; }

private:
    QState(const Mat3& rho, bool pure) : rho_(rho), pure_(pure) {}

    static Mat3 zero_projector_of(const Vec3& n) {
        const Eigen::Vector3cd c = n.cast<Complex>();
        return c * c.adjoint();
    }

    Mat3 rho_;
    bool pure_;
};

/// Cartesian generators (S_k)_{lm} = -i ε_{klm}.
inline std::array<Mat3, 3> spin_operators() {
    const Complex i(0.0, 1.0);
    std::array<Mat3, 3> s{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
            for (int m = 0; m < 3; ++m) {
                // ε_{klm} for a permutation of (0,1,2).
                int eps = 0;
                if (k != l && l != m && k != m) eps = ((l - k + 3) % 3 == 1) ? 1 : -1;
                s[k](l, m) = -i * static_cast<double>(eps);
            }
        }
    }
    return s;
}

/// n·S for a unit direction.
inline Mat3 spin_component(const Direction& n) {
    const auto s = spin_operators();
    return n.x() * s[0] + n.y() * s[1] + n.z() * s[2];
}

/// Projector onto the S²_n = 0 eigenspace: n nᵀ. Its complement is S²_n.
inline Mat3 zero_projector(const Direction& n) {
    const Eigen::Vector3cd c = n.vec().cast<Complex>();
    return c * c.adjoint();
}

enum class Outcome : std::int8_t { Zero = 0, One = 1, NoClick = -1 };

struct MeasurementRecord {
    std::size_t triad_index = 0;
    std::array<Outcome, 3> results{Outcome::One, Outcome::One, Outcome::One};

    /// Arithmetic sum of the results, or nullopt when any detector failed to click.
    [[nodiscard]] std::optional<int> sum() const noexcept {
        int s = 0;
        for (Outcome r : results) {
            if (r == Outcome::NoClick) return std::nullopt;
            s += static_cast<int>(r);
        }
        return s;
    }
};

/// Probabilities of the eight result patterns, index r1*4 + r2*2 + r3 with
/// r = 0 for the S² = 0 outcome.
using BranchProbabilities = std::array<double, 8>;

inline constexpr std::array<Outcome, 3> pattern_outcomes(std::size_t index) noexcept {
    return {static_cast<Outcome>((index >> 2) & 1), static_cast<Outcome>((index >> 1) & 1),
            static_cast<Outcome>(index & 1)};
}

/// Exact outcome distribution of measuring S²_{d1}, S²_{d2}, S²_{d3} one after
/// the other with projective state update. The directions need not commute.
/// A branch of zero probability is not descended.
inline BranchProbabilities branch_probabilities(const QState& state, const Direction& d1, const Direction& d2,
                                                const Direction& d3) {
    const std::array<Mat3, 3> zero{zero_projector(d1), zero_projector(d2), zero_projector(d3)};
    const Mat3 id = Mat3::Identity();
    BranchProbabilities out{};
    // Carrying the unnormalized post-measurement state makes the trace at each
    // leaf equal to the product of the conditional probabilities.
    auto descend = [&](auto&& self, const Mat3& rho, int level, std::size_t index) -> void {
        for (int r = 0; r < 2; ++r) {
            const Mat3 proj = r == 0 ? zero[level] : Mat3(id - zero[level]);
            const Mat3 next = proj * rho * proj;
            const double weight = std::max(0.0, next.trace().real());
            const std::size_t child = index * 2 + static_cast<std::size_t>(r);
            if (level == 2) {
                out[child] = weight;
            } else if (weight > 0.0) {
                self(self, next, level + 1, child);
            }
        }
    };
    descend(descend, state.density(), 0, 0);
    return out;
}

namespace detail {

template <class Gen>
std::size_t sample_index(std::span<const double> probs, Gen& gen) {
    double total = 0.0;
    for (double p : probs) total += p;
    const double u = uniform01(gen) * total;
    double acc = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_nonzero = i;
        acc += probs[i];
        if (u < acc) return i;
    }
    return last_nonzero;
}

}  // namespace detail

/// One sequential triad measurement; consumes exactly one uniform draw.
template <class Gen>
MeasurementRecord sequential_measure(const QState& state, const Direction& d1, const Direction& d2,
                                     const Direction& d3, Gen& gen) {
    const auto probs = branch_probabilities(state, d1, d2, d3);
    MeasurementRecord rec;
    rec.results = pattern_outcomes(detail::sample_index(std::span<const double>(probs), gen));
    return rec;
}

/// Probabilities <m_j|ρ|m_j> of a joint measurement in an orthonormal frame.
inline std::array<double, 3> joint_probabilities(const QState& state, const Frame& frame) {
    std::array<double, 3> p{};
    for (std::size_t j = 0; j < 3; ++j) {
        const Eigen::Vector3cd m = frame[j].vec().cast<Complex>();
        p[j] = std::max(0.0, (m.adjoint() * state.density() * m)(0, 0).real());
    }
    return p;
}

/// Joint projective measurement of the frame; the outcome j reads 0 at
/// position j and 1 elsewhere, so the sum is always 2.
template <class Gen>
MeasurementRecord joint_measure(const QState& state, const Frame& frame, Gen& gen) {
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a + 1; b < 3; ++b) {
            if (std::abs(frame[a].dot(frame[b])) > 1e-9) throw InvalidState("joint_measure: frame is not orthonormal");
        }
    }
    const auto probs = joint_probabilities(state, frame);
    const std::size_t j = detail::sample_index(std::span<const double>(probs), gen);
    MeasurementRecord rec;
    rec.results[j] = Outcome::Zero;
    return rec;
}

/// ρ → (1-p)ρ + p·I/3.
inline QState depolarize(const QState& state, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig("depolarizing probability must lie in [0,1]");
    if (p == 0.0) return state;
    return QState::mixed((1.0 - p) * state.density() + p * Mat3::Identity() / 3.0);
}

/// Haar-random pure state; consumes six normal draws.
template <class Gen>
QState random_pure_state(Gen& gen) {
    CVec3 psi;
    for (int i = 0; i < 3; ++i) {
        const double re = standard_normal(gen);
        const double im = standard_normal(gen);
        psi[i] = Complex(re, im);
    }
    return QState::pure(psi / psi.norm());
}

}  // namespace ksf
