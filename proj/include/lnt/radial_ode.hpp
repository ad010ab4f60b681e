#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lnt/integrator.hpp"
#include "lnt/params.hpp"

namespace lnt {

/// Raised by rhs_original when the solution leaves the positive cone.
class PositivityError : public DomainError {
public:
    using DomainError::DomainError;
};

struct RadialState {
    double r = 0.0;
    double u = 0.0;
    double du = 0.0;
};

/// Emden-Fowler variables: eta = A^{-1} r^theta u - 1, zeta = -ln(r)/m.
struct EtaState {
    double zeta = 0.0;
    double eta = 0.0;
    double deta = 0.0;
};

/// First and second derivative of a scalar second-order system.
struct SecondOrderRhs {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// u'' = -(N-1)/r u' + u - u^p.
SecondOrderRhs rhs_original(const RadialState& state, const ProblemParams& params);

/// eta'' = alpha eta' - (p-1) eta - (1+eta)^p + 1 + p eta + m^2 e^{-2 m zeta} (1+eta).
SecondOrderRhs rhs_eta(const EtaState& state, const DerivedConstants& c);

/// w'' = -[(u^p-u)/(u-1) - (N-1)(N-3)/(4r^2)] w, with w = r^{(N-1)/2}(u-1).
SecondOrderRhs rhs_w(double r, double u, double w, double dw, const ProblemParams& params);

/// (u^p - u)/(u - 1), replaced by its limit p-1 when |u-1| < 1e-8.
double w_potential_ratio(double u, double p);

/// E = u'^2/2 - u^2/2 + u^{p+1}/(p+1).
double energy(const RadialState& state, double p);

RadialState transform_eta_to_u(const EtaState& state, const DerivedConstants& c);
EtaState transform_u_to_eta(const RadialState& state, const DerivedConstants& c);

enum class CriticalKind { Min, Max };

struct CriticalPoint {
    double r;
    CriticalKind kind;
    double u;
};

/// Sampled solution path with located events. Between samples the solution
/// is reconstructed by the same cubic Hermite interpolant the integrator uses.
class RadialTrajectory {
public:
    const std::vector<RadialState>& samples() const { return samples_; }
    const std::vector<double>& second_derivatives() const { return ddu_; }
    const std::vector<double>& energy() const { return energy_; }
    const std::vector<double>& unit_crossings() const { return unit_crossings_; }
    const std::vector<CriticalPoint>& critical_points() const { return critical_points_; }

    bool empty() const { return samples_.empty(); }
    double r_min() const { return samples_.front().r; }
    double r_max() const { return samples_.back().r; }
    bool covers(double a, double b) const { return !empty() && a >= r_min() && b <= r_max(); }

    /// State at radius r by Hermite interpolation; throws DomainError outside the samples.
    RadialState at(double r) const;

    void append(const RadialState& s, double ddu, double p);
    void add_unit_crossing(double r) { unit_crossings_.push_back(r); }
    void add_critical_point(const CriticalPoint& cp) { critical_points_.push_back(cp); }

    /// Number of unit crossings in (0, r].
    std::size_t crossings_up_to(double r) const;

private:
    std::vector<RadialState> samples_;
    std::vector<double> ddu_;
    std::vector<double> energy_;
    std::vector<double> unit_crossings_;
    std::vector<CriticalPoint> critical_points_;
};

struct RadialIntegrationConfig {
    Tolerances tol;
    bool track_unit_crossings = true;
    bool track_critical_points = true;
    /// Stop once this many critical points are found (0 = no limit).
    std::size_t stop_after_critical = 0;
    /// Radii that must be step ends (see IntegratorOptions::stops).
    std::vector<double> stops;
};

struct RadialIntegrationResult {
    RadialTrajectory trajectory;
    IntegrationStatus status = IntegrationStatus::Completed;
    std::string message;
    bool ok() const {
        return status == IntegrationStatus::Completed || status == IntegrationStatus::Stopped;
    }
};

/// Integrates the radial equation outward from `start` to r_end, recording
/// every accepted step, the unit crossings and the critical points. Critical
/// points are classified by the sign of u'' = u - u^p at the event radius.
RadialIntegrationResult integrate_radial(const ProblemParams& params, const RadialState& start, double r_end,
                                         const RadialIntegrationConfig& config);

/// Energy dissipation audit along a trajectory.
struct EnergyAudit {
    double worst_increase = 0.0;       // max over steps of E(r_{k+1}) - E(r_k) - allowance
    bool monotone = true;              // non-increasing within 10x tolerance
    double worst_dissipation_mismatch = 0.0;  // relative, over smooth steps
    std::size_t smooth_steps = 0;
};

/// Checks E non-increasing within 10x the integrator tolerance and compares
/// each step's energy drop against the integral of -(N-1)u'^2/r (Simpson on
/// the dense output). Steps whose dissipation is below `smooth_floor`
/// relative to 1+|E| are skipped in the mismatch statistic.
EnergyAudit audit_energy(const RadialTrajectory& traj, const ProblemParams& params, const Tolerances& tol,
                         double smooth_floor = 1e-3);

}  // namespace lnt
