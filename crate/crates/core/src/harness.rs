//! Numerical exercise of the proof machinery on radial profiles: the
//! normalized mass function J, the doubling radius sequence with its
//! endpoint/doubling dichotomy, and the annulus / envelope / tail
//! inequalities with empirical constants.
//!
//! The constants reported here are existential in the underlying results, so
//! nothing is asserted against specific values; the meaningful checks are
//! positivity and boundedness across sweeps.

use crate::conditions::ProblemSpec;
use crate::expr::NonlinearityExpr;
use crate::quad::{self, blocks, panel};
use crate::sim::RadialProfile;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("rho = {rho} beyond the profile range {max}")]
    OutOfRange { rho: f64, max: f64 },
    #[error("profile covers only [0, {max}] but [0, {need}] is required")]
    ProfileTooShort { max: f64, need: f64 },
    #[error("trivial profile: the denominator integral vanishes")]
    TrivialProfile,
    #[error("mass at the base radius vanishes: J_r(r) = 0")]
    ZeroBaseMass,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("envelope hypothesis violated at zeta = {zeta}: gamma = {gamma} > min psi = {min_psi}")]
    HypothesisViolated { zeta: f64, gamma: f64, min_psi: f64 },
    #[error("tail integral diverges: the tail condition fails for this spec")]
    TailDiverges,
    #[error("tail integral inconclusive: {0}")]
    TailInconclusive(String),
    #[error("doubling sequence failed to terminate")]
    NoTermination,
}

// ---------------------------------------------------------------------------
// Ball geometry
// ---------------------------------------------------------------------------

/// Volume of the n-dimensional ball of radius r: π^{n/2} r^n / Γ(n/2+1),
/// computed by the dimension recursion V_n = V_{n-2}·2π/n (exact for every
/// integer n, no gamma evaluation).
pub fn ball_volume(n: u32, r: f64) -> f64 {
    assert!(n >= 1 && r > 0.0);
    unit_ball_volume(n) * r.powi(n as i32)
}

pub fn unit_ball_volume(n: u32) -> f64 {
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Surface measure of the unit (n-1)-sphere: ω_n = n·V_n, so that
/// ∫_{B_ρ} f(|x|) dx = ω_n ∫_0^ρ f(s) s^{n-1} ds.
pub fn unit_sphere_area(n: u32) -> f64 {
    n as f64 * unit_ball_volume(n)
}

// ---------------------------------------------------------------------------
// Normalized mass J_r(ρ) = |B_{2r}|^{-1} ∫_{B_ρ} |u| dx
// ---------------------------------------------------------------------------

/// Cached cumulative mass integrals over a profile, normalized by |B_{2r}|.
pub struct MassFunction<'a> {
    profile: &'a RadialProfile,
    base_r: f64,
    /// Prefix integrals of ω_n |u(s)| s^{n-1} at the profile grid nodes.
    prefix: Vec<f64>,
    norm: f64,
}

const MASS_PANEL_TOL: f64 = 1e-11;

impl<'a> MassFunction<'a> {
    pub fn new(profile: &'a RadialProfile, base_r: f64) -> Result<Self, HarnessError> {
        assert!(base_r > 0.0);
        let max = profile.max_radius();
        if max < 2.0 * base_r {
            return Err(HarnessError::ProfileTooShort {
                max,
                need: 2.0 * base_r,
            });
        }
        let omega = unit_sphere_area(profile.n);
        let integrand =
            |s: f64| profile.u_at(s).abs() * s.powi(profile.n as i32 - 1) * omega;
        let mut prefix = Vec::with_capacity(profile.steps.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for w in profile.steps.windows(2) {
            let seg = panel::integrate_rel(&integrand, w[0].r, w[1].r, MASS_PANEL_TOL);
            acc += seg.value;
            prefix.push(acc);
        }
        Ok(MassFunction {
            profile,
            base_r,
            prefix,
            norm: ball_volume(profile.n, 2.0 * base_r),
        })
    }

    pub fn base_radius(&self) -> f64 {
        self.base_r
    }

    /// J_r(ρ).
    pub fn eval(&self, rho: f64) -> Result<f64, HarnessError> {
        if rho < 0.0 || rho > self.profile.max_radius() * (1.0 + 1e-12) {
            return Err(HarnessError::OutOfRange {
                rho,
                max: self.profile.max_radius(),
            });
        }
        if rho == 0.0 {
            return Ok(0.0);
        }
        let idx = match self
            .profile
            .steps
            .binary_search_by(|s| s.r.partial_cmp(&rho).unwrap())
        {
            Ok(i) => return Ok(self.prefix[i] / self.norm),
            Err(i) => i - 1,
        };
        let omega = unit_sphere_area(self.profile.n);
        let integrand =
            |s: f64| self.profile.u_at(s).abs() * s.powi(self.profile.n as i32 - 1) * omega;
        let rest = panel::integrate_rel(&integrand, self.profile.steps[idx].r, rho, MASS_PANEL_TOL);
        Ok((self.prefix[idx] + rest.value) / self.norm)
    }
}

/// One-shot J_r(ρ) on a profile.
pub fn normalized_mass(
    profile: &RadialProfile,
    base_r: f64,
    rho: f64,
) -> Result<f64, HarnessError> {
    MassFunction::new(profile, base_r)?.eval(rho)
}

/// Ball mean (1/|B_ρ|) ∫_{B_ρ} f(|u|) dx of a pointwise transform of the
/// profile (used for the convexity-direction checks).
pub fn ball_mean(
    profile: &RadialProfile,
    rho: f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64, HarnessError> {
    if rho <= 0.0 || rho > profile.max_radius() * (1.0 + 1e-12) {
        return Err(HarnessError::OutOfRange {
            rho,
            max: profile.max_radius(),
        });
    }
    let omega = unit_sphere_area(profile.n);
    let integrand = |s: f64| f(profile.u_at(s).abs()) * s.powi(profile.n as i32 - 1) * omega;
    let total = blocks::finite_piece(&integrand, 0.0, rho, 1e-10);
    Ok(total.value / ball_volume(profile.n, rho))
}

// ---------------------------------------------------------------------------
// Doubling radius sequence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    /// The supremum hit the right endpoint 2r before the mass doubled.
    Endpoint,
    /// Every step doubled the mass exactly and the sequence passed 3r/2.
    Doubling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// ∫ dζ/g(ζ/2) ≥ C·r^m gave the larger constant.
    ReciprocalG,
    /// ∫ g^{-1/m}(ζ/2) ζ^{1/m-1} dζ ≥ C·r gave the larger constant.
    KoWeight,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingTrace {
    pub radii: Vec<f64>,
    pub termination: Termination,
    pub branch: Branch,
    /// The larger of the two empirical constants.
    pub empirical_c: f64,
    pub c_reciprocal: f64,
    pub c_ko_weight: f64,
    pub j_at_base: f64,
    pub j_at_double: f64,
}

/// Bisection target: 1e-10·r absolute, ties resolved upward (sup semantics).
const SUP_BISECT_TOL: f64 = 1e-10;

/// Construct the doubling sequence r_{i+1} = sup{ρ ∈ [r_i, 2r] : J_r(ρ) ≤
/// 2·J_r(r_i)}, stopping once r_i ≥ 3r/2, and evaluate both candidate
/// inequalities over [J_r(r), J_r(2r)].
pub fn doubling_sequence(
    profile: &RadialProfile,
    spec: &ProblemSpec,
    r: f64,
) -> Result<DoublingTrace, HarnessError> {
    let mass = MassFunction::new(profile, r)?;
    let j_base = mass.eval(r)?;
    if j_base <= 0.0 {
        return Err(HarnessError::ZeroBaseMass);
    }
    let two_r = 2.0 * r;
    let j_double = mass.eval(two_r)?;

    let mut radii = vec![r];
    let mut terminated_at_endpoint = false;
    for _ in 0..10_000 {
        let cur = *radii.last().unwrap();
        if cur >= 1.5 * r {
            break;
        }
        let j_cur = mass.eval(cur)?;
        let target = 2.0 * j_cur;
        if mass.eval(two_r)? <= target {
            radii.push(two_r);
            terminated_at_endpoint = true;
            break;
        }
        // J is non-decreasing: bisect for the sup of {J ≤ target}
        let mut lo = cur;
        let mut hi = two_r;
        while hi - lo > SUP_BISECT_TOL * r {
            let mid = 0.5 * (lo + hi);
            if mass.eval(mid)? <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        radii.push(hi); // ties upward
        if hi >= two_r * (1.0 - 1e-9) {
            terminated_at_endpoint = true;
            break;
        }
    }
    if *radii.last().unwrap() < 1.5 * r && !terminated_at_endpoint {
        return Err(HarnessError::NoTermination);
    }
    let termination = if terminated_at_endpoint
        || *radii.last().unwrap() >= two_r * (1.0 - 1e-9)
    {
        Termination::Endpoint
    } else {
        Termination::Doubling
    };

    // candidate inequalities over [J_r(r), J_r(2r)]
    let g = &spec.g;
    let reciprocal = |zeta: f64| 1.0 / g.eval(zeta / 2.0).unwrap_or(f64::NAN);
    let weight =
        |zeta: f64| quad::ko_integrand_scaled(g, spec.m, 2.0, zeta).unwrap_or(f64::NAN);
    let l1 = blocks::finite_piece(&reciprocal, j_base, j_double, 1e-9);
    let l2 = blocks::finite_piece(&weight, j_base, j_double, 1e-9);
    let c_reciprocal = l1.value / r.powi(spec.m as i32);
    let c_ko_weight = l2.value / r;
    let (branch, empirical_c) = if c_reciprocal >= c_ko_weight {
        (Branch::ReciprocalG, c_reciprocal)
    } else {
        (Branch::KoWeight, c_ko_weight)
    };

    Ok(DoublingTrace {
        radii,
        termination,
        branch,
        empirical_c,
        c_reciprocal,
        c_ko_weight,
        j_at_base: j_base,
        j_at_double: j_double,
    })
}

// ---------------------------------------------------------------------------
// Annulus inequality
// ---------------------------------------------------------------------------

/// Empirical constant of the annulus inequality:
/// ∫_{B_{r2}\B_{r1}} |u| / ((r2-r1)^m ∫_{B_{r1}} g(|u|)).
pub fn annulus_ratio(
    profile: &RadialProfile,
    spec: &ProblemSpec,
    r1: f64,
    r2: f64,
) -> Result<f64, HarnessError> {
    if !(0.0 < r1 && r1 < r2 && r2 <= 2.0 * r1) {
        return Err(HarnessError::Precondition(format!(
            "need 0 < r1 < r2 <= 2 r1, got r1 = {r1}, r2 = {r2}"
        )));
    }
    if profile.max_radius() < r2 {
        return Err(HarnessError::ProfileTooShort {
            max: profile.max_radius(),
            need: r2,
        });
    }
    let omega = unit_sphere_area(profile.n);
    let num_f = |s: f64| profile.u_at(s).abs() * s.powi(profile.n as i32 - 1) * omega;
    let den_f = |s: f64| {
        spec.g.eval(profile.u_at(s).abs()).unwrap_or(f64::NAN)
            * s.powi(profile.n as i32 - 1)
            * omega
    };
    let numerator = blocks::finite_piece(&num_f, r1, r2, 1e-10).value;
    let denominator = blocks::finite_piece(&den_f, 0.0, r1, 1e-10).value;
    if denominator <= 0.0 {
        return Err(HarnessError::TrivialProfile);
    }
    Ok(numerator / ((r2 - r1).powi(spec.m as i32) * denominator))
}

// ---------------------------------------------------------------------------
// Envelope comparison (window-minorant inequality)
// ---------------------------------------------------------------------------

/// Inputs for the window-minorant comparison: γ must minorize ψ over the
/// multiplicative window (ζ/θ, θζ).
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeCase {
    pub psi: NonlinearityExpr,
    pub gamma: NonlinearityExpr,
    pub theta: f64,
    pub alpha: f64,
    pub nu: f64,
    pub m1: f64,
    pub m2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    /// (∫ γ^{-α}(ζ) ζ^{α-1} dζ)^{1/α}.
    pub lhs: f64,
    /// ∫ dζ/ψ(ζ).
    pub rhs_core: f64,
    /// lhs / rhs_core, the empirical comparison constant.
    pub empirical_constant: f64,
    pub pass: bool,
}

/// Check the hypothesis by sampling and compute both sides.
pub fn envelope_check(case: &EnvelopeCase) -> Result<EnvelopeReport, HarnessError> {
    if !(case.theta > 1.0) {
        return Err(HarnessError::Precondition("theta must exceed 1".into()));
    }
    if !(case.alpha > 0.0 && case.alpha <= 1.0) {
        return Err(HarnessError::Precondition("alpha must lie in (0, 1]".into()));
    }
    if !(case.nu > 1.0) {
        return Err(HarnessError::Precondition("nu must exceed 1".into()));
    }
    if !(case.m2 >= case.nu * case.m1) {
        return Err(HarnessError::Precondition(format!(
            "need M2 >= nu*M1, got M2 = {} < {}",
            case.m2,
            case.nu * case.m1
        )));
    }

    // sampled hypothesis: gamma(ζ) ≤ min over (ζ/θ, θζ) of psi
    let lo = case.m1 / (case.theta * case.theta);
    let hi = case.m2 * case.theta * case.theta;
    for i in 0..=128 {
        let zeta = lo * (hi / lo).powf(i as f64 / 128.0);
        let gamma = case
            .gamma
            .eval(zeta)
            .map_err(|e| HarnessError::Precondition(e.to_string()))?;
        let mut min_psi = f64::INFINITY;
        for j in 0..=32 {
            let w = (1.0 / case.theta) * case.theta.powf(2.0 * j as f64 / 32.0);
            let psi = case
                .psi
                .eval(zeta * w)
                .map_err(|e| HarnessError::Precondition(e.to_string()))?;
            min_psi = min_psi.min(psi);
        }
        if gamma > min_psi * (1.0 + 1e-9) + 1e-300 {
            return Err(HarnessError::HypothesisViolated {
                zeta,
                gamma,
                min_psi,
            });
        }
    }

    let lhs_f = |zeta: f64| {
        case.gamma.eval(zeta).unwrap_or(f64::NAN).powf(-case.alpha)
            * zeta.powf(case.alpha - 1.0)
    };
    let rhs_f = |zeta: f64| 1.0 / case.psi.eval(zeta).unwrap_or(f64::NAN);
    let lhs_integral = blocks::finite_piece(&lhs_f, case.m1, case.m2, 1e-10).value;
    let rhs_core = blocks::finite_piece(&rhs_f, case.m1, case.m2, 1e-10).value;
    let lhs = lhs_integral.powf(1.0 / case.alpha);
    let ratio = lhs / rhs_core;
    Ok(EnvelopeReport {
        lhs,
        rhs_core,
        empirical_constant: ratio,
        pass: ratio.is_finite() && ratio > 0.0,
    })
}

// ---------------------------------------------------------------------------
// Tail lower bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct TailBoundReport {
    pub j_at_base: f64,
    /// ∫_{J_r(r)}^∞ g^{-1/m}(ζ/4) ζ^{1/m-1} dζ.
    pub lhs: f64,
    /// lhs / r, the empirical constant of the tail bound.
    pub empirical_constant: f64,
}

/// Check the tail lower bound on a profile at base radius r.
pub fn tail_bound_check(
    profile: &RadialProfile,
    spec: &ProblemSpec,
    r: f64,
) -> Result<TailBoundReport, HarnessError> {
    let mass = MassFunction::new(profile, r)?;
    let j_base = mass.eval(r)?;
    if j_base <= 0.0 {
        return Err(HarnessError::ZeroBaseMass);
    }
    let weight =
        |zeta: f64| quad::ko_integrand_scaled(&spec.g, spec.m, 4.0, zeta).unwrap_or(f64::NAN);
    let verdict = quad::improper_verdict(&weight, j_base, f64::INFINITY, false, 1e-7);
    match verdict.status {
        quad::IntegralStatus::Converged => {
            let lhs = verdict.value.unwrap();
            Ok(TailBoundReport {
                j_at_base: j_base,
                lhs,
                empirical_constant: lhs / r,
            })
        }
        quad::IntegralStatus::Diverged => Err(HarnessError::TailDiverges),
        quad::IntegralStatus::Inconclusive => {
            Err(HarnessError::TailInconclusive(verdict.evidence.note))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, power_law};
    use crate::sim::{integrate_radial, IntegrationOptions, ProfileStatus};
    use approx::assert_relative_eq;

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(ball_volume(1, 1.0), 2.0, epsilon = 1e-14);
        assert_relative_eq!(
            ball_volume(3, 1.0),
            4.0 * std::f64::consts::PI / 3.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            ball_volume(2, 2.0),
            4.0 * std::f64::consts::PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn mass_of_unit_function() {
        // u ≡ 1: J_r(ρ) = |B_ρ|/|B_{2r}| = (ρ/2r)^n
        let p1 = RadialProfile::from_fn(1, 4.0, 257, |_| 1.0, |_| 0.0);
        assert_relative_eq!(
            normalized_mass(&p1, 1.0, 1.0).unwrap(),
            0.5,
            max_relative = 1e-10
        );
        let p3 = RadialProfile::from_fn(3, 4.0, 257, |_| 1.0, |_| 0.0);
        assert_relative_eq!(
            normalized_mass(&p3, 1.0, 1.0).unwrap(),
            0.125,
            max_relative = 1e-10
        );
    }

    #[test]
    fn mass_of_square_profile() {
        // u = s^2, n = 3, r = 1, ρ = 2: (4π·32/5)/(32π/3) = 12/5
        let p = RadialProfile::from_fn(3, 4.0, 513, |s| s * s, |s| 2.0 * s);
        assert_relative_eq!(
            normalized_mass(&p, 1.0, 2.0).unwrap(),
            2.4,
            max_relative = 1e-9
        );
    }

    #[test]
    fn doubling_sequence_unit_profile_1d() {
        // J(ρ) = ρ/2: sup{J ≤ 2J(1)} hits the endpoint 2 exactly
        let p = RadialProfile::from_fn(1, 2.5, 257, |_| 1.0, |_| 0.0);
        let spec = ProblemSpec::new(2, 1, 1.0, power_law(1.0, 2.0));
        let trace = doubling_sequence(&p, &spec, 1.0).unwrap();
        assert_eq!(trace.radii.len(), 2);
        assert_relative_eq!(trace.radii[1], 2.0, max_relative = 1e-9);
        assert_eq!(trace.termination, Termination::Endpoint);
        assert_relative_eq!(trace.j_at_double / trace.j_at_base, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn doubling_sequence_unit_profile_3d() {
        // J(ρ) = (ρ/2)^3: r_i = 2^{i/3}, stops at 2^{2/3} ≈ 1.587 ≥ 1.5
        let p = RadialProfile::from_fn(3, 2.5, 257, |_| 1.0, |_| 0.0);
        let spec = ProblemSpec::new(2, 3, 1.0, power_law(1.0, 2.0));
        let trace = doubling_sequence(&p, &spec, 1.0).unwrap();
        assert_eq!(trace.radii.len(), 3);
        assert_relative_eq!(trace.radii[1], 2.0f64.powf(1.0 / 3.0), max_relative = 1e-7);
        assert_relative_eq!(trace.radii[2], 2.0f64.powf(2.0 / 3.0), max_relative = 1e-7);
        assert_eq!(trace.termination, Termination::Doubling);
    }

    #[test]
    fn doubling_sequence_rejects_zero_mass() {
        let p = RadialProfile::from_fn(3, 2.5, 65, |_| 0.0, |_| 0.0);
        let spec = ProblemSpec::new(2, 3, 1.0, power_law(1.0, 2.0));
        assert!(matches!(
            doubling_sequence(&p, &spec, 1.0),
            Err(HarnessError::ZeroBaseMass)
        ));
    }

    #[test]
    fn annulus_ratio_on_helmholtz_profile() {
        // u = sinh(s)/s solves the radial equation for g = ζ, m = 2, n = 3
        let spec = ProblemSpec::new(2, 3, 1.0, parse("zeta").unwrap());
        let profile = integrate_radial(
            &spec,
            1.0,
            &IntegrationOptions {
                r_max: 5.0,
                ..Default::default()
            },
        );
        assert!(matches!(profile.status, ProfileStatus::Global));
        let ratio = annulus_ratio(&profile, &spec, 1.0, 2.0).unwrap();
        assert!(ratio > 0.0);

        // brute-force cross-check with the closed form sinh(s)/s
        let omega = unit_sphere_area(3);
        let num = panel::integrate_rel(&|s: f64| (s.sinh() / s) * s * s * omega, 1.0, 2.0, 1e-12);
        let den = panel::integrate_rel(&|s: f64| (s.sinh() / s) * s * s * omega, 0.0, 1.0, 1e-12);
        assert_relative_eq!(ratio, num.value / den.value, max_relative = 1e-5);
    }

    #[test]
    fn annulus_ratio_rejects_trivial_profile() {
        let p = RadialProfile::from_fn(3, 4.0, 65, |_| 0.0, |_| 0.0);
        let spec = ProblemSpec::new(2, 3, 1.0, power_law(1.0, 2.0));
        assert!(matches!(
            annulus_ratio(&p, &spec, 1.0, 2.0),
            Err(HarnessError::TrivialProfile)
        ));
    }

    #[test]
    fn envelope_hand_computed_case() {
        // ψ=ζ², γ=ζ²/4, θ=2, α=1/2, ν=2, M1=1, M2=4: LHS=4, RHS=3/4, ratio 16/3
        let case = EnvelopeCase {
            psi: parse("zeta^2").unwrap(),
            gamma: parse("0.25 * zeta^2").unwrap(),
            theta: 2.0,
            alpha: 0.5,
            nu: 2.0,
            m1: 1.0,
            m2: 4.0,
        };
        let report = envelope_check(&case).unwrap();
        assert_relative_eq!(report.lhs, 4.0, max_relative = 1e-9);
        assert_relative_eq!(report.rhs_core, 0.75, max_relative = 1e-9);
        assert_relative_eq!(report.empirical_constant, 16.0 / 3.0, max_relative = 1e-8);
        assert!(report.pass);
    }

    #[test]
    fn envelope_constant_functions() {
        // ψ=γ=c: LHS = ((M2^α - M1^α)/(α c^α))^{1/α}, RHS = (M2-M1)/c
        let case = EnvelopeCase {
            psi: parse("2").unwrap(),
            gamma: parse("2").unwrap(),
            theta: 3.0,
            alpha: 0.5,
            nu: 2.0,
            m1: 1.0,
            m2: 4.0,
        };
        let report = envelope_check(&case).unwrap();
        let alpha = 0.5f64;
        let c = 2.0f64;
        let lhs = ((4.0f64.powf(alpha) - 1.0) / (alpha * c.powf(alpha))).powf(1.0 / alpha);
        assert_relative_eq!(report.lhs, lhs, max_relative = 1e-9);
        assert_relative_eq!(report.rhs_core, 1.5, max_relative = 1e-9);
        assert!(report.pass);
    }

    #[test]
    fn envelope_guards() {
        let base = EnvelopeCase {
            psi: parse("zeta^2").unwrap(),
            gamma: parse("0.25 * zeta^2").unwrap(),
            theta: 2.0,
            alpha: 0.5,
            nu: 2.0,
            m1: 1.0,
            m2: 1.5, // < nu*m1
        };
        assert!(matches!(
            envelope_check(&base),
            Err(HarnessError::Precondition(_))
        ));

        let bad = EnvelopeCase {
            gamma: parse("zeta^2").unwrap(), // not below min psi over the window
            m2: 4.0,
            ..base
        };
        assert!(matches!(
            envelope_check(&bad),
            Err(HarnessError::HypothesisViolated { .. })
        ));
    }

    #[test]
    fn tail_bound_closed_form() {
        // g=ζ^3, m=2: ∫_J^∞ g^{-1/2}(ζ/4) ζ^{-1/2} dζ = 8/J
        let spec = ProblemSpec::new(2, 3, 1.0, power_law(1.0, 3.0));
        let p = RadialProfile::from_fn(3, 4.0, 257, |_| 1.0, |_| 0.0);
        let report = tail_bound_check(&p, &spec, 1.0).unwrap();
        assert_relative_eq!(report.lhs, 8.0 / report.j_at_base, max_relative = 1e-6);
        assert_relative_eq!(
            report.empirical_constant,
            8.0 / report.j_at_base,
            max_relative = 1e-6
        );
    }

    #[test]
    fn tail_bound_rejects_divergent_spec() {
        let spec = ProblemSpec::new(2, 3, 1.0, power_law(1.0, 1.0));
        let p = RadialProfile::from_fn(3, 4.0, 257, |_| 1.0, |_| 0.0);
        assert!(matches!(
            tail_bound_check(&p, &spec, 1.0),
            Err(HarnessError::TailDiverges)
        ));
    }

    #[test]
    fn jensen_direction_on_profiles() {
        // convexity: ball mean of g(|u|) dominates g(ball mean of |u|)
        let g = power_law(1.0, 2.0);
        let p = RadialProfile::from_fn(3, 4.0, 257, |s| 1.0 + s * s, |s| 2.0 * s);
        for rho in [0.5, 1.0, 2.0, 3.5] {
            let mean_gu = ball_mean(&p, rho, |u| g.eval(u).unwrap()).unwrap();
            let mean_u = ball_mean(&p, rho, |u| u).unwrap();
            let g_mean = g.eval(mean_u).unwrap();
            assert!(
                mean_gu >= g_mean - 1e-9 * (1.0 + mean_gu.abs()),
                "Jensen direction failed at rho={rho}: {mean_gu} < {g_mean}"
            );
        }
    }
}
