//! Probe fields and temporal flux profiles.
//!
//! A probe is a positive solution `v` of the stationary equation
//! `(Δ − τ) v = 0` on all of the plane (minus a singular point, for the
//! point probe):
//!
//! * **Directional**: `v(x) = e^{√τ x·ω}` for a unit vector `ω`. Its
//!   boundary trace grows like `e^{√τ h}` where `h = sup_{x∈D} x·ω` is the
//!   support function of the cavity — this is what the indicator extracts.
//! * **Point**: `v(x) = K₀(√τ |x−p|)` for a source point `p` strictly
//!   outside the body; `K₀` is the modified Bessel function, the exact
//!   radial solution in two dimensions. Its decay encodes `dist(p, D)`.
//!
//! The heat flux prescribed on the outer boundary is the separable field
//! `f(t, x) = φ(t) ∂v/∂ν(x)` with a temporal profile `φ ≥ 0`, `φ(0) > 0`.
//! The accompanying Laplace-type factor `Φ(τ) = ∫₀ᵀ e^{−τt} φ(t) dt` enters
//! every indicator magnitude; it is computed in closed form where possible.

use serde::{Deserialize, Serialize};

use crate::bessel;
use crate::geometry::{Rect, Vec2};
use crate::grid::BoundaryFaceSet;
use crate::{Error, Result};

/// Exponent guard: `e^x` overflows f64 near 709.
const EXP_OVERFLOW: f64 = 700.0;

/// A stationary probe field `v` with its spectral parameter `τ > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Probe {
    /// `v(x) = e^{√τ x·ω}`, `|ω| = 1`.
    Directional { omega: Vec2, tau: f64 },
    /// `v(x) = K₀(√τ |x−p|)`, singular at `p`.
    Point { p: Vec2, tau: f64 },
}

impl Probe {
    /// Directional probe; `omega` is normalized (it must be nonzero) and
    /// `tau` must be positive and finite.
    pub fn directional(omega: Vec2, tau: f64) -> Result<Probe> {
        check_tau(tau)?;
        let norm = omega.norm();
        if !norm.is_finite() || norm < 1e-14 {
            return Err(Error::NonUnitDirection { norm });
        }
        Ok(Probe::Directional {
            omega: omega.scale(1.0 / norm),
            tau,
        })
    }

    /// Point probe anchored at `p`; `p` must lie strictly outside the body,
    /// which is checked against a concrete domain by [`Probe::validate_outside`].
    pub fn point(p: Vec2, tau: f64) -> Result<Probe> {
        check_tau(tau)?;
        Ok(Probe::Point { p, tau })
    }

    pub fn tau(&self) -> f64 {
        match *self {
            Probe::Directional { tau, .. } | Probe::Point { tau, .. } => tau,
        }
    }

    pub fn sqrt_tau(&self) -> f64 {
        self.tau().sqrt()
    }

    /// Same probe at a different spectral parameter (used by τ-sweeps).
    pub fn with_tau(&self, tau: f64) -> Result<Probe> {
        check_tau(tau)?;
        Ok(match *self {
            Probe::Directional { omega, .. } => Probe::Directional { omega, tau },
            Probe::Point { p, .. } => Probe::Point { p, tau },
        })
    }

    /// Ensure a point probe's anchor lies strictly outside the closed body
    /// rectangle. Directional probes are global and always pass.
    pub fn validate_outside(&self, omega_rect: &Rect) -> Result<()> {
        match *self {
            Probe::Directional { .. } => Ok(()),
            Probe::Point { p, .. } => {
                if omega_rect.contains(p) {
                    Err(Error::PointInsideShape { x: p.x, y: p.y })
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Probe value `v(x)`.
    pub fn value(&self, x: Vec2) -> Result<f64> {
        match *self {
            Probe::Directional { omega, tau } => {
                let arg = tau.sqrt() * x.dot(omega);
                if arg > EXP_OVERFLOW {
                    return Err(Error::InvalidInput(format!(
                        "directional probe exponent {arg:.1} overflows at x = ({}, {})",
                        x.x, x.y
                    )));
                }
                Ok(arg.exp())
            }
            Probe::Point { p, tau } => {
                let r = (x - p).norm();
                if r == 0.0 {
                    return Err(Error::ProbeSingularity);
                }
                Ok(bessel::k0(tau.sqrt() * r))
            }
        }
    }

    /// Normal derivative `∂v/∂ν(x) = ∇v(x)·ν` for a unit vector `ν`.
    ///
    /// Directional: `√τ (ω·ν) e^{√τ x·ω}`.
    /// Point: `−√τ K₁(√τ|x−p|) (x−p)·ν / |x−p|`.
    pub fn normal_derivative(&self, x: Vec2, nu: Vec2) -> Result<f64> {
        match *self {
            Probe::Directional { omega, tau } => Ok(tau.sqrt() * omega.dot(nu) * self.value(x)?),
            Probe::Point { p, tau } => {
                let d = x - p;
                let r = d.norm();
                if r == 0.0 {
                    return Err(Error::ProbeSingularity);
                }
                let st = tau.sqrt();
                Ok(-st * bessel::k1(st * r) * d.dot(nu) / r)
            }
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidInput(format!(
            "spectral parameter tau must be positive and finite, got {tau}"
        )));
    }
    Ok(())
}

/// Temporal flux profile `φ: [0, T] → ℝ`, `φ ≥ 0`, `φ(0) > 0` for the
/// detection theory to apply (`Monomial` relaxes the latter; its indicator
/// decays one power of `τ` faster per degree).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TemporalProfile {
    /// `φ(t) = 1`.
    ConstOne,
    /// `φ(t) = t^k`.
    Monomial { k: u32 },
    /// Piecewise-linear profile through `(times[i], values[i])`; `mu` is the
    /// caller-declared decay exponent of `Φ(τ) ~ c τ^{−μ}`.
    Table {
        times: Vec<f64>,
        values: Vec<f64>,
        mu: f64,
    },
}

impl TemporalProfile {
    /// Pointwise evaluation; `Table` interpolates linearly and clamps
    /// outside its node range.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TemporalProfile::ConstOne => 1.0,
            TemporalProfile::Monomial { k } => t.powi(*k as i32),
            TemporalProfile::Table { times, values, .. } => {
                if t <= times[0] {
                    return values[0];
                }
                if t >= *times.last().expect("validated non-empty") {
                    return *values.last().expect("validated non-empty");
                }
                // partition_point: first index with times[i] > t.
                let hi = times.partition_point(|&s| s <= t);
                let lo = hi - 1;
                let w = (t - times[lo]) / (times[hi] - times[lo]);
                values[lo] * (1.0 - w) + values[hi] * w
            }
        }
    }

    /// Decay exponent `μ` of the Laplace factor: `Φ(τ) ≈ c τ^{−μ}` for
    /// large `τ`. Exact for the closed-form profiles, declared for tables.
    pub fn decay_exponent(&self) -> f64 {
        match self {
            TemporalProfile::ConstOne => 1.0,
            TemporalProfile::Monomial { k } => (*k + 1) as f64,
            TemporalProfile::Table { mu, .. } => *mu,
        }
    }

    /// Structural validation against a horizon `T`.
    pub fn validate(&self, t_final: f64) -> Result<()> {
        match self {
            TemporalProfile::ConstOne | TemporalProfile::Monomial { .. } => Ok(()),
            TemporalProfile::Table { times, values, mu } => {
                if times.len() < 2 || times.len() != values.len() {
                    return Err(Error::InvalidInput(format!(
                        "table profile needs matching times/values with at least 2 nodes, got {}/{}",
                        times.len(),
                        values.len()
                    )));
                }
                if !times.windows(2).all(|w| w[1] > w[0]) {
                    return Err(Error::InvalidInput(
                        "table profile times must be strictly increasing".into(),
                    ));
                }
                if times[0] < 0.0 || *times.last().unwrap() > t_final + 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "table profile times must lie in [0, {t_final}]"
                    )));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidInput(
                        "table profile values must be finite and nonnegative".into(),
                    ));
                }
                if !mu.is_finite() {
                    return Err(Error::InvalidInput(
                        "table profile decay exponent must be finite".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Laplace-type factor `Φ(τ) = ∫₀ᵀ e^{−τ t} φ(t) dt`.
///
/// Closed forms: `ConstOne` gives `(1 − e^{−τT})/τ`; `Monomial{k}` follows
/// the recurrence `I_k = (k I_{k−1} − T^k e^{−τT})/τ` seeded by `I_0`.
/// `Table` is integrated per linear segment with the same exponentially
/// weighted rule the indicator uses, which is exact for piecewise-linear φ.
pub fn laplace_of_profile(profile: &TemporalProfile, tau: f64, t_final: f64) -> Result<f64> {
    check_tau(tau)?;
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidInput(format!(
            "time horizon must be positive and finite, got {t_final}"
        )));
    }
    profile.validate(t_final)?;
    match profile {
        TemporalProfile::ConstOne => Ok((-(-tau * t_final).exp_m1()) / tau),
        TemporalProfile::Monomial { k } => {
            let decay = (-tau * t_final).exp();
            let mut integral = (1.0 - decay) / tau;
            for j in 1..=*k {
                integral = (j as f64 * integral - t_final.powi(j as i32) * decay) / tau;
            }
            Ok(integral)
        }
        TemporalProfile::Table { times, values, .. } => {
            let mut total = 0.0;
            let mut push = |t0: f64, t1: f64, v0: f64, v1: f64| {
                if t1 > t0 {
                    let (w0, w1) = exp_weights(tau, t1 - t0);
                    total += (-tau * t0).exp() * (t1 - t0) * (w0 * v0 + w1 * v1);
                }
            };
            // Clamped extension to the left of the first node ...
            push(0.0, times[0].min(t_final), values[0], values[0]);
            for i in 0..times.len() - 1 {
                let t0 = times[i].min(t_final);
                let t1 = times[i + 1].min(t_final);
                // ... exact on each linear segment ...
                let v_at = |t: f64| {
                    let w = (t - times[i]) / (times[i + 1] - times[i]);
                    values[i] * (1.0 - w) + values[i + 1] * w
                };
                push(t0, t1, v_at(t0), v_at(t1));
            }
            // ... and to the right of the last node.
            let last_t = *times.last().unwrap();
            if last_t < t_final {
                push(
                    last_t,
                    t_final,
                    *values.last().unwrap(),
                    *values.last().unwrap(),
                );
            }
            Ok(total)
        }
    }
}

/// Exponentially weighted trapezoid weights: for a linear `g` on `[0, Δ]`,
///
/// ```text
/// ∫₀^Δ e^{−τs} g(s) ds = Δ [ A(α) g(0) + B(α) g(Δ) ],   α = τΔ,
/// A(α) = (α − 1 + e^{−α})/α²,   B(α) = (1 − (1+α) e^{−α})/α².
/// ```
///
/// Below `α ≈ 0.5` both formulas lose digits to cancellation, so the Taylor
/// series in `α` is used instead (alternating, truncated at 1e-18 relative).
pub fn exp_weights(tau: f64, dt: f64) -> (f64, f64) {
    let alpha = tau * dt;
    if alpha < 0.5 {
        // A = 1/2 − α/6 + α²/24 − α³/120 + ... = Σ_{m≥0} (−α)^m /(m+2)!·(m+1)...
        // derived from the exact forms; both series share the factor (−α)^m/(m+2)!.
        let mut a = 0.0;
        let mut b = 0.0;
        let mut pow = 1.0; // (−α)^m
        let mut fact = 2.0; // (m+2)!
        for m in 0..60u32 {
            let term_a = pow / fact;
            let term_b = term_a * ((m + 1) as f64);
            a += term_a;
            b += term_b;
            if term_b.abs() < 1e-18 * (b.abs() + 0.5) {
                break;
            }
            pow *= -alpha;
            fact *= (m + 3) as f64;
        }
        // A(α) = Σ (−α)^m/(m+2)! · 1, B(α) = Σ (−α)^m (m+1)/(m+2)!.
        (a, b)
    } else {
        let e = (-alpha).exp();
        let a = (alpha - 1.0 + e) / (alpha * alpha);
        let b = (1.0 - (1.0 + alpha) * e) / (alpha * alpha);
        (a, b)
    }
}

/// Sample the prescribed flux `f(t, ·) = φ(t) ∂v/∂ν` on a set of boundary
/// faces (one value per face, evaluated at face centers).
pub fn flux_on_faces(
    probe: &Probe,
    faces: &BoundaryFaceSet,
    profile: &TemporalProfile,
    t: f64,
) -> Result<Vec<f64>> {
    let amp = profile.eval(t);
    let mut out = Vec::with_capacity(faces.len());
    for face in faces.iter() {
        out.push(amp * probe.normal_derivative(face.center, face.normal)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    fn v2(x: f64, y: f64) -> Vec2 {
        Vec2 { x, y }
    }

    #[test]
    fn directional_values() {
        let p = Probe::directional(v2(3.0, 0.0), 4.0).expect("valid probe");
        // Construction must normalize omega.
        match p {
            Probe::Directional { omega, .. } => {
                assert!((omega.norm() - 1.0).abs() < 1e-15, "omega not normalized")
            }
            _ => unreachable!(),
        }
        // x·ω = 0 on the axis of symmetry.
        assert_eq!(p.value(v2(0.0, 2.5)).unwrap(), 1.0);
        // √4 · 1 = 2 in the exponent.
        let e2 = p.value(v2(1.0, -1.0)).unwrap();
        assert!((e2 - 7.389_056_098_930_65).abs() < 1e-12, "e^2 = {e2}");
    }

    #[test]
    fn point_value_is_k0() {
        let p = Probe::point(v2(2.0, 1.0), 1.0).expect("valid probe");
        let v = p.value(v2(1.0, 1.0)).unwrap(); // |x−p| = 1, √τ = 1
        assert!((v - 0.421_024_438_240_708_33).abs() < 1e-14, "K0(1) = {v}");
        assert!(matches!(
            p.value(v2(2.0, 1.0)),
            Err(Error::ProbeSingularity)
        ));
    }

    #[test]
    fn directional_normal_derivative() {
        let tau = 9.0;
        let p = Probe::directional(v2(1.0, 0.0), tau).unwrap();
        // ν ⟂ ω kills the derivative.
        assert_eq!(
            p.normal_derivative(v2(0.3, 0.7), v2(0.0, 1.0)).unwrap(),
            0.0
        );
        // ν = ω at x·ω = 0 gives √τ.
        let d = p.normal_derivative(v2(0.0, -0.2), v2(1.0, 0.0)).unwrap();
        assert!((d - 3.0).abs() < 1e-14, "∂v/∂ν = {d}");
    }

    #[test]
    fn point_normal_derivative_matches_finite_difference() {
        // Radial derivative of K0(√τ r) is −√τ K1(√τ r); check against a
        // central difference of the value itself.
        let tau = 9.0;
        let p0 = v2(0.0, 0.0);
        let probe = Probe::point(p0, tau).unwrap();
        let r = 0.7;
        let x = v2(r, 0.0);
        let nu = v2(1.0, 0.0); // radial direction
        let analytic = probe.normal_derivative(x, nu).unwrap();
        let h = 1e-6;
        let fd = (probe.value(v2(r + h, 0.0)).unwrap() - probe.value(v2(r - h, 0.0)).unwrap())
            / (2.0 * h);
        let rel = ((analytic - fd) / fd).abs();
        assert!(
            rel <= 1e-6,
            "analytic {analytic} vs FD {fd} (rel {rel:.2e})"
        );
        // And the expected closed form.
        let expected = -tau.sqrt() * bessel::k1(tau.sqrt() * r);
        assert!((analytic - expected).abs() < 1e-14);
    }

    #[test]
    fn both_probes_satisfy_the_pde_at_second_order() {
        // 5-point discrete residual (Δ_h v − τ v) must vanish at O(h²),
        // demonstrated by halving h and watching the max relative residual
        // drop by ≈ 4.
        let cases: Vec<Probe> = vec![
            Probe::directional(v2(0.6, 0.8), 9.0).unwrap(),
            Probe::point(v2(1.5, 0.2), 4.0).unwrap(),
        ];
        for probe in cases {
            let residual = |n: usize| -> f64 {
                let h = 1.0 / n as f64;
                let mut worst: f64 = 0.0;
                for j in 1..n - 1 {
                    for i in 1..n - 1 {
                        let x = -0.5 + (i as f64 + 0.5) * h;
                        let y = -0.5 + (j as f64 + 0.5) * h;
                        let v = |dx: f64, dy: f64| {
                            probe.value(v2(x + dx, y + dy)).expect("regular point")
                        };
                        let lap = (v(h, 0.0) + v(-h, 0.0) + v(0.0, h) + v(0.0, -h)
                            - 4.0 * v(0.0, 0.0))
                            / (h * h);
                        let res = (lap - probe.tau() * v(0.0, 0.0)).abs()
                            / (probe.tau() * v(0.0, 0.0).abs());
                        worst = worst.max(res);
                    }
                }
                worst
            };
            let (r16, r32, r64) = (residual(16), residual(32), residual(64));
            let rate1 = r16 / r32;
            let rate2 = r32 / r64;
            assert!(
                (3.0..5.0).contains(&rate1) && (3.0..5.0).contains(&rate2),
                "PDE residual not O(h²) for {probe:?}: {r16:.3e} → {r32:.3e} → {r64:.3e}"
            );
        }
    }

    #[test]
    fn point_probe_outside_check() {
        let body = Rect::new(v2(-0.5, -0.5), v2(0.5, 0.5));
        let inside = Probe::point(v2(0.2, 0.0), 1.0).unwrap();
        let on_edge = Probe::point(v2(0.5, 0.0), 1.0).unwrap();
        let outside = Probe::point(v2(1.5, 0.0), 1.0).unwrap();
        assert!(
            inside.validate_outside(&body).is_err(),
            "interior anchor must fail"
        );
        assert!(
            on_edge.validate_outside(&body).is_err(),
            "boundary anchor must fail"
        );
        assert!(outside.validate_outside(&body).is_ok());
        assert!(Probe::directional(v2(1.0, 0.0), 1.0)
            .unwrap()
            .validate_outside(&body)
            .is_ok());
    }

    #[test]
    fn tau_must_be_positive() {
        assert!(Probe::directional(v2(1.0, 0.0), 0.0).is_err());
        assert!(Probe::point(v2(2.0, 0.0), -3.0).is_err());
        assert!(Probe::directional(v2(1.0, 0.0), f64::NAN).is_err());
    }

    #[test]
    fn laplace_const_profile() {
        let phi = TemporalProfile::ConstOne;
        let v = laplace_of_profile(&phi, 1.0, 1.0).unwrap();
        let expected = 1.0 - (-1.0f64).exp();
        assert!((v - expected).abs() < 1e-15, "Φ(1) = {v} vs {expected}");
        // Saturation: τ Φ(τ) ∈ [1 − e^{−τT}, 1] always, → 1 for large τ.
        for &tau in &[0.5, 2.0, 25.0, 400.0, 1e6] {
            let s = tau * laplace_of_profile(&phi, tau, 1.0).unwrap();
            assert!(
                s >= 1.0 - (-tau).exp() - 1e-12 && s <= 1.0 + 1e-12,
                "τΦ(τ) = {s} out of [1 − e^{{−τ}}, 1] at τ = {tau}"
            );
        }
    }

    #[test]
    fn laplace_monomial_closed_form() {
        // ∫₀¹ e^{−2t} t dt = (1 − 3 e^{−2})/4.
        let phi = TemporalProfile::Monomial { k: 1 };
        let v = laplace_of_profile(&phi, 2.0, 1.0).unwrap();
        let expected = (1.0 - 3.0 * (-2.0f64).exp()) / 4.0;
        assert!((v - expected).abs() < 1e-15, "{v} vs {expected}");

        // Independent oracle for k = 3: fine composite Simpson.
        let phi3 = TemporalProfile::Monomial { k: 3 };
        let v3 = laplace_of_profile(&phi3, 7.0, 2.0).unwrap();
        let n = 200_000;
        let dt = 2.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let t = i as f64 * dt;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * (-7.0 * t).exp() * t.powi(3);
        }
        s *= dt / 3.0;
        assert!(
            ((v3 - s) / s).abs() < 1e-12,
            "recurrence {v3} vs quadrature {s}"
        );
    }

    #[test]
    fn laplace_table_profile_is_exact_for_piecewise_linear() {
        // A tent profile: φ(0)=1 → φ(0.4)=3 → φ(1)=0, exactly representable.
        let phi = TemporalProfile::Table {
            times: vec![0.0, 0.4, 1.0],
            values: vec![1.0, 3.0, 0.0],
            mu: 1.0,
        };
        let tau = 5.0;
        let v = laplace_of_profile(&phi, tau, 1.0).unwrap();
        // Oracle: Simpson with enough nodes that segment breaks align (n multiple of 10).
        let n = 400_000;
        let dt = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let t = i as f64 * dt;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * (-tau * t).exp() * phi.eval(t);
        }
        s *= dt / 3.0;
        assert!(
            ((v - s) / s).abs() < 1e-9,
            "segment rule {v} vs quadrature {s}"
        );
    }

    #[test]
    fn exp_weights_match_limits_and_series_switch() {
        // α → 0 recovers the plain trapezoid (1/2, 1/2).
        let (a, b) = exp_weights(1e-12, 1.0);
        assert!((a - 0.5).abs() < 1e-9 && (b - 0.5).abs() < 1e-9);
        // The series and the closed form agree near the switch point.
        for &alpha in &[0.45, 0.5, 0.55] {
            let (a_lo, b_lo) = exp_weights(alpha / 2.0, 2.0 * (1.0 - 1e-14));
            let (a_hi, b_hi) = exp_weights(alpha / 2.0, 2.0 * (1.0 + 1e-14));
            assert!((a_lo - a_hi).abs() < 1e-14 && (b_lo - b_hi).abs() < 1e-14);
        }
        // Exactness on a linear integrand with a stiff weight:
        // ∫₀^Δ e^{−τs}(2 + 3s) ds, τ = 50, Δ = 0.2.
        let (tau, dt) = (50.0, 0.2);
        let (a, b) = exp_weights(tau, dt);
        let got = dt * (a * 2.0 + b * (2.0 + 3.0 * dt));
        let exact = 2.0 * (1.0 - (-tau * dt).exp()) / tau
            + 3.0 * ((1.0 - (1.0 + tau * dt) * (-tau * dt).exp()) / (tau * tau));
        assert!(((got - exact) / exact).abs() < 1e-14, "{got} vs {exact}");
    }

    #[test]
    fn table_profile_validation() {
        let bad_order = TemporalProfile::Table {
            times: vec![0.0, 0.5, 0.4],
            values: vec![1.0, 1.0, 1.0],
            mu: 1.0,
        };
        assert!(bad_order.validate(1.0).is_err());
        let negative = TemporalProfile::Table {
            times: vec![0.0, 1.0],
            values: vec![1.0, -0.5],
            mu: 1.0,
        };
        assert!(negative.validate(1.0).is_err());
        let past_horizon = TemporalProfile::Table {
            times: vec![0.0, 2.0],
            values: vec![1.0, 1.0],
            mu: 1.0,
        };
        assert!(past_horizon.validate(1.0).is_err());
        assert!(past_horizon.validate(2.0).is_ok());
    }

    #[test]
    fn profile_decay_exponents() {
        assert_eq!(TemporalProfile::ConstOne.decay_exponent(), 1.0);
        assert_eq!(TemporalProfile::Monomial { k: 2 }.decay_exponent(), 3.0);
    }
}
