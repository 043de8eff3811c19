//! Thermal probing of insulating cavities in a two-dimensional conducting body.
//!
//! The library simulates the forward measurement and implements the inverse
//! reconstruction for the following setup. A rectangular body `Ω` contains an
//! unknown cavity `D` that is perfectly insulating (zero heat flux on `∂D`).
//! Starting from temperature zero, a prescribed heat flux
//! `f(x,t) = ∂v/∂ν(x)·φ(t)` is applied on the outer boundary `∂Ω`, where `v`
//! is a probe solution of the stationary equation `(Δ − τ)v = 0`:
//!
//! * directional probe: `v(x) = exp(√τ x·ω)` for a unit direction `ω`,
//! * point probe:       `v(x) = K₀(√τ |x − p|)` for a source point `p ∉ Ω̄`.
//!
//! The body's response `u(x,t)` on `∂Ω` is the synthetic measurement. The
//! indicator functional
//!
//! ```text
//! J(τ) = ∫_{∂Ω} ∫_0^T e^{−τt} ( v f − u ∂v/∂ν ) dt dS
//! ```
//!
//! has log-asymptotics `log|J(τ)| / (2√τ) → h_D(ω)` (support function of the
//! cavity) for directional probes and `→ −d_D(p)` (distance from `p` to the
//! cavity) for point probes as `τ → ∞`. Sweeping `τ` and regressing the
//! asymptotics recovers half-plane and ball constraints on `D`; intersecting
//! them encloses the cavity's convex hull.
//!
//! Module map:
//!
//! * [`geometry`]  — scenes, shapes, analytic support/distance oracles, rasterization
//! * [`grid`]      — finite-volume Neumann Laplacian, CSR operator, CG solver
//! * [`bessel`]    — modified Bessel functions `K₀`, `K₁` (and `I₀`, `I₁`)
//! * [`probes`]    — probe fields, temporal profiles, boundary fluxes
//! * [`forward`]   — implicit time stepping and boundary trace extraction
//! * [`indicator`] — `J(τ)` evaluation and support/distance regression
//! * [`elliptic`]  — stationary verification path: NtD gap two ways, cavity weights
//! * [`reconstruct`] — half-plane intersection and ball-complement enclosures

pub mod bessel;
pub mod elliptic;
pub mod forward;
pub mod geometry;
pub mod grid;
pub mod indicator;
pub mod probes;
pub mod reconstruct;

mod error;

pub use error::{Error, Result};
