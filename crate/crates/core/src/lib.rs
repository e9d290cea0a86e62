//! Numerical toolkit for ground states of the singularly perturbed Neumann
//! problem
//!
//! ```text
//! -d Δu + u = u (e^{u²} - 1)   in Ω ⊂ ℝ²,      ∂u/∂ν = 0   on ∂Ω,
//! ```
//!
//! together with the machinery needed to study the d → 0 boundary-spike
//! regime at desk scale:
//!
//! * [`radial`] — the limit profile w on ℝ² by radial shooting, its energy,
//!   decay rate and moment identities;
//! * [`geometry`] — domains, graded triangulations of the disk, and local
//!   charts that straighten the boundary near a point;
//! * [`fem`] — P1 mass/stiffness assembly and the energy / Nehari-constraint
//!   / gradient evaluations with natural Neumann conditions;
//! * [`ground_state`] — Nehari-constrained projected gradient descent for
//!   the ground state u_d and its level m_d;
//! * [`asymptotics`] — transplanted test functions, the small-d expansion of
//!   the test level, and concentration diagnostics;
//! * [`moser`] — the borderline exponential functional and its sharpness
//!   sweep on truncated-logarithm concentrators;
//! * [`symmetry`] — axial symmetry and monotonicity diagnostics on the disk;
//! * [`io`] — plain-text readers/writers for meshes, fields and profiles.

pub mod asymptotics;
pub mod fem;
pub mod geometry;
pub mod ground_state;
pub mod io;
pub mod moser;
pub mod numerics;
pub mod radial;
pub mod symmetry;
