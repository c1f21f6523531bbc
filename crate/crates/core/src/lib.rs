//! Exact spectral certification of the calibrated Cauchy–Riemann inequality
//! on round spheres.
//!
//! All arithmetic is over arbitrary-precision rationals. Integrals over
//! `S^m` are normalised so that `Vol(S^m) = 1`.

pub mod certifier;
pub mod error;
pub mod forms;
pub mod frames;
pub mod harmonics;
pub mod identities;
pub mod kahler_table;
pub mod linalg;
pub mod moments;
pub mod polyring;
pub mod rational;

pub use certifier::{certify_stability, CertificateBundle, DegreeReport, Problem, Verdict};
pub use error::{Error, Result};
pub use forms::{CalibrationSpec, ConstantForm, PolyOneForm, PolyTwoForm};
pub use harmonics::{harmonic_basis, HarmonicSpace};
pub use linalg::{PsdStatus, RatMatrix};
pub use moments::MomentTable;
pub use polyring::{MultiIndex, PolyTerm, SpherePoly};
pub use rational::{format_rational, parse_rational, Rational};
