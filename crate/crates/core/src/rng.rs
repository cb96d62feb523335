//! Seeded random sources shared by fixtures and property suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with log-uniform magnitude in `[lo, hi]` and uniform phase.
pub fn complex_in_shell<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    let magnitude = (rng.gen_range(lo.ln()..=hi.ln())).exp();
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(magnitude, phase)
}

/// Complex number with independent uniform components in `[-1, 1)`.
pub fn complex_unit_box<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}
