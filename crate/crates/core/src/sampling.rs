//! Deterministic random input generation for audits, fuzzing, and
//! sharp-constant search.
//!
//! Vector entries are standard normal per component (real and imaginary
//! parts in complex mode). Localization scalars are sampled as
//! center-plus-radius with log-uniform magnitudes, and the vector `x` is
//! placed inside the admissibility ball by construction, so hypothesis
//! satisfaction needs no rejection loop.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::linalg::{Mode, Scalar, Vector};
use crate::reverses::{BoundsPair, Form};
use crate::two_inner::TwoInnerSpace;
use crate::Result;

/// Standard normal via Box-Muller; two uniform draws per sample keeps the
/// stream layout independent of any library distribution internals.
pub fn normal(rng: &mut ChaCha12Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Standard normal scalar respecting the field mode.
pub fn random_scalar(rng: &mut ChaCha12Rng, mode: Mode) -> Scalar {
    match mode {
        Mode::Real => Scalar::real(normal(rng)),
        Mode::Complex => Scalar::new(normal(rng), normal(rng)),
    }
}

/// Standard normal real number.
pub fn random_real(rng: &mut ChaCha12Rng) -> f64 {
    normal(rng)
}

/// Vector with independent standard normal entries.
pub fn random_vector(rng: &mut ChaCha12Rng, dim: usize, mode: Mode) -> Vector {
    let entries = (0..dim).map(|_| random_scalar(rng, mode)).collect();
    Vector::new(entries).expect("dim >= 2 enforced by callers")
}

/// Three fresh random vectors.
pub fn random_triple(rng: &mut ChaCha12Rng, dim: usize, mode: Mode) -> [Vector; 3] {
    [
        random_vector(rng, dim, mode),
        random_vector(rng, dim, mode),
        random_vector(rng, dim, mode),
    ]
}

/// Log-uniform magnitude in `[1e-2, 1e2]`.
fn log_uniform_magnitude(rng: &mut ChaCha12Rng) -> f64 {
    10f64.powf(rng.gen_range(-2.0..2.0))
}

/// Sample a localization pair appropriate for `form`:
/// forms over real positive windows get `0 < lo < hi`; forms needing
/// `Re(conj(a) A) > 0` get radius strictly inside the center magnitude;
/// the rest get an unconstrained center/radius pair.
pub fn random_bounds(rng: &mut ChaCha12Rng, mode: Mode, form: Form) -> BoundsPair {
    if form.needs_real_positive() {
        // center c > 0, radius r in (0, c): lo = c - r > 0.
        let c = log_uniform_magnitude(rng);
        let r = c * rng.gen_range(0.05..0.95);
        return BoundsPair::new(Scalar::real(c - r), Scalar::real(c + r));
    }
    let dir = match mode {
        Mode::Real => Scalar::real(1.0),
        Mode::Complex => {
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            Scalar::new(phi.cos(), phi.sin())
        }
    };
    let center_mag = log_uniform_magnitude(rng);
    let center = match mode {
        Mode::Real => Scalar::real(if rng.gen::<bool>() {
            center_mag
        } else {
            -center_mag
        }),
        Mode::Complex => {
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            Scalar::new(center_mag * phi.cos(), center_mag * phi.sin())
        }
    };
    let radius = if form.needs_re_prod_positive() {
        // Re(conj(a) A) = |c|^2 - r^2 > 0 exactly when r < |c|.
        center_mag * rng.gen_range(0.05..0.95)
    } else {
        log_uniform_magnitude(rng)
    };
    let offset = dir.scale(radius);
    BoundsPair::new(center - offset, center + offset)
}

/// Sample `(x, y, z)` with `x` inside the localization ball of `b`, so the
/// quadratic hypothesis holds by construction. `y` is redrawn a bounded
/// number of times if it lands too close to the span of `z`, where the ball
/// collapses and every chain member degenerates to zero.
pub fn hypothesis_point(
    rng: &mut ChaCha12Rng,
    space: &TwoInnerSpace,
    b: &BoundsPair,
) -> Result<(Vector, Vector, Vector)> {
    let dim = space.dim();
    let mode = space.mode();
    let z = random_vector(rng, dim, mode);
    let mut y = random_vector(rng, dim, mode);
    for _ in 0..16 {
        let ny = space.tnorm(&y, &z)?;
        let gross = space.base().norm(&y)? * space.base().norm(&z)?;
        if ny > 1e-6 * gross.max(1.0) {
            break;
        }
        y = random_vector(rng, dim, mode);
    }
    let center = b.center();
    let radius = 0.5 * b.diff_abs() * space.tnorm(&y, &z)?;
    let dir = random_vector(rng, dim, mode);
    let dir_norm = space.tnorm(&dir, &z)?;
    let reach = rng.gen_range(0.0..0.999);
    let x = if dir_norm > 1e-12 {
        y.combine(center, &dir, Scalar::real(radius * reach / dir_norm))
    } else {
        y.scale(center)
    };
    Ok((x, y, z))
}
