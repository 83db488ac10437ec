//! The 2-inner product, its 2-norm, polarization identities, the CBS gap,
//! and a randomized audit of the defining axioms.
//!
//! The functional is the Gram-determinant form over the base product,
//!
//! ```text
//! (x,y|z) = <x,y><z,z> - <x,z><z,y>
//! ```
//!
//! the unique concrete construction the integral case exhibits; all bound
//! chains in [`crate::reverses`] are evaluated against it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{Mode, Scalar, Vector, WeightedInnerSpace};
use crate::sampling;
use crate::DEFAULT_TOL;

/// A space equipped with the Gram-determinant 2-inner product over a
/// weighted base product.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoInnerSpace {
    base: WeightedInnerSpace,
}

impl TwoInnerSpace {
    pub fn new(base: WeightedInnerSpace) -> Self {
        TwoInnerSpace { base }
    }

    /// Unit-weight space of dimension `dim`.
    pub fn unit(dim: usize, mode: Mode) -> Result<Self> {
        Ok(TwoInnerSpace::new(WeightedInnerSpace::unit(dim, mode)?))
    }

    pub fn base(&self) -> &WeightedInnerSpace {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn mode(&self) -> Mode {
        self.base.mode()
    }

    /// The 2-inner product `(x,y|z)`.
    pub fn tip(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Scalar> {
        let xy = self.base.inner(x, y)?;
        let zz = self.base.inner(z, z)?;
        let xz = self.base.inner(x, z)?;
        let zy = self.base.inner(z, y)?;
        Ok(xy.scale(zz.re) - xz * zy)
    }

    /// Squared 2-norm `(x,x|z)` together with the gross magnitude of the
    /// determinant terms, used for relative tolerance scaling.
    fn tnorm_sq_parts(&self, x: &Vector, z: &Vector) -> Result<(f64, f64)> {
        let xx = self.base.inner(x, x)?.re;
        let zz = self.base.inner(z, z)?.re;
        let xz = self.base.inner(x, z)?;
        let prod = xx * zz;
        let cross = xz.abs_sq();
        Ok((prod - cross, prod + cross))
    }

    /// The 2-norm `sqrt((x,x|z))`.
    ///
    /// Values within `-tol * scale` of zero clamp to zero; anything more
    /// negative signals a broken base product and errors out.
    pub fn tnorm(&self, x: &Vector, z: &Vector) -> Result<f64> {
        let (val, gross) = self.tnorm_sq_parts(x, z)?;
        if val < -DEFAULT_TOL * gross.max(1.0) {
            return Err(Error::Inconsistent(format!(
                "(x,x|z) = {val} is negative beyond tolerance (scale {gross})"
            )));
        }
        Ok(val.max(0.0).sqrt())
    }

    /// Real-mode polarization: `(x,y|z) = 1/4 [(z,z|x+y) - (z,z|x-y)]`.
    pub fn polarize_real(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Scalar> {
        if self.mode() != Mode::Real {
            return Err(Error::ModeMismatch {
                required: Mode::Real,
                actual: self.mode(),
            });
        }
        let plus = self.tip(z, z, &x.add(y))?;
        let minus = self.tip(z, z, &x.sub(y))?;
        Ok((plus - minus).scale(0.25))
    }

    /// Complex-mode polarization: the real part comes from `x +- y`, the
    /// imaginary part from `x +- iy`.
    pub fn polarize_complex(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Scalar> {
        if self.mode() != Mode::Complex {
            return Err(Error::ModeMismatch {
                required: Mode::Complex,
                actual: self.mode(),
            });
        }
        let iy = y.scale(Scalar::I);
        let re_plus = self.tip(z, z, &x.add(y))?.re;
        let re_minus = self.tip(z, z, &x.sub(y))?.re;
        let im_plus = self.tip(z, z, &x.add(&iy))?.re;
        let im_minus = self.tip(z, z, &x.sub(&iy))?.re;
        Ok(Scalar::new(
            0.25 * (re_plus - re_minus),
            0.25 * (im_plus - im_minus),
        ))
    }

    /// The CBS gap `|x|z|^2 |y|z|^2 - |(x,y|z)|^2`, evaluated directly.
    ///
    /// Nonnegative up to rounding; zero exactly when `x, y, z` are linearly
    /// dependent.
    pub fn cbs_gap(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<f64> {
        let nx2 = self.tip(x, x, z)?.re;
        let ny2 = self.tip(y, y, z)?.re;
        let w = self.tip(x, y, z)?;
        Ok(nx2 * ny2 - w.abs_sq())
    }

    /// The CBS gap evaluated through the projection coefficient
    /// `lambda = (x,y|z) / |y|z|^2`, for which the gap equals
    /// `|x - lambda y|z|^2 |y|z|^2 - |lambda |y|z|^2 - (x,y|z)|^2` with the
    /// subtracted term at rounding level. Algebraically identical to
    /// [`cbs_gap`](Self::cbs_gap) but immune to the catastrophic
    /// cancellation that the direct route suffers when the gap is tiny
    /// relative to `|x|z|^2 |y|z|^2`.
    pub fn cbs_gap_stable(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<f64> {
        let ny2 = self.tip(y, y, z)?.re;
        if ny2 <= 0.0 {
            return self.cbs_gap(x, y, z);
        }
        let w = self.tip(x, y, z)?;
        let lambda = w.div_real(ny2);
        let resid = x.combine(Scalar::ONE, y, -lambda);
        let nr2 = self.tip(&resid, &resid, z)?.re.max(0.0);
        let leftover = lambda.scale(ny2) - w;
        Ok(nr2 * ny2 - leftover.abs_sq())
    }

    /// Relative residual of projecting `x` onto `span{y, z}` in the base
    /// product. Zero means exact linear dependence of the triple.
    pub fn span_residual(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<f64> {
        let nx = self.base.norm(x)?;
        if nx == 0.0 {
            return Ok(0.0);
        }
        let yy = self.base.inner(y, y)?.re;
        let zz = self.base.inner(z, z)?.re;
        let yz = self.base.inner(y, z)?;
        let xy = self.base.inner(x, y)?;
        let xz = self.base.inner(x, z)?;
        // Gram determinant of {y, z}; real and nonnegative.
        let det = yy * zz - yz.abs_sq();
        let (c1, c2) = if det > 1e-28 * (yy * zz).max(f64::MIN_POSITIVE) {
            let c1 = (xy.scale(zz) - yz.conj() * xz).div_real(det);
            let c2 = (xz.scale(yy) - yz * xy).div_real(det);
            (c1, c2)
        } else if yy >= zz && yy > 0.0 {
            (xy.div_real(yy), Scalar::ZERO)
        } else if zz > 0.0 {
            (Scalar::ZERO, xz.div_real(zz))
        } else {
            (Scalar::ZERO, Scalar::ZERO)
        };
        let resid = x.sub(&y.scale(c1)).sub(&z.scale(c2));
        Ok(self.base.norm(&resid)? / nx)
    }

    /// Whether `x, y, z` are linearly dependent under the projection test.
    pub fn is_dependent_triple(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<bool> {
        Ok(self.span_residual(x, y, z)? <= 1e-8)
    }

    /// Randomized audit of the defining conditions. Deterministic under
    /// `seed`; every condition is instantiated with fresh draws per trial
    /// and the worst relative residual is kept together with its witness.
    pub fn audit_axioms(&self, trials: u64, seed: u64) -> Result<AxiomReport> {
        self.audit_axioms_tol(trials, seed, DEFAULT_TOL)
    }

    pub fn audit_axioms_tol(&self, trials: u64, seed: u64, tol: f64) -> Result<AxiomReport> {
        let tip = |x: &Vector, y: &Vector, z: &Vector| self.tip(x, y, z).expect("matched dims");
        audit_with(&self.base, &tip, trials, seed, tol)
    }
}

/// Identifiers for the audited conditions. The codes are the conventional
/// short names used throughout the CLI and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// 2I1: `(x,x|z) >= 0`, vanishing on dependent pairs.
    Nonnegativity,
    /// 2I2: `(x,x|z) = (z,z|x)`.
    ArgumentSwap,
    /// 2I3: `(y,x|z) = conj((x,y|z))`.
    ConjugateSymmetry,
    /// 2I4: homogeneity in the first slot.
    FirstHomogeneity,
    /// 2I5: additivity in the first slot.
    FirstAdditivity,
    /// 2N1: the 2-norm vanishes exactly on dependent pairs.
    NormVanishing,
    /// 2N2: `|z|x| = |x|z|`.
    NormSwap,
    /// 2N3: `|ax|z| = |a| |x|z|`.
    NormHomogeneity,
    /// 2N4: triangle inequality in the first slot.
    NormTriangle,
    /// 1.1: conjugate homogeneity in the second slot.
    SecondConjHomogeneity,
    /// 1.4: real quadratic homogeneity in the third slot.
    ThirdRealQuadratic,
    /// 1.6: modulus-squared homogeneity in the third slot.
    ThirdModulusQuadratic,
    /// 1.7: Gram positivity of the CBS combination.
    GramPositivity,
    /// 1.8: `(z,y|z) = (y,z|z) = 0`.
    DegenerateThird,
}

impl Axiom {
    pub const ALL: [Axiom; 14] = [
        Axiom::Nonnegativity,
        Axiom::ArgumentSwap,
        Axiom::ConjugateSymmetry,
        Axiom::FirstHomogeneity,
        Axiom::FirstAdditivity,
        Axiom::NormVanishing,
        Axiom::NormSwap,
        Axiom::NormHomogeneity,
        Axiom::NormTriangle,
        Axiom::SecondConjHomogeneity,
        Axiom::ThirdRealQuadratic,
        Axiom::ThirdModulusQuadratic,
        Axiom::GramPositivity,
        Axiom::DegenerateThird,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            Axiom::Nonnegativity => "2I1",
            Axiom::ArgumentSwap => "2I2",
            Axiom::ConjugateSymmetry => "2I3",
            Axiom::FirstHomogeneity => "2I4",
            Axiom::FirstAdditivity => "2I5",
            Axiom::NormVanishing => "2N1",
            Axiom::NormSwap => "2N2",
            Axiom::NormHomogeneity => "2N3",
            Axiom::NormTriangle => "2N4",
            Axiom::SecondConjHomogeneity => "1.1",
            Axiom::ThirdRealQuadratic => "1.4",
            Axiom::ThirdModulusQuadratic => "1.6",
            Axiom::GramPositivity => "1.7",
            Axiom::DegenerateThird => "1.8",
        }
    }
}

/// Witness inputs for the worst residual of one audited condition.
#[derive(Debug, Clone)]
pub struct AxiomWitness {
    pub trial: u64,
    pub vectors: Vec<(&'static str, Vector)>,
    pub scalars: Vec<(&'static str, Scalar)>,
}

#[derive(Debug, Clone)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub worst_residual: f64,
    pub pass: bool,
    pub witness: Option<AxiomWitness>,
}

/// Outcome of [`TwoInnerSpace::audit_axioms`]: one entry per condition.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn worst_residual(&self) -> f64 {
        self.results
            .iter()
            .map(|r| r.worst_residual)
            .fold(0.0, f64::max)
    }
}

struct Tracker {
    axiom: Axiom,
    worst: f64,
    witness: Option<AxiomWitness>,
}

impl Tracker {
    fn new(axiom: Axiom) -> Self {
        Tracker {
            axiom,
            worst: -1.0,
            witness: None,
        }
    }

    fn observe(&mut self, residual: f64, witness: impl FnOnce() -> AxiomWitness) {
        if residual > self.worst {
            self.worst = residual;
            self.witness = Some(witness());
        }
    }

    fn finish(self, tol: f64) -> AxiomResult {
        AxiomResult {
            axiom: self.axiom,
            worst_residual: self.worst.max(0.0),
            pass: self.worst <= tol,
            witness: self.witness,
        }
    }
}

const TINY: f64 = 1e-300;

/// Audit an arbitrary three-argument form against the conditions. Taking
/// the form as a closure lets tests audit deliberately corrupted variants
/// and watch the right condition fail.
pub(crate) fn audit_with(
    base: &WeightedInnerSpace,
    tip: &dyn Fn(&Vector, &Vector, &Vector) -> Scalar,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::precondition("audit requires at least one trial"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dim = base.dim();
    let mode = base.mode();
    let norm = |v: &Vector| base.norm(v).expect("matched dims");
    let tnorm_of = |x: &Vector, z: &Vector| tip(x, x, z).re.max(0.0).sqrt();

    let mut trackers: Vec<Tracker> = Axiom::ALL.iter().map(|&a| Tracker::new(a)).collect();

    // Redraw `x` until (x,x|z) is bounded away from the dependence locus,
    // where square roots amplify rounding beyond any fixed relative budget.
    let draw_conditioned = |rng: &mut ChaCha12Rng, z: &Vector| -> Vector {
        for _ in 0..8 {
            let x = sampling::random_vector(rng, dim, mode);
            let sq = tip(&x, &x, z).re;
            let gross = 2.0 * norm(&x).powi(2) * norm(z).powi(2);
            if sq > 1e-8 * gross {
                return x;
            }
        }
        sampling::random_vector(rng, dim, mode)
    };

    for trial in 0..trials {
        // 2I1: nonnegativity plus vanishing on a constructed dependent pair.
        {
            let x = sampling::random_vector(&mut rng, dim, mode);
            let z = sampling::random_vector(&mut rng, dim, mode);
            let alpha = sampling::random_scalar(&mut rng, mode);
            let v = tip(&x, &x, &z);
            let gross = (2.0 * norm(&x).powi(2) * norm(&z).powi(2)).max(TINY);
            let dep = z.scale(alpha);
            let vd = tip(&dep, &dep, &z).abs();
            let gross_dep = (2.0 * alpha.abs_sq() * norm(&z).powi(4)).max(TINY);
            let r = ((-v.re).max(0.0).max(v.im.abs()) / gross).max(vd / gross_dep);
            trackers[0].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("z", z.clone())],
                scalars: vec![("alpha", alpha)],
            });
        }
        // 2I2: (x,x|z) = (z,z|x).
        {
            let x = sampling::random_vector(&mut rng, dim, mode);
            let z = sampling::random_vector(&mut rng, dim, mode);
            let gross = (2.0 * norm(&x).powi(2) * norm(&z).powi(2)).max(TINY);
            let r = (tip(&x, &x, &z) - tip(&z, &z, &x)).abs() / gross;
            trackers[1].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("z", z.clone())],
                scalars: vec![],
            });
        }
        // 2I3: (y,x|z) = conj((x,y|z)).
        {
            let [x, y, z] = sampling::random_triple(&mut rng, dim, mode);
            let gross = (2.0 * norm(&x) * norm(&y) * norm(&z).powi(2)).max(TINY);
            let r = (tip(&y, &x, &z) - tip(&x, &y, &z).conj()).abs() / gross;
            trackers[2].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("y", y.clone()), ("z", z.clone())],
                scalars: vec![],
            });
        }
        // 2I4: (ax,y|z) = a (x,y|z).
        {
            let [x, y, z] = sampling::random_triple(&mut rng, dim, mode);
            let alpha = sampling::random_scalar(&mut rng, mode);
            let gross =
                (2.0 * (1.0 + alpha.abs()) * norm(&x) * norm(&y) * norm(&z).powi(2)).max(TINY);
            let r = (tip(&x.scale(alpha), &y, &z) - alpha * tip(&x, &y, &z)).abs() / gross;
            trackers[3].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("y", y.clone()), ("z", z.clone())],
                scalars: vec![("alpha", alpha)],
            });
        }
        // 2I5: additivity in the first slot.
        {
            let [x, y, z] = sampling::random_triple(&mut rng, dim, mode);
            let xp = sampling::random_vector(&mut rng, dim, mode);
            let gross = (2.0 * (norm(&x) + norm(&xp)) * norm(&y) * norm(&z).powi(2)).max(TINY);
            let r = (tip(&x.add(&xp), &y, &z) - tip(&x, &y, &z) - tip(&xp, &y, &z)).abs() / gross;
            trackers[4].observe(r, || AxiomWitness {
                trial,
                vectors: vec![
                    ("x", x.clone()),
                    ("x'", xp.clone()),
                    ("y", y.clone()),
                    ("z", z.clone()),
                ],
                scalars: vec![],
            });
        }
        // 2N1: |ax|z| vanishes when x = az; checked on the squared form,
        // where the rounding budget is meaningful (the square root would
        // amplify determinant cancellation noise to ~1e-8 regardless).
        {
            let z = sampling::random_vector(&mut rng, dim, mode);
            let alpha = sampling::random_scalar(&mut rng, mode);
            let dep = z.scale(alpha);
            let scale = (2.0 * alpha.abs_sq() * norm(&z).powi(4)).max(TINY);
            let r = tip(&dep, &dep, &z).abs() / scale;
            trackers[5].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("z", z.clone())],
                scalars: vec![("alpha", alpha)],
            });
        }
        // 2N2: |z|x| = |x|z|.
        {
            let x = sampling::random_vector(&mut rng, dim, mode);
            let z = sampling::random_vector(&mut rng, dim, mode);
            let scale = (std::f64::consts::SQRT_2 * norm(&x) * norm(&z)).max(TINY);
            let r = (tnorm_of(&x, &z) - tnorm_of(&z, &x)).abs() / scale;
            trackers[6].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("z", z.clone())],
                scalars: vec![],
            });
        }
        // 2N3: |ax|z| = |a| |x|z|, on draws bounded away from dependence.
        {
            let z = sampling::random_vector(&mut rng, dim, mode);
            let x = draw_conditioned(&mut rng, &z);
            let alpha = sampling::random_scalar(&mut rng, mode);
            let lhs = tnorm_of(&x.scale(alpha), &z);
            let rhs = alpha.abs() * tnorm_of(&x, &z);
            let scale = ((1.0 + alpha.abs()) * norm(&x) * norm(&z) + lhs + rhs).max(TINY);
            let r = (lhs - rhs).abs() / scale;
            trackers[7].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("z", z.clone())],
                scalars: vec![("alpha", alpha)],
            });
        }
        // 2N4: triangle inequality, same conditioning guard.
        {
            let z = sampling::random_vector(&mut rng, dim, mode);
            let x = draw_conditioned(&mut rng, &z);
            let xp = draw_conditioned(&mut rng, &z);
            let lhs = tnorm_of(&x.add(&xp), &z);
            let rhs = tnorm_of(&x, &z) + tnorm_of(&xp, &z);
            let scale = (lhs + rhs).max((norm(&x) + norm(&xp)) * norm(&z)).max(TINY);
            let r = (lhs - rhs).max(0.0) / scale;
            trackers[8].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("x'", xp.clone()), ("z", z.clone())],
                scalars: vec![],
            });
        }
        // 1.1: (x,ay|z) = conj(a) (x,y|z).
        {
            let [x, y, z] = sampling::random_triple(&mut rng, dim, mode);
            let alpha = sampling::random_scalar(&mut rng, mode);
            let gross =
                (2.0 * (1.0 + alpha.abs()) * norm(&x) * norm(&y) * norm(&z).powi(2)).max(TINY);
            let r = (tip(&x, &y.scale(alpha), &z) - alpha.conj() * tip(&x, &y, &z)).abs() / gross;
            trackers[9].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("y", y.clone()), ("z", z.clone())],
                scalars: vec![("alpha", alpha)],
            });
        }
        // 1.4: (x,y|az) = a^2 (x,y|z) for real a.
        {
            let [x, y, z] = sampling::random_triple(&mut rng, dim, mode);
            let a = sampling::random_real(&mut rng);
            let gross = (2.0 * (1.0 + a * a) * norm(&x) * norm(&y) * norm(&z).powi(2)).max(TINY);
            let r = (tip(&x, &y, &z.scale(Scalar::real(a))) - tip(&x, &y, &z).scale(a * a)).abs()
                / gross;
            trackers[10].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("y", y.clone()), ("z", z.clone())],
                scalars: vec![("alpha", Scalar::real(a))],
            });
        }
        // 1.6: (x,y|az) = |a|^2 (x,y|z) for field scalars a.
        {
            let [x, y, z] = sampling::random_triple(&mut rng, dim, mode);
            let alpha = sampling::random_scalar(&mut rng, mode);
            let gross =
                (2.0 * (1.0 + alpha.abs_sq()) * norm(&x) * norm(&y) * norm(&z).powi(2)).max(TINY);
            let r = (tip(&x, &y, &z.scale(alpha)) - tip(&x, &y, &z).scale(alpha.abs_sq())).abs()
                / gross;
            trackers[11].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("y", y.clone()), ("z", z.clone())],
                scalars: vec![("alpha", alpha)],
            });
        }
        // 1.7: (y,y|z) [ (x,x|z)(y,y|z) - |(x,y|z)|^2 ] >= 0.
        {
            let [x, y, z] = sampling::random_triple(&mut rng, dim, mode);
            let gx = 2.0 * norm(&x).powi(2) * norm(&z).powi(2);
            let gy = 2.0 * norm(&y).powi(2) * norm(&z).powi(2);
            let v = tip(&y, &y, &z).re
                * (tip(&x, &x, &z).re * tip(&y, &y, &z).re - tip(&x, &y, &z).abs_sq());
            let gross = (2.0 * gy * gx * gy).max(TINY);
            let r = (-v).max(0.0) / gross;
            trackers[12].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("x", x.clone()), ("y", y.clone()), ("z", z.clone())],
                scalars: vec![],
            });
        }
        // 1.8: (z,y|z) = (y,z|z) = 0.
        {
            let y = sampling::random_vector(&mut rng, dim, mode);
            let z = sampling::random_vector(&mut rng, dim, mode);
            let gross = (2.0 * norm(&y) * norm(&z).powi(3)).max(TINY);
            let r = tip(&z, &y, &z).abs().max(tip(&y, &z, &z).abs()) / gross;
            trackers[13].observe(r, || AxiomWitness {
                trial,
                vectors: vec![("y", y.clone()), ("z", z.clone())],
                scalars: vec![],
            });
        }
    }

    Ok(AxiomReport {
        trials,
        seed,
        tol,
        results: trackers.into_iter().map(|t| t.finish(tol)).collect(),
    })
}
