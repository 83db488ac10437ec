//! Extremal constructions attaining the reverse-bound constants, and an
//! empirical multi-start search for the best achievable ratio per form.
//!
//! The workhorse witness takes a 2-norm-orthonormal pair `(y, m)` relative
//! to `z` and sets `x = ((a+A)/2) y + ((A-a)/2) m`; the localization then
//! holds with equality and the gap-type ratios hit their constants exactly.
//! The one-parameter family `A = 1 + sqrt(eps)`, `a = 1 - sqrt(eps)` drives
//! the defect-type ratio to `1 / (2 (sqrt(1+eps) + 1))`, which climbs to
//! 1/4 as `eps` shrinks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{Mode, Scalar, Vector};
use crate::reverses::{self, BoundsPair, Form};
use crate::sampling;
use crate::two_inner::TwoInnerSpace;

/// A concrete input tuple achieving (or approaching) a form's constant.
#[derive(Debug, Clone)]
pub struct ExtremalWitness {
    pub x: Vector,
    pub y: Vector,
    /// The 2-norm-orthonormal companion direction, when the witness came
    /// from the explicit construction rather than random search.
    pub aux: Option<Vector>,
    pub z: Vector,
    pub bounds: BoundsPair,
    pub achieved_ratio: f64,
    pub target_constant: f64,
}

/// Result of the randomized constant search for one form.
#[derive(Debug, Clone)]
pub struct ConstantEstimate {
    pub form: Form,
    pub estimate: f64,
    pub trials: u64,
    pub seed: u64,
    pub best: ExtremalWitness,
}

fn require_dim3(s: &TwoInnerSpace) -> Result<()> {
    if s.dim() < 3 {
        return Err(Error::precondition(format!(
            "extremal constructions need dimension >= 3 (two directions independent of z), got {}",
            s.dim()
        )));
    }
    Ok(())
}

/// Normalize `c1` and the component of `c2` orthogonal to it, all in the
/// seminorm `|.|z|`. Errors on degenerate candidates.
pub(crate) fn orthonormalize(
    s: &TwoInnerSpace,
    z: &Vector,
    c1: &Vector,
    c2: &Vector,
) -> Result<(Vector, Vector)> {
    let scale = s.base().norm(c1)?.max(s.base().norm(c2)?) * s.base().norm(z)?.powi(2);
    let t1 = s.tnorm(c1, z)?;
    if t1 < 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::precondition("degenerate candidate: |c1|z| ~ 0"));
    }
    let y = c1.scale(Scalar::real(1.0 / t1));
    // Remove the (.,y|z)-component; (m,y|z) = 0 follows from |y|z| = 1.
    let coeff = s.tip(c2, &y, z)?;
    let m0 = c2.combine(Scalar::ONE, &y, -coeff);
    let t2 = s.tnorm(&m0, z)?;
    if t2 < 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::precondition(
            "degenerate candidate: residual |c2|z| ~ 0",
        ));
    }
    Ok((y, m0.scale(Scalar::real(1.0 / t2))))
}

pub(crate) fn orthonormal_pair_rng(
    s: &TwoInnerSpace,
    z: &Vector,
    rng: &mut ChaCha12Rng,
) -> Result<(Vector, Vector)> {
    require_dim3(s)?;
    s.base().check_dim(z)?;
    if s.base().norm(z)? == 0.0 {
        return Err(Error::precondition("z must be nonzero"));
    }
    let mut last = None;
    for _ in 0..16 {
        let c1 = sampling::random_vector(rng, s.dim(), s.mode());
        let c2 = sampling::random_vector(rng, s.dim(), s.mode());
        match orthonormalize(s, z, &c1, &c2) {
            Ok(pair) => return Ok(pair),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::precondition("no admissible draw")))
}

/// Draw a pair `(y, m)` with `|y|z| = |m|z| = 1` and `(y,m|z) = 0`.
/// Deterministic under `seed`; redraws degenerate candidates up to 16
/// times before giving up.
pub fn orthonormal_pair(s: &TwoInnerSpace, z: &Vector, seed: u64) -> Result<(Vector, Vector)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    orthonormal_pair_rng(s, z, &mut rng)
}

fn extremal_from_pair(
    s: &TwoInnerSpace,
    z: &Vector,
    b: &BoundsPair,
    y: Vector,
    m: Vector,
    form: Form,
) -> Result<ExtremalWitness> {
    let center = b.center();
    let half_diff = (b.hi() - b.lo()).scale(0.5);
    let x = y.combine(center, &m, half_diff);
    let achieved_ratio = form_ratio(s, form, &x, &y, z, b)?.unwrap_or(0.0);
    Ok(ExtremalWitness {
        x,
        y,
        aux: Some(m),
        z: z.clone(),
        bounds: *b,
        achieved_ratio,
        target_constant: form.target_constant(),
    })
}

/// The equality witness for the refined gap bound:
/// `x = ((a+A)/2) y + ((A-a)/2) m` over an orthonormal pair. Its gap is
/// exactly `|A-a|^2 / 4` and the achieved gap ratio is exactly 1/4.
pub fn extremal_thm21(
    s: &TwoInnerSpace,
    z: &Vector,
    b: &BoundsPair,
    seed: u64,
) -> Result<ExtremalWitness> {
    if b.diff_abs() <= 1e-12 * b.lo().abs().max(b.hi().abs()).max(1.0) {
        return Err(Error::precondition(format!("requires a != A, got {b}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (y, m) = orthonormal_pair_rng(s, z, &mut rng)?;
    extremal_from_pair(s, z, b, y, m, Form::Thm21)
}

/// The defect-form family `A = 1 + sqrt(eps)`, `a = 1 - sqrt(eps)` with
/// `x = y + sqrt(eps) e`; its achieved ratio is `1/(2 (sqrt(1+eps) + 1))`.
pub fn epsilon_family_thm31(
    s: &TwoInnerSpace,
    z: &Vector,
    epsilon: f64,
    seed: u64,
) -> Result<ExtremalWitness> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::precondition(format!(
            "epsilon must lie in the open interval (0,1), got {epsilon}"
        )));
    }
    let root = epsilon.sqrt();
    let b = BoundsPair::from_reals(1.0 - root, 1.0 + root);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (y, e) = orthonormal_pair_rng(s, z, &mut rng)?;
    extremal_from_pair(s, z, &b, y, e, Form::Thm31)
}

/// The ratio of a form's bounded quantity to its constant-free bound
/// factor; the form's printed constant is the supremum of this ratio over
/// admissible inputs. `None` when the factor degenerates.
pub fn form_ratio(
    s: &TwoInnerSpace,
    form: Form,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    b: &BoundsPair,
) -> Result<Option<f64>> {
    if (form.needs_re_prod_positive() && !b.re_prod_positive())
        || (form.needs_real_positive() && !b.is_real_positive())
        || (form.needs_sum_nonzero() && !b.sum_nonzero())
    {
        return Ok(None);
    }
    let ny2 = s.tip(y, y, z)?.re.max(0.0);
    let d2 = b.diff_abs().powi(2);
    let tiny = 1e-280;
    let ratio = match form {
        Form::Gap114 => {
            let denom = d2 * ny2 * ny2;
            if denom < tiny {
                return Ok(None);
            }
            s.cbs_gap_stable(x, y, z)? / denom
        }
        Form::Mult115 => {
            let w = s.tip(x, y, z)?;
            let denom = ((b.hi().conj() + b.lo().conj()) * w).re;
            if denom < tiny {
                return Ok(None);
            }
            let nx = s.tnorm(x, z)?;
            let ny = s.tnorm(y, z)?;
            nx * ny * b.re_prod().sqrt() / denom
        }
        Form::Add116 => {
            let w2 = s.tip(x, y, z)?.abs_sq();
            let denom = d2 * w2;
            if denom < tiny {
                return Ok(None);
            }
            s.cbs_gap_stable(x, y, z)? * b.re_prod() / denom
        }
        Form::Thm21 => {
            // gap + |((a+A)/2)|y|^2 - w|^2 collapses to |x - ((a+A)/2) y|^2 |y|^2.
            let denom = d2 * ny2;
            if denom < tiny {
                return Ok(None);
            }
            let shifted = x.combine(Scalar::ONE, y, -b.center());
            s.tip(&shifted, &shifted, z)?.re.max(0.0) / denom
        }
        Form::Thm22 => {
            // gap + cond |y|^2 collapses to Re[(A|y|^2 - w)(conj(w) - conj(a)|y|^2)].
            let denom = d2 * ny2 * ny2;
            if denom < tiny {
                return Ok(None);
            }
            let w = s.tip(x, y, z)?;
            let p = b.hi().scale(ny2) - w;
            let q = w.conj() - b.lo().conj().scale(ny2);
            (p * q).re / denom
        }
        Form::Thm31 => {
            let denom = d2 * ny2;
            if denom < tiny {
                return Ok(None);
            }
            reverses::cbs_defect(s, x, y, z)? * b.sum_abs() / denom
        }
        Form::Tri311 => {
            let (m, mm) = (b.lo().re, b.hi().re);
            let ny = ny2.sqrt();
            let denom = (mm - m) * ny;
            if denom < tiny {
                return Ok(None);
            }
            let nx = s.tnorm(x, z)?;
            let nxy = s.tnorm(&x.add(y), z)?;
            let total = nx + ny + nxy;
            if total <= 0.0 {
                return Ok(None);
            }
            let w = s.tip(x, y, z)?;
            let excess = 2.0 * (reverses::cbs_defect(s, x, y, z)? + (w.abs() - w.re)) / total;
            excess * (mm + m).sqrt() / denom
        }
        Form::Add313 => {
            let w_abs = s.tip(x, y, z)?.abs();
            let root = b.re_prod().sqrt();
            let denom = d2 * w_abs;
            if denom < tiny {
                return Ok(None);
            }
            reverses::cbs_defect(s, x, y, z)? * (b.sum_abs() + 2.0 * root) * root / denom
        }
        Form::Add314 => {
            let (m, mm) = (b.lo().re, b.hi().re);
            let w_abs = s.tip(x, y, z)?.abs();
            let denom = (mm - m).powi(2) * w_abs;
            if denom < tiny {
                return Ok(None);
            }
            reverses::cbs_defect(s, x, y, z)? * (mm.sqrt() + m.sqrt()).powi(2) * (m * mm).sqrt()
                / denom
        }
        Form::Bnd315 => {
            let (m, mm) = (b.lo().re, b.hi().re);
            let denom = (mm - m).powi(2) * ny2;
            if denom < tiny {
                return Ok(None);
            }
            reverses::cbs_defect(s, x, y, z)? * (mm + m) / denom
        }
    };
    Ok(ratio.is_finite().then_some(ratio))
}

fn witness_bounds_for(form: Form) -> BoundsPair {
    if form.needs_real_positive() || form.needs_re_prod_positive() {
        // Real positive window shrunk toward the ratio's limiting regime.
        BoundsPair::from_reals(1.0 - 1e-3, 1.0 + 1e-3)
    } else {
        BoundsPair::from_reals(0.0, 2.0)
    }
}

struct Candidate {
    ratio: f64,
    x: Vector,
    y: Vector,
    aux: Option<Vector>,
    z: Vector,
    bounds: BoundsPair,
}

/// Multi-start random search for the largest achieved ratio of `form`,
/// seeded with the known extremal witnesses and polished by a
/// coordinate-wise hill climb that stays inside the admissibility ball.
/// Deterministic under `seed`.
pub fn estimate_constant(
    s: &TwoInnerSpace,
    form: Form,
    trials: u64,
    seed: u64,
) -> Result<ConstantEstimate> {
    if trials == 0 {
        return Err(Error::precondition("estimate requires at least one trial"));
    }
    require_dim3(s)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mode = s.mode();
    let dim = s.dim();

    let mut best: Option<Candidate> = None;
    let consider = |cand: Candidate, best: &mut Option<Candidate>| {
        if best.as_ref().is_none_or(|b| cand.ratio > b.ratio) {
            *best = Some(cand);
        }
    };

    // Deterministic witnesses first: the explicit construction at a fixed
    // window and at the shrinking-window family point eps = 1e-6.
    let z0 = sampling::random_vector(&mut rng, dim, mode);
    for b in [witness_bounds_for(form), {
        let r = 1e-6f64.sqrt();
        BoundsPair::from_reals(1.0 - r, 1.0 + r)
    }] {
        if let Ok((y, m)) = orthonormal_pair_rng(s, &z0, &mut rng) {
            let x = y.combine(b.center(), &m, (b.hi() - b.lo()).scale(0.5));
            if let Some(ratio) = form_ratio(s, form, &x, &y, &z0, &b)? {
                consider(
                    Candidate {
                        ratio,
                        x,
                        y,
                        aux: Some(m),
                        z: z0.clone(),
                        bounds: b,
                    },
                    &mut best,
                );
            }
        }
    }

    for _ in 0..trials {
        let b = sampling::random_bounds(&mut rng, mode, form);
        let (x, y, z) = sampling::hypothesis_point(&mut rng, s, &b)?;
        if let Some(ratio) = form_ratio(s, form, &x, &y, &z, &b)? {
            consider(
                Candidate {
                    ratio,
                    x,
                    y,
                    aux: None,
                    z,
                    bounds: b,
                },
                &mut best,
            );
        }
    }

    let mut cand = best.ok_or_else(|| {
        Error::precondition(format!("no admissible sample produced a ratio for {form}"))
    })?;

    // Local refinement: perturb x coordinate-wise, accept only admissible
    // improvements, halve the step after a sweep without progress.
    let entry_scale = cand
        .x
        .entries()
        .iter()
        .map(|e| e.abs())
        .fold(0.0, f64::max)
        .max(1e-6);
    let mut step = 0.1 * entry_scale;
    for _ in 0..32 {
        let mut improved = false;
        for i in 0..dim {
            let comps: &[Scalar] = match mode {
                Mode::Real => &[Scalar { re: 1.0, im: 0.0 }],
                Mode::Complex => &[Scalar { re: 1.0, im: 0.0 }, Scalar { re: 0.0, im: 1.0 }],
            };
            for &dir in comps {
                for sgn in [1.0, -1.0] {
                    let mut entries = cand.x.entries().to_vec();
                    entries[i] = entries[i] + dir.scale(sgn * step);
                    let x_new = Vector::new(entries).expect("dim unchanged");
                    let cond = reverses::cond_quadratic(s, &x_new, &cand.y, &cand.z, &cand.bounds)?;
                    if cond < 0.0 {
                        continue;
                    }
                    if let Some(r) = form_ratio(s, form, &x_new, &cand.y, &cand.z, &cand.bounds)? {
                        if r > cand.ratio {
                            cand.ratio = r;
                            cand.x = x_new;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(ConstantEstimate {
        form,
        estimate: cand.ratio,
        trials,
        seed,
        best: ExtremalWitness {
            x: cand.x,
            y: cand.y,
            aux: cand.aux,
            z: cand.z,
            bounds: cand.bounds,
            achieved_ratio: cand.ratio,
            target_constant: form.target_constant(),
        },
    })
}

/// The closed-form family ratio `1 / (2 (sqrt(1+eps) + 1))`.
pub fn epsilon_family_formula(epsilon: f64) -> f64 {
    1.0 / (2.0 * ((1.0 + epsilon).sqrt() + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reverses::{evaluate, Verdict};
    use crate::DEFAULT_TOL;

    fn space(dim: usize, mode: Mode) -> TwoInnerSpace {
        TwoInnerSpace::unit(dim, mode).unwrap()
    }

    #[test]
    fn orthonormal_pair_postconditions() {
        let s = space(3, Mode::Real);
        let z = Vector::basis(3, 2).unwrap();
        let (y, m) = orthonormal_pair(&s, &z, 42).unwrap();
        assert!((s.tnorm(&y, &z).unwrap() - 1.0).abs() < 1e-10);
        assert!((s.tnorm(&m, &z).unwrap() - 1.0).abs() < 1e-10);
        assert!(s.tip(&y, &m, &z).unwrap().abs() < 1e-10);
    }

    #[test]
    fn orthonormalize_keeps_already_orthonormal_candidates() {
        let s = space(3, Mode::Real);
        let z = Vector::basis(3, 2).unwrap();
        let e1 = Vector::basis(3, 0).unwrap();
        let e2 = Vector::basis(3, 1).unwrap();
        let (y, m) = orthonormalize(&s, &z, &e1, &e2).unwrap();
        assert_eq!(y, e1);
        assert_eq!(m, e2);
    }

    #[test]
    fn orthonormal_pair_needs_dim3() {
        let s = space(2, Mode::Real);
        let z = Vector::basis(2, 1).unwrap();
        assert!(matches!(
            orthonormal_pair(&s, &z, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn extremal_thm21_real_hand_case() {
        let s = space(3, Mode::Real);
        let z = Vector::basis(3, 2).unwrap();
        let b = BoundsPair::from_reals(0.0, 2.0);
        let w = extremal_thm21(&s, &z, &b, 7).unwrap();
        assert!((w.achieved_ratio - 0.25).abs() < 1e-12);
        let gap = s.cbs_gap(&w.x, &w.y, &w.z).unwrap();
        assert!((gap - 1.0).abs() < 1e-10, "gap {gap}");
        let r = evaluate(&s, Form::Thm21, &w.x, &w.y, &w.z, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.condition_value.abs() < 1e-10);
        // the refinement's correction term vanishes: chain[1] == chain[2]
        assert!((r.chain[1].value - r.chain[2].value).abs() < 1e-10);
    }

    #[test]
    fn extremal_thm21_complex_scalars() {
        let s = space(4, Mode::Complex);
        let z = Vector::basis(4, 3).unwrap();
        let b = BoundsPair::new(Scalar::real(1.0), Scalar::new(1.0, 2.0));
        let w = extremal_thm21(&s, &z, &b, 3).unwrap();
        assert!((w.achieved_ratio - 0.25).abs() < 1e-9);
    }

    #[test]
    fn extremal_thm21_rejects_equal_scalars() {
        let s = space(3, Mode::Real);
        let z = Vector::basis(3, 2).unwrap();
        let b = BoundsPair::from_reals(1.0, 1.0);
        assert!(extremal_thm21(&s, &z, &b, 1).is_err());
    }

    #[test]
    fn epsilon_family_matches_formula() {
        let s = space(3, Mode::Real);
        let z = Vector::basis(3, 2).unwrap();
        for (eps, digits) in [(0.01, 1e-9), (1.0 - 1e-9, 1e-9)] {
            let w = epsilon_family_thm31(&s, &z, eps, 5).unwrap();
            let expect = epsilon_family_formula(eps);
            assert!(
                (w.achieved_ratio - expect).abs() < digits,
                "eps {eps}: ratio {} vs {expect}",
                w.achieved_ratio
            );
        }
        // spot values
        assert!((epsilon_family_formula(1.0) - 0.20710678).abs() < 1e-7);
        assert!((epsilon_family_formula(0.01) - 0.24937810).abs() < 1e-7);
    }

    #[test]
    fn epsilon_family_rejects_boundary() {
        let s = space(3, Mode::Real);
        let z = Vector::basis(3, 2).unwrap();
        assert!(epsilon_family_thm31(&s, &z, 0.0, 1).is_err());
        assert!(epsilon_family_thm31(&s, &z, 1.0, 1).is_err());
    }

    #[test]
    fn epsilon_family_ratios_decrease_with_eps() {
        let s = space(4, Mode::Real);
        let z = Vector::basis(4, 0).unwrap();
        let grid = [1e-6, 1e-4, 1e-2, 0.1, 0.5];
        let ratios: Vec<f64> = grid
            .iter()
            .map(|&e| epsilon_family_thm31(&s, &z, e, 9).unwrap().achieved_ratio)
            .collect();
        for pair in ratios.windows(2) {
            assert!(pair[0] > pair[1], "ratios not decreasing: {ratios:?}");
        }
    }

    #[test]
    fn estimate_constant_thm21_hits_quarter() {
        let s = space(4, Mode::Real);
        let est = estimate_constant(&s, Form::Thm21, 200, 42).unwrap();
        assert!(
            (est.estimate - 0.25).abs() < 1e-9,
            "estimate {}",
            est.estimate
        );
    }

    #[test]
    fn estimate_stays_below_target_for_every_form() {
        let s = space(4, Mode::Real);
        for form in Form::ALL {
            let est = estimate_constant(&s, form, 100, 11).unwrap();
            assert!(
                est.estimate <= form.target_constant() + DEFAULT_TOL,
                "form {form}: estimate {} exceeds {}",
                est.estimate,
                form.target_constant()
            );
        }
    }

    #[test]
    fn estimates_approach_the_sharp_constants() {
        // The included witnesses carry each sharp form close to its
        // constant even with few random trials.
        let s = space(4, Mode::Real);
        for (form, floor) in [
            (Form::Thm21, 0.25 - 1e-9),
            (Form::Thm22, 0.25 - 1e-9),
            (Form::Gap114, 0.25 - 1e-9),
            (Form::Thm31, 0.2499),
            (Form::Mult115, 0.499),
            (Form::Add116, 0.2499),
            (Form::Add313, 0.499),
            (Form::Add314, 0.499),
            (Form::Bnd315, 0.2499),
        ] {
            let est = estimate_constant(&s, form, 50, 21).unwrap();
            assert!(
                est.estimate >= floor,
                "form {form}: estimate {} below {floor}",
                est.estimate
            );
        }
    }

    #[test]
    fn estimate_single_trial_keeps_witness_ratio() {
        let s = space(3, Mode::Real);
        let est = estimate_constant(&s, Form::Thm21, 1, 2).unwrap();
        assert!((est.estimate - 0.25).abs() < 1e-9);
        assert!(est.best.aux.is_some() || est.best.achieved_ratio <= 0.25);
    }

    #[test]
    fn estimate_requires_dim3_and_trials() {
        let s2 = space(2, Mode::Real);
        assert!(estimate_constant(&s2, Form::Thm21, 10, 1).is_err());
        let s3 = space(3, Mode::Real);
        assert!(estimate_constant(&s3, Form::Thm21, 0, 1).is_err());
    }
}
