//! Localization conditions, exact identities, and term-by-term evaluation
//! of every reverse bound chain for the CBS inequality.
//!
//! All chains share one hypothesis: `x` lies in the 2-norm ball of center
//! `((a+A)/2) y` and radius `(1/2)|A-a| |y|z|`, equivalently
//! `Re(Ay-x, x-ay|z) >= 0`. Under it the CBS gap (or defect, or triangle
//! excess) is bounded above by a closed-form expression in `a`, `A` and the
//! 2-norms; each form's chain lists the members of the corresponding
//! inequality in source order and the verdict checks the valid orderings
//! with a relative tolerance.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Scalar, Vector};
use crate::two_inner::TwoInnerSpace;

/// The reverse-bound forms. Codes double as CLI values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    Gap114,
    Mult115,
    Add116,
    Thm21,
    Thm22,
    Thm31,
    Tri311,
    Add313,
    Add314,
    Bnd315,
}

impl Form {
    pub const ALL: [Form; 10] = [
        Form::Gap114,
        Form::Mult115,
        Form::Add116,
        Form::Thm21,
        Form::Thm22,
        Form::Thm31,
        Form::Tri311,
        Form::Add313,
        Form::Add314,
        Form::Bnd315,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            Form::Gap114 => "gap114",
            Form::Mult115 => "mult115",
            Form::Add116 => "add116",
            Form::Thm21 => "thm21",
            Form::Thm22 => "thm22",
            Form::Thm31 => "thm31",
            Form::Tri311 => "tri311",
            Form::Add313 => "add313",
            Form::Add314 => "add314",
            Form::Bnd315 => "bnd315",
        }
    }

    pub fn from_code(code: &str) -> Option<Form> {
        Form::ALL.iter().copied().find(|f| f.code() == code)
    }

    /// The constant printed in the final bound of this form.
    pub fn target_constant(&self) -> f64 {
        match self {
            Form::Gap114
            | Form::Add116
            | Form::Thm21
            | Form::Thm22
            | Form::Thm31
            | Form::Bnd315 => 0.25,
            Form::Mult115 | Form::Tri311 | Form::Add313 | Form::Add314 => 0.5,
        }
    }

    /// Whether the form needs `a, A` real with `0 < a < A`.
    pub fn needs_real_positive(&self) -> bool {
        matches!(self, Form::Tri311 | Form::Add314 | Form::Bnd315)
    }

    /// Whether the form needs `Re(conj(a) A) > 0`.
    pub fn needs_re_prod_positive(&self) -> bool {
        matches!(self, Form::Mult115 | Form::Add116 | Form::Add313)
    }

    /// Whether the form needs `A != -a`.
    pub fn needs_sum_nonzero(&self) -> bool {
        matches!(self, Form::Thm31)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// The localization scalars `a` (lower) and `A` (upper).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsPair {
    lo: Scalar,
    hi: Scalar,
}

impl BoundsPair {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        BoundsPair { lo, hi }
    }

    pub fn from_reals(lo: f64, hi: f64) -> Self {
        BoundsPair::new(Scalar::real(lo), Scalar::real(hi))
    }

    pub fn lo(&self) -> Scalar {
        self.lo
    }

    pub fn hi(&self) -> Scalar {
        self.hi
    }

    /// `(a + A) / 2`.
    pub fn center(&self) -> Scalar {
        (self.lo + self.hi).scale(0.5)
    }

    /// `|A - a|`.
    pub fn diff_abs(&self) -> f64 {
        (self.hi - self.lo).abs()
    }

    /// `|A + a|`.
    pub fn sum_abs(&self) -> f64 {
        (self.hi + self.lo).abs()
    }

    /// `Re(conj(a) A)`.
    pub fn re_prod(&self) -> f64 {
        (self.lo.conj() * self.hi).re
    }

    /// Both scalars real with `0 < a < A`.
    pub fn is_real_positive(&self) -> bool {
        self.lo.is_real() && self.hi.is_real() && self.lo.re > 0.0 && self.hi.re > self.lo.re
    }

    /// `A != -a`, with a relative threshold so sgn((a+A)/2) stays defined.
    pub fn sum_nonzero(&self) -> bool {
        self.sum_abs() > 1e-12 * self.lo.abs().max(self.hi.abs()).max(1.0)
    }

    /// `Re(conj(a) A) > 0`.
    pub fn re_prod_positive(&self) -> bool {
        self.re_prod() > 0.0
    }
}

impl fmt::Display for BoundsPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a = {}, A = {}", self.lo, self.hi)
    }
}

/// One labeled member of a bound chain.
#[derive(Debug, Clone)]
pub struct ChainEntry {
    pub label: &'static str,
    pub value: f64,
}

/// One asserted ordering between chain members, as a nonnegative-up-to-tol
/// difference.
#[derive(Debug, Clone)]
pub struct Slack {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    HypothesisUnmet,
}

impl Verdict {
    pub fn code(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::HypothesisUnmet => "hypothesis_unmet",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// A bound chain evaluated term by term, with condition diagnostics.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub form: Form,
    /// Value of the quadratic hypothesis `Re(Ay-x, x-ay|z)`.
    pub condition_value: f64,
    /// Gross magnitude against which the condition sign is judged.
    pub condition_scale: f64,
    pub chain: Vec<ChainEntry>,
    pub slacks: Vec<Slack>,
    /// Gross magnitude against which slacks are judged.
    pub scale: f64,
    pub verdict: Verdict,
}

impl InequalityReport {
    pub fn min_slack(&self) -> f64 {
        self.slacks
            .iter()
            .map(|s| s.value)
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_dims(s: &TwoInnerSpace, x: &Vector, y: &Vector, z: &Vector) -> Result<()> {
    s.base().check_dim(x)?;
    s.base().check_dim(y)?;
    s.base().check_dim(z)?;
    Ok(())
}

/// The quadratic hypothesis `Re(Ay-x, x-ay|z)`; nonnegative exactly when
/// the localization holds.
pub fn cond_quadratic(
    s: &TwoInnerSpace,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    b: &BoundsPair,
) -> Result<f64> {
    check_dims(s, x, y, z)?;
    let left = y.combine(b.hi(), x, Scalar::real(-1.0));
    let right = x.combine(Scalar::ONE, y, -b.lo());
    Ok(s.tip(&left, &right, z)?.re)
}

/// Gross magnitude of the quadratic-hypothesis value, for sign dead bands.
pub fn condition_scale(
    s: &TwoInnerSpace,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    b: &BoundsPair,
) -> Result<f64> {
    let nx = s.tnorm(x, z)?;
    let ny = s.tnorm(y, z)?;
    Ok(((b.hi().abs() * ny + nx) * (nx + b.lo().abs() * ny)).max(1.0))
}

/// The ball form of the hypothesis:
/// `(1/2)|A-a| |y|z| - |x - ((a+A)/2) y | z|`; nonnegative exactly when the
/// localization holds.
pub fn cond_ball(
    s: &TwoInnerSpace,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    b: &BoundsPair,
) -> Result<f64> {
    check_dims(s, x, y, z)?;
    let ny = s.tnorm(y, z)?;
    let shifted = x.combine(Scalar::ONE, y, -b.center());
    Ok(0.5 * b.diff_abs() * ny - s.tnorm(&shifted, z)?)
}

/// Both sides of the gap identity
/// `|x|^2 |y|^2 - |(x,y|z)|^2 = |x - ly|^2 |y|^2 - |l |y|^2 - (x,y|z)|^2`,
/// valid for every scalar `l`.
pub fn identity_26(
    s: &TwoInnerSpace,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    lambda: Scalar,
) -> Result<(f64, f64)> {
    check_dims(s, x, y, z)?;
    let nx2 = s.tip(x, x, z)?.re;
    let ny2 = s.tip(y, y, z)?.re;
    let w = s.tip(x, y, z)?;
    let lhs = nx2 * ny2 - w.abs_sq();
    let shifted = x.combine(Scalar::ONE, y, -lambda);
    let ns2 = s.tip(&shifted, &shifted, z)?.re;
    let rhs = ns2 * ny2 - (lambda.scale(ny2) - w).abs_sq();
    Ok((lhs, rhs))
}

/// Both sides of the gap identity
/// `gap = Re[(A|y|^2 - w)(conj(w) - conj(a)|y|^2)] - |y|^2 Re(Ay-x,x-ay|z)`.
pub fn identity_29(
    s: &TwoInnerSpace,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    b: &BoundsPair,
) -> Result<(f64, f64)> {
    check_dims(s, x, y, z)?;
    let nx2 = s.tip(x, x, z)?.re;
    let ny2 = s.tip(y, y, z)?.re;
    let w = s.tip(x, y, z)?;
    let lhs = nx2 * ny2 - w.abs_sq();
    let p = b.hi().scale(ny2) - w;
    let q = w.conj() - b.lo().conj().scale(ny2);
    let rhs = (p * q).re - ny2 * cond_quadratic(s, x, y, z, b)?;
    Ok((lhs, rhs))
}

/// `|x|z| |y|z| - |(x,y|z)|`, evaluated through the stable gap so the value
/// survives near-equality inputs.
pub fn cbs_defect(s: &TwoInnerSpace, x: &Vector, y: &Vector, z: &Vector) -> Result<f64> {
    let nx = s.tnorm(x, z)?;
    let ny = s.tnorm(y, z)?;
    let w_abs = s.tip(x, y, z)?.abs();
    let denom = nx * ny + w_abs;
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok(s.cbs_gap_stable(x, y, z)? / denom)
}

struct Quantities {
    nx: f64,
    ny: f64,
    nx2: f64,
    ny2: f64,
    w: Scalar,
    gap: f64,
    defect: f64,
    cond: f64,
    cond_scale: f64,
}

fn quantities(
    s: &TwoInnerSpace,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    b: &BoundsPair,
) -> Result<Quantities> {
    let nx2 = s.tip(x, x, z)?.re.max(0.0);
    let ny2 = s.tip(y, y, z)?.re.max(0.0);
    let (nx, ny) = (nx2.sqrt(), ny2.sqrt());
    let w = s.tip(x, y, z)?;
    let gap = s.cbs_gap_stable(x, y, z)?;
    let denom = nx * ny + w.abs();
    let defect = if denom > 0.0 { gap / denom } else { 0.0 };
    let cond = cond_quadratic(s, x, y, z, b)?;
    let cond_scale = ((b.hi().abs() * ny + nx) * (nx + b.lo().abs() * ny)).max(1.0);
    Ok(Quantities {
        nx,
        ny,
        nx2,
        ny2,
        w,
        gap,
        defect,
        cond,
        cond_scale,
    })
}

const GAP_LABEL: &str = "||x|z||^2 ||y|z||^2 - |(x,y|z)|^2";
const DEFECT_LABEL: &str = "||x|z|| ||y|z|| - |(x,y|z)|";

fn consecutive_slacks(chain: &[ChainEntry]) -> Vec<Slack> {
    chain
        .windows(2)
        .enumerate()
        .map(|(i, pair)| Slack {
            label: format!("chain[{}] - chain[{}]", i + 1, i),
            value: pair[1].value - pair[0].value,
        })
        .collect()
}

/// Evaluate one reverse form on `(x, y, z)` with scalars `b`.
///
/// Scalar preconditions error out; an unmet localization hypothesis is a
/// verdict, not an error, and the chain is still filled for inspection.
pub fn evaluate(
    s: &TwoInnerSpace,
    form: Form,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    b: &BoundsPair,
    tol: f64,
) -> Result<InequalityReport> {
    check_dims(s, x, y, z)?;
    if form.needs_re_prod_positive() && !b.re_prod_positive() {
        return Err(Error::precondition(format!(
            "form {form} requires Re(conj(a) A) > 0, got {} with {b}",
            b.re_prod()
        )));
    }
    if form.needs_real_positive() && !b.is_real_positive() {
        return Err(Error::precondition(format!(
            "form {form} requires real scalars 0 < m < M, got {b}"
        )));
    }
    if form.needs_sum_nonzero() && !b.sum_nonzero() {
        return Err(Error::precondition(format!(
            "form {form} requires A != -a, got {b}"
        )));
    }

    let q = quantities(s, x, y, z, b)?;
    let d2 = b.diff_abs().powi(2);
    let gross_pair = q.nx2 * q.ny2 + q.w.abs_sq();

    let (chain, slacks, scale): (Vec<ChainEntry>, Option<Vec<Slack>>, f64) = match form {
        Form::Gap114 => {
            let bound = 0.25 * d2 * q.ny2 * q.ny2;
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: GAP_LABEL,
                    value: q.gap,
                },
                ChainEntry {
                    label: "(1/4)|A-a|^2 ||y|z||^4",
                    value: bound,
                },
            ];
            let scale = gross_pair.max(bound).max(1.0);
            (chain, None, scale)
        }
        Form::Mult115 => {
            let root = b.re_prod().sqrt();
            let m1 = 0.5 * ((b.hi().conj() + b.lo().conj()) * q.w).re / root;
            let m2 = 0.5 * b.sum_abs() * q.w.abs() / root;
            let chain = vec![
                ChainEntry {
                    label: "||x|z|| ||y|z||",
                    value: q.nx * q.ny,
                },
                ChainEntry {
                    label: "(1/2) Re[(conj(A)+conj(a))(x,y|z)] / sqrt(Re(conj(a)A))",
                    value: m1,
                },
                ChainEntry {
                    label: "(1/2) |A+a| |(x,y|z)| / sqrt(Re(conj(a)A))",
                    value: m2,
                },
            ];
            let scale = (q.nx * q.ny).max(m1.abs()).max(m2.abs()).max(1.0);
            (chain, None, scale)
        }
        Form::Add116 => {
            let bound = 0.25 * d2 / b.re_prod() * q.w.abs_sq();
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: GAP_LABEL,
                    value: q.gap,
                },
                ChainEntry {
                    label: "(1/4) |A-a|^2 / Re(conj(a)A) * |(x,y|z)|^2",
                    value: bound,
                },
            ];
            let scale = gross_pair.max(bound).max(1.0);
            (chain, None, scale)
        }
        Form::Thm21 => {
            let final_bound = 0.25 * d2 * q.ny2 * q.ny2;
            let corr = (b.center().scale(q.ny2) - q.w).abs_sq();
            let refined = final_bound - corr;
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: GAP_LABEL,
                    value: q.gap,
                },
                ChainEntry {
                    label: "(1/4)|A-a|^2 ||y|z||^4 - |((a+A)/2)||y|z||^2 - (x,y|z)|^2",
                    value: refined,
                },
                ChainEntry {
                    label: "(1/4)|A-a|^2 ||y|z||^4",
                    value: final_bound,
                },
            ];
            let scale = gross_pair.max(final_bound).max(corr).max(1.0);
            (chain, None, scale)
        }
        Form::Thm22 => {
            let final_bound = 0.25 * d2 * q.ny2 * q.ny2;
            let refined = final_bound - q.cond * q.ny2;
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: GAP_LABEL,
                    value: q.gap,
                },
                ChainEntry {
                    label: "(1/4)|A-a|^2 ||y|z||^4 - Re(Ay-x,x-ay|z) ||y|z||^2",
                    value: refined,
                },
                ChainEntry {
                    label: "(1/4)|A-a|^2 ||y|z||^4",
                    value: final_bound,
                },
            ];
            let scale = gross_pair
                .max(final_bound)
                .max((q.cond * q.ny2).abs())
                .max(1.0);
            (chain, None, scale)
        }
        Form::Thm31 => {
            // The sign factor enters conjugated: expanding the ball form of
            // the hypothesis produces Re[conj((a+A)/2) (x,y|z)], and only
            // that orientation keeps the first member bounded by the third.
            let sgn = b.center().sgn().conj();
            // t1 = t2 + (|w| - Re[sgn w]); both correction terms nonnegative.
            let t2 = q.defect;
            let t1 = t2 + (q.w.abs() - (sgn * q.w).re);
            let t3 = 0.25 * d2 / b.sum_abs() * q.ny2;
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: "||x|z|| ||y|z|| - Re[conj(sgn((a+A)/2))(x,y|z)]",
                    value: t1,
                },
                ChainEntry {
                    label: DEFECT_LABEL,
                    value: t2,
                },
                ChainEntry {
                    label: "(1/4)|A-a|^2/|A+a| ||y|z||^2",
                    value: t3,
                },
            ];
            // The printed source order of the middle two members has the
            // inequality direction reversed; the valid orderings are listed
            // explicitly instead of consecutive differences.
            let slacks = vec![
                Slack {
                    label: "chain[1] - chain[0]".into(),
                    value: t1,
                },
                Slack {
                    label: "chain[2] - chain[0]".into(),
                    value: t2,
                },
                Slack {
                    label: "chain[1] - chain[2]".into(),
                    value: t1 - t2,
                },
                Slack {
                    label: "chain[3] - chain[1]".into(),
                    value: t3 - t1,
                },
                Slack {
                    label: "chain[3] - chain[2]".into(),
                    value: t3 - t2,
                },
            ];
            let scale = (q.nx * q.ny + q.w.abs()).max(t3).max(1.0);
            (chain, Some(slacks), scale)
        }
        Form::Tri311 => {
            let (m, mm) = (b.lo().re, b.hi().re);
            let sum = x.add(y);
            let nxy = s.tnorm(&sum, z)?;
            let denom = q.nx + q.ny + nxy;
            // (|x| + |y|)^2 - |x+y|^2 = 2 (|x||y| - Re(x,y|z))
            let excess = if denom > 0.0 {
                2.0 * (q.defect + (q.w.abs() - q.w.re)) / denom
            } else {
                0.0
            };
            let bound = 0.5 * (mm - m) / (mm + m).sqrt() * q.ny;
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: "||x|z|| + ||y|z|| - ||x+y|z||",
                    value: excess,
                },
                ChainEntry {
                    label: "(1/2)(M-m)/sqrt(M+m) ||y|z||",
                    value: bound,
                },
            ];
            let scale = (q.nx + q.ny + nxy).max(bound).max(1.0);
            (chain, None, scale)
        }
        Form::Add313 => {
            let root = b.re_prod().sqrt();
            // |A+a| - 2 sqrt(Re(conj(a)A)) = |A-a|^2 / (|A+a| + 2 sqrt(..))
            let factor = d2 / ((b.sum_abs() + 2.0 * root) * root);
            let bound = 0.5 * factor * q.w.abs();
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: DEFECT_LABEL,
                    value: q.defect,
                },
                ChainEntry {
                    label: "(1/2)(|A+a| - 2 sqrt(Re(conj(a)A)))/sqrt(Re(conj(a)A)) |(x,y|z)|",
                    value: bound,
                },
            ];
            let scale = (q.nx * q.ny + q.w.abs()).max(bound).max(1.0);
            (chain, None, scale)
        }
        Form::Add314 => {
            let (m, mm) = (b.lo().re, b.hi().re);
            // (sqrt(M) - sqrt(m))^2 = (M - m)^2 / (sqrt(M) + sqrt(m))^2
            let factor = (mm - m).powi(2) / ((mm.sqrt() + m.sqrt()).powi(2) * (m * mm).sqrt());
            let bound = 0.5 * factor * q.w.abs();
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: DEFECT_LABEL,
                    value: q.defect,
                },
                ChainEntry {
                    label: "(1/2)(sqrt(M)-sqrt(m))^2/sqrt(mM) |(x,y|z)|",
                    value: bound,
                },
            ];
            let scale = (q.nx * q.ny + q.w.abs()).max(bound).max(1.0);
            (chain, None, scale)
        }
        Form::Bnd315 => {
            let (m, mm) = (b.lo().re, b.hi().re);
            let bound = 0.25 * (mm - m).powi(2) / (mm + m) * q.ny2;
            let chain = vec![
                ChainEntry {
                    label: "0",
                    value: 0.0,
                },
                ChainEntry {
                    label: DEFECT_LABEL,
                    value: q.defect,
                },
                ChainEntry {
                    label: "(1/4)(M-m)^2/(M+m) ||y|z||^2",
                    value: bound,
                },
            ];
            let scale = (q.nx * q.ny + q.w.abs()).max(bound).max(1.0);
            (chain, None, scale)
        }
    };

    let slacks = slacks.unwrap_or_else(|| consecutive_slacks(&chain));
    let verdict = if q.cond < -tol * q.cond_scale {
        Verdict::HypothesisUnmet
    } else if slacks.iter().any(|sl| sl.value < -tol * scale) {
        Verdict::Violated
    } else {
        Verdict::Holds
    };

    Ok(InequalityReport {
        form,
        condition_value: q.cond,
        condition_scale: q.cond_scale,
        chain,
        slacks,
        scale,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mode;
    use crate::sampling;
    use crate::DEFAULT_TOL;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rvec(entries: &[f64]) -> Vector {
        Vector::from_reals(entries).unwrap()
    }

    fn unit3() -> TwoInnerSpace {
        TwoInnerSpace::unit(3, Mode::Real).unwrap()
    }

    #[test]
    fn cond_quadratic_at_center() {
        // x = ((a+A)/2) y gives |A-a|^2 |y|z|^2 / 4.
        let s = unit3();
        let y = rvec(&[1.0, 2.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(-1.0, 3.0);
        let x = y.scale(b.center());
        let cond = cond_quadratic(&s, &x, &y, &z, &b).unwrap();
        let expect = b.diff_abs().powi(2) * s.tnorm(&y, &z).unwrap().powi(2) / 4.0;
        assert!((cond - expect).abs() < 1e-12 * expect.max(1.0));
        assert!(cond >= 0.0);
    }

    #[test]
    fn cond_quadratic_far_outside_ball_is_negative() {
        let s = unit3();
        let y = rvec(&[1.0, 0.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(0.0, 2.0);
        let x = y.scale(b.hi().scale(10.0));
        assert!(cond_quadratic(&s, &x, &y, &z, &b).unwrap() < 0.0);
    }

    #[test]
    fn cond_ball_at_center_and_degenerate() {
        let s = unit3();
        let y = rvec(&[1.0, 0.5, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(0.0, 2.0);
        let x = y.scale(b.center());
        let v = cond_ball(&s, &x, &y, &z, &b).unwrap();
        let expect = 0.5 * b.diff_abs() * s.tnorm(&y, &z).unwrap();
        assert!((v - expect).abs() < 1e-12);

        let b_deg = BoundsPair::from_reals(1.5, 1.5);
        let x_deg = y.scale(b_deg.lo());
        let v_deg = cond_ball(&s, &x_deg, &y, &z, &b_deg).unwrap();
        assert!(v_deg.abs() < 1e-12);
    }

    #[test]
    fn ball_and_quadratic_conditions_agree_in_sign() {
        let s = TwoInnerSpace::unit(4, Mode::Complex).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let mut checked = 0;
        for _ in 0..500 {
            let [x, y, z] = sampling::random_triple(&mut rng, 4, Mode::Complex);
            let b = sampling::random_bounds(&mut rng, Mode::Complex, Form::Thm21);
            let quad = cond_quadratic(&s, &x, &y, &z, &b).unwrap();
            let ball = cond_ball(&s, &x, &y, &z, &b).unwrap();
            let qs = condition_scale(&s, &x, &y, &z, &b).unwrap();
            let bs = qs.sqrt();
            if quad.abs() <= 1e-10 * qs || ball.abs() <= 1e-10 * bs {
                continue;
            }
            checked += 1;
            assert_eq!(quad > 0.0, ball > 0.0, "quad {quad} vs ball {ball}");
        }
        assert!(
            checked > 300,
            "dead band swallowed too many cases: {checked}"
        );
    }

    #[test]
    fn identity_26_at_lambda_zero_and_seeded() {
        let s = TwoInnerSpace::unit(5, Mode::Complex).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let [x, y, z] = sampling::random_triple(&mut rng, 5, Mode::Complex);
        let (lhs, rhs) = identity_26(&s, &x, &y, &z, Scalar::ZERO).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));

        for _ in 0..200 {
            let [x, y, z] = sampling::random_triple(&mut rng, 5, Mode::Complex);
            let lambda = sampling::random_scalar(&mut rng, Mode::Complex);
            let (lhs, rhs) = identity_26(&s, &x, &y, &z, lambda).unwrap();
            let nx2 = s.tip(&x, &x, &z).unwrap().re;
            let ny2 = s.tip(&y, &y, &z).unwrap().re;
            let scale = (nx2 * ny2).max(lambda.abs_sq() * ny2 * ny2).max(1.0);
            assert!((lhs - rhs).abs() <= 1e-10 * scale, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn identity_26_projection_coefficient_kills_second_term() {
        let s = TwoInnerSpace::unit(4, Mode::Real).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let [x, y, z] = sampling::random_triple(&mut rng, 4, Mode::Real);
        let ny2 = s.tip(&y, &y, &z).unwrap().re;
        let w = s.tip(&x, &y, &z).unwrap();
        let lambda = w.div_real(ny2);
        let leftover = (lambda.scale(ny2) - w).abs();
        assert!(leftover <= 1e-12 * w.abs().max(1.0));
        let (lhs, rhs) = identity_26(&s, &x, &y, &z, lambda).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn identity_29_degenerate_pair_and_seeded() {
        let s = TwoInnerSpace::unit(4, Mode::Complex).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        // a = A still an identity
        let a = sampling::random_scalar(&mut rng, Mode::Complex);
        let b = BoundsPair::new(a, a);
        let [x, y, z] = sampling::random_triple(&mut rng, 4, Mode::Complex);
        let (lhs, rhs) = identity_29(&s, &x, &y, &z, &b).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));

        for _ in 0..200 {
            let [x, y, z] = sampling::random_triple(&mut rng, 4, Mode::Complex);
            let b = sampling::random_bounds(&mut rng, Mode::Complex, Form::Thm21);
            let (lhs, rhs) = identity_29(&s, &x, &y, &z, &b).unwrap();
            let ny2 = s.tip(&y, &y, &z).unwrap().re;
            let nx2 = s.tip(&x, &x, &z).unwrap().re;
            let gross = (nx2 * ny2)
                .max(b.hi().abs_sq() * ny2 * ny2)
                .max(b.lo().abs_sq() * ny2 * ny2)
                .max(1.0);
            assert!((lhs - rhs).abs() <= 1e-10 * gross, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn identity_29_at_the_equality_witness() {
        // z = e3, y = e1, x = y + m with m = e2, a = 0, A = 2: both routes
        // give exactly 1.
        let s = unit3();
        let y = rvec(&[1.0, 0.0, 0.0]);
        let m = rvec(&[0.0, 1.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(0.0, 2.0);
        let x = y.combine(b.center(), &m, (b.hi() - b.lo()).scale(0.5));
        let (lhs, rhs) = identity_29(&s, &x, &y, &z, &b).unwrap();
        assert!((lhs - 1.0).abs() < 1e-12);
        assert!((rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thm21_hand_chain() {
        // Unit weights, z = e3, y = e1, x = (1,1,0), a = 0, A = 2:
        // chain [0, 1, 1, 1], exact equality case of the refinement.
        let s = unit3();
        let x = rvec(&[1.0, 1.0, 0.0]);
        let y = rvec(&[1.0, 0.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(0.0, 2.0);
        let r = evaluate(&s, Form::Thm21, &x, &y, &z, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let values: Vec<f64> = r.chain.iter().map(|c| c.value).collect();
        assert_eq!(values.len(), 4);
        assert!(values[0] == 0.0);
        for (v, expect) in values[1..].iter().zip([1.0, 1.0, 1.0]) {
            assert!((v - expect).abs() < 1e-12, "chain {values:?}");
        }
        assert!(r.condition_value.abs() < 1e-12);
    }

    #[test]
    fn thm31_hand_chain() {
        let s = unit3();
        let x = rvec(&[1.0, 1.0, 0.0]);
        let y = rvec(&[1.0, 0.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(0.0, 2.0);
        let r = evaluate(&s, Form::Thm31, &x, &y, &z, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let defect = r.chain[2].value;
        assert!((defect - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((r.chain[3].value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tri311_hand_chain() {
        // z = e3, y = e1, x = (2,1,0), m = 1, M = 3:
        // lhs = sqrt(5) + 1 - sqrt(10), bound = 1/2 * 2 / sqrt(4) = 0.5.
        let s = unit3();
        let x = rvec(&[2.0, 1.0, 0.0]);
        let y = rvec(&[1.0, 0.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(1.0, 3.0);
        let r = evaluate(&s, Form::Tri311, &x, &y, &z, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let expect = 5f64.sqrt() + 1.0 - 10f64.sqrt();
        assert!((r.chain[1].value - expect).abs() < 1e-12);
        assert!((r.chain[2].value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn add314_hand_chain() {
        let s = unit3();
        let x = rvec(&[2.0, 1.0, 0.0]);
        let y = rvec(&[1.0, 0.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(1.0, 3.0);
        let r = evaluate(&s, Form::Add314, &x, &y, &z, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let lhs = 5f64.sqrt() - 2.0;
        let bound = 0.5 * (3f64.sqrt() - 1.0).powi(2) / 3f64.sqrt() * 2.0;
        assert!((r.chain[1].value - lhs).abs() < 1e-12);
        assert!((r.chain[2].value - bound).abs() < 1e-12);
    }

    #[test]
    fn gap114_equality_case_starts_at_zero() {
        let s = unit3();
        let y = rvec(&[0.7, -0.1, 0.4]);
        let z = rvec(&[0.0, 1.0, 1.0]);
        let b = BoundsPair::from_reals(0.5, 1.5);
        let x = y.clone();
        let r = evaluate(&s, Form::Gap114, &x, &y, &z, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.chain[1].value.abs() < 1e-12);
    }

    #[test]
    fn scalar_precondition_errors_name_form_and_flag() {
        let s = unit3();
        let x = rvec(&[1.0, 1.0, 0.0]);
        let y = rvec(&[1.0, 0.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let bad = BoundsPair::from_reals(-1.0, 1.0); // Re(conj(a)A) = -1
        let err = evaluate(&s, Form::Mult115, &x, &y, &z, &bad, DEFAULT_TOL).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("mult115") && msg.contains("Re(conj(a) A)"),
            "{msg}"
        );

        let neg_sum = BoundsPair::from_reals(-2.0, 2.0);
        let err = evaluate(&s, Form::Thm31, &x, &y, &z, &neg_sum, DEFAULT_TOL).unwrap_err();
        assert!(err.to_string().contains("thm31"));

        let not_positive = BoundsPair::from_reals(-1.0, 2.0);
        let err = evaluate(&s, Form::Tri311, &x, &y, &z, &not_positive, DEFAULT_TOL).unwrap_err();
        assert!(err.to_string().contains("tri311"));
    }

    #[test]
    fn hypothesis_unmet_is_a_verdict_not_an_error() {
        let s = unit3();
        let y = rvec(&[1.0, 0.0, 0.0]);
        let z = rvec(&[0.0, 0.0, 1.0]);
        let b = BoundsPair::from_reals(0.0, 2.0);
        let x = y.scale(Scalar::real(20.0));
        let r = evaluate(&s, Form::Thm21, &x, &y, &z, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::HypothesisUnmet);
        assert!(r.condition_value < 0.0);
        assert_eq!(r.chain.len(), 4); // still filled
    }

    #[test]
    fn thm21_refined_bound_dominated_by_final_bound() {
        let s = TwoInnerSpace::unit(5, Mode::Complex).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        for _ in 0..300 {
            let b = sampling::random_bounds(&mut rng, Mode::Complex, Form::Thm21);
            let (x, y, z) = sampling::hypothesis_point(&mut rng, &s, &b).unwrap();
            let r = evaluate(&s, Form::Thm21, &x, &y, &z, &b, DEFAULT_TOL).unwrap();
            let refined = r.chain[2].value;
            let final_bound = r.chain[3].value;
            assert!(refined <= final_bound + DEFAULT_TOL * r.scale);
        }
    }

    #[test]
    fn all_forms_hold_on_hypothesis_satisfying_inputs() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for &mode in &[Mode::Real, Mode::Complex] {
            let s = TwoInnerSpace::unit(4, mode).unwrap();
            for form in Form::ALL {
                for _ in 0..200 {
                    let b = sampling::random_bounds(&mut rng, mode, form);
                    let (x, y, z) = sampling::hypothesis_point(&mut rng, &s, &b).unwrap();
                    let r = evaluate(&s, form, &x, &y, &z, &b, DEFAULT_TOL).unwrap();
                    assert_ne!(
                        r.verdict,
                        Verdict::Violated,
                        "form {form} violated: chain {:?} slacks {:?}",
                        r.chain,
                        r.slacks
                    );
                }
            }
        }
    }
}
