//! Randomized search for counterexamples: hypothesis-satisfying inputs are
//! generated for every form and a `violated` verdict anywhere falsifies a
//! theorem, which is treated as a bug in this library rather than news.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::Result;
use crate::linalg::Vector;
use crate::reverses::{self, BoundsPair, Form, InequalityReport, Verdict};
use crate::sampling;
use crate::sharpness;
use crate::two_inner::TwoInnerSpace;

/// One generated input tuple.
#[derive(Debug, Clone)]
pub struct FuzzCase {
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
    pub bounds: BoundsPair,
}

/// Aggregate outcome for one form.
#[derive(Debug, Clone)]
pub struct FormOutcome {
    pub form: Form,
    pub trials: u64,
    pub holds: u64,
    pub unmet: u64,
    pub violated: u64,
    /// Largest achieved ratio of bounded quantity to constant-free bound.
    pub max_ratio: Option<f64>,
    /// First violation, kept for reproducer dumps.
    pub violation: Option<(u64, FuzzCase, InequalityReport)>,
}

#[derive(Debug, Clone)]
pub struct FuzzSummary {
    pub outcomes: Vec<FormOutcome>,
}

impl FuzzSummary {
    pub fn total_trials(&self) -> u64 {
        self.outcomes.iter().map(|o| o.trials).sum()
    }

    pub fn total_violated(&self) -> u64 {
        self.outcomes.iter().map(|o| o.violated).sum()
    }

    pub fn total_unmet(&self) -> u64 {
        self.outcomes.iter().map(|o| o.unmet).sum()
    }

    pub fn first_violation(&self) -> Option<&FormOutcome> {
        self.outcomes.iter().find(|o| o.violation.is_some())
    }
}

fn form_seed(seed: u64, form: Form) -> u64 {
    let idx = Form::ALL.iter().position(|&f| f == form).unwrap() as u64;
    seed.wrapping_add(idx.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Fuzz a single form; `observer` sees every evaluated case in trial order.
pub fn fuzz_form_with<F>(
    s: &TwoInnerSpace,
    form: Form,
    trials: u64,
    seed: u64,
    tol: f64,
    mut observer: F,
) -> Result<FormOutcome>
where
    F: FnMut(u64, &FuzzCase, &InequalityReport),
{
    let mut rng = ChaCha12Rng::seed_from_u64(form_seed(seed, form));
    let mut outcome = FormOutcome {
        form,
        trials,
        holds: 0,
        unmet: 0,
        violated: 0,
        max_ratio: None,
        violation: None,
    };
    for trial in 0..trials {
        let bounds = sampling::random_bounds(&mut rng, s.mode(), form);
        let (x, y, z) = sampling::hypothesis_point(&mut rng, s, &bounds)?;
        let case = FuzzCase { x, y, z, bounds };
        let report = reverses::evaluate(s, form, &case.x, &case.y, &case.z, &case.bounds, tol)?;
        match report.verdict {
            Verdict::Holds => outcome.holds += 1,
            Verdict::HypothesisUnmet => outcome.unmet += 1,
            Verdict::Violated => {
                outcome.violated += 1;
                if outcome.violation.is_none() {
                    outcome.violation = Some((trial, case.clone(), report.clone()));
                }
            }
        }
        if let Some(r) = sharpness::form_ratio(s, form, &case.x, &case.y, &case.z, &case.bounds)? {
            if outcome.max_ratio.is_none_or(|m| r > m) {
                outcome.max_ratio = Some(r);
            }
        }
        observer(trial, &case, &report);
    }
    Ok(outcome)
}

pub fn fuzz_form(
    s: &TwoInnerSpace,
    form: Form,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<FormOutcome> {
    fuzz_form_with(s, form, trials, seed, tol, |_, _, _| {})
}

/// Fuzz every form, splitting `total_trials` evenly (rounded up).
pub fn run_fuzz_with<F>(
    s: &TwoInnerSpace,
    total_trials: u64,
    seed: u64,
    tol: f64,
    mut observer: F,
) -> Result<FuzzSummary>
where
    F: FnMut(Form, u64, &FuzzCase, &InequalityReport),
{
    let per_form = total_trials.div_ceil(Form::ALL.len() as u64).max(1);
    let mut outcomes = Vec::with_capacity(Form::ALL.len());
    for form in Form::ALL {
        let outcome = fuzz_form_with(s, form, per_form, seed, tol, |trial, case, report| {
            observer(form, trial, case, report)
        })?;
        outcomes.push(outcome);
    }
    Ok(FuzzSummary { outcomes })
}

pub fn run_fuzz(s: &TwoInnerSpace, total_trials: u64, seed: u64, tol: f64) -> Result<FuzzSummary> {
    run_fuzz_with(s, total_trials, seed, tol, |_, _, _, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mode;
    use crate::DEFAULT_TOL;

    #[test]
    fn small_fuzz_run_finds_no_violations() {
        for &mode in &[Mode::Real, Mode::Complex] {
            let s = TwoInnerSpace::unit(3, mode).unwrap();
            let summary = run_fuzz(&s, 500, 42, DEFAULT_TOL).unwrap();
            assert_eq!(
                summary.total_violated(),
                0,
                "{:?}",
                summary.first_violation()
            );
            assert!(summary.total_trials() >= 500);
        }
    }

    #[test]
    fn max_ratios_stay_below_targets() {
        let s = TwoInnerSpace::unit(4, Mode::Real).unwrap();
        let summary = run_fuzz(&s, 400, 7, DEFAULT_TOL).unwrap();
        for o in &summary.outcomes {
            if let Some(r) = o.max_ratio {
                assert!(
                    r <= o.form.target_constant() + DEFAULT_TOL,
                    "form {} ratio {r}",
                    o.form
                );
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let s = TwoInnerSpace::unit(3, Mode::Complex).unwrap();
        let a = fuzz_form(&s, Form::Thm21, 50, 9, DEFAULT_TOL).unwrap();
        let b = fuzz_form(&s, Form::Thm21, 50, 9, DEFAULT_TOL).unwrap();
        assert_eq!(a.max_ratio, b.max_ratio);
        assert_eq!(a.holds, b.holds);
    }
}
