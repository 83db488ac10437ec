//! Weighted-integral 2-inner products made computable: parsed function
//! expressions, composite Gauss-Legendre quadrature, the determinant
//! product in both its single-integral Gram form and its symmetrized
//! double-integral form, synchronicity checks, and the four determinant
//! inequalities obtained by discretizing onto the quadrature grid.

pub mod expr;
pub mod quadrature;

use std::fmt;

pub use expr::{parse_expr, EvalError, FunctionExpr, ParseError};
pub use quadrature::QuadratureDomain;

use crate::error::{Error, Result};
use crate::linalg::{Mode, Scalar, Vector, WeightedInnerSpace};
use crate::numeric::CompensatedSum;
use crate::reverses::{self, BoundsPair, Form, InequalityReport};
use crate::two_inner::TwoInnerSpace;
use expr::{BinOp, FunctionExpr as Fx};

/// The square-integrable space with density `rho` over a quadrature domain.
/// Node positions, quadrature weights, and density values are cached.
#[derive(Debug, Clone)]
pub struct WeightedL2 {
    rho: FunctionExpr,
    domain: QuadratureDomain,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rho_values: Vec<f64>,
}

fn eval_at(e: &FunctionExpr, location: &'static str, index: usize, t: f64) -> Result<f64> {
    e.eval(t).map_err(|source| Error::EvalAt {
        expr: e.to_text(),
        location,
        index,
        position: t,
        source,
    })
}

impl WeightedL2 {
    /// Build the space; the density must be finite and strictly positive at
    /// every quadrature node.
    pub fn new(rho: FunctionExpr, domain: QuadratureDomain) -> Result<Self> {
        let points = domain.points();
        let mut nodes = Vec::with_capacity(points.len());
        let mut weights = Vec::with_capacity(points.len());
        let mut rho_values = Vec::with_capacity(points.len());
        for (i, (t, w)) in points.into_iter().enumerate() {
            let r = eval_at(&rho, "quadrature node", i, t)?;
            if r <= 0.0 {
                return Err(Error::precondition(format!(
                    "density must be positive on the domain: rho({t}) = {r} at node {i}"
                )));
            }
            nodes.push(t);
            weights.push(w);
            rho_values.push(r);
        }
        Ok(WeightedL2 {
            rho,
            domain,
            nodes,
            weights,
            rho_values,
        })
    }

    pub fn rho(&self) -> &FunctionExpr {
        &self.rho
    }

    pub fn domain(&self) -> &QuadratureDomain {
        &self.domain
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rho_values(&self) -> &[f64] {
        &self.rho_values
    }

    /// Values of `expr` at every node; errors name the failing node.
    pub fn sample(&self, expr: &FunctionExpr) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, &t)| eval_at(expr, "quadrature node", i, t))
            .collect()
    }

    /// The discretized base space: coordinates are quadrature nodes and
    /// the coordinate weight is `w_i rho(t_i)`.
    pub fn discretized_space(&self) -> Result<WeightedInnerSpace> {
        let weights = self
            .weights
            .iter()
            .zip(&self.rho_values)
            .map(|(&w, &r)| w * r)
            .collect();
        WeightedInnerSpace::new(weights, Mode::Real)
    }
}

/// Quadrature value of the weighted integral of `expr` over the domain.
pub fn integrate(expr: &FunctionExpr, w: &WeightedL2) -> Result<f64> {
    let values = w.sample(expr)?;
    let mut acc = CompensatedSum::new();
    for ((&wt, &r), v) in w.weights().iter().zip(w.rho_values()).zip(values) {
        acc.add(wt * r * v);
    }
    Ok(acc.value())
}

/// The 2-inner product `(f,g|h)` in Gram-determinant form: the 2x2
/// determinant of the weighted product integrals.
pub fn tip_gram(
    f: &FunctionExpr,
    g: &FunctionExpr,
    h: &FunctionExpr,
    w: &WeightedL2,
) -> Result<f64> {
    let fv = w.sample(f)?;
    let gv = w.sample(g)?;
    let hv = w.sample(h)?;
    let wr: Vec<f64> = w
        .weights()
        .iter()
        .zip(w.rho_values())
        .map(|(&a, &b)| a * b)
        .collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        let mut acc = CompensatedSum::new();
        for ((&w, &x), &y) in wr.iter().zip(a).zip(b) {
            acc.add(w * x * y);
        }
        acc.value()
    };
    Ok(dot(&fv, &gv) * dot(&hv, &hv) - dot(&fv, &hv) * dot(&gv, &hv))
}

/// The same product in its symmetrized double-sum form: half the double
/// integral of `rho(s) rho(t) det[f,h](s,t) det[g,h](s,t)`. Agrees with
/// [`tip_gram`] up to rounding; the pair provides a dual-route consistency
/// check on the quadrature discretization.
pub fn tip_double(
    f: &FunctionExpr,
    g: &FunctionExpr,
    h: &FunctionExpr,
    w: &WeightedL2,
) -> Result<f64> {
    let fv = w.sample(f)?;
    let gv = w.sample(g)?;
    let hv = w.sample(h)?;
    let wr: Vec<f64> = w
        .weights()
        .iter()
        .zip(w.rho_values())
        .map(|(&a, &b)| a * b)
        .collect();
    let n = wr.len();
    let mut acc = CompensatedSum::new();
    for i in 0..n {
        for j in 0..n {
            let det_f = fv[i] * hv[j] - fv[j] * hv[i];
            let det_g = gv[i] * hv[j] - gv[j] * hv[i];
            acc.add(0.5 * wr[i] * wr[j] * det_f * det_g);
        }
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncVerdict {
    Synchronous,
    NotSynchronous,
}

impl fmt::Display for SyncVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyncVerdict::Synchronous => write!(f, "synchronous"),
            SyncVerdict::NotSynchronous => write!(f, "not_synchronous"),
        }
    }
}

/// Outcome of a sampled synchronicity check. A pass is evidence at the
/// sampled pairs, never a proof.
#[derive(Debug, Clone)]
pub struct SyncReport {
    pub verdict: SyncVerdict,
    /// `(s, t, (q(s)-q(t))(p(s)-p(t)))` for the most negative product seen.
    pub worst_pair: (f64, f64, f64),
    pub pairs_checked: u64,
}

/// Check `(q(s)-q(t))(p(s)-p(t)) >= -tol` over all pairs of a uniform grid
/// of `grid_size` points spanning the domain, endpoints included.
pub fn check_synchronous(
    q: &FunctionExpr,
    p: &FunctionExpr,
    w: &WeightedL2,
    grid_size: usize,
    tol: f64,
) -> Result<SyncReport> {
    if grid_size < 2 {
        return Err(Error::precondition(format!(
            "synchronicity grid needs at least 2 points, got {grid_size}"
        )));
    }
    let (lo, hi) = (w.domain().lo(), w.domain().hi());
    let step = (hi - lo) / (grid_size - 1) as f64;
    let ts: Vec<f64> = (0..grid_size).map(|i| lo + step * i as f64).collect();
    let qv: Vec<f64> = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| eval_at(q, "grid point", i, t))
        .collect::<Result<_>>()?;
    let pv: Vec<f64> = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| eval_at(p, "grid point", i, t))
        .collect::<Result<_>>()?;

    let mut worst = (ts[0], ts[0], f64::INFINITY);
    let mut scale: f64 = 1.0;
    let mut pairs = 0u64;
    for i in 0..grid_size {
        for j in (i + 1)..grid_size {
            let prod = (qv[i] - qv[j]) * (pv[i] - pv[j]);
            pairs += 1;
            scale = scale.max(prod.abs());
            if prod < worst.2 {
                worst = (ts[i], ts[j], prod);
            }
        }
    }
    let verdict = if worst.2 < -tol * scale {
        SyncVerdict::NotSynchronous
    } else {
        SyncVerdict::Synchronous
    };
    Ok(SyncReport {
        verdict,
        worst_pair: worst,
        pairs_checked: pairs,
    })
}

/// The four determinant inequalities; codes double as CLI values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop {
    P41,
    P42,
    P43,
    P44,
}

impl Prop {
    pub const ALL: [Prop; 4] = [Prop::P41, Prop::P42, Prop::P43, Prop::P44];

    pub fn code(&self) -> &'static str {
        match self {
            Prop::P41 => "4.1",
            Prop::P42 => "4.2",
            Prop::P43 => "4.3",
            Prop::P44 => "4.4",
        }
    }

    pub fn from_code(code: &str) -> Option<Prop> {
        Prop::ALL.iter().copied().find(|p| p.code() == code)
    }

    /// The abstract reverse form each proposition instantiates.
    pub fn form(&self) -> Form {
        match self {
            Prop::P41 => Form::Thm21,
            Prop::P42 => Form::Thm22,
            Prop::P43 => Form::Thm31,
            Prop::P44 => Form::Tri311,
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Report for one determinant inequality: the discretized bound chain plus
/// the sampled synchronicity evidence for the window functions.
#[derive(Debug, Clone)]
pub struct PropReport {
    pub prop: Prop,
    pub sync: SyncReport,
    pub inequality: InequalityReport,
}

fn bin(op: BinOp, l: &Fx, r: &Fx) -> Fx {
    Fx::Bin(op, Box::new(l.clone()), Box::new(r.clone()))
}

/// Evaluate one determinant inequality for window `0 < m < M`.
///
/// The functions are discretized onto the quadrature nodes and the
/// corresponding reverse form is evaluated there. The localization
/// hypothesis is recorded twice: as the sampled synchronicity of the pair
/// `(M g/h - f/h, f/h - m g/h)` and as the quadratic condition value on the
/// discretized vectors; the verdict follows the quadratic condition, since
/// synchronicity is only a sufficient criterion.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_prop(
    prop: Prop,
    f: &FunctionExpr,
    g: &FunctionExpr,
    h: &FunctionExpr,
    w: &WeightedL2,
    m: f64,
    big_m: f64,
    grid_size: usize,
    tol: f64,
) -> Result<PropReport> {
    if !(m.is_finite() && big_m.is_finite() && m > 0.0 && big_m > m) {
        return Err(Error::precondition(format!(
            "window must satisfy 0 < m < M, got m = {m}, M = {big_m}"
        )));
    }

    // Synchronicity of (M g/h - f/h, f/h - m g/h); h must be nonzero at
    // every grid point for the ratios to exist.
    let f_over_h = bin(BinOp::Div, f, h);
    let g_over_h = bin(BinOp::Div, g, h);
    let upper = bin(
        BinOp::Sub,
        &bin(BinOp::Mul, &Fx::Literal(big_m), &g_over_h),
        &f_over_h,
    );
    let lower = bin(
        BinOp::Sub,
        &f_over_h,
        &bin(BinOp::Mul, &Fx::Literal(m), &g_over_h),
    );
    let sync = check_synchronous(&upper, &lower, w, grid_size, tol)?;

    let space = TwoInnerSpace::new(w.discretized_space()?);
    let to_vector = |values: Vec<f64>| -> Result<Vector> {
        Vector::new(values.into_iter().map(Scalar::real).collect())
    };
    let vf = to_vector(w.sample(f)?)?;
    let vg = to_vector(w.sample(g)?)?;
    let vh = to_vector(w.sample(h)?)?;
    let bounds = BoundsPair::from_reals(m, big_m);
    let inequality = reverses::evaluate(&space, prop.form(), &vf, &vg, &vh, &bounds, tol)?;

    Ok(PropReport {
        prop,
        sync,
        inequality,
    })
}
