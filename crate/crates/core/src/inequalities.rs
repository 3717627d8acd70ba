//! Both sides of each inequality, evaluated on step functions, and the
//! resulting gap reports.
//!
//! Every report carries `gap` signed so that the inequality holds iff
//! `gap ≥ −tolerance·scale`, where `scale = max(1, |lhs|, |rhs|)`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generators::{mulholland_sum, p_functional, quasi_mean, Generator, GeneratorPair};
use crate::measure::{MeasureSpace, ProductSpace, StepFunction};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Which side is asserted to be the larger one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `lhs ≤ rhs`
    Forward,
    /// `lhs ≥ rhs`
    Reversed,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "reversed" => Ok(Direction::Reversed),
            _ => Err(Error::Validation(format!("direction must be forward or reversed, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
    pub is_equality: bool,
    pub tolerance: f64,
    pub witness: Value,
}

impl InequalityReport {
    pub fn new(name: &str, direction: Direction, lhs: f64, rhs: f64, tolerance: f64, witness: Value) -> Self {
        let gap = match direction {
            Direction::Forward => rhs - lhs,
            Direction::Reversed => lhs - rhs,
        };
        let slack = tolerance * scale_of(lhs, rhs);
        InequalityReport {
            name: name.to_string(),
            lhs,
            rhs,
            gap,
            holds: gap >= -slack,
            is_equality: gap.abs() <= slack,
            tolerance,
            witness,
        }
    }

    pub fn scale(&self) -> f64 {
        scale_of(self.lhs, self.rhs)
    }

    /// `gap / scale`; the quantity searches minimize.
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.scale()
    }
}

pub fn scale_of(lhs: f64, rhs: f64) -> f64 {
    1f64.max(lhs.abs()).max(rhs.abs())
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("tolerance {tol} must be positive")))
    }
}

/// `∫ fg dμ ≤ P_φ(f)·P_ψ(g)`.
pub fn holder_report(
    pair: &GeneratorPair,
    f: &StepFunction,
    g: &StepFunction,
    mu: &MeasureSpace,
    tol: f64,
) -> Result<InequalityReport> {
    check_tolerance(tol)?;
    let lhs = mu.integrate(&f.product(g)?)?;
    let rhs = p_functional(&pair.phi, f, mu)? * p_functional(&pair.psi, g, mu)?;
    let witness = json!({ "phi": pair.phi, "psi": pair.psi, "mu": mu, "f": f, "g": g });
    Ok(InequalityReport::new("holder", Direction::Forward, lhs, rhs, tol, witness))
}

/// `∫ fg dμ ≥ P_φ(f·1_{supp g})·P_ψ(g)` with `ψ` integrated over `supp g` only.
pub fn reversed_holder_report(
    pair: &GeneratorPair,
    f: &StepFunction,
    g: &StepFunction,
    mu: &MeasureSpace,
    tol: f64,
) -> Result<InequalityReport> {
    check_tolerance(tol)?;
    f.check_space(mu)?;
    g.check_space(mu)?;
    if g.is_zero() {
        return Err(Error::Degenerate("reversed Hölder needs g not identically zero".into()));
    }
    let support = g.support();
    let lhs = mu.integrate(&f.product(g)?)?;
    let f_masked = f.masked(&support)?;
    let phi_part = p_functional(&pair.phi, &f_masked, mu)?;
    let mut psi_integral = 0.0;
    for ((v, w), keep) in g.values().iter().zip(mu.weights()).zip(&support) {
        if *keep {
            psi_integral += w * pair.psi.eval(*v)?;
        }
    }
    let psi_part = pair.psi.inverse(psi_integral)?;
    let rhs = phi_part * psi_part;
    let witness = json!({ "phi": pair.phi, "psi": pair.psi, "mu": mu, "f": f, "g": g });
    Ok(InequalityReport::new("reversed-holder", Direction::Reversed, lhs, rhs, tol, witness))
}

/// `{∫_X (∫_Y F dν)^p dμ}^{1/p} ≤ ∫_Y (∫_X F^p dμ)^{1/p} dν`.
///
/// Exponents below one are evaluated too; the inequality may then fail.
pub fn gmi_report(
    p: f64,
    big_f: &StepFunction,
    mu: &MeasureSpace,
    nu: &MeasureSpace,
    tol: f64,
) -> Result<InequalityReport> {
    check_tolerance(tol)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Validation(format!("exponent {p} must be positive")));
    }
    let ps = ProductSpace::new(mu, nu)?;
    let inner = ps.partial_integral_y(big_f)?;
    let lhs = mu.integrate(&inner.powf(p)?)?.powf(1.0 / p);
    let mut rhs = 0.0;
    for (y, w) in nu.weights().iter().enumerate() {
        let slice = ps.slice_y(big_f, y)?;
        rhs += w * mu.integrate(&slice.powf(p)?)?.powf(1.0 / p);
    }
    let witness = json!({ "p": p, "mu": mu, "nu": nu, "F": big_f });
    Ok(InequalityReport::new("gmi", Direction::Forward, lhs, rhs, tol, witness))
}

/// `ψ{∫_X φ(∫_Y F dν) dμ} ≤ ∫_Y ψ(∫_X φ∘F dμ) dν`, or its reverse.
pub fn generalized_minkowski_report(
    pair: &GeneratorPair,
    big_f: &StepFunction,
    mu: &MeasureSpace,
    nu: &MeasureSpace,
    direction: Direction,
    tol: f64,
) -> Result<InequalityReport> {
    check_tolerance(tol)?;
    let ps = ProductSpace::new(mu, nu)?;
    let inner = ps.partial_integral_y(big_f)?;
    let mut outer = 0.0;
    for (g, w) in inner.values().iter().zip(mu.weights()) {
        outer += w * pair.phi.eval(*g).map_err(|e| context(e, "φ(∫_Y F dν)"))?;
    }
    let lhs = pair.psi.eval(outer).map_err(|e| context(e, "ψ on the left-hand side"))?;
    let mut rhs = 0.0;
    for (y, w) in nu.weights().iter().enumerate() {
        let slice = ps.slice_y(big_f, y)?;
        let mut acc = 0.0;
        for (v, wx) in slice.values().iter().zip(mu.weights()) {
            acc += wx * pair.phi.eval(*v).map_err(|e| context(e, "φ∘F"))?;
        }
        rhs += w * pair.psi.eval(acc).map_err(|e| context(e, "ψ on the right-hand side"))?;
    }
    let witness = json!({
        "phi": pair.phi, "psi": pair.psi, "mu": mu, "nu": nu, "F": big_f, "direction": direction,
    });
    Ok(InequalityReport::new("genmink", direction, lhs, rhs, tol, witness))
}

fn context(err: Error, at: &str) -> Error {
    match err {
        Error::Domain { generator, value } => Error::Domain {
            generator: format!("{generator} (evaluating {at})"),
            value,
        },
        Error::Range { generator, value } => Error::Range {
            generator: format!("{generator} (evaluating {at})"),
            value,
        },
        other => other,
    }
}

/// `P_φ(f + g) ≤ P_φ(f) + P_φ(g)`.
pub fn minkowski_triangle_report(
    gen: &Generator,
    f: &StepFunction,
    g: &StepFunction,
    mu: &MeasureSpace,
    tol: f64,
) -> Result<InequalityReport> {
    check_tolerance(tol)?;
    let lhs = p_functional(gen, &f.sum(g)?, mu)?;
    let rhs = p_functional(gen, f, mu)? + p_functional(gen, g, mu)?;
    let witness = json!({ "gen": gen, "mu": mu, "f": f, "g": g });
    Ok(InequalityReport::new("minkowski", Direction::Forward, lhs, rhs, tol, witness))
}

pub type Quadruple = [f64; 4];

/// `(t+v) ⊞ (u+w) ≤ (t ⊞ u) + (v ⊞ w)` for one quadruple `(t, u, v, w)`.
pub fn mulholland_report(gen: &Generator, quad: Quadruple, direction: Direction, tol: f64) -> Result<InequalityReport> {
    check_tolerance(tol)?;
    if quad.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::Validation(format!("quadruple entries must be non-negative, got {quad:?}")));
    }
    let [t, u, v, w] = quad;
    let lhs = mulholland_sum(gen, t + v, u + w)?;
    let rhs = mulholland_sum(gen, t, u)? + mulholland_sum(gen, v, w)?;
    let witness = json!({ "gen": gen, "quad": quad, "direction": direction });
    Ok(InequalityReport::new("mulholland", direction, lhs, rhs, tol, witness))
}

/// Subadditivity of `⊞_φ` on each quadruple.
pub fn mulholland_subadditivity_check(gen: &Generator, quads: &[Quadruple], tol: f64) -> Result<Vec<InequalityReport>> {
    quads
        .iter()
        .map(|q| mulholland_report(gen, *q, Direction::Forward, tol))
        .collect()
}

/// `M_φ((a+b)/2) ≤ ½(M_φ(a) + M_φ(b))`.
pub fn quasi_mean_midpoint_report(gen: &Generator, a: &[f64], b: &[f64], q: &[f64], tol: f64) -> Result<InequalityReport> {
    check_tolerance(tol)?;
    if a.len() != b.len() {
        return Err(Error::Validation(format!(
            "sequences have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    let lhs = quasi_mean(gen, &mid, q)?;
    let rhs = 0.5 * (quasi_mean(gen, a, q)? + quasi_mean(gen, b, q)?);
    let witness = json!({ "gen": gen, "a": a, "b": b, "q": q });
    Ok(InequalityReport::new("quasimean", Direction::Forward, lhs, rhs, tol, witness))
}

/// Function on a 2×2 product built from two blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBlock {
    pub big_f: StepFunction,
    pub mu: MeasureSpace,
    pub nu: MeasureSpace,
}

/// `X = A₁ ⊔ A₂` with `μ(A_i) = b`, `Y = B₁ ⊔ B₂` with `ν(B_j) = c`, and
/// `F = G` on `X × B₁`, `F = H` on `X × B₂`, where `G = t·1_{A₁} + u·1_{A₂}`
/// and `H = v·1_{A₁} + w·1_{A₂}`.
pub fn build_two_block(quad: Quadruple, b: f64, c: f64) -> Result<TwoBlock> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::Validation(format!("block mass b={b} must lie in (0,1]")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Validation(format!("block mass c={c} must be positive")));
    }
    let [t, u, v, w] = quad;
    let mu = MeasureSpace::new(vec![b, b])?;
    let nu = MeasureSpace::new(vec![c, c])?;
    let ps = ProductSpace::new(&mu, &nu)?;
    let big_f = ps.function_from_rows(&[vec![t, v], vec![u, w]])?;
    Ok(TwoBlock { big_f, mu, nu })
}
