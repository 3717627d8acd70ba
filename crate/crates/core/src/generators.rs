//! Generators `φ: ℝ₊ → ℝ₊` with `φ(0) = 0`, and the means built from them.
//!
//! A generator is described by a short spec string (see [`Generator::parse`]),
//! which is also its serialized form, so reports can name generators in a way
//! that feeds straight back into the command line.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MeasureSpace, StepFunction};

/// Hard cap on bisection steps for numeric inversion.
pub const BISECTION_MAX_ITER: usize = 200;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Monotone piecewise-linear generator through `(t, φ(t))` knots starting at `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    knots: Vec<(f64, f64)>,
}

impl Table {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Validation("table needs at least two knots".into()));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(Error::Validation(format!(
                "table must start at (0,0), found {:?}",
                knots[0]
            )));
        }
        for w in knots.windows(2) {
            let ((t0, y0), (t1, y1)) = (w[0], w[1]);
            if !(t1.is_finite() && y1.is_finite()) {
                return Err(Error::Validation("table knots must be finite".into()));
            }
            if !(t1 > t0 && y1 > y0) {
                return Err(Error::Validation(format!(
                    "table knots must be strictly increasing in both columns: ({t0},{y0}) then ({t1},{y1})"
                )));
            }
        }
        Ok(Table { knots })
    }

    /// Reads a two-column `t,phi` CSV; a header row is allowed.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut knots = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            if record.len() != 2 {
                return Err(Error::Validation(format!(
                    "{} line {}: expected two columns",
                    path.display(),
                    line + 1
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(y)) => knots.push((t, y)),
                _ if line == 0 && knots.is_empty() => continue,
                _ => {
                    return Err(Error::Validation(format!(
                        "{} line {}: non-numeric entry",
                        path.display(),
                        line + 1
                    )))
                }
            }
        }
        Table::new(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn last(&self) -> (f64, f64) {
        *self.knots.last().expect("validated non-empty")
    }

    fn interpolate(pts: &[(f64, f64)], x: f64, pick: impl Fn(&(f64, f64)) -> (f64, f64)) -> f64 {
        let i = pts.partition_point(|k| pick(k).0 < x);
        if i == 0 {
            return pick(&pts[0]).1;
        }
        let (x0, y0) = pick(&pts[i - 1]);
        let (x1, y1) = pick(&pts[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// A monotone generator of means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Generator {
    /// `c·t^p` with `c, p > 0`.
    Power { c: f64, p: f64 },
    /// `c·t^p` for any non-zero `p`, defined on `t > 0` only. Negative
    /// exponents make it decreasing; callers must keep zero out of its way.
    ExtendedPower { c: f64, p: f64 },
    /// `e^t − 1`.
    Expm1,
    /// `log(1 + t)`.
    Log1p,
    Tabulated(Table),
    /// `λ·φ`.
    Scaled { factor: f64, inner: Box<Generator> },
    /// `φ⁻¹`, evaluated numerically unless `φ` inverts in closed form.
    Inverse(Box<Generator>),
}

impl Generator {
    pub fn power(c: f64, p: f64) -> Result<Self> {
        let g = Generator::Power { c, p };
        g.validate()?;
        Ok(g)
    }

    pub fn extended_power(c: f64, p: f64) -> Result<Self> {
        let g = Generator::ExtendedPower { c, p };
        g.validate()?;
        Ok(g)
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Generator::Tabulated(Table::new(knots)?))
    }

    pub fn inverse_of(inner: Generator) -> Self {
        Generator::Inverse(Box::new(inner))
    }

    /// `λ·self`; folds into the coefficient where the kind has one.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Validation(format!("scale factor {factor} must be positive")));
        }
        Ok(match self {
            Generator::Power { c, p } => Generator::Power { c: c * factor, p: *p },
            Generator::ExtendedPower { c, p } => Generator::ExtendedPower { c: c * factor, p: *p },
            Generator::Tabulated(t) => Generator::Tabulated(Table {
                knots: t.knots.iter().map(|(x, y)| (*x, y * factor)).collect(),
            }),
            Generator::Scaled { factor: f, inner } => Generator::Scaled {
                factor: f * factor,
                inner: inner.clone(),
            },
            other => Generator::Scaled {
                factor,
                inner: Box::new(other.clone()),
            },
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::Power { c, p } => {
                if !(*c > 0.0 && c.is_finite() && *p > 0.0 && p.is_finite()) {
                    return Err(Error::Validation(format!(
                        "power generator needs c > 0 and p > 0, got c={c}, p={p}"
                    )));
                }
            }
            Generator::ExtendedPower { c, p } => {
                if !(*c > 0.0 && c.is_finite() && *p != 0.0 && p.is_finite()) {
                    return Err(Error::Validation(format!(
                        "extended power needs c > 0 and p != 0, got c={c}, p={p}"
                    )));
                }
            }
            Generator::Scaled { factor, inner } => {
                if !(*factor > 0.0 && factor.is_finite()) {
                    return Err(Error::Validation(format!("scale factor {factor} must be positive")));
                }
                inner.validate()?;
            }
            Generator::Inverse(inner) => {
                if matches!(**inner, Generator::ExtendedPower { .. }) {
                    return Err(Error::Validation("cannot invert an extended power generator".into()));
                }
                inner.validate()?;
            }
            Generator::Expm1 | Generator::Log1p | Generator::Tabulated(_) => {}
        }
        Ok(())
    }

    /// Parses `power:<c>,<p>`, `xpower:<c>,<p>`, `expm1`, `log1p`,
    /// `table:<csv path>`, `knots:<t>,<phi>;<t>,<phi>;...`,
    /// `scaled:<λ>:<spec>` or `inverse:<spec>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = |why: &str| Error::Validation(format!("generator spec '{spec}': {why}"));
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let pair = |rest: &str| -> Result<(f64, f64)> {
            let (a, b) = rest.split_once(',').ok_or_else(|| bad("expected <c>,<p>"))?;
            let a = a.trim().parse::<f64>().map_err(|_| bad("coefficient is not a number"))?;
            let b = b.trim().parse::<f64>().map_err(|_| bad("exponent is not a number"))?;
            Ok((a, b))
        };
        let g = match kind {
            "power" => {
                let (c, p) = pair(rest)?;
                Generator::Power { c, p }
            }
            "xpower" => {
                let (c, p) = pair(rest)?;
                Generator::ExtendedPower { c, p }
            }
            "expm1" if rest.is_empty() => Generator::Expm1,
            "log1p" if rest.is_empty() => Generator::Log1p,
            "table" => Generator::Tabulated(Table::from_csv(Path::new(rest))?),
            "knots" => {
                let knots = rest
                    .split(';')
                    .map(pair)
                    .collect::<Result<Vec<_>>>()?;
                Generator::Tabulated(Table::new(knots)?)
            }
            "scaled" => {
                let (factor, inner) = rest.split_once(':').ok_or_else(|| bad("expected scaled:<factor>:<spec>"))?;
                let factor = factor.parse::<f64>().map_err(|_| bad("factor is not a number"))?;
                Generator::Scaled {
                    factor,
                    inner: Box::new(Generator::parse(inner)?),
                }
            }
            "inverse" => Generator::Inverse(Box::new(Generator::parse(rest)?)),
            _ => return Err(bad("unknown generator kind")),
        };
        g.validate()?;
        Ok(g)
    }

    /// Right end `β` of the range `φ(ℝ₊) = [0, β|`.
    pub fn range_end(&self) -> f64 {
        match self {
            Generator::Tabulated(t) => t.last().1,
            Generator::Scaled { factor, inner } => factor * inner.range_end(),
            Generator::Inverse(inner) => inner.domain_end(),
            _ => f64::INFINITY,
        }
    }

    fn domain_end(&self) -> f64 {
        match self {
            Generator::Tabulated(t) => t.last().0,
            Generator::Scaled { inner, .. } => inner.domain_end(),
            Generator::Inverse(inner) => inner.range_end(),
            _ => f64::INFINITY,
        }
    }

    pub fn is_increasing(&self) -> bool {
        match self {
            Generator::ExtendedPower { p, .. } => *p > 0.0,
            Generator::Scaled { inner, .. } | Generator::Inverse(inner) => inner.is_increasing(),
            _ => true,
        }
    }

    fn domain_err(&self, value: f64) -> Error {
        Error::Domain {
            generator: self.to_string(),
            value,
        }
    }

    fn range_err(&self, value: f64) -> Error {
        Error::Range {
            generator: self.to_string(),
            value,
        }
    }

    /// `φ(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t.is_infinite() {
            return Err(self.domain_err(t));
        }
        let y = match self {
            Generator::Power { c, p } => c * t.powf(*p),
            Generator::ExtendedPower { c, p } => {
                if t == 0.0 {
                    return Err(self.domain_err(t));
                }
                c * t.powf(*p)
            }
            Generator::Expm1 => t.exp_m1(),
            Generator::Log1p => t.ln_1p(),
            Generator::Tabulated(table) => {
                if t > table.last().0 {
                    return Err(self.domain_err(t));
                }
                Table::interpolate(&table.knots, t, |k| *k)
            }
            Generator::Scaled { factor, inner } => factor * inner.eval(t)?,
            Generator::Inverse(inner) => inner
                .inverse(t)
                .map_err(|_| self.domain_err(t))?,
        };
        if !y.is_finite() {
            return Err(self.range_err(y));
        }
        Ok(y)
    }

    /// `φ⁻¹(s)`: closed form for powers and tables, bisection otherwise.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || s.is_infinite() {
            return Err(self.range_err(s));
        }
        match self {
            Generator::Power { c, p } => Ok((s / c).powf(1.0 / p)),
            Generator::ExtendedPower { c, p } => {
                if s == 0.0 {
                    return Err(self.range_err(s));
                }
                Ok((s / c).powf(1.0 / p))
            }
            Generator::Tabulated(table) => {
                if s > table.last().1 {
                    return Err(self.range_err(s));
                }
                Ok(Table::interpolate(&table.knots, s, |&(x, y)| (y, x)))
            }
            Generator::Scaled { factor, inner } => inner.inverse(s / factor).map_err(|_| self.range_err(s)),
            Generator::Inverse(inner) => inner.eval(s).map_err(|_| self.range_err(s)),
            Generator::Expm1 | Generator::Log1p => self.bisect_inverse(s),
        }
    }

    fn bisect_inverse(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        if s > self.range_end() {
            return Err(self.range_err(s));
        }
        // Grow [lo, hi] geometrically from [0, 1] until it brackets s.
        let mut hi: f64 = 1.0;
        let mut lo = if self.eval(hi)? < s {
            loop {
                hi *= 2.0;
                match self.eval(hi) {
                    Ok(y) if y >= s => break hi / 2.0,
                    Ok(_) if hi < f64::MAX / 2.0 => {}
                    _ => return Err(self.range_err(s)),
                }
            }
        } else {
            while hi > f64::MIN_POSITIVE && self.eval(hi / 2.0)? >= s {
                hi /= 2.0;
            }
            hi / 2.0
        };
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid)? < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (ylo, yhi) = (self.eval(lo)?, self.eval(hi)?);
        Ok(if s - ylo < yhi - s { lo } else { hi })
    }

    fn integral(&self, f: &StepFunction, mu: &MeasureSpace) -> Result<f64> {
        f.check_space(mu)?;
        let mut acc = 0.0;
        for (v, w) in f.values().iter().zip(mu.weights()) {
            acc += w * self.eval(*v)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Power { c, p } => write!(f, "power:{c},{p}"),
            Generator::ExtendedPower { c, p } => write!(f, "xpower:{c},{p}"),
            Generator::Expm1 => f.write_str("expm1"),
            Generator::Log1p => f.write_str("log1p"),
            Generator::Tabulated(t) => {
                f.write_str("knots:")?;
                for (i, (x, y)) in t.knots.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{x},{y}")?;
                }
                Ok(())
            }
            Generator::Scaled { factor, inner } => write!(f, "scaled:{factor}:{inner}"),
            Generator::Inverse(inner) => write!(f, "inverse:{inner}"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::parse(s)
    }
}

impl TryFrom<String> for Generator {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Generator::parse(&s)
    }
}

impl From<Generator> for String {
    fn from(g: Generator) -> Self {
        g.to_string()
    }
}

/// The pair `(φ, ψ)` of a Hölder- or Minkowski-type inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorPair {
    pub phi: Generator,
    pub psi: Generator,
}

impl GeneratorPair {
    pub fn new(phi: Generator, psi: Generator) -> Self {
        GeneratorPair { phi, psi }
    }

    /// `(t^p, t^q)`.
    pub fn powers(p: f64, q: f64) -> Result<Self> {
        Ok(GeneratorPair::new(Generator::power(1.0, p)?, Generator::power(1.0, q)?))
    }

    /// `(t^p, t^{1/p})`.
    pub fn power_and_inverse(p: f64) -> Result<Self> {
        GeneratorPair::powers(p, 1.0 / p)
    }
}

/// `P_φ(f) = φ⁻¹(∫ φ∘f dμ)`.
pub fn p_functional(gen: &Generator, f: &StepFunction, mu: &MeasureSpace) -> Result<f64> {
    let integral = gen.integral(f, mu)?;
    gen.inverse(integral)
}

/// Weighted quasi-arithmetic mean `M_φ(a, q) = φ⁻¹(Σ q_j φ(a_j))`.
pub fn quasi_mean(gen: &Generator, a: &[f64], q: &[f64]) -> Result<f64> {
    if a.is_empty() || a.len() != q.len() {
        return Err(Error::Validation(format!(
            "quasi-mean needs equally many values and weights, got {} and {}",
            a.len(),
            q.len()
        )));
    }
    if q.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Validation("quasi-mean weights must be non-negative".into()));
    }
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::Validation(format!("quasi-mean weights sum to {total}, not 1")));
    }
    let mut acc = 0.0;
    for (x, w) in a.iter().zip(q) {
        acc += w * gen.eval(*x)?;
    }
    let m = gen.inverse(acc)?;
    // Rounding can push the result a hair outside [min a, max a].
    let lo = a.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(m.clamp(lo, hi))
}

/// Mulholland sum `t₁ ⊞_φ t₂ = φ⁻¹(φ(t₁) + φ(t₂))`.
pub fn mulholland_sum(gen: &Generator, t1: f64, t2: f64) -> Result<f64> {
    gen.inverse(gen.eval(t1)? + gen.eval(t2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::io::Write;

    fn builtins() -> Vec<Generator> {
        vec![
            Generator::power(1.0, 2.0).unwrap(),
            Generator::power(3.0, 0.5).unwrap(),
            Generator::Expm1,
            Generator::Log1p,
            Generator::tabulated(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 3.0), (10.0, 50.0)]).unwrap(),
            Generator::inverse_of(Generator::Expm1),
        ]
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Generator::power(1.0, 2.0).unwrap().eval(3.0).unwrap(), 9.0);
        for g in builtins() {
            assert_eq!(g.eval(0.0).unwrap(), 0.0, "{g}");
        }
        assert_relative_eq!(Generator::Expm1.eval(1.0).unwrap(), 1.718281828459045, max_relative = 1e-15);
    }

    #[test]
    fn eval_domain_errors() {
        assert!(matches!(Generator::Expm1.eval(-1.0), Err(Error::Domain { .. })));
        let table = Generator::tabulated(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!(matches!(table.eval(1.5), Err(Error::Domain { .. })));
        let x = Generator::extended_power(1.0, -1.0).unwrap();
        assert!(matches!(x.eval(0.0), Err(Error::Domain { .. })));
        assert_eq!(x.eval(4.0).unwrap(), 0.25);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Generator::power(1.0, 2.0).unwrap().inverse(9.0).unwrap(), 3.0);
        // log(1 + t) = 1  ⇔  t = e − 1
        assert_relative_eq!(Generator::Log1p.inverse(1.0).unwrap(), std::f64::consts::E - 1.0, max_relative = 1e-14);
        let table = Generator::tabulated(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!(matches!(table.inverse(1.5), Err(Error::Range { .. })));
        assert!(Generator::Expm1.inverse(-0.5).is_err());
    }

    #[test]
    fn p_functional_examples() {
        let mu = MeasureSpace::new(vec![0.5, 0.5]).unwrap();
        let f = StepFunction::new(vec![1.0, 2.0]).unwrap();
        let sq = Generator::power(1.0, 2.0).unwrap();
        assert_relative_eq!(p_functional(&sq, &f, &mu).unwrap(), 2.5f64.sqrt(), max_relative = 1e-15);
        let c = StepFunction::constant(2, 1.7).unwrap();
        for g in builtins() {
            assert_relative_eq!(p_functional(&g, &c, &mu).unwrap(), 1.7, max_relative = 1e-10);
        }
        let sq5 = Generator::power(5.0, 2.0).unwrap();
        assert_relative_eq!(
            p_functional(&sq5, &f, &mu).unwrap(),
            p_functional(&sq, &f, &mu).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn p_functional_range_error_on_table() {
        let table = Generator::tabulated(vec![(0.0, 0.0), (2.0, 2.0)]).unwrap();
        let heavy = MeasureSpace::new(vec![1.0, 1.0]).unwrap();
        let f = StepFunction::new(vec![2.0, 2.0]).unwrap();
        assert!(matches!(p_functional(&table, &f, &heavy), Err(Error::Range { .. })));
    }

    #[test]
    fn quasi_mean_examples() {
        let id = Generator::power(1.0, 1.0).unwrap();
        assert_eq!(quasi_mean(&id, &[1.0, 3.0], &[0.5, 0.5]).unwrap(), 2.0);
        let sq = Generator::power(1.0, 2.0).unwrap();
        assert_relative_eq!(quasi_mean(&sq, &[1.0, 3.0], &[0.5, 0.5]).unwrap(), 5f64.sqrt(), max_relative = 1e-15);
        for g in builtins() {
            assert_relative_eq!(quasi_mean(&g, &[2.5; 3], &[0.2, 0.3, 0.5]).unwrap(), 2.5, max_relative = 1e-10);
        }
        assert!(matches!(quasi_mean(&sq, &[1.0, 3.0], &[0.5, 0.6]), Err(Error::Validation(_))));
    }

    #[test]
    fn mulholland_examples() {
        let sq = Generator::power(1.0, 2.0).unwrap();
        assert_eq!(mulholland_sum(&sq, 3.0, 4.0).unwrap(), 5.0);
        let id = Generator::power(1.0, 1.0).unwrap();
        assert_eq!(mulholland_sum(&id, 1.25, 2.5).unwrap(), 3.75);
        for g in builtins() {
            assert_relative_eq!(mulholland_sum(&g, 1.3, 0.0).unwrap(), 1.3, max_relative = 1e-10);
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["power:1,2", "xpower:2,-1.5", "expm1", "log1p", "knots:0,0;1,2;3,5", "scaled:2.5:expm1", "inverse:expm1"] {
            let g = Generator::parse(s).unwrap();
            assert_eq!(g.to_string(), s);
            let json = serde_json::to_string(&g).unwrap();
            assert_eq!(serde_json::from_str::<Generator>(&json).unwrap(), g);
        }
        for bad in ["power:1", "power:0,2", "power:1,-2", "cosh", "knots:1,1;2,2", "expm1:3", "inverse:xpower:1,-1"] {
            assert!(Generator::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn table_from_csv() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "t,phi\n0,0\n1,1\n2,4").unwrap();
        let g = Generator::parse(&format!("table:{}", file.path().display())).unwrap();
        assert_eq!(g.eval(1.5).unwrap(), 2.5);
        assert_eq!(g.inverse(2.5).unwrap(), 1.5);

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "0,0\n1,1\n1,2").unwrap();
        assert!(Generator::parse(&format!("table:{}", bad.path().display())).is_err());
    }

    #[test]
    fn multiplicativity_ground_truth() {
        let g = Generator::power(2.0, 1.7).unwrap();
        let n = |t: f64| g.eval(t).unwrap() / g.eval(1.0).unwrap();
        assert_relative_eq!(n(6.0), n(2.0) * n(3.0), max_relative = 1e-14);
        let e = Generator::Expm1;
        let n = |t: f64| e.eval(t).unwrap() / e.eval(1.0).unwrap();
        assert!((n(4.0) - n(2.0) * n(2.0)).abs() > 1.0);
    }

    proptest! {
        #[test]
        fn inverse_undoes_eval(t in 0.0f64..30.0, which in 0usize..6) {
            let g = &builtins()[which];
            let t = if matches!(g, Generator::Tabulated(_)) { t.min(10.0) } else { t };
            let back = g.inverse(g.eval(t).unwrap()).unwrap();
            prop_assert!((back - t).abs() <= 1e-10 * t.max(1e-300) + 1e-300, "{g}: {t} -> {back}");
        }

        #[test]
        fn eval_is_monotone(a in 0.0f64..10.0, b in 0.0f64..10.0, which in 0usize..6) {
            let g = &builtins()[which];
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(g.eval(lo).unwrap() <= g.eval(hi).unwrap());
        }

        #[test]
        fn scale_invariance(vals in prop::collection::vec(0.01f64..5.0, 3), lambda in 0.1f64..20.0, which in 0usize..6) {
            let g = &builtins()[which];
            let h = g.scaled(lambda).unwrap();
            let mu = MeasureSpace::new(vec![0.2, 0.3, 0.5]).unwrap();
            let f = StepFunction::new(vals.clone()).unwrap();
            let rel = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(b.abs());
            prop_assert!(rel(p_functional(g, &f, &mu).unwrap(), p_functional(&h, &f, &mu).unwrap()));
            prop_assert!(rel(quasi_mean(g, &vals, mu.weights()).unwrap(), quasi_mean(&h, &vals, mu.weights()).unwrap()));
            prop_assert!(rel(mulholland_sum(g, vals[0], vals[1]).unwrap(), mulholland_sum(&h, vals[0], vals[1]).unwrap()));
        }

        #[test]
        fn quasi_mean_between_extremes(a in prop::collection::vec(0.0f64..10.0, 1..6), which in 0usize..6) {
            let g = &builtins()[which];
            let q = vec![1.0 / a.len() as f64; a.len()];
            let m = quasi_mean(g, &a, &q).unwrap();
            let lo = a.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= m && m <= hi);
        }

        #[test]
        fn power_means_increase_with_exponent(vals in prop::collection::vec(0.1f64..10.0, 2..5), p in 0.2f64..6.0, dp in 0.05f64..3.0) {
            prop_assume!(vals.iter().any(|v| (v - vals[0]).abs() > 1e-3));
            let mu = MeasureSpace::uniform(vals.len()).unwrap();
            let f = StepFunction::new(vals).unwrap();
            let lo = p_functional(&Generator::power(1.0, p).unwrap(), &f, &mu).unwrap();
            let hi = p_functional(&Generator::power(1.0, p + dp).unwrap(), &f, &mu).unwrap();
            prop_assert!(lo < hi);
        }
    }
}
