//! Finite atomic measure spaces and non-negative step functions over them.
//!
//! Every integrable step function on an arbitrary measure space only sees
//! finitely many measurable sets, so a list of atom weights is a lossless
//! model. Product spaces are laid out row-major with the X index outer:
//! `flat = x * ny + y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether a space is probabilistic.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A finite measure space given by the mass of each atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct MeasureSpace {
    weights: Vec<f64>,
    total_mass: f64,
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl TryFrom<RawSpace> for MeasureSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        let space = MeasureSpace::new(raw.weights)?;
        Ok(match raw.label {
            Some(label) => space.with_label(label),
            None => space,
        })
    }
}

impl From<MeasureSpace> for RawSpace {
    fn from(space: MeasureSpace) -> Self {
        RawSpace {
            weights: space.weights,
            label: space.label,
        }
    }
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Validation("measure space needs at least one atom".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::Validation(format!(
                "atom {i} has weight {w}; weights must be finite and non-negative"
            )));
        }
        let total_mass = weights.iter().sum();
        Ok(MeasureSpace {
            weights,
            total_mass,
            label: None,
        })
    }

    /// `n` atoms of mass `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("uniform space needs at least one atom".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_probabilistic(&self) -> bool {
        (self.total_mass - 1.0).abs() <= MASS_TOLERANCE
    }

    /// Product measure `self ⊗ nu`, row-major with `self` as the outer index.
    pub fn product(&self, nu: &MeasureSpace) -> Result<MeasureSpace> {
        let count = self
            .atom_count()
            .checked_mul(nu.atom_count())
            .ok_or(Error::Size {
                x_atoms: self.atom_count(),
                y_atoms: nu.atom_count(),
            })?;
        let mut weights = Vec::with_capacity(count);
        for wx in &self.weights {
            weights.extend(nu.weights.iter().map(|wy| wx * wy));
        }
        let space = MeasureSpace::new(weights)?;
        Ok(match (self.label(), nu.label()) {
            (Some(x), Some(y)) => space.with_label(format!("{x}x{y}")),
            _ => space,
        })
    }

    pub fn integrate(&self, f: &StepFunction) -> Result<f64> {
        f.check_space(self)?;
        Ok(f.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum())
    }
}

/// Convenience wrapper for `mu.product(nu)`.
pub fn product_space(mu: &MeasureSpace, nu: &MeasureSpace) -> Result<MeasureSpace> {
    mu.product(nu)
}

/// `Σ values[i]·weights[i]`.
pub fn integrate(f: &StepFunction, mu: &MeasureSpace) -> Result<f64> {
    mu.integrate(f)
}

/// A non-negative step function: one value per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunction", into = "RawFunction")]
pub struct StepFunction {
    values: Vec<f64>,
    space: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawFunction {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    space: Option<String>,
    values: Vec<f64>,
}

impl TryFrom<RawFunction> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawFunction) -> Result<Self> {
        let f = StepFunction::new(raw.values)?;
        Ok(match raw.space {
            Some(space) => f.on_space(space),
            None => f,
        })
    }
}

impl From<StepFunction> for RawFunction {
    fn from(f: StepFunction) -> Self {
        RawFunction {
            space: f.space,
            values: f.values,
        }
    }
}

/// Binary or scalar atomwise operation on step functions.
#[derive(Debug, Clone, Copy)]
pub enum Pointwise<'a> {
    Product(&'a StepFunction),
    Sum(&'a StepFunction),
    Scale(f64),
    /// `t ↦ t^r` on positive values; zero atoms stay zero for every `r`.
    Power(f64),
}

impl StepFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("step function needs at least one value".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::Validation(format!(
                "value {v} at atom {i}; step functions must be finite and non-negative"
            )));
        }
        Ok(StepFunction {
            values,
            space: None,
        })
    }

    pub fn zero(n: usize) -> Self {
        StepFunction {
            values: vec![0.0; n.max(1)],
            space: None,
        }
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    /// Tags the function with the label of the space it lives on.
    pub fn on_space(mut self, space: impl Into<String>) -> Self {
        self.space = Some(space.into());
        self
    }

    pub fn space(&self) -> Option<&str> {
        self.space.as_deref()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Atoms where the function is non-zero.
    pub fn support(&self) -> Vec<bool> {
        self.values.iter().map(|v| *v > 0.0).collect()
    }

    pub fn check_space(&self, mu: &MeasureSpace) -> Result<()> {
        if self.len() != mu.atom_count() {
            return Err(Error::Validation(format!(
                "function has {} values but the space has {} atoms",
                self.len(),
                mu.atom_count()
            )));
        }
        if let (Some(a), Some(b)) = (self.space(), mu.label()) {
            if a != b {
                return Err(Error::Validation(format!(
                    "function lives on space '{a}', not '{b}'"
                )));
            }
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &StepFunction) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Validation(format!(
                "operands have {} and {} atoms",
                self.len(),
                other.len()
            )));
        }
        match (self.space(), other.space()) {
            (Some(a), Some(b)) if a != b => Err(Error::Validation(format!(
                "operands live on different spaces '{a}' and '{b}'"
            ))),
            _ => Ok(()),
        }
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<StepFunction> {
        let out = StepFunction::new(self.values.iter().map(|v| f(*v)).collect())?;
        Ok(StepFunction {
            space: self.space.clone(),
            ..out
        })
    }

    fn zip_values(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        self.check_same_shape(other)?;
        let out = StepFunction::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        )?;
        Ok(StepFunction {
            space: self.space.clone().or_else(|| other.space.clone()),
            ..out
        })
    }

    pub fn product(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_values(other, |a, b| a * b)
    }

    pub fn sum(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_values(other, |a, b| a + b)
    }

    pub fn scale(&self, c: f64) -> Result<StepFunction> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::Validation(format!("scale factor {c} must be non-negative")));
        }
        self.map_values(|v| c * v)
    }

    /// Atomwise `t ↦ t^r` with `0 ↦ 0`, i.e. the map `χ(t) = t^r` with `χ(0) = 0`.
    pub fn powf(&self, r: f64) -> Result<StepFunction> {
        if !r.is_finite() {
            return Err(Error::Validation(format!("exponent {r} must be finite")));
        }
        self.map_values(|v| if v == 0.0 { 0.0 } else { v.powf(r) })
    }

    /// Zeroes every atom where `mask` is false.
    pub fn masked(&self, mask: &[bool]) -> Result<StepFunction> {
        if mask.len() != self.len() {
            return Err(Error::Validation("mask length does not match function".into()));
        }
        let values = self
            .values
            .iter()
            .zip(mask)
            .map(|(v, keep)| if *keep { *v } else { 0.0 })
            .collect();
        Ok(StepFunction {
            values,
            space: self.space.clone(),
        })
    }
}

pub fn pointwise(f: &StepFunction, op: Pointwise<'_>) -> Result<StepFunction> {
    match op {
        Pointwise::Product(g) => f.product(g),
        Pointwise::Sum(g) => f.sum(g),
        Pointwise::Scale(c) => f.scale(c),
        Pointwise::Power(r) => f.powf(r),
    }
}

/// Position of an atom of `X × Y` in the row-major layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductIndex {
    pub x_index: usize,
    pub y_index: usize,
    pub flat_index: usize,
}

/// `X × Y` together with its factors, for slicing functions on the product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    x: MeasureSpace,
    y: MeasureSpace,
    joint: MeasureSpace,
}

impl ProductSpace {
    pub fn new(x: &MeasureSpace, y: &MeasureSpace) -> Result<Self> {
        Ok(ProductSpace {
            joint: x.product(y)?,
            x: x.clone(),
            y: y.clone(),
        })
    }

    pub fn x(&self) -> &MeasureSpace {
        &self.x
    }

    pub fn y(&self) -> &MeasureSpace {
        &self.y
    }

    pub fn joint(&self) -> &MeasureSpace {
        &self.joint
    }

    pub fn index(&self, x_index: usize, y_index: usize) -> Result<ProductIndex> {
        if x_index >= self.x.atom_count() || y_index >= self.y.atom_count() {
            return Err(Error::Validation(format!(
                "index ({x_index}, {y_index}) outside {} x {} product",
                self.x.atom_count(),
                self.y.atom_count()
            )));
        }
        Ok(ProductIndex {
            x_index,
            y_index,
            flat_index: x_index * self.y.atom_count() + y_index,
        })
    }

    /// Builds a function on `X × Y` from rows indexed by `x`.
    pub fn function_from_rows(&self, rows: &[Vec<f64>]) -> Result<StepFunction> {
        if rows.len() != self.x.atom_count() || rows.iter().any(|r| r.len() != self.y.atom_count()) {
            return Err(Error::Validation(format!(
                "expected {} rows of {} values",
                self.x.atom_count(),
                self.y.atom_count()
            )));
        }
        StepFunction::new(rows.concat())
    }

    /// `x ↦ F(x, y)` for a fixed `y`.
    pub fn slice_y(&self, big_f: &StepFunction, y_index: usize) -> Result<StepFunction> {
        big_f.check_space(&self.joint)?;
        if y_index >= self.y.atom_count() {
            return Err(Error::Validation(format!(
                "y index {y_index} out of range for {} atoms",
                self.y.atom_count()
            )));
        }
        let ny = self.y.atom_count();
        StepFunction::new(
            (0..self.x.atom_count())
                .map(|x| big_f.values[x * ny + y_index])
                .collect(),
        )
    }

    /// `G(x) = ∫_Y F(x, y) ν(dy)`.
    pub fn partial_integral_y(&self, big_f: &StepFunction) -> Result<StepFunction> {
        big_f.check_space(&self.joint)?;
        let ny = self.y.atom_count();
        StepFunction::new(
            big_f
                .values
                .chunks(ny)
                .map(|row| row.iter().zip(self.y.weights()).map(|(v, w)| v * w).sum())
                .collect(),
        )
    }
}
