//! Characterization probes: grid concavity scans, the power Hessian
//! criterion, power-law detectors, optimality searches over power maps
//! `t ↦ t^r`, and seeded counterexample search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{p_functional, quasi_mean, Generator, GeneratorPair};
use crate::inequalities::{
    generalized_minkowski_report, holder_report, minkowski_triangle_report, mulholland_report,
    quasi_mean_midpoint_report, reversed_holder_report, scale_of, Direction, InequalityReport,
};
use crate::measure::{MeasureSpace, StepFunction};

// ---------------------------------------------------------------------------
// Concavity of F(s,t) = φ⁻¹(s)·ψ⁻¹(t)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
    pub steps: usize,
}

impl GridSpec {
    pub fn new(s_range: (f64, f64), t_range: (f64, f64), steps: usize) -> Result<Self> {
        let ok = |(a, b): (f64, f64)| a > 0.0 && b > a && b.is_finite();
        if !ok(s_range) || !ok(t_range) {
            return Err(Error::Validation(format!(
                "grid ranges must be positive and increasing, got {s_range:?} and {t_range:?}"
            )));
        }
        if steps < 3 {
            return Err(Error::Validation(format!("grid needs at least 3 steps, got {steps}")));
        }
        Ok(GridSpec { s_range, t_range, steps })
    }

    /// Points of the half-step grid; even indices are the grid proper.
    fn half_points(range: (f64, f64), steps: usize) -> Vec<f64> {
        let m = 2 * (steps - 1);
        (0..=m)
            .map(|i| range.0 + (range.1 - range.0) * i as f64 / m as f64)
            .collect()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            s_range: (0.05, 10.0),
            t_range: (0.05, 10.0),
            steps: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolatingTriple {
    pub point1: (f64, f64),
    pub point2: (f64, f64),
    /// `(F(P) + F(Q))/2 − F((P+Q)/2)`, relative to `max(1, |F|)`.
    pub midpoint_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityVerdict {
    pub concave_on_grid: bool,
    pub worst_violation: f64,
    pub violating_triple: Option<ViolatingTriple>,
    pub grid: GridSpec,
    pub tolerance: f64,
}

/// `F` on the half-step grid, indexed `[a][b]`.
struct HalfGrid {
    s: Vec<f64>,
    t: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl HalfGrid {
    fn new(pair: &GeneratorPair, grid: &GridSpec) -> Result<Self> {
        let s = GridSpec::half_points(grid.s_range, grid.steps);
        let t = GridSpec::half_points(grid.t_range, grid.steps);
        let phi_inv = s.iter().map(|x| pair.phi.inverse(*x)).collect::<Result<Vec<_>>>()?;
        let psi_inv = t.iter().map(|x| pair.psi.inverse(*x)).collect::<Result<Vec<_>>>()?;
        let values = phi_inv
            .iter()
            .map(|a| psi_inv.iter().map(|b| a * b).collect())
            .collect();
        Ok(HalfGrid { s, t, values })
    }

    fn defect(&self, (i, j): (usize, usize), (k, l): (usize, usize)) -> f64 {
        let fp = self.values[2 * i][2 * j];
        let fq = self.values[2 * k][2 * l];
        let fm = self.values[i + k][j + l];
        (0.5 * (fp + fq) - fm) / 1f64.max(fp.abs()).max(fq.abs()).max(fm.abs())
    }
}

/// Midpoint-concavity test of `F(s,t) = φ⁻¹(s)ψ⁻¹(t)` over all pairs of grid points.
pub fn concavity_scan(pair: &GeneratorPair, grid: &GridSpec, tol: f64) -> Result<ConcavityVerdict> {
    let hg = HalfGrid::new(pair, grid)?;
    let n = grid.steps;
    let points: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut worst = 0.0;
    let mut triple = None;
    for (a, &p) in points.iter().enumerate() {
        for &q in &points[a + 1..] {
            let d = hg.defect(p, q);
            if d > worst {
                worst = d;
                triple = Some(ViolatingTriple {
                    point1: (hg.s[2 * p.0], hg.t[2 * p.1]),
                    point2: (hg.s[2 * q.0], hg.t[2 * q.1]),
                    midpoint_defect: d,
                });
            }
        }
    }
    let concave = worst <= tol;
    Ok(ConcavityVerdict {
        concave_on_grid: concave,
        worst_violation: worst,
        violating_triple: if concave { None } else { triple },
        grid: *grid,
        tolerance: tol,
    })
}

/// For every half-grid point, the largest relative midpoint defect among
/// grid pairs whose midpoint it is. Rows are `(s, t, defect)`.
pub fn concavity_defect_grid(pair: &GeneratorPair, grid: &GridSpec) -> Result<Vec<(f64, f64, f64)>> {
    let hg = HalfGrid::new(pair, grid)?;
    let n = grid.steps;
    let m = 2 * n - 1;
    let mut best = vec![vec![f64::NEG_INFINITY; m]; m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let d = hg.defect((i, j), (k, l));
                    let cell = &mut best[i + k][j + l];
                    if d > *cell {
                        *cell = d;
                    }
                }
            }
        }
    }
    let mut rows = Vec::with_capacity(m * m);
    for (a, row) in best.iter().enumerate() {
        for (b, d) in row.iter().enumerate() {
            rows.push((hg.s[a], hg.t[b], *d));
        }
    }
    Ok(rows)
}

/// One cell of a scan over power pairs `(t^p, t^q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub p: f64,
    pub q: f64,
    /// `1/p + 1/q ≤ 1`
    pub predicate: bool,
    pub concave_on_grid: bool,
    /// Some 4-neighbour has the opposite predicate value.
    pub boundary: bool,
    pub worst_violation: f64,
}

impl RegionCell {
    pub fn agrees(&self) -> bool {
        self.predicate == self.concave_on_grid
    }
}

/// Concavity verdicts for `(t^p, t^q)` across a `p × q` lattice.
pub fn conjugacy_region_scan(ps: &[f64], qs: &[f64], grid: &GridSpec, tol: f64) -> Result<Vec<RegionCell>> {
    if ps.is_empty() || qs.is_empty() {
        return Err(Error::Validation("exponent ranges must be non-empty".into()));
    }
    let pred = |p: f64, q: f64| 1.0 / p + 1.0 / q <= 1.0;
    let mut cells = Vec::with_capacity(ps.len() * qs.len());
    for (i, &p) in ps.iter().enumerate() {
        for (j, &q) in qs.iter().enumerate() {
            let verdict = concavity_scan(&GeneratorPair::powers(p, q)?, grid, tol)?;
            let here = pred(p, q);
            let mut neighbours = Vec::new();
            if i > 0 {
                neighbours.push((ps[i - 1], q));
            }
            if i + 1 < ps.len() {
                neighbours.push((ps[i + 1], q));
            }
            if j > 0 {
                neighbours.push((p, qs[j - 1]));
            }
            if j + 1 < qs.len() {
                neighbours.push((p, qs[j + 1]));
            }
            cells.push(RegionCell {
                p,
                q,
                predicate: here,
                concave_on_grid: verdict.concave_on_grid,
                boundary: neighbours.iter().any(|&(a, b)| pred(a, b) != here),
                worst_violation: verdict.worst_violation,
            });
        }
    }
    Ok(cells)
}

// ---------------------------------------------------------------------------
// Hessian of s^{1/p} t^{1/q}
// ---------------------------------------------------------------------------

/// Determinant of the Hessian of `s^{1/p} t^{1/q}` at `(1,1)`:
/// `(1/pq)·(1 − (1/p + 1/q))`.
pub fn power_hessian_det(p: f64, q: f64) -> Result<f64> {
    if p == 0.0 || q == 0.0 || !p.is_finite() || !q.is_finite() {
        return Err(Error::Domain {
            generator: "hessian".into(),
            value: if p == 0.0 || !p.is_finite() { p } else { q },
        });
    }
    Ok((1.0 / (p * q)) * (1.0 - (1.0 / p + 1.0 / q)))
}

/// Central-difference Hessian determinant of `s^{1/p} t^{1/q}` at `point`,
/// divided by `s^{2/p−2} t^{2/q−2}` so it is comparable with
/// [`power_hessian_det`]. `h` defaults to `1e-4·max(s, t)`.
pub fn hessian_fd_check(p: f64, q: f64, point: (f64, f64), h: Option<f64>) -> Result<f64> {
    power_hessian_det(p, q)?;
    let (s, t) = point;
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::Domain {
            generator: "hessian".into(),
            value: s.min(t),
        });
    }
    let h = h.unwrap_or(1e-4 * s.max(t));
    if !(h > 0.0 && h < s && h < t) {
        return Err(Error::Validation(format!("step {h} must be positive and below both coordinates")));
    }
    let f = |x: f64, y: f64| x.powf(1.0 / p) * y.powf(1.0 / q);
    let f0 = f(s, t);
    let fss = (f(s + h, t) - 2.0 * f0 + f(s - h, t)) / (h * h);
    let ftt = (f(s, t + h) - 2.0 * f0 + f(s, t - h)) / (h * h);
    let fst = (f(s + h, t + h) - f(s + h, t - h) - f(s - h, t + h) + f(s - h, t - h)) / (4.0 * h * h);
    let det = fss * ftt - fst * fst;
    Ok(det / (s.powf(2.0 / p - 2.0) * t.powf(2.0 / q - 2.0)))
}

// ---------------------------------------------------------------------------
// Power-law detectors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub c: f64,
    pub p: f64,
    pub max_relative_residual: f64,
}

/// Least squares of `log φ(t) = log c + p·log t` over the grid.
pub fn power_fit(gen: &Generator, grid: &[f64]) -> Result<PowerFit> {
    if grid.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::Validation("power fit grid must be positive".into()));
    }
    let mut distinct = grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Validation("power fit needs at least 3 distinct grid points".into()));
    }
    let mut pts = Vec::with_capacity(grid.len());
    for &t in grid {
        let y = gen.eval(t)?;
        if y <= 0.0 {
            return Err(Error::Domain {
                generator: gen.to_string(),
                value: t,
            });
        }
        pts.push((t.ln(), y.ln(), t, y));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let p = sxy / sxx;
    let c = (my - p * mx).exp();
    let max_relative_residual = pts
        .iter()
        .map(|&(_, _, t, y)| (c * t.powf(p) - y).abs() / y)
        .fold(0.0, f64::max);
    Ok(PowerFit {
        c,
        p,
        max_relative_residual,
    })
}

/// `max |φ̂(xy) − φ̂(x)φ̂(y)| / φ̂(xy)` with `φ̂ = φ/φ(1)`.
pub fn multiplicativity_check(gen: &Generator, pairs: &[(f64, f64)]) -> Result<f64> {
    let unit = gen.eval(1.0)?;
    if unit == 0.0 {
        return Err(Error::Degenerate("φ(1) = 0".into()));
    }
    let norm = |t: f64| gen.eval(t).map(|y| y / unit);
    let mut worst: f64 = 0.0;
    for &(x, y) in pairs {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Validation(format!("pair ({x}, {y}) must be positive")));
        }
        let whole = norm(x * y)?;
        worst = worst.max((whole - norm(x)? * norm(y)?).abs() / whole);
    }
    Ok(worst)
}

/// All pairs from a grid, in lexicographic order.
pub fn grid_pairs(grid: &[f64]) -> Vec<(f64, f64)> {
    grid.iter().flat_map(|x| grid.iter().map(move |y| (*x, *y))).collect()
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` geometrically spaced points on `[lo, hi]`.
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect();
    // exp∘ln is not exact; keep the endpoints inside tabulated domains.
    if let Some(first) = pts.first_mut() {
        *first = lo;
    }
    if n > 1 {
        pts[n - 1] = hi;
    }
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HardyStatus {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub status: HardyStatus,
    pub positive: bool,
    pub ratio_concave: bool,
    /// Grid point with the worst positivity or concavity defect.
    pub worst_point: Option<f64>,
    pub worst_defect: f64,
}

const CURVATURE_FLOOR: f64 = 1e-6;
const RATIO_TOLERANCE: f64 = 1e-6;

/// Checks that `φ, φ′, φ″ > 0` and that `φ′/φ″` is concave on the grid,
/// using central differences with relative step `h` (default `1e-4`).
pub fn hardy_condition_check(gen: &Generator, grid: &[f64], h: Option<f64>) -> Result<HardyReport> {
    let h = h.unwrap_or(1e-4);
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::Validation(format!("relative step {h} must lie in (0, 0.5)")));
    }
    let mut ts = grid.to_vec();
    if ts.len() < 3 || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Validation("hardy check needs at least 3 positive grid points".into()));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    let mut ratio = Vec::with_capacity(ts.len());
    let mut positive = true;
    let mut worst_point = None;
    let mut worst_defect: f64 = 0.0;
    for &t in &ts {
        let step = h * t;
        let (lo, mid, hi) = (gen.eval(t - step)?, gen.eval(t)?, gen.eval(t + step)?);
        let d1 = (hi - lo) / (2.0 * step);
        let d2 = (hi - 2.0 * mid + lo) / (step * step);
        if d2.abs() * t <= CURVATURE_FLOOR * d1.abs().max(f64::MIN_POSITIVE) {
            return Ok(HardyReport {
                status: HardyStatus::Indeterminate,
                positive: mid > 0.0 && d1 > 0.0,
                ratio_concave: false,
                worst_point: Some(t),
                worst_defect: d2,
            });
        }
        if !(mid > 0.0 && d1 > 0.0 && d2 > 0.0) {
            if positive {
                worst_point = Some(t);
            }
            positive = false;
        }
        ratio.push((t, d1 / d2));
    }
    let mut ratio_concave = true;
    for w in ratio.windows(3) {
        let ((t0, r0), (t1, r1), (t2, r2)) = (w[0], w[1], w[2]);
        let chord = r0 + (r2 - r0) * (t1 - t0) / (t2 - t0);
        let defect = (chord - r1) / 1f64.max(r0.abs()).max(r1.abs()).max(r2.abs());
        if defect > worst_defect {
            worst_defect = defect;
            if positive {
                worst_point = Some(t1);
            }
        }
        if defect > RATIO_TOLERANCE {
            ratio_concave = false;
        }
    }
    let status = if positive && ratio_concave {
        HardyStatus::Pass
    } else {
        HardyStatus::Fail
    };
    Ok(HardyReport {
        status,
        positive,
        ratio_concave,
        worst_point: if status == HardyStatus::Pass { None } else { worst_point },
        worst_defect,
    })
}

// ---------------------------------------------------------------------------
// Optimality searches over power maps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityResult {
    pub best_exponent: f64,
    pub min_gap: f64,
    pub searched_family: String,
    pub achieved_equality: bool,
    pub tolerance: f64,
    /// Equality is only sought among power maps, so a miss is evidence, not proof.
    pub note: String,
}

const GOLDEN_ITER: usize = 200;

/// Grid scan plus golden-section refinement of `r ↦ gap(r)` on `range`.
fn minimize_exponent(range: (f64, f64), steps: usize, gap: impl Fn(f64) -> Option<InequalityReport>) -> Result<(f64, InequalityReport)> {
    if !(range.0 < range.1) || !range.0.is_finite() || !range.1.is_finite() {
        return Err(Error::Validation(format!("exponent range {range:?} must be increasing")));
    }
    if steps < 3 {
        return Err(Error::Validation(format!("exponent scan needs at least 3 steps, got {steps}")));
    }
    let rs = linspace(range.0, range.1, steps);
    let obj = |r: f64| gap(r).map(|rep| (rep.gap, rep));
    let mut best: Option<(usize, f64, InequalityReport)> = None;
    for (i, &r) in rs.iter().enumerate() {
        if let Some((g, rep)) = obj(r) {
            if best.as_ref().is_none_or(|b| g < b.1) {
                best = Some((i, g, rep));
            }
        }
    }
    let (i, _, rep) = best.ok_or_else(|| Error::Degenerate("no exponent in range could be evaluated".into()))?;
    let mut result = (rs[i], rep);

    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (rs[i.saturating_sub(1)], rs[(i + 1).min(steps - 1)]);
    let val = |r: f64| obj(r).map(|x| x.0).unwrap_or(f64::INFINITY);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (val(c), val(d));
    for _ in 0..GOLDEN_ITER {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = val(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = val(d);
        }
    }
    for r in [c, d] {
        if let Some((g, rep)) = obj(r) {
            if g < result.1.gap {
                result = (r, rep);
            }
        }
    }
    Ok(result)
}

fn optimality_result(r: f64, rep: InequalityReport, family: String, tol: f64) -> OptimalityResult {
    OptimalityResult {
        best_exponent: r,
        min_gap: rep.gap,
        searched_family: family,
        achieved_equality: rep.is_equality,
        tolerance: tol,
        note: "searched power maps only; failure to reach equality is evidence, not proof".into(),
    }
}

/// Smallest Hölder gap over `g = f^r`, `r ∈ range`.
pub fn optimality_search(
    pair: &GeneratorPair,
    f: &StepFunction,
    mu: &MeasureSpace,
    range: (f64, f64),
    steps: usize,
    tol: f64,
) -> Result<OptimalityResult> {
    f.check_space(mu)?;
    if f.is_zero() {
        return Err(Error::Degenerate("optimality search needs f not identically zero".into()));
    }
    let (r, rep) = minimize_exponent(range, steps, |r| {
        let g = f.powf(r).ok()?;
        holder_report(pair, f, &g, mu, tol).ok()
    })?;
    Ok(optimality_result(r, rep, format!("g = f^r, r in [{}, {}]", range.0, range.1), tol))
}

/// Smallest reversed-Hölder gap over `f = g^r` on `supp g`, `r ∈ range`.
pub fn reversed_optimality_search(
    pair: &GeneratorPair,
    g: &StepFunction,
    mu: &MeasureSpace,
    range: (f64, f64),
    steps: usize,
    tol: f64,
) -> Result<OptimalityResult> {
    g.check_space(mu)?;
    if g.is_zero() {
        return Err(Error::Degenerate("reversed optimality search needs g not identically zero".into()));
    }
    let (r, rep) = minimize_exponent(range, steps, |r| {
        let f = g.powf(r).ok()?;
        reversed_holder_report(pair, &f, g, mu, tol).ok()
    })?;
    Ok(optimality_result(r, rep, format!("f = g^r on supp g, r in [{}, {}]", range.0, range.1), tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrictGap {
    /// `P` with the smaller exponent.
    pub lower: f64,
    pub upper: f64,
    pub margin: f64,
    pub strict: bool,
}

/// Power means `P_{t^{p'}}(f) < P_{t^p}(f)` for non-constant `f` on a probabilistic space.
pub fn strict_gap_demo(p: f64, p_prime: f64, f: &StepFunction, mu: &MeasureSpace, tol: f64) -> Result<StrictGap> {
    if !(p_prime < p) {
        return Err(Error::Precondition(format!("need p' < p, got p'={p_prime}, p={p}")));
    }
    if !mu.is_probabilistic() {
        return Err(Error::Precondition(format!(
            "space has mass {}, not 1",
            mu.total_mass()
        )));
    }
    f.check_space(mu)?;
    let charged: Vec<f64> = f
        .values()
        .iter()
        .zip(mu.weights())
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, _)| *v)
        .collect();
    if charged.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::Precondition("f is constant; power means coincide".into()));
    }
    let lower = p_functional(&Generator::power(1.0, p_prime)?, f, mu)?;
    let upper = p_functional(&Generator::power(1.0, p)?, f, mu)?;
    let margin = upper - lower;
    Ok(StrictGap {
        lower,
        upper,
        margin,
        strict: margin > tol * scale_of(lower, upper),
    })
}

/// Worst relative difference of the two-point means `M(t, u)` with weights `(½, ½)`.
pub fn functional_equivalence_scan(gen_a: &Generator, gen_b: &Generator, samples: &[(f64, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(t, u) in samples {
        if !(t > 0.0 && u > 0.0) {
            return Err(Error::Validation(format!("sample ({t}, {u}) must be positive")));
        }
        let a = quasi_mean(gen_a, &[t, u], &[0.5, 0.5])?;
        let b = quasi_mean(gen_b, &[t, u], &[0.5, 0.5])?;
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Counterexample search
// ---------------------------------------------------------------------------

/// Inequality whose inputs a search varies. The free variables are the
/// positive values of the step functions (or the quadruple), in order.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchTarget {
    Holder { pair: GeneratorPair, mu: MeasureSpace },
    ReversedHolder { pair: GeneratorPair, mu: MeasureSpace },
    Minkowski { gen: Generator, mu: MeasureSpace },
    GeneralizedMinkowski {
        pair: GeneratorPair,
        mu: MeasureSpace,
        nu: MeasureSpace,
        direction: Direction,
    },
    Mulholland { gen: Generator, direction: Direction },
    QuasiMeanMidpoint { gen: Generator, weights: Vec<f64> },
}

impl SearchTarget {
    pub fn name(&self) -> &'static str {
        match self {
            SearchTarget::Holder { .. } => "holder",
            SearchTarget::ReversedHolder { .. } => "reversed-holder",
            SearchTarget::Minkowski { .. } => "minkowski",
            SearchTarget::GeneralizedMinkowski { .. } => "genmink",
            SearchTarget::Mulholland { .. } => "mulholland",
            SearchTarget::QuasiMeanMidpoint { .. } => "quasimean",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            SearchTarget::Holder { mu, .. }
            | SearchTarget::ReversedHolder { mu, .. }
            | SearchTarget::Minkowski { mu, .. } => 2 * mu.atom_count(),
            SearchTarget::GeneralizedMinkowski { mu, nu, .. } => mu.atom_count() * nu.atom_count(),
            SearchTarget::Mulholland { .. } => 4,
            SearchTarget::QuasiMeanMidpoint { weights, .. } => 2 * weights.len(),
        }
    }

    /// Report for the point with the given (positive) coordinates.
    pub fn evaluate(&self, x: &[f64], tol: f64) -> Result<InequalityReport> {
        if x.len() != self.dimension() {
            return Err(Error::Validation(format!(
                "target {} takes {} values, got {}",
                self.name(),
                self.dimension(),
                x.len()
            )));
        }
        let halves = || -> Result<(StepFunction, StepFunction)> {
            let (a, b) = x.split_at(x.len() / 2);
            Ok((StepFunction::new(a.to_vec())?, StepFunction::new(b.to_vec())?))
        };
        match self {
            SearchTarget::Holder { pair, mu } => {
                let (f, g) = halves()?;
                holder_report(pair, &f, &g, mu, tol)
            }
            SearchTarget::ReversedHolder { pair, mu } => {
                let (f, g) = halves()?;
                reversed_holder_report(pair, &f, &g, mu, tol)
            }
            SearchTarget::Minkowski { gen, mu } => {
                let (f, g) = halves()?;
                minkowski_triangle_report(gen, &f, &g, mu, tol)
            }
            SearchTarget::GeneralizedMinkowski { pair, mu, nu, direction } => {
                let big_f = StepFunction::new(x.to_vec())?;
                generalized_minkowski_report(pair, &big_f, mu, nu, *direction, tol)
            }
            SearchTarget::Mulholland { gen, direction } => {
                mulholland_report(gen, [x[0], x[1], x[2], x[3]], *direction, tol)
            }
            SearchTarget::QuasiMeanMidpoint { gen, weights } => {
                let (a, b) = x.split_at(x.len() / 2);
                quasi_mean_midpoint_report(gen, a, b, weights, tol)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Total number of objective evaluations.
    pub budget: u64,
    pub seed: u64,
    pub tolerance: f64,
    /// Evaluations per restart.
    pub restart_budget: u64,
    /// Start points are drawn uniformly in `[ln lo, ln hi]` per coordinate.
    pub start_range: (f64, f64),
    /// Worker threads for restarts; the result does not depend on it.
    pub jobs: usize,
}

impl SearchConfig {
    pub fn new(budget: u64, seed: u64) -> Self {
        SearchConfig {
            budget,
            seed,
            ..SearchConfig::default()
        }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 10_000,
            seed: 0,
            tolerance: crate::inequalities::DEFAULT_TOLERANCE,
            restart_budget: 500,
            start_range: (0.05, 20.0),
            jobs: 1,
        }
    }
}

/// Margin below which a gap counts as a certified violation, in units of `tolerance·scale`.
pub const CERTIFY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub target: String,
    pub seed: u64,
    pub budget: u64,
    /// Evaluations spent up to and including the certifying one.
    pub evaluations: u64,
    pub restart: u64,
    pub report: InequalityReport,
}

pub fn is_certified(report: &InequalityReport) -> bool {
    report.gap < -CERTIFY_FACTOR * report.tolerance * report.scale()
}

struct RestartResult {
    evaluations: u64,
    found: Option<InequalityReport>,
}

fn run_restart(target: &SearchTarget, config: &SearchConfig, index: u64, budget: u64) -> RestartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    let (lo, hi) = (config.start_range.0.ln(), config.start_range.1.ln());
    let dim = target.dimension();
    let mut evaluations = 0;
    let eval = |x: &[f64], evaluations: &mut u64| -> Option<InequalityReport> {
        *evaluations += 1;
        let values: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        target.evaluate(&values, config.tolerance).ok()
    };
    let objective = |rep: &Option<InequalityReport>| rep.as_ref().map_or(f64::INFINITY, |r| r.relative_gap());

    let mut x: Vec<f64> = (0..dim).map(|_| rng.gen_range(lo..hi)).collect();
    let first = eval(&x, &mut evaluations);
    if let Some(rep) = first.as_ref().filter(|r| is_certified(r)) {
        return RestartResult {
            evaluations,
            found: Some(rep.clone()),
        };
    }
    let mut best = objective(&first);
    let mut step = 1.0;
    while evaluations < budget && step > 1e-6 {
        let mut improved = false;
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                if evaluations >= budget {
                    break;
                }
                let mut trial = x.clone();
                trial[i] += sign * step;
                let rep = eval(&trial, &mut evaluations);
                let value = objective(&rep);
                if value < best {
                    if rep.as_ref().is_some_and(is_certified) {
                        return RestartResult {
                            evaluations,
                            found: rep,
                        };
                    }
                    x = trial;
                    best = value;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    RestartResult {
        evaluations,
        found: None,
    }
}

/// Random restarts with coordinate-wise local search in log coordinates,
/// minimizing the relative gap. Restart `k` draws from stream `k` of a
/// ChaCha generator keyed by the seed, and the winning restart is the
/// lowest-indexed one that certifies a violation, so the outcome is the
/// same for any number of jobs.
pub fn counterexample_search(target: &SearchTarget, config: &SearchConfig) -> Result<Option<SearchOutcome>> {
    if config.budget == 0 {
        return Err(Error::Validation("search budget must be positive".into()));
    }
    if config.restart_budget == 0 {
        return Err(Error::Validation("restart budget must be positive".into()));
    }
    if !(config.start_range.0 > 0.0 && config.start_range.1 > config.start_range.0) {
        return Err(Error::Validation("start range must be positive and increasing".into()));
    }
    let restarts = config.budget.div_ceil(config.restart_budget);
    let budget_of = |k: u64| config.restart_budget.min(config.budget - k * config.restart_budget);
    let jobs = config.jobs.max(1);
    let pool = if jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Validation(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };

    let batch = (jobs * 4) as u64;
    let mut spent = 0;
    let mut start = 0;
    while start < restarts {
        let end = (start + batch).min(restarts);
        let results: Vec<RestartResult> = match &pool {
            Some(pool) => pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|k| run_restart(target, config, k, budget_of(k)))
                    .collect()
            }),
            None => (start..end).map(|k| run_restart(target, config, k, budget_of(k))).collect(),
        };
        for (k, res) in (start..end).zip(results) {
            spent += res.evaluations;
            if let Some(report) = res.found {
                return Ok(Some(SearchOutcome {
                    target: target.name().to_string(),
                    seed: config.seed,
                    budget: config.budget,
                    evaluations: spent,
                    restart: k,
                    report,
                }));
            }
        }
        start = end;
    }
    Ok(None)
}

/// Probability weights drawn uniformly from `[0.05, 1]` and normalized.
pub fn random_probabilistic_space<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MeasureSpace> {
    random_space_with_mass(n, 1.0, rng)
}

pub fn random_space_with_mass<R: Rng + ?Sized>(n: usize, mass: f64, rng: &mut R) -> Result<MeasureSpace> {
    if n == 0 {
        return Err(Error::Validation("random space needs at least one atom".into()));
    }
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    MeasureSpace::new(raw.into_iter().map(|w| mass * w / total).collect())
}
