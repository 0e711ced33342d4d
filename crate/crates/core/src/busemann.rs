//! Busemann functions, horospheres and horosphere symmetries of `Rⁿ`, seen
//! as `X_ω` with `ω = ∞`.
//!
//! The closed forms are primary. The limit definitions are kept as oracles:
//! `b(x) = lim |x c(t)| - t` and the horosphere symmetry as the limit of the
//! strong inversions `φ_t` in the spheres `|x c(t)| = t`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{strong_inversion, CircleOrLine, MapWord, ModelPoint, MoebiusMapNF, SphereSpec};

const UNIT_TOL: f64 = 1e-12;

/// Unit speed line `c(t) = x₀ + t·u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamLine {
    base: DVector<f64>,
    direction: DVector<f64>,
}

impl ParamLine {
    /// Requires `|u| = 1` within `1e-12`.
    pub fn new(base: DVector<f64>, direction: DVector<f64>) -> Result<Self> {
        if base.len() != direction.len() {
            return Err(Error::Dimension { expected: base.len(), found: direction.len() });
        }
        if (direction.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Input(format!("direction has norm {}, expected 1", direction.norm())));
        }
        Ok(Self { base, direction })
    }

    /// Normalizes the direction.
    pub fn through(base: DVector<f64>, direction: DVector<f64>) -> Result<Self> {
        let len = direction.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::Input("line direction vanishes".into()));
        }
        Self::new(base, direction / len)
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }

    pub fn point(&self, t: f64) -> DVector<f64> {
        &self.base + &self.direction * t
    }

    /// Parameter of the orthogonal projection of `x` on the line.
    pub fn param_of(&self, x: &DVector<f64>) -> f64 {
        (x - &self.base).dot(&self.direction)
    }

    pub fn distance_to(&self, x: &DVector<f64>) -> f64 {
        (x - self.point(self.param_of(x))).norm()
    }

    pub fn reversed(&self) -> Self {
        Self { base: self.base.clone(), direction: -&self.direction }
    }

    /// Same line with `c(0)` moved to the old `c(t)`.
    pub fn reparameterized_at(&self, t: f64) -> Self {
        Self { base: self.point(t), direction: self.direction.clone() }
    }

    pub fn as_circle(&self) -> CircleOrLine {
        CircleOrLine::line(self.base.clone(), self.direction.clone()).expect("unit direction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `b^±(x) = lim_{t→∞} |x c(±t)| - t`, with closed form `-⟨x - x₀, s·u⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BusemannFn {
    pub line: ParamLine,
    pub sign: Sign,
}

impl BusemannFn {
    pub fn plus(line: ParamLine) -> Self {
        Self { line, sign: Sign::Plus }
    }

    pub fn minus(line: ParamLine) -> Self {
        Self { line, sign: Sign::Minus }
    }

    /// Unit vector `s·u` pointing along the ray.
    pub fn ray_direction(&self) -> DVector<f64> {
        self.line.direction() * self.sign.value()
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        busemann_closed(self, x)
    }

    /// `|x c(±t)| - t`.
    pub fn limit_at(&self, x: &DVector<f64>, t: f64) -> f64 {
        let ray = ParamLine { base: self.line.base.clone(), direction: self.ray_direction() };
        busemann_value_limit(&ray, x, t)
    }
}

/// `|x - c(t)| - t`, evaluated as `(|w|² - 2t⟨w,u⟩) / (|x - c(t)| + t)` with
/// `w = x - x₀` to avoid cancellation at large `t`.
pub fn busemann_value_limit(line: &ParamLine, x: &DVector<f64>, t: f64) -> f64 {
    let w = x - line.base();
    let dist = (&w - line.direction() * t).norm();
    (w.norm_squared() - 2.0 * t * w.dot(line.direction())) / (dist + t)
}

pub fn busemann_closed(b: &BusemannFn, x: &DVector<f64>) -> f64 {
    -(x - b.line.base()).dot(&b.ray_direction())
}

/// Busemann parallel line through `x`: same direction.
pub fn parallel_line_through(line: &ParamLine, x: &DVector<f64>) -> ParamLine {
    ParamLine { base: x.clone(), direction: line.direction().clone() }
}

/// `|c(t) c'(t)| / t` at `t = t_max`; tends to `0` iff the lines are parallel.
pub fn check_sublinear_divergence(l1: &ParamLine, l2: &ParamLine, t_max: f64) -> Result<f64> {
    if l1.dim() != l2.dim() {
        return Err(Error::Dimension { expected: l1.dim(), found: l2.dim() });
    }
    if !(t_max >= 1e3) {
        return Err(Error::Precondition(format!("t_max must be at least 1e3, got {t_max}")));
    }
    let gap = (l1.base() - l2.base()) + (l1.direction() - l2.direction()) * t_max;
    Ok(gap.norm() / t_max)
}

/// Level set `{x : -⟨x, normal⟩ = level}`: the horosphere of the Busemann
/// function with ray direction `normal` based at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Horosphere {
    pub normal: DVector<f64>,
    pub level: f64,
}

impl Horosphere {
    /// The horosphere of `b` through `z`.
    pub fn through(b: &BusemannFn, z: &DVector<f64>) -> Self {
        let normal = b.ray_direction();
        let level = -z.dot(&normal);
        Self { normal, level }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        -x.dot(&self.normal)
    }

    /// Signed Euclidean offset of `x` from the hyperplane.
    pub fn offset(&self, x: &DVector<f64>) -> f64 {
        self.value(x) - self.level
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.offset(x).abs() <= tol
    }

    pub fn foot(&self) -> DVector<f64> {
        &self.normal * -self.level
    }

    pub fn reflect(&self, x: &DVector<f64>) -> DVector<f64> {
        x + &self.normal * (2.0 * self.offset(x))
    }

    pub fn reflection(&self) -> MoebiusMapNF {
        MoebiusMapNF::reflection(self.foot(), &self.normal).expect("unit normal")
    }
}

/// The symmetry with respect to the horosphere `H_z` of `line` through `z`:
/// the reflection in that hyperplane.
pub fn horosphere_symmetry(line: &ParamLine, z: &DVector<f64>) -> MapWord {
    Horosphere::through(&BusemannFn::plus(line.clone()), z).reflection().into()
}

/// `φ_t`: strong inversion swapping `c(t)` and ∞ that fixes the sphere
/// `|x c(t)| = t` through `c(0)`.
pub fn phi_t(line: &ParamLine, t: f64) -> MapWord {
    let center = ModelPoint::Finite(line.point(t));
    let witness = ModelPoint::Finite(line.base().clone());
    strong_inversion(&center, &ModelPoint::Infinity, &SphereSpec::Witness(witness)).expect("distinct poles")
}

/// Geometric limit schedule `t_k = t₀·2^k`, `k < steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t0: f64,
    pub steps: usize,
}

impl Default for Schedule {
    /// Ends at `t = 10⁶`.
    fn default() -> Self {
        Self { t0: 1e6 / 1024.0, steps: 11 }
    }
}

impl Schedule {
    pub fn times(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.t0 * 2f64.powi(k as i32)).collect()
    }
}

/// Convergence study of `φ_t` towards the reflection in `H_z`, `z = c(0)`.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryLimit {
    pub ts: Vec<f64>,
    /// `sup_p |φ_t(p) - R(p)|` over the probes.
    pub errors: Vec<f64>,
    /// `sup_p |φ_{t_{k+1}}(p) - φ_{t_k}(p)|`.
    pub cauchy: Vec<f64>,
    /// `sup_{p ∈ H_z} |φ_t(p) - p|`.
    pub fixed_errors: Vec<f64>,
    /// `sup_{p ∈ H_z} |2φ_{2t}(p) - φ_t(p) - p|`: extrapolated limit on `H_z`.
    pub fixed_extrapolated: Vec<f64>,
    /// Largest probe distortion `||R(p)R(q)| - |pq||` of the snapped limit.
    pub limit_distortion: f64,
    #[serde(skip)]
    pub limit: MapWord,
}

fn finite(p: ModelPoint) -> DVector<f64> {
    match p {
        ModelPoint::Finite(v) => v,
        ModelPoint::Infinity => panic!("probe sent to infinity"),
    }
}

/// Evaluates `φ_t` along the schedule, certifies convergence by a strictly
/// decreasing Cauchy sequence of probe gaps and snaps the limit to the
/// reflection in `H_z`.
pub fn horosphere_symmetry_limit(
    line: &ParamLine,
    schedule: Schedule,
    probes: &[DVector<f64>],
    hz_probes: &[DVector<f64>],
) -> Result<SymmetryLimit> {
    if schedule.steps < 3 || !(schedule.t0 > 0.0) {
        return Err(Error::ConvergenceNotDetected(format!(
            "a schedule of {} steps from t0 = {} cannot certify convergence",
            schedule.steps, schedule.t0
        )));
    }
    let z = line.base().clone();
    let hz = Horosphere::through(&BusemannFn::plus(line.clone()), &z);
    if let Some(p) = hz_probes.iter().find(|p| !hz.contains(p, 1e-9 * (1.0 + p.norm()))) {
        return Err(Error::Precondition(format!("probe {p} is not on H_z")));
    }
    let ts = schedule.times();
    let images = |pts: &[DVector<f64>]| -> Vec<Vec<DVector<f64>>> {
        ts.iter()
            .map(|&t| {
                let phi = phi_t(line, t);
                pts.iter().map(|p| finite(phi.apply(&ModelPoint::Finite(p.clone())))).collect()
            })
            .collect()
    };
    let sup = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let moved = images(probes);
    let errors: Vec<f64> = moved
        .iter()
        .map(|imgs| sup(&mut imgs.iter().zip(probes).map(|(img, p)| (img - hz.reflect(p)).norm())))
        .collect();
    let cauchy: Vec<f64> =
        moved.windows(2).map(|w| sup(&mut w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).norm()))).collect();
    let fixed = images(hz_probes);
    let fixed_errors: Vec<f64> =
        fixed.iter().map(|imgs| sup(&mut imgs.iter().zip(hz_probes).map(|(img, p)| (img - p).norm()))).collect();
    let fixed_extrapolated: Vec<f64> = fixed
        .windows(2)
        .map(|w| sup(&mut w[0].iter().zip(&w[1]).zip(hz_probes).map(|((a, b), p)| (b * 2.0 - a - p).norm())))
        .collect();
    if !cauchy.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::ConvergenceNotDetected("probe gaps of φ_t do not decrease".into()));
    }
    let limit = horosphere_symmetry(line, &z);
    let reflected: Vec<DVector<f64>> = probes.iter().map(|p| hz.reflect(p)).collect();
    let mut limit_distortion: f64 = 0.0;
    for i in 0..probes.len() {
        for j in i + 1..probes.len() {
            let d0 = (&probes[i] - &probes[j]).norm();
            let d1 = (&reflected[i] - &reflected[j]).norm();
            limit_distortion = limit_distortion.max((d0 - d1).abs());
        }
    }
    Ok(SymmetryLimit { ts, errors, cauchy, fixed_errors, fixed_extrapolated, limit_distortion, limit })
}

/// Orthogonal projection `π_o(x) = x - ⟨x - o, u⟩u` onto `H_o`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionChart {
    pub origin: DVector<f64>,
    pub direction: DVector<f64>,
}

impl ProjectionChart {
    pub fn new(origin: DVector<f64>, direction: DVector<f64>) -> Result<Self> {
        let line = ParamLine::new(origin, direction)?;
        Ok(Self { origin: line.base, direction: line.direction })
    }

    pub fn of_line(line: &ParamLine) -> Self {
        Self { origin: line.base().clone(), direction: line.direction().clone() }
    }

    /// Foliation coordinates `(t, z)` with `x = z + t·u`, `z ∈ H_o`.
    pub fn split(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        ((x - &self.origin).dot(&self.direction), project(self, x))
    }

    pub fn join(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        z + &self.direction * t
    }
}

pub fn project(chart: &ProjectionChart, x: &DVector<f64>) -> DVector<f64> {
    x - &chart.direction * (x - &chart.origin).dot(&chart.direction)
}

fn check_through_origin(chart: &ProjectionChart, line: &ParamLine) -> Result<()> {
    if line.dim() != chart.origin.len() {
        return Err(Error::Dimension { expected: chart.origin.len(), found: line.dim() });
    }
    let miss = line.distance_to(&chart.origin);
    if miss > 1e-12 * (1.0 + chart.origin.norm()) {
        return Err(Error::Precondition(format!("the line misses the chart origin by {miss:e}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogenRatios {
    /// `|π(x₁)π(x₂)|/|x₁x₂|`, `|π(x₂)π(x₃)|/|x₂x₃|`, `|π(x₁)π(x₃)|/|x₁x₃|`.
    pub ratios: [f64; 3],
    pub spread: f64,
    /// The line is the chart line itself and collapses to a point.
    pub degenerate: bool,
}

pub fn homogen_ratio_check(chart: &ProjectionChart, line: &ParamLine, ts: [f64; 3]) -> Result<HomogenRatios> {
    check_through_origin(chart, line)?;
    if ts[0] == ts[1] || ts[1] == ts[2] || ts[0] == ts[2] {
        return Err(Error::Precondition("parameters must be distinct".into()));
    }
    let x: Vec<DVector<f64>> = ts.iter().map(|&t| line.point(t)).collect();
    let p: Vec<DVector<f64>> = x.iter().map(|xi| project(chart, xi)).collect();
    let ratio = |i: usize, j: usize| (&p[i] - &p[j]).norm() / (&x[i] - &x[j]).norm();
    let ratios = [ratio(0, 1), ratio(1, 2), ratio(0, 2)];
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(HomogenRatios { ratios, spread: hi - lo, degenerate: hi <= 1e-12 })
}

/// Image of a line through `o` under `π_o`.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectedLine {
    /// `|o z'| / |o z|` for `z = c'(1)`, `z' = π_o(z)`.
    pub alpha: f64,
    /// `max ||π(c'(t))π(c'(t'))| - α|t - t'|| / |t - t'|` over parameter pairs.
    pub alpha_residual: f64,
    /// Largest distance of a projected point from the line through the two
    /// extreme projected points, relative to their separation.
    pub collinearity: f64,
}

pub fn projected_line_check(chart: &ProjectionChart, line: &ParamLine, ts: &[f64]) -> Result<ProjectedLine> {
    check_through_origin(chart, line)?;
    if ts.len() < 3 {
        return Err(Error::Precondition("at least three parameters are needed".into()));
    }
    let o = &chart.origin;
    let z = line.point(1.0);
    let alpha = (project(chart, &z) - o).norm() / (&z - o).norm();
    let pts: Vec<DVector<f64>> = ts.iter().map(|&t| project(chart, &line.point(t))).collect();
    let mut alpha_residual: f64 = 0.0;
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let dt = (ts[i] - ts[j]).abs();
            if dt > 0.0 {
                alpha_residual = alpha_residual.max(((&pts[i] - &pts[j]).norm() - alpha * dt).abs() / dt);
            }
        }
    }
    let (lo, hi) = ts
        .iter()
        .enumerate()
        .fold((0, 0), |(lo, hi), (k, &t)| (if t < ts[lo] { k } else { lo }, if t > ts[hi] { k } else { hi }));
    let span = &pts[hi] - &pts[lo];
    let collinearity = if span.norm() <= 1e-300 {
        0.0
    } else {
        let dir = &span / span.norm();
        pts.iter()
            .map(|p| {
                let w = p - &pts[lo];
                (&w - &dir * w.dot(&dir)).norm() / span.norm()
            })
            .fold(0.0, f64::max)
    };
    Ok(ProjectedLine { alpha, alpha_residual, collinearity })
}

/// The `a`-shift `φ_y ∘ φ_x` along `line`: reflections in the horospheres
/// through `x = c(0)` and `y = c(a/2)`.
pub fn a_shift(line: &ParamLine, a: f64) -> Result<MapWord> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Precondition(format!("shift length must be positive, got {a}")));
    }
    let phi_x = horosphere_symmetry(line, &line.point(0.0));
    let phi_y = horosphere_symmetry(line, &line.point(a / 2.0));
    Ok(phi_y.compose(&phi_x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Equal,
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Relation {
    pub name: &'static str,
    pub kind: RelationKind,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|` for equalities, `max(0, rhs - lhs)` otherwise.
    pub residual: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma3eqReport {
    pub relations: Vec<Relation>,
}

impl Lemma3eqReport {
    pub fn holds(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn max_residual(&self) -> f64 {
        self.relations.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Metric relations between `x, y ∈ ℓ` and `x', y' ∈ ℓ'` on Busemann parallel
/// lines with `b(x) = b(x')`, `b(y) = b(y')`: `|xy| = |x'y'|`, `|xx'| = |yy'|`,
/// `|xy'| = |yx'|`, `|x'y| ≥ |xx'|` and `|xy|² + |xx'|² ≥ |yx'|²`.
pub fn lemma_3eq_suite(
    b: &BusemannFn,
    other: &ParamLine,
    [x, y]: [&DVector<f64>; 2],
    [x2, y2]: [&DVector<f64>; 2],
    tol: f64,
) -> Result<Lemma3eqReport> {
    let line = &b.line;
    let scale = 1.0 + [x, y, x2, y2].iter().map(|p| p.norm()).fold(0.0, f64::max);
    if line.dim() != other.dim() {
        return Err(Error::Dimension { expected: line.dim(), found: other.dim() });
    }
    let (u, u2) = (line.direction(), other.direction());
    if (u - u2).norm().min((u + u2).norm()) > 1e-9 {
        return Err(Error::Precondition("the lines are not Busemann parallel".into()));
    }
    for (p, l) in [(x, line), (y, line), (x2, other), (y2, other)] {
        if l.distance_to(p) > 1e-12 * scale {
            return Err(Error::Precondition(format!("point {p} is off its line")));
        }
    }
    for (p, q) in [(x, x2), (y, y2)] {
        let gap = (b.value(p) - b.value(q)).abs();
        if gap > 1e-12 * scale {
            return Err(Error::Precondition(format!("Busemann values differ by {gap:e}")));
        }
    }
    let d = |p: &DVector<f64>, q: &DVector<f64>| (p - q).norm();
    let relation = |name, kind, lhs: f64, rhs: f64| {
        let residual = match kind {
            RelationKind::Equal => (lhs - rhs).abs(),
            RelationKind::AtLeast => (rhs - lhs).max(0.0),
        };
        Relation { name, kind, lhs, rhs, residual, holds: residual <= tol * lhs.abs().max(rhs.abs()).max(1.0) }
    };
    use RelationKind::{AtLeast, Equal};
    let xy = d(x, y);
    let xx2 = d(x, x2);
    let yx2 = d(y, x2);
    Ok(Lemma3eqReport {
        relations: vec![
            relation("|xy| = |x'y'|", Equal, xy, d(x2, y2)),
            relation("|xx'| = |yy'|", Equal, xx2, d(y, y2)),
            relation("|xy'| = |yx'|", Equal, d(x, y2), yx2),
            relation("|x'y| >= |xx'|", AtLeast, yx2, xx2),
            relation("|xy|^2 + |xx'|^2 >= |yx'|^2", AtLeast, xy * xy + xx2 * xx2, yx2 * yx2),
        ],
    })
}
