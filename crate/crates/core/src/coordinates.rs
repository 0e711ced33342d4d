//! Coordinates on `X_ω = Rⁿ` from a flag of horospheres.
//!
//! Each descent step picks a line through `o` inside the current subspace,
//! takes the horosphere `H_o` of that line and continues inside `H_o`. The
//! next line is the projection `π_o` of the first basis direction of the
//! subspace that is not parallel to the current line.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::busemann::{a_shift, BusemannFn, Horosphere, ParamLine};
use crate::error::{Error, Result};
use crate::model::{homothety, MapWord, ModelPoint};

const PARALLEL_TOL: f64 = 1e-9;

/// Affine subspace `o + span(basis)` of `Rⁿ` (with `ω = ∞` adjoined).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub origin: DVector<f64>,
    /// Orthonormal.
    pub basis: Vec<DVector<f64>>,
}

impl Subspace {
    pub fn full(origin: DVector<f64>) -> Self {
        let n = origin.len();
        let basis = (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                e
            })
            .collect();
        Self { origin, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains_direction(&self, u: &DVector<f64>) -> bool {
        let inside: DVector<f64> = self.basis.iter().map(|e| e * e.dot(u)).sum();
        (u - inside).norm() <= PARALLEL_TOL
    }
}

/// One step of the flag.
#[derive(Debug, Clone)]
pub struct FlagStep {
    /// Dimension of the subspace the step works in.
    pub dimension: usize,
    pub line: ParamLine,
    pub origin: DVector<f64>,
    /// `x_k = c(1)`, at distance one from `o`.
    pub unit_point: DVector<f64>,
    /// Horosphere of `line` through `o`.
    pub horosphere: Horosphere,
    /// `H_o` intersected with the current subspace.
    pub next_subspace: Subspace,
}

#[derive(Debug, Clone)]
pub struct Descent {
    pub step: FlagStep,
    /// Subspace and line for the following step; `None` at the bottom of
    /// the chain (the subspace was a circle).
    pub next: Option<(Subspace, ParamLine)>,
}

fn gram_schmidt(vectors: impl IntoIterator<Item = DVector<f64>>) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v;
        for _ in 0..2 {
            for e in &basis {
                let c = e.dot(&w);
                w -= e * c;
            }
        }
        let len = w.norm();
        if len > PARALLEL_TOL {
            basis.push(w / len);
        }
    }
    basis
}

/// Descends one level: `H_o` of `line` inside `space`, the unit point on
/// `line`, and the next line `π_o(ℓ')` for the first basis direction `ℓ'`
/// not parallel to `line`.
pub fn descend(space: &Subspace, line: &ParamLine) -> Result<Descent> {
    let k = space.dim();
    if k == 0 {
        return Err(Error::DescentTerminated);
    }
    let o = line.base().clone();
    let u = line.direction();
    if (&o - &space.origin).norm() > 0.0 && !space.contains_direction(&(&o - &space.origin)) {
        return Err(Error::Precondition("the line's basepoint lies outside the subspace".into()));
    }
    if !space.contains_direction(u) {
        return Err(Error::Precondition("the line leaves the subspace".into()));
    }
    let horosphere = Horosphere::through(&BusemannFn::plus(line.clone()), &o);
    let project = |v: &DVector<f64>| v - u * v.dot(u);
    let next_basis = gram_schmidt(space.basis.iter().map(project));
    debug_assert_eq!(next_basis.len(), k - 1);
    let next_subspace = Subspace { origin: o.clone(), basis: next_basis };
    let step = FlagStep {
        dimension: k,
        line: line.clone(),
        origin: o.clone(),
        unit_point: line.point(1.0),
        horosphere,
        next_subspace: next_subspace.clone(),
    };
    if k == 1 {
        return Ok(Descent { step, next: None });
    }
    let witness = space
        .basis
        .iter()
        .find(|e| (1.0 - e.dot(u).abs()) > PARALLEL_TOL)
        .expect("a subspace of dimension two or more has a non-parallel direction");
    let next_line = ParamLine::through(o, project(witness))?;
    Ok(Descent { step, next: Some((next_subspace, next_line)) })
}

/// Ordered orthonormal frame at `o`; coordinates `⟨x - o, uᵢ⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChart", into = "RawChart")]
pub struct CoordinateChart {
    pub origin: DVector<f64>,
    pub directions: Vec<DVector<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawChart {
    origin: Vec<f64>,
    directions: Vec<Vec<f64>>,
    dimension: usize,
}

impl From<CoordinateChart> for RawChart {
    fn from(c: CoordinateChart) -> Self {
        RawChart {
            dimension: c.origin.len(),
            origin: c.origin.as_slice().to_vec(),
            directions: c.directions.iter().map(|d| d.as_slice().to_vec()).collect(),
        }
    }
}

impl TryFrom<RawChart> for CoordinateChart {
    type Error = Error;

    fn try_from(raw: RawChart) -> Result<Self> {
        if raw.origin.len() != raw.dimension {
            return Err(Error::Dimension { expected: raw.dimension, found: raw.origin.len() });
        }
        let directions: Vec<DVector<f64>> = raw.directions.into_iter().map(DVector::from_vec).collect();
        for d in &directions {
            if d.len() != raw.dimension {
                return Err(Error::Dimension { expected: raw.dimension, found: d.len() });
            }
        }
        let chart = CoordinateChart { origin: DVector::from_vec(raw.origin), directions };
        let defect = chart.orthonormality_defect();
        if defect > 1e-10 {
            return Err(Error::Input(format!("chart directions are not orthonormal (defect {defect:e})")));
        }
        Ok(chart)
    }
}

impl CoordinateChart {
    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn coordinates(&self, x: &DVector<f64>) -> DVector<f64> {
        let w = x - &self.origin;
        DVector::from_iterator(self.directions.len(), self.directions.iter().map(|u| w.dot(u)))
    }

    /// Busemann coordinates `bᵢ(x) = -⟨x - o, uᵢ⟩`, so `bᵢ(c(t)) = -t`.
    pub fn busemann_coordinates(&self, x: &DVector<f64>) -> DVector<f64> {
        -self.coordinates(x)
    }

    pub fn point(&self, coords: &DVector<f64>) -> DVector<f64> {
        self.directions.iter().zip(coords.iter()).fold(self.origin.clone(), |acc, (u, c)| acc + u * *c)
    }

    /// Per-axis parts `x(i) = cᵢ uᵢ`, with `x = o + Σ x(i)`.
    pub fn components(&self, x: &DVector<f64>) -> Vec<DVector<f64>> {
        let c = self.coordinates(x);
        self.directions.iter().zip(c.iter()).map(|(u, ci)| u * *ci).collect()
    }

    pub fn axis(&self, i: usize) -> ParamLine {
        ParamLine::new(self.origin.clone(), self.directions[i].clone()).expect("unit direction")
    }

    /// `max |uᵢ·uⱼ - δᵢⱼ|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.directions.iter().enumerate() {
            for (j, b) in self.directions.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }

    /// `ν(x) = |o x|` for the point with chart coordinates `c`.
    pub fn norm_of(&self, c: &DVector<f64>) -> f64 {
        (self.point(c) - &self.origin).norm()
    }

    /// Solves `{bᵢ(y) = bᵢ(x)}` for `y`, the intersection of the coordinate
    /// horospheres through `x`.
    pub fn horosphere_intersection(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.dim();
        let m = DMatrix::from_fn(self.directions.len(), n, |i, j| self.directions[i][j]);
        let rhs = DVector::from_iterator(
            self.directions.len(),
            self.directions.iter().zip(self.busemann_coordinates(x).iter()).map(|(u, b)| -b + u.dot(&self.origin)),
        );
        m.lu().solve(&rhs).ok_or_else(|| Error::Degenerate("coordinate horospheres do not meet in one point".into()))
    }
}

/// Runs the descent from `first_line` (through `o`) in `Rⁿ`.
pub fn build_chart(first_line: &ParamLine) -> Result<(CoordinateChart, Vec<FlagStep>)> {
    let n = first_line.dim();
    if !(1..=8).contains(&n) {
        return Err(Error::Precondition(format!("dimension must be in 1..=8, got {n}")));
    }
    let mut space = Subspace::full(first_line.base().clone());
    let mut line = first_line.clone();
    let mut steps = Vec::with_capacity(n);
    loop {
        let Descent { step, next } = descend(&space, &line)?;
        steps.push(step);
        match next {
            Some((s, l)) => {
                space = s;
                line = l;
            }
            None => break,
        }
    }
    let chart = CoordinateChart {
        origin: first_line.base().clone(),
        directions: steps.iter().map(|s| s.line.direction().clone()).collect(),
    };
    Ok((chart, steps))
}

/// Default chart at `o` starting along the first coordinate axis.
pub fn standard_chart(o: DVector<f64>) -> Result<(CoordinateChart, Vec<FlagStep>)> {
    let n = o.len();
    let mut e1 = DVector::zeros(n);
    if n > 0 {
        e1[0] = 1.0;
    }
    build_chart(&ParamLine::new(o, e1)?)
}

/// `T_x = T^N_x ∘ … ∘ T^0_x`, each factor an `|cᵢ|`-shift along the `i`-th
/// axis (reversed for negative coordinates).
pub fn translation(chart: &CoordinateChart, x: &DVector<f64>) -> Result<MapWord> {
    let c = chart.coordinates(x);
    let mut word = MapWord::identity(chart.dim());
    for (i, ci) in c.iter().enumerate() {
        if *ci == 0.0 {
            continue;
        }
        let axis = if *ci > 0.0 { chart.axis(i) } else { chart.axis(i).reversed() };
        word = a_shift(&axis, ci.abs())?.compose(&word);
    }
    Ok(word)
}

#[derive(Debug, Clone, Serialize)]
pub struct TranslationCheck {
    /// `|T_x(o) - x|`.
    pub displacement_error: f64,
    /// `max ||T_x(y)T_x(z)| - |yz||`.
    pub max_distortion: f64,
}

fn image(m: &MapWord, x: &DVector<f64>) -> DVector<f64> {
    match m.apply(&ModelPoint::Finite(x.clone())) {
        ModelPoint::Finite(v) => v,
        ModelPoint::Infinity => panic!("finite point sent to infinity by an isometry"),
    }
}

pub fn translation_isometry_check(
    chart: &CoordinateChart,
    x: &DVector<f64>,
    pairs: &[(DVector<f64>, DVector<f64>)],
) -> Result<TranslationCheck> {
    let t = translation(chart, x)?;
    let displacement_error = (image(&t, &chart.origin) - x).norm();
    let max_distortion =
        pairs.iter().map(|(y, z)| ((image(&t, y) - image(&t, z)).norm() - (y - z).norm()).abs()).fold(0.0, f64::max);
    Ok(TranslationCheck { displacement_error, max_distortion })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingCheck {
    /// `max |h_k(x) - kx|` in chart vector operations.
    pub max_residual: f64,
    /// `max |ν(kx) - kν(x)|`.
    pub norm_residual: f64,
}

pub fn homothety_scaling_check(chart: &CoordinateChart, k: f64, probes: &[DVector<f64>]) -> Result<ScalingCheck> {
    let h = homothety(&ModelPoint::Finite(chart.origin.clone()), k, &ModelPoint::Infinity)?;
    let mut max_residual: f64 = 0.0;
    let mut norm_residual: f64 = 0.0;
    for x in probes {
        let c = chart.coordinates(x);
        let kx = chart.point(&(&c * k));
        max_residual = max_residual.max((image(&h, x) - &kx).norm());
        norm_residual = norm_residual.max((chart.norm_of(&(&c * k)) - k * chart.norm_of(&c)).abs());
    }
    Ok(ScalingCheck { max_residual, norm_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub zero_at_origin: f64,
    /// Smallest `ν` over the nonzero probes; positive for a norm.
    pub min_nonzero: f64,
    pub triangle_excess: f64,
    /// `max |ν(kx) - |k|ν(x)|` over probes and scalars, negative ones included.
    pub homogeneity: f64,
    /// `max ||xy| - ν(y - x)|`.
    pub metric_residual: f64,
}

pub fn norm_axiom_check(chart: &CoordinateChart, probes: &[DVector<f64>]) -> NormReport {
    let coords: Vec<DVector<f64>> = probes.iter().map(|x| chart.coordinates(x)).collect();
    let nu = |c: &DVector<f64>| chart.norm_of(c);
    let zero = DVector::zeros(chart.directions.len());
    let zero_at_origin = nu(&zero);
    let min_nonzero = coords.iter().filter(|c| c.norm() > 0.0).map(|c| nu(c) / c.norm()).fold(f64::INFINITY, f64::min);
    let mut triangle_excess: f64 = 0.0;
    let mut metric_residual: f64 = 0.0;
    let mut homogeneity: f64 = 0.0;
    for (i, a) in coords.iter().enumerate() {
        for k in [-2.5, -1.0, 0.0, 0.5, 3.0] {
            homogeneity = homogeneity.max((nu(&(a * k)) - f64::abs(k) * nu(a)).abs());
        }
        for (j, b) in coords.iter().enumerate().skip(i + 1) {
            triangle_excess = triangle_excess.max(nu(&(a + b)) - nu(a) - nu(b));
            metric_residual = metric_residual.max(((&probes[i] - &probes[j]).norm() - nu(&(b - a))).abs());
        }
    }
    NormReport { zero_at_origin, min_nonzero, triangle_excess: triangle_excess.max(0.0), homogeneity, metric_residual }
}

#[derive(Debug, Clone, Serialize)]
pub struct SchoenbergReport {
    /// `max |ν(x+y)² + ν(x-y)² - 2ν(x)² - 2ν(y)²|`.
    pub defect: f64,
    /// Smallest eigenvalue of the polarization Gram matrix.
    pub gram_min_eigenvalue: f64,
    pub gram_psd: bool,
    pub passed: bool,
}

/// Parallelogram law and polarization Gram test for a norm on `R^m`.
pub fn schoenberg_check(norm: impl Fn(&DVector<f64>) -> f64, samples: &[DVector<f64>], tol: f64) -> SchoenbergReport {
    let sq = |v: &DVector<f64>| norm(v).powi(2);
    let mut defect: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        for y in &samples[i..] {
            let d = sq(&(x + y)) + sq(&(x - y)) - 2.0 * sq(x) - 2.0 * sq(y);
            defect = defect.max(d.abs());
        }
    }
    let m = samples.len();
    let gram =
        DMatrix::from_fn(m, m, |i, j| (sq(&(&samples[i] + &samples[j])) - sq(&(&samples[i] - &samples[j]))) / 4.0);
    let scale = gram.abs().max().max(1.0);
    let gram_min_eigenvalue = if m == 0 { 0.0 } else { SymmetricEigen::new(gram).eigenvalues.min() };
    let gram_psd = gram_min_eigenvalue >= -tol * scale;
    SchoenbergReport { defect, gram_min_eigenvalue, gram_psd, passed: defect <= tol && gram_psd }
}
