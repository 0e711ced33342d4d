//! Strong inversions, homotheties and shifts of `Rⁿ ∪ {∞}`.
//!
//! Radii are measured in the metric whose infinitely remote point is the
//! second pole. For a finite pole `ω'` that metric is the unit inversion of
//! the Euclidean one, so every construction is done Euclidean-side after
//! conjugating by the unit inversion `g` at `ω'`.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use super::circle::{circle_through, CircleOrLine};
use super::map::{MapWord, MoebiusMapNF};
use super::point::{chordal_distance, distance_with_pole, ModelPoint};
use crate::error::{Error, Result};
use crate::sampling;

/// How the fixed sphere of a strong inversion is given.
#[derive(Debug, Clone, PartialEq)]
pub enum SphereSpec {
    /// Radius in the metric with infinite point `ω'`.
    Radius(f64),
    /// A point the sphere passes through.
    Witness(ModelPoint),
}

fn finite(p: &ModelPoint) -> &DVector<f64> {
    p.coords().expect("finite point")
}

fn check_poles(omega: &ModelPoint, omega_prime: &ModelPoint) -> Result<usize> {
    let n = omega.dim().or(omega_prime.dim()).ok_or_else(|| Error::Precondition("the poles coincide".into()))?;
    omega.check_dim(n)?;
    omega_prime.check_dim(n)?;
    if omega == omega_prime {
        return Err(Error::Precondition("the poles coincide".into()));
    }
    Ok(n)
}

/// Euclidean data `(g, center, radius)` of the sphere in the chart where
/// `ω'` sits at ∞. `g` is `None` when `ω' = ∞` already.
fn euclidean_sphere(
    omega: &ModelPoint,
    omega_prime: &ModelPoint,
    sphere: &SphereSpec,
) -> Result<(Option<MoebiusMapNF>, DVector<f64>, f64)> {
    let n = check_poles(omega, omega_prime)?;
    let g = omega_prime.coords().map(|w| MoebiusMapNF::unit_inversion(w.clone()));
    let to_chart = |p: &ModelPoint| match &g {
        Some(g) => g.apply(p),
        None => p.clone(),
    };
    let center = finite(&to_chart(omega)).clone();
    let radius = match sphere {
        SphereSpec::Radius(r) => {
            if !(r.is_finite() && *r > 0.0) {
                return Err(Error::Precondition(format!("sphere radius must be positive, got {r}")));
            }
            *r
        }
        SphereSpec::Witness(p) => {
            p.check_dim(n)?;
            if p == omega || p == omega_prime {
                return Err(Error::Precondition("the witness coincides with a pole".into()));
            }
            (finite(&to_chart(p)) - &center).norm()
        }
    };
    Ok((g, center, radius))
}

/// The strong inversion swapping `ω` and `ω'` and fixing the given sphere.
///
/// With `ω' = ∞` this is the inversion in the sphere of center `ω`;
/// otherwise the same construction conjugated by the unit inversion at `ω'`.
pub fn strong_inversion(omega: &ModelPoint, omega_prime: &ModelPoint, sphere: &SphereSpec) -> Result<MapWord> {
    let (g, center, radius) = euclidean_sphere(omega, omega_prime, sphere)?;
    let phi = MoebiusMapNF::sphere_inversion(center, radius)?;
    Ok(match g {
        None => phi.into(),
        Some(g) => MapWord::from_maps(vec![g.clone(), phi, g])?,
    })
}

/// `k` points of the sphere between `ω` and `ω'`.
pub fn sphere_samples<R: Rng + ?Sized>(
    rng: &mut R,
    omega: &ModelPoint,
    omega_prime: &ModelPoint,
    sphere: &SphereSpec,
    k: usize,
) -> Result<Vec<ModelPoint>> {
    let (g, center, radius) = euclidean_sphere(omega, omega_prime, sphere)?;
    let n = center.len();
    Ok((0..k)
        .map(|_| {
            let p = ModelPoint::Finite(&center + sampling::unit_vector(rng, n) * radius);
            match &g {
                Some(g) => g.apply(&p),
                None => p,
            }
        })
        .collect())
}

/// `k` circles through both poles and a random third point.
pub fn circles_through<R: Rng + ?Sized>(
    rng: &mut R,
    omega: &ModelPoint,
    omega_prime: &ModelPoint,
    k: usize,
) -> Result<Vec<CircleOrLine>> {
    let n = check_poles(omega, omega_prime)?;
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let q = sampling::model_point(rng, n, 3.0);
        if chordal_distance(&q, omega).min(chordal_distance(&q, omega_prime)) < 1e-3 {
            continue;
        }
        out.push(circle_through(omega, omega_prime, &q)?);
    }
    Ok(out)
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SInversionReport {
    pub checks: Vec<AxiomCheck>,
}

impl SInversionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// Checks the four strong-inversion axioms for `m`. Deviations are chordal.
pub fn verify_s_inversion(
    m: &MapWord,
    omega: &ModelPoint,
    omega_prime: &ModelPoint,
    sphere: &[ModelPoint],
    circles: &[CircleOrLine],
    probes: &[ModelPoint],
    tol: f64,
) -> SInversionReport {
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let involution = max(&mut probes.iter().map(|p| chordal_distance(&m.apply(&m.apply(p)), p)));
    let swap = chordal_distance(&m.apply(omega), omega_prime).max(chordal_distance(&m.apply(omega_prime), omega));
    let fixed = max(&mut sphere.iter().map(|p| chordal_distance(&m.apply(p), p)));
    let circle_dev = max(&mut circles.iter().map(|c| {
        let forward = c.samples(16).iter().map(|p| c.residual(&m.apply(p))).fold(0.0, f64::max);
        let inverse = m.inverse();
        let backward = c.samples(16).iter().map(|p| c.residual(&inverse.apply(p))).fold(0.0, f64::max);
        forward.max(backward)
    }));
    let check = |axiom, max_deviation: f64| AxiomCheck { axiom, max_deviation, passed: max_deviation <= tol };
    SInversionReport {
        checks: vec![
            check("involution", involution),
            check("pole swap", swap),
            check("sphere fixed pointwise", fixed),
            check("circles through the poles preserved", circle_dev),
        ],
    }
}

/// Homothety of center `o` and coefficient `λ` in `X_ω`, built as `φ₂∘φ₁`
/// from strong inversions with radii `1` and `√λ`.
pub fn homothety(o: &ModelPoint, lambda: f64, omega: &ModelPoint) -> Result<MapWord> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Precondition(format!("homothety coefficient must be positive, got {lambda}")));
    }
    let phi1 = strong_inversion(o, omega, &SphereSpec::Radius(1.0))?;
    let phi2 = strong_inversion(o, omega, &SphereSpec::Radius(lambda.sqrt()))?;
    Ok(phi2.compose(&phi1))
}

/// Homothety centered at `ω'` carrying `x` to `x'` along one arc of `σ`.
pub fn transit_homothety(
    sigma: &CircleOrLine,
    omega: &ModelPoint,
    omega_prime: &ModelPoint,
    x: &ModelPoint,
    x_prime: &ModelPoint,
) -> Result<MapWord> {
    let n = check_poles(omega, omega_prime)?;
    for p in [omega, omega_prime, x, x_prime] {
        p.check_dim(n)?;
        if !sigma.contains(p, super::circle::ON_CIRCLE_TOL) {
            return Err(Error::Precondition(format!("{p} is not on the circle")));
        }
    }
    if [x, x_prime].iter().any(|p| *p == omega || *p == omega_prime) {
        return Err(Error::Precondition("transit points must avoid the poles".into()));
    }
    if sigma.separates((omega, omega_prime), (x, x_prime)) {
        return Err(Error::NoHomothety(format!("{x} and {x_prime} lie on different arcs")));
    }
    let d = |p: &ModelPoint| distance_with_pole(omega, omega_prime, p).finite().expect("finite points");
    homothety(omega_prime, d(x_prime) / d(x), omega)
}

/// Finite-schedule approximation of the shift from `x` to `x'` in `X_ω`.
#[derive(Debug, Clone)]
pub struct ShiftApprox {
    pub lambdas: Vec<f64>,
    /// `η_n = h'_n ∘ h_n`, composed symbolically.
    pub maps: Vec<MapWord>,
    /// Largest chordal probe gap between consecutive `η_n`.
    pub cauchy: Vec<f64>,
    /// Translation `x ↦ x + (x' - x)` in the chart where `ω` sits at ∞.
    pub limit: MapWord,
    /// Chordal probe gap between the last `η_n` and the limit.
    pub limit_deviation: f64,
}

/// Cauchy gap below which the sequence counts as converged.
pub const SHIFT_CAUCHY_TOL: f64 = 1e-6;

/// Evaluates `η_n = h'_n ∘ h_n` with `h_n` of center `x` and coefficient
/// `1/λ_n` and `h'_n` of center `x'` and coefficient `λ_n`.
pub fn shift_approx(
    x: &ModelPoint,
    x_prime: &ModelPoint,
    omega: &ModelPoint,
    schedule: &[f64],
    probes: &[ModelPoint],
) -> Result<ShiftApprox> {
    let n = check_poles(x, omega)?;
    check_poles(x_prime, omega)?;
    if schedule.len() < 2 {
        return Err(Error::Precondition("shift schedule needs at least two terms".into()));
    }
    let decreasing = schedule.windows(2).all(|w| w[1] < w[0]);
    if !decreasing || schedule.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::Precondition("shift schedule must decrease strictly through positive values".into()));
    }
    let maps: Vec<MapWord> = schedule
        .iter()
        .map(|&l| Ok(homothety(x_prime, l, omega)?.compose(&homothety(x, 1.0 / l, omega)?).reduce()))
        .collect::<Result<_>>()?;
    let cauchy: Vec<f64> = maps.windows(2).map(|w| w[1].max_deviation(&w[0], probes)).collect();
    let last_gap = *cauchy.last().expect("two terms");
    if last_gap > SHIFT_CAUCHY_TOL {
        return Err(Error::ConvergenceNotDetected(format!(
            "consecutive shift approximations still differ by {last_gap:e}"
        )));
    }
    let limit = shift_limit(x, x_prime, omega, n);
    let limit_deviation = maps.last().expect("nonempty").max_deviation(&limit, probes);
    Ok(ShiftApprox { lambdas: schedule.to_vec(), maps, cauchy, limit, limit_deviation })
}

fn shift_limit(x: &ModelPoint, x_prime: &ModelPoint, omega: &ModelPoint, n: usize) -> MapWord {
    match omega {
        ModelPoint::Infinity => MoebiusMapNF::translation(finite(x_prime) - finite(x)).into(),
        ModelPoint::Finite(w) => {
            let g = MoebiusMapNF::unit_inversion(w.clone());
            let shift = finite(&g.apply(x_prime)) - finite(&g.apply(x));
            debug_assert_eq!(shift.len(), n);
            MapWord::from_maps(vec![g.clone(), MoebiusMapNF::translation(shift), g]).expect("nonempty")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::point::euclidean_distance;

    fn p(c: &[f64]) -> ModelPoint {
        ModelPoint::from_slice(c)
    }

    fn probes(n: usize, seed: u64) -> Vec<ModelPoint> {
        let mut rng = sampling::rng(seed, 0);
        (0..20).map(|_| sampling::model_point(&mut rng, n, 3.0)).collect()
    }

    fn report_for(omega: &ModelPoint, omega_prime: &ModelPoint, spec: &SphereSpec, m: &MapWord) -> SInversionReport {
        let mut rng = sampling::rng(5, 1);
        let n = omega.dim().or(omega_prime.dim()).unwrap();
        let sphere = sphere_samples(&mut rng, omega, omega_prime, spec, 30).unwrap();
        let circles = circles_through(&mut rng, omega, omega_prime, 8).unwrap();
        verify_s_inversion(m, omega, omega_prime, &sphere, &circles, &probes(n, 9), 1e-10)
    }

    #[test]
    fn unit_sphere_inversion() {
        let phi = strong_inversion(&p(&[0.0, 0.0]), &ModelPoint::Infinity, &SphereSpec::Radius(1.0)).unwrap();
        assert_eq!(phi.apply(&p(&[2.0, 0.0])), p(&[0.5, 0.0]));
        assert_eq!(phi.apply(&p(&[0.0, 0.0])), ModelPoint::Infinity);
        let report = report_for(&p(&[0.0, 0.0]), &ModelPoint::Infinity, &SphereSpec::Radius(1.0), &phi);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn witness_between_finite_poles() {
        let (w, w2) = (p(&[0.0, 0.0]), p(&[2.0, 0.0]));
        let spec = SphereSpec::Witness(p(&[1.0, 0.0]));
        let phi = strong_inversion(&w, &w2, &spec).unwrap();
        assert!(chordal_distance(&phi.apply(&w), &w2) < 1e-14);
        assert!(chordal_distance(&phi.apply(&w2), &w) < 1e-14);
        assert!(chordal_distance(&phi.apply(&p(&[1.0, 0.0])), &p(&[1.0, 0.0])) < 1e-14);
        let report = report_for(&w, &w2, &spec, &phi);
        assert!(report.passed(), "{report:?}");
        assert!(phi.compose(&phi).max_deviation(&MapWord::identity(2), &probes(2, 3)) < 1e-12);
    }

    #[test]
    fn infinity_as_first_pole() {
        let (w, w2) = (ModelPoint::Infinity, p(&[1.0, -1.0, 0.5]));
        let spec = SphereSpec::Radius(0.7);
        let phi = strong_inversion(&w, &w2, &spec).unwrap();
        assert!(report_for(&w, &w2, &spec, &phi).passed());
    }

    #[test]
    fn non_inversions_fail_the_right_axiom() {
        let (o, inf) = (p(&[0.0, 0.0]), ModelPoint::Infinity);
        let h = homothety(&o, 4.0, &inf).unwrap();
        let report = report_for(&o, &inf, &SphereSpec::Radius(1.0), &h);
        assert!(!report.check("involution").unwrap().passed);

        let (a, b) = (p(&[-1.0, 0.0]), p(&[1.0, 0.0]));
        let r: MapWord =
            MoebiusMapNF::reflection(DVector::zeros(2), &DVector::from_vec(vec![0.0, 1.0])).unwrap().into();
        let report = report_for(&a, &b, &SphereSpec::Radius(1.0), &r);
        assert!(!report.check("pole swap").unwrap().passed);
    }

    #[test]
    fn bad_poles_and_witnesses() {
        let o = p(&[0.0]);
        assert!(strong_inversion(&o, &o, &SphereSpec::Radius(1.0)).is_err());
        assert!(strong_inversion(&o, &ModelPoint::Infinity, &SphereSpec::Witness(o.clone())).is_err());
        assert!(strong_inversion(&o, &ModelPoint::Infinity, &SphereSpec::Radius(0.0)).is_err());
    }

    #[test]
    fn homothety_examples() {
        let (o, inf) = (p(&[0.0, 0.0]), ModelPoint::Infinity);
        let h = homothety(&o, 4.0, &inf).unwrap();
        assert_eq!(h.len(), 2);
        assert!(chordal_distance(&h.apply(&p(&[1.0, 0.0])), &p(&[4.0, 0.0])) < 1e-15);
        let id = homothety(&o, 1.0, &inf).unwrap();
        assert!(id.max_deviation(&MapWord::identity(2), &probes(2, 4)) < 1e-14);
        assert!(homothety(&o, 0.0, &inf).is_err());

        let omega = p(&[3.0, 1.0]);
        let c = p(&[0.5, 0.0]);
        let h = homothety(&c, 2.5, &omega).unwrap();
        let pts = probes(2, 6);
        for pair in pts.windows(2) {
            let before = distance_with_pole(&omega, &pair[0], &pair[1]).finite().unwrap();
            let after = distance_with_pole(&omega, &h.apply(&pair[0]), &h.apply(&pair[1])).finite().unwrap();
            assert!((after - 2.5 * before).abs() <= 1e-10 * before);
        }
        assert!(chordal_distance(&h.apply(&c), &c) < 1e-12);
        assert!(chordal_distance(&h.apply(&omega), &omega) < 1e-12);
    }

    #[test]
    fn transit_examples() {
        let line = CircleOrLine::line(DVector::zeros(2), DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let (o, inf) = (p(&[0.0, 0.0]), ModelPoint::Infinity);
        let h = transit_homothety(&line, &inf, &o, &p(&[1.0, 0.0]), &p(&[3.0, 0.0])).unwrap();
        assert!(chordal_distance(&h.apply(&p(&[1.0, 0.0])), &p(&[3.0, 0.0])) < 1e-14);
        assert!(chordal_distance(&h.apply(&p(&[0.0, 1.0])), &p(&[0.0, 3.0])) < 1e-14);
        let id = transit_homothety(&line, &inf, &o, &p(&[1.0, 0.0]), &p(&[1.0, 0.0])).unwrap();
        assert!(id.max_deviation(&MapWord::identity(2), &probes(2, 2)) < 1e-14);
        let err = transit_homothety(&line, &inf, &o, &p(&[1.0, 0.0]), &p(&[-1.0, 0.0]));
        assert!(matches!(err, Err(Error::NoHomothety(_))));
    }

    #[test]
    fn shift_at_infinity_is_an_explicit_translation() {
        let (x, x2) = (p(&[0.0, 0.0]), p(&[1.0, 0.0]));
        let schedule: Vec<f64> = (1..=30).map(|k| 0.5f64.powi(k)).collect();
        let pts = probes(2, 8);
        let shift = shift_approx(&x, &x2, &ModelPoint::Infinity, &schedule, &pts).unwrap();
        for (l, eta) in shift.lambdas.iter().zip(&shift.maps) {
            for y in &pts {
                let expected = finite(y) + DVector::from_vec(vec![1.0 - l, 0.0]);
                assert!((finite(&eta.apply(y)) - expected).norm() <= 1e-12);
            }
        }
        for pair in pts.windows(2) {
            let d0 = euclidean_distance(&pair[0], &pair[1]).finite().unwrap();
            let d1 = euclidean_distance(&shift.limit.apply(&pair[0]), &shift.limit.apply(&pair[1])).finite().unwrap();
            assert!((d0 - d1).abs() < 1e-12);
        }
        let still = shift_approx(&x, &x, &ModelPoint::Infinity, &schedule, &pts).unwrap();
        assert!(still.maps.iter().all(|m| m.max_deviation(&MapWord::identity(2), &pts) < 1e-12));
        assert!(shift_approx(&x, &x2, &ModelPoint::Infinity, &[0.5, 0.5], &pts).is_err());
    }

    #[test]
    fn shift_with_finite_pole() {
        let omega = p(&[2.0, 2.0]);
        let (x, x2) = (p(&[0.0, 0.0]), p(&[1.0, -0.5]));
        let schedule: Vec<f64> = (1..=40).map(|k| 0.5f64.powi(k)).collect();
        let pts = probes(2, 10);
        let shift = shift_approx(&x, &x2, &omega, &schedule, &pts).unwrap();
        assert!(chordal_distance(&shift.limit.apply(&x), &x2) < 1e-12);
        assert!(shift.limit_deviation < 1e-6);
        for pair in pts.windows(2) {
            let d0 = distance_with_pole(&omega, &pair[0], &pair[1]).finite().unwrap();
            let d1 = distance_with_pole(&omega, &shift.limit.apply(&pair[0]), &shift.limit.apply(&pair[1]))
                .finite()
                .unwrap();
            assert!((d0 - d1).abs() <= 1e-10 * d0.max(1.0));
        }
    }
}
