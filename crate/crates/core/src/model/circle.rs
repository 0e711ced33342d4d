use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::map::MapWord;
use super::point::{chordal_distance, ModelPoint};
use crate::error::{Error, Result};

const FRAME_TOL: f64 = 1e-12;
const COLLINEAR_TOL: f64 = 1e-12;
/// Off-circle tolerance (chordal residual) for inputs that must lie on a circle.
pub const ON_CIRCLE_TOL: f64 = 1e-9;
const MAP_VALIDATION_TOL: f64 = 1e-10;

/// A circle of `Rⁿ ∪ {∞}`: a Euclidean circle in a 2-plane, or a line
/// together with ∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircle", into = "RawCircle")]
pub enum CircleOrLine {
    Circle {
        center: DVector<f64>,
        radius: f64,
        /// Orthonormal frame of the circle's plane.
        plane: [DVector<f64>; 2],
    },
    Line {
        base: DVector<f64>,
        direction: DVector<f64>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawCircle {
    Circle { center: Vec<f64>, radius: f64, plane: [Vec<f64>; 2] },
    Line { base: Vec<f64>, direction: Vec<f64> },
}

impl From<CircleOrLine> for RawCircle {
    fn from(c: CircleOrLine) -> Self {
        let v = |x: DVector<f64>| x.as_slice().to_vec();
        match c {
            CircleOrLine::Circle { center, radius, plane: [e1, e2] } => {
                RawCircle::Circle { center: v(center), radius, plane: [v(e1), v(e2)] }
            }
            CircleOrLine::Line { base, direction } => RawCircle::Line { base: v(base), direction: v(direction) },
        }
    }
}

impl TryFrom<RawCircle> for CircleOrLine {
    type Error = Error;

    fn try_from(raw: RawCircle) -> Result<Self> {
        let v = |x: Vec<f64>| DVector::from_vec(x);
        match raw {
            RawCircle::Circle { center, radius, plane: [e1, e2] } => {
                CircleOrLine::circle(v(center), radius, v(e1), v(e2))
            }
            RawCircle::Line { base, direction } => {
                let direction = v(direction);
                if (direction.norm() - 1.0).abs() > FRAME_TOL {
                    return Err(Error::Input("line direction is not a unit vector".into()));
                }
                CircleOrLine::line(v(base), direction)
            }
        }
    }
}

impl CircleOrLine {
    pub fn circle(center: DVector<f64>, radius: f64, e1: DVector<f64>, e2: DVector<f64>) -> Result<Self> {
        let n = center.len();
        for e in [&e1, &e2] {
            if e.len() != n {
                return Err(Error::Dimension { expected: n, found: e.len() });
            }
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Input(format!("radius must be positive, got {radius}")));
        }
        if (e1.norm() - 1.0).abs() > FRAME_TOL || (e2.norm() - 1.0).abs() > FRAME_TOL || e1.dot(&e2).abs() > FRAME_TOL {
            return Err(Error::Input("circle plane vectors are not orthonormal".into()));
        }
        Ok(CircleOrLine::Circle { center, radius, plane: [e1, e2] })
    }

    /// Line through `base` along `direction` (normalized here).
    pub fn line(base: DVector<f64>, direction: DVector<f64>) -> Result<Self> {
        if base.len() != direction.len() {
            return Err(Error::Dimension { expected: base.len(), found: direction.len() });
        }
        let len = direction.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::Input("line direction vanishes".into()));
        }
        Ok(CircleOrLine::Line { base, direction: direction / len })
    }

    pub fn dim(&self) -> usize {
        match self {
            CircleOrLine::Circle { center, .. } => center.len(),
            CircleOrLine::Line { base, .. } => base.len(),
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, CircleOrLine::Line { .. })
    }

    /// Point with cyclic parameter `theta ∈ [0, 2π)`. On a line the
    /// parameter is `θ = 2·atan(t) + π`, so `θ = 0` is ∞.
    pub fn point_at(&self, theta: f64) -> ModelPoint {
        match self {
            CircleOrLine::Circle { center, radius, plane: [e1, e2] } => {
                ModelPoint::Finite(center + (e1 * theta.cos() + e2 * theta.sin()) * *radius)
            }
            CircleOrLine::Line { base, direction } => {
                let theta = theta.rem_euclid(TAU);
                if theta == 0.0 {
                    ModelPoint::Infinity
                } else {
                    ModelPoint::Finite(base + direction * ((theta - PI) / 2.0).tan())
                }
            }
        }
    }

    /// Cyclic parameter of a point assumed to lie on the circle.
    pub fn param(&self, p: &ModelPoint) -> f64 {
        match (self, p) {
            (CircleOrLine::Line { .. }, ModelPoint::Infinity) => 0.0,
            (CircleOrLine::Line { base, direction }, ModelPoint::Finite(x)) => {
                2.0 * (x - base).dot(direction).atan() + PI
            }
            (CircleOrLine::Circle { center, plane: [e1, e2], .. }, ModelPoint::Finite(x)) => {
                let w = x - center;
                w.dot(e2).atan2(w.dot(e1)).rem_euclid(TAU)
            }
            (CircleOrLine::Circle { .. }, ModelPoint::Infinity) => f64::NAN,
        }
    }

    /// `k` points spread evenly in the cyclic parameter; lines include ∞.
    pub fn samples(&self, k: usize) -> Vec<ModelPoint> {
        let offset = if self.is_line() { 0.0 } else { 0.5 };
        (0..k).map(|j| self.point_at(TAU * (j as f64 + offset) / k as f64)).collect()
    }

    /// Distance from `p` to the set, scaled by the chordal conformal factor
    /// `2/(1+|p|²)`, so points near ∞ are measured on the sphere.
    pub fn residual(&self, p: &ModelPoint) -> f64 {
        match (self, p) {
            (CircleOrLine::Line { .. }, ModelPoint::Infinity) => 0.0,
            (CircleOrLine::Circle { center, radius, .. }, ModelPoint::Infinity) => chordal_distance(
                &ModelPoint::Infinity,
                &ModelPoint::Finite(DVector::from_element(1, center.norm() + radius)),
            ),
            (CircleOrLine::Line { base, direction }, ModelPoint::Finite(x)) => {
                let w = x - base;
                let perp = &w - direction * w.dot(direction);
                2.0 * perp.norm() / (1.0 + x.norm_squared())
            }
            (CircleOrLine::Circle { center, radius, plane: [e1, e2] }, ModelPoint::Finite(x)) => {
                let w = x - center;
                let (u, v) = (w.dot(e1), w.dot(e2));
                let perp = &w - e1 * u - e2 * v;
                let radial = u.hypot(v) - radius;
                2.0 * (perp.norm_squared() + radial * radial).sqrt() / (1.0 + x.norm_squared())
            }
        }
    }

    pub fn contains(&self, p: &ModelPoint, tol: f64) -> bool {
        self.residual(p) <= tol
    }

    /// Whether the pair `(a, c)` separates `(b, d)` on the circle.
    pub fn separates(&self, (a, c): (&ModelPoint, &ModelPoint), (b, d): (&ModelPoint, &ModelPoint)) -> bool {
        let (ta, tc) = (self.param(a), self.param(c));
        let inside = |t: f64| {
            let span = (tc - ta).rem_euclid(TAU);
            let off = (t - ta).rem_euclid(TAU);
            off > 0.0 && off < span
        };
        inside(self.param(b)) != inside(self.param(d))
    }

    /// Setwise equality, tested on samples of both circles.
    pub fn same_set(&self, other: &CircleOrLine, tol: f64) -> bool {
        self.is_line() == other.is_line()
            && self.samples(12).iter().all(|p| other.contains(p, tol))
            && other.samples(12).iter().all(|p| self.contains(p, tol))
    }
}

/// The unique circle or line through three distinct points.
pub fn circle_through(p: &ModelPoint, q: &ModelPoint, r: &ModelPoint) -> Result<CircleOrLine> {
    let pts = [p, q, r];
    let n = pts.iter().find_map(|x| x.dim()).ok_or_else(|| Error::Degenerate("all three points are ∞".into()))?;
    for x in pts {
        x.check_dim(n)?;
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if chordal_distance(pts[i], pts[j]) <= 1e-14 {
            return Err(Error::Degenerate(format!("coincident points {} and {}", pts[i], pts[j])));
        }
    }
    let finite: Vec<&DVector<f64>> = pts.iter().filter_map(|x| x.coords()).collect();
    if finite.len() == 2 {
        return CircleOrLine::line(finite[0].clone(), finite[1] - finite[0]);
    }
    let (a, b, c) = (finite[0], finite[1], finite[2]);
    let u = b - a;
    let v = c - a;
    let e1 = &u / u.norm();
    let v_perp = &v - &e1 * v.dot(&e1);
    if v_perp.norm() <= COLLINEAR_TOL * u.norm().max(v.norm()) {
        let far = if v.norm() > u.norm() { c } else { b };
        return CircleOrLine::line(a.clone(), far - a);
    }
    let e2 = &v_perp / v_perp.norm();
    // second pass: one projection loses orthogonality when v is nearly along u
    let e2 = &e2 - &e1 * e2.dot(&e1);
    let e2 = &e2 / e2.norm();
    // circumcenter in the (e1, e2) frame with a at the origin
    let (bx, cx, cy) = (u.norm(), v.dot(&e1), v.dot(&e2));
    let ox = bx / 2.0;
    let oy = (cx * cx + cy * cy - bx * cx) / (2.0 * cy);
    let center = a + &e1 * ox + &e2 * oy;
    let radius = ox.hypot(oy);
    CircleOrLine::circle(center, radius, e1, e2)
}

/// Image of a circle under a Möbius map.
///
/// Maps three well-separated parameter points and fits the image through
/// them (through ∞ when the map's pole lies on the circle), then checks the
/// fit on further samples.
pub fn map_circle(m: &MapWord, c: &CircleOrLine) -> Result<CircleOrLine> {
    if m.dim() != c.dim() {
        return Err(Error::Dimension { expected: c.dim(), found: m.dim() });
    }
    let pole = m.inverse().apply(&ModelPoint::Infinity);
    let through_infinity = match &pole {
        ModelPoint::Infinity => c.is_line(),
        p => c.contains(p, 1e-12),
    };
    let images: Vec<ModelPoint> = c.samples(12).iter().map(|p| m.apply(p)).filter(|img| !img.is_infinite()).collect();
    let spread = |a: &ModelPoint, b: &ModelPoint| chordal_distance(a, b);
    let fitted = if through_infinity {
        let mut best = (f64::NEG_INFINITY, 0, 1);
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                let s = spread(&images[i], &images[j])
                    .min(spread(&images[i], &ModelPoint::Infinity))
                    .min(spread(&images[j], &ModelPoint::Infinity));
                if s > best.0 {
                    best = (s, i, j);
                }
            }
        }
        circle_through(&images[best.1], &images[best.2], &ModelPoint::Infinity)?
    } else {
        let mut best = (f64::NEG_INFINITY, 0, 1, 2);
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                for k in j + 1..images.len() {
                    let s = spread(&images[i], &images[j])
                        .min(spread(&images[i], &images[k]))
                        .min(spread(&images[j], &images[k]));
                    if s > best.0 {
                        best = (s, i, j, k);
                    }
                }
            }
        }
        let fitted = circle_through(&images[best.1], &images[best.2], &images[best.3])?;
        if fitted.is_line() {
            // numerically collinear images of a circle avoiding the pole
            return Err(Error::Degenerate("image circle fitted as a line".into()));
        }
        fitted
    };
    let check: Vec<ModelPoint> = (0..10).map(|j| c.point_at(TAU * (j as f64 + 0.37) / 10.0)).collect();
    let worst = check.iter().map(|p| fitted.residual(&m.apply(p))).fold(0.0, f64::max);
    if worst > MAP_VALIDATION_TOL {
        return Err(Error::Degenerate(format!("image circle validation residual {worst:e}")));
    }
    Ok(fitted)
}

/// Intersection of two distinct circles or lines: at most two points
/// (∞ is common to any two lines).
pub fn intersect_circles(c1: &CircleOrLine, c2: &CircleOrLine) -> Result<Vec<ModelPoint>> {
    if c1.dim() != c2.dim() {
        return Err(Error::Dimension { expected: c1.dim(), found: c2.dim() });
    }
    let coincident = || Err(Error::Degenerate("the circles coincide".into()));
    match (c1, c2) {
        (CircleOrLine::Line { base: b1, direction: d1 }, CircleOrLine::Line { base: b2, direction: d2 }) => {
            let cross = 1.0 - d1.dot(d2).powi(2);
            let w = b2 - b1;
            let scale = 1.0 + w.norm();
            if cross <= 1e-20 {
                let gap = (&w - d1 * w.dot(d1)).norm();
                if gap <= 1e-12 * scale {
                    return coincident();
                }
                return Ok(vec![ModelPoint::Infinity]);
            }
            let m = DMatrix::from_columns(&[d1.clone(), -d2.clone()]);
            let st = (m.transpose() * &m).lu().solve(&(m.transpose() * &w)).expect("non-parallel lines");
            let p = b1 + d1 * st[0];
            let q = b2 + d2 * st[1];
            if (&p - &q).norm() <= 1e-10 * scale {
                Ok(vec![ModelPoint::Finite((p + q) / 2.0), ModelPoint::Infinity])
            } else {
                Ok(vec![ModelPoint::Infinity])
            }
        }
        (CircleOrLine::Line { base, direction }, circle @ CircleOrLine::Circle { .. })
        | (circle @ CircleOrLine::Circle { .. }, CircleOrLine::Line { base, direction }) => {
            line_meets_circle(base, direction, circle)
        }
        (CircleOrLine::Circle { center, radius, plane }, other @ CircleOrLine::Circle { .. }) => {
            circle_meets_circle(center, *radius, plane, other).or_else(|e| match e {
                Error::Degenerate(_) => coincident(),
                e => Err(e),
            })
        }
    }
}

fn frame_of(c: &CircleOrLine) -> (&DVector<f64>, f64, &[DVector<f64>; 2]) {
    match c {
        CircleOrLine::Circle { center, radius, plane } => (center, *radius, plane),
        CircleOrLine::Line { .. } => unreachable!("circle expected"),
    }
}

fn perp_to_plane(v: &DVector<f64>, [f1, f2]: &[DVector<f64>; 2]) -> DVector<f64> {
    v - f1 * v.dot(f1) - f2 * v.dot(f2)
}

fn line_meets_circle(base: &DVector<f64>, dir: &DVector<f64>, circle: &CircleOrLine) -> Result<Vec<ModelPoint>> {
    let (c, r, plane) = frame_of(circle);
    let w = base - c;
    let scale = r + w.norm();
    let pw = perp_to_plane(&w, plane);
    let pd = perp_to_plane(dir, plane);
    let on_sphere = |t: f64| ((&w + dir * t).norm() - r).abs() <= 1e-10 * scale;
    if pd.norm() > 1e-10 {
        // the line crosses the plane once
        let t = -pw.dot(&pd) / pd.norm_squared();
        let hit = (&pw + &pd * t).norm() <= 1e-10 * scale && on_sphere(t);
        return Ok(if hit { vec![ModelPoint::Finite(base + dir * t)] } else { vec![] });
    }
    if pw.norm() > 1e-10 * scale {
        return Ok(vec![]);
    }
    let half_b = w.dot(dir);
    let disc = half_b * half_b - (w.norm_squared() - r * r);
    let tangency = 1e-12 * scale * scale;
    if disc < -tangency {
        Ok(vec![])
    } else if disc <= tangency {
        Ok(vec![ModelPoint::Finite(base - dir * half_b)])
    } else {
        let s = disc.sqrt();
        Ok(vec![ModelPoint::Finite(base + dir * (-half_b - s)), ModelPoint::Finite(base + dir * (-half_b + s))])
    }
}

/// Points `c1 + r1(C e1 + S e2)` on the second circle satisfy a linear
/// system `k + pC + qS = 0` (one row for the second circle's sphere, one per
/// coordinate of the component normal to its plane) together with `C² + S² = 1`.
fn circle_meets_circle(
    c1: &DVector<f64>,
    r1: f64,
    [e1, e2]: &[DVector<f64>; 2],
    other: &CircleOrLine,
) -> Result<Vec<ModelPoint>> {
    let (c2, r2, plane2) = frame_of(other);
    let w = c1 - c2;
    let scale = r1 + r2 + w.norm();
    let n = c1.len();
    let mut rows: Vec<[f64; 3]> = Vec::with_capacity(n + 1);
    let s2 = scale * scale;
    rows.push([(w.norm_squared() + r1 * r1 - r2 * r2) / s2, 2.0 * r1 * w.dot(e1) / s2, 2.0 * r1 * w.dot(e2) / s2]);
    let (pw, pe1, pe2) = (perp_to_plane(&w, plane2), perp_to_plane(e1, plane2), perp_to_plane(e2, plane2));
    for j in 0..n {
        rows.push([pw[j] / scale, r1 * pe1[j] / scale, r1 * pe2[j] / scale]);
    }
    let coeffs = DMatrix::from_fn(rows.len(), 2, |i, j| rows[i][j + 1]);
    let rhs = DVector::from_fn(rows.len(), |i, _| -rows[i][0]);
    // rank and singular directions from the 2×2 normal matrix
    let eig = (coeffs.transpose() * &coeffs).symmetric_eigen();
    let (hi, lo) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let sv = [eig.eigenvalues[hi].max(0.0).sqrt(), eig.eigenvalues[lo].max(0.0).sqrt()];
    let rank_tol = 1e-10;
    let point = |cs: f64, sn: f64| ModelPoint::Finite(c1 + (e1 * cs + e2 * sn) * r1);
    let consistent = |x: &DVector<f64>| (&coeffs * x - &rhs).norm() <= 1e-9;

    if sv[0] <= rank_tol {
        return if rhs.norm() <= 1e-12 { Err(Error::Degenerate("the circles coincide".into())) } else { Ok(vec![]) };
    }
    if sv[1] > rank_tol {
        let x = coeffs.clone().svd(true, true).solve(&rhs, 0.0).expect("full rank");
        let on_unit = (x[0].hypot(x[1]) - 1.0).abs() <= 1e-8;
        return Ok(if consistent(&x) && on_unit { vec![point(x[0], x[1])] } else { vec![] });
    }
    // rank one: v·(C, S) = s along the leading right singular vector
    let v: DVector<f64> = eig.eigenvectors.column(hi).normalize();
    let image = &coeffs * &v;
    let s = image.dot(&rhs) / image.norm_squared();
    let along = &v * s;
    if !consistent(&along) && s.abs() <= 1.0 {
        return Ok(vec![]);
    }
    let v_perp = DVector::from_vec(vec![-v[1], v[0]]);
    let slack = 1.0 - s * s;
    if slack < -1e-12 {
        Ok(vec![])
    } else if slack <= 1e-12 {
        Ok(vec![point(along[0], along[1])])
    } else {
        let tau = slack.sqrt();
        let a = &along + &v_perp * tau;
        let b = &along - &v_perp * tau;
        Ok(vec![point(a[0], a[1]), point(b[0], b[1])])
    }
}

/// Relative residual of the Ptolemy equality for four points of a circle.
///
/// The points are put in cyclic order `p0, p1, p2, p3`, so `(p0, p2)`
/// separates `(p1, p3)`, and the chordal metric gives
/// `|LHS - RHS| / LHS` with `LHS = d(p0,p2)d(p1,p3)` and
/// `RHS = d(p0,p1)d(p2,p3) + d(p0,p3)d(p1,p2)`.
pub fn verify_ptolemy_equality(c: &CircleOrLine, points: [&ModelPoint; 4]) -> Result<f64> {
    for p in points {
        p.check_dim(c.dim())?;
        let off = c.residual(p);
        if off > ON_CIRCLE_TOL {
            return Err(Error::Precondition(format!("point {p} is off the circle (residual {off:e})")));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if chordal_distance(points[i], points[j]) <= 1e-14 {
                return Err(Error::Degenerate(format!("repeated point {}", points[i])));
            }
        }
    }
    let mut ordered = points;
    ordered.sort_by(|a, b| c.param(a).total_cmp(&c.param(b)));
    let d = |i: usize, j: usize| chordal_distance(ordered[i], ordered[j]);
    let lhs = d(0, 2) * d(1, 3);
    let rhs = d(0, 1) * d(2, 3) + d(0, 3) * d(1, 2);
    Ok((lhs - rhs).abs() / lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::map::MoebiusMapNF;
    use crate::sampling;

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(c)
    }

    fn p(c: &[f64]) -> ModelPoint {
        ModelPoint::from_slice(c)
    }

    fn unit_circle() -> CircleOrLine {
        CircleOrLine::circle(v(&[0.0, 0.0]), 1.0, v(&[1.0, 0.0]), v(&[0.0, 1.0])).unwrap()
    }

    #[test]
    fn through_three_points() {
        let line = circle_through(&p(&[0.0, 0.0]), &p(&[1.0, 0.0]), &p(&[2.0, 0.0])).unwrap();
        match &line {
            CircleOrLine::Line { direction, .. } => assert!((direction[0].abs() - 1.0).abs() < 1e-15),
            _ => panic!("expected a line"),
        }
        let circle = circle_through(&p(&[0.0, 0.0]), &p(&[1.0, 0.0]), &p(&[0.0, 1.0])).unwrap();
        match &circle {
            CircleOrLine::Circle { center, radius, .. } => {
                assert!((center - v(&[0.5, 0.5])).norm() < 1e-15);
                assert!((radius - 2f64.sqrt() / 2.0).abs() < 1e-15);
            }
            _ => panic!("expected a circle"),
        }
        let via_inf = circle_through(&p(&[0.0, 0.0]), &p(&[1.0, 0.0]), &ModelPoint::Infinity).unwrap();
        assert!(via_inf.same_set(&line, 1e-12));
        assert!(circle_through(&p(&[0.0, 0.0]), &p(&[0.0, 0.0]), &p(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn inversion_of_a_line_missing_the_center() {
        let inv: MapWord = MoebiusMapNF::unit_inversion(v(&[0.0, 0.0])).into();
        let line = CircleOrLine::line(v(&[1.0, 0.0]), v(&[0.0, 1.0])).unwrap();
        let image = map_circle(&inv, &line).unwrap();
        let expected = CircleOrLine::circle(v(&[0.5, 0.0]), 0.5, v(&[1.0, 0.0]), v(&[0.0, 1.0])).unwrap();
        assert!(image.same_set(&expected, 1e-10));

        let through = CircleOrLine::line(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        assert!(map_circle(&inv, &through).unwrap().same_set(&through, 1e-10));

        let shift: MapWord = MoebiusMapNF::translation(v(&[2.0, -1.0])).into();
        match map_circle(&shift, &unit_circle()).unwrap() {
            CircleOrLine::Circle { center, radius, .. } => {
                assert!((center - v(&[2.0, -1.0])).norm() < 1e-12);
                assert!((radius - 1.0).abs() < 1e-12);
            }
            _ => panic!("expected a circle"),
        }
    }

    #[test]
    fn intersections() {
        let other = CircleOrLine::circle(v(&[1.0, 0.0]), 1.0, v(&[1.0, 0.0]), v(&[0.0, 1.0])).unwrap();
        let mut pts = intersect_circles(&unit_circle(), &other).unwrap();
        pts.sort_by(|a, b| a.coords().unwrap()[1].total_cmp(&b.coords().unwrap()[1]));
        let h = 3f64.sqrt() / 2.0;
        assert_eq!(pts.len(), 2);
        assert!((pts[0].coords().unwrap() - v(&[0.5, -h])).norm() < 1e-12);
        assert!((pts[1].coords().unwrap() - v(&[0.5, h])).norm() < 1e-12);

        let l1 = CircleOrLine::line(v(&[0.0, 0.0]), v(&[1.0, 0.0])).unwrap();
        let l2 = CircleOrLine::line(v(&[0.0, 1.0]), v(&[1.0, 0.0])).unwrap();
        assert_eq!(intersect_circles(&l1, &l2).unwrap(), vec![ModelPoint::Infinity]);

        let inner = CircleOrLine::circle(v(&[0.0, 0.0]), 0.5, v(&[1.0, 0.0]), v(&[0.0, 1.0])).unwrap();
        assert!(intersect_circles(&unit_circle(), &inner).unwrap().is_empty());
        assert!(intersect_circles(&unit_circle(), &unit_circle()).is_err());
        assert!(intersect_circles(&l1, &l1).is_err());

        // crossing lines meet at a point and at ∞
        let diag = CircleOrLine::line(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        assert_eq!(intersect_circles(&l1, &diag).unwrap().len(), 2);
        // a line through the unit circle
        assert_eq!(intersect_circles(&l1, &unit_circle()).unwrap().len(), 2);
    }

    #[test]
    fn intersections_in_space() {
        // two circles of R³ in different planes sharing two points
        let a = p(&[1.0, 0.0, 0.0]);
        let b = p(&[-1.0, 0.0, 0.0]);
        let c1 = circle_through(&a, &b, &p(&[0.0, 1.0, 0.0])).unwrap();
        let c2 = circle_through(&a, &b, &p(&[0.0, 0.3, 2.0])).unwrap();
        let pts = intersect_circles(&c1, &c2).unwrap();
        assert_eq!(pts.len(), 2);
        for q in [&a, &b] {
            assert!(pts.iter().any(|x| chordal_distance(x, q) < 1e-9));
        }
        // a line piercing the plane of a circle at one of its points
        let line = CircleOrLine::line(v(&[0.0, 1.0, -1.0]), v(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(intersect_circles(&line, &c1).unwrap().len(), 1);
    }

    #[test]
    fn ptolemy_equality_cases() {
        let c = unit_circle();
        let quarter: Vec<ModelPoint> = (0..4).map(|k| c.point_at(k as f64 * PI / 2.0)).collect();
        let r = verify_ptolemy_equality(&c, [&quarter[2], &quarter[0], &quarter[3], &quarter[1]]).unwrap();
        assert!(r < 1e-15);

        let line = CircleOrLine::line(v(&[0.0]), v(&[1.0])).unwrap();
        let pts = [p(&[0.0]), p(&[1.0]), p(&[3.0]), ModelPoint::Infinity];
        let r = verify_ptolemy_equality(&line, [&pts[0], &pts[1], &pts[2], &pts[3]]).unwrap();
        assert!(r < 1e-15);

        let mut rng = sampling::rng(21, 0);
        let m = sampling::map_word(&mut rng, 2, 3);
        let image = map_circle(&m, &c).unwrap();
        let moved: Vec<ModelPoint> = quarter.iter().map(|q| m.apply(q)).collect();
        let r = verify_ptolemy_equality(&image, [&moved[0], &moved[1], &moved[2], &moved[3]]).unwrap();
        assert!(r <= 1e-10);

        assert!(verify_ptolemy_equality(&c, [&quarter[0], &quarter[0], &quarter[1], &quarter[2]]).is_err());
        let off = p(&[0.0, 0.0]);
        assert!(verify_ptolemy_equality(&c, [&off, &quarter[0], &quarter[1], &quarter[2]]).is_err());
    }

    #[test]
    fn separation_on_lines_and_circles() {
        let line = CircleOrLine::line(v(&[0.0]), v(&[1.0])).unwrap();
        let (o, inf) = (p(&[0.0]), ModelPoint::Infinity);
        assert!(line.separates((&o, &inf), (&p(&[1.0]), &p(&[-1.0]))));
        assert!(!line.separates((&o, &inf), (&p(&[1.0]), &p(&[3.0]))));
        let c = unit_circle();
        let q: Vec<ModelPoint> = (0..4).map(|k| c.point_at(k as f64 * PI / 2.0)).collect();
        assert!(c.separates((&q[0], &q[2]), (&q[1], &q[3])));
        assert!(!c.separates((&q[0], &q[1]), (&q[2], &q[3])));
    }

    #[test]
    fn json_tagging() {
        let json = serde_json::to_string(&CircleOrLine::line(v(&[0.0, 1.0]), v(&[2.0, 0.0])).unwrap()).unwrap();
        assert_eq!(json, r#"{"type":"line","base":[0.0,1.0],"direction":[1.0,0.0]}"#);
        let back: CircleOrLine = serde_json::from_str(&json).unwrap();
        assert!(back.is_line());
        let bad = r#"{"type":"circle","center":[0.0,0.0],"radius":1.0,"plane":[[1.0,0.0],[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<CircleOrLine>(bad).is_err());
    }

    #[test]
    fn nearly_equal_coplanar_circles_meet_twice_in_either_order() {
        let c1 = CircleOrLine::circle(
            v(&[-2.5200804945406934, -0.36109153669897687]),
            1.804260202990009,
            v(&[0.22395969880346206, -0.9745984061714151]),
            v(&[0.9745984061714151, 0.2239596988034621]),
        )
        .unwrap();
        let c2 = CircleOrLine::circle(
            v(&[-2.5084512439665314, -0.35841917089229475]),
            1.8034455206933222,
            v(&[0.22395969880346206, -0.9745984061714151]),
            v(&[0.9745984061714151, 0.22395969880346206]),
        )
        .unwrap();
        let common = p(&[-2.7972815183874453, 1.4217473434222363]);
        for pts in [intersect_circles(&c1, &c2).unwrap(), intersect_circles(&c2, &c1).unwrap()] {
            assert_eq!(pts.len(), 2);
            assert!(pts.iter().any(|q| chordal_distance(q, &common) < 1e-9));
        }
    }
}
