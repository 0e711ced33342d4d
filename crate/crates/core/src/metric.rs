//! Extended metric spaces: finite point sets whose distance table may contain
//! one infinitely remote point.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;
use crate::tolerance::Tolerance;

/// Above this many points `validate` samples triangles instead of scanning all of them.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 200;
const SAMPLED_TRIANGLES: usize = 1_000_000;

/// A distance value that may be infinite.
///
/// Serialized as a JSON number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtDistance {
    Finite(f64),
    Infinite,
}

impl ExtDistance {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtDistance::Finite(v) => Some(v),
            ExtDistance::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtDistance::Infinite)
    }

    fn scaled(self, factor: f64) -> Self {
        match self {
            ExtDistance::Finite(v) => ExtDistance::Finite(v * factor),
            ExtDistance::Infinite => ExtDistance::Infinite,
        }
    }
}

impl fmt::Display for ExtDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtDistance::Finite(v) => write!(f, "{v}"),
            ExtDistance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtDistance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtDistance::Finite(v) => serializer.serialize_f64(*v),
            ExtDistance::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtDistance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct DistanceVisitor;

        impl Visitor<'_> for DistanceVisitor {
            type Value = ExtDistance;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtDistance, E> {
                Ok(ExtDistance::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtDistance, E> {
                Ok(ExtDistance::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtDistance, E> {
                Ok(ExtDistance::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtDistance, E> {
                parse_token(v).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(DistanceVisitor)
    }
}

/// Parses a textual distance: a decimal number or `inf` (case-insensitive).
pub fn parse_token(token: &str) -> Result<ExtDistance> {
    let t = token.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(ExtDistance::Infinite);
    }
    t.parse::<f64>().map(ExtDistance::Finite).map_err(|_| Error::Input(format!("cannot parse distance `{t}`")))
}

/// A finite point set with a symmetric table of extended distances and at
/// most one infinitely remote point.
///
/// Construction only checks the table's shape and that entries are
/// nonnegative numbers; the metric axioms are checked by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedMetricSpace {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    table: Vec<ExtDistance>,
    infinite: Option<usize>,
}

impl ExtendedMetricSpace {
    pub fn new(ids: Vec<String>, rows: Vec<Vec<ExtDistance>>, infinite_point: Option<&str>) -> Result<Self> {
        let n = ids.len();
        if rows.len() != n {
            return Err(Error::Input(format!("distance table has {} rows for {n} points", rows.len())));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "row {i} of the distance table has {} entries, expected {n}",
                    row.len()
                )));
            }
            table.extend(row);
        }
        let index = build_index(&ids)?;
        let infinite = match infinite_point {
            Some(id) => Some(*index.get(id).ok_or_else(|| Error::UnknownPoint(id.to_string()))?),
            None => None,
        };
        for (k, d) in table.iter().enumerate() {
            if let ExtDistance::Finite(v) = d {
                if !v.is_finite() || *v < 0.0 {
                    return Err(Error::Input(format!(
                        "entry ({}, {}) = {v} is not a nonnegative number",
                        ids[k / n],
                        ids[k % n]
                    )));
                }
            }
        }
        Ok(Self { ids, index, table, infinite })
    }

    /// Builds a space from a distance function over point indices.
    pub fn from_fn(
        ids: Vec<String>,
        infinite: Option<usize>,
        mut distance: impl FnMut(usize, usize) -> ExtDistance,
    ) -> Result<Self> {
        let n = ids.len();
        let rows = (0..n).map(|i| (0..n).map(|j| distance(i, j)).collect()).collect();
        let omega = infinite.map(|k| ids[k].clone());
        Self::new(ids, rows, omega.as_deref())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    pub fn distance(&self, i: usize, j: usize) -> ExtDistance {
        self.table[i * self.ids.len() + j]
    }

    pub fn distance_between(&self, a: &str, b: &str) -> Result<ExtDistance> {
        Ok(self.distance(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn infinite_index(&self) -> Option<usize> {
        self.infinite
    }

    pub fn infinite_point(&self) -> Option<&str> {
        self.infinite.map(|i| self.ids[i].as_str())
    }

    /// Rows of the distance table, in point order.
    pub fn rows(&self) -> Vec<Vec<ExtDistance>> {
        self.table.chunks(self.ids.len().max(1)).take(self.ids.len()).map(<[ExtDistance]>::to_vec).collect()
    }
}

fn build_index(ids: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::Input(format!("duplicate point id `{id}`")));
        }
    }
    Ok(index)
}

/// One violated axiom together with the points witnessing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum Violation {
    NonzeroSelfDistance {
        point: String,
        value: ExtDistance,
    },
    Asymmetric {
        a: String,
        b: String,
        forward: ExtDistance,
        backward: ExtDistance,
    },
    /// A point other than ω is at finite distance from ω.
    FiniteToInfinitePoint {
        point: String,
        infinite_point: String,
        value: f64,
    },
    /// An infinite entry between two points neither of which is ω.
    UnexpectedInfinite {
        a: String,
        b: String,
    },
    ZeroDistance {
        a: String,
        b: String,
    },
    Triangle {
        a: String,
        b: String,
        c: String,
        excess: f64,
    },
}

/// How triangle inequalities are scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TriangleScan {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub triangles_checked: usize,
    pub scan: TriangleScan,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every extended-metric axiom; triangles are scanned exhaustively up
/// to [`EXHAUSTIVE_TRIANGLE_LIMIT`] points and sampled above it.
pub fn validate(space: &ExtendedMetricSpace, tol: Tolerance) -> ValidationReport {
    let scan = if space.len() <= EXHAUSTIVE_TRIANGLE_LIMIT {
        TriangleScan::Exhaustive
    } else {
        TriangleScan::Sampled { count: SAMPLED_TRIANGLES, seed: 0 }
    };
    validate_with(space, tol, scan)
}

pub fn validate_with(space: &ExtendedMetricSpace, tol: Tolerance, scan: TriangleScan) -> ValidationReport {
    let n = space.len();
    let omega = space.infinite_index();
    let id = |i: usize| space.id(i).to_string();
    let mut violations = Vec::new();

    for i in 0..n {
        if space.distance(i, i) != ExtDistance::Finite(0.0) {
            violations.push(Violation::NonzeroSelfDistance { point: id(i), value: space.distance(i, i) });
        }
    }

    for i in 0..n {
        for j in (i + 1)..n {
            let (fwd, bwd) = (space.distance(i, j), space.distance(j, i));
            let symmetric = match (fwd, bwd) {
                (ExtDistance::Finite(x), ExtDistance::Finite(y)) => tol.close(x, y),
                (ExtDistance::Infinite, ExtDistance::Infinite) => true,
                _ => false,
            };
            if !symmetric {
                violations.push(Violation::Asymmetric { a: id(i), b: id(j), forward: fwd, backward: bwd });
            }
            let touches_omega = omega == Some(i) || omega == Some(j);
            let entries = [(i, j, fwd), (j, i, bwd)];
            let entries = if symmetric { &entries[..1] } else { &entries[..] };
            for &(p, q, d) in entries {
                match d {
                    ExtDistance::Finite(v) if touches_omega => {
                        let (pt, w) = if omega == Some(q) { (p, q) } else { (q, p) };
                        violations.push(Violation::FiniteToInfinitePoint {
                            point: id(pt),
                            infinite_point: id(w),
                            value: v,
                        });
                    }
                    ExtDistance::Finite(v) if v <= tol.abs => {
                        violations.push(Violation::ZeroDistance { a: id(p), b: id(q) });
                    }
                    ExtDistance::Infinite if !touches_omega => {
                        violations.push(Violation::UnexpectedInfinite { a: id(p), b: id(q) });
                    }
                    _ => {}
                }
            }
        }
    }

    let finite_points: Vec<usize> = (0..n).filter(|&i| Some(i) != omega).collect();
    let mut checked = 0usize;
    let mut check = |a: usize, b: usize, c: usize, out: &mut Vec<Violation>| {
        // d(a,c) <= d(a,b) + d(b,c)
        checked += 1;
        let (Some(ac), Some(ab), Some(bc)) =
            (space.distance(a, c).finite(), space.distance(a, b).finite(), space.distance(b, c).finite())
        else {
            return;
        };
        let excess = ac - ab - bc;
        if !tol.accepts(excess, ac) {
            out.push(Violation::Triangle { a: id(a), b: id(b), c: id(c), excess });
        }
    };

    match scan {
        TriangleScan::Exhaustive => {
            for (x, &a) in finite_points.iter().enumerate() {
                for &c in &finite_points[x + 1..] {
                    for &b in &finite_points {
                        if b != a && b != c {
                            check(a, b, c, &mut violations);
                        }
                    }
                }
            }
        }
        TriangleScan::Sampled { count, seed } => {
            if finite_points.len() >= 3 {
                let mut rng = sampling::rng(seed, 0);
                let m = finite_points.len();
                for _ in 0..count {
                    let a = finite_points[rng.random_range(0..m)];
                    let b = finite_points[rng.random_range(0..m)];
                    let c = finite_points[rng.random_range(0..m)];
                    if a != b && b != c && a != c {
                        check(a, b, c, &mut violations);
                    }
                }
            }
        }
    }

    ValidationReport { violations, triangles_checked: checked, scan }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("{name} must be a positive number, got {value}")))
    }
}

/// Metric inversion of radius `r` at `z`:
/// `d_z(x, y) = r² d(x, y) / (d(z, x) d(z, y))`.
///
/// The returned space has `z` as its infinitely remote point. A former
/// infinite point ω becomes finite with `d_z(x, ω) = r² / d(z, x)`, the
/// only value that keeps every cross-ratio unchanged.
pub fn metric_inversion(space: &ExtendedMetricSpace, z: &str, r: f64) -> Result<ExtendedMetricSpace> {
    positive("inversion radius", r)?;
    let zi = space.index_of(z)?;
    let omega = space.infinite_index();
    if omega == Some(zi) {
        return Err(Error::Precondition(format!(
            "`{z}` is already the infinite point; inversion there is a rescaling"
        )));
    }
    let r2 = r * r;
    let from_z = |x: usize| -> Result<f64> {
        match space.distance(zi, x) {
            ExtDistance::Finite(v) if v > 0.0 => Ok(v),
            ExtDistance::Finite(_) => {
                Err(Error::Degenerate(format!("`{}` is at distance 0 from the inversion center", space.id(x))))
            }
            ExtDistance::Infinite => {
                Err(Error::Degenerate(format!("`{}` is at infinite distance from the inversion center", space.id(x))))
            }
        }
    };
    let n = space.len();
    let mut rows = vec![vec![ExtDistance::Finite(0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            rows[i][j] = if i == zi || j == zi {
                ExtDistance::Infinite
            } else if Some(i) == omega || Some(j) == omega {
                let x = if Some(i) == omega { j } else { i };
                ExtDistance::Finite(r2 / from_z(x)?)
            } else {
                match space.distance(i, j) {
                    ExtDistance::Finite(d) => ExtDistance::Finite(r2 * d / (from_z(i)? * from_z(j)?)),
                    ExtDistance::Infinite => ExtDistance::Infinite,
                }
            };
        }
    }
    ExtendedMetricSpace::new(space.ids.clone(), rows, Some(z))
}

/// Multiplies every finite distance by `lambda`.
pub fn rescale(space: &ExtendedMetricSpace, lambda: f64) -> Result<ExtendedMetricSpace> {
    positive("scale factor", lambda)?;
    let mut out = space.clone();
    for d in &mut out.table {
        *d = d.scaled(lambda);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereRadius {
    Radius(f64),
    /// A point lying on the sphere.
    Witness(String),
}

/// A metric sphere around `center` in a metric whose infinite point is `far_point`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSphereSpec {
    pub center: String,
    pub far_point: String,
    pub radius: SphereRadius,
}

/// Points at distance `r` from the center, where the space's infinite point
/// must already be the sphere's far point.
pub fn metric_sphere(space: &ExtendedMetricSpace, spec: &MetricSphereSpec, tol: Tolerance) -> Result<Vec<String>> {
    if spec.center == spec.far_point {
        return Err(Error::Input("sphere center equals its far point".into()));
    }
    let center = space.index_of(&spec.center)?;
    space.index_of(&spec.far_point)?;
    if space.infinite_point() != Some(spec.far_point.as_str()) {
        return Err(Error::Precondition(format!(
            "far point `{}` is not the infinite point of the metric; invert there first",
            spec.far_point
        )));
    }
    let radius = match &spec.radius {
        SphereRadius::Radius(r) => {
            positive("sphere radius", *r)?;
            *r
        }
        SphereRadius::Witness(w) => {
            let wi = space.index_of(w)?;
            match space.distance(center, wi) {
                ExtDistance::Finite(r) if r > 0.0 => r,
                _ => return Err(Error::Input(format!("witness `{w}` does not define a positive finite radius"))),
            }
        }
    };
    Ok((0..space.len())
        .filter(|&x| match space.distance(center, x) {
            ExtDistance::Finite(d) => tol.close(d, radius),
            ExtDistance::Infinite => false,
        })
        .map(|x| space.id(x).to_string())
        .collect())
}

/// Like [`metric_sphere`], but first applies a metric inversion of radius
/// `inversion_radius` at the far point when it is not yet infinite.
pub fn metric_sphere_inverting(
    space: &ExtendedMetricSpace,
    spec: &MetricSphereSpec,
    inversion_radius: f64,
    tol: Tolerance,
) -> Result<Vec<String>> {
    if space.infinite_point() == Some(spec.far_point.as_str()) {
        metric_sphere(space, spec, tol)
    } else {
        let inverted = metric_inversion(space, &spec.far_point, inversion_radius)?;
        metric_sphere(&inverted, spec, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExtDistance::{Finite as F, Infinite as I};

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn line_space(with_omega: bool) -> ExtendedMetricSpace {
        // o=0, a=1, b=2 on the real line
        let coords = [0.0, 1.0, 2.0];
        let mut names = vec!["o", "a", "b"];
        if with_omega {
            names.push("w");
        }
        ExtendedMetricSpace::from_fn(ids(&names), with_omega.then_some(3), |i, j| {
            if i == j {
                F(0.0)
            } else if i == 3 || j == 3 {
                I
            } else {
                F(f64::abs(coords[i] - coords[j]))
            }
        })
        .unwrap()
    }

    #[test]
    fn collinear_points_are_valid() {
        let report = validate(&line_space(false), Tolerance::default());
        assert!(report.is_valid(), "{:?}", report.violations);
        assert!(validate(&line_space(true), Tolerance::default()).is_valid());
    }

    #[test]
    fn asymmetry_is_reported() {
        let space =
            ExtendedMetricSpace::new(ids(&["a", "b"]), vec![vec![F(0.0), F(1.0)], vec![F(2.0), F(0.0)]], None).unwrap();
        let report = validate(&space, Tolerance::default());
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::Asymmetric { a, b, .. } if a == "a" && b == "b"
        )));
    }

    #[test]
    fn finite_distance_to_omega_is_reported() {
        let space = ExtendedMetricSpace::new(
            ids(&["a", "b", "w"]),
            vec![vec![F(0.0), F(1.0), F(5.0)], vec![F(1.0), F(0.0), I], vec![F(5.0), I, F(0.0)]],
            Some("w"),
        )
        .unwrap();
        let report = validate(&space, Tolerance::default());
        assert_eq!(
            report.violations,
            vec![Violation::FiniteToInfinitePoint { point: "a".into(), infinite_point: "w".into(), value: 5.0 }]
        );
    }

    #[test]
    fn stray_infinity_and_triangle_failures() {
        let space = ExtendedMetricSpace::new(
            ids(&["a", "b", "c"]),
            vec![vec![F(0.0), F(1.0), F(5.0)], vec![F(1.0), F(0.0), F(1.0)], vec![F(5.0), F(1.0), F(0.0)]],
            None,
        )
        .unwrap();
        let report = validate(&space, Tolerance::default());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Triangle { excess, .. } if (*excess - 3.0).abs() < 1e-12)));

        let stray = ExtendedMetricSpace::new(ids(&["a", "b"]), vec![vec![F(0.0), I], vec![I, F(0.0)]], None).unwrap();
        assert!(matches!(
            validate(&stray, Tolerance::default()).violations[..],
            [Violation::UnexpectedInfinite { .. }]
        ));
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(matches!(
            ExtendedMetricSpace::new(ids(&["a", "b"]), vec![vec![F(0.0), F(1.0)]], None),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            ExtendedMetricSpace::new(ids(&["a", "b"]), vec![vec![F(0.0), F(-1.0)], vec![F(-1.0), F(0.0)]], None),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            ExtendedMetricSpace::new(ids(&["a", "a"]), vec![vec![F(0.0); 2]; 2], None),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn inversion_at_origin_of_a_line() {
        let inv = metric_inversion(&line_space(false), "o", 1.0).unwrap();
        assert_eq!(inv.distance_between("a", "b").unwrap(), F(0.5));
        assert_eq!(inv.distance_between("a", "o").unwrap(), I);
        assert_eq!(inv.distance_between("o", "o").unwrap(), F(0.0));
        assert_eq!(inv.infinite_point(), Some("o"));

        let inv = metric_inversion(&line_space(true), "o", 1.0).unwrap();
        assert_eq!(inv.distance_between("w", "a").unwrap(), F(1.0));
        assert_eq!(inv.distance_between("w", "b").unwrap(), F(0.5));
        assert!(validate(&inv, Tolerance::default()).is_valid());
    }

    #[test]
    fn inversion_errors() {
        let space = line_space(true);
        assert!(matches!(metric_inversion(&space, "q", 1.0), Err(Error::UnknownPoint(_))));
        assert!(matches!(metric_inversion(&space, "w", 1.0), Err(Error::Precondition(_))));
        assert!(matches!(metric_inversion(&space, "o", 0.0), Err(Error::Input(_))));
    }

    #[test]
    fn inversion_is_an_involution() {
        let space = line_space(true);
        let there = metric_inversion(&space, "a", 1.7).unwrap();
        let back = metric_inversion(&there, "w", 1.7).unwrap();
        assert_eq!(back.infinite_point(), Some("w"));
        for i in 0..space.len() {
            for j in 0..space.len() {
                match (space.distance(i, j), back.distance(i, j)) {
                    (F(x), F(y)) => assert!((x - y).abs() <= 1e-12 * x.max(1.0)),
                    (I, I) => {}
                    other => panic!("mismatch {other:?}"),
                }
            }
        }
    }

    #[test]
    fn rescaling() {
        let space =
            ExtendedMetricSpace::new(ids(&["a", "b"]), vec![vec![F(0.0), F(3.0)], vec![F(3.0), F(0.0)]], None).unwrap();
        assert_eq!(rescale(&space, 1.0).unwrap(), space);
        assert_eq!(rescale(&space, 2.0).unwrap().distance(0, 1), F(6.0));
        assert!(rescale(&space, 0.0).is_err());
        assert!(rescale(&space, -1.0).is_err());
    }

    fn grid_with_infinity() -> ExtendedMetricSpace {
        let mut pts: Vec<(String, [f64; 2])> = Vec::new();
        for k in 0..8 {
            let t = k as f64 * std::f64::consts::FRAC_PI_4;
            pts.push((format!("u{k}"), [t.cos(), t.sin()]));
        }
        pts.push(("o".into(), [0.0, 0.0]));
        pts.push(("p".into(), [2.0, 0.0]));
        pts.push(("q".into(), [0.0, 2.0]));
        pts.push(("s".into(), [0.5, 0.5]));
        let n = pts.len();
        let mut names: Vec<String> = pts.iter().map(|p| p.0.clone()).collect();
        names.push("w".into());
        ExtendedMetricSpace::from_fn(names, Some(n), |i, j| {
            if i == j {
                F(0.0)
            } else if i == n || j == n {
                I
            } else {
                let (a, b) = (pts[i].1, pts[j].1);
                F(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
            }
        })
        .unwrap()
    }

    #[test]
    fn spheres_by_radius_and_witness() {
        let space = grid_with_infinity();
        let spec = |radius| MetricSphereSpec { center: "o".into(), far_point: "w".into(), radius };
        let unit = metric_sphere(&space, &spec(SphereRadius::Radius(1.0)), Tolerance::default()).unwrap();
        assert_eq!(unit, (0..8).map(|k| format!("u{k}")).collect::<Vec<_>>());
        let two = metric_sphere(&space, &spec(SphereRadius::Witness("p".into())), Tolerance::default()).unwrap();
        assert_eq!(two, vec!["p".to_string(), "q".to_string()]);
        let none = metric_sphere(&space, &spec(SphereRadius::Radius(3.0)), Tolerance::default()).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn sphere_requires_infinite_far_point() {
        let space = grid_with_infinity();
        let spec = MetricSphereSpec { center: "o".into(), far_point: "p".into(), radius: SphereRadius::Radius(1.0) };
        assert!(matches!(metric_sphere(&space, &spec, Tolerance::default()), Err(Error::Precondition(_))));
        // after inverting at p the call is allowed
        assert!(metric_sphere_inverting(&space, &spec, 1.0, Tolerance::default()).is_ok());
    }

    #[test]
    fn distance_tokens() {
        assert_eq!(parse_token(" inf ").unwrap(), I);
        assert_eq!(parse_token("2.5").unwrap(), F(2.5));
        assert!(parse_token("abc").is_err());
        let v: Vec<ExtDistance> = serde_json::from_str(r#"[1, 2.5, "inf"]"#).unwrap();
        assert_eq!(v, vec![F(1.0), F(2.5), I]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1.0,2.5,"inf"]"#);
    }
}
