use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric::{ExtDistance, ExtendedMetricSpace};

/// A point of the extended space `Rⁿ ∪ {∞}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelPoint {
    Finite(DVector<f64>),
    Infinity,
}

impl ModelPoint {
    pub fn from_slice(coords: &[f64]) -> Self {
        ModelPoint::Finite(DVector::from_column_slice(coords))
    }

    pub fn origin(n: usize) -> Self {
        ModelPoint::Finite(DVector::zeros(n))
    }

    /// The `i`-th standard basis vector.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        ModelPoint::Finite(v)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ModelPoint::Infinity)
    }

    pub fn coords(&self) -> Option<&DVector<f64>> {
        match self {
            ModelPoint::Finite(v) => Some(v),
            ModelPoint::Infinity => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.coords().map(DVector::len)
    }

    /// Checks the point against the ambient dimension `n`.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) if d != n => Err(Error::Dimension { expected: n, found: d }),
            _ => Ok(()),
        }
    }
}

impl From<DVector<f64>> for ModelPoint {
    fn from(v: DVector<f64>) -> Self {
        ModelPoint::Finite(v)
    }
}

impl fmt::Display for ModelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelPoint::Infinity => f.write_str("inf"),
            ModelPoint::Finite(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

/// Parses `inf` or comma-separated coordinates such as `1,0.5,-2`.
impl FromStr for ModelPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(ModelPoint::Infinity);
        }
        let coords = t
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad coordinate `{c}` in point `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input(format!("bad point `{t}`")));
        }
        Ok(ModelPoint::from_slice(&coords))
    }
}

/// JSON: an array of coordinates, or the string `"inf"`.
impl Serialize for ModelPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ModelPoint::Finite(v) => v.as_slice().serialize(s),
            ModelPoint::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ModelPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Coords(Vec<f64>),
            Token(String),
        }
        match Raw::deserialize(d)? {
            Raw::Coords(c) if !c.is_empty() => Ok(ModelPoint::from_slice(&c)),
            Raw::Coords(_) => Err(de::Error::custom("empty coordinate list")),
            Raw::Token(t) => t.parse().map_err(de::Error::custom),
        }
    }
}

fn norm2(v: &DVector<f64>) -> f64 {
    v.norm_squared()
}

/// Distance on the sphere through stereographic projection:
/// `2|x - y| / (√(1+|x|²) √(1+|y|²))`, and `2 / √(1+|x|²)` to infinity.
pub fn chordal_distance(x: &ModelPoint, y: &ModelPoint) -> f64 {
    match (x, y) {
        (ModelPoint::Infinity, ModelPoint::Infinity) => 0.0,
        (ModelPoint::Finite(v), ModelPoint::Infinity) | (ModelPoint::Infinity, ModelPoint::Finite(v)) => {
            2.0 / (1.0 + norm2(v)).sqrt()
        }
        (ModelPoint::Finite(a), ModelPoint::Finite(b)) => {
            2.0 * (a - b).norm() / ((1.0 + norm2(a)).sqrt() * (1.0 + norm2(b)).sqrt())
        }
    }
}

/// Euclidean distance, infinite when exactly one argument is ∞.
pub fn euclidean_distance(x: &ModelPoint, y: &ModelPoint) -> ExtDistance {
    match (x, y) {
        (ModelPoint::Finite(a), ModelPoint::Finite(b)) => ExtDistance::Finite((a - b).norm()),
        (ModelPoint::Infinity, ModelPoint::Infinity) => ExtDistance::Finite(0.0),
        _ => ExtDistance::Infinite,
    }
}

/// Distance in the metric of the standard structure whose infinitely remote
/// point is `omega`: Euclidean when `omega = ∞`, otherwise the unit-radius
/// metric inversion `|ab| / (|aω| |bω|)` of the Euclidean metric.
pub fn distance_with_pole(omega: &ModelPoint, a: &ModelPoint, b: &ModelPoint) -> ExtDistance {
    let w = match omega {
        ModelPoint::Infinity => return euclidean_distance(a, b),
        ModelPoint::Finite(w) => w,
    };
    if a == b {
        return ExtDistance::Finite(0.0);
    }
    let to_pole = |p: &ModelPoint| p.coords().map(|v| (v - w).norm());
    match (to_pole(a), to_pole(b)) {
        (Some(0.0), _) | (_, Some(0.0)) => ExtDistance::Infinite,
        (Some(da), Some(db)) => match euclidean_distance(a, b) {
            ExtDistance::Finite(d) => ExtDistance::Finite(d / (da * db)),
            ExtDistance::Infinite => ExtDistance::Infinite,
        },
        (Some(da), None) | (None, Some(da)) => ExtDistance::Finite(1.0 / da),
        (None, None) => ExtDistance::Finite(0.0),
    }
}

/// Which metric to read off a set of model points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelMetric {
    /// Euclidean; a point at ∞ becomes the infinitely remote point.
    Euclidean,
    /// Bounded chordal metric; ∞ is an ordinary point.
    Chordal,
}

/// Builds the finite extended metric space spanned by `points`.
pub fn sample_space(ids: Vec<String>, points: &[ModelPoint], metric: ModelMetric) -> Result<ExtendedMetricSpace> {
    if ids.len() != points.len() {
        return Err(Error::Input(format!("{} ids for {} points", ids.len(), points.len())));
    }
    let infinite: Vec<usize> = points.iter().enumerate().filter(|(_, p)| p.is_infinite()).map(|(i, _)| i).collect();
    if infinite.len() > 1 {
        return Err(Error::Input("more than one point at infinity".into()));
    }
    match metric {
        ModelMetric::Euclidean => ExtendedMetricSpace::from_fn(ids, infinite.first().copied(), |i, j| {
            euclidean_distance(&points[i], &points[j])
        }),
        ModelMetric::Chordal => ExtendedMetricSpace::from_fn(ids, None, |i, j| {
            ExtDistance::Finite(chordal_distance(&points[i], &points[j]))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_examples() {
        let o = ModelPoint::origin(2);
        let e1 = ModelPoint::basis(2, 0);
        assert_eq!(chordal_distance(&o, &ModelPoint::Infinity), 2.0);
        assert!((chordal_distance(&o, &e1) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(chordal_distance(&e1, &e1), 0.0);
        assert_eq!(chordal_distance(&ModelPoint::Infinity, &ModelPoint::Infinity), 0.0);
    }

    #[test]
    fn parse_and_serialize() {
        let p: ModelPoint = "1, 2.5,-3".parse().unwrap();
        assert_eq!(p, ModelPoint::from_slice(&[1.0, 2.5, -3.0]));
        assert_eq!("inf".parse::<ModelPoint>().unwrap(), ModelPoint::Infinity);
        assert!("1,x".parse::<ModelPoint>().is_err());
        let json = serde_json::to_string(&vec![p.clone(), ModelPoint::Infinity]).unwrap();
        assert_eq!(json, r#"[[1.0,2.5,-3.0],"inf"]"#);
        let back: Vec<ModelPoint> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![p, ModelPoint::Infinity]);
    }

    #[test]
    fn pole_metric_matches_metric_inversion() {
        let w = ModelPoint::from_slice(&[1.0, 1.0]);
        let a = ModelPoint::from_slice(&[0.0, 0.0]);
        let b = ModelPoint::from_slice(&[3.0, 1.0]);
        let d = distance_with_pole(&w, &a, &b).finite().unwrap();
        let expected = 10f64.sqrt() / (2f64.sqrt() * 2.0);
        assert!((d - expected).abs() < 1e-15);
        assert_eq!(distance_with_pole(&w, &a, &w), ExtDistance::Infinite);
        let to_inf = distance_with_pole(&w, &ModelPoint::Infinity, &b).finite().unwrap();
        assert!((to_inf - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sample_space_rejects_two_infinities() {
        let pts = vec![ModelPoint::Infinity, ModelPoint::Infinity];
        assert!(sample_space(vec!["a".into(), "b".into()], &pts, ModelMetric::Euclidean).is_err());
    }
}
