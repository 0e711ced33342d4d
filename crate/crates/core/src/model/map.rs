use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::point::{chordal_distance, ModelPoint};
use crate::error::{Error, Result};

const ORTHOGONALITY_TOL: f64 = 1e-12;
const SHARED_CENTER_TOL: f64 = 1e-14;

/// Normal form `f(x) = b + λ·A·J(x - a)` of a Möbius map of `Rⁿ ∪ {∞}`,
/// where `J(v) = v/|v|²` when `invert` is set and the identity otherwise.
///
/// With `invert`, `f(a) = ∞` and `f(∞) = b`; without it, `f(∞) = ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNormalForm", into = "RawNormalForm")]
pub struct MoebiusMapNF {
    a: DVector<f64>,
    invert: bool,
    rotation: DMatrix<f64>,
    scale: f64,
    b: DVector<f64>,
}

impl MoebiusMapNF {
    pub fn new(a: DVector<f64>, invert: bool, rotation: DMatrix<f64>, scale: f64, b: DVector<f64>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::Input("zero-dimensional map".into()));
        }
        if b.len() != n {
            return Err(Error::Dimension { expected: n, found: b.len() });
        }
        if rotation.nrows() != n || rotation.ncols() != n {
            return Err(Error::Dimension { expected: n, found: rotation.nrows().max(rotation.ncols()) });
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Input(format!("scale must be positive, got {scale}")));
        }
        if a.iter().chain(b.iter()).chain(rotation.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Input("non-finite entry in normal form".into()));
        }
        let defect = (rotation.transpose() * &rotation - DMatrix::identity(n, n)).abs().max();
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::Input(format!("rotation is not orthogonal (|AᵀA - I| = {defect:e})")));
        }
        Ok(Self { a, invert, rotation, scale, b })
    }

    pub fn identity(n: usize) -> Self {
        Self::similarity(DVector::zeros(n), DMatrix::identity(n, n), 1.0, DVector::zeros(n))
    }

    fn similarity(a: DVector<f64>, rotation: DMatrix<f64>, scale: f64, b: DVector<f64>) -> Self {
        Self { a, invert: false, rotation, scale, b }
    }

    pub fn translation(v: DVector<f64>) -> Self {
        let n = v.len();
        Self::similarity(DVector::zeros(n), DMatrix::identity(n, n), 1.0, v)
    }

    /// `x ↦ c + λ(x - c)`.
    pub fn scaling(center: DVector<f64>, lambda: f64) -> Result<Self> {
        let n = center.len();
        Self::new(center.clone(), false, DMatrix::identity(n, n), lambda, center)
    }

    /// Classical inversion in the sphere of center `c` and radius `r`:
    /// `x ↦ c + r²(x - c)/|x - c|²`.
    pub fn sphere_inversion(center: DVector<f64>, radius: f64) -> Result<Self> {
        let n = center.len();
        Self::new(center.clone(), true, DMatrix::identity(n, n), radius * radius, center)
    }

    pub fn unit_inversion(center: DVector<f64>) -> Self {
        let n = center.len();
        Self { a: center.clone(), invert: true, rotation: DMatrix::identity(n, n), scale: 1.0, b: center }
    }

    /// Reflection in the hyperplane through `point` with normal `normal`.
    pub fn reflection(point: DVector<f64>, normal: &DVector<f64>) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0) {
            return Err(Error::Input("reflection normal vanishes".into()));
        }
        let u = normal / len;
        let n = point.len();
        let householder = DMatrix::identity(n, n) - 2.0 * &u * u.transpose();
        Ok(Self::similarity(point.clone(), householder, 1.0, point))
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn pre_center(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn inverts(&self) -> bool {
        self.invert
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn post_translation(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn apply(&self, x: &ModelPoint) -> ModelPoint {
        match x {
            ModelPoint::Infinity if self.invert => ModelPoint::Finite(self.b.clone()),
            ModelPoint::Infinity => ModelPoint::Infinity,
            ModelPoint::Finite(v) => {
                let mut w = v - &self.a;
                if self.invert {
                    let n2 = w.norm_squared();
                    if n2 == 0.0 {
                        return ModelPoint::Infinity;
                    }
                    w /= n2;
                }
                ModelPoint::Finite(&self.b + (&self.rotation * w) * self.scale)
            }
        }
    }

    /// Inverse normal form. Without inversion: `x ↦ a + λ⁻¹Aᵀ(y - b)`;
    /// with inversion `J(v/λ) = λJ(v)`, so the scale is kept: `x ↦ a + λAᵀJ(y - b)`.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.b.clone(),
            invert: self.invert,
            rotation: self.rotation.transpose(),
            scale: if self.invert { self.scale } else { 1.0 / self.scale },
            b: self.a.clone(),
        }
    }
}

impl MoebiusMapNF {
    /// Symbolic composition `outer ∘ inner` when the result is again a
    /// single normal form: always unless both invert about different points.
    pub fn compose_nf(outer: &MoebiusMapNF, inner: &MoebiusMapNF) -> Option<MoebiusMapNF> {
        let a2b = outer.rotation() * inner.rotation();
        match (outer.invert, inner.invert) {
            (false, _) => {
                // b2 + λ2A2(b1 - a2 + λ1A1J(x - a1))
                let b = &outer.b + (&outer.rotation * (&inner.b - &outer.a)) * outer.scale;
                Some(Self {
                    a: inner.a.clone(),
                    invert: inner.invert,
                    rotation: a2b,
                    scale: outer.scale * inner.scale,
                    b,
                })
            }
            (true, false) => {
                // J(λ1A1(x - c)) = λ1⁻¹A1J(x - c) with c = a1 - λ1⁻¹A1ᵀ(b1 - a2)
                let a = &inner.a - (inner.rotation.transpose() * (&inner.b - &outer.a)) / inner.scale;
                Some(Self { a, invert: true, rotation: a2b, scale: outer.scale / inner.scale, b: outer.b.clone() })
            }
            (true, true) => {
                let gap = (&inner.b - &outer.a).norm();
                if gap > SHARED_CENTER_TOL * (1.0 + outer.a.norm()) {
                    return None;
                }
                // J(λ1A1J(v)) = λ1⁻¹A1v
                Some(Self {
                    a: inner.a.clone(),
                    invert: false,
                    rotation: a2b,
                    scale: outer.scale / inner.scale,
                    b: outer.b.clone(),
                })
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawNormalForm {
    a: Vec<f64>,
    invert: bool,
    #[serde(rename = "A")]
    rotation: Vec<Vec<f64>>,
    lambda: f64,
    b: Vec<f64>,
}

impl From<MoebiusMapNF> for RawNormalForm {
    fn from(m: MoebiusMapNF) -> Self {
        let rows = (0..m.rotation.nrows()).map(|i| m.rotation.row(i).iter().copied().collect()).collect();
        RawNormalForm {
            a: m.a.as_slice().to_vec(),
            invert: m.invert,
            rotation: rows,
            lambda: m.scale,
            b: m.b.as_slice().to_vec(),
        }
    }
}

impl TryFrom<RawNormalForm> for MoebiusMapNF {
    type Error = Error;

    fn try_from(raw: RawNormalForm) -> Result<Self> {
        let n = raw.a.len();
        if raw.rotation.len() != n || raw.rotation.iter().any(|r| r.len() != n) {
            return Err(Error::Input(format!("A must be a {n}×{n} matrix")));
        }
        let rotation = DMatrix::from_fn(n, n, |i, j| raw.rotation[i][j]);
        MoebiusMapNF::new(DVector::from_vec(raw.a), raw.invert, rotation, raw.lambda, DVector::from_vec(raw.b))
    }
}

/// Composition of normal forms, applied right to left: `[f, g, h]` is `f ∘ g ∘ h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MoebiusMapNF>", into = "Vec<MoebiusMapNF>")]
pub struct MapWord {
    maps: Vec<MoebiusMapNF>,
}

impl TryFrom<Vec<MoebiusMapNF>> for MapWord {
    type Error = Error;

    fn try_from(maps: Vec<MoebiusMapNF>) -> Result<Self> {
        Self::from_maps(maps)
    }
}

impl From<MapWord> for Vec<MoebiusMapNF> {
    fn from(w: MapWord) -> Self {
        w.maps
    }
}

impl From<MoebiusMapNF> for MapWord {
    fn from(m: MoebiusMapNF) -> Self {
        Self { maps: vec![m] }
    }
}

impl MapWord {
    pub fn from_maps(maps: Vec<MoebiusMapNF>) -> Result<Self> {
        let Some(first) = maps.first() else {
            return Err(Error::Input("a map word needs at least one map".into()));
        };
        let n = first.dim();
        if let Some(bad) = maps.iter().find(|m| m.dim() != n) {
            return Err(Error::Dimension { expected: n, found: bad.dim() });
        }
        Ok(Self { maps })
    }

    pub fn identity(n: usize) -> Self {
        MoebiusMapNF::identity(n).into()
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn maps(&self) -> &[MoebiusMapNF] {
        &self.maps
    }

    pub fn apply(&self, x: &ModelPoint) -> ModelPoint {
        self.maps.iter().rev().fold(x.clone(), |p, m| m.apply(&p))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MapWord) -> MapWord {
        let mut maps = self.maps.clone();
        maps.extend(other.maps.iter().cloned());
        MapWord { maps }
    }

    pub fn inverse(&self) -> MapWord {
        MapWord { maps: self.maps.iter().rev().map(MoebiusMapNF::inverse).collect() }
    }

    /// Merges adjacent normal forms symbolically where possible. The action
    /// is unchanged up to rounding, and round trips through far-away
    /// intermediate points are avoided.
    pub fn reduce(&self) -> MapWord {
        let mut stack: Vec<MoebiusMapNF> = Vec::with_capacity(self.maps.len());
        for outer in self.maps.iter().rev() {
            let mut current = outer.clone();
            while let Some(inner) = stack.last() {
                match MoebiusMapNF::compose_nf(&current, inner) {
                    Some(merged) => {
                        stack.pop();
                        current = merged;
                    }
                    None => break,
                }
            }
            stack.push(current);
        }
        stack.reverse();
        MapWord { maps: stack }
    }

    /// Largest chordal distance between the actions of two words on `probes`.
    pub fn max_deviation(&self, other: &MapWord, probes: &[ModelPoint]) -> f64 {
        probes.iter().map(|p| chordal_distance(&self.apply(p), &other.apply(p))).fold(0.0, f64::max)
    }

    /// Collapses the word into one normal form, read off its action: the
    /// pole `a = W⁻¹(∞)`, `b = W(∞)` (or `W(0)` for similarities), and `λA`
    /// from the images of `a + eᵢ`, polished to an orthogonal factor by SVD.
    pub fn normalize(&self) -> Result<MoebiusMapNF> {
        let reduced = self.reduce();
        if reduced.len() == 1 {
            let nf = reduced.maps.into_iter().next().expect("one map");
            return MoebiusMapNF::new(nf.a, nf.invert, nf.rotation, nf.scale, nf.b);
        }
        let n = self.dim();
        let pole = self.inverse().apply(&ModelPoint::Infinity);
        let (a, invert) = match pole {
            ModelPoint::Infinity => (DVector::zeros(n), false),
            ModelPoint::Finite(p) => (p, true),
        };
        let b =
            match if invert { self.apply(&ModelPoint::Infinity) } else { self.apply(&ModelPoint::Finite(a.clone())) } {
                ModelPoint::Finite(b) => b,
                ModelPoint::Infinity => return Err(Error::Degenerate("word does not act as a Möbius map".into())),
            };
        let mut columns = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut probe = a.clone();
            probe[i] += 1.0;
            match self.apply(&ModelPoint::Finite(probe)) {
                ModelPoint::Finite(img) => columns.set_column(i, &(img - &b)),
                ModelPoint::Infinity => return Err(Error::Degenerate("word does not act as a Möbius map".into())),
            }
        }
        let svd = columns.svd(true, true);
        let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
        let scale = svd.singular_values.mean();
        MoebiusMapNF::new(a, invert, u * vt, scale, b)
    }
}
