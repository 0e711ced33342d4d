//! Cross-ratio triples, the Ptolemy property and Möbius equivalence of
//! finite extended metric spaces.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num::{BigRational, One, Signed, Zero};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::harness::Status;
use crate::metric::{ExtDistance, ExtendedMetricSpace};
use crate::sampling;

/// Four entries of a space, in order. Admissible when no entry occurs three
/// or four times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quadruple<T>(pub [T; 4]);

impl<T: PartialEq> Quadruple<T> {
    pub fn is_admissible(&self) -> bool {
        let q = &self.0;
        (0..4).all(|i| q.iter().filter(|x| **x == q[i]).count() < 3)
    }
}

/// Position pairs whose distance products form the three entries:
/// `(d(x,y)d(z,u) : d(x,z)d(y,u) : d(x,u)d(y,z))`.
pub const PAIRINGS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];

/// Point of RP² with nonnegative entries, scaled so the largest is exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRatioTriple {
    entries: [f64; 3],
}

impl CrossRatioTriple {
    /// Canonicalizes a nonnegative, not identically zero triple.
    pub fn new(raw: [f64; 3]) -> Result<Self> {
        if raw.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::Input(format!("triple {raw:?} has invalid entries")));
        }
        let max = raw.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return Err(Error::Degenerate("all cross-ratio entries vanish".into()));
        }
        Ok(Self { entries: raw.map(|e| e / max) })
    }

    pub fn entries(&self) -> [f64; 3] {
        self.entries
    }

    /// Largest violation of the triangle inequality among the entries.
    pub fn ptolemy_defect(&self) -> f64 {
        defect(&self.entries)
    }

    /// Index of the entry realizing the defect.
    fn dominant(&self) -> usize {
        dominant(&self.entries)
    }

    /// Max entrywise difference of canonical forms.
    pub fn discrepancy(&self, other: &Self) -> f64 {
        (0..3).map(|i| (self.entries[i] - other.entries[i]).abs()).fold(0.0, f64::max)
    }
}

impl Serialize for CrossRatioTriple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl fmt::Display for CrossRatioTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.entries;
        write!(f, "({a} : {b} : {c})")
    }
}

/// Same as [`CrossRatioTriple`] over exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTriple {
    entries: [BigRational; 3],
}

impl ExactTriple {
    pub fn entries(&self) -> &[BigRational; 3] {
        &self.entries
    }

    pub fn ptolemy_defect(&self) -> BigRational {
        defect(&self.entries)
    }
}

/// `max(e_i - e_j - e_k)` over the three choices of `i`.
pub fn ptolemy_defect(t: &CrossRatioTriple) -> f64 {
    t.ptolemy_defect()
}

fn defect<T: Clone + PartialOrd + std::ops::Sub<Output = T>>(e: &[T; 3]) -> T {
    let residual = |i: usize| e[i].clone() - e[(i + 1) % 3].clone() - e[(i + 2) % 3].clone();
    let mut best = residual(0);
    for i in 1..3 {
        let r = residual(i);
        if r > best {
            best = r;
        }
    }
    best
}

fn dominant<T: PartialOrd>(e: &[T; 3]) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if e[i] > e[best] {
            best = i;
        }
    }
    best
}

/// Cancels the factors that contain ω. `None` stands for an infinite factor.
///
/// Entries with fewer infinite factors than the maximum vanish; the others
/// keep the product of their finite factors. With ω once this reduces to
/// `(d(x,y) : d(x,z) : d(y,z))` for `u = ω`, with ω twice to `(0 : 1 : 1)`.
fn reduce_products<T>(factors: [[Option<T>; 2]; 3]) -> [T; 3]
where
    T: Clone + Zero + One,
{
    let infinite = factors.each_ref().map(|f| f.iter().filter(|x| x.is_none()).count());
    let most = *infinite.iter().max().expect("three entries");
    let mut out = [T::zero(), T::zero(), T::zero()];
    for (i, pair) in factors.into_iter().enumerate() {
        if infinite[i] == most {
            out[i] = pair.into_iter().flatten().fold(T::one(), |acc, x| acc * x);
        }
    }
    out
}

fn resolve(space: &ExtendedMetricSpace, q: &Quadruple<&str>) -> Result<[usize; 4]> {
    let mut idx = [0usize; 4];
    for (k, id) in q.0.iter().enumerate() {
        idx[k] = space.index_of(id)?;
    }
    Ok(idx)
}

fn check_admissible(space: &ExtendedMetricSpace, q: [usize; 4]) -> Result<()> {
    if Quadruple(q).is_admissible() {
        Ok(())
    } else {
        Err(Error::Inadmissible(q.iter().map(|&i| space.id(i)).collect::<Vec<_>>().join(", ")))
    }
}

fn raw_products<T: Clone + Zero + One>(
    space: &ExtendedMetricSpace,
    q: [usize; 4],
    convert: impl Fn(f64) -> T,
) -> [T; 3] {
    let factor = |a: usize, b: usize| match space.distance(q[a], q[b]) {
        ExtDistance::Finite(v) => Some(convert(v)),
        ExtDistance::Infinite => None,
    };
    reduce_products(PAIRINGS.map(|[(a, b), (c, d)]| [factor(a, b), factor(c, d)]))
}

/// Cross-ratio triple of the quadruple with the given point indices.
pub fn crt_indices(space: &ExtendedMetricSpace, q: [usize; 4]) -> Result<CrossRatioTriple> {
    check_admissible(space, q)?;
    CrossRatioTriple::new(raw_products(space, q, |v| v))
}

/// Cross-ratio triple of four points `0..4` given by their distances.
/// Admissibility is the caller's business.
pub fn crt_of(distance: impl Fn(usize, usize) -> ExtDistance) -> Result<CrossRatioTriple> {
    let factor = |a: usize, b: usize| distance(a, b).finite();
    CrossRatioTriple::new(reduce_products(PAIRINGS.map(|[(a, b), (c, d)]| [factor(a, b), factor(c, d)])))
}

/// Cross-ratio triple of a quadruple of point ids.
pub fn crt(space: &ExtendedMetricSpace, q: &Quadruple<&str>) -> Result<CrossRatioTriple> {
    crt_indices(space, resolve(space, q)?)
}

/// Exact cross-ratio triple; every finite distance is read as the exact
/// rational value of its binary representation.
pub fn crt_exact(space: &ExtendedMetricSpace, q: &Quadruple<&str>) -> Result<ExactTriple> {
    crt_exact_indices(space, resolve(space, q)?)
}

pub fn crt_exact_indices(space: &ExtendedMetricSpace, q: [usize; 4]) -> Result<ExactTriple> {
    check_admissible(space, q)?;
    let raw = raw_products(space, q, |v| BigRational::from_float(v).expect("distances are finite"));
    let max = raw.iter().fold(BigRational::zero(), |m, e| if *e > m { e.clone() } else { m });
    if max.is_zero() {
        return Err(Error::Degenerate("all cross-ratio entries vanish".into()));
    }
    Ok(ExactTriple { entries: raw.map(|e| e / &max) })
}

/// Scan strategy over admissible quadruples.
///
/// Quadruples with a repeated entry always have the triple `(0 : 1 : 1)` up
/// to order, and relabeling a quadruple only permutes its triple, so the
/// exhaustive scan visits each 4-subset once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanMode::Exhaustive => f.write_str("exhaustive"),
            ScanMode::Sample { count, seed } => write!(f, "sample({count}, seed={seed})"),
        }
    }
}

/// Arithmetic used by certification scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    #[default]
    Float,
    ExactRational,
}

fn for_each_quadruple(n: usize, mode: ScanMode, mut visit: impl FnMut([usize; 4])) {
    if n < 4 {
        return;
    }
    match mode {
        ScanMode::Exhaustive => {
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        for l in k + 1..n {
                            visit([i, j, k, l]);
                        }
                    }
                }
            }
        }
        ScanMode::Sample { count, seed } => {
            let mut rng = sampling::rng(seed, 0);
            for _ in 0..count {
                let s = sample(&mut rng, n, 4);
                visit([s.index(0), s.index(1), s.index(2), s.index(3)]);
            }
        }
    }
}

/// Orders a quadruple so its dominant pairing comes first.
fn lead_with(q: [usize; 4], pairing: usize) -> [usize; 4] {
    let [(a, b), (c, d)] = PAIRINGS[pairing];
    [q[a], q[b], q[c], q[d]]
}

/// Outcome of a Ptolemy certification scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtolemyReport {
    pub suite: &'static str,
    pub status: Status,
    pub max_defect: f64,
    /// Quadruple attaining the maximum, ordered so that its first pairing
    /// `(x, y) | (z, u)` carries the largest entry.
    pub witness: Vec<String>,
    pub scanned: usize,
    pub mode: ScanMode,
    pub arithmetic: Arithmetic,
    /// Exact maximum defect as `p/q`, in exact-rational mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_max_defect: Option<String>,
    pub tolerance: f64,
}

impl PtolemyReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Certifies the Ptolemy property: every scanned cross-ratio triple
/// satisfies the triangle inequality up to `tol`.
pub fn is_ptolemy(space: &ExtendedMetricSpace, mode: ScanMode, tol: f64) -> Result<PtolemyReport> {
    is_ptolemy_with(space, mode, tol, Arithmetic::Float)
}

pub fn is_ptolemy_with(
    space: &ExtendedMetricSpace,
    mode: ScanMode,
    tol: f64,
    arithmetic: Arithmetic,
) -> Result<PtolemyReport> {
    let mut scanned = 0usize;
    let mut failure = None;
    let (max_defect, exact, witness) = match arithmetic {
        Arithmetic::Float => {
            let mut best: Option<(f64, [usize; 4])> = None;
            for_each_quadruple(space.len(), mode, |q| {
                if failure.is_some() {
                    return;
                }
                scanned += 1;
                match crt_indices(space, q) {
                    Ok(t) => {
                        let d = t.ptolemy_defect();
                        if best.as_ref().is_none_or(|(b, _)| d > *b) {
                            best = Some((d, lead_with(q, t.dominant())));
                        }
                    }
                    Err(e) => failure = Some(e),
                }
            });
            let (d, w) = best.map_or((0.0, None), |(d, w)| (d, Some(w)));
            (d, None, w)
        }
        Arithmetic::ExactRational => {
            let mut best: Option<(BigRational, [usize; 4])> = None;
            for_each_quadruple(space.len(), mode, |q| {
                if failure.is_some() {
                    return;
                }
                scanned += 1;
                match crt_exact_indices(space, q) {
                    Ok(t) => {
                        let d = t.ptolemy_defect();
                        if best.as_ref().is_none_or(|(b, _)| d > *b) {
                            best = Some((d, lead_with(q, dominant(t.entries()))));
                        }
                    }
                    Err(e) => failure = Some(e),
                }
            });
            match best {
                Some((d, w)) => {
                    let approx = rational_to_f64(&d);
                    (approx, Some(d), Some(w))
                }
                None => (0.0, Some(BigRational::zero()), None),
            }
        }
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let pass = match &exact {
        Some(d) => *d <= BigRational::from_float(tol).unwrap_or_else(BigRational::zero),
        None => max_defect <= tol,
    };
    Ok(PtolemyReport {
        suite: "ptolemy",
        status: if pass { Status::Pass } else { Status::Fail },
        max_defect,
        witness: witness.map(|w| w.iter().map(|&i| space.id(i).to_string()).collect()).unwrap_or_default(),
        scanned,
        mode,
        arithmetic,
        exact_max_defect: exact.map(|d| d.to_string()),
        tolerance: tol,
    })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    let value = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    if value.is_finite() {
        value
    } else if r.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    }
}

/// Outcome of comparing two metrics through a point correspondence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub discrepancy: f64,
    /// Quadruple (ids of the first space) attaining the discrepancy.
    pub witness: Vec<String>,
    pub scanned: usize,
    pub mode: ScanMode,
    pub tolerance: f64,
}

/// Whether `a` and `b` have the same cross-ratio triples on every scanned
/// quadruple, matching points through `correspondence` (ids of `a` to ids of `b`).
pub fn moebius_equivalent(
    a: &ExtendedMetricSpace,
    b: &ExtendedMetricSpace,
    correspondence: &HashMap<String, String>,
    mode: ScanMode,
    tol: f64,
) -> Result<EquivalenceReport> {
    if a.len() != b.len() {
        return Err(Error::Input(format!("spaces have {} and {} points", a.len(), b.len())));
    }
    if correspondence.len() != a.len() {
        return Err(Error::Input(format!(
            "correspondence maps {} ids, spaces have {} points",
            correspondence.len(),
            a.len()
        )));
    }
    let mut to_b = vec![0usize; a.len()];
    let mut used = HashSet::new();
    for (ka, kb) in correspondence {
        let ia = a.index_of(ka)?;
        let ib = b.index_of(kb)?;
        if !used.insert(ib) {
            return Err(Error::Input(format!("`{kb}` is the image of two points")));
        }
        to_b[ia] = ib;
    }

    let mut scanned = 0usize;
    let mut worst = (0.0f64, None);
    let mut failure = None;
    for_each_quadruple(a.len(), mode, |q| {
        if failure.is_some() {
            return;
        }
        scanned += 1;
        let qb = q.map(|i| to_b[i]);
        match (crt_indices(a, q), crt_indices(b, qb)) {
            (Ok(ta), Ok(tb)) => {
                let d = ta.discrepancy(&tb);
                if worst.1.is_none() || d > worst.0 {
                    worst = (d, Some(q));
                }
            }
            (Err(e), _) | (_, Err(e)) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(EquivalenceReport {
        equivalent: worst.0 <= tol,
        discrepancy: worst.0,
        witness: worst.1.map(|q| q.iter().map(|&i| a.id(i).to_string()).collect()).unwrap_or_default(),
        scanned,
        mode,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{metric_inversion, rescale};
    use ExtDistance::{Finite as F, Infinite as I};

    fn planar(points: &[(&str, Option<[f64; 2]>)], l1: bool) -> ExtendedMetricSpace {
        let ids = points.iter().map(|p| p.0.to_string()).collect();
        let omega = points.iter().position(|p| p.1.is_none());
        ExtendedMetricSpace::from_fn(ids, omega, |i, j| match (points[i].1, points[j].1) {
            _ if i == j => F(0.0),
            (Some(a), Some(b)) if l1 => F((a[0] - b[0]).abs() + (a[1] - b[1]).abs()),
            (Some(a), Some(b)) => F(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()),
            _ => I,
        })
        .unwrap()
    }

    fn square(l1: bool) -> ExtendedMetricSpace {
        planar(
            &[("a", Some([0.0, 0.0])), ("b", Some([1.0, 0.0])), ("c", Some([1.0, 1.0])), ("d", Some([0.0, 1.0]))],
            l1,
        )
    }

    #[test]
    fn admissibility() {
        assert!(Quadruple(["x", "y", "z", "u"]).is_admissible());
        assert!(Quadruple(["x", "x", "y", "y"]).is_admissible());
        assert!(!Quadruple(["x", "x", "x", "y"]).is_admissible());
        assert!(!Quadruple(["x", "x", "x", "x"]).is_admissible());
        assert!(!Quadruple(["y", "x", "x", "x"]).is_admissible());
    }

    #[test]
    fn one_infinite_entry_uses_the_reduced_formula() {
        let space =
            planar(&[("p", Some([0.0, 0.0])), ("q", Some([1.0, 0.0])), ("r", Some([3.0, 0.0])), ("w", None)], false);
        let t = crt(&space, &Quadruple(["p", "q", "r", "w"])).unwrap();
        let [a, b, c] = t.entries();
        assert_eq!(b, 1.0);
        assert!((a - 1.0 / 3.0).abs() < 1e-15 && (c - 2.0 / 3.0).abs() < 1e-15);

        // ω at another position cancels the matching factors
        let t = crt(&space, &Quadruple(["w", "p", "q", "r"])).unwrap();
        // (d(p,q)... ) = (d(q,r) : d(p,r) : d(p,q)) = (2 : 3 : 1)
        let [a, b, c] = t.entries();
        assert!((a - 2.0 / 3.0).abs() < 1e-15 && b == 1.0 && (c - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_infinite_entries_give_zero_one_one() {
        let space = planar(&[("x", Some([0.0, 0.0])), ("y", Some([2.0, 5.0])), ("w", None)], false);
        assert_eq!(crt(&space, &Quadruple(["x", "y", "w", "w"])).unwrap().entries(), [0.0, 1.0, 1.0]);
        assert_eq!(crt(&space, &Quadruple(["w", "x", "w", "y"])).unwrap().entries(), [1.0, 0.0, 1.0]);
        assert!(matches!(crt(&space, &Quadruple(["w", "w", "w", "y"])), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn unit_square_products() {
        let t = crt(&square(false), &Quadruple(["a", "b", "c", "d"])).unwrap();
        let [x, y, z] = t.entries();
        assert!((x - 0.5).abs() < 1e-15 && y == 1.0 && (z - 0.5).abs() < 1e-15);
        assert!(t.ptolemy_defect().abs() < 1e-15);
    }

    #[test]
    fn defect_examples() {
        assert!(CrossRatioTriple::new([1.0, 2.0, 1.0]).unwrap().ptolemy_defect().abs() < 1e-15);
        assert_eq!(CrossRatioTriple::new([0.0, 1.0, 1.0]).unwrap().ptolemy_defect(), 0.0);
        assert_eq!(CrossRatioTriple::new([4.0, 1.0, 1.0]).unwrap().ptolemy_defect(), 0.5);
        assert!(CrossRatioTriple::new([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn l1_square_fails_with_diagonal_witness() {
        let report = is_ptolemy(&square(true), ScanMode::Exhaustive, 1e-12).unwrap();
        assert_eq!(report.status, Status::Fail);
        assert_eq!(report.max_defect, 0.5);
        assert_eq!(report.witness, vec!["a", "c", "b", "d"]);

        let exact = is_ptolemy_with(&square(true), ScanMode::Exhaustive, 0.0, Arithmetic::ExactRational).unwrap();
        assert_eq!(exact.exact_max_defect.as_deref(), Some("1/2"));
        let t = crt_exact(&square(true), &Quadruple(["a", "c", "b", "d"])).unwrap();
        let quarter = BigRational::new(1.into(), 4.into());
        assert_eq!(t.entries(), &[BigRational::one(), quarter.clone(), quarter]);
    }

    #[test]
    fn trivial_spaces_pass() {
        let single = planar(&[("x", Some([0.0, 0.0]))], false);
        let report = is_ptolemy(&single, ScanMode::Exhaustive, 1e-12).unwrap();
        assert!(report.passed());
        assert_eq!(report.scanned, 0);
        assert!(report.witness.is_empty());
    }

    #[test]
    fn sampled_scan_counts_quadruples() {
        let report = is_ptolemy(&square(false), ScanMode::Sample { count: 25, seed: 3 }, 1e-12).unwrap();
        assert_eq!(report.scanned, 25);
        assert!(report.passed());
    }

    #[test]
    fn equivalence_examples() {
        let e = square(false);
        let ident: HashMap<String, String> = e.ids().iter().map(|k| (k.clone(), k.clone())).collect();
        let same = moebius_equivalent(&e, &e, &ident, ScanMode::Exhaustive, 1e-12).unwrap();
        assert!(same.equivalent);
        assert_eq!(same.discrepancy, 0.0);

        let l1 = square(true);
        let diff = moebius_equivalent(&e, &l1, &ident, ScanMode::Exhaustive, 1e-9).unwrap();
        assert!(!diff.equivalent);
        // (1/2, 1, 1/2) against (1/4, 1, 1/4)
        assert!((diff.discrepancy - 0.25).abs() < 1e-15);

        let mut partial = ident.clone();
        partial.remove("a");
        assert!(moebius_equivalent(&e, &l1, &partial, ScanMode::Exhaustive, 1e-9).is_err());
        let three = planar(&[("a", Some([0.0, 0.0]))], false);
        assert!(moebius_equivalent(&e, &three, &ident, ScanMode::Exhaustive, 1e-9).is_err());
    }

    #[test]
    fn scale_and_inversion_invariance() {
        let space = planar(
            &[
                ("p", Some([0.3, -1.0])),
                ("q", Some([1.0, 0.2])),
                ("r", Some([-2.0, 0.7])),
                ("s", Some([0.1, 0.1])),
                ("w", None),
            ],
            false,
        );
        let scaled = rescale(&space, 3.5).unwrap();
        let inverted = metric_inversion(&space, "s", 0.8).unwrap();
        let ids: Vec<&str> = space.ids().iter().map(String::as_str).collect();
        for &x in &ids {
            for &y in &ids {
                for &z in &ids {
                    for &u in &ids {
                        let q = Quadruple([x, y, z, u]);
                        if !q.is_admissible() {
                            continue;
                        }
                        let base = crt(&space, &q).unwrap();
                        assert!(base.discrepancy(&crt(&scaled, &q).unwrap()) <= 1e-15);
                        assert!(base.discrepancy(&crt(&inverted, &q).unwrap()) <= 1e-12, "{q:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn relabeling_permutes_entries() {
        let space = square(true);
        let base = crt(&space, &Quadruple(["a", "b", "c", "d"])).unwrap();
        let mut sorted_base = base.entries();
        sorted_base.sort_by(f64::total_cmp);
        let names = ["a", "b", "c", "d"];
        for p in permutations4() {
            let q = Quadruple(p.map(|i| names[i]));
            let t = crt(&space, &q).unwrap();
            let mut s = t.entries();
            s.sort_by(f64::total_cmp);
            assert_eq!(s, sorted_base);
            assert_eq!(t.ptolemy_defect(), base.ptolemy_defect());
        }
    }

    fn permutations4() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        if (0..4).all(|i| p.contains(&i)) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }
}
