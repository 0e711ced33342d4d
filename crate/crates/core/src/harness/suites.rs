//! The certification suites behind `run_suite`.
//!
//! Every suite draws from its own seeded streams, so a report depends only
//! on the suite name and the configuration.

use std::collections::HashMap;

use nalgebra::DVector;
use rand::Rng;

use super::config::Config;
use super::report::{Check, ConvergenceTable, SuiteReport};
use crate::busemann::{
    busemann_closed, busemann_value_limit, check_sublinear_divergence, homogen_ratio_check, horosphere_symmetry_limit,
    lemma_3eq_suite, parallel_line_through, project, projected_line_check, BusemannFn, Horosphere, ParamLine,
    ProjectionChart,
};
use crate::coordinates::{
    build_chart, homothety_scaling_check, norm_axiom_check, schoenberg_check, translation_isometry_check,
    CoordinateChart,
};
use crate::cross_ratio::{crt_of, is_ptolemy_with, moebius_equivalent, Arithmetic, CrossRatioTriple, ScanMode};
use crate::error::{Error, Result};
use crate::metric::{metric_inversion, validate, ExtDistance, ExtendedMetricSpace};
use crate::model::{
    chordal_distance, circle_through, circles_through, distance_with_pole, euclidean_distance, homothety,
    intersect_circles, map_circle, sample_space, shift_approx, sphere_samples, strong_inversion,
    verify_ptolemy_equality, verify_s_inversion, CircleOrLine, MapWord, ModelMetric, ModelPoint, MoebiusMapNF,
    SphereSpec,
};
use crate::sampling::{self, SeededRng};

/// Every suite name accepted by [`run_suite`].
pub const SUITES: [&str; 15] = [
    "metric-axioms",
    "crt-invariance",
    "ptolemy",
    "inversion-lemmas",
    "s-inversion-axioms",
    "homothety",
    "shift-limit",
    "circle-two-points",
    "ptolemy-equality",
    "busemann",
    "horosphere-symmetry",
    "projection",
    "lemma-3eq",
    "coordinatization",
    "schoenberg",
];

type Outcome = Result<(Vec<Check>, Vec<ConvergenceTable>)>;

struct Ctx<'a> {
    config: &'a Config,
    space: Option<&'a ExtendedMetricSpace>,
}

impl Ctx<'_> {
    fn rng(&self, stream: u64) -> SeededRng {
        sampling::rng(self.config.seed, stream)
    }

    fn n(&self) -> usize {
        self.config.dimension
    }

    fn tol(&self) -> f64 {
        self.config.tolerance_rel
    }
}

/// Runs one suite. Unknown names and unusable inputs are errors; a failure
/// inside the mathematics is reported with status `error`.
pub fn run_suite(name: &str, config: &Config, space: Option<&ExtendedMetricSpace>) -> Result<SuiteReport> {
    config.validate()?;
    if !SUITES.contains(&name) {
        return Err(Error::Input(format!("unknown suite `{name}`; known suites: {}", SUITES.join(", "))));
    }
    if space.is_some() && !matches!(name, "metric-axioms" | "ptolemy") {
        return Err(Error::Input(format!("suite `{name}` does not take an input space")));
    }
    let ctx = Ctx { config, space };
    let outcome = match name {
        "metric-axioms" => metric_axioms(&ctx),
        "crt-invariance" => crt_invariance(&ctx),
        "ptolemy" => ptolemy(&ctx),
        "inversion-lemmas" => inversion_lemmas(&ctx),
        "s-inversion-axioms" => s_inversion_axioms(&ctx),
        "homothety" => homothety_suite(&ctx),
        "shift-limit" => shift_limit(&ctx),
        "circle-two-points" => circle_two_points(&ctx),
        "ptolemy-equality" => ptolemy_equality(&ctx),
        "busemann" => busemann(&ctx),
        "horosphere-symmetry" => horosphere_symmetry(&ctx),
        "projection" => projection(&ctx),
        "lemma-3eq" => lemma_3eq(&ctx),
        "coordinatization" => coordinatization(&ctx),
        "schoenberg" => schoenberg(&ctx),
        _ => unreachable!("checked against SUITES"),
    };
    Ok(match outcome {
        Ok((checks, tables)) => SuiteReport::new(name, config.seed, config.dimension, checks, tables, None),
        Err(e) => SuiteReport::new(name, config.seed, config.dimension, Vec::new(), Vec::new(), Some(e.to_string())),
    })
}

/// Runs several suites on scoped threads; reports come back in input order.
pub fn run_suites(names: &[&str], config: &Config) -> Result<Vec<SuiteReport>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = names.iter().map(|name| s.spawn(move || run_suite(name, config, None))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    })
}

/// Running maximum that remembers which case attained it.
#[derive(Default)]
struct Worst {
    value: f64,
    case: Option<serde_json::Value>,
}

impl Worst {
    fn update(&mut self, value: f64, case: impl FnOnce() -> serde_json::Value) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) {
            self.value = value;
            self.case = Some(case());
        }
    }

    fn at_most(self, name: &str, tol: f64, anchor: &str) -> Check {
        let check = Check::at_most(name, self.value, tol, anchor);
        match self.case {
            Some(case) => check.with_witness(case),
            None => check,
        }
    }
}

fn coords(p: &ModelPoint) -> serde_json::Value {
    match p {
        ModelPoint::Infinity => serde_json::Value::String("inf".into()),
        ModelPoint::Finite(v) => serde_json::json!(v.as_slice()),
    }
}

fn vec_json(v: &DVector<f64>) -> serde_json::Value {
    serde_json::json!(v.as_slice())
}

fn euclid_crt(pts: [&ModelPoint; 4]) -> Result<CrossRatioTriple> {
    crt_of(|i, j| euclidean_distance(pts[i], pts[j]))
}

fn chordal_crt(pts: [&ModelPoint; 4]) -> Result<CrossRatioTriple> {
    crt_of(|i, j| ExtDistance::Finite(chordal_distance(pts[i], pts[j])))
}

fn finite(p: ModelPoint) -> DVector<f64> {
    p.coords().cloned().expect("finite image")
}

fn ids(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

/// Random points of `[-half, half]^n` pairwise at least `gap` apart.
fn spread_points(rng: &mut SeededRng, n: usize, k: usize, half: f64, gap: f64) -> Vec<ModelPoint> {
    let mut out: Vec<ModelPoint> = Vec::with_capacity(k);
    while out.len() < k {
        let p = sampling::model_point(rng, n, half);
        if out.iter().all(|q| chordal_distance(&p, q) >= gap) {
            out.push(p);
        }
    }
    out
}

fn random_line(rng: &mut SeededRng, n: usize, half: f64) -> ParamLine {
    ParamLine::new(sampling::point_in_cube(rng, n, half), sampling::unit_vector(rng, n)).expect("unit direction")
}

// ---------------------------------------------------------------- metric

fn metric_axioms(ctx: &Ctx) -> Outcome {
    let tol = ctx.config.tolerance();
    let anchor = "extended metric axioms";
    if let Some(space) = ctx.space {
        let report = validate(space, tol);
        let mut check = Check::at_most("input space violations", report.violations.len() as f64, 0.0, anchor);
        if let Some(v) = report.violations.first() {
            check = check.with_witness(v);
        }
        return Ok((vec![check], vec![]));
    }
    let n = ctx.n();
    let mut rng = ctx.rng(1);
    let mut pts = spread_points(&mut rng, n, 20, 3.0, 1e-3);
    pts.push(ModelPoint::Infinity);
    let names = ids("p", pts.len());
    let euclid = sample_space(names.clone(), &pts, ModelMetric::Euclidean)?;
    let chordal = sample_space(names.clone(), &pts, ModelMetric::Chordal)?;
    let mut checks = vec![
        Check::at_most("Euclidean sample violations", validate(&euclid, tol).violations.len() as f64, 0.0, anchor),
        Check::at_most("chordal sample violations", validate(&chordal, tol).violations.len() as f64, 0.0, anchor),
    ];
    // inversion at a finite point against the unit inversion of the model
    let z = names[0].clone();
    let inverted = metric_inversion(&euclid, &z, 1.0)?;
    let g = MoebiusMapNF::unit_inversion(pts[0].coords().expect("finite").clone());
    let images: Vec<ModelPoint> = pts.iter().map(|p| g.apply(p)).collect();
    let mut worst = Worst::default();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (inverted.distance(i, j), euclidean_distance(&images[i], &images[j]));
            let r = match (a, b) {
                (ExtDistance::Finite(a), ExtDistance::Finite(b)) => (a - b).abs() / b.max(f64::MIN_POSITIVE),
                (ExtDistance::Infinite, ExtDistance::Infinite) => 0.0,
                _ => f64::INFINITY,
            };
            worst.update(r, || serde_json::json!([names[i], names[j]]));
        }
    }
    checks.push(worst.at_most(
        "inverted metric vs inversion images",
        ctx.tol(),
        "metric inversion d_z(x,y) = r²d(x,y)/(d(z,x)d(z,y)) is the metric of the inverted model",
    ));
    checks.push(Check::at_most(
        "inverted space violations",
        validate(&inverted, tol).violations.len() as f64,
        0.0,
        "metric inversions of a Ptolemy space are metrics",
    ));
    let back = metric_inversion(&inverted, &names[names.len() - 1], 1.0)?;
    let mut worst = Worst::default();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let r = match (back.distance(i, j), euclid.distance(i, j)) {
                (ExtDistance::Finite(a), ExtDistance::Finite(b)) => (a - b).abs() / b,
                (ExtDistance::Infinite, ExtDistance::Infinite) => 0.0,
                _ => f64::INFINITY,
            };
            worst.update(r, || serde_json::json!([names[i], names[j]]));
        }
    }
    checks.push(worst.at_most(
        "inversion back at the old infinite point",
        ctx.tol(),
        "metric inversion with d_z(x, ω) = r²/d(z, x) is an involution",
    ));
    Ok((checks, vec![]))
}

// ------------------------------------------------------------ cross ratio

fn admissible_quadruple(rng: &mut SeededRng, n: usize) -> [ModelPoint; 4] {
    loop {
        let q: [ModelPoint; 4] = std::array::from_fn(|_| sampling::model_point(rng, n, 3.0));
        let separated = (0..4).all(|i| (i + 1..4).all(|j| chordal_distance(&q[i], &q[j]) > 1e-2));
        if separated {
            return q;
        }
    }
}

fn crt_invariance(ctx: &Ctx) -> Outcome {
    let n = ctx.n();
    let mut rng = ctx.rng(2);
    let quads: Vec<[ModelPoint; 4]> = (0..1000).map(|_| admissible_quadruple(&mut rng, n)).collect();
    let words: Vec<MapWord> = (0..50)
        .map(|_| {
            let len = rng.random_range(1..=4);
            sampling::map_word(&mut rng, n, len)
        })
        .collect();
    let base: Vec<CrossRatioTriple> =
        quads.iter().map(|q| euclid_crt([&q[0], &q[1], &q[2], &q[3]])).collect::<Result<_>>()?;
    let mut worst = Worst::default();
    for (w, word) in words.iter().enumerate() {
        for (k, q) in quads.iter().enumerate() {
            let img: Vec<ModelPoint> = q.iter().map(|p| word.apply(p)).collect();
            let t = euclid_crt([&img[0], &img[1], &img[2], &img[3]])?;
            worst.update(t.discrepancy(&base[k]), || serde_json::json!({"word": w, "quadruple": k}));
        }
    }
    let mut checks = vec![worst.at_most(
        "crt discrepancy under random map words",
        ctx.tol(),
        "Möbius maps preserve cross-ratio triples",
    )];
    let mut worst = Worst::default();
    for (k, q) in quads.iter().enumerate() {
        let t = chordal_crt([&q[0], &q[1], &q[2], &q[3]])?;
        worst.update(t.discrepancy(&base[k]), || serde_json::json!({"quadruple": k}));
    }
    checks.push(worst.at_most(
        "Euclidean vs chordal crt",
        ctx.tol(),
        "the chordal metric belongs to the standard Möbius structure",
    ));

    // equivalence checker on a 10-point set
    let mut rng = ctx.rng(3);
    let mut pts = spread_points(&mut rng, n, 9, 3.0, 1e-2);
    pts.push(ModelPoint::Infinity);
    let names = ids("p", pts.len());
    let euclid = sample_space(names.clone(), &pts, ModelMetric::Euclidean)?;
    let chordal = sample_space(names.clone(), &pts, ModelMetric::Chordal)?;
    let identity: HashMap<String, String> = names.iter().map(|s| (s.clone(), s.clone())).collect();
    let anchor = "Möbius equivalence is equality of all cross-ratio triples";
    let same = moebius_equivalent(&euclid, &chordal, &identity, ScanMode::Exhaustive, ctx.tol())?;
    checks.push(
        Check::at_most("Euclidean vs chordal equivalence discrepancy", same.discrepancy, ctx.tol(), anchor)
            .with_witness(&same.witness),
    );
    let finite_pts = &pts[..9];
    let finite_names = ids("p", 9);
    let plain = sample_space(finite_names.clone(), finite_pts, ModelMetric::Euclidean)?;
    let mut factors = vec![vec![1.0; 9]; 9];
    for i in 0..9 {
        for j in i + 1..9 {
            let f = if rng.random_bool(0.5) { 1.01 } else { 0.99 };
            factors[i][j] = f;
            factors[j][i] = f;
        }
    }
    let perturbed = ExtendedMetricSpace::from_fn(finite_names.clone(), None, |i, j| match plain.distance(i, j) {
        ExtDistance::Finite(d) => ExtDistance::Finite(d * factors[i][j]),
        ExtDistance::Infinite => ExtDistance::Infinite,
    })?;
    let identity: HashMap<String, String> = finite_names.iter().map(|s| (s.clone(), s.clone())).collect();
    let chordal9 = sample_space(finite_names, finite_pts, ModelMetric::Chordal)?;
    let flagged = moebius_equivalent(&chordal9, &perturbed, &identity, ScanMode::Exhaustive, ctx.tol())?;
    checks.push(
        Check::at_least("1% perturbation discrepancy", flagged.discrepancy, 1e-3, anchor)
            .with_witness(&flagged.witness),
    );
    Ok((checks, vec![]))
}

/// The unit square with the L¹ metric, which is not Ptolemy.
pub fn l1_square() -> ExtendedMetricSpace {
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let names = vec!["a".to_string(), "b".into(), "c".into(), "d".into()];
    ExtendedMetricSpace::from_fn(names, None, |i, j| {
        let ((x1, y1), (x2, y2)) = (corners[i], corners[j]);
        ExtDistance::Finite(f64::abs(x1 - x2) + f64::abs(y1 - y2))
    })
    .expect("well-formed fixture")
}

fn parse_ratio(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => Some(p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?),
        None => s.trim().parse().ok(),
    }
}

fn ptolemy(ctx: &Ctx) -> Outcome {
    let anchor = "Ptolemy inequality: crt entries satisfy the triangle inequality";
    let mode = ctx.config.scan_mode();
    if let Some(space) = ctx.space {
        let report = is_ptolemy_with(space, mode, ctx.tol(), ctx.config.arithmetic)?;
        let check = Check::at_most("max Ptolemy defect", report.max_defect, ctx.tol(), anchor).with_witness(&report);
        return Ok((vec![check], vec![]));
    }
    let n = ctx.n();
    let mut rng = ctx.rng(4);
    let mut pts = spread_points(&mut rng, n, 12, 3.0, 1e-3);
    pts.push(ModelPoint::Infinity);
    let space = sample_space(ids("p", pts.len()), &pts, ModelMetric::Euclidean)?;
    let report = is_ptolemy_with(&space, mode, 1e-12, Arithmetic::Float)?;
    let mut checks = vec![
        Check::at_most("Euclidean Ptolemy defect", report.max_defect, 1e-12, anchor).with_witness(&report.witness)
    ];
    let control = is_ptolemy_with(&l1_square(), ScanMode::Exhaustive, 0.0, Arithmetic::ExactRational)?;
    let exact = control.exact_max_defect.as_deref().and_then(parse_ratio).unwrap_or(f64::NAN);
    checks.push(
        Check::at_most(
            "L1 square exact defect minus 1/2",
            (exact - 0.5).abs(),
            0.0,
            "the L¹ unit square violates the Ptolemy inequality",
        )
        .with_witness(serde_json::json!({"defect": control.exact_max_defect, "quadruple": control.witness})),
    );
    Ok((checks, vec![]))
}

// -------------------------------------------------------------- inversions

fn inversion_lemmas(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(5);
    let mut inv1 = Worst::default();
    let mut inv2 = Worst::default();
    let mut space_level = Worst::default();
    for case in 0..1000 {
        let n = 1 + case % 5;
        let o = sampling::point_in_cube(&mut rng, n, 3.0);
        let r = 10f64.powf(rng.random_range(-0.5..=0.7));
        // |xy| bounded below relative to |ox|, |oy|: subtracting the image
        // coordinates otherwise cancels far beyond the tolerance
        let (x, y) = loop {
            let x = sampling::point_in_cube(&mut rng, n, 3.0);
            let y = sampling::point_in_cube(&mut rng, n, 3.0);
            let (ox, oy) = ((&x - &o).norm(), (&y - &o).norm());
            if ox.min(oy) > 1e-3 && (&x - &y).norm() > 0.05 * ox.max(oy) {
                break (x, y);
            }
        };
        let phi = MoebiusMapNF::sphere_inversion(o.clone(), r)?;
        let fx = finite(phi.apply(&ModelPoint::Finite(x.clone())));
        let fy = finite(phi.apply(&ModelPoint::Finite(y.clone())));
        let (ox, oy, xy) = ((&x - &o).norm(), (&y - &o).norm(), (&x - &y).norm());
        let witness = || serde_json::json!({"o": vec_json(&o), "r": r, "x": vec_json(&x), "y": vec_json(&y)});
        inv1.update((ox * (&fx - &o).norm() - r * r).abs() / (r * r), witness);
        let expected = r * r * xy / (ox * oy);
        inv2.update(((&fx - &fy).norm() - expected).abs() / expected, witness);
        // the same identities through the finite metric-space operation
        let pts = [
            ModelPoint::Finite(o.clone()),
            ModelPoint::Finite(x.clone()),
            ModelPoint::Finite(y.clone()),
            ModelPoint::Infinity,
        ];
        let space = sample_space(ids("q", 4), &pts, ModelMetric::Euclidean)?;
        let inverted = metric_inversion(&space, "q0", r)?;
        let dz = |i, j| inverted.distance(i, j).finite().unwrap_or(f64::INFINITY);
        let r1 = (dz(1, 2) - (&fx - &fy).norm()).abs() / expected;
        let r2 = (dz(1, 3) - (&fx - &o).norm()).abs() / (&fx - &o).norm();
        space_level.update(r1.max(r2), witness);
    }
    Ok((
        vec![
            inv1.at_most("|ox|·|oφ(x)| vs r²", 1e-10, "inversion lemma: |ox|·|oφ(x)| = r²"),
            inv2.at_most("|φ(x)φ(y)| vs r²|xy|/(|ox||oy|)", 1e-10, "inversion lemma: |φ(x)φ(y)| = r²|xy|/(|ox||oy|)"),
            space_level.at_most(
                "metric inversion vs sphere inversion",
                1e-10,
                "the metric inversion at o is the metric carried by the sphere inversion",
            ),
        ],
        vec![],
    ))
}

fn pole_pairs(rng: &mut SeededRng, n: usize) -> Vec<(ModelPoint, ModelPoint)> {
    let mut pairs =
        vec![(ModelPoint::origin(n), ModelPoint::Infinity), (ModelPoint::Infinity, sampling::model_point(rng, n, 2.0))];
    while pairs.len() < 6 {
        let (a, b) = (sampling::model_point(rng, n, 2.0), sampling::model_point(rng, n, 2.0));
        if chordal_distance(&a, &b) > 0.1 {
            pairs.push((a, b));
        }
    }
    pairs.push((sampling::model_point(rng, n, 2.0), ModelPoint::Infinity));
    pairs
}

fn s_inversion_axioms(ctx: &Ctx) -> Outcome {
    let n = ctx.n().max(2);
    let mut rng = ctx.rng(6);
    let axioms = ["involution", "pole swap", "sphere fixed pointwise", "circles through the poles preserved"];
    let anchors = [
        "s-inversion axiom: involution",
        "s-inversion axiom: swaps the poles",
        "s-inversion axiom: fixes the metric sphere pointwise",
        "s-inversion axiom: preserves every circle through the poles",
    ];
    let mut worst: Vec<Worst> = axioms.iter().map(|_| Worst::default()).collect();
    let mut uniqueness = Worst::default();
    let probes: Vec<ModelPoint> = (0..50).map(|_| sampling::model_point(&mut rng, n, 3.0)).collect();
    for (case, (w, w2)) in pole_pairs(&mut rng, n).into_iter().enumerate() {
        let r = rng.random_range(0.3..=3.0);
        let witness = loop {
            let p = sampling::model_point(&mut rng, n, 3.0);
            if chordal_distance(&p, &w).min(chordal_distance(&p, &w2)) > 0.1 {
                break p;
            }
        };
        for spec in [SphereSpec::Radius(r), SphereSpec::Witness(witness.clone())] {
            let m = strong_inversion(&w, &w2, &spec)?;
            let sphere = sphere_samples(&mut rng, &w, &w2, &spec, 100)?;
            let circles = circles_through(&mut rng, &w, &w2, 20)?;
            let report = verify_s_inversion(&m, &w, &w2, &sphere, &circles, &probes, 1e-10);
            for (k, axiom) in axioms.iter().enumerate() {
                let dev = report.check(axiom).map_or(f64::INFINITY, |c| c.max_deviation);
                worst[k]
                    .update(dev, || serde_json::json!({"case": case, "omega": coords(&w), "omega_prime": coords(&w2)}));
            }
        }
        // a sphere fixes its s-inversion: witness and radius constructions agree
        let radius = match &w2 {
            ModelPoint::Infinity => euclidean_distance(&w, &witness).finite(),
            _ => distance_with_pole(&w2, &w, &witness).finite(),
        };
        let radius = radius.ok_or_else(|| Error::Degenerate("witness at a pole".into()))?;
        let by_witness = strong_inversion(&w, &w2, &SphereSpec::Witness(witness.clone()))?;
        let by_radius = strong_inversion(&w, &w2, &SphereSpec::Radius(radius))?;
        uniqueness.update(by_witness.max_deviation(&by_radius, &probes), || serde_json::json!({"case": case}));
    }
    let mut checks: Vec<Check> = worst
        .into_iter()
        .zip(axioms.iter().zip(anchors))
        .map(|(w, (axiom, anchor))| w.at_most(axiom, 1e-10, anchor))
        .collect();
    checks.push(uniqueness.at_most(
        "witness vs radius construction",
        1e-9,
        "the s-inversion with given poles and sphere is unique",
    ));
    Ok((checks, vec![]))
}

fn homothety_suite(ctx: &Ctx) -> Outcome {
    let n = ctx.n();
    let mut rng = ctx.rng(7);
    let anchor = "homothety φ₂∘φ₁ scales distances by λ = r₂²/r₁²";
    let mut checks = Vec::new();
    let mut structure = 0.0f64;
    let mut poles = Worst::default();
    for lambda in [0.1, 1.0, 4.0, 100.0] {
        let mut worst = Worst::default();
        for case in 0..1000 {
            let o = sampling::model_point(&mut rng, n, 2.0);
            let h = homothety(&o, lambda, &ModelPoint::Infinity)?;
            structure = structure.max((h.len() as f64 - 2.0).abs());
            let x = sampling::model_point(&mut rng, n, 3.0);
            let y = sampling::model_point(&mut rng, n, 3.0);
            let d = euclidean_distance(&x, &y).finite().expect("finite");
            let dh = euclidean_distance(&h.apply(&x), &h.apply(&y)).finite().expect("finite");
            worst.update(
                (dh - lambda * d).abs() / (lambda * d),
                || serde_json::json!({"case": case, "o": coords(&o), "x": coords(&x), "y": coords(&y)}),
            );
            if case % 100 == 0 {
                let dev = chordal_distance(&h.apply(&o), &o)
                    .max(chordal_distance(&h.apply(&ModelPoint::Infinity), &ModelPoint::Infinity));
                poles.update(dev, || serde_json::json!({"lambda": lambda, "o": coords(&o)}));
            }
        }
        checks.push(worst.at_most(&format!("|h(x)h(y)| vs λ|xy| at λ = {lambda}"), 1e-10, anchor));
    }
    checks.push(Check::at_most(
        "word length minus 2",
        structure,
        0.0,
        "a homothety is the composition of two s-inversions",
    ));
    checks.push(poles.at_most("center and ω fixed", 1e-12, "a homothety fixes its center and ω"));
    let mut circles = Worst::default();
    let mut horo = Worst::default();
    for case in 0..20 {
        let o = sampling::model_point(&mut rng, n, 2.0);
        let lambda = [0.1, 1.0, 4.0, 100.0][case % 4];
        let h = homothety(&o, lambda, &ModelPoint::Infinity)?;
        for c in circles_through(&mut rng, &o, &ModelPoint::Infinity, 5)? {
            let dev = c.samples(16).iter().map(|p| c.residual(&h.apply(p))).fold(0.0, f64::max);
            circles.update(dev, || serde_json::json!({"case": case, "o": coords(&o)}));
        }
        // H_z of a line through o goes to H_{h(z)}
        let ov = o.coords().expect("finite").clone();
        let line = ParamLine::new(ov.clone(), sampling::unit_vector(&mut rng, n))?;
        let b = BusemannFn::plus(line.clone());
        let z = line.point(rng.random_range(-3.0..3.0));
        let hz = finite(h.apply(&ModelPoint::Finite(z.clone())));
        let target = Horosphere::through(&b, &hz);
        let u = line.direction();
        for _ in 0..10 {
            let v = sampling::point_in_ball(&mut rng, n, 5.0);
            let p = &z + &v - u * v.dot(u);
            let img = finite(h.apply(&ModelPoint::Finite(p)));
            horo.update(
                target.offset(&img).abs() / (1.0 + img.norm()),
                || serde_json::json!({"case": case, "lambda": lambda}),
            );
        }
    }
    checks.push(circles.at_most(
        "circles through o and ω preserved",
        1e-10,
        "a homothety preserves every circle through its center and ω",
    ));
    checks.push(horo.at_most(
        "h(H_z) vs H_{h(z)}",
        1e-10,
        "a homothety at o maps horospheres of lines through o to horospheres",
    ));
    // finite ω: distances of the metric with infinite point ω
    let mut worst = Worst::default();
    for case in 0..200 {
        let omega = sampling::model_point(&mut rng, n, 2.0);
        let o = sampling::model_point(&mut rng, n, 2.0);
        if chordal_distance(&o, &omega) < 0.1 {
            continue;
        }
        let lambda = [0.1, 1.0, 4.0, 100.0][case % 4];
        let h = homothety(&o, lambda, &omega)?;
        let (x, y) = (sampling::model_point(&mut rng, n, 3.0), sampling::model_point(&mut rng, n, 3.0));
        // keep away from ω, where d_ω and the conjugating inversion blow up
        if chordal_distance(&x, &omega).min(chordal_distance(&y, &omega)).min(chordal_distance(&x, &y)) < 0.1 {
            continue;
        }
        let dw = |a: &ModelPoint, b: &ModelPoint| distance_with_pole(&omega, a, b).finite().unwrap_or(f64::INFINITY);
        let d = dw(&x, &y);
        worst.update(
            (dw(&h.apply(&x), &h.apply(&y)) - lambda * d).abs() / (lambda * d),
            || serde_json::json!({"case": case, "omega": coords(&omega), "o": coords(&o)}),
        );
    }
    checks.push(worst.at_most("finite ω scaling", 1e-9, anchor));
    Ok((checks, vec![]))
}

fn shift_limit(ctx: &Ctx) -> Outcome {
    let n = ctx.n();
    let mut rng = ctx.rng(8);
    let schedule: Vec<f64> = (1..=40).map(|k| 0.5f64.powi(k)).collect();
    let probes: Vec<ModelPoint> = (0..30).map(|_| sampling::model_point(&mut rng, n, 3.0)).collect();
    let mut formula = Worst::default();
    let mut distortion = Worst::default();
    let mut deviation = Worst::default();
    let mut moved = Worst::default();
    let mut parallel = Worst::default();
    let mut divergence = Worst::default();
    let mut cauchy_table = Vec::new();
    for case in 0..20 {
        let x = sampling::model_point(&mut rng, n, 2.0);
        let x2 = sampling::model_point(&mut rng, n, 2.0);
        let approx = shift_approx(&x, &x2, &ModelPoint::Infinity, &schedule, &probes)?;
        let (xv, x2v) = (x.coords().expect("finite"), x2.coords().expect("finite"));
        for (eta, &l) in approx.maps.iter().zip(&approx.lambdas) {
            for y in &probes {
                let yv = y.coords().expect("finite");
                let expected = yv + (x2v - xv) * (1.0 - l);
                let got = finite(eta.apply(y));
                let scale = 1.0 + yv.norm() + (x2v - xv).norm();
                formula.update((got - expected).norm() / scale, || serde_json::json!({"case": case, "lambda": l}));
            }
        }
        let limit = &approx.limit;
        for i in 0..probes.len() {
            for j in i + 1..probes.len() {
                let d0 = euclidean_distance(&probes[i], &probes[j]).finite().expect("finite");
                let d1 =
                    euclidean_distance(&limit.apply(&probes[i]), &limit.apply(&probes[j])).finite().expect("finite");
                distortion.update((d1 - d0).abs(), || serde_json::json!({"case": case}));
            }
        }
        deviation.update(approx.limit_deviation, || serde_json::json!({"case": case}));
        moved.update(chordal_distance(&limit.apply(&x), &x2), || serde_json::json!({"case": case}));
        // the shift moves lines to Busemann parallel lines
        if case == 0 {
            for k in 0..50 {
                let line = random_line(&mut rng, n, 3.0);
                let a = finite(limit.apply(&ModelPoint::Finite(line.point(0.0))));
                let b = finite(limit.apply(&ModelPoint::Finite(line.point(1.0))));
                let image = ParamLine::through(a.clone(), &b - &a)?;
                let est = check_sublinear_divergence(&line, &image, 1e6)?;
                divergence.update(est, || serde_json::json!({"line": k}));
                parallel.update((image.direction() - line.direction()).norm(), || serde_json::json!({"line": k}));
            }
        }
        if case == 0 {
            let ls: Vec<f64> = approx.lambdas.iter().skip(1).copied().collect();
            cauchy_table.push(ConvergenceTable::new("shift cauchy gap vs λ", &ls, &approx.cauchy));
        }
    }
    // finite ω: the limit is conjugate to a translation
    let mut finite_dev = Worst::default();
    for case in 0..10 {
        let omega = sampling::model_point(&mut rng, n, 2.0);
        let x = sampling::model_point(&mut rng, n, 2.0);
        let x2 = sampling::model_point(&mut rng, n, 2.0);
        if chordal_distance(&x, &omega).min(chordal_distance(&x2, &omega)) < 0.1 {
            continue;
        }
        let approx = shift_approx(&x, &x2, &omega, &schedule, &probes)?;
        let dw = |a: &ModelPoint, b: &ModelPoint| distance_with_pole(&omega, a, b).finite().unwrap_or(f64::INFINITY);
        let mut worst: f64 = approx.limit_deviation.max(chordal_distance(&approx.limit.apply(&x), &x2));
        for i in 0..probes.len() {
            for j in i + 1..probes.len() {
                let (a, b) = (&probes[i], &probes[j]);
                let d0 = dw(a, b);
                worst = worst.max((dw(&approx.limit.apply(a), &approx.limit.apply(b)) - d0).abs() / d0);
            }
        }
        finite_dev.update(worst, || serde_json::json!({"case": case, "omega": coords(&omega)}));
    }
    let anchor = "shifts are limits of homothety compositions";
    Ok((
        vec![
            formula.at_most("η_n(y) - (y + (1-λ_n)(x'-x))", 1e-12, anchor),
            distortion.at_most("limit isometry distortion", 1e-10, "the shift is an isometry of X_ω"),
            deviation.at_most("last η_n vs limit (chordal)", 1e-10, anchor),
            moved.at_most("limit(x) vs x'", 1e-12, "the shift moves x to x'"),
            parallel.at_most(
                "direction change of image lines",
                1e-12,
                "a shift moves every line to a Busemann parallel line",
            ),
            divergence.at_most(
                "image line divergence estimate",
                1e-2,
                "a shift moves every line to a Busemann parallel line",
            ),
            finite_dev.at_most("finite ω limit", 1e-8, anchor),
        ],
        cauchy_table,
    ))
}

// ---------------------------------------------------------------- circles

fn random_circle(rng: &mut SeededRng, n: usize) -> Result<CircleOrLine> {
    loop {
        let through_inf = rng.random_bool(0.25);
        let p = sampling::model_point(rng, n, 3.0);
        let q = sampling::model_point(rng, n, 3.0);
        let r = if through_inf { ModelPoint::Infinity } else { sampling::model_point(rng, n, 3.0) };
        if chordal_distance(&p, &q).min(chordal_distance(&p, &r)).min(chordal_distance(&q, &r)) > 0.05 {
            return circle_through(&p, &q, &r);
        }
    }
}

fn circle_two_points(ctx: &Ctx) -> Outcome {
    let n = ctx.n().max(2);
    let mut rng = ctx.rng(9);
    let mut count = Worst::default();
    let mut on_both = Worst::default();
    let mut shared = Worst::default();
    for case in 0..1000 {
        let (c1, c2, expected) = if case % 2 == 0 {
            (random_circle(&mut rng, n)?, random_circle(&mut rng, n)?, Vec::new())
        } else {
            // two circles through two common points
            let p = sampling::model_point(&mut rng, n, 3.0);
            let q = sampling::model_point(&mut rng, n, 3.0);
            let r1 = sampling::model_point(&mut rng, n, 3.0);
            let r2 = sampling::model_point(&mut rng, n, 3.0);
            let ok = [(&p, &q), (&p, &r1), (&q, &r1), (&p, &r2), (&q, &r2), (&r1, &r2)]
                .iter()
                .all(|(a, b)| chordal_distance(a, b) > 0.05);
            if !ok {
                continue;
            }
            let c1 = circle_through(&p, &q, &r1)?;
            let c2 = circle_through(&p, &q, &r2)?;
            if c1.same_set(&c2, 1e-6) {
                continue;
            }
            (c1, c2, vec![p, q])
        };
        let points = match intersect_circles(&c1, &c2) {
            Ok(p) => p,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        count.update(
            points.len() as f64,
            || serde_json::json!({"case": case, "points": points.iter().map(coords).collect::<Vec<_>>()}),
        );
        for p in &points {
            on_both
                .update(c1.residual(p).max(c2.residual(p)), || serde_json::json!({"case": case, "point": coords(p)}));
        }
        for e in &expected {
            let nearest = points.iter().map(|p| chordal_distance(p, e)).fold(f64::INFINITY, f64::min);
            shared.update(nearest, || serde_json::json!({"case": case, "expected": coords(e)}));
        }
    }
    let anchor = "two distinct circles meet in at most two points";
    Ok((
        vec![
            count.at_most("max intersection count", 2.0, anchor),
            // accuracy degrades like 1/sin of the crossing angle near tangency
            on_both.at_most("intersection points on both circles", 1e-6, anchor),
            shared.at_most("recovered common points", 1e-6, anchor),
        ],
        vec![],
    ))
}

fn ptolemy_equality(ctx: &Ctx) -> Outcome {
    let n = ctx.n().max(2);
    let mut rng = ctx.rng(10);
    let mut worst = Worst::default();
    let mut done = 0;
    while done < 500 {
        let c = random_circle(&mut rng, n)?;
        let mut thetas: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        thetas.sort_by(f64::total_cmp);
        let gaps_ok =
            thetas.windows(2).all(|w| w[1] - w[0] > 0.05) && thetas[0] + std::f64::consts::TAU - thetas[3] > 0.05;
        if !gaps_ok {
            continue;
        }
        let pts: Vec<ModelPoint> = thetas.iter().map(|&t| c.point_at(t)).collect();
        let residual = match verify_ptolemy_equality(&c, [&pts[0], &pts[1], &pts[2], &pts[3]]) {
            Ok(r) => r,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        worst.update(
            residual,
            || serde_json::json!({"case": done, "points": pts.iter().map(coords).collect::<Vec<_>>()}),
        );
        done += 1;
    }
    Ok((
        vec![worst.at_most(
            "Ptolemy equality residual",
            1e-10,
            "on a circle, |xz||yu| = |xy||zu| + |xu||yz| for separating pairs",
        )],
        vec![],
    ))
}

// --------------------------------------------------------------- busemann

fn non_parallel_direction(rng: &mut SeededRng, u: &DVector<f64>) -> DVector<f64> {
    let n = u.len();
    if n == 1 {
        return -u;
    }
    let w = loop {
        let g = sampling::gaussian_vector(rng, n);
        let w = &g - u * g.dot(u);
        if w.norm() > 1e-3 {
            break w.normalize();
        }
    };
    let theta = rng.random_range(std::f64::consts::FRAC_PI_6..=std::f64::consts::PI);
    u * theta.cos() + w * theta.sin()
}

fn busemann(ctx: &Ctx) -> Outcome {
    let n = ctx.n();
    let mut rng = ctx.rng(11);
    let t = 1e6;
    let mut oracle = Worst::default();
    let mut flat = Worst::default();
    let mut monotone = Worst::default();
    let mut level = Worst::default();
    let times = ctx.config.schedule.times();
    for case in 0..50 {
        let line = random_line(&mut rng, n, 2.0);
        let (bp, bm) = (BusemannFn::plus(line.clone()), BusemannFn::minus(line.clone()));
        let z = line.base() + sampling::point_in_ball(&mut rng, n, 10.0);
        let hz = Horosphere::through(&bp, &z);
        for _ in 0..20 {
            let x = line.base() + sampling::point_in_ball(&mut rng, n, 10.0);
            let w = || serde_json::json!({"case": case, "x": vec_json(&x)});
            for b in [&bp, &bm] {
                oracle.update((b.limit_at(&x, t) - busemann_closed(b, &x)).abs(), w);
            }
            flat.update((bp.value(&x) + bm.value(&x)).abs(), w);
            let values: Vec<f64> = times.iter().map(|&s| busemann_value_limit(&line, &x, s)).collect();
            let rise = values.windows(2).map(|v| v[1] - v[0]).fold(0.0, f64::max);
            monotone.update(rise, w);
            level.update((hz.offset(&x) - (bp.value(&x) - bp.value(&z))).abs(), w);
        }
    }
    // foliation: x = z + t·u with z ∈ H_o, uniquely
    let mut foliation = Worst::default();
    for case in 0..50 {
        let line = random_line(&mut rng, n, 2.0);
        let chart = ProjectionChart::of_line(&line);
        let ho = Horosphere::through(&BusemannFn::plus(line.clone()), line.base());
        for _ in 0..10 {
            let x = line.base() + sampling::point_in_ball(&mut rng, n, 10.0);
            let (t, z) = chart.split(&x);
            let back = chart.join(t, &z);
            // a second preimage would differ by a multiple of u, which leaves H_o
            let err = (back - &x).norm().max(ho.offset(&z).abs()) / (1.0 + x.norm());
            foliation.update(err, || serde_json::json!({"case": case, "x": vec_json(&x)}));
        }
    }
    // sublinear divergence
    let mut parallel = Worst::default();
    let mut crossing = f64::INFINITY;
    let mut crossing_case = None;
    for case in 0..50 {
        let line = random_line(&mut rng, n, 2.0);
        let other = parallel_line_through(&line, &sampling::point_in_cube(&mut rng, n, 5.0));
        parallel.update(check_sublinear_divergence(&line, &other, t)?, || serde_json::json!({"case": case}));
        let skew = ParamLine::new(
            sampling::point_in_cube(&mut rng, n, 5.0),
            non_parallel_direction(&mut rng, line.direction()),
        )?;
        let est = check_sublinear_divergence(&line, &skew, t)?;
        if est < crossing {
            crossing = est;
            crossing_case = Some(case);
        }
    }
    // convergence of the limit oracle at one far probe
    let line = random_line(&mut rng, n, 1.0);
    let x = line.base() + sampling::unit_vector(&mut rng, n) * 10.0;
    let b = BusemannFn::plus(line.clone());
    let errors: Vec<f64> = times.iter().map(|&s| (busemann_value_limit(&line, &x, s) - b.value(&x)).abs()).collect();
    let table = ConvergenceTable::new("Busemann limit error vs t", &times, &errors);
    let anchor = "Busemann function b(x) = lim (|x c(t)| - t)";
    Ok((
        vec![
            oracle.at_most("closed form vs limit at t = 1e6", 1e-4, anchor),
            flat.at_most("b⁺ + b⁻", 1e-12, "Busemann flat: b⁺ + b⁻ is constant"),
            monotone.at_most("increase of |x c(t)| - t in t", 1e-12, anchor),
            level.at_most("horosphere offset vs b(x) - b(z)", 1e-12, "horospheres are level sets of b"),
            foliation.at_most(
                "(t, z) ↦ z + t·u inverse residual",
                1e-12,
                "the lines parallel to ℓ through H_o foliate the space",
            ),
            parallel.at_most("parallel lines divergence estimate", 1e-2, "Busemann parallel lines diverge sublinearly"),
            Check::at_least(
                "non-parallel lines divergence estimate",
                crossing,
                0.5,
                "non-parallel lines diverge linearly",
            )
            .with_witness(serde_json::json!({"case": crossing_case})),
        ],
        vec![table],
    ))
}

fn horosphere_symmetry(ctx: &Ctx) -> Outcome {
    let n = ctx.n();
    let mut rng = ctx.rng(12);
    let schedule = ctx.config.schedule;
    let mut err_end = Worst::default();
    let mut ratio = Worst::default();
    let mut fixed = Worst::default();
    let mut distortion = Worst::default();
    let mut covariance = Worst::default();
    let mut tables = Vec::new();
    for case in 0..10 {
        let line = random_line(&mut rng, n, 2.0);
        let u = line.direction().clone();
        let probes: Vec<DVector<f64>> =
            (0..50).map(|_| line.base() + sampling::point_in_ball(&mut rng, n, 10.0)).collect();
        let hz: Vec<DVector<f64>> = (0..20)
            .map(|_| {
                let v = sampling::point_in_ball(&mut rng, n, 10.0);
                line.base() + &v - &u * v.dot(&u)
            })
            .collect();
        let lim = horosphere_symmetry_limit(&line, schedule, &probes, &hz)?;
        err_end.update(*lim.errors.last().expect("steps"), || serde_json::json!({"case": case, "t": lim.ts.last()}));
        for (k, w) in lim.errors.windows(2).enumerate() {
            ratio.update(w[1] / w[0], || serde_json::json!({"case": case, "t": lim.ts[k]}));
        }
        fixed.update(*lim.fixed_extrapolated.last().unwrap_or(&f64::INFINITY), || serde_json::json!({"case": case}));
        distortion.update(lim.limit_distortion, || serde_json::json!({"case": case}));
        // horospheres of b⁺ go to horospheres of b⁺
        let b = BusemannFn::plus(line.clone());
        for _ in 0..5 {
            let w = line.base() + sampling::point_in_ball(&mut rng, n, 10.0);
            let hw = Horosphere::through(&b, &w);
            let imgs: Vec<DVector<f64>> = (0..10)
                .map(|_| {
                    let v = sampling::point_in_ball(&mut rng, n, 10.0);
                    finite(lim.limit.apply(&ModelPoint::Finite(&w + &v - &u * v.dot(&u))))
                })
                .collect();
            let target = Horosphere::through(&b, &imgs[0]);
            let spread = imgs.iter().map(|p| target.offset(p).abs()).fold(0.0, f64::max);
            covariance.update(spread, || serde_json::json!({"case": case, "level": hw.level}));
        }
        if case == 0 {
            tables.push(ConvergenceTable::new("sup probe error vs t", &lim.ts, &lim.errors));
            tables.push(ConvergenceTable::new("H_z raw fixed error vs t", &lim.ts, &lim.fixed_errors));
        }
    }
    let anchor = "φ_t converges to the symmetry in the horosphere H_z";
    Ok((
        vec![
            err_end.at_most("sup probe error at the last t", 1e-4, anchor),
            ratio.at_most("error(2t) / error(t)", 0.6, anchor),
            fixed.at_most("extrapolated H_z displacement", 1e-6, "the horosphere symmetry fixes H_z pointwise"),
            distortion.at_most("limit isometry distortion", 1e-10, "the horosphere symmetry is an isometry"),
            covariance.at_most(
                "image of a horosphere off a horosphere",
                1e-10,
                "the horosphere symmetry maps horospheres to horospheres",
            ),
        ],
        tables,
    ))
}

fn projection(ctx: &Ctx) -> Outcome {
    let n = ctx.n().max(2);
    let mut rng = ctx.rng(13);
    let mut collinear = Worst::default();
    let mut alpha = Worst::default();
    let mut alpha_sin = Worst::default();
    let mut homogen = Worst::default();
    let mut idempotent = Worst::default();
    let ts: Vec<f64> = (-5..=5).map(|k| k as f64).collect();
    for case in 0..200 {
        let line = random_line(&mut rng, n, 2.0);
        let chart = ProjectionChart::of_line(&line);
        let u2 = non_parallel_direction(&mut rng, line.direction());
        let other = ParamLine::new(line.base().clone(), u2.clone())?;
        let w = || serde_json::json!({"case": case});
        let p = projected_line_check(&chart, &other, &ts)?;
        collinear.update(p.collinearity, w);
        alpha.update(p.alpha_residual, w);
        let sin = (1.0 - line.direction().dot(&u2).powi(2)).max(0.0).sqrt();
        alpha_sin.update((p.alpha - sin).abs(), w);
        let mut t3: [f64; 3] = std::array::from_fn(|_| rng.random_range(-5.0..5.0));
        t3.sort_by(f64::total_cmp);
        if t3[1] - t3[0] > 1e-2 && t3[2] - t3[1] > 1e-2 {
            homogen.update(homogen_ratio_check(&chart, &other, t3)?.spread, w);
        }
        let x = line.base() + sampling::point_in_ball(&mut rng, n, 10.0);
        let once = project(&chart, &x);
        idempotent.update((project(&chart, &once) - &once).norm() / (1.0 + once.norm()), w);
    }
    let anchor = "the projection to H_o maps lines through o to lines";
    Ok((
        vec![
            collinear.at_most("collinearity residual", 1e-9, anchor),
            alpha.at_most("|π(c(t))π(c(t'))| vs α|t - t'|", 1e-9, anchor),
            alpha_sin.at_most("α vs sine of the angle", 1e-9, anchor),
            homogen.at_most(
                "homogeneity ratio spread",
                1e-10,
                "the projection scales all distances on a line by one factor",
            ),
            idempotent.at_most("π∘π vs π", 1e-12, "the projection fixes H_o"),
        ],
        vec![],
    ))
}

fn lemma_3eq(ctx: &Ctx) -> Outcome {
    let n = ctx.n().max(2);
    let mut rng = ctx.rng(14);
    let names = ["|xy| = |x'y'|", "|xx'| = |yy'|", "|xy'| = |yx'|", "|x'y| >= |xx'|", "|xy|^2 + |xx'|^2 >= |yx'|^2"];
    let mut worst: Vec<Worst> = names.iter().map(|_| Worst::default()).collect();
    for case in 0..500 {
        let line = random_line(&mut rng, n, 2.0);
        let mut other = parallel_line_through(&line, &sampling::point_in_cube(&mut rng, n, 4.0));
        if rng.random_bool(0.5) {
            other = other.reversed();
        }
        let b = BusemannFn::plus(line.clone());
        let s1 = rng.random_range(-5.0..5.0);
        let s2 = rng.random_range(-5.0..5.0);
        let (x, y) = (line.point(s1), line.point(s2));
        let u = line.direction();
        let match_on = |p: &DVector<f64>| other.base() + u * (p - other.base()).dot(u);
        let (x2, y2) = (match_on(&x), match_on(&y));
        let report = lemma_3eq_suite(&b, &other, [&x, &y], [&x2, &y2], 1e-10)?;
        for (k, r) in report.relations.iter().enumerate() {
            let scale = r.lhs.abs().max(r.rhs.abs()).max(1.0);
            worst[k]
                .update(r.residual / scale, || serde_json::json!({"case": case, "x": vec_json(&x), "y": vec_json(&y)}));
        }
    }
    let anchor = "Busemann parallel lines with matched points";
    Ok((worst.into_iter().zip(names).map(|(w, name)| w.at_most(name, 1e-10, anchor)).collect(), vec![]))
}

// ---------------------------------------------------------- coordinates

#[derive(Default)]
struct ChartWorst {
    length: Worst,
    orthonormal: Worst,
    unit: Worst,
    round_trip: Worst,
    horo: Worst,
    metric: Worst,
    parallelogram: Worst,
    norm: Worst,
    transl: Worst,
    scaling: Worst,
}

impl ChartWorst {
    /// Builds the chart of a random line through a point of `Rⁿ` and
    /// measures it on 20 probes.
    fn measure(&mut self, rng: &mut SeededRng, n: usize) -> Result<CoordinateChart> {
        let line = random_line(rng, n, 2.0);
        let (chart, steps) = build_chart(&line)?;
        let w = || serde_json::json!({"n": n});
        self.length.update((steps.len() as f64 - n as f64).abs(), w);
        self.orthonormal.update(chart.orthonormality_defect(), w);
        for (i, a) in steps.iter().enumerate() {
            for b in &steps[i + 1..] {
                self.unit.update(((&a.unit_point - &b.unit_point).norm() - 2f64.sqrt()).abs(), w);
            }
        }
        let probes: Vec<DVector<f64>> = (0..20).map(|_| line.base() + sampling::point_in_ball(rng, n, 5.0)).collect();
        for x in &probes {
            let back = chart.point(&chart.coordinates(x));
            self.round_trip.update((back - x).norm() / (1.0 + x.norm()), w);
            self.horo.update((chart.horosphere_intersection(x)? - x).norm() / (1.0 + x.norm()), w);
        }
        let report = norm_axiom_check(&chart, &probes);
        let max_dist = probes.iter().flat_map(|a| probes.iter().map(move |b| (a - b).norm())).fold(1.0, f64::max);
        self.metric.update(report.metric_residual / max_dist, w);
        self.norm.update(
            report
                .zero_at_origin
                .max(report.triangle_excess)
                .max(report.homogeneity / max_dist)
                .max((report.min_nonzero - 1.0).abs()),
            w,
        );
        let coords: Vec<DVector<f64>> = probes.iter().map(|x| chart.coordinates(x)).collect();
        let sq_scale = coords.iter().map(|c| c.norm_squared()).fold(1.0, f64::max) * 4.0;
        let sch = schoenberg_check(|c| chart.norm_of(c), &coords, 1e-9);
        self.parallelogram.update(sch.defect / sq_scale, w);
        let pairs: Vec<(DVector<f64>, DVector<f64>)> =
            probes.windows(2).map(|p| (p[0].clone(), p[1].clone())).collect();
        let t = translation_isometry_check(&chart, &probes[0], &pairs)?;
        self.transl.update(t.displacement_error.max(t.max_distortion) / max_dist, w);
        for k in [0.5, 3.0] {
            let s = homothety_scaling_check(&chart, k, &probes)?;
            self.scaling.update(s.max_residual.max(s.norm_residual) / (k * max_dist), w);
        }
        Ok(chart)
    }

    fn checks(self, tol: f64) -> Vec<Check> {
        vec![
            self.length.at_most("descent length minus n", 0.0, "the horosphere flag has one step per dimension"),
            self.orthonormal.at_most("axis orthonormality defect", 1e-12, "coordinate lines are pairwise orthogonal"),
            self.unit.at_most("unit points pairwise distance vs √2", 1e-12, "unit points of the flag are √2 apart"),
            self.round_trip.at_most("coordinate round trip", 1e-12, "coordinates determine the point"),
            self.horo.at_most(
                "coordinate horospheres meet at the point",
                1e-9,
                "the coordinate horospheres through x meet in x",
            ),
            self.metric.at_most("recovered metric vs ambient", tol, "the coordinate norm recovers the metric"),
            self.parallelogram.at_most(
                "parallelogram defect",
                1e-9,
                "the recovered norm satisfies the parallelogram law",
            ),
            self.norm.at_most("norm axioms", 1e-9, "the recovered function is a norm"),
            self.transl.at_most(
                "translation displacement and distortion",
                1e-9,
                "translations are isometries moving o to x",
            ),
            self.scaling.at_most(
                "homothety vs scalar multiplication",
                1e-9,
                "homotheties at o act as scalar multiplication",
            ),
        ]
    }
}

fn coordinatization(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(15);
    let mut worst = ChartWorst::default();
    for n in 1..=ctx.n().max(5) {
        worst.measure(&mut rng, n)?;
    }
    Ok((worst.checks(ctx.tol()), vec![]))
}

/// Chart of `R^dimension` with the coordinatization checks for that chart
/// alone, reported under the suite name `coordinatize`.
pub fn coordinatize(config: &Config) -> Result<(CoordinateChart, SuiteReport)> {
    config.validate()?;
    let mut rng = sampling::rng(config.seed, 17);
    let mut worst = ChartWorst::default();
    let chart = worst.measure(&mut rng, config.dimension)?;
    let report = SuiteReport::new(
        "coordinatize",
        config.seed,
        config.dimension,
        worst.checks(config.tolerance_rel),
        vec![],
        None,
    );
    Ok((chart, report))
}

fn schoenberg(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(16);
    let mut defect = Worst::default();
    let mut gram = Worst::default();
    for n in 1..=ctx.n().max(5) {
        let line = random_line(&mut rng, n, 2.0);
        let (chart, _) = build_chart(&line)?;
        let samples: Vec<DVector<f64>> = (0..12).map(|_| sampling::point_in_ball(&mut rng, n, 3.0)).collect();
        let report = schoenberg_check(|c| chart.norm_of(c), &samples, 1e-9);
        defect.update(report.defect, || serde_json::json!({"n": n}));
        gram.update((-report.gram_min_eigenvalue).max(0.0), || serde_json::json!({"n": n}));
    }
    let l1 = |v: &DVector<f64>| v.iter().map(|c| c.abs()).sum::<f64>();
    let axes = vec![DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])];
    let control = schoenberg_check(l1, &axes, 1e-9);
    let anchor = "a Ptolemy normed space is an inner-product space";
    Ok((
        vec![
            defect.at_most("parallelogram defect of the chart norm", 1e-9, anchor),
            gram.at_most("negative Gram eigenvalue", 1e-9, anchor),
            Check::at_least("L1 parallelogram defect", control.defect, 1.0, "the L¹ norm is not an inner-product norm"),
        ],
        vec![],
    ))
}

/// A user-supplied map word checked against its defining properties, with
/// its collapsed normal form and the images of the given circles.
#[derive(Debug, Clone)]
pub struct MapWordVerification {
    pub report: SuiteReport,
    pub normal_form: Option<MoebiusMapNF>,
    pub circle_images: Vec<CircleOrLine>,
}

/// Checks crt invariance of `word` on seeded quadruples (200, or the sample
/// count of the mode), agreement with its normal form, and that sampled
/// points of each circle land on the mapped circle.
pub fn verify_map_word(word: &MapWord, circles: &[CircleOrLine], config: &Config) -> Result<MapWordVerification> {
    config.validate()?;
    let n = word.dim();
    if let Some(c) = circles.iter().find(|c| c.dim() != n) {
        return Err(Error::Dimension { expected: n, found: c.dim() });
    }
    let seed = config.seed;
    let mut rng = sampling::rng(seed, 18);
    let count = match config.mode {
        super::config::Mode::Exhaustive => 200,
        super::config::Mode::Sample { count } => count,
    };
    let mut crt_gap = Worst::default();
    for _ in 0..count {
        let q = admissible_quadruple(&mut rng, n);
        let images: [ModelPoint; 4] = std::array::from_fn(|i| word.apply(&q[i]));
        let before = chordal_crt([&q[0], &q[1], &q[2], &q[3]]);
        let after = chordal_crt([&images[0], &images[1], &images[2], &images[3]]);
        match (before, after) {
            (Ok(b), Ok(a)) => crt_gap.update(b.discrepancy(&a), || serde_json::json!({"quadruple": q.iter().map(coords).collect::<Vec<_>>()})),
            _ => crt_gap.update(f64::INFINITY, || serde_json::json!({"quadruple": q.iter().map(coords).collect::<Vec<_>>(), "reason": "degenerate image"})),
        }
    }
    let mut checks =
        vec![crt_gap.at_most("crt discrepancy under the word", 1e-9, "a Möbius map preserves cross-ratio triples")];
    let probes: Vec<ModelPoint> = (0..20).map(|_| sampling::model_point(&mut rng, n, 3.0)).collect();
    let (normal_form, error) = match word.normalize() {
        Ok(nf) => {
            let gap = word.max_deviation(&nf.clone().into(), &probes);
            checks.push(Check::at_most("normal form vs word action", gap, 1e-9, "every Möbius map has a normal form"));
            (Some(nf), None)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let mut circle_images = Vec::with_capacity(circles.len());
    let mut on_image = Worst::default();
    for (k, c) in circles.iter().enumerate() {
        let image = map_circle(word, c)?;
        for p in c.samples(16) {
            on_image.update(image.residual(&word.apply(&p)), || serde_json::json!({"circle": k}));
        }
        circle_images.push(image);
    }
    if !circles.is_empty() {
        checks.push(on_image.at_most(
            "circle samples on the image circle",
            1e-9,
            "Möbius maps carry circles to circles",
        ));
    }
    let report = SuiteReport::new("map-word", seed, n, checks, vec![], error);
    Ok(MapWordVerification { report, normal_form, circle_images })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_input_error() {
        assert!(matches!(run_suite("nope", &Config::default(), None), Err(Error::Input(_))));
    }

    #[test]
    fn l1_square_fails_ptolemy() {
        let config = Config { arithmetic: Arithmetic::ExactRational, ..Config::default() };
        let report = run_suite("ptolemy", &config, Some(&l1_square())).unwrap();
        assert_eq!(report.status, super::super::report::Status::Fail);
        assert!((report.checks[0].residual - 0.5).abs() < 1e-15);
        assert!(report.checks[0].witness.is_some());
    }

    #[test]
    fn inversion_lemmas_pass() {
        let report = run_suite("inversion-lemmas", &Config::default(), None).unwrap();
        assert_eq!(report.status, super::super::report::Status::Pass, "{}", report.to_text());
        assert!(report.max_residual() <= 1e-10);
    }
}
