//! Fixtures shared by the benchmarks.

use moebius_core::busemann::ParamLine;
use moebius_core::model::{sample_space, CircleOrLine, ModelMetric};
use moebius_core::sampling::{self, SeededRng};
use moebius_core::{ExtendedMetricSpace, MapWord, ModelPoint};

pub fn rng(stream: u64) -> SeededRng {
    sampling::rng(0xBE9C, stream)
}

/// `k` random points of `[-3, 3]^n` plus ∞.
pub fn model_points(n: usize, k: usize) -> Vec<ModelPoint> {
    let mut r = rng(1);
    let mut pts: Vec<ModelPoint> = (0..k).map(|_| sampling::model_point(&mut r, n, 3.0)).collect();
    pts.push(ModelPoint::Infinity);
    pts
}

pub fn euclidean_space(n: usize, k: usize) -> ExtendedMetricSpace {
    let pts = model_points(n, k);
    let ids = (0..pts.len()).map(|i| format!("p{i}")).collect();
    sample_space(ids, &pts, ModelMetric::Euclidean).expect("distinct points")
}

pub fn word(n: usize, len: usize) -> MapWord {
    sampling::map_word(&mut rng(2), n, len)
}

pub fn probes(n: usize, k: usize) -> Vec<ModelPoint> {
    let mut r = rng(3);
    (0..k).map(|_| sampling::model_point(&mut r, n, 3.0)).collect()
}

/// Two circles through the same pair of points.
pub fn circle_pair(n: usize) -> (CircleOrLine, CircleOrLine) {
    let mut r = rng(4);
    let mut pick = || sampling::model_point(&mut r, n, 2.0);
    let (p, q) = (pick(), pick());
    let a = moebius_core::model::circle_through(&p, &q, &pick()).expect("generic points");
    let b = moebius_core::model::circle_through(&p, &q, &pick()).expect("generic points");
    (a, b)
}

pub fn line(n: usize) -> ParamLine {
    let mut r = rng(5);
    ParamLine::new(sampling::point_in_cube(&mut r, n, 2.0), sampling::unit_vector(&mut r, n)).expect("unit direction")
}
