//! The model space `Rⁿ ∪ {∞}` with explicit Möbius maps.

pub mod circle;
pub mod inversion;
pub mod map;
pub mod point;

pub use circle::{circle_through, intersect_circles, map_circle, verify_ptolemy_equality, CircleOrLine};
pub use inversion::{
    circles_through, homothety, shift_approx, sphere_samples, strong_inversion, transit_homothety, verify_s_inversion,
    AxiomCheck, SInversionReport, ShiftApprox, SphereSpec,
};
pub use map::{MapWord, MoebiusMapNF};
pub use point::{chordal_distance, distance_with_pole, euclidean_distance, sample_space, ModelMetric, ModelPoint};
