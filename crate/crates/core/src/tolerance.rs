use serde::{Deserialize, Serialize};

/// Relative tolerance with an absolute floor.
///
/// A residual `r` measured against a quantity of magnitude `scale` is accepted
/// when `r <= max(rel * scale, abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-9, abs: 1e-15 }
    }
}

impl Tolerance {
    pub const fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// Same relative tolerance, default absolute floor.
    pub const fn relative(rel: f64) -> Self {
        Self { rel, abs: 1e-15 }
    }

    pub fn bound(&self, scale: f64) -> f64 {
        (self.rel * scale.abs()).max(self.abs)
    }

    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.bound(scale)
    }

    /// Whether `a` and `b` agree relative to the larger of the two.
    pub fn close(&self, a: f64, b: f64) -> bool {
        self.accepts((a - b).abs(), a.abs().max(b.abs()))
    }
}
