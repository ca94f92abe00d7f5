//! The location-scale group `H = R x R++`.
//!
//! Composition is `(l1, s1) . (l2, s2) = (l1 + s1 l2, s1 s2)`, the identity is
//! `(0, 1)` and the inverse of `(l, s)` is `(-l/s, 1/s)`. The group acts on the
//! sample space by `x -> l + s x`.

use std::fmt;

use crate::{Error, Result};

/// A location-scale pair `(l, s)` with finite `l` and finite `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    l: f64,
    s: f64,
}

impl GroupElement {
    pub fn new(l: f64, s: f64) -> Result<Self> {
        if l.is_finite() && s.is_finite() && s > 0.0 {
            Ok(Self { l, s })
        } else {
            Err(Error::InvalidElement { l, s })
        }
    }

    /// Pure scale element `(0, s)`.
    pub fn scale(s: f64) -> Result<Self> {
        Self::new(0.0, s)
    }

    /// Pure translation `(l, 1)`.
    pub fn translation(l: f64) -> Result<Self> {
        Self::new(l, 1.0)
    }

    pub const fn identity() -> Self {
        Self { l: 0.0, s: 1.0 }
    }

    pub fn location(&self) -> f64 {
        self.l
    }

    pub fn scale_param(&self) -> f64 {
        self.s
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        Self {
            l: self.l + self.s * other.l,
            s: self.s * other.s,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        Self {
            l: -self.l / self.s,
            s: 1.0 / self.s,
        }
    }

    /// `x -> l + s x`.
    pub fn act(&self, x: f64) -> f64 {
        self.l + self.s * x
    }

    /// `x -> (x - l) / s`, the action of the inverse computed without forming it.
    pub fn pull_back(&self, x: f64) -> f64 {
        (x - self.l) / self.s
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::identity()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.l, self.s)
    }
}
