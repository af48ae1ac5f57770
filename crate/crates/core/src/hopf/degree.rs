use std::fmt;
use std::ops::{Add, Sub};

/// A class degree `(stem, filtration, weight)`.
///
/// Classical charts carry `w = 0`; [`TriDegree::embed_classical`] gives the
/// Chow-degree-zero motivic degree that corresponds to a classical one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TriDegree {
    pub s: i32,
    pub f: i32,
    pub w: i32,
}

impl TriDegree {
    pub const fn new(s: i32, f: i32, w: i32) -> Self {
        TriDegree { s, f, w }
    }

    pub const fn classical(s: i32, f: i32) -> Self {
        TriDegree { s, f, w: 0 }
    }

    pub fn chow(self) -> i32 {
        chow_degree(self)
    }

    pub fn coweight(self) -> i32 {
        self.s - self.w
    }

    /// `s - 2f`.
    pub fn intercept(self) -> i32 {
        self.s - 2 * self.f
    }

    /// Internal degree `t = s + f`.
    pub fn t(self) -> i32 {
        self.s + self.f
    }

    /// The image of classical `(s, f)` in Chow degree zero: `(2s + f, f, s + f)`.
    pub fn embed_classical(s: i32, f: i32) -> Self {
        TriDegree::new(2 * s + f, f, s + f)
    }

    /// Inverse of [`TriDegree::embed_classical`]; `None` off Chow degree zero.
    pub fn unembed_classical(self) -> Option<(i32, i32)> {
        (self.chow() == 0 && (self.s - self.f) % 2 == 0).then_some(((self.s - self.f) / 2, self.f))
    }

    /// Motivic degree of a Chow-degree-one class at regraded `(S, f)`.
    pub fn from_regraded_chow1(big_s: i32, f: i32) -> Self {
        let s = 2 * big_s + f - 1;
        TriDegree::new(s, f, (s + f - 1) / 2)
    }

    /// Regraded `(S, f)` of a Chow-degree-one degree; `S` is the coweight.
    pub fn regraded_chow1(self) -> Option<(i32, i32)> {
        (self.chow() == 1).then_some(((self.s - self.f + 1) / 2, self.f))
    }
}

impl Add for TriDegree {
    type Output = TriDegree;
    fn add(self, o: TriDegree) -> TriDegree {
        TriDegree::new(self.s + o.s, self.f + o.f, self.w + o.w)
    }
}

impl Sub for TriDegree {
    type Output = TriDegree;
    fn sub(self, o: TriDegree) -> TriDegree {
        TriDegree::new(self.s - o.s, self.f - o.f, self.w - o.w)
    }
}

impl fmt::Display for TriDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.s, self.f, self.w)
    }
}

/// `s + f - 2w`.
pub fn chow_degree(d: TriDegree) -> i32 {
    d.s + d.f - 2 * d.w
}
