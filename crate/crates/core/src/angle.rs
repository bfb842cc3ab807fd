//! Measurement angles restricted to multiples of π/4.

use core::fmt;
use core::ops::{Add, Neg, Sub};

/// An angle `kπ/4`, stored as `k mod 8`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(u8);

impl Angle {
    pub const ZERO: Angle = Angle(0);
    pub const PI: Angle = Angle(4);
    pub const HALF_PI: Angle = Angle(2);

    pub fn new(k: i64) -> Angle {
        Angle(k.rem_euclid(8) as u8)
    }

    pub const fn from_k(k: u8) -> Angle {
        Angle(k % 8)
    }

    pub fn k(self) -> u8 {
        self.0
    }

    /// Adds `b·π`.
    pub fn plus_pi(self, b: u8) -> Angle {
        Angle((self.0 + 4 * (b & 1)) % 8)
    }

    /// `(-1)^s · self`.
    pub fn signed(self, s: u8) -> Angle {
        if s & 1 == 1 {
            -self
        } else {
            self
        }
    }

    /// Clifford angles are multiples of π/2.
    pub fn is_clifford(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn radians(self) -> f64 {
        self.0 as f64 * core::f64::consts::FRAC_PI_4
    }

    /// `e^{iθ}` as `(re, im)` without transcendental calls.
    pub fn phase(self) -> (f64, f64) {
        const H: f64 = core::f64::consts::FRAC_1_SQRT_2;
        match self.0 {
            0 => (1.0, 0.0),
            1 => (H, H),
            2 => (0.0, 1.0),
            3 => (-H, H),
            4 => (-1.0, 0.0),
            5 => (-H, -H),
            6 => (0.0, -1.0),
            _ => (H, -H),
        }
    }

    pub fn all() -> impl Iterator<Item = Angle> {
        (0..8).map(Angle)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, o: Angle) -> Angle {
        Angle((self.0 + o.0) % 8)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, o: Angle) -> Angle {
        self + (-o)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle((8 - self.0) % 8)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π/4", self.0)
    }
}
