//! Floating-point abstraction used by the per-point kernel.
//!
//! The kernel is written once against [`Real`]. It runs on `f64` for real
//! work and on [`Counted`] when auditing how many floating-point operations
//! one point costs.

use std::cell::Cell;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

pub trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn lit(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn acos(self) -> Self;
    fn cos(self) -> Self;
    fn abs(self) -> Self;

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    #[inline(always)]
    fn lit(v: f64) -> Self {
        v
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline(always)]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline(always)]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline(always)]
    fn acos(self) -> Self {
        f64::acos(self)
    }
    #[inline(always)]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline(always)]
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// Tally of floating-point operations by class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    pub add: u64,
    pub sub: u64,
    pub mul: u64,
    pub div: u64,
    pub sqrt: u64,
    pub ln: u64,
    pub acos: u64,
    pub cos: u64,
}

impl OpCounts {
    /// Every counted operation weighs one, transcendental or not.
    pub fn total(&self) -> u64 {
        self.add + self.sub + self.mul + self.div + self.sqrt + self.ln + self.acos + self.cos
    }
}

thread_local! {
    static COUNTS: Cell<OpCounts> = Cell::new(OpCounts::default());
}

fn bump(f: impl FnOnce(&mut OpCounts)) {
    COUNTS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

/// An `f64` that records every arithmetic operation performed on it.
///
/// Negation, comparisons, `abs`, `max` and `min` are free.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Counted(pub f64);

impl Counted {
    /// Runs `f` with the counters reset and returns its result with the tally.
    pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpCounts) {
        let saved = COUNTS.with(|c| c.replace(OpCounts::default()));
        let r = f();
        let counts = COUNTS.with(|c| c.replace(saved));
        (r, counts)
    }
}

macro_rules! counted_binop {
    ($tr:ident, $method:ident, $field:ident, $op:tt) => {
        impl $tr for Counted {
            type Output = Counted;
            #[inline]
            fn $method(self, rhs: Counted) -> Counted {
                bump(|c| c.$field += 1);
                Counted(self.0 $op rhs.0)
            }
        }
    };
}

counted_binop!(Add, add, add, +);
counted_binop!(Sub, sub, sub, -);
counted_binop!(Mul, mul, mul, *);
counted_binop!(Div, div, div, /);

impl Neg for Counted {
    type Output = Counted;
    fn neg(self) -> Counted {
        Counted(-self.0)
    }
}

impl Real for Counted {
    fn lit(v: f64) -> Self {
        Counted(v)
    }
    fn to_f64(self) -> f64 {
        self.0
    }
    fn sqrt(self) -> Self {
        bump(|c| c.sqrt += 1);
        Counted(self.0.sqrt())
    }
    fn ln(self) -> Self {
        bump(|c| c.ln += 1);
        Counted(self.0.ln())
    }
    fn acos(self) -> Self {
        bump(|c| c.acos += 1);
        Counted(self.0.acos())
    }
    fn cos(self) -> Self {
        bump(|c| c.cos += 1);
        Counted(self.0.cos())
    }
    fn abs(self) -> Self {
        Counted(self.0.abs())
    }
}
