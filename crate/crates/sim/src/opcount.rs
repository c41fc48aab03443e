//! Operation audit of the Jones tracker step.
//!
//! [`Counted`] wraps `f64` and tallies every add, subtract, multiply,
//! divide, square root, sine and cosine as one operation and every ordering
//! comparison as one comparison. Negation and constant loads are free.

use std::cell::Cell;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{Num, One, Zero};
use poltrack_core::algebra::{JonesMatrix, JonesVector};
use poltrack_core::channel::init_channel;
use poltrack_core::constellation::{Constellation, Format};
use poltrack_core::rng::RngStream;
use poltrack_core::tracker::{jones_step, step_sizes, StepParams};
use poltrack_core::scalar::Real;

use crate::presets::presets;
use crate::SimError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub ops: u64,
    pub comparisons: u64,
}

thread_local! {
    static COUNTS: Cell<OpCounts> = const { Cell::new(OpCounts { ops: 0, comparisons: 0 }) };
}

fn bump_op() {
    COUNTS.with(|c| {
        let mut v = c.get();
        v.ops += 1;
        c.set(v);
    });
}

fn bump_cmp() {
    COUNTS.with(|c| {
        let mut v = c.get();
        v.comparisons += 1;
        c.set(v);
    });
}

/// Resets this thread's counters.
pub fn reset_counts() {
    COUNTS.with(|c| c.set(OpCounts::default()));
}

/// This thread's counters.
pub fn counts() -> OpCounts {
    COUNTS.with(|c| c.get())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Counted(pub f64);

macro_rules! counted_binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for Counted {
            type Output = Counted;
            #[inline]
            fn $f(self, rhs: Counted) -> Counted {
                bump_op();
                Counted(self.0 $op rhs.0)
            }
        }
    };
}

counted_binop!(Add, add, +);
counted_binop!(Sub, sub, -);
counted_binop!(Mul, mul, *);
counted_binop!(Div, div, /);
counted_binop!(Rem, rem, %);

impl Neg for Counted {
    type Output = Counted;
    fn neg(self) -> Counted {
        Counted(-self.0)
    }
}

impl PartialOrd for Counted {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        bump_cmp();
        self.0.partial_cmp(&other.0)
    }
}

impl Zero for Counted {
    fn zero() -> Self {
        Counted(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl One for Counted {
    fn one() -> Self {
        Counted(1.0)
    }
}

impl Num for Counted {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Counted)
    }
}

impl Real for Counted {
    fn from_f64(v: f64) -> Self {
        Counted(v)
    }
    fn to_f64(self) -> f64 {
        self.0
    }
    fn sqrt(self) -> Self {
        bump_op();
        Counted(self.0.sqrt())
    }
    fn sin(self) -> Self {
        bump_op();
        Counted(self.0.sin())
    }
    fn cos(self) -> Self {
        bump_op();
        Counted(self.0.cos())
    }
}

/// Average per-symbol cost of the Jones tracker step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditRow {
    pub format: Format,
    pub sop_period: u64,
    /// Arithmetic operations per symbol.
    pub ops: f64,
    /// Comparisons per symbol, slicer included.
    pub comparisons: f64,
    /// Real numbers of tracker state.
    pub memory: usize,
    /// Reference operation count for this SOP period.
    pub reference: f64,
}

/// Real numbers held by the Jones tracker between symbols.
pub const TRACKER_MEMORY: usize = std::mem::size_of::<JonesMatrix>() / std::mem::size_of::<f64>();

/// Runs `symbols` counted steps of the Jones tracker on a noisy drifting
/// channel, with SOP updates every `sop_period` symbols.
pub fn audit(format: Format, sop_period: u64, symbols: u64, seed: u64) -> Result<AuditRow, SimError> {
    if sop_period == 0 || symbols == 0 {
        return Err(SimError::Config("op audit needs positive sop period and symbol count".into()));
    }
    let c = Constellation::new(format);
    let p = presets(format);
    let params = poltrack_core::channel::NoiseParams::from_normalized(
        p.pol_sweep_dnu_t,
        1e-6,
        1.0 / 28e9,
        c.es(),
        crate::anchor::awgn_anchor_db(format) + 1.0,
    )?;
    let mut ch = init_channel(params, RngStream::new(seed, 0))?;
    let mut src = RngStream::new(seed, 1);
    let steps = StepParams::known_channel(p.c_const).with_sop_period(sop_period);
    let (mu_ph, mu_sop) = step_sizes(u64::MAX, &steps, &params, c.es());
    let gain_ph = Counted(-2.0 * mu_ph);
    let gain_sop = Counted(-2.0 * mu_sop);
    let mut h: JonesMatrix<Counted> = ch.t_matrix().adjoint().cast();

    let mut total = OpCounts::default();
    for k in 1..=symbols {
        let x = *c.point(src.below(c.size()));
        let y: JonesVector<Counted> = ch.transmit(&x).cast();
        ch.step();

        reset_counts();
        let s = jones_step(&h, &y, &c, gain_ph, gain_sop, steps.sop_due(k));
        let n = counts();
        total.ops += n.ops;
        total.comparisons += n.comparisons;
        h = s.h_next;
    }
    let n = symbols as f64;
    Ok(AuditRow {
        format,
        sop_period,
        ops: total.ops as f64 / n,
        comparisons: total.comparisons as f64 / n,
        memory: TRACKER_MEMORY,
        reference: crate::presets::reference_ops(sop_period),
    })
}

/// Comparisons spent by the slicer alone, averaged over `symbols` noisy
/// samples of the given format.
pub fn decision_comparisons(format: Format, symbols: u64, seed: u64) -> f64 {
    let c = Constellation::new(format);
    let mut rng = RngStream::new(seed, 0);
    let mut total = 0;
    for _ in 0..symbols {
        let x = *c.point(rng.below(c.size()));
        let n = JonesVector::new(
            poltrack_core::algebra::Complex::new(rng.normal(0.05), rng.normal(0.05)),
            poltrack_core::algebra::Complex::new(rng.normal(0.05), rng.normal(0.05)),
        );
        let z: JonesVector<Counted> = (x + n).cast();
        reset_counts();
        c.decide_index(&z);
        total += counts().comparisons;
    }
    total as f64 / symbols as f64
}
