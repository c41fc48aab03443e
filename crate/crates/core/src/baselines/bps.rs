use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::algebra::{Complex, JonesVector};
use crate::constellation::Constellation;
use crate::error::Error;
use crate::scalar::math;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BpsConfig {
    /// Samples per window `N`; the window is centered, delay `(N − 1)/2`.
    pub window: usize,
    /// Test phases `P` on `[−π/4, π/4)`.
    pub test_phases: usize,
}

impl BpsConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.window == 0 {
            return Err(Error::InvalidParams("BPS window must be at least 1"));
        }
        if self.test_phases < 2 {
            return Err(Error::InvalidParams("BPS needs at least two test phases"));
        }
        Ok(())
    }

    /// `φ_b = (b/P)(π/2) − π/4`.
    pub fn test_phase(&self, b: usize) -> f64 {
        b as f64 / self.test_phases as f64 * FRAC_PI_2 - FRAC_PI_4
    }

    pub fn delay(&self) -> usize {
        (self.window - 1) / 2
    }
}

fn rotor(phi: f64) -> Complex {
    Complex::new(math::cos(phi), -math::sin(phi))
}

/// Test phase minimizing the summed nearest-point distance of the derotated
/// samples, over one polarization's alphabet. Ties go to the lowest phase.
pub fn bps_phase(samples: &[Complex], cfg: &BpsConfig, c: &Constellation) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    for b in 0..cfg.test_phases {
        let phi = cfg.test_phase(b);
        let r = rotor(phi);
        let cost: f64 = samples.iter().map(|z| c.nearest_pol_point(z * r).1).sum();
        if cost < best.0 {
            best = (cost, phi);
        }
    }
    best.1
}

/// Nearest equivalent of `phi` modulo π/2 to `prev`.
fn unwrap_quarter(phi: f64, prev: f64) -> f64 {
    phi + math::round((prev - phi) / FRAC_PI_2) * FRAC_PI_2
}

/// Streaming BPS with a centered window; output lags input by the delay and
/// windows are truncated at both ends of the stream.
///
/// PM formats estimate one phase per polarization. Polarization-switched
/// formats estimate a common phase from 4D distances, since their
/// differential code is only transparent to a common rotation.
#[derive(Clone, Debug)]
pub struct BpsTracker {
    cfg: BpsConfig,
    joint: bool,
    rotors: Vec<Complex>,
    /// `(z, per-phase costs)`; costs are `[pol x, pol y]` per test phase.
    buf: VecDeque<(JonesVector, Vec<[f64; 2]>)>,
    front: usize,
    received: usize,
    next_out: usize,
    last: [f64; 2],
}

impl BpsTracker {
    pub fn new(cfg: BpsConfig, c: &Constellation) -> Result<Self, Error> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            joint: c.format().is_pol_switched(),
            rotors: (0..cfg.test_phases).map(|b| rotor(cfg.test_phase(b))).collect(),
            buf: VecDeque::with_capacity(cfg.window + 1),
            front: 0,
            received: 0,
            next_out: 0,
            last: [0.0; 2],
        })
    }

    pub fn config(&self) -> &BpsConfig {
        &self.cfg
    }

    fn costs(&self, z: &JonesVector, c: &Constellation) -> Vec<[f64; 2]> {
        self.rotors
            .iter()
            .map(|r| {
                let (zx, zy) = (z.x * r, z.y * r);
                if self.joint {
                    let d = JonesVector::new(zx, zy);
                    let (_, p) = c.decide(&d);
                    [(d - p).norm_sqr(), 0.0]
                } else {
                    [c.nearest_pol_point(zx).1, c.nearest_pol_point(zy).1]
                }
            })
            .collect()
    }

    /// Feeds one sample; returns the derotated sample whose window just
    /// completed, if any.
    pub fn push(&mut self, z: JonesVector, c: &Constellation) -> Option<JonesVector> {
        let costs = self.costs(&z, c);
        self.buf.push_back((z, costs));
        self.received += 1;
        if self.next_out + self.cfg.delay() < self.received {
            Some(self.emit())
        } else {
            None
        }
    }

    /// Drains the remaining samples at the end of the stream.
    pub fn flush(&mut self) -> Vec<JonesVector> {
        let mut out = Vec::new();
        while self.next_out < self.received {
            out.push(self.emit());
        }
        out
    }

    fn emit(&mut self) -> JonesVector {
        let j = self.next_out;
        let d = self.cfg.delay();
        while self.front + d < j {
            self.buf.pop_front();
            self.front += 1;
        }
        // Window [j − d, j + d] clipped to what has been received.
        let hi = (j + d + 1).min(self.received) - self.front;
        let lanes = if self.joint { 1 } else { 2 };
        let mut phase = [0.0; 2];
        for (lane, ph) in phase.iter_mut().enumerate().take(lanes) {
            let mut best = (f64::INFINITY, 0);
            for b in 0..self.cfg.test_phases {
                let cost: f64 = self.buf.range(..hi).map(|e| e.1[b][lane]).sum();
                if cost < best.0 {
                    best = (cost, b);
                }
            }
            *ph = unwrap_quarter(self.cfg.test_phase(best.1), self.last[lane]);
            self.last[lane] = *ph;
        }
        if self.joint {
            phase[1] = phase[0];
        }
        self.next_out += 1;
        let z = self.buf[j - self.front].0;
        JonesVector::new(z.x * rotor(phase[0]), z.y * rotor(phase[1]))
    }

    /// Unwrapped phase estimates of the last emitted sample.
    pub fn last_phase(&self) -> [f64; 2] {
        self.last
    }
}
