use alloc::vec::Vec;

use super::bps::{BpsConfig, BpsTracker};
use super::cma::{cma_mma_step, godard_radius, CmaConfig};
use crate::algebra::{JonesMatrix, JonesVector};
use crate::constellation::{Constellation, Format};
use crate::error::Error;

/// Symbols spent on each staged-radii training stage.
pub const DEFAULT_STAGE_LEN: usize = 5000;

/// Target-radius sets for blind training, from a single Godard radius up to
/// the full ring set through the smaller square formats.
pub fn mma_stages(c: &Constellation) -> Vec<Vec<f64>> {
    let full = c.mma_radii().to_vec();
    let ladder: &[Format] = match c.format() {
        Format::PsQpsk | Format::PmQpsk => return alloc::vec![full],
        Format::Pm16Qam => &[],
        Format::Pm64Qam => &[Format::Pm16Qam],
        Format::Pm256Qam => &[Format::Pm16Qam, Format::Pm64Qam],
    };
    let mut stages = alloc::vec![alloc::vec![godard_radius(c)]];
    for f in ladder {
        stages.push(Constellation::new(*f).mma_radii().to_vec());
    }
    stages.push(full);
    stages
}

/// One-tap CMA/MMA demultiplexer followed by BPS and a 4D decision.
///
/// The equalizer only sees moduli, so it runs ahead of the BPS delay without
/// feedback. Output indices arrive in input order, delayed by the BPS delay.
#[derive(Clone, Debug)]
pub struct MmaBpsChain {
    w: JonesMatrix,
    cma: CmaConfig,
    stages: Vec<Vec<f64>>,
    stage_len: usize,
    k: usize,
    bps: BpsTracker,
}

impl MmaBpsChain {
    /// `blind` trains through [`mma_stages`]; otherwise the full radius set
    /// is used from the first symbol.
    pub fn new(
        c: &Constellation,
        mu: f64,
        bps: BpsConfig,
        w0: JonesMatrix,
        blind: bool,
        stage_len: usize,
    ) -> Result<Self, Error> {
        let stages = if blind { mma_stages(c) } else { alloc::vec![c.mma_radii().to_vec()] };
        let mut cma = CmaConfig::for_constellation(c, mu);
        cma.radii = stages[0].clone();
        cma.validate()?;
        Ok(Self { w: w0, cma, stages, stage_len, k: 0, bps: BpsTracker::new(bps, c)? })
    }

    pub fn w(&self) -> &JonesMatrix {
        &self.w
    }

    pub fn push(&mut self, y: &JonesVector, c: &Constellation) -> Option<usize> {
        if self.stages.len() > 1 {
            let stage = (self.k / self.stage_len.max(1)).min(self.stages.len() - 1);
            if self.cma.radii != self.stages[stage] {
                self.cma.radii = self.stages[stage].clone();
            }
        }
        self.k += 1;
        let z = cma_mma_step(&mut self.w, y, &self.cma);
        self.bps.push(z, c).map(|d| c.decide(&d).0)
    }

    pub fn flush(&mut self, c: &Constellation) -> Vec<usize> {
        self.bps.flush().iter().map(|d| c.decide(d).0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_ladders() {
        let n: Vec<usize> = Format::ALL.iter().map(|f| mma_stages(&Constellation::new(*f)).len()).collect();
        assert_eq!(n, [1, 1, 2, 3, 4]);
        let s = mma_stages(&Constellation::new(Format::Pm64Qam));
        assert_eq!((s[0].len(), s[1].len(), s[2].len()), (1, 3, 9));
    }

    #[test]
    fn static_noiseless_identity_is_error_free() {
        let c = Constellation::new(Format::Pm16Qam);
        let bps = BpsConfig { window: 19, test_phases: 32 };
        let mut chain = MmaBpsChain::new(&c, 0.04, bps, JonesMatrix::identity(), false, DEFAULT_STAGE_LEN).unwrap();
        let tx: Vec<usize> = (0..200).map(|k| (k * 101 + 7) % c.size()).collect();
        let mut rx = Vec::new();
        for &t in &tx {
            rx.extend(chain.push(c.point(t), &c));
        }
        rx.extend(chain.flush(&c));
        assert_eq!(rx, tx);
    }
}
