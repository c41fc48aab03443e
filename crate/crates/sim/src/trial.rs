//! One Monte Carlo realization: source, differential encoder, channel,
//! receiver and error counting.

use std::collections::VecDeque;

use poltrack_core::algebra::{
    embed_jones, mueller_from_jones, stokes_from_jones, vec4_from_jones, JonesMatrix, JonesVector, MuellerMatrix,
    Rotation4,
};
use poltrack_core::baselines::{BpsConfig, KabschConfig, KabschState, MmaBpsChain};
use poltrack_core::channel::{init_channel, ChannelState, NoiseParams};
use poltrack_core::constellation::{Constellation, DiffDecoder, DiffEncoder};
use poltrack_core::rng::RngStream;
use poltrack_core::tracker::{Rot4TrackerState, StepParams, StokesTrackerState, TrackOutput, TrackerState};

use crate::config::{Algorithm, ExperimentConfig, Metric};
use crate::presets::presets;
use crate::SimError;

/// Consecutive post-warmup errors that mark a cycle slip.
pub const CYCLE_SLIP_RUN: u64 = 100;

const STREAM_CHANNEL: u64 = 0;
const STREAM_SOURCE: u64 = 1;
const STREAMS_PER_TRIAL: u64 = 4;

/// Optional per-trial recordings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialOptions {
    /// Error counts per window of this many symbols, warmup included.
    pub window: Option<u64>,
    /// Record cumulative true and estimated parameters every this many
    /// symbols.
    pub trace_every: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub k: u64,
    pub theta_cum: f64,
    pub alpha_cum: [f64; 3],
    pub est_theta_cum: f64,
    pub est_alpha_cum: [f64; 3],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrialOutcome {
    pub errors: u64,
    /// Symbols that entered the error count.
    pub counted: u64,
    pub cycle_slip: bool,
    pub windows: Vec<u64>,
    pub trace: Vec<TraceRow>,
}

enum Receiver {
    Jones(TrackerState),
    Stokes(StokesTrackerState),
    Rot4(Rot4TrackerState),
    Kabsch(KabschState),
    Chain(MmaBpsChain),
}

impl Receiver {
    fn build(cfg: &ExperimentConfig, c: &Constellation, params: &NoiseParams, t0: &JonesMatrix) -> Result<Self, SimError> {
        let p = presets(cfg.format);
        let known = cfg.known_initial_channel;
        let h0 = if known { t0.adjoint() } else { JonesMatrix::identity() };
        let steps = if cfg.freeze_tracker {
            StepParams::fixed(0.0, 0.0)
        } else if known {
            StepParams::known_channel(p.c_const)
        } else {
            StepParams::blind(p.c_const)
        }
        .with_sop_period(cfg.sop_period);
        Ok(match cfg.algorithm {
            Algorithm::ProposedJones => Receiver::Jones(TrackerState::new(h0, steps, params, c.es())?),
            Algorithm::ProposedStokes => {
                let m0 = if known { mueller_from_jones(&h0) } else { MuellerMatrix::identity() };
                Receiver::Stokes(StokesTrackerState::new(m0, steps, params, c.es())?)
            }
            Algorithm::Proposed4d => {
                let r0 = if known { embed_jones(&h0) } else { Rotation4::identity() };
                Receiver::Rot4(Rot4TrackerState::new(r0, steps, params, c.es())?)
            }
            Algorithm::Kabsch => {
                let r0 = if known { embed_jones(&h0) } else { Rotation4::identity() };
                Receiver::Kabsch(KabschState::new(KabschConfig { block_len: p.kabsch_block }, r0)?)
            }
            Algorithm::CmaBps => {
                let bps = BpsConfig { window: p.bps_window, test_phases: p.bps_test_phases };
                let mu = p.cma_mu / (c.es() * c.es());
                Receiver::Chain(MmaBpsChain::new(c, mu, bps, h0, !known, cfg.mma_stage_len as usize)?)
            }
        })
    }

    /// Decided index, if one is ready, and the tracker update applied.
    fn push(&mut self, y: &JonesVector, c: &Constellation) -> (Option<usize>, Option<TrackOutput>) {
        match self {
            Receiver::Jones(s) => {
                let o = s.step(y, c);
                (Some(o.index), Some(o))
            }
            Receiver::Stokes(s) => {
                let o = s.step(&stokes_from_jones(y), c);
                (Some(o.index), Some(o))
            }
            Receiver::Rot4(s) => {
                let o = s.step(&vec4_from_jones(y), c);
                (Some(o.index), Some(o))
            }
            Receiver::Kabsch(s) => (Some(s.step(&vec4_from_jones(y), c)), None),
            Receiver::Chain(s) => (s.push(y, c), None),
        }
    }

    fn flush(&mut self, c: &Constellation) -> Vec<usize> {
        match self {
            Receiver::Chain(s) => s.flush(c),
            _ => Vec::new(),
        }
    }
}

/// Error tally under one labelling hypothesis.
#[derive(Clone, Debug)]
struct Tally {
    relabel: Option<Vec<usize>>,
    decoder: DiffDecoder,
    run: u64,
    out: TrialOutcome,
}

struct Scorer<'a> {
    c: &'a Constellation,
    metric: Metric,
    warmup: u64,
    window: Option<u64>,
    pending: VecDeque<(usize, usize)>,
    position: u64,
    tallies: Vec<Tally>,
}

/// Relabellings induced by the unitary symmetries of the constellation:
/// polarization swap combined with quarter turns of either polarization.
pub fn symmetry_relabellings(c: &Constellation) -> Vec<Vec<usize>> {
    use poltrack_core::algebra::Complex;
    let quarter = |z: Complex, r: u32| (0..r).fold(z, |z, _| Complex::new(-z.im, z.re));
    let mut out = Vec::new();
    for swap in [false, true] {
        for (ra, rb) in (0..4).flat_map(|a| (0..4).map(move |b| (a, b))) {
            let map: Vec<usize> = c
                .points()
                .iter()
                .map(|p| {
                    let (a, b) = if swap { (p.y, p.x) } else { (p.x, p.y) };
                    let q = JonesVector::new(quarter(a, ra), quarter(b, rb));
                    let (i, hit) = c.decide(&q);
                    debug_assert!((hit - q).norm_sqr() < 1e-20, "constellation not closed under symmetry");
                    i
                })
                .collect();
            if !out.contains(&map) {
                out.push(map);
            }
        }
    }
    out
}

impl Scorer<'_> {
    fn score(&mut self, decided: usize) {
        let (src, tx) = self.pending.pop_front().expect("decision without a pending symbol");
        for t in &mut self.tallies {
            let d = t.relabel.as_ref().map_or(decided, |m| m[decided]);
            let wrong = match self.metric {
                Metric::Ser4d => t.decoder.decode(self.c, d) != src,
                Metric::StokesDecision => d != self.c.stokes_index_of(tx),
            };
            if let Some(w) = self.window {
                let slot = (self.position / w) as usize;
                if t.out.windows.len() <= slot {
                    t.out.windows.resize(slot + 1, 0);
                }
                t.out.windows[slot] += u64::from(wrong);
            }
            if self.position >= self.warmup {
                t.out.counted += 1;
                t.out.errors += u64::from(wrong);
                t.run = if wrong { t.run + 1 } else { 0 };
                if t.run >= CYCLE_SLIP_RUN {
                    t.out.cycle_slip = true;
                }
            }
        }
        self.position += 1;
    }

    /// Outcome of the hypothesis with the fewest counted errors; ties go to
    /// the earliest.
    fn finish(self) -> TrialOutcome {
        let mut best: Option<Tally> = None;
        for t in self.tallies {
            if best.as_ref().is_none_or(|b| t.out.errors < b.out.errors) {
                best = Some(t);
            }
        }
        best.expect("at least one hypothesis").out
    }
}

/// Independent random streams of trial `trial`.
pub fn trial_streams(seed: u64, trial: u64) -> (RngStream, RngStream) {
    let base = trial * STREAMS_PER_TRIAL;
    (RngStream::new(seed, base + STREAM_CHANNEL), RngStream::new(seed, base + STREAM_SOURCE))
}

/// Runs realization `trial` of `cfg` on a channel with `params`.
pub fn run_trial(
    cfg: &ExperimentConfig,
    c: &Constellation,
    params: &NoiseParams,
    trial: u64,
    opts: TrialOptions,
) -> Result<TrialOutcome, SimError> {
    let (ch_rng, mut src_rng) = trial_streams(cfg.seed, trial);
    let mut ch: ChannelState = init_channel(*params, ch_rng)?;
    let mut rx = Receiver::build(cfg, c, params, ch.t_matrix())?;
    let mut enc = DiffEncoder::new();
    // A blind start may lock onto any symmetry of the constellation; the
    // labelling is then resolved afterwards, as a frame header would.
    let relabels: Vec<Option<Vec<usize>>> = if cfg.known_initial_channel || cfg.metric == Metric::StokesDecision {
        vec![None]
    } else {
        symmetry_relabellings(c).into_iter().map(Some).collect()
    };
    let tallies = relabels
        .into_iter()
        .map(|relabel| Tally { relabel, decoder: DiffDecoder::new(), run: 0, out: TrialOutcome::default() })
        .collect();
    let mut scorer = Scorer {
        c,
        metric: cfg.metric,
        warmup: cfg.warmup,
        window: opts.window.filter(|w| *w > 0),
        pending: VecDeque::new(),
        position: 0,
        tallies,
    };
    let mut trace = Vec::new();
    let mut est_theta = 0.0;
    let mut est_alpha = [0.0; 3];

    for k in 1..=cfg.symbols {
        let src = src_rng.below(c.size());
        let tx = enc.encode(c, src);
        scorer.pending.push_back((src, tx));
        let y = ch.transmit(c.point(tx));
        ch.step();
        let (decided, update) = rx.push(&y, c);
        if let Some(d) = decided {
            scorer.score(d);
        }
        if let Some(every) = opts.trace_every.filter(|e| *e > 0) {
            if let Some(u) = update {
                est_theta += u.theta;
                for (e, a) in est_alpha.iter_mut().zip(u.alpha.0) {
                    *e += a;
                }
            }
            if k % every == 0 {
                let (theta_cum, alpha_cum) = ch.innovation_sums();
                trace.push(TraceRow {
                    k,
                    theta_cum,
                    alpha_cum: alpha_cum.0,
                    est_theta_cum: est_theta,
                    est_alpha_cum: est_alpha,
                });
            }
        }
    }
    for d in rx.flush(c) {
        scorer.score(d);
    }
    let mut out = scorer.finish();
    out.trace = trace;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigOverrides;

    fn cfg(algorithm: Algorithm, snr: &str) -> ExperimentConfig {
        ExperimentConfig::resolve(ConfigOverrides {
            format: Some("PM-QPSK".into()),
            algorithm: Some(algorithm),
            snr_db: Some(snr.into()),
            symbols: Some(5000),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn noiseless_known_channel_is_error_free_for_every_algorithm() {
        for a in [Algorithm::ProposedJones, Algorithm::Proposed4d, Algorithm::Kabsch, Algorithm::CmaBps] {
            let cfg = cfg(a, "inf");
            let c = Constellation::new(cfg.format);
            let p = cfg.noise_params(f64::INFINITY).unwrap();
            let out = run_trial(&cfg, &c, &p, 0, TrialOptions::default()).unwrap();
            assert_eq!(out.counted, 5000, "{a}");
            assert_eq!(out.errors, 0, "{a}");
        }
    }

    #[test]
    fn stokes_tracker_uses_stokes_decisions() {
        let mut cfg = cfg(Algorithm::ProposedStokes, "inf");
        cfg.metric = Metric::StokesDecision;
        let c = Constellation::new(cfg.format);
        let p = cfg.noise_params(f64::INFINITY).unwrap();
        let out = run_trial(&cfg, &c, &p, 3, TrialOptions::default()).unwrap();
        assert_eq!((out.errors, out.counted), (0, 5000));
    }

    #[test]
    fn windows_and_trace_are_recorded() {
        let cfg = cfg(Algorithm::ProposedJones, "20");
        let c = Constellation::new(cfg.format);
        let p = cfg.noise_params(20.0).unwrap();
        let opts = TrialOptions { window: Some(100), trace_every: Some(10) };
        let out = run_trial(&cfg, &c, &p, 1, opts).unwrap();
        assert_eq!(out.windows.len(), 50);
        assert_eq!(out.windows.iter().sum::<u64>(), out.errors);
        assert_eq!(out.trace.len(), 500);
        assert_eq!(out.trace[0].k, 10);
    }

    #[test]
    fn symmetry_group_sizes() {
        let qam = symmetry_relabellings(&Constellation::new(poltrack_core::constellation::Format::Pm16Qam));
        assert_eq!(qam.len(), 32);
        assert!(qam.contains(&(0..256).collect()));
        let ps = symmetry_relabellings(&Constellation::new(poltrack_core::constellation::Format::PsQpsk));
        assert_eq!(ps.len(), 32);
    }

    #[test]
    fn trials_are_reproducible_and_distinct() {
        let cfg = cfg(Algorithm::ProposedJones, "9");
        let c = Constellation::new(cfg.format);
        let p = cfg.noise_params(9.0).unwrap();
        let a = run_trial(&cfg, &c, &p, 5, TrialOptions::default()).unwrap();
        let b = run_trial(&cfg, &c, &p, 5, TrialOptions::default()).unwrap();
        let other = run_trial(&cfg, &c, &p, 6, TrialOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.errors > 0);
        assert_ne!(a.errors, other.errors);
    }
}
