//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::TAU;
use std::process::Command;
use std::time::{Duration, Instant};

use poltrack_core::algebra::*;
use poltrack_core::channel::{init_channel, sop_from_direction, NoiseParams};
use poltrack_core::constellation::{Constellation, Format};
use poltrack_core::rng::RngStream;
use poltrack_core::tracker::*;
use poltrack_sim::config::{Algorithm, ConfigOverrides, ExperimentConfig};
use poltrack_sim::experiments::{self, run_trials, window_mean, Axis, SerPoint};
use poltrack_sim::opcount::{audit, decision_comparisons};
use poltrack_sim::trial::TrialOptions;
use statrs::distribution::{ContinuousCDF, Normal};

const DRAWS: usize = 10_000;
const GRADIENT_STATES: usize = 100;
const FD_STEP: f64 = 1e-6;
const GRADIENT_REL_TOL: f64 = 1e-6;
const EQUIV_SYMBOLS: usize = 10_000;
const EQUIV_TOL: f64 = 1e-10;
const CALIBRATION_SYMBOLS: u64 = 1_000_000;
const CALIBRATION_SIGMAS: f64 = 3.0;
const DEMO_TRIALS: u64 = 100;
const DEMO_MIN_CLEAN: u64 = 95;
const DEMO_MAX_SER: f64 = 5e-3;
const SPOT_MAX_SER: f64 = 2e-3;
const SPOT_SEEDS: u64 = 10;
const SPOT_SYMBOLS: u64 = 100_000;
const CONVERGENCE_REALIZATIONS: u64 = 1000;
const CONVERGENCE_FACTOR: f64 = 2.0;
const ORDER_TRIALS: u64 = 10;
const MAX_OPS: f64 = 400.0;
const OPS_TREND_TOL: f64 = 0.15;
const PM16_DECISION_COMPARISONS: f64 = 12.0;

type Check = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_sop(rng: &mut RngStream, span: f64) -> SopVector {
    SopVector::new(span * (2.0 * rng.uniform() - 1.0), span * (2.0 * rng.uniform() - 1.0), span * (2.0 * rng.uniform() - 1.0))
}

fn random_jones(rng: &mut RngStream, sd: f64) -> JonesVector {
    JonesVector::new(Complex::new(rng.normal(sd), rng.normal(sd)), Complex::new(rng.normal(sd), rng.normal(sd)))
}

fn random_unitary(rng: &mut RngStream) -> JonesMatrix {
    let g = [rng.standard_normal(), rng.standard_normal(), rng.standard_normal(), rng.standard_normal()];
    jones_combined(TAU * rng.uniform(), &sop_from_direction(g))
}

fn c1_algebra() -> Outcome {
    let mut rng = RngStream::new(101, 0);
    let mut worst = [0.0f64; 6];
    let i = Complex::new(0.0, 1.0);
    for _ in 0..DRAWS {
        let theta = 20.0 * rng.uniform() - 10.0;
        let a = random_sop(&mut rng, 10.0);
        let b = random_sop(&mut rng, 10.0);
        let x = random_jones(&mut rng, 1.0);
        let u = jones_combined(theta, &a);
        worst[0] = worst[0].max(u.unitarity_deviation());
        let m = mueller_from_sop(&a);
        worst[1] = worst[1].max(m.orthogonality_deviation()).max((m.det() - 1.0).abs());
        let r = rot4_from_params(theta, &a);
        worst[2] = worst[2].max(r.orthogonality_deviation()).max((r.det() - 1.0).abs());
        let s_lhs = stokes_from_jones(&(jones_from_sop(&a) * x));
        worst[3] = worst[3].max(s_lhs.max_abs_diff(&(m * stokes_from_jones(&x))));
        let v_lhs = vec4_from_jones(&(u * x));
        worst[4] = worst[4].max((v_lhs - r * vec4_from_jones(&x)).norm_sqr().sqrt());
        let dot = a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2];
        let cross = StokesVector(a.0).cross(&StokesVector(b.0));
        let rhs = JonesMatrix::identity().scale_real(dot) + pauli_combination(&cross.0).scale_complex(i);
        let rel = (pauli_combination(&a.0) * pauli_combination(&b.0)).max_abs_diff(&rhs) / (1.0 + dot.abs());
        worst[5] = worst[5].max(rel);
    }
    let limits = [1e-12, 1e-12, 1e-12, 1e-10, 1e-10, 1e-12];
    let pass = worst.iter().zip(limits).all(|(w, l)| *w < l);
    outcome(pass, format!("worst deviations {} over {DRAWS} draws each", sci(&worst)))
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join("/")
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    diff / b.iter().map(|y| y * y).sum::<f64>().sqrt()
}

fn fd_gradient(f: impl Fn([f64; 4]) -> f64) -> [f64; 4] {
    std::array::from_fn(|k| {
        let (mut p, mut m) = ([0.0; 4], [0.0; 4]);
        p[k] = FD_STEP;
        m[k] = -FD_STEP;
        (f(p) - f(m)) / (2.0 * FD_STEP)
    })
}

fn c2_gradients() -> Outcome {
    let c = Constellation::new(Format::Pm16Qam);
    let mut rng = RngStream::new(102, 0);
    let sop = |p: &[f64; 4]| SopVector::new(p[1], p[2], p[3]);
    let mut worst = [0.0f64; 3];
    for _ in 0..GRADIENT_STATES {
        let t = random_unitary(&mut rng);
        let y = t * *c.point(rng.below(c.size())) + random_jones(&mut rng, 0.05);
        let off = jones_combined(rng.normal(0.05), &random_sop(&mut rng, 0.1));
        let h = t.adjoint() * off;

        let s = jones_step(&h, &y, &c, -2.0, -2.0, true);
        let x_hat = *c.point(s.index);
        let g = fd_gradient(|p| (h * jones_combined(-p[0], &-sop(&p)) * y - x_hat).norm_sqr());
        let analytic = [s.theta, s.alpha.0[0], s.alpha.0[1], s.alpha.0[2]];
        worst[0] = worst[0].max(rel_err(&analytic, &g.map(|v| -v)));

        let m_inv = mueller_from_jones(&h);
        let s_y = stokes_from_jones(&y);
        let (idx, alpha) = stokes_update(&m_inv, &s_y, &c, 1.0);
        let s_hat = c.stokes_points()[idx];
        let g = fd_gradient(|p| (m_inv * (mueller_from_sop(&-sop(&p)) * s_y) - s_hat).norm_sqr());
        worst[1] = worst[1].max(rel_err(&alpha.0, &[-g[1], -g[2], -g[3]]));

        let r_inv = embed_jones(&h);
        let v_y = vec4_from_jones(&y);
        let (idx, theta, alpha) = rot4_update(&r_inv, &v_y, &c, 1.0, 1.0, true);
        let x4 = vec4_from_jones(c.point(idx));
        let g = fd_gradient(|p| (r_inv * (rot4_from_params(-p[0], &-sop(&p)) * v_y) - x4).norm_sqr());
        let analytic = [theta, alpha.0[0], alpha.0[1], alpha.0[2]];
        worst[2] = worst[2].max(rel_err(&analytic, &g.map(|v| -v)));
    }
    let pass = worst.iter().all(|w| *w < GRADIENT_REL_TOL);
    outcome(pass, format!("max relative error jones/stokes/4d {}, {GRADIENT_STATES} states each", sci(&worst)))
}

fn c3_equivalence() -> Outcome {
    let c = Constellation::new(Format::Pm16Qam);
    let p = NoiseParams::from_normalized(1e-4, 1e-5, 1.0 / 28e9, 1.0, 22.0).unwrap();
    let mut ch = init_channel(p, RngStream::new(103, 0)).unwrap();
    let mut src = RngStream::new(103, 1);
    let steps = StepParams::known_channel(400.0);
    let h0 = ch.t_matrix().adjoint();
    let mut jt = TrackerState::new(h0, steps, &p, 1.0).unwrap();
    let mut rt = Rot4TrackerState::new(embed_jones(&h0), steps, &p, 1.0).unwrap();
    let (mut mismatches, mut worst) = (0, 0.0f64);
    for _ in 0..EQUIV_SYMBOLS {
        let y = ch.transmit(c.point(src.below(c.size())));
        ch.step();
        let a = jt.step(&y, &c);
        let b = rt.step(&vec4_from_jones(&y), &c);
        mismatches += usize::from(a.index != b.index);
        worst = worst.max((a.theta - b.theta).abs());
        for k in 0..3 {
            worst = worst.max((a.alpha.0[k] - b.alpha.0[k]).abs());
        }
    }
    outcome(
        mismatches == 0 && worst < EQUIV_TOL,
        format!("{mismatches} decision mismatches, max parameter gap {worst:.1e} over {EQUIV_SYMBOLS} symbols"),
    )
}

fn config(o: ConfigOverrides) -> ExperimentConfig {
    ExperimentConfig::resolve(o).expect("valid acceptance config")
}

fn totals(cfg: &ExperimentConfig) -> SerPoint {
    let outs = run_trials(cfg, TrialOptions::default()).expect("trials run");
    let errors = outs.iter().map(|o| o.errors).sum();
    let symbols = outs.iter().map(|o| o.counted).sum();
    SerPoint {
        axis: Axis::Snr,
        value: 0.0,
        ser: errors as f64 / symbols as f64,
        ci95: experiments::binomial_ci95(errors, symbols),
        errors,
        symbols,
        trials: outs.len() as u64,
        cycle_slips: outs.iter().filter(|o| o.cycle_slip).count() as u64,
    }
}

/// Differentially decoded PM-QPSK 4D SER at `E_s/N0 = snr` (linear, `E_s = 1`).
fn pm_qpsk_ser(snr: f64) -> f64 {
    let q = 1.0 - Normal::standard().cdf((snr / 2.0).sqrt());
    let p_dd = 1.0 - ((1.0 - q).powi(4) + 2.0 * q * q * (1.0 - q).powi(2) + q.powi(4));
    1.0 - (1.0 - p_dd).powi(2)
}

fn snr_for_ser(target: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 30.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pm_qpsk_ser(10f64.powf(mid / 10.0)) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c4_calibration() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for target in [1e-2, 1e-3] {
        let snr_db = snr_for_ser(target);
        let cfg = config(ConfigOverrides {
            format: Some("PM-QPSK".into()),
            snr_db: Some(format!("{snr_db}")),
            delta_nu_hz: Some(0.0),
            delta_p_hz: Some(0.0),
            freeze_tracker: Some(true),
            symbols: Some(CALIBRATION_SYMBOLS / 10),
            trials: Some(10),
            seed: Some(104),
            ..Default::default()
        });
        let p = totals(&cfg);
        let sigma = (target * (1.0 - target) / p.symbols as f64).sqrt();
        let z = (p.ser - target) / sigma;
        pass &= z.abs() <= CALIBRATION_SIGMAS;
        parts.push(format!("SER {target:.0e} at {snr_db:.3} dB: measured {:.4e} ({z:+.2} sigma)", p.ser));
    }
    outcome(pass, parts.join("; "))
}

fn c5_tracking_demo() -> Outcome {
    let cfg = config(ConfigOverrides {
        format: Some("PM-16-QAM".into()),
        delta_nu_hz: Some(1e6),
        delta_p_hz: Some(1e3),
        baud: Some(28e9),
        symbols: Some(100_000),
        trials: Some(DEMO_TRIALS),
        seed: Some(105),
        ..Default::default()
    });
    let outs = run_trials(&cfg, TrialOptions::default()).expect("trials run");
    let clean = outs.iter().filter(|o| !o.cycle_slip).count() as u64;
    let worst = outs
        .iter()
        .filter(|o| !o.cycle_slip)
        .map(|o| o.errors as f64 / o.counted as f64)
        .fold(0.0, f64::max);
    outcome(
        clean >= DEMO_MIN_CLEAN && worst <= DEMO_MAX_SER,
        format!("{clean}/{DEMO_TRIALS} trials without cycle slip, worst trial SER {worst:.2e}"),
    )
}

fn spot(format: &str, dnu_t: f64, dp_t: f64) -> SerPoint {
    let baud = 28e9;
    totals(&config(ConfigOverrides {
        format: Some(format.into()),
        delta_nu_hz: Some(dnu_t * baud),
        delta_p_hz: Some(dp_t * baud),
        baud: Some(baud),
        symbols: Some(SPOT_SYMBOLS),
        trials: Some(SPOT_SEEDS),
        seed: Some(106),
        ..Default::default()
    }))
}

fn c6_table_spots() -> Outcome {
    let a = spot("PM-QPSK", 3.6e-5, 1.17e-4);
    let b = spot("PM-16-QAM", 1.35e-4, 3.57e-8);
    outcome(
        a.ser <= SPOT_MAX_SER && b.ser <= SPOT_MAX_SER,
        format!(
            "(a) PM-QPSK SER {:.3e} ({} errors), (b) PM-16-QAM SER {:.3e} ({} errors), limit {SPOT_MAX_SER:.0e}",
            a.ser, a.errors, b.ser, b.errors
        ),
    )
}

fn c7_convergence() -> Outcome {
    let cfg = config(ConfigOverrides {
        format: Some("PM-16-QAM".into()),
        known_initial_channel: Some(false),
        warmup: Some(0),
        symbols: Some(10_000),
        trials: Some(CONVERGENCE_REALIZATIONS),
        seed: Some(107),
        ..Default::default()
    });
    let rows = experiments::convergence(&cfg).expect("convergence run");
    let early = window_mean(&rows, 2500, 3000);
    let steady = window_mean(&rows, 9500, 10_000);
    outcome(
        early <= CONVERGENCE_FACTOR * steady,
        format!("SER k in (2500,3000] {early:.3e}, k in (9500,10000] {steady:.3e}, {CONVERGENCE_REALIZATIONS} realizations"),
    )
}

fn c8_ordering() -> Outcome {
    let run = |a: Algorithm| {
        totals(&config(ConfigOverrides {
            format: Some("PM-16-QAM".into()),
            algorithm: Some(a),
            delta_p_hz: Some(1e-5 * 28e9),
            symbols: Some(SPOT_SYMBOLS),
            trials: Some(ORDER_TRIALS),
            seed: Some(108),
            ..Default::default()
        }))
    };
    let proposed = run(Algorithm::ProposedJones);
    let mut pass = true;
    let mut parts = vec![format!("proposed {:.3e}", proposed.ser)];
    for a in [Algorithm::Kabsch, Algorithm::CmaBps] {
        let other = run(a);
        let verdict = if proposed.upper() < other.lower() {
            "better"
        } else if proposed.lower() > other.upper() {
            pass = false;
            "inverted"
        } else {
            "inconclusive"
        };
        parts.push(format!("{a} {:.3e} ({verdict})", other.ser));
    }
    outcome(pass, parts.join(", "))
}

fn c9_op_audit() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [1, 4, 16] {
        let row = audit(Format::Pm16Qam, p, 4096, 109).expect("audit runs");
        let dev = (row.ops - row.reference) / row.reference;
        pass &= dev.abs() <= OPS_TREND_TOL;
        if p == 1 {
            pass &= row.ops <= MAX_OPS;
        }
        parts.push(format!("P={p}: {} ops vs {} ({:+.1}%)", row.ops, row.reference, 100.0 * dev));
    }
    let cmp = decision_comparisons(Format::Pm16Qam, 4096, 109);
    pass &= cmp == PM16_DECISION_COMPARISONS;
    parts.push(format!("PM-16-QAM decision comparisons {cmp}"));
    outcome(pass, parts.join("; "))
}

fn cli(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_poltrack"))
        .args(args)
        .args(["--threads", threads])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}", out.status));
    }
    Ok(out.stdout)
}

fn c10_determinism() -> Outcome {
    let runs: [&[&str]; 8] = [
        &["track-demo", "--symbols", "3000", "--every", "100", "--seed", "5"],
        &["sweep-pol", "--format", "PM-QPSK", "--symbols", "2000", "--trials", "6", "--grid", "1e-5,8e-5"],
        &["sweep-lw", "--format", "PS-QPSK", "--symbols", "2000", "--trials", "6", "--grid", "1e-4,1e-3"],
        &["sweep-snr", "--format", "PM-QPSK", "--algorithm", "kabsch", "--symbols", "2000", "--trials", "5", "--grid", "7,9"],
        &["converge", "--format", "PM-QPSK", "--symbols", "1000", "--trials", "12"],
        &["tolerance-1db", "--axis", "pol", "--format", "PM-QPSK", "--symbols", "1000", "--trials", "4"],
        &["op-audit", "--symbols", "256"],
        &["dump-constellation", "--format", "PM-64-QAM"],
    ];
    let mut failures = Vec::new();
    for args in runs {
        match (cli(args, "1"), cli(args, "4")) {
            (Ok(a), Ok(b)) if a == b && !a.is_empty() => {}
            (Ok(_), Ok(_)) => failures.push(format!("{} differs", args[0])),
            (Err(e), _) | (_, Err(e)) => failures.push(e),
        }
    }
    let detail = if failures.is_empty() {
        format!("{} subcommands byte-identical with 1 and 4 worker threads", runs.len())
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn main() {
    let checks: [Check; 10] = [
        ("algebra invariants", c1_algebra, Duration::from_secs(10)),
        ("gradient oracle", c2_gradients, Duration::from_secs(5)),
        ("Jones/4D equivalence", c3_equivalence, Duration::MAX),
        ("AWGN calibration", c4_calibration, Duration::from_secs(120)),
        ("tracking demo without cycle slips", c5_tracking_demo, Duration::from_secs(300)),
        ("tolerance spot checks", c6_table_spots, Duration::MAX),
        ("blind convergence", c7_convergence, Duration::from_secs(600)),
        ("SOP drift ordering", c8_ordering, Duration::MAX),
        ("operation count audit", c9_op_audit, Duration::MAX),
        ("CLI determinism", c10_determinism, Duration::MAX),
    ];
    let mut failed = 0;
    for (n, (name, check, limit)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let mut o = check();
        let took = start.elapsed();
        if took > limit {
            o.pass = false;
            o.detail.push_str(&format!("; exceeded {:.0} s limit", limit.as_secs_f64()));
        }
        failed += usize::from(!o.pass);
        println!(
            "{} criterion {:>2} {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            n + 1,
            o.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
