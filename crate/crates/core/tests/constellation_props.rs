mod common;

use poltrack_core::algebra::{stokes_from_jones, Complex, JonesVector};
use poltrack_core::constellation::*;
use poltrack_core::rng::RngStream;
use proptest::prelude::*;

fn format() -> impl Strategy<Value = Format> {
    prop::sample::select(vec![Format::PsQpsk, Format::PmQpsk, Format::Pm16Qam, Format::Pm64Qam])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn slicer_matches_exhaustive(f in format(), v in prop::array::uniform4(-1.2f64..1.2)) {
        let c = Constellation::new(f);
        let z = JonesVector::new(Complex::new(v[0], v[1]), Complex::new(v[2], v[3]));
        prop_assert_eq!(c.decide(&z).0, c.decide_exhaustive(&z));
    }

    #[test]
    fn decision_is_argmin(f in format(), v in prop::array::uniform4(-1.2f64..1.2)) {
        let c = Constellation::new(f);
        let z = JonesVector::new(Complex::new(v[0], v[1]), Complex::new(v[2], v[3]));
        let (_, p) = c.decide(&z);
        let d = (z - p).norm_sqr();
        prop_assert!(c.points().iter().all(|q| (z - *q).norm_sqr() >= d));
    }

    #[test]
    fn differential_round_trip(f in format(), src in prop::collection::vec(0usize..4096, 1..200)) {
        let c = Constellation::new(f);
        let src: Vec<usize> = src.iter().map(|s| s % c.size()).collect();
        prop_assert_eq!(diff_decode(&c, &diff_encode(&c, &src)), src);
    }

    #[test]
    fn stokes_decision_is_nearest(f in format(), v in prop::array::uniform3(-1.5f64..1.5)) {
        let c = Constellation::new(f);
        let s = poltrack_core::algebra::StokesVector(v);
        let (_, p) = c.decide_stokes(&s);
        let d = (s - p).norm_sqr();
        prop_assert!(c.stokes_points().iter().all(|q| (s - *q).norm_sqr() >= d));
    }
}

#[test]
fn pm256_slicer_on_random_draws() {
    let c = Constellation::new(Format::Pm256Qam);
    let mut rng = RngStream::new(5, 0);
    for _ in 0..200 {
        let z = common::random_jones(&mut rng, 0.4);
        assert_eq!(c.decide(&z).0, c.decide_exhaustive(&z));
    }
}

#[test]
fn energy_and_stokes_invariants() {
    for f in Format::ALL {
        let c = Constellation::new(f);
        let es = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.size() as f64;
        assert!((es - c.es()).abs() < 1e-12);
        assert!(c.stokes_points().len() <= c.size());
        for (i, p) in c.points().iter().enumerate() {
            let s = stokes_from_jones(p);
            assert!(s.max_abs_diff(&c.stokes_points()[c.stokes_index_of(i)]) < 1e-9);
        }
    }
    let pm_sizes = [(Format::PmQpsk, 2usize), (Format::Pm16Qam, 4), (Format::Pm64Qam, 8), (Format::Pm256Qam, 16)];
    for (f, l) in pm_sizes {
        assert_eq!(Constellation::new(f).size(), l.pow(4));
    }
}

/// Independent per-polarization errors at rate p combine to `1 − (1 − p)²`.
#[test]
fn four_d_ser_combines_polarizations() {
    let c = Constellation::new(Format::Pm16Qam);
    let p = 0.05;
    let n = 200_000;
    let mut rng = RngStream::new(9, 1);
    let mut tx = Vec::with_capacity(n);
    let mut rx = Vec::with_capacity(n);
    for _ in 0..n {
        let s = rng.below(c.size());
        let (sx, sy) = (s / 16, s % 16);
        let flip = |v: usize, r: &mut RngStream| if r.uniform() < p { (v + 1 + r.below(15)) % 16 } else { v };
        let (ex, ey) = (flip(sx, &mut rng), flip(sy, &mut rng));
        tx.push(s);
        rx.push(ex * 16 + ey);
    }
    let ser = count_ser(&tx, &rx).unwrap();
    let expected = 1.0 - (1.0 - p) * (1.0 - p);
    assert!((ser - expected).abs() < 3.0 * common::binomial_sigma(expected, n), "{ser} vs {expected}");
}
