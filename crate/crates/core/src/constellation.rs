//! 4D modulation formats, minimum-distance decisions and Stokes images.
//!
//! Symbol indices are laid out so that differential coding can act on them
//! directly:
//!
//! * PM-M-QAM: `index = s_x · M₂ + s_y` where each per-polarization label is
//!   `s = q · (M₂/4) + l`; `q ∈ 0..4` is the quadrant (counter-clockwise from
//!   the first) and `l` a Gray label inside the quadrant. The point with
//!   label `(q, l)` is the quadrant-0 point with label `l` rotated by `i^q`,
//!   so a rotation by `i` maps `(q, l) → (q + 1, l)`.
//! * PS-QPSK: `index = b · 4 + q`; `b` selects the active polarization and
//!   the active component is `e^{iπ/4} i^q`.
//!
//! All formats are normalized to `E_s = 1`.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::algebra::{stokes_from_jones, Complex, JonesVector, StokesVector};
use crate::error::Error;
use crate::scalar::{math, Real};

/// Stokes images are merged when equal after rounding to this many steps
/// per unit.
const STOKES_GRID: f64 = 1e9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Format {
    PsQpsk,
    PmQpsk,
    Pm16Qam,
    Pm64Qam,
    Pm256Qam,
}

impl Format {
    pub const ALL: [Format; 5] = [Format::PsQpsk, Format::PmQpsk, Format::Pm16Qam, Format::Pm64Qam, Format::Pm256Qam];

    pub fn name(self) -> &'static str {
        match self {
            Format::PsQpsk => "PS-QPSK",
            Format::PmQpsk => "PM-QPSK",
            Format::Pm16Qam => "PM-16-QAM",
            Format::Pm64Qam => "PM-64-QAM",
            Format::Pm256Qam => "PM-256-QAM",
        }
    }

    /// Levels per I/Q rail for the polarization-multiplexed square formats.
    pub fn rail_levels(self) -> Option<usize> {
        match self {
            Format::PsQpsk => None,
            Format::PmQpsk => Some(2),
            Format::Pm16Qam => Some(4),
            Format::Pm64Qam => Some(8),
            Format::Pm256Qam => Some(16),
        }
    }

    pub fn is_pol_switched(self) -> bool {
        self == Format::PsQpsk
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key: alloc::string::String =
            s.chars().filter(|c| !matches!(c, '-' | '_' | ' ')).flat_map(|c| c.to_uppercase()).collect();
        match key.as_str() {
            "PSQPSK" => Ok(Format::PsQpsk),
            "PMQPSK" | "DPQPSK" => Ok(Format::PmQpsk),
            "PM16QAM" => Ok(Format::Pm16Qam),
            "PM64QAM" => Ok(Format::Pm64Qam),
            "PM256QAM" => Ok(Format::Pm256Qam),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
enum Slicer {
    Square {
        levels: usize,
        /// Decision thresholds on one rail, ascending.
        thresholds: Vec<f64>,
        /// `[level_i · levels + level_q] → per-polarization label`.
        label_of_levels: Vec<usize>,
    },
    PolSwitched,
}

/// Per-polarization decomposition of a symbol index, used by the
/// differential codec.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolParts {
    /// Quadrant per polarization (PS-QPSK: only `[0]` is meaningful).
    pub quadrant: [usize; 2],
    /// Intra-quadrant label per polarization (PS-QPSK: `[0]` is the
    /// polarization-select bit).
    pub rest: [usize; 2],
}

#[derive(Clone, Debug)]
pub struct Constellation {
    format: Format,
    points: Vec<JonesVector>,
    es: f64,
    mma_radii: Vec<f64>,
    pol_points: Vec<Complex>,
    stokes_points: Vec<StokesVector>,
    stokes_of_point: Vec<usize>,
    slicer: Slicer,
}

pub fn build_constellation(name: &str) -> Result<Constellation, Error> {
    Ok(Constellation::new(name.parse()?))
}

#[cfg(test)]
fn gray(n: usize) -> usize {
    n ^ (n >> 1)
}

fn gray_inverse(mut g: usize) -> usize {
    let mut n = g;
    while g > 1 {
        g >>= 1;
        n ^= g;
    }
    n
}

/// `i^q · z`.
fn rotate_quadrant(z: Complex, q: usize) -> Complex {
    match q % 4 {
        0 => z,
        1 => Complex::new(-z.im, z.re),
        2 => -z,
        _ => Complex::new(z.im, -z.re),
    }
}

fn dedup_push(list: &mut Vec<f64>, v: f64) {
    if !list.iter().any(|r| (r - v).abs() < 1e-9) {
        list.push(v);
    }
}

impl Constellation {
    pub fn new(format: Format) -> Self {
        let (points, pol_points, slicer) = match format.rail_levels() {
            Some(levels) => Self::build_square(levels),
            None => Self::build_pol_switched(),
        };
        let es = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;

        let mut mma_radii = Vec::new();
        for p in &points {
            dedup_push(&mut mma_radii, p.x.norm());
            dedup_push(&mut mma_radii, p.y.norm());
        }
        mma_radii.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut stokes_points: Vec<StokesVector> = Vec::new();
        let mut stokes_of_point = Vec::with_capacity(points.len());
        let mut seen = BTreeMap::new();
        for p in &points {
            let s = stokes_from_jones(p);
            let key = s.0.map(|v| math::round(v * STOKES_GRID) as i64);
            let pos = *seen.entry(key).or_insert_with(|| {
                stokes_points.push(s);
                stokes_points.len() - 1
            });
            stokes_of_point.push(pos);
        }

        Self { format, points, es, mma_radii, pol_points, stokes_points, stokes_of_point, slicer }
    }

    fn build_square(levels: usize) -> (Vec<JonesVector>, Vec<Complex>, Slicer) {
        let m2 = levels * levels;
        let per_quadrant = m2 / 4;
        let half = levels / 2;
        // Mean energy of the odd-integer grid per polarization is 2(L²−1)/3.
        let grid_energy = 2.0 * (levels * levels - 1) as f64 / 3.0;
        let scale = math::sqrt(0.5 / grid_energy);

        let mut pol_points = Vec::with_capacity(m2);
        let mut label_of_levels = alloc::vec![0usize; m2];
        for s in 0..m2 {
            let q = s / per_quadrant;
            let l = s % per_quadrant;
            let i_pos = gray_inverse(l / half);
            let q_pos = gray_inverse(l % half);
            let base = Complex::new((2 * i_pos + 1) as f64, (2 * q_pos + 1) as f64);
            let grid = rotate_quadrant(base, q);
            let level = |a: f64| ((a + (levels - 1) as f64) / 2.0) as usize;
            label_of_levels[level(grid.re) * levels + level(grid.im)] = s;
            pol_points.push(grid * scale);
        }

        let mut points = Vec::with_capacity(m2 * m2);
        for sx in 0..m2 {
            for sy in 0..m2 {
                points.push(JonesVector::new(pol_points[sx], pol_points[sy]));
            }
        }
        let thresholds = (0..levels - 1).map(|j| (2.0 * j as f64 - levels as f64 + 2.0) * scale).collect();
        (points, pol_points, Slicer::Square { levels, thresholds, label_of_levels })
    }

    fn build_pol_switched() -> (Vec<JonesVector>, Vec<Complex>, Slicer) {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let zero = Complex::new(0.0, 0.0);
        let qpsk: Vec<Complex> = (0..4).map(|q| rotate_quadrant(Complex::new(h, h), q)).collect();
        let mut points = Vec::with_capacity(8);
        for b in 0..2 {
            for &c in &qpsk {
                points.push(if b == 0 { JonesVector::new(c, zero) } else { JonesVector::new(zero, c) });
            }
        }
        let mut pol_points = alloc::vec![zero];
        pol_points.extend(qpsk);
        (points, pol_points, Slicer::PolSwitched)
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[JonesVector] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &JonesVector {
        &self.points[index]
    }

    /// `E_s = (1/M) Σ ‖c‖²`.
    pub fn es(&self) -> f64 {
        self.es
    }

    /// Distinct per-polarization moduli, ascending.
    pub fn mma_radii(&self) -> &[f64] {
        &self.mma_radii
    }

    /// Distinct values one polarization component can take (for PS-QPSK this
    /// includes zero).
    pub fn pol_points(&self) -> &[Complex] {
        &self.pol_points
    }

    /// Distinct Stokes images `S_c = cᴴσc`.
    pub fn stokes_points(&self) -> &[StokesVector] {
        &self.stokes_points
    }

    /// Index into [`stokes_points`](Self::stokes_points) of each symbol's image.
    pub fn stokes_index_of(&self, index: usize) -> usize {
        self.stokes_of_point[index]
    }

    /// Number of comparisons one [`decide`](Self::decide) performs.
    pub fn decision_comparisons(&self) -> usize {
        match &self.slicer {
            Slicer::Square { levels, .. } => 4 * (levels - 1),
            Slicer::PolSwitched => self.points.len() - 1,
        }
    }

    /// Minimum-distance decision; ties go to the lowest index.
    pub fn decide(&self, z: &JonesVector) -> (usize, JonesVector) {
        let i = self.decide_index(z);
        (i, self.points[i])
    }

    /// Minimum-distance decision in any scalar type.
    ///
    /// PM formats slice each rail against its thresholds; PS-QPSK picks the
    /// largest of the eight correlations (all points have equal energy).
    pub fn decide_index<S: Real>(&self, z: &JonesVector<S>) -> usize {
        match &self.slicer {
            Slicer::Square { levels, thresholds, label_of_levels } => {
                let rails = [z.x.re, z.x.im, z.y.re, z.y.im];
                // Exact ties on a threshold are resolved by the exhaustive
                // rule; this inspects values and costs no arithmetic.
                if rails.iter().any(|v| thresholds.contains(&v.to_f64())) {
                    return self.decide_exhaustive(&z.cast());
                }
                let lv = rails.map(|v| thresholds.iter().filter(|&&t| v > S::from_f64(t)).count());
                let m2 = levels * levels;
                label_of_levels[lv[0] * levels + lv[1]] * m2 + label_of_levels[lv[2] * levels + lv[3]]
            }
            Slicer::PolSwitched => {
                let (sx, dx) = (z.x.re + z.x.im, z.x.re - z.x.im);
                let (sy, dy) = (z.y.re + z.y.im, z.y.re - z.y.im);
                let metrics = [sx, -dx, -sx, dx, sy, -dy, -sy, dy];
                let mut best = 0;
                for (i, m) in metrics.iter().enumerate().skip(1) {
                    if *m > metrics[best] {
                        best = i;
                    }
                }
                best
            }
        }
    }

    /// Brute-force argmin of `‖z − c‖²`, lowest index on ties.
    pub fn decide_exhaustive(&self, z: &JonesVector) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.points.iter().enumerate() {
            let d = (*z - *c).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Nearest Stokes image (exhaustive, lowest index on ties).
    pub fn decide_stokes(&self, s: &StokesVector) -> (usize, StokesVector) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.stokes_points.iter().enumerate() {
            let d = (*s - *c).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        (best, self.stokes_points[best])
    }

    /// Nearest per-polarization value and its squared distance.
    pub fn nearest_pol_point(&self, z: Complex) -> (usize, f64) {
        let best = match &self.slicer {
            Slicer::Square { levels, thresholds, label_of_levels } => {
                let li = thresholds.iter().filter(|&&t| z.re > t).count();
                let lq = thresholds.iter().filter(|&&t| z.im > t).count();
                label_of_levels[li * levels + lq]
            }
            Slicer::PolSwitched => {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (i, c) in self.pol_points.iter().enumerate() {
                    let d = (z - c).norm_sqr();
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                best
            }
        };
        (best, (z - self.pol_points[best]).norm_sqr())
    }

    /// Splits an index into quadrants and intra-quadrant labels.
    pub fn parts(&self, index: usize) -> SymbolParts {
        match self.format.rail_levels() {
            Some(levels) => {
                let m2 = levels * levels;
                let per_quadrant = m2 / 4;
                let (sx, sy) = (index / m2, index % m2);
                SymbolParts {
                    quadrant: [sx / per_quadrant, sy / per_quadrant],
                    rest: [sx % per_quadrant, sy % per_quadrant],
                }
            }
            None => SymbolParts { quadrant: [index % 4, 0], rest: [index / 4, 0] },
        }
    }

    /// Inverse of [`parts`](Self::parts).
    pub fn index_of(&self, parts: &SymbolParts) -> usize {
        match self.format.rail_levels() {
            Some(levels) => {
                let m2 = levels * levels;
                let per_quadrant = m2 / 4;
                let sx = parts.quadrant[0] * per_quadrant + parts.rest[0];
                let sy = parts.quadrant[1] * per_quadrant + parts.rest[1];
                sx * m2 + sy
            }
            None => parts.rest[0] * 4 + parts.quadrant[0],
        }
    }

    /// Symbol obtained by rotating each polarization of `index` by `i^q`.
    pub fn rotated_index(&self, index: usize, q: [usize; 2]) -> usize {
        let mut p = self.parts(index);
        if self.format.is_pol_switched() {
            let active = p.rest[0];
            p.quadrant[0] = (p.quadrant[0] + q[active]) % 4;
        } else {
            p.quadrant[0] = (p.quadrant[0] + q[0]) % 4;
            p.quadrant[1] = (p.quadrant[1] + q[1]) % 4;
        }
        self.index_of(&p)
    }
}

/// Differential quadrant encoder.
///
/// PM formats: each polarization's quadrant is sent as the running sum of
/// source quadrants; the intra-quadrant label is sent as is. PS-QPSK: the
/// quadrant is accumulated across symbols regardless of which polarization
/// is active, and the polarization bit is absolute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiffEncoder {
    prev: [usize; 2],
}

impl DiffEncoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn encode(&mut self, c: &Constellation, source: usize) -> usize {
        let mut p = c.parts(source);
        let lanes = if c.format().is_pol_switched() { 1 } else { 2 };
        for i in 0..lanes {
            p.quadrant[i] = (self.prev[i] + p.quadrant[i]) % 4;
            self.prev[i] = p.quadrant[i];
        }
        c.index_of(&p)
    }
}

/// Inverse of [`DiffEncoder`]: `q_src = q̂_k − q̂_{k−1} (mod 4)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiffDecoder {
    prev: [usize; 2],
}

impl DiffDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn decode(&mut self, c: &Constellation, decided: usize) -> usize {
        let mut p = c.parts(decided);
        let lanes = if c.format().is_pol_switched() { 1 } else { 2 };
        for i in 0..lanes {
            let q = p.quadrant[i];
            p.quadrant[i] = (q + 4 - self.prev[i]) % 4;
            self.prev[i] = q;
        }
        c.index_of(&p)
    }
}

pub fn diff_encode(c: &Constellation, source: &[usize]) -> Vec<usize> {
    let mut enc = DiffEncoder::new();
    source.iter().map(|&s| enc.encode(c, s)).collect()
}

pub fn diff_decode(c: &Constellation, decided: &[usize]) -> Vec<usize> {
    let mut dec = DiffDecoder::new();
    decided.iter().map(|&s| dec.decode(c, s)).collect()
}

/// Fraction of positions where the 4D symbols differ.
pub fn count_ser(tx: &[usize], rx: &[usize]) -> Result<f64, Error> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch(tx.len(), rx.len()));
    }
    if tx.is_empty() {
        return Ok(0.0);
    }
    let errors = tx.iter().zip(rx).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / tx.len() as f64)
}
