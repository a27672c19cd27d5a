//! Families of mutually disjoint unit-energy constellations used as subset
//! identifiers: rotated M-PSK and Ungerboeck cosets of square QAM.
//!
//! Points are stored by bit label, so `member.point(bits)` is the symbol a
//! `log2 M`-bit word maps to. Labels are Gray coded.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{format_sig, norm_sqr, Real};

/// Binary-reflected Gray code.
pub fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

pub fn gray_inverse(mut g: usize) -> usize {
    let mut i = g;
    while g > 1 {
        g >>= 1;
        i ^= g;
    }
    i
}

/// One M-ary alphabet, indexed by bit label.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<T> {
    points: Vec<Complex<T>>,
}

impl<T: Real> Constellation<T> {
    pub fn new(points: Vec<Complex<T>>) -> Result<Self> {
        if points.len() < 2 || !points.len().is_power_of_two() {
            return Err(Error::Constellation(format!(
                "size {} is not a power of two >= 2",
                points.len()
            )));
        }
        if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::Constellation("non-finite point".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn point(&self, label: usize) -> Complex<T> {
        self.points[label]
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.points.len().trailing_zeros()
    }

    pub fn mean_energy(&self) -> T {
        self.points.iter().map(|&p| norm_sqr(p)).sum::<T>() / T::from_usize_lossy(self.points.len())
    }

    pub fn min_distance(&self) -> T {
        let mut best = T::infinity();
        for (i, &a) in self.points.iter().enumerate() {
            for &b in &self.points[i + 1..] {
                best = best.min(norm_sqr(a - b));
            }
        }
        best.sqrt()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self { points: self.points.iter().map(|&p| p * factor).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// M-PSK rotated by multiples of `2 pi / (M * slots)`.
    Psk { slots: usize },
    /// Cosets of a unit-energy square QAM after `levels` binary splits.
    Qam { parent: usize, levels: u32 },
}

/// K pairwise-disjoint constellations of equal order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationFamily<T> {
    members: Vec<Constellation<T>>,
    kind: FamilyKind,
}

impl<T: Real> ConstellationFamily<T> {
    pub fn members(&self) -> &[Constellation<T>] {
        &self.members
    }

    pub fn member(&self, k: usize) -> &Constellation<T> {
        &self.members[k]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.members[0].order()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.members[0].bits_per_symbol()
    }

    /// First `k` members.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.members.len() {
            return Err(Error::Constellation(format!(
                "cannot take {k} of {} constellations",
                self.members.len()
            )));
        }
        Ok(Self { members: self.members[..k].to_vec(), kind: self.kind })
    }

    /// Smallest distance between points of different members; `None` for a
    /// single-member family.
    pub fn min_cross_distance(&self) -> Option<T> {
        if self.members.len() < 2 {
            return None;
        }
        let mut best = T::infinity();
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                for &p in a.points() {
                    for &q in b.points() {
                        best = best.min(norm_sqr(p - q));
                    }
                }
            }
        }
        Some(best.sqrt())
    }

    /// Smallest distance between two points of the same member.
    pub fn min_intra_distance(&self) -> T {
        self.members.iter().map(|c| c.min_distance()).fold(T::infinity(), T::min)
    }

    /// Text export: `re im` per line with 12 significant digits, members
    /// separated by blank lines.
    pub fn export_text(&self) -> String {
        let mut s = String::new();
        for (k, c) in self.members.iter().enumerate() {
            if k > 0 {
                s.push('\n');
            }
            for p in c.points() {
                s.push_str(&format_sig(p.re.to_f64_lossy(), 12));
                s.push(' ');
                s.push_str(&format_sig(p.im.to_f64_lossy(), 12));
                s.push('\n');
            }
        }
        s
    }
}

fn check_order(m: usize) -> Result<()> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::Constellation(format!("modulation order {m} is not a power of two >= 2")));
    }
    Ok(())
}

// exact zeros on the axes keep BPSK and QPSK points real/imaginary
fn snap(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

/// `k` unit-energy M-PSK constellations; member `j` is rotated by
/// `2 pi j / (M * slots)`. Member 0 has a point at `+1`.
pub fn psk_family<T: Real>(m: usize, k: usize, slots: usize) -> Result<ConstellationFamily<T>> {
    check_order(m)?;
    if k == 0 || k > slots {
        return Err(Error::Constellation(format!("need 1 <= K <= G, got K = {k}, G = {slots}")));
    }
    let members = (0..k)
        .map(|j| {
            let offset = 2.0 * std::f64::consts::PI * j as f64 / (m * slots) as f64;
            let points = (0..m)
                .map(|label| {
                    let angle = 2.0 * std::f64::consts::PI * gray_inverse(label) as f64 / m as f64 + offset;
                    Complex::new(T::lit(snap(angle.cos())), T::lit(snap(angle.sin())))
                })
                .collect();
            Constellation::new(points)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstellationFamily { members, kind: FamilyKind::Psk { slots } })
}

/// Ungerboeck partition of unit-energy square `parent`-QAM into
/// `2^levels` cosets.
///
/// Even split steps halve along the checkerboard of the current lattice, odd
/// steps along one axis, so each level multiplies the intra-coset minimum
/// distance by `sqrt(2)`. Coset index bits are ordered first split first.
pub fn qam_family<T: Real>(parent: usize, levels: u32) -> Result<ConstellationFamily<T>> {
    if parent != 16 && parent != 64 {
        return Err(Error::Constellation(format!("parent QAM order must be 16 or 64, got {parent}")));
    }
    let total_bits = parent.trailing_zeros();
    if levels >= total_bits {
        return Err(Error::Constellation(format!(
            "{levels} partition levels leave fewer than two points per coset of {parent}-QAM"
        )));
    }
    let side = 1usize << (total_bits / 2);
    let norm = (2.0 * (parent as f64 - 1.0) / 3.0).sqrt();
    let coord = |i: usize| (2.0 * i as f64 - (side as f64 - 1.0)) / norm;

    let coset_of = |ix: usize, iy: usize| -> usize {
        let mut id = 0usize;
        for step in 0..levels {
            let t = step / 2;
            let bit = if step % 2 == 0 { ((ix >> t) + (iy >> t)) & 1 } else { (ix >> t) & 1 };
            id = (id << 1) | bit;
        }
        id
    };

    let cosets = 1usize << levels;
    let per_coset = parent >> levels;
    let t = levels / 2;
    let sub_side = side >> t;
    // row/column inside the coset's own sub-lattice
    let (col_bits, odd) = if levels.is_multiple_of(2) {
        (sub_side.trailing_zeros(), false)
    } else {
        ((sub_side / 2).trailing_zeros(), true)
    };

    let mut members = vec![vec![Complex::new(T::zero(), T::zero()); per_coset]; cosets];
    let mut filled = vec![vec![false; per_coset]; cosets];
    for ix in 0..side {
        for iy in 0..side {
            let c = coset_of(ix, iy);
            let row = iy >> t;
            let col = if odd { (ix >> t) >> 1 } else { ix >> t };
            let label = (gray(row) << col_bits) | gray(col);
            if label >= per_coset || filled[c][label] {
                return Err(Error::Constellation("coset labelling is not a bijection".into()));
            }
            filled[c][label] = true;
            members[c][label] = Complex::new(T::lit(coord(ix)), T::lit(coord(iy)));
        }
    }

    let members = members.into_iter().map(Constellation::new).collect::<Result<Vec<_>>>()?;
    for (c, m) in members.iter().enumerate() {
        let e = m.mean_energy().to_f64_lossy();
        if (e - 1.0).abs() > 1e-6 {
            return Err(Error::Constellation(format!(
                "coset {c} of {parent}-QAM at depth {levels} has mean energy {e}, not 1"
            )));
        }
    }
    Ok(ConstellationFamily { members, kind: FamilyKind::Qam { parent, levels } })
}
