//! Prefix-code lengths for a discretised density on a disk in `H^2`.
//!
//! A density `p` on the disk is quantised by a polar partition; cell `S`
//! receives the length `l_S = ceil(sup_S(-log2 p) - log2 vol(S))` bits. These
//! lengths satisfy the Kraft inequality, and their expectation is bounded
//! below by `E_S[inf_S(-log2 p) - log2 vol(S)]`. Suprema and infima are taken
//! over a [`SUBGRID`] x [`SUBGRID`] grid spanning each cell, edges included.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hygeo::{LorentzPoint, PolarCoords};

/// Sub-grid resolution per cell side.
pub const SUBGRID: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub representative: LorentzPoint,
    pub volume: f64,
    pub r_range: (f64, f64),
    pub angle_range: (f64, f64),
}

impl Cell {
    fn subgrid(&self) -> impl Iterator<Item = LorentzPoint> + '_ {
        let (r0, r1) = self.r_range;
        let (a0, a1) = self.angle_range;
        let step = (SUBGRID - 1) as f64;
        (0..SUBGRID).flat_map(move |i| {
            (0..SUBGRID).map(move |j| {
                let r = r0 + (r1 - r0) * i as f64 / step;
                let a = a0 + (a1 - a0) * j as f64 / step;
                polar_point(r, a)
            })
        })
    }
}

fn polar_point(r: f64, angle: f64) -> LorentzPoint {
    PolarCoords {
        r,
        direction: vec![angle.cos(), angle.sin()],
    }
    .to_lorentz()
}

/// Polar grid on the closed disk of radius `radius` about the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub dim: usize,
    pub radius: f64,
    pub cells: Vec<Cell>,
}

impl Partition {
    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).sum()
    }

    pub fn max_cell_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).fold(0.0, f64::max)
    }
}

/// Cells `[r_i, r_{i+1}] x [a_j, a_{j+1}]` of equal radial and angular
/// width, each of volume `(a_{j+1} - a_j)(cosh r_{i+1} - cosh r_i)`.
pub fn partition_ball(dim: usize, radius: f64, n_r: usize, n_angle: usize) -> Result<Partition> {
    if dim != 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if n_r < 1 || n_angle < 1 {
        return Err(invalid("partition needs n_r, n_angle >= 1"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    let dr = radius / n_r as f64;
    let da = 2.0 * PI / n_angle as f64;
    let mut cells = Vec::with_capacity(n_r * n_angle);
    for i in 0..n_r {
        let (r0, r1) = (i as f64 * dr, (i + 1) as f64 * dr);
        // cosh r1 - cosh r0 = 2 sinh((r1 + r0)/2) sinh((r1 - r0)/2)
        let ring = 2.0 * (0.5 * (r0 + r1)).sinh() * (0.5 * (r1 - r0)).sinh();
        for j in 0..n_angle {
            let (a0, a1) = (j as f64 * da, (j + 1) as f64 * da);
            cells.push(Cell {
                representative: polar_point(0.5 * (r0 + r1), 0.5 * (a0 + a1)),
                volume: da * ring,
                r_range: (r0, r1),
                angle_range: (a0, a1),
            });
        }
    }
    Ok(Partition {
        dim,
        radius,
        cells,
    })
}

fn neg_log2_range<F: Fn(&LorentzPoint) -> f64>(cell: &Cell, pdf: &F) -> (f64, f64) {
    cell.subgrid()
        .map(|x| -pdf(&x).log2())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// `l_S = ceil(max_S(-log2 p) - log2 vol(S))` for every cell, in bits.
pub fn cell_codelengths<F: Fn(&LorentzPoint) -> f64>(partition: &Partition, pdf: F) -> Vec<i64> {
    partition
        .cells
        .iter()
        .map(|c| {
            let (_, hi) = neg_log2_range(c, &pdf);
            (hi - c.volume.log2()).ceil() as i64
        })
        .collect()
}

/// Cell probabilities `p(rep) vol(S)`, renormalised to sum to one.
pub fn cell_probabilities<F: Fn(&LorentzPoint) -> f64>(partition: &Partition, pdf: F) -> Vec<f64> {
    let raw: Vec<f64> = partition
        .cells
        .iter()
        .map(|c| pdf(&c.representative) * c.volume)
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// `L_lower = sum_S P(S) (min_S(-log2 p) - log2 vol(S))`, in bits.
pub fn expected_lower_bound<F: Fn(&LorentzPoint) -> f64>(partition: &Partition, pdf: F) -> f64 {
    let probs = cell_probabilities(partition, &pdf);
    partition
        .cells
        .iter()
        .zip(probs)
        .map(|(c, p)| {
            let (lo, _) = neg_log2_range(c, &pdf);
            p * (lo - c.volume.log2())
        })
        .sum()
}

/// `sum_S 2^{-l_S}`.
pub fn kraft_sum(lengths: &[i64]) -> f64 {
    lengths.iter().map(|&l| (-(l as f64)).exp2()).sum()
}

/// Kraft sum, expected length and lower bound for one density and partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodingSummary {
    pub cells: usize,
    pub max_cell_volume: f64,
    pub kraft_sum: f64,
    pub average_length: f64,
    pub lower_bound: f64,
}

pub fn coding_summary<F: Fn(&LorentzPoint) -> f64>(partition: &Partition, pdf: F) -> CodingSummary {
    let lengths = cell_codelengths(partition, &pdf);
    let probs = cell_probabilities(partition, &pdf);
    CodingSummary {
        cells: partition.cells.len(),
        max_cell_volume: partition.max_cell_volume(),
        kraft_sum: kraft_sum(&lengths),
        average_length: probs.iter().zip(&lengths).map(|(p, &l)| p * l as f64).sum(),
        lower_bound: expected_lower_bound(partition, &pdf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hygeo::ball_volume;
    use crate::rgd::{pdf_vol, RgdParams};
    use approx::assert_relative_eq;

    #[test]
    fn single_cell() {
        let p = partition_ball(2, 1.5, 1, 1).unwrap();
        assert_eq!(p.cells.len(), 1);
        assert_relative_eq!(p.cells[0].volume, 2.0 * PI * (1.5f64.cosh() - 1.0), max_relative = 1e-14);
        let v = p.total_volume();
        assert_eq!(cell_codelengths(&p, |_| 1.0 / v), vec![0]);
        assert!(partition_ball(3, 1.0, 2, 2).is_err());
        assert!(partition_ball(2, 1.0, 0, 2).is_err());
    }

    #[test]
    fn volumes_telescope() {
        for (nr, na) in [(3, 5), (16, 16), (40, 7)] {
            let p = partition_ball(2, 2.5, nr, na).unwrap();
            assert_relative_eq!(p.total_volume(), ball_volume(2, 2.5).unwrap(), max_relative = 1e-10);
        }
    }

    #[test]
    fn angular_refinement_halves_cells() {
        let a = partition_ball(2, 2.0, 8, 8).unwrap();
        let b = partition_ball(2, 2.0, 8, 16).unwrap();
        assert_eq!(b.cells.len(), 2 * a.cells.len());
        assert_relative_eq!(b.max_cell_volume(), 0.5 * a.max_cell_volume(), max_relative = 1e-12);
        let pdf = |_: &LorentzPoint| 0.01;
        let la = cell_codelengths(&a, pdf);
        let lb = cell_codelengths(&b, pdf);
        for (i, l) in la.iter().enumerate() {
            assert!((lb[2 * i] - l - 1).abs() <= 1);
        }
    }

    #[test]
    fn kraft_and_bounds_for_gaussian() {
        let params = RgdParams::new(LorentzPoint::from_spatial(&[0.3, 0.1]), 0.6).unwrap();
        let p = partition_ball(2, 3.0, 32, 32).unwrap();
        let s = coding_summary(&p, |x| pdf_vol(x, &params).unwrap());
        assert!(s.kraft_sum <= 1.0);
        assert!(s.average_length >= s.lower_bound);
        assert!(s.average_length <= s.lower_bound + 2.0);
    }
}
