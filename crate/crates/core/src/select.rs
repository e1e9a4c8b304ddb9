//! Choosing the dimension of the hyperbolic space by minimum Rm-NML code-length.

use serde::{Deserialize, Serialize};

use crate::complexity::{rm_nml_codelength, CodeLengthReport, ParamDomain};
use crate::error::{invalid, Result};
use crate::hygeo::LorentzPoint;
use crate::quad::QuadSpec;
use crate::rgd::Dataset;

/// Outcome for one candidate dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub dim: usize,
    pub report: Option<CodeLengthReport>,
    pub error: Option<String>,
}

impl CandidateScore {
    pub fn total(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// `None` when every candidate failed.
    pub selected: Option<usize>,
    pub scores: Vec<CandidateScore>,
}

/// Scores every `(dim, dataset)` pair and picks the smallest total code-length.
/// Failing candidates are kept in the table with their error; ties go to the
/// smaller dimension.
pub fn select_dimension(
    candidates: &[(usize, Dataset)],
    domain: &ParamDomain,
    spec: &QuadSpec,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(invalid("no candidate dimensions"));
    }
    let scores: Vec<CandidateScore> = candidates
        .iter()
        .map(|(dim, data)| {
            let outcome = if data.dim() != *dim {
                Err(invalid(format!(
                    "dataset has dimension {}, expected {dim}",
                    data.dim()
                )))
            } else {
                rm_nml_codelength(data, domain, spec)
            };
            match outcome {
                Ok(report) => CandidateScore {
                    dim: *dim,
                    report: Some(report),
                    error: None,
                },
                Err(e) => CandidateScore {
                    dim: *dim,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let selected = argmin_dim(scores.iter().filter_map(|s| s.total().map(|t| (s.dim, t))));
    Ok(Selection { selected, scores })
}

/// Dimension with the smallest score; equal scores favour the smaller dimension.
pub fn argmin_dim(scores: impl IntoIterator<Item = (usize, f64)>) -> Option<usize> {
    scores
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(d, _)| d)
}

/// Re-expresses points of `H^D` in `H^target` through the coordinate slices
/// `H^1 < H^2 < ...` (spatial coordinates beyond the first `k` set to zero).
///
/// Going up is the isometric inclusion. Going down maps each point to its
/// nearest point on the slice, `(x_0, .., x_k) / sqrt(x_0^2 - x_1^2 - .. - x_k^2)`.
pub fn slice_to_dim(data: &Dataset, target: usize) -> Result<Dataset> {
    if target < 1 {
        return Err(invalid("target dimension must be >= 1"));
    }
    let points = data
        .points()
        .iter()
        .map(|x| {
            let c = x.coords();
            let mut out = vec![0.0; target + 1];
            let k = c.len().min(target + 1);
            out[..k].copy_from_slice(&c[..k]);
            if target < data.dim() {
                let q = out[0] * out[0] - out[1..].iter().map(|a| a * a).sum::<f64>();
                let s = q.sqrt();
                out.iter_mut().for_each(|a| *a /= s);
            }
            LorentzPoint::new(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hygeo::dist;
    use crate::quad::RngSeed;
    use crate::rgd::{sample, RgdParams};

    fn data(dim: usize, seed: u64) -> Dataset {
        let p = RgdParams::new(LorentzPoint::origin(dim), 0.8).unwrap();
        sample(40, &p, RngSeed(seed)).unwrap()
    }

    #[test]
    fn single_survivor_is_selected() {
        let bad = Dataset::new(vec![LorentzPoint::origin(3)]).unwrap();
        let cands = vec![(2, data(2, 1)), (3, bad)];
        let s = select_dimension(&cands, &ParamDomain::default(), &QuadSpec::complexity()).unwrap();
        assert_eq!(s.selected, Some(2));
        assert!(s.scores[1].error.is_some());
    }

    #[test]
    fn ties_go_to_smaller_dimension() {
        assert_eq!(argmin_dim([(5, 1.0), (3, 1.0), (2, 1.5)]), Some(3));
        assert_eq!(argmin_dim([(5, 0.5), (3, 1.0)]), Some(5));
        assert_eq!(argmin_dim([]), None);
        let mismatched = vec![(3, data(2, 5))];
        let s = select_dimension(&mismatched, &ParamDomain::default(), &QuadSpec::complexity()).unwrap();
        assert_eq!(s.selected, None);
    }

    #[test]
    fn inclusion_preserves_distances() {
        let d = data(2, 9);
        let up = slice_to_dim(&d, 5).unwrap();
        let back = slice_to_dim(&up, 2).unwrap();
        for i in 0..5 {
            let a = dist(&d.points()[i], &d.points()[i + 1]).unwrap();
            let b = dist(&up.points()[i], &up.points()[i + 1]).unwrap();
            assert!((a - b).abs() < 1e-10);
            assert!(dist(&d.points()[i], &back.points()[i]).unwrap() < 1e-7);
        }
        assert_eq!(slice_to_dim(&d, 1).unwrap().dim(), 1);
    }
}
