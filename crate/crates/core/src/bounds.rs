//! Closed-form expansion thresholds for the planar case, the theta-grid
//! table behind the comparison figure, and per-map applicability verdicts.
//!
//! All threshold functions fold `theta := min(theta, pi - theta)` first; the
//! bounds are symmetric under `theta <-> pi - theta`.

use std::f64::consts::PI;

use crate::dynamics::{DensityEvidence, RotBetaMap};
use crate::error::{Error, Result};

fn check_angle(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, pi), got {theta}"
        )));
    }
    Ok(theta.min(PI - theta))
}

/// Threshold for the complex-base family:
/// `C(theta) = sqrt((1 + sqrt(1 + 4 sin^4 theta)) / (2 sin^2 theta))`.
pub fn c_theta(theta: f64) -> Result<f64> {
    let t = check_angle(theta)?;
    let s2 = t.sin() * t.sin();
    Ok(((1.0 + (1.0 + 4.0 * s2 * s2).sqrt()) / (2.0 * s2)).sqrt())
}

/// The three candidate expressions behind `b1`, indexed 1..=3 in the order
/// of the piecewise definition. Exposed so branch-crossing continuity can be
/// checked directly.
pub fn b1_branch(theta: f64, branch: usize) -> f64 {
    let t = theta.min(PI - theta);
    let h = t / 2.0;
    match branch {
        1 => 2.0,
        2 => 1.0 + 2.0 / (1.0 + h.sin()),
        3 => 1.5 + (1.0 / h.tan()).powi(2) / 16.0 + h.tan().powi(2),
        _ => panic!("b1 has branches 1..=3"),
    }
}

/// Unique-invariant-density threshold, with the branch index actually used.
///
/// The second branch applies when `sin(theta/2) < sqrt(5) - 2`; this is the
/// reading under which branches 2 and 3 agree at the crossing (both equal
/// `(3 + sqrt 5)/2` there), making the function continuous.
pub fn b1_with_branch(theta: f64) -> Result<(f64, usize)> {
    let t = check_angle(theta)?;
    let h = t / 2.0;
    let branch = if h.tan() > 0.5 {
        1
    } else if h.sin() < 5.0f64.sqrt() - 2.0 {
        2
    } else {
        3
    };
    Ok((b1_branch(t, branch), branch))
}

pub fn b1(theta: f64) -> Result<f64> {
    b1_with_branch(theta).map(|(v, _)| v)
}

/// The two candidate expressions behind `b2`, indexed 1..=2.
pub fn b2_branch(theta: f64, branch: usize) -> f64 {
    let t = theta.min(PI - theta);
    let h = t / 2.0;
    match branch {
        1 => 1.0 + 1.0 / (t.sin() * h.cos()),
        2 => 1.0 + 2.0 / (1.0 + h.sin()),
        _ => panic!("b2 has branches 1..=2"),
    }
}

/// Volume-equivalence threshold, with the branch index used
/// (branch 1 for `theta > pi/3`, branch 2 otherwise).
pub fn b2_with_branch(theta: f64) -> Result<(f64, usize)> {
    let t = check_angle(theta)?;
    let branch = if t > PI / 3.0 { 1 } else { 2 };
    Ok((b2_branch(t, branch), branch))
}

pub fn b2(theta: f64) -> Result<f64> {
    b2_with_branch(theta).map(|(v, _)| v)
}

/// Threshold table over a theta grid.
#[derive(Clone, Debug)]
pub struct BoundsTable {
    pub thetas: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub c: Vec<f64>,
    pub branch_b1: Vec<usize>,
    pub branch_b2: Vec<usize>,
}

impl BoundsTable {
    /// Evaluate all thresholds over the grid and check the table invariants:
    /// `1 < B1 <= B2 < 3`, `C > 1`, and mirror symmetry, each within 1e-12.
    pub fn build(thetas: &[f64]) -> Result<BoundsTable> {
        let mut t = BoundsTable {
            thetas: thetas.to_vec(),
            b1: Vec::with_capacity(thetas.len()),
            b2: Vec::with_capacity(thetas.len()),
            c: Vec::with_capacity(thetas.len()),
            branch_b1: Vec::with_capacity(thetas.len()),
            branch_b2: Vec::with_capacity(thetas.len()),
        };
        for &theta in thetas {
            let (v1, br1) = b1_with_branch(theta)?;
            let (v2, br2) = b2_with_branch(theta)?;
            t.b1.push(v1);
            t.b2.push(v2);
            t.c.push(c_theta(theta)?);
            t.branch_b1.push(br1);
            t.branch_b2.push(br2);
        }
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..self.thetas.len() {
            let theta = self.thetas[i];
            let fail = |what: &str| {
                Err(Error::InvalidParameter(format!(
                    "bounds table invariant violated at theta = {theta}: {what}"
                )))
            };
            if !(self.b1[i] > 1.0 && self.b2[i] > 1.0 && self.c[i] > 1.0) {
                return fail("values must exceed 1");
            }
            if self.b1[i] > self.b2[i] + 1e-12 {
                return fail("B1 <= B2");
            }
            if !(self.b2[i] < 3.0) {
                return fail("B2 < 3");
            }
            let mirrored = b1(PI - theta)?;
            if (mirrored - self.b1[i]).abs() > 1e-12 {
                return fail("B1 symmetry under theta <-> pi - theta");
            }
            let mirrored = b2(PI - theta)?;
            if (mirrored - self.b2[i]).abs() > 1e-12 {
                return fail("B2 symmetry under theta <-> pi - theta");
            }
        }
        Ok(())
    }

    /// CSV with header `theta,B1,B2,C,branchB1,branchB2`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta,B1,B2,C,branchB1,branchB2")?;
        for i in 0..self.thetas.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.thetas[i], self.b1[i], self.b2[i], self.c[i], self.branch_b1[i], self.branch_b2[i]
            )?;
        }
        Ok(())
    }
}

/// Uniform grid of `n` angles spanning `[lo, hi]` inclusive.
pub fn theta_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Which hypothesis family a verdict row refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Unique invariant density, volume-equivalent, for `beta >= m + 1`.
    DimensionPlusOne,
    /// Same conclusion under the slab condition for `beta > 2`.
    Slab,
    /// Complex-base family for `beta > max(2, C(theta))`.
    CThreshold,
    /// Planar uniqueness for `beta > B1(theta)`.
    B1Unique,
    /// Planar volume equivalence for `beta > B2(theta)`.
    B2Equivalence,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::DimensionPlusOne => "m+1",
            Rule::Slab => "slab",
            Rule::CThreshold => "C(theta)",
            Rule::B1Unique => "B1",
            Rule::B2Equivalence => "B2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Applies,
    HypothesisFails,
    EvidenceMissing,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Applies => "applies",
            Status::HypothesisFails => "hypothesisFails",
            Status::EvidenceMissing => "evidenceMissing",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RuleVerdict {
    pub rule: Rule,
    pub status: Status,
    /// `beta` minus the relevant threshold.
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct VerdictRecord {
    pub beta: f64,
    pub dim: usize,
    pub theta: Option<f64>,
    pub entries: Vec<RuleVerdict>,
    pub notes: Vec<String>,
}

/// Combine numeric thresholds with checker outputs into one verdict per rule.
///
/// `density_evidence` and `slab_evidence` are outputs of the corresponding
/// checkers, or `None` when unchecked. `family_theta` is the base argument
/// of the complex-base family when the map is known to belong to it.
pub fn applicable_theorems(
    map: &RotBetaMap,
    density_evidence: Option<&DensityEvidence>,
    slab_evidence: Option<bool>,
    family_theta: Option<f64>,
) -> Result<VerdictRecord> {
    let beta = map.beta();
    let m = map.dim();
    let s_ok = density_evidence.map(|e| e.satisfied_at.is_some());
    let mut entries = Vec::new();
    let mut notes = Vec::new();

    let with_evidence = |bound_holds: bool, evidence: Option<bool>| -> Status {
        if !bound_holds {
            Status::HypothesisFails
        } else {
            match evidence {
                Some(true) => Status::Applies,
                _ => Status::EvidenceMissing,
            }
        }
    };

    entries.push(RuleVerdict {
        rule: Rule::DimensionPlusOne,
        status: with_evidence(beta >= (m + 1) as f64, s_ok),
        margin: beta - (m + 1) as f64,
    });

    let slab_and_s = match (slab_evidence, s_ok) {
        (Some(true), Some(true)) => Some(true),
        (None, _) | (_, None) => None,
        _ => Some(false),
    };
    entries.push(RuleVerdict {
        rule: Rule::Slab,
        status: with_evidence(beta > 2.0, slab_and_s),
        margin: beta - 2.0,
    });

    if let Some(ft) = family_theta {
        let threshold = c_theta(ft)?.max(2.0);
        entries.push(RuleVerdict {
            rule: Rule::CThreshold,
            status: if beta > threshold { Status::Applies } else { Status::HypothesisFails },
            margin: beta - threshold,
        });
        notes.push(
            "C-threshold verdict uses the conservative bound max(2, C(theta)); \
             the weaker max(sqrt 2, C(theta)) would also suffice"
                .to_string(),
        );
    }

    let theta = map.domain().theta();
    if m == 2 {
        let theta = theta.expect("2d domains carry an angle");
        let v1 = b1(theta)?;
        let v2 = b2(theta)?;
        entries.push(RuleVerdict {
            rule: Rule::B1Unique,
            status: with_evidence(beta > v1, s_ok),
            margin: beta - v1,
        });
        entries.push(RuleVerdict {
            rule: Rule::B2Equivalence,
            status: with_evidence(beta > v2, s_ok),
            margin: beta - v2,
        });
    }

    Ok(VerdictRecord { beta, dim: m, theta, entries, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Isometry;
    use crate::geometry::LatticeDomain;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    #[test]
    fn c_at_right_angle() {
        let expect = ((1.0 + 5.0f64.sqrt()) / 2.0).sqrt();
        assert!((c_theta(FRAC_PI_2).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 1.2720196495140689).abs() < 1e-12);
    }

    #[test]
    fn c_is_two_at_the_special_angle() {
        let theta = (2.0 / 15.0f64.sqrt()).asin();
        assert!((c_theta(theta).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn c_diverges_toward_zero_angle() {
        let grid = theta_grid(1e-3, FRAC_PI_2, 500);
        let vals: Vec<f64> = grid.iter().map(|&t| c_theta(t).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[0] >= w[1] - 1e-12, "C must decrease toward pi/2");
        }
        assert!(vals[0] > 1e2);
    }

    #[test]
    fn angle_domain_is_enforced() {
        assert!(c_theta(0.0).is_err());
        assert!(b1(std::f64::consts::PI).is_err());
        assert!(b2(-0.1).is_err());
    }

    #[test]
    fn b1_branch_crossings_are_continuous() {
        let theta_a = 2.0 * 0.5f64.atan();
        assert!((b1_branch(theta_a, 1) - b1_branch(theta_a, 3)).abs() <= 1e-12);
        assert!((b1(theta_a).unwrap() - 2.0).abs() <= 1e-12);

        let theta_b = 2.0 * (5.0f64.sqrt() - 2.0).asin();
        let expect = (3.0 + 5.0f64.sqrt()) / 2.0;
        assert!((b1_branch(theta_b, 2) - b1_branch(theta_b, 3)).abs() <= 1e-12);
        assert!((b1_branch(theta_b, 2) - expect).abs() <= 1e-12);
    }

    #[test]
    fn b1_at_right_angle_is_two() {
        let (v, branch) = b1_with_branch(FRAC_PI_2).unwrap();
        assert_eq!(branch, 1);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn b2_values_and_crossing() {
        assert!((b2(FRAC_PI_2).unwrap() - (1.0 + 2.0f64.sqrt())).abs() < 1e-15);
        assert!((b2_branch(FRAC_PI_3, 1) - 7.0 / 3.0).abs() <= 1e-12);
        assert!((b2_branch(FRAC_PI_3, 2) - 7.0 / 3.0).abs() <= 1e-12);
        let v = b2(FRAC_PI_6).unwrap();
        assert!((v - (1.0 + 2.0 / (1.0 + (FRAC_PI_6 / 2.0).sin()))).abs() < 1e-15);
        assert!((v - 2.5888).abs() < 1e-3);
    }

    #[test]
    fn table_invariants_hold_on_a_fine_grid() {
        let grid = theta_grid(0.01, std::f64::consts::PI - 0.01, 1000);
        let table = BoundsTable::build(&grid).unwrap();
        let max_b2 = table.b2.iter().cloned().fold(0.0, f64::max);
        assert!(max_b2 < 3.0);
        for i in 0..grid.len() {
            assert!(table.b1[i] >= 2.0f64.sqrt());
            assert!(table.b2[i] >= 2.0);
        }
    }

    #[test]
    fn verdicts_for_fast_torus() {
        let map = RotBetaMap::new(3.5, Isometry::identity(2), LatticeDomain::unit_cube(2)).unwrap();
        let ev = DensityEvidence {
            satisfied_at: Some(0),
            margins: vec![1.0],
            cert_bounds: vec![1e-4],
        };
        let rec = applicable_theorems(&map, Some(&ev), None, None).unwrap();
        let t1 = rec.entries.iter().find(|e| e.rule == Rule::DimensionPlusOne).unwrap();
        assert_eq!(t1.status, Status::Applies);
        assert!((t1.margin - 0.5).abs() < 1e-12);
        let slab = rec.entries.iter().find(|e| e.rule == Rule::Slab).unwrap();
        assert_eq!(slab.status, Status::EvidenceMissing);
    }

    #[test]
    fn verdicts_on_the_square_at_two_and_a_half() {
        let map = RotBetaMap::new(2.5, Isometry::identity(2), LatticeDomain::unit_cube(2)).unwrap();
        let ev = DensityEvidence {
            satisfied_at: Some(0),
            margins: vec![1.0],
            cert_bounds: vec![1e-4],
        };
        let rec = applicable_theorems(&map, Some(&ev), None, None).unwrap();
        let bu = rec.entries.iter().find(|e| e.rule == Rule::B1Unique).unwrap();
        assert_eq!(bu.status, Status::Applies);
        assert!((bu.margin - 0.5).abs() < 1e-12);
        let be = rec.entries.iter().find(|e| e.rule == Rule::B2Equivalence).unwrap();
        assert_eq!(be.status, Status::Applies);
        assert!((be.margin - (2.5 - 1.0 - 2.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn m_plus_one_is_non_strict() {
        let map = RotBetaMap::new(2.0, Isometry::identity(1), LatticeDomain::unit_cube(1)).unwrap();
        let ev = DensityEvidence {
            satisfied_at: Some(0),
            margins: vec![1.0],
            cert_bounds: vec![1e-4],
        };
        let rec = applicable_theorems(&map, Some(&ev), None, None).unwrap();
        let t1 = rec.entries.iter().find(|e| e.rule == Rule::DimensionPlusOne).unwrap();
        assert_eq!(t1.status, Status::Applies);
        assert!(t1.margin.abs() < 1e-15);
    }
}
