//! Finite labeled point sets with pairwise rational distances.
//!
//! Tables carry the canonical distances of the calculus as data. Validation
//! checks the strong triangle inequality on every triple and, where the
//! underlying space separates points, that distinct labels never sit at
//! distance zero.

use num_traits::Zero;

use crate::error::Error;
use crate::rat::{format_rat, Rat};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltrametricTable {
    labels: Vec<String>,
    dist: Vec<Vec<Rat>>,
    separating: bool,
}

/// A triple breaking `d(x, z) <= max(d(x, y), d(y, z))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleViolation {
    pub x: String,
    pub z: String,
    pub via: String,
    pub d_xz: Rat,
    pub bound: Rat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UltrametricReport {
    pub triangle_violations: Vec<TriangleViolation>,
    /// Distinct labels at distance zero, reported only for separating tables.
    pub separation_violations: Vec<(String, String)>,
}

impl UltrametricReport {
    pub fn is_valid(&self) -> bool {
        self.triangle_violations.is_empty() && self.separation_violations.is_empty()
    }

    pub fn describe(&self) -> String {
        let mut lines = Vec::new();
        for v in &self.triangle_violations {
            lines.push(format!(
                "d({}, {}) = {} exceeds max over {} = {}",
                v.x,
                v.z,
                format_rat(&v.d_xz),
                v.via,
                format_rat(&v.bound)
            ));
        }
        for (a, b) in &self.separation_violations {
            lines.push(format!("distinct labels {a}, {b} at distance 0"));
        }
        lines.join("\n")
    }
}

impl UltrametricTable {
    /// Builds a table, checking shape: a square symmetric matrix with zero
    /// diagonal and nonnegative entries, one row per label.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rat>>, separating: bool) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::BadTable("labels must be nonempty".into()));
        }
        let n = labels.len();
        {
            let mut seen = labels.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != n {
                return Err(Error::BadTable("labels must be distinct".into()));
            }
        }
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::BadTable(format!(
                "distance matrix must be {n} x {n}"
            )));
        }
        for i in 0..n {
            if !dist[i][i].is_zero() {
                return Err(Error::BadTable(format!(
                    "nonzero diagonal at {}",
                    labels[i]
                )));
            }
            for j in 0..n {
                if dist[i][j] < Rat::zero() {
                    return Err(Error::BadTable(format!(
                        "negative distance between {} and {}",
                        labels[i], labels[j]
                    )));
                }
                if dist[i][j] != dist[j][i] {
                    return Err(Error::BadTable(format!(
                        "matrix not symmetric at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(UltrametricTable {
            labels,
            dist,
            separating,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // labels are nonempty by construction
    }

    pub fn separating(&self) -> bool {
        self.separating
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rat {
        &self.dist[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.dist
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Lists every triple violating the strong triangle inequality and, when
    /// separation is required, every distinct pair at distance zero. An empty
    /// report means the table is a genuine ultrametric. Never errors.
    pub fn validate(&self) -> UltrametricReport {
        let n = self.len();
        let mut report = UltrametricReport::default();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let bound = self.dist[i][k].clone().max(self.dist[k][j].clone());
                    if self.dist[i][j] > bound {
                        report.triangle_violations.push(TriangleViolation {
                            x: self.labels[i].clone(),
                            z: self.labels[j].clone(),
                            via: self.labels[k].clone(),
                            d_xz: self.dist[i][j].clone(),
                            bound,
                        });
                    }
                }
                if self.separating && self.dist[i][j].is_zero() {
                    report
                        .separation_violations
                        .push((self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        report
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    pub(crate) fn table(
        labels: &[&str],
        d: &[&[(i64, i64)]],
        separating: bool,
    ) -> UltrametricTable {
        let dist = d
            .iter()
            .map(|row| row.iter().map(|&(n, m)| ratio(n, m)).collect())
            .collect();
        UltrametricTable::new(
            labels.iter().map(|s| s.to_string()).collect(),
            dist,
            separating,
        )
        .unwrap()
    }

    #[test]
    fn single_point_is_valid() {
        let t = table(&["a"], &[&[(0, 1)]], true);
        assert!(t.validate().is_valid());
    }

    #[test]
    fn isoceles_with_small_base_is_valid() {
        // distances (1, 1, 1/2) in any arrangement
        let t = table(
            &["a", "b", "c"],
            &[
                &[(0, 1), (1, 1), (1, 1)],
                &[(1, 1), (0, 1), (1, 2)],
                &[(1, 1), (1, 2), (0, 1)],
            ],
            true,
        );
        assert!(t.validate().is_valid());
    }

    #[test]
    fn long_side_is_reported() {
        // d(a,b) = 3 against d(a,c) = d(c,b) = 1
        let t = table(
            &["a", "b", "c"],
            &[
                &[(0, 1), (3, 1), (1, 1)],
                &[(3, 1), (0, 1), (1, 1)],
                &[(1, 1), (1, 1), (0, 1)],
            ],
            true,
        );
        let report = t.validate();
        assert_eq!(report.triangle_violations.len(), 1);
        let v = &report.triangle_violations[0];
        assert_eq!(
            (v.x.as_str(), v.z.as_str(), v.via.as_str()),
            ("a", "b", "c")
        );
        assert_eq!(v.d_xz, rat(3));
        assert_eq!(v.bound, rat(1));
    }

    #[test]
    fn separation_flag_controls_zero_pairs() {
        let d: &[&[(i64, i64)]] = &[&[(0, 1), (0, 1)], &[(0, 1), (0, 1)]];
        assert!(!table(&["a", "b"], d, true).validate().is_valid());
        assert!(table(&["a", "b"], d, false).validate().is_valid());
    }

    #[test]
    fn shape_errors() {
        let bad = UltrametricTable::new(
            vec!["a".into(), "b".into()],
            vec![vec![rat(0), rat(1)], vec![rat(2), rat(0)]],
            true,
        );
        assert!(matches!(bad, Err(Error::BadTable(_))));
        let neg = UltrametricTable::new(
            vec!["a".into(), "b".into()],
            vec![vec![rat(0), rat(-1)], vec![rat(-1), rat(0)]],
            true,
        );
        assert!(matches!(neg, Err(Error::BadTable(_))));
    }
}
