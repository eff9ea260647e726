//! Latin hypercube designs.

use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::VariableSpec;
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

/// Plain Latin hypercube on `[0, 1]^d`: each dimension is a random permutation
/// of the `n` strata with a uniform jitter inside each stratum.
#[derive(Clone, Debug, PartialEq)]
pub struct LhsDesign {
    points: DMatrix<f64>,
    seed: u64,
    /// `strata[k][i]` is the zero-based stratum of point `i` in dimension `k`.
    strata: Vec<Vec<usize>>,
}

impl LhsDesign {
    pub fn generate(n: usize, d: usize, seed: u64) -> Result<Self> {
        Self::generate_stream(n, d, seed, 0)
    }

    /// Like [`LhsDesign::generate`] but on an independent sub-stream, so
    /// callers can derive many designs from one seed.
    pub fn generate_stream(n: usize, d: usize, seed: u64, stream: u64) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!(
                "Latin hypercube needs n >= 1 and d >= 1 (got n = {n}, d = {d})"
            )));
        }
        let mut rng = rng::stream(seed, Purpose::Design, stream);
        let mut points = DMatrix::zeros(n, d);
        let mut strata = Vec::with_capacity(d);
        let width = 1.0 / n as f64;
        for k in 0..d {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            for (i, &s) in perm.iter().enumerate() {
                let u: f64 = rng.random();
                // keep the point strictly inside [s/n, (s+1)/n)
                let v = ((s as f64 + u) * width).min((s + 1) as f64 * width - f64::EPSILON);
                points[(i, k)] = v.max(s as f64 * width);
            }
            strata.push(perm);
        }
        Ok(Self {
            points,
            seed,
            strata,
        })
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn strata(&self) -> &[Vec<usize>] {
        &self.strata
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn d(&self) -> usize {
        self.points.ncols()
    }

    /// Maps each unit coordinate affinely onto `[lower, upper]`.
    pub fn scale_to_box(&self, specs: &[VariableSpec]) -> Result<DMatrix<f64>> {
        if specs.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: specs.len(),
            });
        }
        let mut out = self.points.clone();
        for (k, spec) in specs.iter().enumerate() {
            for v in out.column_mut(k).iter_mut() {
                *v = spec.clamp(spec.lower + *v * (spec.upper - spec.lower));
            }
        }
        Ok(out)
    }

    /// Writes unit and physical coordinates side by side.
    pub fn write_csv(&self, path: impl AsRef<Path>, specs: &[VariableSpec]) -> Result<()> {
        let path = path.as_ref();
        let phys = self.scale_to_box(specs)?;
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        let mut header = Vec::with_capacity(2 * specs.len());
        header.extend(specs.iter().map(|s| format!("{}_unit", s.name)));
        header.extend(specs.iter().map(|s| s.name.clone()));
        w.write_record(&header)?;
        for i in 0..self.n() {
            let rec: Vec<String> = self
                .points
                .row(i)
                .iter()
                .chain(phys.row(i).iter())
                .map(|v| format!("{v}"))
                .collect();
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_stratified(points: &DMatrix<f64>, lower: f64, upper: f64) {
        let n = points.nrows();
        for col in points.column_iter() {
            let mut counts = vec![0usize; n];
            for &v in col.iter() {
                let t = (v - lower) / (upper - lower);
                let bin = ((t * n as f64).floor() as usize).min(n - 1);
                counts[bin] += 1;
            }
            assert!(counts.iter().all(|&c| c == 1), "counts {counts:?}");
        }
    }

    #[test]
    fn single_point() {
        let des = LhsDesign::generate(1, 3, 9).unwrap();
        assert!(des.points().iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn five_hundred_runs_hit_every_stratum() {
        let des = LhsDesign::generate(500, 2, 11).unwrap();
        assert_stratified(des.points(), 0.0, 1.0);
        for (k, perm) in des.strata().iter().enumerate() {
            for (i, &s) in perm.iter().enumerate() {
                assert_eq!((des.points()[(i, k)] * 500.0).floor() as usize, s);
            }
        }
    }

    #[test]
    fn seeds_control_the_design() {
        let a = LhsDesign::generate(20, 3, 1).unwrap();
        let b = LhsDesign::generate(20, 3, 1).unwrap();
        let c = LhsDesign::generate(20, 3, 2).unwrap();
        let e = LhsDesign::generate_stream(20, 3, 1, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.points(), c.points());
        assert_ne!(a.points(), e.points());
        assert!(LhsDesign::generate(0, 2, 1).is_err());
    }

    #[test]
    fn scaling_examples() {
        let des = LhsDesign {
            points: DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.5, 0.5]),
            seed: 0,
            strata: vec![vec![0, 1], vec![0, 1]],
        };
        let specs = [
            VariableSpec::new("a", -10.0, 10.0).unwrap(),
            VariableSpec::new("b", 400.0, 600.0).unwrap(),
        ];
        let phys = des.scale_to_box(&specs).unwrap();
        assert_eq!(phys.row(0).iter().copied().collect::<Vec<_>>(), vec![-10.0, 400.0]);
        assert_eq!(phys[(1, 0)], 0.0);
        assert!(des.scale_to_box(&specs[..1]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn scaled_designs_stay_stratified(seed in any::<u64>(), n in 1usize..80) {
            let des = LhsDesign::generate(n, 2, seed).unwrap();
            let specs = [
                VariableSpec::new("a", -10.0, 10.0).unwrap(),
                VariableSpec::new("b", 1.0, 4.5).unwrap(),
            ];
            let phys = des.scale_to_box(&specs).unwrap();
            for (k, s) in specs.iter().enumerate() {
                prop_assert!(phys.column(k).iter().all(|&v| s.contains(v)));
                let mut counts = vec![0usize; n];
                for &v in phys.column(k).iter() {
                    let bin = (((v - s.lower) / (s.upper - s.lower) * n as f64).floor() as usize).min(n - 1);
                    counts[bin] += 1;
                }
                prop_assert!(counts.iter().all(|&c| c == 1));
            }
        }
    }
}
