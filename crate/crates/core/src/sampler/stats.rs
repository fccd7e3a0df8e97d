use crate::summation::CompensatedSum;

/// Per-batch averages of a vector of observables, pooled over chains.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchMeans {
    /// `batches[b][i]`: average of observable `i` over batch `b`.
    pub batches: Vec<Vec<f64>>,
    pub batch_len: usize,
}

/// Value with a standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `(value - expected) / stderr`; zero when both agree exactly.
    pub fn z_score(&self, expected: f64) -> f64 {
        let d = self.value - expected;
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

impl BatchMeans {
    pub fn n_batches(&self) -> usize {
        self.batches.len()
    }

    pub fn samples(&self) -> usize {
        self.batches.len() * self.batch_len
    }

    fn grand_means(&self, skip: Option<usize>) -> Vec<f64> {
        let n_obs = self.batches.first().map_or(0, Vec::len);
        let mut sums = vec![CompensatedSum::new(); n_obs];
        let mut count = 0usize;
        for (b, row) in self.batches.iter().enumerate() {
            if Some(b) == skip {
                continue;
            }
            count += 1;
            for (s, v) in sums.iter_mut().zip(row) {
                s.add(*v);
            }
        }
        sums.iter().map(|s| s.value() / count as f64).collect()
    }

    /// Mean of observable `i` with its batch-means standard error.
    pub fn linear(&self, i: usize) -> Estimate {
        let n = self.n_batches() as f64;
        let mean = self.grand_means(None)[i];
        let ss: f64 = self.batches.iter().map(|row| (row[i] - mean).powi(2)).sum();
        Estimate {
            value: mean,
            stderr: (ss / (n - 1.0) / n).sqrt(),
        }
    }

    /// `f` of the observable means, with a delete-one-batch jackknife error.
    pub fn jackknife(&self, f: impl Fn(&[f64]) -> f64) -> Estimate {
        let n = self.n_batches();
        let value = f(&self.grand_means(None));
        let leave_out: Vec<f64> = (0..n).map(|b| f(&self.grand_means(Some(b)))).collect();
        let mean = leave_out.iter().sum::<f64>() / n as f64;
        let ss: f64 = leave_out.iter().map(|v| (v - mean).powi(2)).sum();
        Estimate {
            value,
            stderr: ((n as f64 - 1.0) / n as f64 * ss).sqrt(),
        }
    }
}
