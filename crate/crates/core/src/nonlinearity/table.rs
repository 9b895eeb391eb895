use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::numerics::{fritsch_carlson_slopes, hermite_cubic, hermite_cubic_integral};

/// Tabulated nonlinearity `(t_i, f_i)` with monotone cubic interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    t: Vec<f64>,
    f: Vec<f64>,
    slopes: Vec<f64>,
    /// cumulative integral up to each node
    cumulative: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(t: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != f.len() {
            return domain("a table needs at least two (t, f) rows of equal length");
        }
        if t[0] != 0.0 {
            return domain(format!("table must start at t = 0 (found {})", t[0]));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || t[t.len() - 1] >= 1.0 {
            return domain("table abscissae must be strictly increasing and below 1");
        }
        if f.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return domain("table values must be positive and finite");
        }
        let slopes = fritsch_carlson_slopes(&t, &f);
        let mut cumulative = vec![0.0; t.len()];
        for i in 0..t.len() - 1 {
            cumulative[i + 1] = cumulative[i]
                + hermite_cubic_integral(t[i], t[i + 1], f[i], f[i + 1], slopes[i], slopes[i + 1], t[i + 1]);
        }
        Ok(Self { t, f, slopes, cumulative })
    }

    /// Reads a two-column CSV `t,f`; a non-numeric first row is treated as a header.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path.as_ref())?;
        let mut t = Vec::new();
        let mut f = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Config(format!("row {} has fewer than two columns", i + 1)));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    t.push(a);
                    f.push(b);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Config(format!("row {} is not numeric", i + 1))),
            }
        }
        Self::new(t, f)
    }

    pub fn t_max(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    fn piece(&self, t: f64) -> usize {
        let i = self.t.partition_point(|&v| v <= t);
        i.clamp(1, self.t.len() - 1) - 1
    }

    pub fn contains(&self, t: f64) -> bool {
        (0.0..=self.t_max()).contains(&t)
    }

    /// `(f, f', f'')` at `t`.
    pub fn derivs(&self, t: f64) -> (f64, f64, f64) {
        let i = self.piece(t);
        hermite_cubic(self.t[i], self.t[i + 1], self.f[i], self.f[i + 1], self.slopes[i], self.slopes[i + 1], t)
    }

    pub fn primitive(&self, t: f64) -> f64 {
        let i = self.piece(t);
        self.cumulative[i]
            + hermite_cubic_integral(self.t[i], self.t[i + 1], self.f[i], self.f[i + 1], self.slopes[i], self.slopes[i + 1], t)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.t
    }

    pub fn is_convex(&self) -> bool {
        let s: Vec<f64> = self.t.windows(2).zip(self.f.windows(2)).map(|(t, f)| (f[1] - f[0]) / (t[1] - t[0])).collect();
        s.windows(2).all(|w| w[1] >= w[0]) && s.iter().all(|&v| v >= 0.0)
    }
}
