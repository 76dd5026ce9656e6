//! Uniformly sampled scalar time series.

/// A real-valued observable sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Time of the first sample.
    pub t0: f64,
    /// Spacing between consecutive samples (> 0).
    pub dt: f64,
    /// Sample values, in time order.
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Self {
        assert!(dt > 0.0, "sample spacing must be positive");
        Self { t0, dt, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of sample `i`.
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Iterator over `(time, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.time(i), v))
    }

    /// Drops all samples strictly before `t`, keeping the time grid intact.
    pub fn since(&self, t: f64) -> TimeSeries {
        let skip = if t <= self.t0 {
            0
        } else {
            // First index with time(i) >= t, robust to roundoff on the grid.
            ((t - self.t0) / self.dt - 1e-9).ceil().max(0.0) as usize
        };
        let skip = skip.min(self.values.len());
        TimeSeries {
            t0: self.time(skip),
            dt: self.dt,
            values: self.values[skip..].to_vec(),
        }
    }
}
