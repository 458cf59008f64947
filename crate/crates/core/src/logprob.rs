//! Log-space probability helpers.
//!
//! Products of parameters are accumulated as sums of natural logarithms and
//! sums of probabilities go through a streaming log-sum-exp, so long chains
//! of small factors never underflow before they are surfaced.

/// Natural log of a probability, mapping zero (and anything non-positive) to
/// negative infinity.
pub fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub fn add(&mut self, logp: f64) {
        if logp == f64::NEG_INFINITY {
            return;
        }
        if logp > self.max {
            self.scaled = self.scaled * (self.max - logp).exp() + 1.0;
            self.max = logp;
        } else {
            self.scaled += (logp - self.max).exp();
        }
    }

    pub fn log(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }

    pub fn prob(&self) -> f64 {
        self.log().exp()
    }
}

impl FromIterator<f64> for LogSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `log(sum(exp(x)))` over log-probabilities.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(logs: I) -> f64 {
    logs.into_iter().collect::<LogSum>().log()
}

/// `ln(n!)` for the small counts that show up in combinatoric constants.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}
