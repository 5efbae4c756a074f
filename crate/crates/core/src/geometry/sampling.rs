//! Batched Monte Carlo accumulation of per-level integrands.

use crate::error::{Error, Result};
use crate::rng::{par_indexed, Seed, StreamRng};
use crate::stats::Estimate;

const BATCH: usize = 1024;
/// Below this accepted fraction a level is reported as unusable.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

#[derive(Clone, Copy, Default)]
struct Acc {
    n: f64,
    mean: f64,
    m2: f64,
    accepted: usize,
}

impl Acc {
    fn push(&mut self, x: f64, accepted: bool) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
        self.accepted += accepted as usize;
    }

    fn merge(self, o: Acc) -> Acc {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Acc {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
            accepted: self.accepted + o.accepted,
        }
    }
}

pub(crate) struct LevelStats {
    pub estimates: Vec<Estimate>,
    pub accepted: Vec<usize>,
    pub samples: usize,
}

impl LevelStats {
    pub fn acceptance(&self, n: usize) -> f64 {
        self.accepted[n] as f64 / self.samples.max(1) as f64
    }

    /// Fails if any level accepted too few samples.
    pub fn require_acceptance(&self, context: &str) -> Result<()> {
        for n in 0..self.accepted.len() {
            let rate = self.acceptance(n);
            if rate < MIN_ACCEPTANCE {
                return Err(Error::LowAcceptance {
                    rate,
                    threshold: MIN_ACCEPTANCE,
                    context: format!("{context}, level n = {n}"),
                });
            }
        }
        Ok(())
    }
}

/// Draws `samples` values of `levels` integrands; `None` marks a rejected
/// sample (integrand zero). Batch `b` uses stream `b` of `seed`.
pub(crate) fn accumulate<F>(
    samples: usize,
    levels: usize,
    seed: Seed,
    draw: F,
) -> Result<LevelStats>
where
    F: Fn(&mut StreamRng, &mut [Option<f64>]) -> Result<()> + Sync,
{
    let batches = samples.div_ceil(BATCH);
    let parts: Vec<Result<Vec<Acc>>> = par_indexed(batches, |b| {
        let mut rng = seed.stream(b as u64);
        let mut acc = vec![Acc::default(); levels];
        let mut vals = vec![None; levels];
        let count = BATCH.min(samples - b * BATCH);
        for _ in 0..count {
            vals.iter_mut().for_each(|v| *v = None);
            draw(&mut rng, &mut vals)?;
            for (a, v) in acc.iter_mut().zip(&vals) {
                a.push(v.unwrap_or(0.0), v.is_some());
            }
        }
        Ok(acc)
    });
    let mut total = vec![Acc::default(); levels];
    for part in parts {
        for (t, a) in total.iter_mut().zip(part?) {
            *t = t.merge(a);
        }
    }
    let estimates = total
        .iter()
        .map(|a| {
            let se = if a.n > 1.0 {
                (a.m2 / (a.n - 1.0) / a.n).sqrt()
            } else {
                0.0
            };
            Estimate {
                mean: a.mean,
                stderr: se,
            }
        })
        .collect();
    Ok(LevelStats {
        estimates,
        accepted: total.iter().map(|a| a.accepted).collect(),
        samples,
    })
}
