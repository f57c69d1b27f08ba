use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::DomainSpec;

/// `amplitude · (1 − |x − center|²/width²)²₊`
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        let t = 1.0 - d2 / (self.width * self.width);
        if t <= 0.0 {
            0.0
        } else {
            self.amplitude * t * t
        }
    }
}

/// A nonnegative sum of bumps, each supported at positive distance from ∂Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSource {
    pub seed: u64,
    pub bumps: Vec<Bump>,
}

impl BumpSource {
    /// `count` bumps drawn from a ChaCha8 stream seeded with `seed`. On a
    /// ball the bumps are centred at the origin, so the source is radial.
    pub fn random(domain: &DomainSpec, seed: u64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Parameter("a source needs at least one bump".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bumps = Vec::with_capacity(count);
        for _ in 0..count {
            let amplitude = rng.gen_range(0.5..2.0);
            let bump = match domain {
                DomainSpec::IntervalUnion { intervals } => {
                    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
                    let mut pick = rng.gen_range(0.0..total);
                    let mut chosen = intervals[intervals.len() - 1];
                    for &iv in intervals {
                        if pick < iv.1 - iv.0 {
                            chosen = iv;
                            break;
                        }
                        pick -= iv.1 - iv.0;
                    }
                    let (a, b) = chosen;
                    let l = b - a;
                    let width = rng.gen_range(0.15..0.35) * l;
                    let margin = 0.05 * l + width;
                    Bump { center: vec![rng.gen_range(a + margin..b - margin)], width, amplitude }
                }
                DomainSpec::Rectangle { width: w, height: h } => {
                    let side = w.min(*h);
                    let width = rng.gen_range(0.1..0.3) * side;
                    let margin = 0.05 * side + width;
                    Bump {
                        center: vec![rng.gen_range(margin..w - margin), rng.gen_range(margin..h - margin)],
                        width,
                        amplitude,
                    }
                }
                DomainSpec::Ball(g) => {
                    Bump { center: vec![0.0; g.n], width: rng.gen_range(0.3..0.9) * g.radius, amplitude }
                }
            };
            bumps.push(bump);
        }
        Ok(BumpSource { seed, bumps })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.bumps.iter().map(|b| b.eval(x)).sum()
    }

    /// One-line parameter log, `center;width;amplitude` per bump.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .bumps
            .iter()
            .map(|b| {
                let c: Vec<String> = b.center.iter().map(|v| format!("{v:.6}")).collect();
                format!("({});{:.6};{:.6}", c.join(" "), b.width, b.amplitude)
            })
            .collect();
        format!("seed {} bumps [{}]", self.seed, parts.join(", "))
    }
}
