//! Derivative-free local minimisation used by the numerical assistance
//! searches.
//!
//! [`pattern_search`] polls `x ± h·d` along a freshly rotated orthonormal
//! direction set each sweep, accepts the first improvement, and halves `h`
//! after a sweep with no improvement. Random rotations keep the poll from
//! stalling on coordinate-aligned ridges.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Copy, Debug)]
pub struct PatternSearch {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evals: usize,
}

impl Default for PatternSearch {
    fn default() -> Self {
        PatternSearch {
            initial_step: 0.5,
            min_step: 1e-9,
            max_evals: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// The step shrank below `min_step` before the budget ran out.
    pub converged: bool,
}

fn random_rotation(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    g.qr().q()
}

pub fn pattern_search<F>(mut f: F, x0: &[f64], cfg: &PatternSearch, rng: &mut impl Rng) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut evals = 1;
    if n == 0 {
        return Minimum {
            x,
            value: fx,
            evals,
            converged: true,
        };
    }
    let mut step = cfg.initial_step;
    let mut trial = vec![0.0; n];
    while step >= cfg.min_step && evals < cfg.max_evals {
        let dirs = random_rotation(n, rng);
        let mut improved = false;
        'poll: for k in 0..n {
            for sign in [1.0, -1.0] {
                for i in 0..n {
                    trial[i] = x[i] + sign * step * dirs[(i, k)];
                }
                let ft = f(&trial);
                evals += 1;
                if ft < fx {
                    fx = ft;
                    x.copy_from_slice(&trial);
                    improved = true;
                    break 'poll;
                }
                if evals >= cfg.max_evals {
                    break 'poll;
                }
            }
        }
        if improved {
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    Minimum {
        x,
        value: fx,
        evals,
        converged: step < cfg.min_step,
    }
}
