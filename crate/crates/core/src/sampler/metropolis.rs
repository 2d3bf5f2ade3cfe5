//! A Metropolis kernel over strings of discrete symbols.
//!
//! The target weight is supplied as a closure; the kernel knows nothing about
//! phase space.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::Result;

/// Outcome of one proposal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Accepted,
    Rejected,
}

/// Metropolis walker on `{0..levels}^sites` with target `w(x)^beta`.
///
/// A proposal draws a width `k` uniformly from `1..=max_width`, picks `k`
/// distinct sites uniformly and moves each to a uniformly chosen different
/// symbol, so the proposal is symmetric. Widths above one let the walker
/// cross single-site barriers such as conserved charges.
pub struct Walker {
    state: Vec<u32>,
    weight: f64,
    value: f64,
    levels: u32,
    max_width: usize,
    beta: f64,
    trial: Vec<u32>,
}

impl Walker {
    /// `value` is the signed quantity at `state`; its absolute value is the
    /// weight.
    pub fn new(state: Vec<u32>, value: f64, levels: u32, max_width: usize, beta: f64) -> Self {
        debug_assert!(levels >= 2);
        debug_assert!((1..=2).contains(&max_width) && max_width <= state.len());
        let trial = state.clone();
        Walker {
            weight: value.abs(),
            value,
            state,
            levels,
            max_width,
            beta,
            trial,
        }
    }

    pub fn state(&self) -> &[u32] {
        &self.state
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// One proposal and accept/reject; `eval` returns the signed value at the
    /// proposed state.
    pub fn step<R: Rng>(
        &mut self,
        rng: &mut R,
        mut eval: impl FnMut(&[u32]) -> Result<f64>,
    ) -> Result<Step> {
        self.trial.copy_from_slice(&self.state);
        let n = self.state.len();
        let width = if self.max_width > 1 {
            rng.random_range(1..=self.max_width)
        } else {
            1
        };
        let mut picked = [usize::MAX; 2];
        for k in 0..width {
            let site = loop {
                let s = rng.random_range(0..n);
                if !picked[..k].contains(&s) {
                    break s;
                }
            };
            picked[k] = site;
            let shift = rng.random_range(1..self.levels);
            self.trial[site] = (self.trial[site] + shift) % self.levels;
        }
        let value = eval(&self.trial)?;
        let weight = value.abs();
        // the uniform draw is taken on every step so the random stream does not
        // depend on the weights
        let r: f64 = rng.random();
        let accept = weight > 0.0 && (weight >= self.weight || r < (weight / self.weight).powf(self.beta));
        if accept {
            core::mem::swap(&mut self.state, &mut self.trial);
            self.weight = weight;
            self.value = value;
            Ok(Step::Accepted)
        } else {
            Ok(Step::Rejected)
        }
    }
}
