use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::exec::InputValuation;
use crate::ast::{Program, VarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleBounds {
    pub max_len: usize,
    pub val_lo: i64,
    pub val_hi: i64,
}

impl Default for SampleBounds {
    fn default() -> Self {
        SampleBounds {
            max_len: 5,
            val_lo: -3,
            val_hi: 3,
        }
    }
}

/// Up to `count` distinct valuations: all-empty first, then all-zero
/// (arrays of length `max_len`), then seeded random ones. Fewer are
/// returned when the input space is smaller than `count`.
pub fn sample_inputs(
    p: &Program,
    count: usize,
    seed: u64,
    bounds: &SampleBounds,
) -> Vec<InputValuation> {
    let (lo, hi) = if bounds.val_lo <= bounds.val_hi {
        (bounds.val_lo, bounds.val_hi)
    } else {
        (bounds.val_hi, bounds.val_lo)
    };
    let fill = |len: usize, v: i64| {
        let mut inp = InputValuation::default();
        for d in &p.decls {
            match d.kind {
                VarKind::Int => {
                    inp.ints.insert(d.name.clone(), v);
                }
                VarKind::Array => {
                    inp.arrays.insert(d.name.clone(), vec![v; len]);
                }
            }
        }
        inp
    };
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |inp: InputValuation, out: &mut Vec<InputValuation>| {
        if out.len() < count && seen.insert(inp.clone()) {
            out.push(inp);
        }
    };
    push(fill(0, 0), &mut out);
    push(fill(bounds.max_len, 0), &mut out);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while out.len() < count && attempts < count.saturating_mul(100) {
        attempts += 1;
        let mut inp = InputValuation::default();
        for d in &p.decls {
            match d.kind {
                VarKind::Int => {
                    inp.ints.insert(d.name.clone(), rng.random_range(lo..=hi));
                }
                VarKind::Array => {
                    let len = rng.random_range(0..=bounds.max_len);
                    let v = (0..len).map(|_| rng.random_range(lo..=hi)).collect();
                    inp.arrays.insert(d.name.clone(), v);
                }
            }
        }
        push(inp, &mut out);
    }
    out
}
