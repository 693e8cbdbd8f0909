//! Truncated tensor Hermite basis and exact ladder-operator action.

use std::collections::HashMap;

use nalgebra::Complex;

use crate::{lit, Real};

/// Multi-indices `α ∈ N^n` with `|α| ≤ max_level`, ordered by level then lexicographically.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    n: usize,
    max_level: usize,
    indices: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl HermiteBasis {
    pub fn new(n: usize, max_level: usize) -> Self {
        let mut indices = Vec::new();
        for level in 0..=max_level {
            push_level(n, level as u32, &mut Vec::with_capacity(n), &mut indices);
        }
        let lookup = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Self { n, max_level, indices, lookup }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn index(&self, i: usize) -> &[u32] {
        &self.indices[i]
    }

    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn level(&self, i: usize) -> usize {
        self.indices[i].iter().sum::<u32>() as usize
    }

    /// Number of basis functions with level at most `l` (a prefix of the ordering).
    pub fn count_up_to(&self, l: usize) -> usize {
        if l >= self.max_level {
            return self.dim();
        }
        binomial(l + self.n, self.n)
    }

    /// Prefix of levels `≤ max_level − guard`, on which operators of degree `guard` act exactly.
    pub fn interior(&self, guard: usize) -> usize {
        if guard > self.max_level {
            return 0;
        }
        self.count_up_to(self.max_level - guard)
    }
}

fn push_level(n: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == n {
        let mut a = prefix.clone();
        a.push(remaining);
        out.push(a);
        return;
    }
    for k in (0..=remaining).rev() {
        prefix.push(k);
        push_level(n, remaining - k, prefix, out);
        prefix.pop();
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Finite linear combination of multi-index kets.
pub type Ket<T> = Vec<(Vec<u32>, Complex<T>)>;

/// Applies the phase-space coordinate operator `i` (`x_i` for `i < n`, `ξ_{i−n}` otherwise)
/// with `x = s(a + a†)/√2`, `ξ = s(a − a†)/(i√2)`.
pub fn apply_coordinate<T: Real>(n: usize, i: usize, scale: T, ket: &Ket<T>) -> Ket<T> {
    let (k, momentum) = if i < n { (i, false) } else { (i - n, true) };
    let f = scale / lit::<T>(2.0).sqrt();
    let zero = T::zero();
    // ξ = −i s/√2 (a − a†)
    let (down, up) = if momentum {
        (Complex::new(zero, -f), Complex::new(zero, f))
    } else {
        (Complex::new(f, zero), Complex::new(f, zero))
    };
    let mut out = Vec::with_capacity(2 * ket.len());
    for (alpha, c) in ket {
        let ak = alpha[k];
        if ak > 0 {
            let mut b = alpha.clone();
            b[k] -= 1;
            out.push((b, *c * down * lit::<T>(ak as f64).sqrt()));
        }
        let mut b = alpha.clone();
        b[k] += 1;
        out.push((b, *c * up * lit::<T>((ak + 1) as f64).sqrt()));
    }
    out
}
