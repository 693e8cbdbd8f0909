//! Deterministic sample sets of phase-space points.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{lit, Real};

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<T> {
    DVector::from_fn(dim, |_, _| lit::<T>(rng.sample::<f64, _>(StandardNormal)))
}

pub fn unit_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<T> {
    loop {
        let v = gaussian_vector::<T, R>(dim, rng);
        let n = v.norm();
        if n > lit(1e-12) {
            return v / n;
        }
    }
}

/// Points `R·θ` with log-spaced radii and, per radius, the `±` coordinate axes
/// followed by seeded random directions.
#[derive(Clone, Debug)]
pub struct SampleRegion {
    pub radii: Vec<f64>,
    pub directions: usize,
    pub seed: u64,
    /// Orthonormal columns of a subspace; when set, half of the random directions
    /// are drawn as `z + τ y` with `z` in the subspace and log-spaced `τ ∈ [1e−4, 1]`.
    pub focus: Option<DMatrix<f64>>,
}

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

impl Default for SampleRegion {
    fn default() -> Self {
        Self::log_spaced(24, 1.0, 1e3, 128, DEFAULT_SEED)
    }
}

impl SampleRegion {
    pub fn log_spaced(count: usize, rmin: f64, rmax: f64, directions: usize, seed: u64) -> Self {
        let radii = if count <= 1 {
            vec![rmax]
        } else {
            let (a, b) = (rmin.ln(), rmax.ln());
            (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
        };
        Self { radii, directions, seed, focus: None }
    }

    pub fn with_focus(mut self, basis: DMatrix<f64>) -> Self {
        self.focus = Some(basis);
        self
    }

    /// Sample points grouped by radius.
    pub fn shells<T: Real>(&self, dim: usize) -> Vec<Vec<DVector<T>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.radii
            .iter()
            .map(|&r| {
                let dirs = self.directions_for(dim, &mut rng);
                dirs.into_iter().map(|d| d * lit::<T>(r)).collect()
            })
            .collect()
    }

    pub fn points<T: Real>(&self, dim: usize) -> Vec<DVector<T>> {
        self.shells(dim).into_iter().flatten().collect()
    }

    fn directions_for<T: Real>(&self, dim: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<T>> {
        let mut out = Vec::with_capacity(self.directions);
        for i in 0..dim {
            for s in [1.0, -1.0] {
                if out.len() < self.directions {
                    let mut v = DVector::zeros(dim);
                    v[i] = lit(s);
                    out.push(v);
                }
            }
        }
        let remaining = self.directions.saturating_sub(out.len());
        let focused = match &self.focus {
            Some(b) if b.ncols() > 0 => remaining / 2,
            _ => 0,
        };
        for i in 0..focused {
            let b = self.focus.as_ref().expect("focus set");
            let z: DVector<f64> = b * unit_vector::<f64, _>(b.ncols(), rng);
            let y: DVector<f64> = unit_vector(dim, rng);
            let tau = 10f64.powf(-4.0 + 4.0 * i as f64 / focused.max(2) as f64);
            let v = z + y * tau;
            let v = &v / v.norm();
            out.push(v.map(lit::<T>));
        }
        while out.len() < self.directions {
            out.push(unit_vector(dim, rng));
        }
        out
    }
}
