use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::RepresentationTransform;
use crate::rng::{split, stream};
use crate::statespace::{check_dim, C64, ZERO};

/// Steps drawn from one `ChaCha8Rng` before reseeding from the next block
/// seed.
pub const BLOCK_STEPS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// `dξ = √(dt/2)(g₁ + i g₂)`: `M[dξ] = 0`, `M[dξ dξ*] = dt`, `M[dξ²] = 0`.
    ComplexWiener,
    /// `dW = √dt g`.
    RealWiener,
    /// Uniform variates on `[0, 1)` for jump decisions.
    UniformJump,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Increments {
    Complex(Array2<C64>),
    Real(Array2<f64>),
}

/// A pregenerated noise realization, `steps × channels`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisePath {
    kind: NoiseKind,
    dt: f64,
    increments: Increments,
}

impl NoisePath {
    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        match &self.increments {
            Increments::Complex(a) => a.nrows(),
            Increments::Real(a) => a.nrows(),
        }
    }

    pub fn channels(&self) -> usize {
        match &self.increments {
            Increments::Complex(a) => a.ncols(),
            Increments::Real(a) => a.ncols(),
        }
    }

    pub fn increments(&self) -> &Increments {
        &self.increments
    }

    pub fn complex(&self) -> Option<&Array2<C64>> {
        match &self.increments {
            Increments::Complex(a) => Some(a),
            Increments::Real(_) => None,
        }
    }

    pub fn real(&self) -> Option<&Array2<f64>> {
        match &self.increments {
            Increments::Real(a) => Some(a),
            Increments::Complex(_) => None,
        }
    }

    /// The same Brownian path on a grid `factor` times coarser: consecutive
    /// increments are summed. Steps beyond the last full group are dropped.
    pub fn coarsen(&self, factor: usize) -> Result<NoisePath> {
        if factor == 0 {
            return Err(Error::InvalidParameter { name: "factor", reason: "must be >= 1".into() });
        }
        let steps = self.steps() / factor;
        let channels = self.channels();
        let increments = match &self.increments {
            Increments::Complex(a) => Increments::Complex(Array2::from_shape_fn((steps, channels), |(s, c)| {
                (0..factor).map(|j| a[[s * factor + j, c]]).sum()
            })),
            Increments::Real(a) if self.kind == NoiseKind::RealWiener => {
                Increments::Real(Array2::from_shape_fn((steps, channels), |(s, c)| {
                    (0..factor).map(|j| a[[s * factor + j, c]]).sum()
                }))
            }
            Increments::Real(_) => {
                return Err(Error::Unsupported("uniform jump noise has no coarser Brownian path".into()))
            }
        };
        Ok(NoisePath { kind: self.kind, dt: self.dt * factor as f64, increments })
    }
}

/// Draws the noise of one trajectory lazily, block by block. Step `k` comes
/// from the stream seeded with `split(stream_seed, k / BLOCK_STEPS)`, so the
/// values do not depend on how far ahead anything was generated.
pub(crate) struct NoiseStream {
    kind: NoiseKind,
    channels: usize,
    sqrt_dt: f64,
    seed: u64,
    step: usize,
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub(crate) fn new(kind: NoiseKind, channels: usize, dt: f64, stream_seed: u64) -> Self {
        Self { kind, channels, sqrt_dt: dt.sqrt(), seed: stream_seed, step: 0, rng: stream(split(stream_seed, 0)) }
    }

    fn advance(&mut self) {
        if self.step > 0 && self.step.is_multiple_of(BLOCK_STEPS) {
            self.rng = stream(split(self.seed, (self.step / BLOCK_STEPS) as u64));
        }
        self.step += 1;
    }

    pub(crate) fn next_complex(&mut self, out: &mut [C64]) {
        debug_assert_eq!(self.kind, NoiseKind::ComplexWiener);
        debug_assert_eq!(out.len(), self.channels);
        self.advance();
        let scale = self.sqrt_dt * std::f64::consts::FRAC_1_SQRT_2;
        for z in out.iter_mut() {
            let re: f64 = self.rng.sample(StandardNormal);
            let im: f64 = self.rng.sample(StandardNormal);
            *z = C64::new(re, im) * scale;
        }
    }

    pub(crate) fn next_real(&mut self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.channels);
        self.advance();
        match self.kind {
            NoiseKind::RealWiener => {
                for w in out.iter_mut() {
                    let g: f64 = self.rng.sample(StandardNormal);
                    *w = g * self.sqrt_dt;
                }
            }
            NoiseKind::UniformJump => {
                for u in out.iter_mut() {
                    *u = self.rng.random::<f64>();
                }
            }
            NoiseKind::ComplexWiener => unreachable!("complex noise read as real"),
        }
    }
}

/// Pregenerates `steps × channels` increments of the given kind. Same seed,
/// same path, bit for bit.
pub fn make_noise(kind: NoiseKind, steps: usize, channels: usize, dt: f64, stream_seed: u64) -> Result<NoisePath> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter { name: "dt", reason: format!("{dt} is not positive") });
    }
    let mut source = NoiseStream::new(kind, channels, dt, stream_seed);
    let increments = match kind {
        NoiseKind::ComplexWiener => {
            let mut a = Array2::from_elem((steps, channels), ZERO);
            let mut row = vec![ZERO; channels];
            for s in 0..steps {
                source.next_complex(&mut row);
                a.row_mut(s).iter_mut().zip(&row).for_each(|(d, v)| *d = *v);
            }
            Increments::Complex(a)
        }
        NoiseKind::RealWiener | NoiseKind::UniformJump => {
            let mut a = Array2::zeros((steps, channels));
            let mut row = vec![0.0; channels];
            for s in 0..steps {
                source.next_real(&mut row);
                a.row_mut(s).iter_mut().zip(&row).for_each(|(d, v)| *d = *v);
            }
            Increments::Real(a)
        }
    };
    Ok(NoisePath { kind, dt, increments })
}

/// Noise seen by the re-expressed model: `dξ'_j = Σ_k conj(u_jk) dξ_k`.
/// Shifts leave the noise unchanged.
pub fn transform_noise(t: &RepresentationTransform, noise: &NoisePath) -> Result<NoisePath> {
    let Some(a) = noise.complex() else {
        return Err(Error::Unsupported(format!("{:?} noise cannot be mixed by a complex unitary", noise.kind)));
    };
    check_dim(t.channels(), noise.channels())?;
    let v = t.mixing_matrix().mapv(|z| z.conj());
    let mixed = a.dot(&v.t());
    Ok(NoisePath { kind: noise.kind, dt: noise.dt, increments: Increments::Complex(mixed) })
}
