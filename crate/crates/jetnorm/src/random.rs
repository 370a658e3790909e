//! Seeded samplers for jets and unipotent group elements, used by tests,
//! benchmarks and the bindings.

use rand::Rng;

use crate::error::Result;
use crate::groups::{delta_project, GroupElementJet, GroupKind, LieElementJet};
use crate::jets::{monomials_between, JetPair, MatrixJet, SeriesJet};
use crate::scalars::{Field, Scalar};

/// Shape of the random coefficients.
#[derive(Clone, Copy, Debug)]
pub struct Sampler {
    pub field: Field,
    /// Numerators are drawn from `-bound..=bound`.
    pub bound: i64,
    /// Denominators are drawn from `1..=max_den`.
    pub max_den: i64,
    /// Chance that a given coefficient is nonzero.
    pub density: f64,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { field: Field::Rational, bound: 3, max_den: 2, density: 0.5 }
    }
}

impl Sampler {
    fn rational<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar::ratio(rng.gen_range(-self.bound..=self.bound), rng.gen_range(1..=self.max_den.max(1)))
    }

    pub fn scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        let re = self.rational(rng);
        match self.field {
            Field::Rational => re,
            Field::Gaussian => &re + &(&self.rational(rng) * &Scalar::i()),
        }
    }

    /// Random series supported in degrees `lo..=hi` (clipped to the truncation).
    pub fn series<R: Rng + ?Sized>(&self, rng: &mut R, nvars: usize, truncation: u32, lo: u32, hi: u32) -> SeriesJet {
        let mut s = SeriesJet::zero(nvars, truncation);
        if lo > hi.min(truncation) {
            return s;
        }
        for index in monomials_between(nvars, lo, hi.min(truncation)) {
            if rng.gen_bool(self.density) {
                s.add_term(index, self.scalar(rng));
            }
        }
        s
    }

    pub fn matrix<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        rows: usize,
        cols: usize,
        nvars: usize,
        truncation: u32,
        lo: u32,
        hi: u32,
    ) -> MatrixJet {
        let entries = (0..rows * cols).map(|_| self.series(rng, nvars, truncation, lo, hi)).collect();
        MatrixJet::from_entries(rows, cols, entries).expect("shape")
    }

    /// Random element of the kind's Lie algebra with no constant term.
    pub fn lie<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        kind: GroupKind,
        m: usize,
        n: usize,
        nvars: usize,
        truncation: u32,
    ) -> Result<LieElementJet> {
        let pair = JetPair {
            left: self.matrix(rng, m, m, nvars, truncation, 1, truncation),
            right: self.matrix(rng, n, n, nvars, truncation, 1, truncation),
        };
        delta_project(&pair, kind)
    }

    /// Random element of `G⁰`, as the exponential of [`Sampler::lie`].
    pub fn unipotent<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        kind: GroupKind,
        m: usize,
        n: usize,
        nvars: usize,
        truncation: u32,
    ) -> Result<GroupElementJet> {
        self.lie(rng, kind, m, n, nvars, truncation)?.exp()
    }
}
