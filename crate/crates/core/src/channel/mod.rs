//! mmWave physical layer: UPA steering vectors, the single-path rank-one
//! channel, Kronecker-product codebooks, exhaustive beam sweeps and
//! auxiliary-beam (amplitude comparison) angle refinement.
//!
//! Angles handled here are array-local: the array lies in its local YOZ
//! plane and broadside is local `+x`. [`ArrayMount`] converts to and from the
//! common frame.

mod codebook;
mod link;
mod monopulse;
mod sweep;
mod upa;

pub use codebook::{build_codebook, Codebook, Coverage};
pub use link::{received_snr, ChannelRealization};
pub use monopulse::{aux_beam_refine, AuxOffsets, Side};
pub use sweep::{beam_sweep, SweepOutcome};
pub use upa::{
    angles_to_spatial, array_response, array_response_spatial, axis_response, spatial_to_angles,
    ArrayMount, Spatial, UpaGeometry,
};

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::Scalar;

/// `Σ conj(a_k) b_k`.
pub fn inner<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// One draw of circularly-symmetric complex Gaussian noise with variance `var`.
pub fn complex_noise<T, R>(rng: &mut R, var: T) -> Complex<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let s = (var / T::lit(2.0)).sqrt();
    let re: T = StandardNormal.sample(rng);
    let im: T = StandardNormal.sample(rng);
    Complex::new(re * s, im * s)
}

/// `10 log10(x)`, with `x = 0` mapping to `-∞`.
pub fn to_db<T: Scalar>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

pub fn from_db<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}
