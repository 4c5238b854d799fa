use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{array_response, complex_noise, inner, to_db, UpaGeometry};
use crate::geom::SphericalAngles;
use crate::Scalar;

/// Single-path channel `H = √(N_t N_r) g a_r(aoa) a_t(aod)^H`.
///
/// `aod` is local to the transmit array and `aoa` to the receive array.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    pub gain: Complex<T>,
    pub aod: SphericalAngles<T>,
    pub aoa: SphericalAngles<T>,
    pub path_length: T,
    pub tx: UpaGeometry<T>,
    pub rx: UpaGeometry<T>,
}

impl<T: Scalar> ChannelRealization<T> {
    /// Draws the complex gain from `CN(0, 1)`.
    pub fn draw<R>(
        rng: &mut R,
        aod: SphericalAngles<T>,
        aoa: SphericalAngles<T>,
        path_length: T,
        tx: UpaGeometry<T>,
        rx: UpaGeometry<T>,
    ) -> Self
    where
        R: Rng + ?Sized,
        StandardNormal: Distribution<T>,
    {
        Self {
            gain: complex_noise(rng, T::one()),
            aod,
            aoa,
            path_length,
            tx,
            rx,
        }
    }

    pub fn tx_response(&self) -> Vec<Complex<T>> {
        array_response(&self.tx, self.aod)
    }

    pub fn rx_response(&self) -> Vec<Complex<T>> {
        array_response(&self.rx, self.aoa)
    }

    /// `√(N_t N_r) g`.
    pub fn scaled_gain(&self) -> Complex<T> {
        let n = T::from_usize(self.tx.len() * self.rx.len()).expect("size");
        self.gain * n.sqrt()
    }

    /// Dense `N_r × N_t` channel matrix, row-major.
    pub fn matrix(&self) -> Vec<Vec<Complex<T>>> {
        let at = self.tx_response();
        let ar = self.rx_response();
        let g = self.scaled_gain();
        ar.iter()
            .map(|r| at.iter().map(|t| g * r * t.conj()).collect())
            .collect()
    }

    /// `w^H H f` evaluated through the rank-one factorisation.
    pub fn effective_gain(&self, f: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        let tx = inner(&self.tx_response(), f);
        let rx = inner(w, &self.rx_response());
        self.scaled_gain() * rx * tx
    }

    /// SNR with perfectly matched beams, `p_t N_t N_r |g|² / σ²`, in dB.
    pub fn matched_snr_db(&self, p_t: T, noise_var: T) -> T {
        to_db(p_t * self.scaled_gain().norm_sqr() / noise_var)
    }
}

/// `10 log10(p_t |w^H H f|² / σ²)`.
pub fn received_snr<T: Scalar>(
    ch: &ChannelRealization<T>,
    f: &[Complex<T>],
    w: &[Complex<T>],
    p_t: T,
    noise_var: T,
) -> T {
    to_db(p_t * ch.effective_gain(f, w).norm_sqr() / noise_var)
}
