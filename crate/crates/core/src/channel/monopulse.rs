use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{
    angles_to_spatial, array_response_spatial, complex_noise, spatial_to_angles, ChannelRealization, Codebook,
    Coverage, Spatial,
};
use crate::geom::SphericalAngles;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Tx,
    Rx,
}

/// Offsets of the auxiliary beams from the coarse beam, in spatial frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxOffsets<T> {
    pub horizontal: T,
    pub vertical: T,
}

impl<T: Scalar> AuxOffsets<T> {
    /// Half the codebook grid spacing on each axis.
    pub fn half_grid(cb: &Codebook<T>) -> Self {
        let (du, dv) = cb.spacing();
        Self {
            horizontal: du * T::lit(0.5),
            vertical: dv * T::lit(0.5),
        }
    }
}

/// Squared magnitude of the normalised `n`-element array factor at spatial
/// frequency offset `y`.
fn array_factor_sq<T: Scalar>(n: usize, kd: T, y: T) -> T {
    let half = kd * y * T::lit(0.5);
    let s = half.sin();
    if s.abs() < T::epsilon() {
        return T::one();
    }
    let nf = T::from_usize(n).expect("size");
    let r = (nf * half).sin() / (nf * s);
    r * r
}

/// Offset `x` of the path from the coarse beam such that the array-factor
/// power ratio `|AF(x − δ)|² / |AF(x + δ)|²` equals `p_plus / p_minus`.
///
/// The log-ratio is odd and strictly increasing in `x` while both beams keep
/// the path inside their main lobe, so it is inverted by bisection on that
/// interval; ratios beyond its ends saturate.
pub(crate) fn invert_ratio<T: Scalar>(p_plus: T, p_minus: T, n: usize, kd: T, delta: T) -> T {
    if n < 2 || !(delta > T::zero()) {
        return T::zero();
    }
    let first_null = T::two_pi() / (T::from_usize(n).expect("size") * kd);
    let limit = (first_null - delta) * (T::one() - T::lit(1e-9));
    if !(limit > T::zero()) {
        return T::zero();
    }
    match (p_plus > T::zero(), p_minus > T::zero()) {
        (false, false) => return T::zero(),
        (true, false) => return limit,
        (false, true) => return -limit,
        _ => {}
    }
    let target = p_plus.ln() - p_minus.ln();
    let ratio = |x: T| array_factor_sq(n, kd, x - delta).ln() - array_factor_sq(n, kd, x + delta).ln();
    let (mut lo, mut hi) = (-limit, limit);
    if target >= ratio(hi) {
        return hi;
    }
    if target <= ratio(lo) {
        return lo;
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::lit(0.5)
}

/// Refines one side's coarse angles with two auxiliary beam pairs.
///
/// Each pair is steered at the coarse spatial frequency `± offset` along one
/// axis (horizontal `u = sin φ sin θ`, vertical `v = cos θ`) while the other
/// side keeps its `partner` beam. The measured power ratio of a pair is
/// inverted through the array factor of that axis. An axis whose two
/// measurements are both below the noise floor keeps its coarse value. The
/// result is clamped to `coverage`.
#[allow(clippy::too_many_arguments)]
pub fn aux_beam_refine<T, R>(
    ch: &ChannelRealization<T>,
    coarse: SphericalAngles<T>,
    side: Side,
    partner: &[Complex<T>],
    offsets: AuxOffsets<T>,
    coverage: &Coverage<T>,
    p_t: T,
    noise_var: T,
    rng: &mut R,
) -> SphericalAngles<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let geom = match side {
        Side::Tx => ch.tx,
        Side::Rx => ch.rx,
    };
    let kd = geom.kd();
    let s0 = angles_to_spatial(coarse);
    let amp = p_t.sqrt();
    let mut measure = |s: Spatial<T>| {
        let beam = array_response_spatial(&geom, s);
        let g = match side {
            Side::Tx => ch.effective_gain(&beam, partner),
            Side::Rx => ch.effective_gain(partner, &beam),
        };
        let y = g * amp
            + if noise_var > T::zero() {
                complex_noise(rng, noise_var)
            } else {
                Complex::new(T::zero(), T::zero())
            };
        y.norm_sqr()
    };

    let (dh, dv) = (offsets.horizontal, offsets.vertical);
    let hp = measure(Spatial { u: s0.u + dh, v: s0.v });
    let hm = measure(Spatial { u: s0.u - dh, v: s0.v });
    let vp = measure(Spatial { u: s0.u, v: s0.v + dv });
    let vm = measure(Spatial { u: s0.u, v: s0.v - dv });

    let below = |a: T, b: T| noise_var > T::zero() && a < noise_var && b < noise_var;
    let du = if below(hp, hm) {
        T::zero()
    } else {
        invert_ratio(hp, hm, geom.n_h, kd, dh)
    };
    let dv_est = if below(vp, vm) {
        T::zero()
    } else {
        invert_ratio(vp, vm, geom.n_v, kd, dv)
    };
    spatial_to_angles(coverage.clamp(Spatial {
        u: s0.u + du,
        v: s0.v + dv_est,
    }))
}
