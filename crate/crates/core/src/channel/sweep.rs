use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{complex_noise, inner, to_db, ChannelRealization, Codebook, UpaGeometry};
use crate::geom::SphericalAngles;
use crate::Scalar;

/// Winner of a beam sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOutcome<T> {
    pub tx_index: usize,
    pub rx_index: usize,
    pub aod: SphericalAngles<T>,
    pub aoa: SphericalAngles<T>,
    /// Measured power over noise of the winning pair, dB.
    pub snr_db: T,
}

/// Per-codeword responses of one side, kept as the two axis factors of the
/// Kronecker codebook: codeword `i = ih · len_v + iv` has gain `h[ih] · v[iv]`.
struct AxisGains<T> {
    h: Vec<Complex<T>>,
    v: Vec<Complex<T>>,
    h_abs: Vec<T>,
    v_abs: Vec<T>,
}

impl<T: Scalar> AxisGains<T> {
    /// `a^H f_i` for every codeword; `conj` flips to `w_j^H a` on the receive side.
    fn new(cb: &Codebook<T>, geom: &UpaGeometry<T>, a: SphericalAngles<T>, conj: bool) -> Self {
        let s = super::angles_to_spatial(a);
        let kd = geom.kd();
        let ah = super::axis_response(geom.n_h, kd, s.u);
        let av = super::axis_response(geom.n_v, kd, s.v);
        let fix = |g: Complex<T>| if conj { g.conj() } else { g };
        let h: Vec<_> = cb.h_weights().iter().map(|f| fix(inner(&ah, f))).collect();
        let v: Vec<_> = cb.v_weights().iter().map(|f| fix(inner(&av, f))).collect();
        let h_abs = h.iter().map(|g| g.norm()).collect();
        let v_abs = v.iter().map(|g| g.norm()).collect();
        Self { h, v, h_abs, v_abs }
    }

    fn len(&self) -> usize {
        self.h.len() * self.v.len()
    }

    fn split(&self, i: usize) -> (usize, usize) {
        (i / self.v.len(), i % self.v.len())
    }

    fn gain(&self, i: usize) -> Complex<T> {
        let (ih, iv) = self.split(i);
        self.h[ih] * self.v[iv]
    }

    fn abs(&self, i: usize) -> T {
        let (ih, iv) = self.split(i);
        self.h_abs[ih] * self.v_abs[iv]
    }

    /// Index and magnitude of the strongest codeword (first on ties).
    fn peak(&self) -> (usize, T) {
        let arg = |xs: &[T]| {
            xs.iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |best, (k, &x)| if x > best.1 { (k, x) } else { best })
        };
        let (ih, mh) = arg(&self.h_abs);
        let (iv, mv) = arg(&self.v_abs);
        (ih * self.v.len() + iv, mh * mv)
    }

    /// Ascending indices of codewords with magnitude at least `threshold`,
    /// and the largest magnitude among the others.
    fn split_strong(&self, threshold: T) -> (Vec<usize>, T) {
        let vmax = self.v_abs.iter().fold(T::zero(), |m, &x| m.max(x));
        let mut strong = Vec::new();
        let mut weak = T::zero();
        for (ih, &a) in self.h_abs.iter().enumerate() {
            if a * vmax < threshold {
                weak = weak.max(a * vmax);
                continue;
            }
            for (iv, &b) in self.v_abs.iter().enumerate() {
                if a * b >= threshold {
                    strong.push(ih * self.v.len() + iv);
                } else {
                    weak = weak.max(a * b);
                }
            }
        }
        (strong, weak)
    }
}

/// Union bound below which skipping the remaining (weak) pairs is treated
/// as exact.
const SKIP_PROBABILITY: f64 = 1e-15;

/// Fraction of the per-side peak codeword amplitude that makes a codeword
/// "strong".
const STRONG_FRACTION: f64 = 0.5;

/// Exhaustive beam sweep over every `(f_i, w_j)` pair with one noisy
/// measurement `y = √p_t w^H H f + w^H n` each; the pair with the largest
/// `|y|²` wins.
///
/// Pairs are visited strong-first. Once the best strong measurement makes it
/// less likely than [`SKIP_PROBABILITY`] (union bound over all weak pairs)
/// that any weak pair could overtake it, the weak pairs are not drawn.
/// Otherwise every pair gets its own independent draw. `noise_var = 0` runs a
/// noiseless sweep.
pub fn beam_sweep<T, R>(
    ch: &ChannelRealization<T>,
    tx_cb: &Codebook<T>,
    rx_cb: &Codebook<T>,
    p_t: T,
    noise_var: T,
    rng: &mut R,
) -> SweepOutcome<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    assert!(!tx_cb.is_empty() && !rx_cb.is_empty(), "empty codebook");
    let gt = AxisGains::new(tx_cb, &ch.tx, ch.aod, false);
    let gr = AxisGains::new(rx_cb, &ch.rx, ch.aoa, true);
    let amp = ch.scaled_gain() * p_t.sqrt();

    let finish = |i: usize, j: usize, power: T| SweepOutcome {
        tx_index: i,
        rx_index: j,
        aod: tx_cb.steering(i),
        aoa: rx_cb.steering(j),
        snr_db: to_db(power / noise_var),
    };

    let (ti, t_max) = gt.peak();
    let (rj, r_max) = gr.peak();

    if noise_var == T::zero() {
        let power = (amp * gr.gain(rj) * gt.gain(ti)).norm_sqr();
        return finish(ti, rj, power);
    }

    let frac = T::lit(STRONG_FRACTION);
    let (strong_t, weak_t) = gt.split_strong(frac * t_max);
    let (strong_r, weak_r) = gr.split_strong(frac * r_max);

    let mut best = (0, 0, T::neg_infinity());
    let measure = |i: usize, j: usize, rng: &mut R, best: &mut (usize, usize, T)| {
        let y = amp * gr.gain(j) * gt.gain(i) + complex_noise(rng, noise_var);
        let p = y.norm_sqr();
        if p > best.2 {
            *best = (i, j, p);
        }
    };

    for &i in &strong_t {
        for &j in &strong_r {
            measure(i, j, rng, &mut best);
        }
    }

    let weak_amp = amp.norm() * (weak_t * r_max).max(t_max * weak_r);
    let n_strong = strong_t.len() * strong_r.len();
    let n_weak = T::from_usize(gt.len() * gr.len() - n_strong).expect("count");

    // |s + n| ≥ √P needs |n| ≥ √P − |s|; P(|n|² ≥ x) = exp(−x/σ²)
    let margin = best.2.sqrt() - weak_amp;
    let skip = n_weak == T::zero()
        || (margin > T::zero() && n_weak * (-(margin * margin) / noise_var).exp() < T::lit(SKIP_PROBABILITY));
    if !skip {
        let (frac_t, frac_r) = (frac * t_max, frac * r_max);
        for i in 0..gt.len() {
            let strong_i = gt.abs(i) >= frac_t;
            for j in 0..gr.len() {
                if !(strong_i && gr.abs(j) >= frac_r) {
                    measure(i, j, rng, &mut best);
                }
            }
        }
    }
    finish(best.0, best.1, best.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_codebook, received_snr, spatial_to_angles, Spatial};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn upa(n_h: usize, n_v: usize) -> UpaGeometry<f64> {
        UpaGeometry::half_wavelength(n_h, n_v, 60e9).unwrap()
    }

    fn channel(tx: UpaGeometry<f64>, rx: UpaGeometry<f64>, aod: SphericalAngles<f64>, aoa: SphericalAngles<f64>) -> ChannelRealization<f64> {
        ChannelRealization {
            gain: Complex::new(0.8, -0.3),
            aod,
            aoa,
            path_length: 4.0,
            tx,
            rx,
        }
    }

    #[test]
    fn noiseless_on_grid_returns_path_angles() {
        let (tx, rx) = (upa(8, 4), upa(4, 8));
        let (tcb, rcb) = (build_codebook(tx, 1), build_codebook(rx, 1));
        let aod = tcb.steering(13);
        let aoa = rcb.steering(22);
        let ch = channel(tx, rx, aod, aoa);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = beam_sweep(&ch, &tcb, &rcb, 1.0, 0.0, &mut rng);
        assert_eq!((out.tx_index, out.rx_index), (13, 22));
        assert_eq!(out.aod, aod);
        assert_eq!(out.aoa, aoa);
    }

    #[test]
    fn noiseless_off_grid_matches_exhaustive_oracle() {
        let (tx, rx) = (upa(4, 4), upa(4, 4));
        let (tcb, rcb) = (build_codebook(tx, 1), build_codebook(rx, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let aod = spatial_to_angles(Spatial { u: rng.random_range(-0.8..0.8), v: rng.random_range(-0.6..0.6) });
            let aoa = spatial_to_angles(Spatial { u: rng.random_range(-0.8..0.8), v: rng.random_range(-0.6..0.6) });
            let ch = channel(tx, rx, aod, aoa);
            // brute force over materialised codewords
            let mut best = (0, 0, f64::NEG_INFINITY);
            for i in 0..tcb.len() {
                let f = tcb.weights(i);
                for j in 0..rcb.len() {
                    let s = received_snr(&ch, &f, &rcb.weights(j), 1.0, 1.0);
                    if s > best.2 {
                        best = (i, j, s);
                    }
                }
            }
            let out = beam_sweep(&ch, &tcb, &rcb, 1.0, 0.0, &mut rng);
            assert_eq!((out.tx_index, out.rx_index), (best.0, best.1));
            // and it is the nearest grid point in spatial frequency
            let s = crate::channel::angles_to_spatial(aod);
            let nearest = |grid: &[f64], x: f64| {
                (0..grid.len()).min_by(|&a, &b| (grid[a] - x).abs().total_cmp(&(grid[b] - x).abs())).unwrap()
            };
            let (ih, iv) = tcb.split_index(out.tx_index);
            assert_eq!(ih, nearest(tcb.u_grid(), s.u));
            assert_eq!(iv, nearest(tcb.v_grid(), s.v));
        }
    }

    #[test]
    fn huge_noise_picks_uniformly() {
        let (tx, rx) = (upa(2, 2), upa(2, 2));
        let (tcb, rcb) = (build_codebook(tx, 1), build_codebook(rx, 1));
        let ch = channel(tx, rx, tcb.steering(0), rcb.steering(0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pairs = tcb.len() * rcb.len();
        let mut counts = vec![0usize; pairs];
        let n = 10_000;
        for _ in 0..n {
            let out = beam_sweep(&ch, &tcb, &rcb, 1.0, 1e12, &mut rng);
            counts[out.tx_index * rcb.len() + out.rx_index] += 1;
        }
        let expected = n as f64 / pairs as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 15 degrees of freedom, 1% critical value
        assert!(chi2 < 30.578, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn pruned_sweep_agrees_with_brute_force_distribution() {
        // moderate SNR where pruning kicks in: compare the winner histogram of
        // the pruned sweep against a brute-force noisy sweep
        let (tx, rx) = (upa(4, 1), upa(4, 1));
        let (tcb, rcb) = (build_codebook(tx, 1), build_codebook(rx, 1));
        let aod = spatial_to_angles(Spatial { u: 0.3, v: 0.0 });
        let aoa = spatial_to_angles(Spatial { u: -0.1, v: 0.0 });
        let ch = channel(tx, rx, aod, aoa);
        let noise = 4.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let pairs = tcb.len() * rcb.len();
        let mut pruned = vec![0usize; pairs];
        let mut brute = vec![0usize; pairs];
        let fs: Vec<_> = (0..tcb.len()).map(|i| tcb.weights(i)).collect();
        let ws: Vec<_> = (0..rcb.len()).map(|j| rcb.weights(j)).collect();
        for _ in 0..n {
            let out = beam_sweep(&ch, &tcb, &rcb, 1.0, noise, &mut rng);
            pruned[out.tx_index * rcb.len() + out.rx_index] += 1;
            let mut best = (0, f64::NEG_INFINITY);
            for (i, f) in fs.iter().enumerate() {
                for (j, w) in ws.iter().enumerate() {
                    let y = ch.effective_gain(f, w) + complex_noise(&mut rng, noise);
                    if y.norm_sqr() > best.1 {
                        best = (i * rcb.len() + j, y.norm_sqr());
                    }
                }
            }
            brute[best.0] += 1;
        }
        // two-sample chi-square over cells with enough mass
        let mut chi2 = 0.0;
        let mut dof = 0;
        for k in 0..pairs {
            let tot = (pruned[k] + brute[k]) as f64;
            if tot >= 20.0 {
                chi2 += (pruned[k] as f64 - brute[k] as f64).powi(2) / tot;
                dof += 1;
            }
        }
        assert!(dof > 1);
        // generous bound: mean dof, sd sqrt(2 dof)
        assert!(chi2 < dof as f64 + 5.0 * (2.0 * dof as f64).sqrt(), "chi2 {chi2} dof {dof}");
    }

    #[test]
    fn larger_codebook_never_worse_noiseless() {
        let (tx, rx) = (upa(4, 4), upa(4, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let aod = spatial_to_angles(Spatial { u: rng.random_range(-0.8..0.8), v: rng.random_range(-0.6..0.6) });
            let aoa = spatial_to_angles(Spatial { u: rng.random_range(-0.8..0.8), v: rng.random_range(-0.6..0.6) });
            let ch = channel(tx, rx, aod, aoa);
            let s = |o: usize, rng: &mut ChaCha8Rng| {
                let out = beam_sweep(&ch, &build_codebook(tx, o), &build_codebook(rx, o), 1.0, 0.0, rng);
                received_snr(
                    &ch,
                    &build_codebook(tx, o).weights(out.tx_index),
                    &build_codebook(rx, o).weights(out.rx_index),
                    1.0,
                    1.0,
                )
            };
            let s1 = s(1, &mut rng);
            let s3 = s(3, &mut rng);
            // midpoint grids nest under a factor of 3
            assert!(s3 >= s1 - 1e-9, "{s1} {s3}");
        }
    }
}
