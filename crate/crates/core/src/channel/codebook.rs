use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{axis_response, spatial_to_angles, Spatial, UpaGeometry};
use crate::geom::SphericalAngles;
use crate::Scalar;

/// Angular coverage of an array around broadside, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage<T> {
    pub azimuth_span: T,
    pub elevation_span: T,
}

impl<T: Scalar> Default for Coverage<T> {
    /// 120° in azimuth and 90° in elevation.
    fn default() -> Self {
        Self {
            azimuth_span: T::lit(120f64.to_radians()),
            elevation_span: T::lit(90f64.to_radians()),
        }
    }
}

impl<T: Scalar> Coverage<T> {
    pub fn contains(&self, a: &SphericalAngles<T>) -> bool {
        let half = T::lit(0.5);
        a.azimuth.abs() <= self.azimuth_span * half
            && (a.elevation - T::FRAC_PI_2()).abs() <= self.elevation_span * half
    }

    /// Horizontal spatial-frequency range `[-sin(span/2), sin(span/2)]`.
    pub fn u_range(&self) -> (T, T) {
        let s = (self.azimuth_span * T::lit(0.5)).sin();
        (-s, s)
    }

    /// Vertical spatial-frequency range `[-sin(span/2), sin(span/2)]`.
    pub fn v_range(&self) -> (T, T) {
        let s = (self.elevation_span * T::lit(0.5)).sin();
        (-s, s)
    }

    pub fn clamp(&self, s: Spatial<T>) -> Spatial<T> {
        let (ul, uh) = self.u_range();
        let (vl, vh) = self.v_range();
        Spatial {
            u: s.u.max(ul).min(uh),
            v: s.v.max(vl).min(vh),
        }
    }
}

/// Kronecker-product codebook: a horizontal and a vertical steering grid,
/// each uniform in spatial frequency over the coverage, combined pairwise.
///
/// Codeword `i = ih · len_v + iv` is `f_h(ih) ⊗ f_v(iv)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T> {
    geom: UpaGeometry<T>,
    coverage: Coverage<T>,
    u_grid: Vec<T>,
    v_grid: Vec<T>,
    h_weights: Vec<Vec<Complex<T>>>,
    v_weights: Vec<Vec<Complex<T>>>,
}

fn midpoint_grid<T: Scalar>(lo: T, hi: T, m: usize) -> Vec<T> {
    let step = (hi - lo) / T::from_usize(m).expect("size");
    (0..m)
        .map(|i| lo + (T::from_usize(i).expect("index") + T::lit(0.5)) * step)
        .collect()
}

impl<T: Scalar> Codebook<T> {
    pub fn new(geom: UpaGeometry<T>, coverage: Coverage<T>, oversampling: usize) -> Self {
        let oversampling = oversampling.max(1);
        let (ul, uh) = coverage.u_range();
        let (vl, vh) = coverage.v_range();
        let u_grid = midpoint_grid(ul, uh, oversampling * geom.n_h);
        let v_grid = midpoint_grid(vl, vh, oversampling * geom.n_v);
        let kd = geom.kd();
        let h_weights = u_grid.iter().map(|&u| axis_response(geom.n_h, kd, u)).collect();
        let v_weights = v_grid.iter().map(|&v| axis_response(geom.n_v, kd, v)).collect();
        Self {
            geom,
            coverage,
            u_grid,
            v_grid,
            h_weights,
            v_weights,
        }
    }

    pub fn geometry(&self) -> &UpaGeometry<T> {
        &self.geom
    }

    pub fn coverage(&self) -> &Coverage<T> {
        &self.coverage
    }

    pub fn len(&self) -> usize {
        self.u_grid.len() * self.v_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u_grid(&self) -> &[T] {
        &self.u_grid
    }

    pub fn v_grid(&self) -> &[T] {
        &self.v_grid
    }

    pub(crate) fn h_weights(&self) -> &[Vec<Complex<T>>] {
        &self.h_weights
    }

    pub(crate) fn v_weights(&self) -> &[Vec<Complex<T>>] {
        &self.v_weights
    }

    /// Grid spacing in spatial frequency, `(Δu, Δv)`.
    pub fn spacing(&self) -> (T, T) {
        let (ul, uh) = self.coverage.u_range();
        let (vl, vh) = self.coverage.v_range();
        (
            (uh - ul) / T::from_usize(self.u_grid.len()).expect("size"),
            (vh - vl) / T::from_usize(self.v_grid.len()).expect("size"),
        )
    }

    pub fn split_index(&self, i: usize) -> (usize, usize) {
        (i / self.v_grid.len(), i % self.v_grid.len())
    }

    pub fn spatial(&self, i: usize) -> Spatial<T> {
        let (ih, iv) = self.split_index(i);
        Spatial {
            u: self.u_grid[ih],
            v: self.v_grid[iv],
        }
    }

    pub fn steering(&self, i: usize) -> SphericalAngles<T> {
        spatial_to_angles(self.spatial(i))
    }

    /// Full unit-norm weight vector of codeword `i`.
    pub fn weights(&self, i: usize) -> Vec<Complex<T>> {
        let (ih, iv) = self.split_index(i);
        let v = &self.v_weights[iv];
        self.h_weights[ih]
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<Complex<T>>, SphericalAngles<T>)> + '_ {
        (0..self.len()).map(move |i| (self.weights(i), self.steering(i)))
    }
}

/// Builds the default-coverage Kronecker codebook with `oversampling × n`
/// grid points per axis.
pub fn build_codebook<T: Scalar>(geom: UpaGeometry<T>, oversampling: usize) -> Codebook<T> {
    Codebook::new(geom, Coverage::default(), oversampling)
}
