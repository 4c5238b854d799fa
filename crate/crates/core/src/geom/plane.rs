use super::{DirectionVector, GeomError};
use crate::scalar::wrap_two_pi;
use crate::{Scalar, Vec3};

/// Working plane spanned by an ordered basis `(b1, b2)`.
///
/// Holds the orthogonal projector `P = B (BᵀB)⁻¹ Bᵀ` with `B = [b1 b2]`, and
/// the unit normal `n = (b1 × b2)/|b1 × b2|` that fixes the plane orientation:
/// "clockwise" is clockwise as seen from the `+n` side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionPlane<T> {
    b1: Vec3<T>,
    b2: Vec3<T>,
    matrix: [[T; 3]; 3],
    normal: Vec3<T>,
}

impl<T: Scalar> ProjectionPlane<T> {
    pub fn new(b1: Vec3<T>, b2: Vec3<T>) -> Result<Self, GeomError> {
        let n = b1.cross(b2);
        let scale = b1.norm() * b2.norm();
        if !(scale > T::zero()) || n.norm() <= scale * T::lit(1e-12) {
            return Err(GeomError::DependentBasis);
        }
        let normal = n / n.norm();

        // Gram matrix G = BᵀB and its inverse
        let g11 = b1.dot(b1);
        let g12 = b1.dot(b2);
        let g22 = b2.dot(b2);
        let det = g11 * g22 - g12 * g12;
        let (i11, i12, i22) = (g22 / det, -g12 / det, g11 / det);

        let b1a = b1.to_array();
        let b2a = b2.to_array();
        let mut matrix = [[T::zero(); 3]; 3];
        for (r, row) in matrix.iter_mut().enumerate() {
            for (c, m) in row.iter_mut().enumerate() {
                *m = b1a[r] * (i11 * b1a[c] + i12 * b2a[c]) + b2a[r] * (i12 * b1a[c] + i22 * b2a[c]);
            }
        }
        Ok(Self {
            b1,
            b2,
            matrix,
            normal,
        })
    }

    /// The YOZ plane, basis `(ŷ, ẑ)`, normal `+x̂`.
    pub fn yoz() -> Self {
        Self::new(Vec3::from_f64(0.0, 1.0, 0.0), Vec3::from_f64(0.0, 0.0, 1.0)).expect("basis")
    }

    /// The XOY plane, basis `(x̂, ŷ)`, normal `+ẑ`.
    pub fn xoy() -> Self {
        Self::new(Vec3::from_f64(1.0, 0.0, 0.0), Vec3::from_f64(0.0, 1.0, 0.0)).expect("basis")
    }

    /// The XOZ plane, basis `(x̂, ẑ)`, normal `-ŷ`.
    pub fn xoz() -> Self {
        Self::new(Vec3::from_f64(1.0, 0.0, 0.0), Vec3::from_f64(0.0, 0.0, 1.0)).expect("basis")
    }

    pub fn basis(&self) -> (Vec3<T>, Vec3<T>) {
        (self.b1, self.b2)
    }

    pub fn matrix(&self) -> [[T; 3]; 3] {
        self.matrix
    }

    pub fn normal(&self) -> Vec3<T> {
        self.normal
    }

    /// `P v` without any degeneracy check.
    pub fn apply(&self, v: Vec3<T>) -> Vec3<T> {
        let m = &self.matrix;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }
}

/// Projects a direction onto the plane.
///
/// Fails with [`GeomError::DegenerateProjection`] when `|P e| < eps_proj`.
pub fn project<T: Scalar>(
    plane: &ProjectionPlane<T>,
    e: &DirectionVector<T>,
    eps_proj: T,
) -> Result<Vec3<T>, GeomError> {
    let p = plane.apply(e.vector());
    let n = p.norm();
    if n < eps_proj {
        return Err(GeomError::DegenerateProjection {
            norm: n.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(p)
}

/// Clockwise angle in `[0, 2π)` that rotates `p` onto `q`, viewed from the
/// `+n` side of the plane.
pub fn clockwise_angle<T: Scalar>(
    plane: &ProjectionPlane<T>,
    p: Vec3<T>,
    q: Vec3<T>,
    eps: T,
) -> Result<T, GeomError> {
    if p.norm() < eps || q.norm() < eps {
        return Err(GeomError::ZeroVector);
    }
    let counter_clockwise = plane.normal.dot(p.cross(q)).atan2(p.dot(q));
    Ok(wrap_two_pi(-counter_clockwise))
}

/// `min(α, 2π − α)`: strips the orientation from a clockwise angle.
pub fn reflex_reduce<T: Scalar>(alpha: T) -> T {
    alpha.min(T::two_pi() - alpha)
}
