use serde::{Deserialize, Serialize};

use super::{
    clockwise_angle, classify_scene, in_collinear_set, project, reflex_reduce, CollinearWith,
    DirectionVector, GeomError, PathObservation, ProjectionPlane, SceneType, Tolerances,
};
use crate::scalar::wrap_two_pi;
use crate::{Scalar, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Minus => -T::one(),
            Sign::Plus => T::one(),
        }
    }
}

/// Values computed on the way to `d_s1`, kept for auditing.
///
/// λ₁ (λ₂) is the interior angle at the projection of target 1 between the
/// rays toward the projected AP (STA) and the projected target 2. For a scene
/// collinear with the STA the role-swapped signs are stored in
/// `delta_a1`/`delta_a2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverIntermediates<T> {
    pub lambda1: Option<T>,
    pub lambda2: Option<T>,
    pub beta_a1: T,
    pub beta_a2: T,
    pub beta_s1: T,
    pub beta_s2: T,
    pub alpha_a1a2: T,
    pub alpha_s1s2: T,
    pub alpha_a1s1: T,
    pub alpha_a2s2: T,
    pub omega1: Option<T>,
    pub omega2: Option<T>,
    pub g1: T,
    pub g2: T,
    pub delta_lambda1: Option<Sign>,
    pub delta_a1: Option<Sign>,
    pub delta_a2: Option<Sign>,
    /// `d_a1 = c1 − d_s1`.
    pub distance_ap_target: T,
    /// In-plane distance between the projected targets, `d_o cos β_o`.
    pub projected_target_separation: Option<T>,
    /// Relative residual of the path-length ratio relation (separate scenes).
    pub residual: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveResult<T> {
    /// Unit direction from the STA toward target 1.
    pub direction: DirectionVector<T>,
    /// Distance from the STA to target 1, meters.
    pub distance: T,
    pub scene: SceneType,
    pub intermediates: SolverIntermediates<T>,
}

/// Direction vectors, their projections and the clockwise angles between
/// them for a (current, historical) pair of observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry<T> {
    pub e_a1: DirectionVector<T>,
    pub e_a2: DirectionVector<T>,
    pub e_s1: DirectionVector<T>,
    pub e_s2: DirectionVector<T>,
    pub p_a1: Vec3<T>,
    pub p_a2: Vec3<T>,
    pub p_s1: Vec3<T>,
    pub p_s2: Vec3<T>,
    pub alpha_a1a2: T,
    pub alpha_s1s2: T,
    pub alpha_a1s1: T,
    pub alpha_a2s2: T,
    pub c1: T,
    pub c2: T,
}

impl<T: Scalar> PairGeometry<T> {
    pub fn new(
        obs1: &PathObservation<T>,
        obs2: &PathObservation<T>,
        plane: &ProjectionPlane<T>,
        tol: &Tolerances<T>,
    ) -> Result<Self, GeomError> {
        if !(obs1.path_length > T::zero() && obs2.path_length > T::zero()) {
            return Err(GeomError::InconsistentGeometry("path lengths must be positive".into()));
        }
        let (e_a1, e_s1) = (obs1.departure(), obs1.arrival());
        let (e_a2, e_s2) = (obs2.departure(), obs2.arrival());
        let p_a1 = project(plane, &e_a1, tol.proj)?;
        let p_a2 = project(plane, &e_a2, tol.proj)?;
        let p_s1 = project(plane, &e_s1, tol.proj)?;
        let p_s2 = project(plane, &e_s2, tol.proj)?;
        Ok(Self {
            e_a1,
            e_a2,
            e_s1,
            e_s2,
            p_a1,
            p_a2,
            p_s1,
            p_s2,
            alpha_a1a2: clockwise_angle(plane, p_a1, p_a2, tol.proj)?,
            alpha_s1s2: clockwise_angle(plane, p_s1, p_s2, tol.proj)?,
            alpha_a1s1: clockwise_angle(plane, p_a1, p_s1, tol.proj)?,
            alpha_a2s2: clockwise_angle(plane, p_a2, p_s2, tol.proj)?,
            c1: obs1.path_length,
            c2: obs2.path_length,
        })
    }

    pub fn scene(&self, eps_col: T) -> SceneType {
        classify_scene(self.alpha_a1a2, self.alpha_s1s2, self.alpha_a1s1, eps_col)
    }

    /// `cos β` of each projected vector is simply its length.
    fn cos_betas(&self) -> [T; 4] {
        [self.p_a1.norm(), self.p_a2.norm(), self.p_s1.norm(), self.p_s2.norm()]
    }

    fn intermediates(&self) -> SolverIntermediates<T> {
        let beta = |e: &DirectionVector<T>, p: Vec3<T>| (e.vector() - p).norm().atan2(p.norm());
        SolverIntermediates {
            lambda1: None,
            lambda2: None,
            beta_a1: beta(&self.e_a1, self.p_a1),
            beta_a2: beta(&self.e_a2, self.p_a2),
            beta_s1: beta(&self.e_s1, self.p_s1),
            beta_s2: beta(&self.e_s2, self.p_s2),
            alpha_a1a2: self.alpha_a1a2,
            alpha_s1s2: self.alpha_s1s2,
            alpha_a1s1: self.alpha_a1s1,
            alpha_a2s2: self.alpha_a2s2,
            omega1: None,
            omega2: None,
            g1: T::zero(),
            g2: T::zero(),
            delta_lambda1: None,
            delta_a1: None,
            delta_a2: None,
            distance_ap_target: T::zero(),
            projected_target_separation: None,
            residual: None,
        }
    }
}

fn inconsistent<T>(msg: impl Into<String>) -> Result<T, GeomError> {
    Err(GeomError::InconsistentGeometry(msg.into()))
}

fn check_distance<T: Scalar>(d_s1: T, c1: T) -> Result<(), GeomError> {
    if d_s1 > T::zero() && d_s1 < c1 && d_s1.is_finite() {
        Ok(())
    } else {
        inconsistent(format!("d_s1 = {d_s1} outside (0, c1 = {c1})"))
    }
}

/// Open interval of λ₁ ∈ (0, π) for which `λ₂ = κ + δ·λ₁ (mod 2π)` also lies
/// in (0, π). `kappa` must already be reduced into `[0, 2π)`.
fn feasible_lambda1<T: Scalar>(kappa: T, delta: Sign) -> Option<(T, T)> {
    let pi = T::PI();
    let (lo, hi) = match delta {
        Sign::Minus => (T::zero().max(kappa - pi), pi.min(kappa)),
        Sign::Plus if kappa < pi => (T::zero(), pi - kappa),
        Sign::Plus => (T::two_pi() - kappa, pi),
    };
    (hi > lo).then_some((lo, hi))
}

/// Distance solver for separate targets (℘ ∈ {1, 2, 3, 4}).
///
/// The two sine-rule triangles at the projected AP and STA, tied together by
/// the path lengths `c1`, `c2`, reduce to `ω₁ sin λ₁ + ω₂ cos λ₁ = 0` once λ₂
/// is written as `κ + δ λ₁` for the scene's angle relation. The root in
/// (0, π) is unique; `d_s1 = g₂ c₁ / (g₁ + g₂)` follows.
pub fn solve_separate<T: Scalar>(
    obs1: &PathObservation<T>,
    obs2: &PathObservation<T>,
    plane: &ProjectionPlane<T>,
    scene: SceneType,
    tol: &Tolerances<T>,
) -> Result<SolveResult<T>, GeomError> {
    if !scene.is_separate() {
        return Err(GeomError::WrongScene(scene));
    }
    let geo = PairGeometry::new(obs1, obs2, plane, tol)?;
    separate_from_geometry(&geo, scene, tol)
}

fn separate_from_geometry<T: Scalar>(
    geo: &PairGeometry<T>,
    scene: SceneType,
    tol: &Tolerances<T>,
) -> Result<SolveResult<T>, GeomError> {
    let pi = T::PI();
    let [ca1, ca2, cs1, cs2] = geo.cos_betas();
    let a = reflex_reduce(geo.alpha_a1a2);
    let s = reflex_reduce(geo.alpha_s1s2);
    let (sin_a, cos_a) = a.sin_cos();
    let sin_s = s.sin();
    let (c1, c2) = (geo.c1, geo.c2);
    let ratio = c1 / c2;

    // λ₂ = κ + δ λ₁
    let (kappa, delta) = match scene {
        SceneType::Type1 => (T::two_pi() - geo.alpha_a1s1, Sign::Minus),
        SceneType::Type2 => (geo.alpha_a1s1, Sign::Minus),
        SceneType::Type3 => (-reflex_reduce(geo.alpha_a1s1), Sign::Plus),
        SceneType::Type4 => (reflex_reduce(geo.alpha_a1s1), Sign::Plus),
        other => return Err(GeomError::WrongScene(other)),
    };
    let d = delta.value::<T>();
    let (sin_k, cos_k) = kappa.sin_cos();
    let (sin_ks, cos_ks) = (kappa + s).sin_cos();

    let w1_terms = [
        cos_a * sin_s * ca2 * cs1 * cs2,
        d * cos_ks * sin_a * ca1 * ca2 * cs2,
        -ratio * sin_s * ca1 * cs1 * cs2,
        -d * ratio * cos_k * sin_a * ca1 * ca2 * cs1,
    ];
    let w2_terms = [
        sin_a * sin_s * ca2 * cs1 * cs2,
        sin_ks * sin_a * ca1 * ca2 * cs2,
        -ratio * sin_k * sin_a * ca1 * ca2 * cs1,
    ];
    let omega1 = w1_terms.iter().fold(T::zero(), |acc, &t| acc + t);
    let omega2 = w2_terms.iter().fold(T::zero(), |acc, &t| acc + t);
    let scale = w1_terms
        .iter()
        .chain(w2_terms.iter())
        .fold(T::zero(), |acc, &t| acc + t.abs());

    let kappa_r = wrap_two_pi(kappa);
    let lambda1 = if omega1.abs() + omega2.abs() <= scale * T::epsilon().sqrt() {
        // Every λ₁ satisfies the ratio relation: target 2 is virtual on the
        // AP–STA segment (a LoS path). Any feasible λ₁ yields the same d_s1.
        match feasible_lambda1(kappa_r, delta) {
            Some((lo, hi)) => (lo + hi) / T::lit(2.0),
            None => return inconsistent("no feasible λ1 for a degenerate ratio relation"),
        }
    } else {
        let l = (-omega2).atan2(omega1) % pi;
        if l < T::zero() {
            l + pi
        } else {
            l
        }
    };
    if !(lambda1 > T::zero() && lambda1 < pi) {
        return inconsistent(format!("λ1 = {lambda1} not in (0, π)"));
    }
    let lambda2 = wrap_two_pi(kappa + d * lambda1);
    if !(lambda2 > T::zero() && lambda2 < pi) {
        return inconsistent(format!("λ2 = {lambda2} not in (0, π)"));
    }
    if a + lambda1 >= pi || s + lambda2 >= pi {
        return inconsistent("projected triangles have no room for target 2");
    }

    let g1 = (a + lambda1).sin() * sin_s * cs1;
    let g2 = (s + lambda2).sin() * sin_a * ca1;
    let numer = g1 + g2;
    let denom = lambda1.sin() * sin_s * cs2 + lambda2.sin() * sin_a * ca2;
    let rhs = denom * c1 * ca1 * cs1;
    let residual = (numer * c2 * ca2 * cs2 - rhs).abs() / rhs.abs();
    if !(residual <= tol.residual) {
        return inconsistent(format!("ratio relation residual {residual:e} exceeds tolerance"));
    }

    let d_s1 = g2 * c1 / (g1 + g2);
    check_distance(d_s1, c1)?;

    let mut im = geo.intermediates();
    im.lambda1 = Some(lambda1);
    im.lambda2 = Some(lambda2);
    im.omega1 = Some(omega1);
    im.omega2 = Some(omega2);
    im.g1 = g1;
    im.g2 = g2;
    im.delta_lambda1 = Some(delta);
    im.distance_ap_target = c1 - d_s1;
    im.projected_target_separation = Some(d_s1 * cs1 * sin_s / (s + lambda2).sin());
    im.residual = Some(residual);
    Ok(SolveResult {
        direction: geo.e_s1,
        distance: d_s1,
        scene,
        intermediates: im,
    })
}

struct CollinearSolution<T> {
    /// Distance from the non-collinear terminal to target 1.
    distance: T,
    lambda: T,
    delta1: Sign,
    delta2: Sign,
    g1: T,
    g2: T,
    separation: T,
}

/// Collinear-targets solver written for the terminal `x` whose projection is
/// on the target line and the other terminal `y`.
///
/// `r_xx = ℜ(α(x1,x2))`, `r11 = ℜ(α(x1,y1))`, `r22 = ℜ(α(x2,y2))`,
/// `other = ℜ(α(y1,y2))`; cosines are `cos β` of the projected vectors.
#[allow(clippy::too_many_arguments)]
fn collinear_core<T: Scalar>(
    r_xx: T,
    r11: T,
    r22: T,
    other: T,
    [cx1, cx2, cy1, cy2]: [T; 4],
    c1: T,
    c2: T,
    eps: T,
) -> Result<CollinearSolution<T>, GeomError> {
    let pi = T::PI();
    let (delta1, delta2, lambda) = if r_xx < pi / T::lit(2.0) {
        // both targets on the same side of x: the farther one has the
        // smaller angle between its x- and y-rays
        if (r11 - r22).abs() <= eps {
            return inconsistent("targets coincide in projection");
        }
        if r11 < r22 {
            (Sign::Plus, Sign::Minus, r11)
        } else {
            (Sign::Minus, Sign::Plus, pi - r11)
        }
    } else {
        (Sign::Plus, Sign::Plus, r11)
    };
    let (d1, d2) = (delta1.value::<T>(), delta2.value::<T>());
    let sin_l = lambda.sin();
    if !(sin_l > T::zero()) || lambda + other >= pi {
        return inconsistent(format!("λ = {lambda} admits no triangle"));
    }
    let sin_o = other.sin();
    let sin_lo = (lambda + other).sin();
    let g1 = c2 * sin_o * cy1 * cy2 + d1 * c2 * sin_lo * cx1 * cy2 - d1 * c1 * sin_l * cx1 * cy1;
    let g2 = sin_o * cy1 * cy2 + d1 * sin_lo * cx1 * cy2 + d2 * sin_l * cx2 * cy1;
    if !(g2.abs() > T::min_positive_value()) {
        return inconsistent("g2 vanishes");
    }
    let distance = sin_lo * cy2 / (sin_l * cy1) * (c2 - g1 / g2);
    Ok(CollinearSolution {
        distance,
        lambda,
        delta1,
        delta2,
        g1,
        g2,
        separation: distance * cy1 * sin_o / sin_lo,
    })
}

/// Distance solver for targets collinear with one terminal's projection (℘ = 5).
///
/// The AP-collinear branch is solved directly; the STA-collinear branch uses
/// the same formulas with the AP and STA roles exchanged, which yields
/// `d_a1`, and then `d_s1 = c1 − d_a1`.
pub fn solve_collinear<T: Scalar>(
    obs1: &PathObservation<T>,
    obs2: &PathObservation<T>,
    plane: &ProjectionPlane<T>,
    scene: SceneType,
    tol: &Tolerances<T>,
) -> Result<SolveResult<T>, GeomError> {
    let geo = PairGeometry::new(obs1, obs2, plane, tol)?;
    collinear_from_geometry(&geo, scene, tol)
}

fn collinear_from_geometry<T: Scalar>(
    geo: &PairGeometry<T>,
    scene: SceneType,
    tol: &Tolerances<T>,
) -> Result<SolveResult<T>, GeomError> {
    let side = match scene {
        SceneType::Collinear(side) => side,
        other => return Err(GeomError::WrongScene(other)),
    };
    let ap_col = in_collinear_set(geo.alpha_a1a2, tol.col);
    let sta_col = in_collinear_set(geo.alpha_s1s2, tol.col);
    if (ap_col && sta_col) || in_collinear_set(geo.alpha_a1s1, tol.col) {
        return Err(GeomError::Unsolvable {
            scene: SceneType::Degenerate,
        });
    }
    let [ca1, ca2, cs1, cs2] = geo.cos_betas();
    let r_a1a2 = reflex_reduce(geo.alpha_a1a2);
    let r_s1s2 = reflex_reduce(geo.alpha_s1s2);
    let r11 = reflex_reduce(geo.alpha_a1s1);
    let r22 = reflex_reduce(geo.alpha_a2s2);
    let (c1, c2) = (geo.c1, geo.c2);

    let mut im = geo.intermediates();
    let d_s1 = match side {
        CollinearWith::Ap => {
            let sol = collinear_core(r_a1a2, r11, r22, r_s1s2, [ca1, ca2, cs1, cs2], c1, c2, tol.col)?;
            im.lambda2 = Some(sol.lambda);
            im.delta_a1 = Some(sol.delta1);
            im.delta_a2 = Some(sol.delta2);
            im.g1 = sol.g1;
            im.g2 = sol.g2;
            im.projected_target_separation = Some(sol.separation);
            sol.distance
        }
        CollinearWith::Sta => {
            let sol = collinear_core(r_s1s2, r11, r22, r_a1a2, [cs1, cs2, ca1, ca2], c1, c2, tol.col)?;
            im.lambda1 = Some(sol.lambda);
            im.delta_a1 = Some(sol.delta1);
            im.delta_a2 = Some(sol.delta2);
            im.g1 = sol.g1;
            im.g2 = sol.g2;
            im.projected_target_separation = Some(sol.separation);
            c1 - sol.distance
        }
    };
    check_distance(d_s1, c1)?;
    im.distance_ap_target = c1 - d_s1;
    Ok(SolveResult {
        direction: geo.e_s1,
        distance: d_s1,
        scene,
        intermediates: im,
    })
}

/// Classifies the pair and dispatches to the matching solver.
///
/// `obs1` is the current path (its target is the one located), `obs2` the
/// selected historical path.
pub fn solve<T: Scalar>(
    obs1: &PathObservation<T>,
    obs2: &PathObservation<T>,
    plane: &ProjectionPlane<T>,
    tol: &Tolerances<T>,
) -> Result<SolveResult<T>, GeomError> {
    let geo = PairGeometry::new(obs1, obs2, plane, tol)?;
    match geo.scene(tol.col) {
        SceneType::Degenerate => Err(GeomError::Unsolvable {
            scene: SceneType::Degenerate,
        }),
        s @ SceneType::Collinear(_) => collinear_from_geometry(&geo, s, tol),
        s => separate_from_geometry(&geo, s, tol),
    }
}

/// Position of target 1: `sta + d_s1 · e_s1`.
pub fn localize<T: Scalar>(result: &SolveResult<T>, sta_position: Vec3<T>) -> Vec3<T> {
    sta_position + result.direction.vector() * result.distance
}
