use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Which terminal's projection lies on the line through both projected targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CollinearWith {
    Ap,
    Sta,
}

/// Scene type ℘ of a pair of projected paths.
///
/// `Degenerate` (℘ = 0) means AP, STA and both targets are collinear in the
/// plane and the distance cannot be recovered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SceneType {
    Degenerate,
    Type1,
    Type2,
    Type3,
    Type4,
    Collinear(CollinearWith),
}

impl SceneType {
    pub fn index(&self) -> u8 {
        match self {
            SceneType::Degenerate => 0,
            SceneType::Type1 => 1,
            SceneType::Type2 => 2,
            SceneType::Type3 => 3,
            SceneType::Type4 => 4,
            SceneType::Collinear(_) => 5,
        }
    }

    pub fn is_separate(&self) -> bool {
        matches!(self.index(), 1..=4)
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            SceneType::Degenerate => "0",
            SceneType::Type1 => "1",
            SceneType::Type2 => "2",
            SceneType::Type3 => "3",
            SceneType::Type4 => "4",
            SceneType::Collinear(CollinearWith::Ap) => "5ap",
            SceneType::Collinear(CollinearWith::Sta) => "5sta",
        }
    }
}

impl fmt::Display for SceneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneType::Collinear(CollinearWith::Ap) => write!(f, "℘=5, collinear with AP"),
            SceneType::Collinear(CollinearWith::Sta) => write!(f, "℘=5, collinear with STA"),
            other => write!(f, "℘={}", other.index()),
        }
    }
}

/// Membership of a clockwise angle in `{0, π, 2π}` within `eps`.
pub fn in_collinear_set<T: Scalar>(alpha: T, eps: T) -> bool {
    alpha.abs() <= eps || (alpha - T::PI()).abs() <= eps || (T::two_pi() - alpha).abs() <= eps
}

/// Classifies the projected geometry from the three clockwise angles
/// `α(a1,a2)`, `α(s1,s2)` and `α(a1,s1)`.
///
/// When both targets sit on the same side of both terminals and
/// `α(a1,s1)` itself is collinear (AP and STA project onto a common line
/// through target 1, e.g. a baseline normal to the plane), the scene is
/// reported as [`SceneType::Type4`]: with `ℜ(α(a1,s1)) = 0` the type-3 and
/// type-4 angle relations coincide.
pub fn classify_scene<T: Scalar>(alpha_a1a2: T, alpha_s1s2: T, alpha_a1s1: T, eps_col: T) -> SceneType {
    let ap_col = in_collinear_set(alpha_a1a2, eps_col);
    let sta_col = in_collinear_set(alpha_s1s2, eps_col);
    match (ap_col, sta_col) {
        (true, true) => return SceneType::Degenerate,
        (true, false) => return SceneType::Collinear(CollinearWith::Ap),
        (false, true) => return SceneType::Collinear(CollinearWith::Sta),
        (false, false) => {}
    }
    let pi = T::PI();
    let ap_low = alpha_a1a2 < pi;
    let sta_low = alpha_s1s2 < pi;
    match (ap_low, sta_low) {
        (true, false) => SceneType::Type1,
        (false, true) => SceneType::Type2,
        _ => {
            if in_collinear_set(alpha_a1s1, eps_col) {
                SceneType::Type4
            } else if (alpha_a1s1 < pi) == ap_low {
                SceneType::Type4
            } else {
                SceneType::Type3
            }
        }
    }
}
