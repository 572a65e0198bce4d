use nalgebra::{SVector, Vector4};
use serde::{Deserialize, Serialize};

/// Second-moment vector `R`.
pub type SecondMoments = SVector<f64, 10>;
/// First moments `(<X->, <P->, <X+>, <P+>)`.
pub type FirstMoments = Vector4<f64>;

// Positions in R.
pub const XM_XM: usize = 0;
pub const XP_XP: usize = 1;
pub const XM_XP: usize = 2;
pub const PM_PM: usize = 3;
pub const PP_PP: usize = 4;
pub const PM_PP: usize = 5;
pub const XM_PM: usize = 6;
pub const XP_PP: usize = 7;
pub const XM_PP: usize = 8;
pub const XP_PM: usize = 9;

/// Column names of `R`, in storage order. The `_ac` suffix marks the
/// anticommutator `<{X, P}>`.
pub const SECOND_MOMENT_NAMES: [&str; 10] = [
    "XmXm", "XpXp", "XmXp", "PmPm", "PpPp", "PmPp", "XmPm_ac", "XpPp_ac", "XmPp_ac", "XpPm_ac",
];

pub const FIRST_MOMENT_NAMES: [&str; 4] = ["Xm", "Pm", "Xp", "Pp"];

/// `<X_i X_j>` for mode indices `i, j`.
pub(crate) fn xx(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => XM_XM,
        (1, 1) => XP_XP,
        _ => XM_XP,
    }
}

/// `<P_i P_j>`.
pub(crate) fn pp(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => PM_PM,
        (1, 1) => PP_PP,
        _ => PM_PP,
    }
}

/// `<{X_i, P_j}>`.
pub(crate) fn xp(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => XM_PM,
        (1, 1) => XP_PP,
        (0, 1) => XM_PP,
        _ => XP_PM,
    }
}

/// Position of `X_m` / `P_m` in the first-moment vector.
pub(crate) fn x1(m: usize) -> usize {
    2 * m
}

pub(crate) fn p1(m: usize) -> usize {
    2 * m + 1
}

/// Gaussian state in the normal-mode basis: raw first and second moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentState {
    pub time: f64,
    pub first: FirstMoments,
    pub second: SecondMoments,
}

impl MomentState {
    pub fn new(time: f64, first: FirstMoments, second: SecondMoments) -> Self {
        MomentState { time, first, second }
    }

    /// Shifts the mean by `delta` in mode coordinates, keeping the covariance fixed.
    pub fn displaced(&self, delta: FirstMoments) -> Self {
        let old = self.first;
        let new = old + delta;
        let mut second = self.second;
        // raw = central + mean products
        let prod = |a: &FirstMoments, i: usize, j: usize| a[i] * a[j];
        let update = |second: &mut SecondMoments, idx: usize, i: usize, j: usize, mult: f64| {
            second[idx] += mult * (prod(&new, i, j) - prod(&old, i, j));
        };
        update(&mut second, XM_XM, 0, 0, 1.0);
        update(&mut second, XP_XP, 2, 2, 1.0);
        update(&mut second, XM_XP, 0, 2, 1.0);
        update(&mut second, PM_PM, 1, 1, 1.0);
        update(&mut second, PP_PP, 3, 3, 1.0);
        update(&mut second, PM_PP, 1, 3, 1.0);
        update(&mut second, XM_PM, 0, 1, 2.0);
        update(&mut second, XP_PP, 2, 3, 2.0);
        update(&mut second, XM_PP, 0, 3, 2.0);
        update(&mut second, XP_PM, 2, 1, 2.0);
        MomentState {
            time: self.time,
            first: new,
            second,
        }
    }
}
