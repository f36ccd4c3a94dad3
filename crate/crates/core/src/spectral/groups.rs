//! Light-group composition and weight selection.
//!
//! Incoherent sources add in energy, so a scene lit by several source
//! classes is the weighted sum of one rendering per class.

use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};

use super::photometry::{dynamic_range, luminance_map, mean_luminance, DEFAULT_CLIP_PERCENTILES};
use super::{SpectralImage, SpectralKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKey {
    Sky,
    Headlights,
    Streetlights,
    Otherlights,
}

impl GroupKey {
    pub const ALL: [GroupKey; 4] = [
        GroupKey::Sky,
        GroupKey::Headlights,
        GroupKey::Streetlights,
        GroupKey::Otherlights,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupKey::Sky => "sky",
            GroupKey::Headlights => "headlights",
            GroupKey::Streetlights => "streetlights",
            GroupKey::Otherlights => "otherlights",
        }
    }
}

/// Four radiance renderings of one scene, one per source class.
#[derive(Debug, Clone)]
pub struct LightGroup {
    members: [SpectralImage; 4],
}

impl LightGroup {
    /// Members in [`GroupKey::ALL`] order.
    pub fn new(members: [SpectralImage; 4]) -> Result<Self> {
        let first = &members[0];
        for (key, m) in GroupKey::ALL.iter().zip(&members) {
            if m.kind() != SpectralKind::Radiance {
                return Err(Error::Structural(format!(
                    "light-group member `{}` must be radiance",
                    key.name()
                )));
            }
            if !m.same_geometry(first) {
                return Err(Error::Structural(format!(
                    "light-group member `{}` is {}x{}x{}, expected {}x{}x{} on the same grid",
                    key.name(),
                    m.rows(),
                    m.cols(),
                    m.grid().count,
                    first.rows(),
                    first.cols(),
                    first.grid().count
                )));
            }
        }
        Ok(LightGroup { members })
    }

    pub fn member(&self, key: GroupKey) -> &SpectralImage {
        &self.members[key.index()]
    }

    pub fn members(&self) -> &[SpectralImage; 4] {
        &self.members
    }

    pub fn rows(&self) -> usize {
        self.members[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.members[0].cols()
    }
}

/// One nonnegative weight per light group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupWeights {
    #[serde(default)]
    pub sky: f64,
    #[serde(default)]
    pub headlights: f64,
    #[serde(default)]
    pub streetlights: f64,
    #[serde(default)]
    pub otherlights: f64,
}

impl GroupWeights {
    pub fn new(sky: f64, headlights: f64, streetlights: f64, otherlights: f64) -> Result<Self> {
        let w = GroupWeights {
            sky,
            headlights,
            streetlights,
            otherlights,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn uniform(w: f64) -> Result<Self> {
        Self::new(w, w, w, w)
    }

    pub fn only(key: GroupKey, w: f64) -> Result<Self> {
        let mut out = [0.0; 4];
        out[key.index()] = w;
        Self::from_array(out)
    }

    pub fn from_array(a: [f64; 4]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.sky, self.headlights, self.streetlights, self.otherlights]
    }

    pub fn get(&self, key: GroupKey) -> f64 {
        self.as_array()[key.index()]
    }

    pub fn validate(&self) -> Result<()> {
        for (key, w) in GroupKey::ALL.iter().zip(self.as_array()) {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Domain(format!(
                    "weight for `{}` must be finite and ≥ 0, got {w}",
                    key.name()
                )));
            }
        }
        Ok(())
    }

    fn scaled(&self, k: f64) -> GroupWeights {
        let a = self.as_array();
        GroupWeights {
            sky: a[0] * k,
            headlights: a[1] * k,
            streetlights: a[2] * k,
            otherlights: a[3] * k,
        }
    }
}

/// Which weights the target search may not touch (global rescaling still applies).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightMask {
    #[serde(default)]
    pub sky: bool,
    #[serde(default)]
    pub headlights: bool,
    #[serde(default)]
    pub streetlights: bool,
    #[serde(default)]
    pub otherlights: bool,
}

/// Weighted sum of the light-group members.
pub fn compose_light_groups(group: &LightGroup, weights: &GroupWeights) -> Result<SpectralImage> {
    weights.validate()?;
    let first = &group.members[0];
    let mut acc = Array3::<f64>::zeros(first.data().raw_dim());
    for (m, w) in group.members.iter().zip(weights.as_array()) {
        if w != 0.0 {
            acc.scaled_add(w, m.data());
        }
    }
    Ok(SpectralImage::from_parts_unchecked(
        *first.grid(),
        SpectralKind::Radiance,
        acc,
    ))
}

/// Result of [`set_weights_for_target`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightSolution {
    pub weights: GroupWeights,
    pub achieved_dr: f64,
    pub achieved_mean_luminance: f64,
    /// False when no sky weight brings the dynamic range within 2% of the target.
    pub reachable: bool,
}

const DR_TOLERANCE: f64 = 0.02;
const SCAN_DECADES: f64 = 12.0;
const SCAN_POINTS: usize = 97;
const BISECTION_STEPS: usize = 60;

/// Choose weights hitting a dynamic range and a mean luminance.
///
/// The sky weight is searched (coarse log scan, then bisection in log
/// space) with the other weights held at `start`; a final global scale
/// sets the mean luminance. Scale-equivariant, so feeding the result back
/// in as `start` returns the same weights.
pub fn set_weights_for_target(
    group: &LightGroup,
    start: &GroupWeights,
    fixed: &WeightMask,
    target_dr: f64,
    target_mean_lum: f64,
) -> Result<WeightSolution> {
    start.validate()?;
    if fixed.sky {
        return Err(Error::Config("the sky weight must be free for the target search".into()));
    }
    if !(target_dr >= 0.0) || !(target_mean_lum > 0.0) {
        return Err(Error::Domain(format!(
            "targets must be dr ≥ 0 and mean luminance > 0, got ({target_dr}, {target_mean_lum})"
        )));
    }

    let lums: Vec<Array2<f64>> = group
        .members
        .iter()
        .map(luminance_map)
        .collect::<Result<_>>()?;
    let sky_lum = &lums[GroupKey::Sky.index()];
    let mut base = Array2::<f64>::zeros(sky_lum.raw_dim());
    for key in &GroupKey::ALL[1..] {
        let w = start.get(*key);
        if w != 0.0 {
            base.scaled_add(w, &lums[key.index()]);
        }
    }
    let sky_mean = mean_luminance(sky_lum.view());
    let base_mean = mean_luminance(base.view());
    if sky_mean == 0.0 && base_mean == 0.0 {
        return Err(Error::Domain("light group is empty (all members dark)".into()));
    }

    let dr_at = |s: f64| -> f64 {
        let mut m = base.clone();
        if s != 0.0 {
            m.scaled_add(s, sky_lum);
        }
        dynamic_range(m.view(), DEFAULT_CLIP_PERCENTILES).unwrap_or(f64::NAN)
    };

    let sky = if base_mean == 0.0 {
        // Only the sky contributes: its weight cannot change the dynamic range.
        1.0
    } else if sky_mean == 0.0 {
        0.0
    } else {
        let reference = base_mean / sky_mean;
        let at = |t: f64| reference * 10f64.powf(t);
        let ts: Vec<f64> = (0..SCAN_POINTS)
            .map(|i| -SCAN_DECADES + 2.0 * SCAN_DECADES * i as f64 / (SCAN_POINTS - 1) as f64)
            .collect();
        let fs: Vec<f64> = ts.iter().map(|t| dr_at(at(*t)) - target_dr).collect();
        let bracket = (0..SCAN_POINTS - 1).find(|&i| fs[i] == 0.0 || fs[i] * fs[i + 1] < 0.0);
        match bracket {
            Some(i) if fs[i] == 0.0 => at(ts[i]),
            Some(i) => {
                let (mut lo, mut hi) = (ts[i], ts[i + 1]);
                let f_lo_sign = fs[i].signum();
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    let f = dr_at(at(mid)) - target_dr;
                    if f == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if f.signum() == f_lo_sign {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                at(0.5 * (lo + hi))
            }
            None => {
                let best = (0..SCAN_POINTS)
                    .filter(|i| fs[*i].is_finite())
                    .min_by(|a, b| fs[*a].abs().total_cmp(&fs[*b].abs()))
                    .unwrap_or(SCAN_POINTS / 2);
                at(ts[best])
            }
        }
    };

    let mut unscaled = *start;
    unscaled.sky = sky;
    let mut composed = base;
    if sky != 0.0 {
        composed.scaled_add(sky, sky_lum);
    }
    let mean = mean_luminance(composed.view());
    let scale = target_mean_lum / mean;
    let weights = unscaled.scaled(scale);
    weights.validate()?;
    let achieved_dr = dynamic_range(composed.view(), DEFAULT_CLIP_PERCENTILES)?;
    let reachable = (achieved_dr - target_dr).abs() <= DR_TOLERANCE * target_dr.max(1e-12);
    Ok(WeightSolution {
        weights,
        achieved_dr,
        achieved_mean_luminance: mean * scale,
        reachable,
    })
}
