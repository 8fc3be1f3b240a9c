use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Number of 15-minute slots in a day.
pub const SLOTS_PER_DAY: usize = 96;
/// Slot length in hours.
pub const SLOT_HOURS: f64 = 0.25;

/// Normalized coefficient series: every value in `[0, 1]` and the peak is
/// exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    id: String,
    coefficients: Vec<f64>,
}

impl LoadProfile {
    /// Wraps an already-normalized series.
    pub fn from_coefficients(id: impl Into<String>, coefficients: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if coefficients.is_empty() {
            return Err(Error::InvalidProfile(format!("profile `{id}` is empty")));
        }
        if let Some((slot, c)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, c)| !(0.0..=1.0).contains(*c))
        {
            return Err(Error::InvalidProfile(format!(
                "profile `{id}` slot {slot}: coefficient {c} outside [0, 1]"
            )));
        }
        if !coefficients.contains(&1.0) {
            return Err(Error::InvalidProfile(format!("profile `{id}` does not peak at exactly 1")));
        }
        Ok(Self { id, coefficients })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn at(&self, slot: usize) -> Result<f64> {
        self.coefficients.get(slot).copied().ok_or_else(|| {
            Error::InvalidInput(format!(
                "slot {slot} outside profile `{}` ({} slots)",
                self.id,
                self.coefficients.len()
            ))
        })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

/// Divides every interval by the series maximum.
pub fn normalize_profile(id: impl Into<String>, series_kw: &[f64]) -> Result<LoadProfile> {
    let id = id.into();
    if series_kw.is_empty() {
        return Err(Error::InvalidProfile(format!("profile `{id}` is empty")));
    }
    if let Some((slot, v)) = series_kw.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidProfile(format!(
            "profile `{id}` slot {slot}: value {v} is not a non-negative number"
        )));
    }
    let max = series_kw.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::InvalidProfile(format!("profile `{id}` is all zero")));
    }
    // x / max is correctly rounded, so the maximum maps to exactly 1 and no
    // value can exceed it.
    let coefficients = series_kw.iter().map(|v| v / max).collect();
    LoadProfile::from_coefficients(id, coefficients)
}

/// 1.0 from 08:00 to 17:00, zero otherwise.
pub fn ev_step_profile() -> LoadProfile {
    let coefficients = (0..SLOTS_PER_DAY)
        .map(|slot| if (32..68).contains(&slot) { 1.0 } else { 0.0 })
        .collect();
    LoadProfile::from_coefficients("ev_step", coefficients).expect("static profile")
}

/// Half-sine over 06:00 to 18:00 peaking at noon, zero at night. Evaluated
/// at slot start times.
pub fn pv_half_sine_profile() -> LoadProfile {
    let raw: Vec<f64> = (0..SLOTS_PER_DAY)
        .map(|slot| {
            let hour = slot as f64 * SLOT_HOURS;
            if (6.0..=18.0).contains(&hour) {
                (PI * (hour - 6.0) / 12.0).sin().max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    normalize_profile("pv_half_sine", &raw).expect("static profile")
}

/// Slot index of a `HH:MM` clock time on the 15-minute grid.
pub fn slot_of_time(hhmm: &str) -> Option<usize> {
    let (h, m) = hhmm.trim().split_once(':')?;
    let (h, m): (usize, usize) = (h.parse().ok()?, m.parse().ok()?);
    if h >= 24 || m >= 60 || m % 15 != 0 {
        return None;
    }
    Some(h * 4 + m / 15)
}
