//! Encounter-value bookkeeping.

use serde::{Deserialize, Serialize};

use crate::types::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EbrParams {
    pub copies: u32,
    /// Window length in seconds.
    pub window: SimTime,
    pub alpha: f64,
}

impl Default for EbrParams {
    fn default() -> Self {
        EbrParams {
            copies: 10,
            window: 60,
            alpha: 0.85,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EbrState {
    ev: f64,
    cwc: u32,
    window_start: SimTime,
}

impl EbrState {
    pub fn encounter_value(&self) -> f64 {
        self.ev
    }

    pub fn current_window_count(&self) -> u32 {
        self.cwc
    }

    /// Closes every window that ended at or before `now`.
    pub fn tick(&mut self, now: SimTime, params: &EbrParams) {
        let window = params.window.max(1);
        let closed = now.saturating_sub(self.window_start) / window;
        if closed == 0 {
            return;
        }
        self.ev = params.alpha * self.cwc as f64 + (1.0 - params.alpha) * self.ev;
        self.cwc = 0;
        if closed > 1 {
            let rest = (closed - 1).min(i32::MAX as u64) as i32;
            self.ev *= (1.0 - params.alpha).powi(rest);
        }
        self.window_start += closed * window;
    }

    /// Encounter value as it would read after `tick(now)`.
    pub fn value_at(&self, now: SimTime, params: &EbrParams) -> f64 {
        let mut s = self.clone();
        s.tick(now, params);
        s.ev
    }

    pub fn on_meet(&mut self, now: SimTime, params: &EbrParams) {
        self.tick(now, params);
        self.cwc += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_window_with_four_meetings() {
        let p = EbrParams::default();
        let mut s = EbrState::default();
        for t in [1, 10, 20, 59] {
            s.on_meet(t, &p);
        }
        assert_eq!(s.current_window_count(), 4);
        s.tick(60, &p);
        assert!((s.encounter_value() - 3.4).abs() < 1e-12);
        assert_eq!(s.current_window_count(), 0);
        s.tick(120, &p);
        assert!((s.encounter_value() - 3.4 * 0.15).abs() < 1e-12);
        s.tick(240, &p);
        assert!((s.encounter_value() - 3.4 * 0.15f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn identical_histories_identical_values() {
        let p = EbrParams::default();
        let (mut a, mut b) = (EbrState::default(), EbrState::default());
        for t in [5, 70, 71, 300] {
            a.on_meet(t, &p);
            b.on_meet(t, &p);
        }
        a.tick(1000, &p);
        b.tick(1000, &p);
        assert_eq!(a, b);
    }
}
