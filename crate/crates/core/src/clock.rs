//! Wall-clock abstraction so the search core stays free of OS time sources.

/// Monotonic seconds since some fixed origin.
pub trait Clock {
    fn now_s(&self) -> f64;
}

/// Clock that never advances; useful when only the tree budget should bound
/// a search.
pub struct NullClock;

impl Clock for NullClock {
    fn now_s(&self) -> f64 {
        0.0
    }
}

/// Manually advanced clock for deterministic tests.
pub struct ManualClock(pub core::cell::Cell<f64>);

impl ManualClock {
    pub fn new() -> ManualClock {
        ManualClock(core::cell::Cell::new(0.0))
    }

    pub fn advance(&self, dt: f64) {
        self.0.set(self.0.get() + dt);
    }
}

impl Default for ManualClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for ManualClock {
    fn now_s(&self) -> f64 {
        self.0.get()
    }
}
