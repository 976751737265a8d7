//! Minimum-interval rate limiter shared by all workers of one provider.

use std::sync::Mutex;

use super::clock::Clock;

pub struct RateLimiter {
    min_interval_ms: u64,
    /// Timestamp granted to the most recent acquisition. The lock is
    /// held across the sleep so concurrent callers queue up behind it.
    last_slot: Mutex<Option<u64>>,
}

impl RateLimiter {
    /// `requests_per_minute == 0` disables limiting.
    pub fn per_minute(requests_per_minute: u32) -> RateLimiter {
        let min_interval_ms = if requests_per_minute == 0 {
            0
        } else {
            60_000 / u64::from(requests_per_minute)
        };
        RateLimiter {
            min_interval_ms,
            last_slot: Mutex::new(None),
        }
    }

    /// Blocks until the next request slot and claims it.
    pub fn acquire(&self, clock: &dyn Clock) {
        if self.min_interval_ms == 0 {
            return;
        }
        let mut last = self.last_slot.lock().expect("limiter lock");
        let now = clock.now_ms();
        let slot = match *last {
            Some(prev) => (prev + self.min_interval_ms).max(now),
            None => now,
        };
        if slot > now {
            clock.sleep_ms(slot - now);
        }
        *last = Some(slot);
    }
}
