use std::collections::HashMap;
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

/// Spaces consecutive requests to the same host by at least `delay`.
pub struct Pacer {
    delay: Duration,
    next: Mutex<HashMap<String, Instant>>,
    wake: Condvar,
}

impl Pacer {
    pub fn new(delay: Duration) -> Self {
        Pacer {
            delay,
            next: Mutex::new(HashMap::new()),
            wake: Condvar::new(),
        }
    }

    /// Blocks until a request to `host` may be sent and reserves the slot.
    pub fn wait(&self, host: &str) {
        let host = host.to_ascii_lowercase();
        let mut next = self.next.lock().unwrap();
        loop {
            let now = Instant::now();
            match next.get(&host) {
                Some(t) if *t > now => {
                    let dur = *t - now;
                    next = self.wake.wait_timeout(next, dur).unwrap().0;
                }
                _ => {
                    next.insert(host, now + self.delay);
                    self.wake.notify_all();
                    return;
                }
            }
        }
    }
}
