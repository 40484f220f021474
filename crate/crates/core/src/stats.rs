//! Per-run counters for verifier and synthesizer calls.

use std::time::Duration;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunStats {
    pub verify_time: Duration,
    pub verify_calls: u64,
    pub synth_time: Duration,
    pub synth_calls: u64,
}

impl RunStats {
    pub fn record_verify(&mut self, d: Duration) {
        self.verify_time += d;
        self.verify_calls += 1;
    }

    pub fn record_synth(&mut self, d: Duration) {
        self.synth_time += d;
        self.synth_calls += 1;
    }

    pub fn mean_verify_time(&self) -> Duration {
        mean(self.verify_time, self.verify_calls)
    }

    pub fn mean_synth_time(&self) -> Duration {
        mean(self.synth_time, self.synth_calls)
    }

    pub fn merge(&mut self, other: &RunStats) {
        self.verify_time += other.verify_time;
        self.verify_calls += other.verify_calls;
        self.synth_time += other.synth_time;
        self.synth_calls += other.synth_calls;
    }
}

fn mean(total: Duration, n: u64) -> Duration {
    if n == 0 {
        Duration::ZERO
    } else {
        Duration::from_secs_f64(total.as_secs_f64() / n as f64)
    }
}
