//! Benchmark harness and IO companion for `algebra-core`.
//!
//! The library half holds the benchmark implementations so the binaries and
//! the integration tests share one code path; the binaries only do argument
//! parsing and report formatting.

pub mod benches;
pub mod matjson;
pub mod report;

pub use benches::{
    bench_fateman, bench_ideal, bench_minpoly, bench_nf_det, bench_pearce,
    bench_resultant_tower, demo_torsion,
};
pub use report::{BenchReport, CliError};

/// FNV-1a over the canonical text form: a stable, platform-independent
/// fingerprint for arbitrary ring elements.
pub fn fingerprint_str(s: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}
