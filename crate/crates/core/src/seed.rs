//! Deterministic seed derivation.
//!
//! Every stochastic component (anchor split, encoder init, noise injection)
//! draws its seed from one root seed through [`child_seed`], so a run is
//! reproducible from a single number and components stay decorrelated.

/// splitmix64 finalizer; full-period mixer over u64.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a component seed from the root seed and a stable component label.
///
/// The label is FNV-1a hashed and mixed with the root through splitmix64,
/// so `child_seed(s, "a")` and `child_seed(s, "b")` are unrelated streams.
pub fn child_seed(root: u64, component: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in component.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(root ^ h)
}
