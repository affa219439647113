//! Deterministic seed discipline. Each (system, noise level, trial) cell gets
//! one seed; every method evaluated at that cell sees identical noisy data,
//! which is what makes the per-trial vanilla/orthogonalized overlay exact.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8], mut hash: u64) -> u64 {
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// `base_seed + hash(system, sigma_index, trial)`, with a platform-stable
/// FNV-1a hash (the std hasher is seeded per process and must not be used
/// here).
pub fn cell_seed(base_seed: u64, system: &str, sigma_index: usize, trial: usize) -> u64 {
    let mut hash = fnv1a(system.as_bytes(), FNV_OFFSET);
    hash = fnv1a(&[0xff], hash);
    hash = fnv1a(&(sigma_index as u64).to_le_bytes(), hash);
    hash = fnv1a(&(trial as u64).to_le_bytes(), hash);
    base_seed.wrapping_add(hash)
}
